"""The causality measures: transfer entropy, instantaneous information
exchange, the DeltaI correction term, and Geweke's linear measures.

Every information measure is one conditional mutual information between
the A/B/C blocks that ``dirinfo.series`` embeds:

    transfer entropy           I(x past ; y_t | y past [, side past])
    instantaneous exchange     I(x_t ; y_t | x past, y past [, side])
    DeltaI                     I(side_t ; y_t | x past, y past, side past)
                             - I(side_t ; y_t |         y past, side past)

DeltaI is the term that separates the conditional decomposition
(rate = cTE + cIIE + DeltaI) from the past-conditioned one
(rate = cTE + uIIE); it is a difference of two CMIs sharing their A and
B blocks.

The Geweke measures replace the CMI with a log ratio of ordinary
least-squares prediction-error variances, using the last ``ar_order``
samples as regressors:

    F = var(y_t | restricted design) / var(y_t | design + source block)
    value = log F   (>= 0 for nested designs, up to round-off)

For linear Gaussian systems, log F equals exactly twice the
corresponding information rate; for nonlinear couplings (squared drives)
it is blind, which is the contrast the synthetic experiments exercise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DataError, EstimationError
from .estimators import Estimate, EstimatorConfig, cmi_knn
from .series import (
    LagSpec,
    MeasureKind,
    PointCloud,
    SampleMatrix,
    embed_delta_i,
    embed_measure,
)

__all__ = [
    "MeasureKind",
    "MeasureSpec",
    "MeasureValue",
    "embed_for",
    "evaluate_clouds",
    "evaluate",
    "transfer_entropy",
    "instantaneous_exchange",
    "delta_i",
    "geweke",
]


@dataclass(frozen=True)
class MeasureSpec:
    """Everything needed to evaluate one measure on one pair.

    Parameters
    ----------
    kind : MeasureKind
    target, source : str
        Channel names; ``source`` drives, ``target`` receives.  The
        instantaneous kinds are symmetric in the two.
    side : tuple of str
        Side channels; required non-empty by the conditional kinds and
        empty by the bivariate ones.
    lag : LagSpec
        Embedding window for the information kinds.
    est : EstimatorConfig
    ar_order : int
        Regression window for the Geweke kinds (ignored otherwise).
    """

    kind: MeasureKind
    target: str
    source: str
    side: tuple[str, ...] = ()
    lag: LagSpec = field(default_factory=LagSpec)
    est: EstimatorConfig = field(default_factory=EstimatorConfig)
    ar_order: int = 10

    def __post_init__(self):
        object.__setattr__(self, "side", tuple(self.side))
        if not isinstance(self.kind, MeasureKind):
            raise DataError(f"kind must be a MeasureKind, got {self.kind!r}")
        if self.target == self.source:
            raise DataError(f"source and target are both {self.target!r}")
        for ch in self.side:
            if ch in (self.target, self.source):
                raise DataError(f"side channel {ch!r} collides with source/target")
        if len(set(self.side)) != len(self.side):
            raise DataError(f"duplicate side channels: {list(self.side)}")
        if self.kind.requires_side and not self.side:
            raise DataError(f"{self.kind.value} requires at least one side channel")
        if (
            not self.kind.requires_side
            and self.kind is not MeasureKind.INSTANT_EXCHANGE
            and self.side
        ):
            raise DataError(f"{self.kind.value} is bivariate, got side={list(self.side)}")
        if not isinstance(self.ar_order, (int, np.integer)) or self.ar_order < 1:
            raise DataError(f"ar_order must be a positive integer, got {self.ar_order!r}")

    @property
    def window(self) -> int:
        """Embedding window actually used by this kind."""
        return self.ar_order if self.kind.is_geweke else self.lag.d_lag

    def validate_channels(self, names: Sequence[str]) -> None:
        known = set(names)
        for ch in (self.target, self.source, *self.side):
            if ch not in known:
                raise DataError(
                    f"unknown channel {ch!r}; available: {sorted(known)}"
                )

    def label(self) -> str:
        """Stable human-readable id, used in reports and file names."""
        parts = [self.kind.value, f"{self.source}_to_{self.target}"]
        if self.side:
            parts.append("given_" + "_".join(self.side))
        return "__".join(parts)


@dataclass(frozen=True)
class MeasureValue:
    """One evaluated measure; ``ratio`` is the raw variance ratio for the
    Geweke kinds and None otherwise."""

    value: float
    spec: MeasureSpec
    n_points: int
    ratio: float | None = None


def embed_for(data: SampleMatrix, spec: MeasureSpec) -> tuple[PointCloud, ...]:
    """The point cloud(s) feeding ``spec``: two for DeltaI, one otherwise.

    The clouds of a DeltaI pair share rows, so one row permutation of the
    B block can be applied consistently to both (the surrogate test
    relies on this).
    """
    spec.validate_channels(data.names)
    if spec.kind is MeasureKind.DELTA_I:
        return embed_delta_i(data, spec.source, spec.target, spec.side, spec.lag)
    cloud = embed_measure(
        data,
        spec.source,
        spec.target,
        spec.side,
        spec.lag,
        spec.kind,
        window=spec.ar_order if spec.kind.is_geweke else None,
    )
    return (cloud,)


def _cmi_from_cloud(cloud: PointCloud, est: EstimatorConfig) -> Estimate:
    c = cloud.block("C") if cloud.block_dim("C") else None
    return cmi_knn(cloud.block("A"), cloud.block("B"), c, est)


def _residual_variance(design: np.ndarray, y: np.ndarray) -> float:
    beta, _, rank, sv = np.linalg.lstsq(design, y, rcond=None)
    if rank < design.shape[1]:
        cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else np.inf
        raise EstimationError(
            f"rank-deficient regression design ({rank} < {design.shape[1]}, "
            f"condition number {cond:.3e}); channels are collinear or constant"
        )
    resid = y - design @ beta
    return float(resid @ resid) / y.shape[0]


def _geweke_from_cloud(cloud: PointCloud) -> tuple[float, float]:
    """(log variance ratio, raw ratio) for B regressed on C vs C + A."""
    y = cloud.block("B")[:, 0]
    ones = np.ones((cloud.n_points, 1))
    restricted = np.hstack([ones, cloud.block("C")])
    full = np.hstack([restricted, cloud.block("A")])
    v0 = _residual_variance(restricted, y)
    v1 = _residual_variance(full, y)
    if v0 <= 0 or v1 <= 0:
        raise EstimationError(
            "zero residual variance in Geweke regression; the target is a "
            "deterministic function of the regressors"
        )
    value = float(np.log(v0) - np.log(v1))
    if value < 0:
        if value < -1e-8:
            raise EstimationError(
                f"nested Geweke regression produced F < 1 (log F = {value:.3e}); "
                "numerical breakdown in least squares"
            )
        value = 0.0
    return value, v0 / v1


def evaluate_clouds(spec: MeasureSpec, clouds: Sequence[PointCloud]) -> MeasureValue:
    """Evaluate ``spec`` on clouds produced by ``embed_for`` (possibly
    with surrogate-permuted B blocks)."""
    if spec.kind is MeasureKind.DELTA_I:
        full, reduced = clouds
        est_full = _cmi_from_cloud(full, spec.est)
        est_red = _cmi_from_cloud(reduced, spec.est)
        return MeasureValue(
            value=est_full.value - est_red.value,
            spec=spec,
            n_points=full.n_points,
        )
    (cloud,) = clouds
    if spec.kind.is_geweke:
        value, ratio = _geweke_from_cloud(cloud)
        return MeasureValue(value=value, spec=spec, n_points=cloud.n_points, ratio=ratio)
    est = _cmi_from_cloud(cloud, spec.est)
    return MeasureValue(value=est.value, spec=spec, n_points=cloud.n_points)


def evaluate(data: SampleMatrix, spec: MeasureSpec) -> MeasureValue:
    """Embed ``data`` for ``spec`` and evaluate it."""
    return evaluate_clouds(spec, embed_for(data, spec))


def _expect_kind(spec: MeasureSpec, kinds: tuple[MeasureKind, ...], what: str):
    if spec.kind not in kinds:
        raise DataError(f"{what} cannot evaluate kind {spec.kind.value}")


def transfer_entropy(data: SampleMatrix, spec: MeasureSpec) -> MeasureValue:
    """Conditional or plain transfer entropy, window ``spec.lag.d_lag``."""
    _expect_kind(
        spec,
        (MeasureKind.TRANSFER_ENTROPY, MeasureKind.COND_TRANSFER_ENTROPY),
        "transfer_entropy",
    )
    return evaluate(data, spec)


def instantaneous_exchange(data: SampleMatrix, spec: MeasureSpec) -> MeasureValue:
    """Instantaneous information exchange (bivariate, side-past
    conditioned, or side-present conditioned, by kind)."""
    _expect_kind(
        spec,
        (
            MeasureKind.INSTANT_EXCHANGE,
            MeasureKind.UNCOND_INSTANT_EXCHANGE,
            MeasureKind.COND_INSTANT_EXCHANGE,
        ),
        "instantaneous_exchange",
    )
    return evaluate(data, spec)


def delta_i(data: SampleMatrix, spec: MeasureSpec) -> MeasureValue:
    """The decomposition correction term (intrinsic minus extrinsic
    instantaneous coupling)."""
    _expect_kind(spec, (MeasureKind.DELTA_I,), "delta_i")
    return evaluate(data, spec)


def geweke(data: SampleMatrix, spec: MeasureSpec) -> MeasureValue:
    """Geweke linear feedback measure (dynamic or instantaneous,
    optionally side-conditioned), window ``spec.ar_order``."""
    _expect_kind(
        spec,
        (
            MeasureKind.GEWEKE_DYNAMIC,
            MeasureKind.GEWEKE_COND_DYNAMIC,
            MeasureKind.GEWEKE_INSTANT,
            MeasureKind.GEWEKE_COND_INSTANT,
        ),
        "geweke",
    )
    return evaluate(data, spec)
