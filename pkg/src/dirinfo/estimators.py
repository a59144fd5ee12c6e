"""k-nearest-neighbor estimators of entropy and (conditional) mutual
information, in nats.

Differential entropy uses the Leonenko-Penrose-Savani estimator

    H_hat = log(M-1) - psi(k) + log V_dim + (dim / M) * sum_i log eps_i

where eps_i is the distance from point i to its k-th neighbor and V_dim
the unit-ball volume of the chosen metric.

Mutual information and conditional mutual information use digamma count
formulas built on one fixed k in the joint space (Chebyshev metric), with
strict counts n_*(i) of points closer than the i-th joint k-th-neighbor
distance inside each marginal subspace:

    I_hat(A;B)    = psi(k) + psi(M) - < psi(n_a+1) + psi(n_b+1) >
    I_hat(A;B|C)  = psi(k) - < psi(n_ac+1) + psi(n_bc+1) - psi(n_c+1) >

The CMI formula with an empty C block reduces exactly to the MI formula
(every n_c is then M-1), and ``mutual_information_knn`` is implemented as
that reduction, so the two agree bitwise by construction.

An alternative ``four_entropies`` CMI mode sums four Leonenko entropy
estimates, H(AC)+H(BC)-H(ABC)-H(C); it does not share distance scales
across the marginal spaces, is biased in higher dimensions, and is kept
only as a cross-check (selecting it emits a warning).
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DataError, EstimationError
from . import neighbors
from .neighbors import Metric

__all__ = [
    "CmiMode",
    "EstimatorConfig",
    "Estimate",
    "digamma",
    "entropy_knn",
    "mutual_information_knn",
    "cmi_knn",
]


class CmiMode(enum.Enum):
    DIGAMMA_COUNTS = "digamma_counts"
    FOUR_ENTROPIES = "four_entropies"


@dataclass(frozen=True)
class EstimatorConfig:
    """Knobs shared by all k-NN estimators.

    k : neighbor order, >= 1; small k lowers bias, larger k lowers
        variance.  Default 5.
    metric : Chebyshev everywhere by default; Euclidean is accepted only
        by ``entropy_knn``.
    cmi_mode : digamma_counts (default) or four_entropies.
    """

    k: int = 5
    metric: Metric = Metric.CHEBYSHEV
    cmi_mode: CmiMode = CmiMode.DIGAMMA_COUNTS

    def __post_init__(self):
        if not isinstance(self.k, (int, np.integer)) or self.k < 1:
            raise DataError(f"k must be a positive integer, got {self.k!r}")


@dataclass(frozen=True)
class Estimate:
    """A point estimate plus the bookkeeping needed to interpret it."""

    value: float
    k: int
    n_points: int


def digamma(x):
    """Digamma function, elementwise, domain x > 0.

    Thin wrapper over scipy's implementation that rejects the
    non-positive axis instead of returning nan/inf.
    """
    arr = np.asarray(x, dtype=np.float64)
    if np.any(arr <= 0):
        bad = arr[arr <= 0].flat[0]
        raise DataError(f"digamma requires x > 0, got {bad}")
    out = special.digamma(arr)
    return float(out) if np.isscalar(x) or arr.ndim == 0 else out


def _as_block(points, name: str) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2:
        raise DataError(f"{name} must be 1-D or 2-D, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise DataError(f"{name} contains non-finite values")
    return pts


def _check_sample_size(m_points: int, k: int):
    if m_points < k + 1:
        raise DataError(
            f"need at least k+1 = {k + 1} points, got {m_points}"
        )


def _degenerate(eps: np.ndarray, what: str):
    idx = int(np.argmax(eps == 0))
    raise EstimationError(
        f"k-th neighbor distance is zero for point {idx} ({what}); "
        "the sample has duplicate points, typically from quantized data. "
        "Consider adding tiny jitter (SampleMatrix.jittered or the CLI "
        "jitter option)."
    )


def entropy_knn(points, cfg: EstimatorConfig = EstimatorConfig()) -> Estimate:
    """Differential entropy of a sample, in nats.

    Parameters
    ----------
    points : array_like, shape (M,) or (M, dim)
    cfg : EstimatorConfig
        Both metrics are supported here.

    Returns
    -------
    Estimate
    """
    pts = _as_block(points, "points")
    m_points, dim = pts.shape
    _check_sample_size(m_points, cfg.k)
    index = neighbors.build_index(pts, cfg.metric)
    eps = neighbors.kth_distances(index, cfg.k)
    if np.any(eps == 0):
        _degenerate(eps, "entropy estimate")
    value = (
        np.log(m_points - 1)
        - digamma(cfg.k)
        + cfg.metric.log_unit_ball_volume(dim)
        + dim * np.mean(np.log(eps))
    )
    return Estimate(value=float(value), k=cfg.k, n_points=m_points)


def _digamma_counts_cmi(a, b, c, cfg: EstimatorConfig) -> Estimate:
    m_points = a.shape[0]
    pts = np.ascontiguousarray(np.hstack([a, b, c]))
    eps, n_ac, n_bc, n_c = neighbors.cmi_counts(
        pts, a.shape[1], b.shape[1], cfg.k
    )
    if np.any(eps == 0):
        _degenerate(eps, "joint space")
    value = digamma(cfg.k) - np.mean(
        digamma(n_ac + 1) + digamma(n_bc + 1) - digamma(n_c + 1)
    )
    return Estimate(value=float(value), k=cfg.k, n_points=m_points)


def _four_entropies_cmi(a, b, c, cfg: EstimatorConfig) -> Estimate:
    warnings.warn(
        "four_entropies CMI mode is a biased cross-check; "
        "digamma_counts is the supported estimator",
        stacklevel=3,
    )
    m_points = a.shape[0]
    ac = np.hstack([a, c])
    bc = np.hstack([b, c])
    abc = np.hstack([a, b, c])
    value = (
        entropy_knn(ac, cfg).value
        + entropy_knn(bc, cfg).value
        - entropy_knn(abc, cfg).value
    )
    if c.shape[1]:
        value -= entropy_knn(c, cfg).value
    return Estimate(value=float(value), k=cfg.k, n_points=m_points)


def cmi_knn(a, b, c=None, cfg: EstimatorConfig = EstimatorConfig()) -> Estimate:
    """Conditional mutual information I(A;B|C) in nats.

    Parameters
    ----------
    a, b : array_like, shape (M,) or (M, n)
        The two blocks whose dependence is measured.
    c : array_like, shape (M,) or (M, n), or None
        Conditioning block; None or zero columns mean plain MI.
    cfg : EstimatorConfig
        ``digamma_counts`` mode requires the Chebyshev metric.

    Returns
    -------
    Estimate

    Raises
    ------
    EstimationError
        If some joint k-th neighbor distance is exactly zero (duplicate
        points); the message names the offending point index.
    """
    a = _as_block(a, "a")
    b = _as_block(b, "b")
    m_points = a.shape[0]
    if c is None:
        c = np.empty((m_points, 0))
    c = _as_block(c, "c")
    if b.shape[0] != m_points or c.shape[0] != m_points:
        raise DataError(
            f"blocks disagree on sample count: {m_points}, {b.shape[0]}, {c.shape[0]}"
        )
    _check_sample_size(m_points, cfg.k)
    if cfg.cmi_mode is CmiMode.FOUR_ENTROPIES:
        return _four_entropies_cmi(a, b, c, cfg)
    if cfg.metric is not Metric.CHEBYSHEV:
        raise DataError(
            "digamma_counts mode requires the Chebyshev metric; "
            "euclidean is only available for entropy_knn or four_entropies"
        )
    return _digamma_counts_cmi(a, b, c, cfg)


def mutual_information_knn(a, b, cfg: EstimatorConfig = EstimatorConfig()) -> Estimate:
    """Mutual information I(A;B) in nats; the empty-C case of cmi_knn."""
    return cmi_knn(a, b, None, cfg)
