"""Exact information and prediction measures for stationary Gaussian
VAR(1) models.

For x_t = A x_{t-1} + eps_t with eps_t ~ N(0, Q) iid and spectral radius
of A below one, every measure in this package has a closed form:

* the stationary covariance solves the discrete Lyapunov equation
  S = A S A' + Q, handled here as the linear system
  (I - kron(A, A)) vec(S) = vec(Q);
* lagged covariances are E[x_t x_{t-h}'] = A^h S, so any window of the
  process is jointly Gaussian with a covariance assembled from these
  blocks;
* entropies are 0.5 * log((2 pi e)^n det S_sub), conditional mutual
  informations are alternating sums of four entropies, and linear
  prediction-error variances are Schur complements.

These exact values are what the k-NN estimators are tested against, and
``run_identity_suite`` checks the decomposition and sum identities that
the estimators are supposed to satisfy only asymptotically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DataError, ModelError
from .measures import MeasureSpec
from .series import LagSpec, MeasureKind, measure_layout

__all__ = [
    "GaussianVarModel",
    "JointCovariance",
    "random_stable_model",
    "stationary_covariance",
    "joint_covariance",
    "gaussian_entropy",
    "gaussian_cmi",
    "conditional_variance",
    "oracle_measure",
    "directed_information",
    "run_identity_suite",
]

LOG_2PIE = np.log(2.0 * np.pi) + 1.0


@dataclass(frozen=True)
class GaussianVarModel:
    """A stable VAR(1) model: x_t = A x_{t-1} + eps_t, eps ~ N(0, Q)."""

    A: np.ndarray
    Q: np.ndarray
    names: tuple[str, ...] = ()

    def __post_init__(self):
        A = np.asarray(self.A, dtype=np.float64)
        Q = np.asarray(self.Q, dtype=np.float64)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ModelError(f"A must be square, got shape {A.shape}")
        if Q.shape != A.shape:
            raise ModelError(f"Q shape {Q.shape} does not match A shape {A.shape}")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(Q))):
            raise ModelError("A and Q must be finite")
        rho = np.max(np.abs(np.linalg.eigvals(A)))
        if rho >= 1.0:
            raise ModelError(
                f"A has spectral radius {rho:.6f} >= 1; the model is not stable"
            )
        if not np.allclose(Q, Q.T, rtol=0, atol=1e-10 * max(1.0, np.abs(Q).max())):
            raise ModelError("Q must be symmetric")
        eigs = np.linalg.eigvalsh((Q + Q.T) / 2.0)
        if eigs[0] <= 0:
            raise ModelError(
                f"Q must be positive definite; smallest eigenvalue {eigs[0]:.3e}"
            )
        names = tuple(self.names) or tuple(f"x{i + 1}" for i in range(A.shape[0]))
        if len(names) != A.shape[0] or len(set(names)) != len(names):
            raise ModelError(f"need {A.shape[0]} unique channel names, got {names}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "Q", (Q + Q.T) / 2.0)
        object.__setattr__(self, "names", names)

    @property
    def n_channels(self) -> int:
        return self.A.shape[0]

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise ModelError(
                f"unknown channel {name!r}; model has {list(self.names)}"
            ) from None

    def to_json_dict(self) -> dict:
        return {
            "A": self.A.tolist(),
            "Q": self.Q.tolist(),
            "names": list(self.names),
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "GaussianVarModel":
        try:
            return cls(
                A=np.asarray(obj["A"], dtype=np.float64),
                Q=np.asarray(obj["Q"], dtype=np.float64),
                names=tuple(obj.get("names") or ()),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ModelError):
                raise
            raise ModelError(f"malformed model object: {exc}") from None

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "GaussianVarModel":
        with open(path) as fh:
            try:
                obj = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ModelError(f"{path}: not valid JSON ({exc})") from None
        return cls.from_json_dict(obj)


def random_stable_model(
    n_channels: int,
    seed,
    spectral_radius: float = 0.7,
    names: Sequence[str] = (),
) -> GaussianVarModel:
    """A random dense stable VAR(1) with controlled spectral radius.

    Useful for identity checks and demos; Q is a random well-conditioned
    PD matrix with unit-order diagonal.
    """
    if not 0 < spectral_radius < 1:
        raise ModelError(f"spectral_radius must be in (0, 1), got {spectral_radius}")
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(n_channels, n_channels))
    A *= spectral_radius / np.max(np.abs(np.linalg.eigvals(A)))
    W = rng.normal(size=(n_channels, n_channels)) / np.sqrt(n_channels)
    Q = W @ W.T + 0.25 * np.eye(n_channels)
    return GaussianVarModel(A=A, Q=Q, names=tuple(names))


def stationary_covariance(model: GaussianVarModel) -> np.ndarray:
    """Solve S = A S A' + Q for the stationary covariance S."""
    d = model.n_channels
    lhs = np.eye(d * d) - np.kron(model.A, model.A)
    s = np.linalg.solve(lhs, model.Q.reshape(-1))
    S = s.reshape(d, d)
    return (S + S.T) / 2.0


@dataclass(frozen=True)
class JointCovariance:
    """Covariance of the stacked window (x_{t-span}, ..., x_{t-1}, x_t).

    Coordinates are grouped by time, oldest first, channels contiguous
    within each time slice; ``coord`` maps a (channel, lag) pair to its
    index, lag 0 being the present.
    """

    matrix: np.ndarray
    names: tuple[str, ...]
    span: int

    @property
    def n_channels(self) -> int:
        return len(self.names)

    def coord(self, name: str, lag: int) -> int:
        if not 0 <= lag <= self.span:
            raise DataError(f"lag {lag} outside window [0, {self.span}]")
        try:
            ch = self.names.index(name)
        except ValueError:
            raise DataError(
                f"unknown channel {name!r}; joint covers {list(self.names)}"
            ) from None
        return (self.span - lag) * self.n_channels + ch

    def coords(self, entries: Sequence[tuple[str, int]]) -> list[int]:
        return [self.coord(name, lag) for name, lag in entries]


def joint_covariance(model: GaussianVarModel, span: int) -> JointCovariance:
    """Exact joint covariance of ``span + 1`` consecutive time slices."""
    if span < 0:
        raise DataError(f"span must be >= 0, got {span}")
    d = model.n_channels
    S = stationary_covariance(model)
    # lagged covariances E[x_t x_{t-h}'] = A^h S
    G = [S]
    for _ in range(span):
        G.append(model.A @ G[-1])
    n = (span + 1) * d
    M = np.empty((n, n))
    for t1 in range(span + 1):
        for t2 in range(span + 1):
            # row time index t1 (0 oldest); E[x_{s1} x_{s2}'] with s1 - s2 = t1 - t2
            blk = G[t1 - t2] if t1 >= t2 else G[t2 - t1].T
            M[t1 * d : (t1 + 1) * d, t2 * d : (t2 + 1) * d] = blk
    M = (M + M.T) / 2.0
    return JointCovariance(matrix=M, names=model.names, span=span)


def _submatrix(cov: np.ndarray, idx: Sequence[int]) -> np.ndarray:
    idx = np.asarray(idx, dtype=np.intp)
    return cov[np.ix_(idx, idx)]


def gaussian_entropy(cov: np.ndarray) -> float:
    """Differential entropy of N(mu, cov) in nats; 0.0 for 0 dimensions."""
    cov = np.asarray(cov, dtype=np.float64)
    if cov.size == 0:
        return 0.0
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        raise DataError(f"covariance must be square, got shape {cov.shape}")
    if not np.allclose(cov, cov.T, rtol=0, atol=1e-10 * max(1.0, np.abs(cov).max())):
        raise ModelError("covariance is not symmetric")
    sign, logdet = np.linalg.slogdet(cov)
    if sign <= 0:
        raise ModelError("covariance is not positive definite")
    n = cov.shape[0]
    return 0.5 * (n * LOG_2PIE + logdet)


def _check_disjoint(a, b, c, n):
    groups = {"a": list(a), "b": list(b), "c": list(c)}
    seen: dict[int, str] = {}
    for label, idx in groups.items():
        for i in idx:
            i = int(i)
            if not 0 <= i < n:
                raise DataError(f"coordinate {i} out of range [0, {n})")
            if i in seen:
                raise DataError(
                    f"coordinate {i} appears in both {seen[i]!r} and {label!r}"
                )
            seen[i] = label
    if not groups["a"] or not groups["b"]:
        raise DataError("blocks a and b must be non-empty")


def gaussian_cmi(joint, a: Sequence[int], b: Sequence[int], c: Sequence[int] = ()) -> float:
    """Exact I(A;B|C) in nats from a joint Gaussian covariance.

    ``joint`` is a JointCovariance or a plain covariance matrix; a, b, c
    are disjoint coordinate index lists (c may be empty).
    """
    cov = joint.matrix if isinstance(joint, JointCovariance) else np.asarray(joint)
    a, b, c = list(a), list(b), list(c)
    _check_disjoint(a, b, c, cov.shape[0])
    h_ac = gaussian_entropy(_submatrix(cov, a + c))
    h_bc = gaussian_entropy(_submatrix(cov, b + c))
    h_abc = gaussian_entropy(_submatrix(cov, a + b + c))
    h_c = gaussian_entropy(_submatrix(cov, c)) if c else 0.0
    return h_ac + h_bc - h_abc - h_c


def conditional_variance(cov: np.ndarray, target: int, cond: Sequence[int]) -> float:
    """Variance of one coordinate given others (linear/Gaussian), via the
    Schur complement."""
    cov = cov.matrix if isinstance(cov, JointCovariance) else np.asarray(cov)
    cond = [int(i) for i in cond]
    t = int(target)
    if t in cond:
        raise DataError(f"target coordinate {t} is also a conditioning coordinate")
    v = float(cov[t, t])
    if not cond:
        return v
    idx = np.asarray(cond, dtype=np.intp)
    Scc = cov[np.ix_(idx, idx)]
    sct = cov[idx, t]
    try:
        sol = np.linalg.solve(Scc, sct)
    except np.linalg.LinAlgError:
        raise ModelError("conditioning covariance is singular") from None
    return v - float(sct @ sol)


def oracle_measure(model: GaussianVarModel, spec: MeasureSpec) -> float:
    """Exact population value of any MeasureSpec under ``model``.

    Information kinds come out as conditional mutual informations of the
    same coordinate layout the estimators embed; Geweke kinds as log
    ratios of Schur-complement prediction variances.  One shared layout
    function guarantees the estimator and the oracle look at the same
    coordinates.
    """
    spec.validate_channels(model.names)
    window = spec.ar_order if spec.kind.is_geweke else spec.lag.d_lag
    layout = measure_layout(
        spec.kind, spec.source, spec.target, spec.side, window, spec.lag.side_horizon
    )
    joint = joint_covariance(model, span=window)
    a = joint.coords(layout.block_entries("A"))
    b = joint.coords(layout.block_entries("B"))
    c = joint.coords(layout.block_entries("C"))

    if spec.kind is MeasureKind.DELTA_I:
        drop0, drop1 = layout.c_drop
        c_red = c[:drop0] + c[drop1:]
        return gaussian_cmi(joint, a, b, c) - gaussian_cmi(joint, a, b, c_red)
    if spec.kind.is_geweke:
        v_restricted = conditional_variance(joint.matrix, b[0], c)
        v_full = conditional_variance(joint.matrix, b[0], c + a)
        if v_full <= 0 or v_restricted <= 0:
            raise ModelError("degenerate prediction variance")
        return float(np.log(v_restricted / v_full))
    return gaussian_cmi(joint, a, b, c)


def directed_information(
    model: GaussianVarModel,
    source: str,
    target: str,
    horizon: int,
) -> float:
    """Finite-horizon directed information I(source^k -> target^k).

    Sum over i of I(source_1..i ; target_i | target_1..i-1), computed on
    the exact joint covariance of ``horizon`` consecutive slices.
    """
    if horizon < 1:
        raise DataError(f"horizon must be >= 1, got {horizon}")
    joint = joint_covariance(model, span=horizon - 1)
    # time i in 1..horizon corresponds to lag horizon - i
    lag_of = lambda i: horizon - i
    total = 0.0
    for i in range(1, horizon + 1):
        a = joint.coords([(source, lag_of(j)) for j in range(1, i + 1)])
        b = joint.coords([(target, lag_of(i))])
        c = joint.coords([(target, lag_of(j)) for j in range(1, i)])
        total += gaussian_cmi(joint, a, b, c)
    return total


def _sum_identity_residual(model, source, target, horizon) -> float:
    joint = joint_covariance(model, span=horizon - 1)
    lag_of = lambda i: horizon - i
    di_ab = directed_information(model, source, target, horizon)
    di_ba = directed_information(model, target, source, horizon)
    mi = gaussian_cmi(
        joint,
        joint.coords([(source, lag_of(i)) for i in range(1, horizon + 1)]),
        joint.coords([(target, lag_of(i)) for i in range(1, horizon + 1)]),
        (),
    )
    inst = 0.0
    for i in range(1, horizon + 1):
        past = [(source, lag_of(j)) for j in range(1, i)] + [
            (target, lag_of(j)) for j in range(1, i)
        ]
        inst += gaussian_cmi(
            joint,
            joint.coords([(source, lag_of(i))]),
            joint.coords([(target, lag_of(i))]),
            joint.coords(past),
        )
    return abs(di_ab + di_ba - mi - inst)


def _rate_lhs(joint: JointCovariance, source, target, side, d, with_side_present):
    """I(source at lags d..0; target_t | target past, side past [+ side_t])."""
    a = joint.coords([(source, lag) for lag in range(d, -1, -1)])
    b = joint.coords([(target, 0)])
    c_entries = [(target, lag) for lag in range(d, 0, -1)]
    for ch in side:
        c_entries += [(ch, lag) for lag in range(d, 0, -1)]
    if with_side_present:
        c_entries += [(ch, 0) for ch in side]
    return gaussian_cmi(joint, a, b, joint.coords(c_entries))


def run_identity_suite(
    model: GaussianVarModel,
    source: str,
    target: str,
    side: Sequence[str] = (),
    d_lag: int = 2,
    horizons: Sequence[int] = (1, 2, 3, 4, 5),
) -> dict[str, float]:
    """Residuals of the exact identities the measures must satisfy.

    Returns a dict with keys ``decomposition`` (causally conditioned rate
    = cTE + cIIE + DeltaI), ``past_conditioning`` (rate with side past
    only = cTE + uIIE) and ``sum_identity_h{k}`` (two directed
    informations = mutual information + cumulative instantaneous term,
    per finite horizon k).  All residuals are exact zeros up to float
    round-off for any stable model.
    """
    side = tuple(side)
    joint = joint_covariance(model, span=d_lag)
    out: dict[str, float] = {}

    def spec(kind):
        return MeasureSpec(
            kind=kind, target=target, source=source, side=side, lag=LagSpec(d_lag)
        )

    if side:
        lhs = _rate_lhs(joint, source, target, side, d_lag, with_side_present=True)
        rhs = (
            oracle_measure(model, spec(MeasureKind.COND_TRANSFER_ENTROPY))
            + oracle_measure(model, spec(MeasureKind.COND_INSTANT_EXCHANGE))
            + oracle_measure(model, spec(MeasureKind.DELTA_I))
        )
        out["decomposition"] = abs(lhs - rhs)
        lhs2 = _rate_lhs(joint, source, target, side, d_lag, with_side_present=False)
        rhs2 = oracle_measure(
            model, spec(MeasureKind.COND_TRANSFER_ENTROPY)
        ) + oracle_measure(model, spec(MeasureKind.UNCOND_INSTANT_EXCHANGE))
        out["past_conditioning"] = abs(lhs2 - rhs2)
    else:
        lhs2 = _rate_lhs(joint, source, target, (), d_lag, with_side_present=False)
        rhs2 = oracle_measure(
            model, spec(MeasureKind.TRANSFER_ENTROPY)
        ) + oracle_measure(model, spec(MeasureKind.INSTANT_EXCHANGE))
        out["past_conditioning"] = abs(lhs2 - rhs2)

    for k in horizons:
        out[f"sum_identity_h{k}"] = _sum_identity_residual(model, source, target, k)
    return out
