"""Synthetic benchmark systems with known causality structure.

Three generators, all order-1 Markov with zero-initialized state and a
discarded burn-in:

* ``gen_chain``: a three-channel relay x -> y -> z where the first hop
  is a squared (purely nonlinear) coupling and the second is linear.
  Linear tests see the y -> z hop only; the x -> z path exists without
  conditioning and vanishes given y's past.
* ``gen_4d``: four channels (w, x, y, z) mixing linear and squared lag-1
  couplings, driven by correlated Gaussian noise whose covariance and
  precision matrices have different sparsity patterns; the two
  instantaneous-graph conventions recover one pattern each.
* ``gen_var1``: plain linear VAR(1) sampling for a GaussianVarModel, the
  bridge between the closed-form oracle and the estimators.

Each generator has a companion ``*_truth`` function deriving the ground
truth edge sets from the parameters, so experiments never hard-code the
expected graph.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EstimationError, ModelError
from .gaussian import GaussianVarModel
from .series import SampleMatrix

__all__ = [
    "BURN_IN",
    "DIVERGENCE_LIMIT",
    "ChainParams",
    "FourDParams",
    "GroundTruth",
    "noise_covariance",
    "noise_precision",
    "covariance_support",
    "precision_support",
    "gen_chain",
    "chain_truth",
    "gen_4d",
    "fourd_truth",
    "gen_var1",
    "var1_truth",
]

BURN_IN = 1000
DIVERGENCE_LIMIT = 1e9

# support entries smaller than this are structural zeros
_SUPPORT_TOL = 1e-12


def _pair(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class GroundTruth:
    """Edge sets implied by generator parameters.

    directed : frozenset of (source, target)
    instant_covariance : frozenset of unordered pairs; the dependence
        pattern seen when side information stops at the past (noise
        covariance support).
    instant_precision : same, for side information up to the present
        (noise precision support).
    """

    directed: frozenset
    instant_covariance: frozenset
    instant_precision: frozenset

    def to_json_dict(self) -> dict:
        return {
            "directed": sorted(list(e) for e in self.directed),
            "instant_covariance": sorted(list(e) for e in self.instant_covariance),
            "instant_precision": sorted(list(e) for e in self.instant_precision),
        }


@dataclass(frozen=True)
class ChainParams:
    """x_t = b x_{t-1} + e_x
    y_t = c y_{t-1} + d_xy x_{t-1}^2 + e_y
    z_t = d z_{t-1} + c_yz y_{t-1} + e_z,  noises iid N(0, 1).

    The x -> y hop is squared, invisible to linear measures; defaults
    give the relay used by the acceptance experiments.
    """

    b: float = 0.5
    c: float = 0.8
    d: float = 0.2
    d_xy: float = 0.8
    c_yz: float = 0.7

    def __post_init__(self):
        for name in ("b", "c", "d"):
            v = getattr(self, name)
            if not abs(v) < 1:
                raise ModelError(
                    f"autoregressive coefficient {name}={v} must satisfy |{name}| < 1"
                )


@dataclass(frozen=True)
class FourDParams:
    """w_t = a w_{t-1} + alpha z_{t-1} + e x_{t-1}^2 + eps_w
    x_t = b x_{t-1} + f z_{t-1}^2 + eps_x
    y_t = c y_{t-1} + beta x_{t-1} + g x_{t-1}^2 + eps_y
    z_t = d z_{t-1} + gamma w_{t-1} + eps_z

    with eps jointly Gaussian, covariance ``noise_covariance(rho1, rho2,
    rho3)``.  The w <-> z linear loop plus the squared feeds w <- x^2 and
    x <- z^2 bound how strong the couplings can be before the system
    diverges; defaults are chosen to be stable over millions of samples
    while keeping every true edge detectable at a few thousand samples.
    """

    a: float = 0.2
    b: float = 0.3
    c: float = 0.35
    d: float = 0.3
    alpha: float = 0.5
    beta: float = 0.4
    gamma: float = 0.08
    e: float = 0.18
    f: float = 0.19
    g: float = 0.15
    rho1: float = 0.66
    rho2: float = 0.55
    rho3: float = 0.48

    def __post_init__(self):
        for name in ("a", "b", "c", "d"):
            v = getattr(self, name)
            if not abs(v) < 1:
                raise ModelError(
                    f"autoregressive coefficient {name}={v} must satisfy |{name}| < 1"
                )
        # validates positive definiteness of the noise covariance
        noise_covariance(self.rho1, self.rho2, self.rho3)


def noise_covariance(rho1: float, rho2: float, rho3: float) -> np.ndarray:
    """Noise covariance of the 4-D system, channel order (w, x, y, z).

    Raises ModelError when the correlations make it non positive
    definite, naming the first failing leading principal minor.
    """
    g = np.array(
        [
            [1.0, rho1, 0.0, rho1 * rho2],
            [rho1, 1.0, 0.0, rho2],
            [0.0, 0.0, 1.0, rho3],
            [rho1 * rho2, rho2, rho3, 1.0],
        ]
    )
    for k in range(1, 5):
        minor = np.linalg.det(g[:k, :k])
        if minor <= 0:
            raise ModelError(
                f"noise covariance for rho=({rho1}, {rho2}, {rho3}) is not "
                f"positive definite: leading principal minor {k} is {minor:.6g}"
            )
    return g


def noise_precision(rho1: float, rho2: float, rho3: float) -> np.ndarray:
    """Closed-form inverse of ``noise_covariance``, same channel order."""
    noise_covariance(rho1, rho2, rho3)  # reuse the PD validation
    d1 = 1.0 / (1.0 - rho1**2)
    d2 = 1.0 / (1.0 - rho2**2 - rho3**2)
    return np.array(
        [
            [d1, -d1 * rho1, 0.0, 0.0],
            [
                -d1 * rho1,
                d1 * d2 * (1.0 - rho1**2 * rho2**2 - rho3**2),
                d2 * rho2 * rho3,
                -d2 * rho2,
            ],
            [0.0, d2 * rho2 * rho3, d2 * (1.0 - rho2**2), -d2 * rho3],
            [0.0, -d2 * rho2, -d2 * rho3, d2],
        ]
    )


def _matrix_support(m: np.ndarray, names: Sequence[str]) -> frozenset:
    pairs = set()
    for i in range(len(names)):
        for j in range(i + 1, len(names)):
            if abs(m[i, j]) > _SUPPORT_TOL:
                pairs.add(_pair(names[i], names[j]))
    return frozenset(pairs)


_FOURD_NAMES = ("w", "x", "y", "z")


def covariance_support(rho1: float, rho2: float, rho3: float) -> frozenset:
    """Unordered channel pairs with correlated noise."""
    return _matrix_support(noise_covariance(rho1, rho2, rho3), _FOURD_NAMES)


def precision_support(rho1: float, rho2: float, rho3: float) -> frozenset:
    """Unordered channel pairs with conditionally dependent noise."""
    return _matrix_support(noise_precision(rho1, rho2, rho3), _FOURD_NAMES)


def _check_trajectory(arr: np.ndarray, what: str) -> None:
    bad = ~np.isfinite(arr) | (np.abs(arr) > DIVERGENCE_LIMIT)
    if np.any(bad):
        step = int(np.argmax(np.any(bad, axis=1)))
        raise EstimationError(
            f"{what} diverged at simulation step {step} "
            "(burn-in included); weaken the couplings"
        )


def _positive_length(n: int) -> int:
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ModelError(f"sample count must be a positive integer, got {n!r}")
    return int(n)


def gen_chain(params: ChainParams, n: int, seed) -> SampleMatrix:
    """Simulate the chain, returning n samples of channels (x, y, z)."""
    n = _positive_length(n)
    total = n + BURN_IN
    rng = np.random.default_rng(seed)
    eps = rng.standard_normal((total, 3))
    out = np.zeros((total, 3))
    b, c, d = params.b, params.c, params.d
    with np.errstate(over="ignore", invalid="ignore"):
        for t in range(1, total):
            xp, yp, zp = out[t - 1]
            out[t, 0] = b * xp + eps[t, 0]
            out[t, 1] = c * yp + params.d_xy * xp * xp + eps[t, 1]
            out[t, 2] = d * zp + params.c_yz * yp + eps[t, 2]
    _check_trajectory(out, "chain system")
    return SampleMatrix(out[BURN_IN:], ("x", "y", "z"))


def chain_truth(params: ChainParams) -> GroundTruth:
    directed = set()
    if params.d_xy != 0:
        directed.add(("x", "y"))
    if params.c_yz != 0:
        directed.add(("y", "z"))
    # independent unit noises: no instantaneous edges either way
    return GroundTruth(
        directed=frozenset(directed),
        instant_covariance=frozenset(),
        instant_precision=frozenset(),
    )


def gen_4d(params: FourDParams, n: int, seed) -> SampleMatrix:
    """Simulate the 4-D system, returning n samples of (w, x, y, z)."""
    n = _positive_length(n)
    total = n + BURN_IN
    rng = np.random.default_rng(seed)
    chol = np.linalg.cholesky(noise_covariance(params.rho1, params.rho2, params.rho3))
    eps = rng.standard_normal((total, 4)) @ chol.T
    out = np.zeros((total, 4))
    p = params
    with np.errstate(over="ignore", invalid="ignore"):
        for t in range(1, total):
            wp, xp, yp, zp = out[t - 1]
            out[t, 0] = p.a * wp + p.alpha * zp + p.e * xp * xp + eps[t, 0]
            out[t, 1] = p.b * xp + p.f * zp * zp + eps[t, 1]
            out[t, 2] = p.c * yp + p.beta * xp + p.g * xp * xp + eps[t, 2]
            out[t, 3] = p.d * zp + p.gamma * wp + eps[t, 3]
    _check_trajectory(out, "4-D system")
    return SampleMatrix(out[BURN_IN:], _FOURD_NAMES)


def fourd_truth(params: FourDParams) -> GroundTruth:
    directed = set()
    if params.e != 0:
        directed.add(("x", "w"))
    if params.alpha != 0:
        directed.add(("z", "w"))
    if params.f != 0:
        directed.add(("z", "x"))
    if params.beta != 0 or params.g != 0:
        directed.add(("x", "y"))
    if params.gamma != 0:
        directed.add(("w", "z"))
    return GroundTruth(
        directed=frozenset(directed),
        instant_covariance=covariance_support(params.rho1, params.rho2, params.rho3),
        instant_precision=precision_support(params.rho1, params.rho2, params.rho3),
    )


def gen_var1(model: GaussianVarModel, n: int, seed, burn_in: int = BURN_IN) -> SampleMatrix:
    """Sample a stable VAR(1) model; channels named by the model."""
    n = _positive_length(n)
    total = n + burn_in
    rng = np.random.default_rng(seed)
    chol = np.linalg.cholesky(model.Q)
    eps = rng.standard_normal((total, model.n_channels)) @ chol.T
    out = np.zeros((total, model.n_channels))
    A_T = model.A.T
    for t in range(1, total):
        out[t] = out[t - 1] @ A_T + eps[t]
    _check_trajectory(out, "VAR(1) model")
    return SampleMatrix(out[burn_in:], model.names)


def var1_truth(model: GaussianVarModel) -> GroundTruth:
    directed = set()
    for i in range(model.n_channels):
        for j in range(model.n_channels):
            if i != j and abs(model.A[i, j]) > _SUPPORT_TOL:
                directed.add((model.names[j], model.names[i]))
    prec = np.linalg.inv(model.Q)
    return GroundTruth(
        directed=frozenset(directed),
        instant_covariance=_matrix_support(model.Q, model.names),
        instant_precision=_matrix_support(prec, model.names),
    )
