"""Entropy / MI / CMI estimators against closed forms and the Gaussian
oracle.

Tolerances here are for single draws at moderate M, so they are looser
than the averaged acceptance checks; what matters is that each estimator
sits on the right value, not sampling noise.
"""

import numpy as np
import pytest

from dirinfo.errors import DataError, EstimationError
from dirinfo.estimators import (
    CmiMode,
    EstimatorConfig,
    cmi_knn,
    digamma,
    entropy_knn,
    mutual_information_knn,
)
from dirinfo.gaussian import gaussian_entropy
from dirinfo.neighbors import Metric

from conftest import random_covariance


def gaussian_sample(rng, cov, m):
    return rng.multivariate_normal(np.zeros(cov.shape[0]), cov, size=m)


# ---------------------------------------------------------------------------
# digamma


def test_digamma_against_mpmath():
    mpmath = pytest.importorskip("mpmath")
    for x in (0.5, 1.0, 2.0, 5.0, 17.0, 123.456):
        assert digamma(x) == pytest.approx(float(mpmath.digamma(x)), abs=1e-13)


def test_digamma_recurrence_and_array():
    # psi(x+1) = psi(x) + 1/x
    x = np.array([0.3, 1.0, 4.5, 40.0])
    np.testing.assert_allclose(digamma(x + 1), digamma(x) + 1.0 / x, atol=1e-12)
    assert isinstance(digamma(3.0), float)


def test_digamma_rejects_nonpositive():
    with pytest.raises(DataError, match="-1"):
        digamma(-1.0)
    with pytest.raises(DataError):
        digamma(np.array([1.0, 0.0]))


# ---------------------------------------------------------------------------
# entropy


def test_entropy_standard_normal_1d():
    rng = np.random.default_rng(100)
    h_true = 0.5 * np.log(2 * np.pi * np.e)
    vals = [
        entropy_knn(rng.normal(size=4000), EstimatorConfig(k=5)).value
        for _ in range(5)
    ]
    assert np.mean(vals) == pytest.approx(h_true, abs=0.02)


def test_entropy_uniform_is_log_width():
    rng = np.random.default_rng(101)
    pts = rng.uniform(0.0, 3.0, size=6000)
    est = entropy_knn(pts, EstimatorConfig(k=5))
    assert est.value == pytest.approx(np.log(3.0), abs=0.03)


@pytest.mark.parametrize("metric", [Metric.CHEBYSHEV, Metric.EUCLIDEAN])
def test_entropy_2d_gaussian_both_metrics(metric):
    rng = np.random.default_rng(102)
    cov = np.array([[1.0, 0.6], [0.6, 1.5]])
    pts = gaussian_sample(rng, cov, 6000)
    est = entropy_knn(pts, EstimatorConfig(k=5, metric=metric))
    assert est.value == pytest.approx(gaussian_entropy(cov), abs=0.05)
    assert est.n_points == 6000
    assert est.k == 5


def test_entropy_affine_equivariance():
    # H(sX + c) = H(X) + log s, and the estimator obeys this exactly for
    # scalar scaling because every eps_i scales by s
    rng = np.random.default_rng(103)
    pts = rng.normal(size=1500)
    base = entropy_knn(pts, EstimatorConfig(k=4)).value
    scaled = entropy_knn(5.0 * pts + 2.0, EstimatorConfig(k=4)).value
    assert scaled == pytest.approx(base + np.log(5.0), abs=1e-12)


def test_entropy_1d_metrics_agree_exactly():
    # in one dimension both metrics give the same distances and V_1 = 2
    rng = np.random.default_rng(104)
    pts = rng.normal(size=500)
    h_c = entropy_knn(pts, EstimatorConfig(k=3, metric=Metric.CHEBYSHEV)).value
    h_e = entropy_knn(pts, EstimatorConfig(k=3, metric=Metric.EUCLIDEAN)).value
    assert h_c == h_e


# ---------------------------------------------------------------------------
# MI / CMI


def test_mi_bivariate_gaussian():
    rng = np.random.default_rng(105)
    rho = 0.8
    cov = np.array([[1.0, rho], [rho, 1.0]])
    mi_true = -0.5 * np.log(1 - rho**2)
    pts = gaussian_sample(rng, cov, 4000)
    est = mutual_information_knn(pts[:, 0], pts[:, 1])
    assert est.value == pytest.approx(mi_true, abs=0.05)


def test_mi_independent_near_zero():
    rng = np.random.default_rng(106)
    est = mutual_information_knn(rng.normal(size=3000), rng.normal(size=3000))
    assert abs(est.value) < 0.02


def test_mi_equals_cmi_with_empty_c_bitwise():
    rng = np.random.default_rng(107)
    a = rng.normal(size=(800, 2))
    b = 0.5 * a[:, :1] + rng.normal(size=(800, 1))
    assert (
        mutual_information_knn(a, b).value
        == cmi_knn(a, b, None).value
        == cmi_knn(a, b, np.empty((800, 0))).value
    )


def test_mi_symmetric_under_swap():
    rng = np.random.default_rng(108)
    a = rng.normal(size=600)
    b = a + rng.normal(size=600)
    assert mutual_information_knn(a, b).value == pytest.approx(
        mutual_information_knn(b, a).value, abs=1e-12
    )


def test_cmi_against_gaussian_oracle():
    rng = np.random.default_rng(109)
    cov, (ia, ib, ic) = random_covariance(rng, (1, 1, 2))
    pts = gaussian_sample(rng, cov, 4000)
    est = cmi_knn(pts[:, ia], pts[:, ib], pts[:, ic])
    # exact CMI for the same covariance, as an entropy sum
    want = (
        gaussian_entropy(cov[np.ix_(ia + ic, ia + ic)])
        + gaussian_entropy(cov[np.ix_(ib + ic, ib + ic)])
        - gaussian_entropy(cov)
        - gaussian_entropy(cov[np.ix_(ic, ic)])
    )
    assert est.value == pytest.approx(want, abs=0.05)


def test_cmi_vanishes_under_conditional_independence():
    # a <- c -> b: dependence between a and b is entirely through c
    rng = np.random.default_rng(110)
    c = rng.normal(size=3000)
    a = 0.9 * c + 0.3 * rng.normal(size=3000)
    b = -0.7 * c + 0.4 * rng.normal(size=3000)
    est = cmi_knn(a, b, c)
    assert abs(est.value) < 0.02
    # while the unconditional MI is clearly positive
    assert mutual_information_knn(a, b).value > 0.3


def test_cmi_chain_rule_consistency():
    # I(A; B,C) = I(A;C) + I(A;B|C) holds for the population; the
    # estimators share enough structure that the residual stays small
    rng = np.random.default_rng(111)
    a = rng.normal(size=2500)
    c = 0.8 * a + rng.normal(size=2500)
    b = 0.6 * c + rng.normal(size=2500)
    lhs = mutual_information_knn(a, np.column_stack([b, c])).value
    rhs = mutual_information_knn(a, c).value + cmi_knn(a, b, c).value
    assert lhs == pytest.approx(rhs, abs=0.05)


def test_four_entropies_mode_warns_and_roughly_agrees():
    rng = np.random.default_rng(112)
    rho = 0.6
    pts = gaussian_sample(rng, np.array([[1.0, rho], [rho, 1.0]]), 3000)
    with pytest.warns(UserWarning, match="four_entropies"):
        est = cmi_knn(
            pts[:, 0], pts[:, 1], None,
            EstimatorConfig(cmi_mode=CmiMode.FOUR_ENTROPIES),
        )
    assert est.value == pytest.approx(-0.5 * np.log(1 - rho**2), abs=0.1)


def test_digamma_counts_rejects_euclidean():
    rng = np.random.default_rng(113)
    with pytest.raises(DataError, match="Chebyshev"):
        cmi_knn(
            rng.normal(size=100),
            rng.normal(size=100),
            None,
            EstimatorConfig(metric=Metric.EUCLIDEAN),
        )


def test_duplicate_points_raise_and_jitter_fixes():
    from dirinfo.series import SampleMatrix

    rng = np.random.default_rng(114)
    raw = np.round(rng.normal(size=(500, 2)))  # heavy quantization
    with pytest.raises(EstimationError, match="jitter"):
        mutual_information_knn(raw[:, 0], raw[:, 1])
    fixed = SampleMatrix(raw, ("a", "b")).jittered(seed=0)
    est = mutual_information_knn(fixed.data[:, 0], fixed.data[:, 1])
    assert np.isfinite(est.value)


def test_block_shape_validation():
    rng = np.random.default_rng(115)
    a = rng.normal(size=100)
    with pytest.raises(DataError, match="sample count"):
        cmi_knn(a, rng.normal(size=99))
    with pytest.raises(DataError, match="k"):
        cmi_knn(a[:4], a[:4] + 1.0, cfg=EstimatorConfig(k=5))
    with pytest.raises(DataError):
        EstimatorConfig(k=0)
