"""Synthetic generators: reproducibility, noise structure, ground truth."""

import numpy as np
import pytest

from dirinfo.errors import EstimationError, ModelError
from dirinfo.gaussian import stationary_covariance
from dirinfo.synth import (
    BURN_IN,
    ChainParams,
    FourDParams,
    chain_truth,
    covariance_support,
    fourd_truth,
    gen_4d,
    gen_chain,
    gen_var1,
    noise_covariance,
    noise_precision,
    precision_support,
    var1_truth,
)

from conftest import random_var_model

RHO = (0.66, 0.55, 0.48)


# ---------------------------------------------------------------------------
# noise structure


def test_precision_is_exact_inverse():
    cov = noise_covariance(*RHO)
    prec = noise_precision(*RHO)
    np.testing.assert_allclose(prec @ cov, np.eye(4), atol=1e-12)


def test_supports_differ_in_the_documented_way():
    # covariance couples (w,z) but not (x,y); precision the other way
    assert covariance_support(*RHO) == {
        ("w", "x"),
        ("w", "z"),
        ("x", "z"),
        ("y", "z"),
    }
    assert precision_support(*RHO) == {
        ("w", "x"),
        ("x", "y"),
        ("x", "z"),
        ("y", "z"),
    }


def test_noise_covariance_rejects_non_pd():
    with pytest.raises(ModelError, match="minor"):
        noise_covariance(0.9, 0.8, 0.7)


def test_zero_correlations_give_identity():
    np.testing.assert_array_equal(noise_covariance(0, 0, 0), np.eye(4))
    assert covariance_support(0, 0, 0) == frozenset()


def test_noise_covariance_matches_simulation():
    # with every coupling off the generator emits pure noise, so the
    # empirical covariance must reproduce noise_covariance directly
    params = FourDParams(
        a=0, b=0, c=0, d=0, alpha=0, beta=0, gamma=0, e=0, f=0, g=0
    )
    data = gen_4d(params, n=150_000, seed=20)
    emp = np.cov(data.data.T, ddof=0)
    np.testing.assert_allclose(emp, noise_covariance(*RHO), atol=0.02)


# ---------------------------------------------------------------------------
# generators


def test_chain_reproducible_and_shaped():
    a = gen_chain(ChainParams(), n=500, seed=5)
    b = gen_chain(ChainParams(), n=500, seed=5)
    np.testing.assert_array_equal(a.data, b.data)
    assert a.names == ("x", "y", "z")
    assert a.n_samples == 500
    c = gen_chain(ChainParams(), n=500, seed=6)
    assert not np.array_equal(a.data, c.data)


def test_chain_dynamics_step_exact():
    # re-derive one transition from the simulated states and the known
    # coefficients: z_{t} - d z_{t-1} - c_yz y_{t-1} must be iid N(0,1)
    p = ChainParams()
    data = gen_chain(p, n=20_000, seed=7)
    x, y, z = data.data.T
    resid = z[1:] - p.d * z[:-1] - p.c_yz * y[:-1]
    assert resid.mean() == pytest.approx(0.0, abs=0.03)
    assert resid.std() == pytest.approx(1.0, abs=0.03)
    # and the y equation is driven by the *square* of x
    resid_y = y[1:] - p.c * y[:-1] - p.d_xy * x[:-1] ** 2
    assert resid_y.std() == pytest.approx(1.0, abs=0.03)
    assert abs(np.corrcoef(resid_y, x[:-1])[0, 1]) < 0.03


def test_chain_truth_follows_coefficients():
    t = chain_truth(ChainParams())
    assert t.directed == {("x", "y"), ("y", "z")}
    assert t.instant_covariance == frozenset()
    t2 = chain_truth(ChainParams(d_xy=0.0))
    assert t2.directed == {("y", "z")}


def test_chain_rejects_unstable_ar():
    with pytest.raises(ModelError, match="c=1.1"):
        ChainParams(c=1.1)


def test_4d_reproducible_and_bounded():
    a = gen_4d(FourDParams(), n=2000, seed=8)
    b = gen_4d(FourDParams(), n=2000, seed=8)
    np.testing.assert_array_equal(a.data, b.data)
    assert a.names == ("w", "x", "y", "z")
    # screened defaults stay small; divergence would trip the guard long
    # before this bound
    assert np.abs(a.data).max() < 50


def test_4d_divergence_guard_names_step():
    # the quartic z -> x -> w -> z loop blows up when pushed hard
    params = FourDParams(gamma=0.6, e=0.6, f=0.6)
    with pytest.raises(EstimationError, match=r"step \d+"):
        gen_4d(params, n=5000, seed=9)


def test_4d_truth_defaults():
    t = fourd_truth(FourDParams())
    assert t.directed == {
        ("x", "w"),
        ("z", "w"),
        ("z", "x"),
        ("x", "y"),
        ("w", "z"),
    }
    assert t.instant_covariance == covariance_support(*RHO)
    assert t.instant_precision == precision_support(*RHO)
    # switching couplings off removes exactly their edges
    t2 = fourd_truth(FourDParams(gamma=0.0, e=0.0))
    assert t2.directed == {("z", "w"), ("z", "x"), ("x", "y")}


def test_var1_matches_stationary_covariance():
    model = random_var_model(seed=21, n_channels=3)
    data = gen_var1(model, n=200_000, seed=22)
    np.testing.assert_allclose(
        np.cov(data.data.T, ddof=0), stationary_covariance(model), atol=0.05
    )


def test_var1_truth_reads_model_structure():
    model = random_var_model(seed=23, n_channels=2)
    t = var1_truth(model)
    x1, x2 = model.names
    assert (x1, x2) in t.directed and (x2, x1) in t.directed
    assert t.instant_covariance == {(x1, x2)} or model.Q[0, 1] == 0


def test_burn_in_removes_transient():
    # zero-initialized state: without burn-in the first samples are
    # atypically small; with the default burn-in the variance is already
    # stationary in the first and last quarters
    model = random_var_model(seed=24)
    data = gen_var1(model, n=40_000, seed=25)
    v_head = data.data[:10_000].var(axis=0)
    v_tail = data.data[-10_000:].var(axis=0)
    np.testing.assert_allclose(v_head, v_tail, rtol=0.1)
    raw = gen_var1(model, n=40_000, seed=25, burn_in=0)
    assert raw.data[0, 0] != data.data[0, 0]
    assert BURN_IN >= 100


def test_sample_count_validation():
    with pytest.raises(ModelError, match="positive"):
        gen_chain(ChainParams(), n=0, seed=1)
    with pytest.raises(ModelError, match="positive"):
        gen_4d(FourDParams(), n=-5, seed=1)
