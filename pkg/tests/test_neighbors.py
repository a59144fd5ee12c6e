"""Neighbor queries checked against a brute-force O(M^2) reference."""

import numpy as np
import pytest
from scipy.spatial.distance import cdist

from dirinfo.errors import DataError
from dirinfo.neighbors import (
    CountMode,
    Metric,
    build_index,
    cmi_counts,
    count_within,
    counts_within,
    kth_distance,
    kth_distances,
)


def brute_kth(pts, i, k, metric):
    d = cdist(pts[i : i + 1], pts, metric=metric.value)[0]
    return np.sort(d)[k]  # d[i] == 0 occupies rank 0


def brute_count(pts, i, radius, metric, strict):
    d = cdist(pts[i : i + 1], pts, metric=metric.value)[0]
    inside = d < radius if strict else d <= radius
    return int(inside.sum()) - 1


@pytest.mark.parametrize("metric", [Metric.CHEBYSHEV, Metric.EUCLIDEAN])
def test_kth_distance_matches_brute_force(metric):
    rng = np.random.default_rng(11)
    pts = rng.normal(size=(60, 3))
    index = build_index(pts, metric)
    for k in (1, 4, 59):
        got = kth_distances(index, k)
        want = [brute_kth(pts, i, k, metric) for i in range(60)]
        np.testing.assert_allclose(got, want, rtol=0, atol=0)
        assert kth_distance(index, 17, k) == got[17]


@pytest.mark.parametrize("metric", [Metric.CHEBYSHEV, Metric.EUCLIDEAN])
@pytest.mark.parametrize("mode", [CountMode.STRICT, CountMode.INCLUSIVE])
def test_counts_match_brute_force(metric, mode):
    rng = np.random.default_rng(12)
    pts = rng.normal(size=(50, 2))
    index = build_index(pts, metric)
    radii = rng.uniform(0.1, 1.5, size=50)
    got = counts_within(index, radii, mode)
    want = [
        brute_count(pts, i, radii[i], metric, mode is CountMode.STRICT)
        for i in range(50)
    ]
    np.testing.assert_array_equal(got, want)
    assert count_within(index, 5, radii[5], mode) == got[5]


def test_strict_vs_inclusive_differ_on_exact_ties():
    # integer grid: every pairwise distance is an integer, so radius 1.0
    # sits exactly on the shell of the 4 axis neighbors
    pts = np.array([[x, y] for x in range(5) for y in range(5)], dtype=float)
    index = build_index(pts, Metric.EUCLIDEAN)
    center = 12  # (2, 2)
    assert count_within(index, center, 1.0, CountMode.INCLUSIVE) == 4
    assert count_within(index, center, 1.0, CountMode.STRICT) == 0


def test_strict_count_at_kth_radius():
    # the strict ball at the k-th neighbor distance holds at most k-1
    # other points, exactly k-1 when distances are all distinct
    rng = np.random.default_rng(13)
    pts = rng.normal(size=(80, 4))
    index = build_index(pts)
    k = 7
    eps = kth_distances(index, k)
    counts = counts_within(index, eps, CountMode.STRICT)
    np.testing.assert_array_equal(counts, k - 1)


def test_cmi_counts_backends_bitwise_identical():
    rng = np.random.default_rng(14)
    for n_a, n_b, n_c in [(1, 1, 0), (1, 1, 2), (2, 1, 3)]:
        pts = rng.normal(size=(120, n_a + n_b + n_c))
        kern = cmi_counts(pts, n_a, n_b, k=4, use_kernel=True)
        tree = cmi_counts(pts, n_a, n_b, k=4, use_kernel=False)
        for a, b in zip(kern, tree):
            np.testing.assert_array_equal(a, b)


def test_cmi_counts_against_brute_force():
    rng = np.random.default_rng(15)
    n_a, n_b, k = 2, 1, 5
    pts = rng.normal(size=(70, 5))
    eps, n_ac, n_bc, n_c = cmi_counts(pts, n_a, n_b, k)
    for i in range(0, 70, 9):
        diff = np.abs(pts - pts[i])
        d_a = diff[:, :n_a].max(axis=1)
        d_b = diff[:, n_a : n_a + n_b].max(axis=1)
        d_c = diff[:, n_a + n_b :].max(axis=1)
        d_all = np.maximum(np.maximum(d_a, d_b), d_c)
        assert eps[i] == np.sort(d_all)[k]
        assert n_ac[i] == int((np.maximum(d_a, d_c) < eps[i]).sum()) - 1
        assert n_bc[i] == int((np.maximum(d_b, d_c) < eps[i]).sum()) - 1
        assert n_c[i] == int((d_c < eps[i]).sum()) - 1


def test_cmi_counts_empty_c_block():
    rng = np.random.default_rng(16)
    pts = rng.normal(size=(40, 2))
    _, _, _, n_c = cmi_counts(pts, 1, 1, k=3)
    np.testing.assert_array_equal(n_c, 39)


def test_cmi_counts_duplicate_rows_report_sentinel():
    rng = np.random.default_rng(17)
    pts = rng.normal(size=(30, 3))
    pts[10] = pts[3]
    pts[11] = pts[3]
    pts[12] = pts[3]
    for use_kernel in (True, False):
        eps, n_ac, n_bc, n_c = cmi_counts(pts, 1, 1, k=2, use_kernel=use_kernel)
        for i in (3, 10, 11, 12):
            assert eps[i] == 0.0
            assert n_ac[i] == n_bc[i] == n_c[i] == -1


def test_unit_ball_volumes():
    assert Metric.CHEBYSHEV.log_unit_ball_volume(3) == pytest.approx(3 * np.log(2))
    assert Metric.EUCLIDEAN.log_unit_ball_volume(1) == pytest.approx(np.log(2))
    assert Metric.EUCLIDEAN.log_unit_ball_volume(2) == pytest.approx(np.log(np.pi))
    assert Metric.EUCLIDEAN.log_unit_ball_volume(3) == pytest.approx(
        np.log(4 * np.pi / 3)
    )
    with pytest.raises(DataError):
        Metric.CHEBYSHEV.log_unit_ball_volume(0)


def test_validation_errors():
    rng = np.random.default_rng(18)
    pts = rng.normal(size=(10, 2))
    index = build_index(pts)
    with pytest.raises(DataError, match="k must be"):
        kth_distance(index, 0, 10)
    with pytest.raises(DataError, match="out of range"):
        kth_distance(index, 10, 1)
    with pytest.raises(DataError, match="radius"):
        count_within(index, 0, 0.0)
    with pytest.raises(DataError, match="shape"):
        counts_within(index, np.ones(5))
    with pytest.raises(DataError, match="block dims"):
        cmi_counts(pts, 2, 1, k=1)
    with pytest.raises(DataError, match="at least 2"):
        build_index(pts[:1])
    with pytest.raises(DataError, match="non-finite"):
        build_index(np.array([[0.0, np.inf], [1.0, 2.0]]))


def test_accepts_point_cloud_and_1d_input():
    from dirinfo.series import PointCloud

    rng = np.random.default_rng(19)
    pts = rng.normal(size=(25, 2))
    cloud = PointCloud(pts, (("A", (0, 1)), ("B", (1, 2))))
    assert build_index(cloud).n_points == 25
    one_d = build_index(rng.normal(size=30))
    assert one_d.dim == 1
