"""Successive-maxima return maps and binned map comparison."""

import numpy as np
import pytest

from symchaos.models import IntegratorConfig, LorenzParams, Trajectory, integrate
from symchaos.returnmap import (
    MapComparison,
    ReturnMap,
    binned_curve,
    build_zmax_map,
    compare_maps,
    map_from_maxima,
    write_comparison_csv,
    write_map_csv,
)


def _map(pairs):
    return ReturnMap(np.array(pairs, dtype=float))


# ------------------------------------------------------------ map shape


def test_pairs_of_successive_maxima():
    rmap = map_from_maxima([5.0, 7.0, 6.0, 8.0])
    assert rmap.points.tolist() == [[5.0, 7.0], [7.0, 6.0], [6.0, 8.0]]
    assert len(rmap.points) == 4 - 1


def test_too_few_maxima_rejected():
    with pytest.raises(ValueError, match="three maxima"):
        map_from_maxima([5.0, 7.0])


def test_return_map_validation():
    with pytest.raises(ValueError, match=r"\(n, 2\)"):
        ReturnMap(np.zeros((4, 3)))
    with pytest.raises(ValueError, match="finite"):
        ReturnMap(np.array([[0.0, np.nan]]))


def test_build_zmax_map_from_trajectory():
    t = np.arange(0.0, 40.0, 0.01)
    samples = np.zeros((len(t), 3))
    samples[:, 2] = np.sin(t)
    traj = Trajectory(dt=0.01, samples=samples, params=None, seed=0)
    rmap = build_zmax_map(traj)
    n_max = rmap.source_meta["n_maxima"]
    assert len(rmap.points) == n_max - 1
    assert np.allclose(rmap.points, 1.0, atol=1e-5)  # refined sine maxima


# ------------------------------------------------------------- binning


def test_binned_curve_hand_values():
    rmap = _map([[0.1, 1.0], [0.4, 2.0], [0.6, 3.0], [0.9, 4.0]])
    centers, means, counts = binned_curve(rmap, 2, domain=(0.0, 1.0))
    assert centers.tolist() == [0.25, 0.75]
    assert means.tolist() == [1.5, 3.5]
    assert counts.tolist() == [2, 2]


def test_binned_curve_marks_empty_bins_nan():
    rmap = _map([[0.1, 1.0], [0.2, 2.0], [0.15, 3.0]])
    _, means, counts = binned_curve(rmap, 3, domain=(0.0, 0.9))
    assert counts.tolist() == [3, 0, 0]
    assert means[0] == 2.0
    assert np.isnan(means[1]) and np.isnan(means[2])


def test_degenerate_domain_rejected():
    rmap = _map([[1.0, 2.0], [1.0, 3.0], [1.0, 4.0]])
    with pytest.raises(ValueError, match="degenerate"):
        binned_curve(rmap, 10)


# ------------------------------------------------------------ comparison


def test_comparison_with_self_is_exact():
    rng = np.random.default_rng(0)
    pts = np.column_stack([rng.uniform(30, 48, 500),
                           rng.uniform(30, 48, 500)])
    rmap = ReturnMap(pts)
    cmp = compare_maps(rmap, rmap, n_bins=40)
    assert cmp.binned_rms == 0.0
    assert cmp.overlap_fraction == 1.0
    assert cmp.n_bins == 40


def test_comparison_is_symmetric():
    rng = np.random.default_rng(1)
    a = ReturnMap(np.column_stack([rng.uniform(0, 1, 300),
                                   rng.uniform(0, 1, 300)]))
    b = ReturnMap(np.column_stack([rng.uniform(0.2, 1.2, 300),
                                   rng.uniform(0.2, 1.2, 300)]))
    ab = compare_maps(a, b)
    ba = compare_maps(b, a)
    assert ab.binned_rms == ba.binned_rms
    assert ab.overlap_fraction == ba.overlap_fraction


def test_comparison_hand_values():
    a = _map([[0.1, 2.0], [1.0, 3.0], [0.2, 2.0]])
    b = _map([[1.0, 3.5], [1.3, 4.5], [1.1, 4.0]])
    cmp = compare_maps(a, b, n_bins=2)
    # common domain [0.1, 1.3] split in two: only the upper bin is shared
    assert cmp.overlap_fraction == 0.5
    assert cmp.binned_rms == 1.0  # |mean_a - mean_b| = |3.0 - 4.0|


def test_disjoint_maps_rejected():
    a = _map([[0.1, 0.2], [0.2, 0.3], [0.3, 0.1]])
    b = _map([[10.0, 10.1], [10.2, 10.3], [10.1, 10.2]])
    with pytest.raises(ValueError, match="no populated bins"):
        compare_maps(a, b, n_bins=4)


# ---------------------------------------------------- tent-map geometry


def _populated_slopes(rmap, n_bins=50):
    centers, means, counts = binned_curve(rmap, n_bins)
    keep = counts > 0
    c, m = centers[keep], means[keep]
    return c, m, np.diff(m) / np.diff(c)


def test_r28_map_is_expansive():
    # cusp map: away from the tip, every branch has |slope| > 1
    traj = integrate("lorenz", LorenzParams(r=28.0), (1.0, 1.0, 1.0),
                     IntegratorConfig(dt=0.01, t_total=1600.0,
                                      t_transient=100.0))
    rmap = build_zmax_map(traj)
    assert len(rmap.points) == 1999
    centers, means, slopes = _populated_slopes(rmap)
    cusp = int(np.argmax(means))
    keep = [i for i in range(len(slopes)) if i not in (cusp - 1, cusp)]
    frac = float((np.abs(slopes[keep]) > 1.0).mean())
    assert frac >= 0.90


def test_r75_map_folds():
    # above the subcritical regime the right branch turns back up: the
    # one-humped cusp develops a fold
    traj = integrate("lorenz", LorenzParams(r=75.0), (1.0, 1.0, 1.0),
                     IntegratorConfig(dt=0.01, t_total=1600.0,
                                      t_transient=100.0))
    centers, means, slopes = _populated_slopes(build_zmax_map(traj))
    cusp = int(np.argmax(means))
    right = slopes[cusp:]
    assert np.any(np.sign(right[:-1]) != np.sign(right[1:]))


# -------------------------------------------------------------- csv shape


def test_map_csv_format(tmp_path):
    path = tmp_path / "map.csv"
    write_map_csv(_map([[38.5, 40.25], [40.25, 36.0], [36.0, 38.0]]), path)
    lines = path.read_text().splitlines()
    assert lines[0] == "z_n,z_np1"
    assert lines[1] == "38.5,40.25"
    assert len(lines) == 4


def test_comparison_csv_format(tmp_path):
    path = tmp_path / "cmp.csv"
    write_comparison_csv(MapComparison(50, 0.5, 0.9), path)
    lines = path.read_text().splitlines()
    assert lines[0] == "n_bins,binned_rms,overlap_fraction"
    assert lines[1] == "50,0.5,0.90000000000000002"
