import numpy as np
import pytest

from spatiocv.partitioners import empirical_semivariogram, estimate_autocorrelation_range
from spatiocv.synthgen import sample_grf


def brute_semivariogram(z, xy, n_lags, cutoff):
    width = cutoff / n_lags
    sums = np.zeros(n_lags)
    counts = np.zeros(n_lags, dtype=int)
    for i in range(len(z)):
        for j in range(i + 1, len(z)):
            d = np.hypot(*(xy[i] - xy[j]))
            if d > cutoff:
                continue
            b = min(int(d // width), n_lags - 1)
            sums[b] += (z[i] - z[j]) ** 2
            counts[b] += 1
    with np.errstate(invalid="ignore"):
        return 0.5 * sums / counts, counts


def test_semivariogram_matches_pair_loop():
    rng = np.random.default_rng(0)
    xy = rng.uniform(size=(40, 2))
    z = rng.normal(size=40)
    _, gamma, counts = empirical_semivariogram(z, xy, 6, 0.7)
    g_ref, c_ref = brute_semivariogram(z, xy, 6, 0.7)
    np.testing.assert_array_equal(counts, c_ref)
    np.testing.assert_allclose(gamma, g_ref, rtol=1e-12)


def test_white_noise_is_flat():
    hits = 0
    for seed in range(20):
        rng = np.random.default_rng(seed)
        est = estimate_autocorrelation_range(rng.normal(size=300), rng.uniform(size=(300, 2)))
        hits += est.range <= est.bin_mids[0]
    assert hits >= 18


def test_grf_range_near_truth():
    f = sample_grf(500, rho=0.1, seed=3)
    est = estimate_autocorrelation_range(f.values, f.coords)
    assert 0.15 <= est.range <= 0.6
    assert est.sill > 0
    assert len(est.semivariance) == 8


def test_sparse_bins_are_interpolated():
    # two tight clusters far apart leave the middle lag bins empty
    rng = np.random.default_rng(1)
    xy = np.vstack([rng.uniform(0, 0.05, (20, 2)), rng.uniform(0.95, 1.0, (20, 2))])
    z = rng.normal(size=40)
    est = estimate_autocorrelation_range(z, xy, n_lags=10, cutoff=1.5)
    assert est.interpolated.any()
    assert np.all(np.isfinite(est.semivariance))


def test_errors():
    rng = np.random.default_rng(2)
    xy = rng.uniform(size=(40, 2))
    with pytest.raises(ValueError, match="constant"):
        estimate_autocorrelation_range(np.ones(40), xy)
    with pytest.raises(ValueError, match="30"):
        estimate_autocorrelation_range(rng.normal(size=10), xy[:10])
    with pytest.raises(ValueError):
        estimate_autocorrelation_range(rng.normal(size=40), xy, cutoff=-1)


def test_to_dict():
    rng = np.random.default_rng(4)
    est = estimate_autocorrelation_range(rng.normal(size=50), rng.uniform(size=(50, 2)), n_lags=5)
    d = est.to_dict()
    assert d["range"] == est.range
    assert len(d["lags"]) == 5
