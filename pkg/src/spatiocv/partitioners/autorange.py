"""Data-driven block/buffer size: the distance at which the empirical
semivariogram levels off."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial.distance import pdist

SILL_FRACTION = 0.95


@dataclass(frozen=True, eq=False)
class RangeEstimate:
    range: float
    sill: float
    bin_edges: np.ndarray
    bin_mids: np.ndarray
    semivariance: np.ndarray
    pair_counts: np.ndarray
    interpolated: np.ndarray

    def to_dict(self) -> dict:
        return {
            "range": self.range,
            "sill": self.sill,
            "lags": [
                {"mid": float(m), "semivariance": float(g), "pairs": int(c), "interpolated": bool(i)}
                for m, g, c, i in zip(self.bin_mids, self.semivariance, self.pair_counts, self.interpolated)
            ],
        }


def empirical_semivariogram(values, coords, n_lags: int, cutoff: float):
    """Binned semivariance: half the mean squared difference of value pairs
    whose separation falls in each of ``n_lags`` equal-width bins on
    ``[0, cutoff]``. Returns ``(edges, semivariance, pair_counts)``.
    """
    z = np.asarray(values, dtype=float)
    d = pdist(np.asarray(coords, dtype=float))
    sq = pdist(z[:, None], "sqeuclidean")
    edges = np.linspace(0.0, cutoff, n_lags + 1)
    keep = d <= cutoff
    idx = np.minimum((d[keep] / cutoff * n_lags).astype(np.int64), n_lags - 1)
    counts = np.bincount(idx, minlength=n_lags)
    sums = np.bincount(idx, weights=sq[keep], minlength=n_lags)
    with np.errstate(invalid="ignore", divide="ignore"):
        gamma = 0.5 * sums / counts
    return edges, gamma, counts


def estimate_autocorrelation_range(
    values,
    coords,
    n_lags: int = 8,
    cutoff: Optional[float] = None,
) -> RangeEstimate:
    """Estimate where spatial autocorrelation levels off.

    The sill is the mean semivariance over the upper half of the lag bins, and
    the range is the midpoint of the first bin reaching 95% of it. Bins with
    fewer than two pairs are linearly interpolated from their neighbors.
    ``cutoff`` defaults to half the largest pairwise distance.
    """
    z = np.asarray(values, dtype=float)
    xy = np.asarray(coords, dtype=float)
    if len(z) < 30:
        raise ValueError("at least 30 observations are needed to estimate a range")
    if xy.shape != (len(z), 2):
        raise ValueError("coords must be an n x 2 array matching values")
    if not (np.all(np.isfinite(z)) and np.all(np.isfinite(xy))):
        raise ValueError("values and coords must be finite")
    if np.ptp(z) == 0:
        raise ValueError("values are constant; the semivariogram is identically zero")
    if n_lags < 2:
        raise ValueError("n_lags must be >= 2")
    if cutoff is None:
        cutoff = 0.5 * float(pdist(xy).max())
    if not cutoff > 0:
        raise ValueError("cutoff must be positive")

    edges, gamma, counts = empirical_semivariogram(z, xy, n_lags, cutoff)
    mids = 0.5 * (edges[:-1] + edges[1:])
    sparse = counts < 2
    if sparse.all():
        raise ValueError("no lag bin holds two or more pairs; increase cutoff")
    if sparse.any():
        gamma = gamma.copy()
        gamma[sparse] = np.interp(mids[sparse], mids[~sparse], gamma[~sparse])
    sill = float(gamma[n_lags // 2 :].mean())
    reached = np.flatnonzero(gamma >= SILL_FRACTION * sill)
    # the upper-half mean guarantees some bin at or above it
    rng = float(mids[reached[0]])
    return RangeEstimate(rng, sill, edges, mids, gamma, counts, sparse)
