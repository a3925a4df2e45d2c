"""Spatially autocorrelated synthetic tasks from Gaussian random fields."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from scipy.spatial.distance import cdist

from .task import Task, build_task

MAX_N = 3000
JITTER = 1e-10


@dataclass(frozen=True, eq=False)
class SyntheticField:
    """A GRF sample with exponential covariance
    ``C(d) = sigma2 * exp(-d / rho) + nugget * [d == 0]``.

    The effective range (correlation ~5%) is about ``3 * rho``.
    """

    coords: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    sigma2: float
    rho: float
    nugget: float
    seed: int

    @property
    def effective_range(self) -> float:
        return 3.0 * self.rho


def exponential_covariance(coords, sigma2: float, rho: float, nugget: float = 0.0) -> np.ndarray:
    xy = np.asarray(coords, dtype=float)
    d = cdist(xy, xy)
    cov = sigma2 * np.exp(-d / rho)
    cov[d == 0] += nugget
    return cov


def cholesky_root(cov: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor, retrying once with diagonal jitter."""
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        pass
    try:
        return np.linalg.cholesky(cov + JITTER * np.eye(len(cov)))
    except np.linalg.LinAlgError:
        raise ValueError("covariance matrix is not factorizable even with jitter") from None


def sample_grf(n: int, sigma2: float = 1.0, rho: float = 0.1, nugget: float = 0.0, seed: int = 0) -> SyntheticField:
    """Sample ``n`` uniform points in the unit square and a zero-mean GRF at them."""
    if not 1 <= n <= MAX_N:
        raise ValueError(f"n must lie in [1, {MAX_N}] for dense factorization")
    if not rho > 0 or not sigma2 > 0 or nugget < 0:
        raise ValueError("need rho > 0, sigma2 > 0 and nugget >= 0")
    rng = np.random.default_rng(seed)
    coords = rng.uniform(size=(n, 2))
    root = cholesky_root(exponential_covariance(coords, sigma2, rho, nugget))
    values = root @ rng.standard_normal(n)
    return SyntheticField(coords, values, float(sigma2), float(rho), float(nugget), int(seed))


def make_classification_task(field: SyntheticField, p_extra_noise_features: int = 2, seed: int = 0) -> Task:
    """Binary task whose labels follow ``P(y = 1) = logistic(field value)``.

    Features are ``signal`` (field value plus N(0, 0.5 sigma) noise) and
    ``noise1..noiseP`` (standard normal). Coordinates are ``x`` and ``y``.
    """
    rng = np.random.default_rng(seed)
    v = field.values
    n = len(v)
    prob = 1.0 / (1.0 + np.exp(-v))
    label = rng.uniform(size=n) < prob
    sigma = np.sqrt(field.sigma2)
    data = {
        "label": np.where(label, "1", "0"),
        "x": field.coords[:, 0],
        "y": field.coords[:, 1],
        "signal": v + rng.normal(0.0, 0.5 * sigma, size=n),
    }
    for j in range(p_extra_noise_features):
        data[f"noise{j + 1}"] = rng.standard_normal(n)
    return build_task(
        pd.DataFrame(data),
        {"response": "label", "coords": ("x", "y"), "positive": "1"},
        id="synthetic",
        check_positive=False,
    )
