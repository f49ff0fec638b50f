"""Shared fixtures and independent integration oracles.

The Simpson-rule helpers below are deliberately separate from the
package's adaptive quadrature so that integral checks always run through
an independent code path. Monte Carlo oracles read their seed from
PPREP_SEED (fixed default) so runs are reproducible.
"""

from __future__ import annotations

import math
import os

import numpy as np
import pytest

from pprep import BetaParams, Study, StudyPair

SEED = int(os.environ.get("PPREP_SEED", "20260810"))


def rng_for(offset: int = 0) -> np.random.Generator:
    return np.random.default_rng(SEED + offset)


def composite_simpson(f, lo: float, hi: float, n: int = 1_000_001) -> float:
    """Composite Simpson rule with a vectorized integrand; n must be odd."""
    if n % 2 == 0:
        n += 1
    x = np.linspace(lo, hi, n)
    y = f(x)
    h = (hi - lo) / (n - 1)
    return float(h / 3.0 * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-1:2].sum()))


def simpson_semiinf(f, n: int = 1_000_001, scale: float = 1.0) -> float:
    """Simpson rule over [0, inf) through the map t = scale * u / (1 - u)."""

    def transformed(u: np.ndarray) -> np.ndarray:
        u = np.minimum(u, 1.0 - 1e-12)
        t = scale * u / (1.0 - u)
        return f(t) * scale / (1.0 - u) ** 2

    return composite_simpson(transformed, 0.0, 1.0 - 1e-9, n)


@pytest.fixture(scope="session")
def labels_original() -> Study:
    return Study(0.21, 0.05)


@pytest.fixture(scope="session")
def labels_replications() -> list[Study]:
    return [Study(0.09, 0.05), Study(0.21, 0.06), Study(0.44, 0.04)]


@pytest.fixture(scope="session")
def labels_pairs(labels_original, labels_replications) -> list[StudyPair]:
    return [StudyPair(labels_original, rep) for rep in labels_replications]


@pytest.fixture(scope="session")
def uniform_prior() -> BetaParams:
    return BetaParams(1.0, 1.0)


def normal_pdf(x, mean, var):
    return np.exp(-0.5 * (x - mean) ** 2 / var) / np.sqrt(2.0 * math.pi * var)
