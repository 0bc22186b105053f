import numpy as np
import pytest

from hdmean import corrmat


def random_correlation(rng: np.random.Generator, p: int) -> np.ndarray:
    """Random full-rank correlation matrix via a normalized Wishart draw."""
    a = rng.standard_normal((p, p + 2))
    cov = a @ a.T
    d = np.sqrt(np.diag(cov))
    corr = cov / d[:, None] / d[None, :]
    corr = 0.5 * (corr + corr.T)
    np.fill_diagonal(corr, 1.0)
    np.clip(corr, -1.0, 1.0, out=corr)
    return corr


def random_majorizing_spectrum(rng: np.random.Generator, p: int) -> np.ndarray:
    """Any nonnegative vector scaled to mean one majorizes, once sorted."""
    lam = rng.gamma(shape=1.5, size=p)
    lam = lam * (p / lam.sum())
    return np.sort(lam)[::-1]


def assert_valid_correlation(m: np.ndarray, psd_tol: float = 1e-8):
    assert np.array_equal(m, m.T)
    assert np.all(np.diag(m) == 1.0)
    assert np.max(np.abs(m)) <= 1.0
    assert np.linalg.eigvalsh(m)[0] >= -psd_tol


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
