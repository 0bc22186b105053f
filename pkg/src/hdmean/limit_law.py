"""The limiting mixture law b Z0 + (1/sqrt(2)) sum rho_i (Z_i^2 - 1).

The Gaussian coefficient ``b`` and the spike weights ``rho`` satisfy
``b^2 + sum rho_i^2 = 1``, so the law always has mean 0 and variance 1.
The weights are the limits of leading eigenvalues of the correlation
matrix divided by its Frobenius norm: no spikes gives a standard normal,
a fully spiked matrix gives a centered weighted chi-square, and anything
in between is a convolution of the two.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .sampling import SeedSpec

__all__ = [
    "MixtureLaw",
    "normal_law",
    "law_from_weights",
    "mixture_from_spectrum",
    "single_spike_law",
    "geometric_spike_law",
    "plugin_law",
    "sample_law",
    "cdf",
    "p_value",
]

_NORM_TOL = 1e-10
MAX_SPIKES = 64
MIN_SPIKE = 1e-6
DEFAULT_MC_DRAWS = 200_000


@dataclass(frozen=True)
class MixtureLaw:
    """Gaussian coefficient b plus descending nonnegative spike weights."""

    b: float
    rho: tuple[float, ...] = ()

    def __post_init__(self):
        if self.b < 0:
            raise DomainError("b must be nonnegative")
        rho = tuple(float(x) for x in self.rho)
        if any(x < 0 for x in rho):
            raise DomainError("spike weights must be nonnegative")
        if any(rho[i] < rho[i + 1] for i in range(len(rho) - 1)):
            raise DomainError("spike weights must be sorted in descending order")
        if rho and rho[0] > 1.0:
            raise DomainError("spike weights cannot exceed 1")
        total = self.b**2 + sum(x * x for x in rho)
        if abs(total - 1.0) > _NORM_TOL:
            raise DomainError(f"law is not normalized: b^2 + sum rho^2 = {total!r}")
        object.__setattr__(self, "rho", rho)

    def to_dict(self) -> dict:
        return {"b": self.b, "rho": list(self.rho)}


def normal_law() -> MixtureLaw:
    return MixtureLaw(b=1.0, rho=())


def law_from_weights(weights) -> MixtureLaw:
    """Law with the given spike weights; b absorbs the leftover variance.

    Weights below 1e-6 (or beyond the 64 leading ones) are folded into b,
    which preserves the total variance exactly. Should the squared
    weights exceed 1, they are rescaled to total variance one with b = 0.
    """
    w = np.sort(np.asarray(weights, dtype=float).ravel())[::-1]
    w = w[w >= MIN_SPIKE][:MAX_SPIKES]
    ss = float(np.sum(w**2))
    if ss > 1.0:
        w = w / math.sqrt(ss)
        ss = 1.0
    return MixtureLaw(b=math.sqrt(max(0.0, 1.0 - ss)), rho=tuple(float(x) for x in w))


def mixture_from_spectrum(spec, k_max: int = 10, eps: float = 0.1) -> MixtureLaw:
    """Spike weights lambda_i / ||R||_F from a population spectrum.

    Keeps at most ``k_max`` leading weights that are at least ``eps``;
    the rest of the variance goes to the Gaussian coefficient.
    """
    lam = np.asarray(spec, dtype=float).ravel()
    if lam.size < 1 or np.any(lam < 0):
        raise DomainError("spectrum must be nonempty and nonnegative")
    if k_max < 0:
        raise DomainError("k_max must be nonnegative")
    if not 0.0 <= eps < 1.0:
        raise DomainError("eps must lie in [0, 1)")
    fro = math.sqrt(float(np.sum(lam**2)))
    if fro == 0.0:
        raise DomainError("spectrum is identically zero")
    w = np.sort(lam)[::-1][: max(k_max, 0)] / fro
    w = w[w >= max(eps, MIN_SPIKE)]
    ss = min(float(np.sum(w**2)), 1.0)
    return MixtureLaw(b=math.sqrt(max(0.0, 1.0 - ss)), rho=tuple(float(x) for x in w))


def single_spike_law(c: float) -> MixtureLaw:
    """One-spike family indexed by c >= 0 (math.inf allowed).

    c = 0 is the standard normal; finite c gives b = 1/sqrt(c^2+1) and a
    single weight c/sqrt(c^2+1); c = inf is the pure centered chi-square.
    This is the limit of the equicorrelated model when sqrt(p) times the
    off-diagonal entry tends to c.
    """
    if c < 0:
        raise DomainError("spike strength c must be nonnegative")
    if c == 0:
        return normal_law()
    if math.isinf(c):
        return MixtureLaw(b=0.0, rho=(1.0,))
    root = math.sqrt(c * c + 1.0)
    return MixtureLaw(b=1.0 / root, rho=(c / root,))


def geometric_spike_law(tau: float, k_terms: int) -> MixtureLaw:
    """Geometrically decaying weights sqrt(3 tau^2/(tau^2+3)) 2^-i, i = 1..k_terms."""
    if tau < 0:
        raise DomainError("tau must be nonnegative")
    if k_terms < 1:
        raise DomainError("k_terms must be a positive integer")
    if tau == 0:
        return normal_law()
    amp = math.sqrt(3.0 * tau * tau / (tau * tau + 3.0))
    rho = amp * 2.0 ** -np.arange(1, k_terms + 1)
    ss = min(float(np.sum(rho**2)), 1.0)
    return MixtureLaw(b=math.sqrt(max(0.0, 1.0 - ss)), rho=tuple(float(x) for x in rho))


def plugin_law(summary, estimate, k_max: int = 10, eps: float = 0.1) -> MixtureLaw:
    """Data-driven law: leading eigenvalues of Rhat over the root trace estimate.

    The scale is sqrt(|tr(Rhat^2) - p(p-1)/d|). A stated convention, not
    a spike-detection procedure; callers can always supply weights
    explicitly instead.
    """
    denom = math.sqrt(abs(estimate.estimate))
    if denom <= 0.0:
        return normal_law()
    lam = np.linalg.eigvalsh(summary.corr)[::-1][: max(k_max, 0)]
    w = np.clip(lam, 0.0, None) / denom
    return law_from_weights(w[w >= max(eps, MIN_SPIKE)])


def sample_law(law: MixtureLaw, n_draws: int, seed: SeedSpec) -> np.ndarray:
    """n_draws i.i.d. realisations of the mixture law."""
    if n_draws < 1:
        raise DomainError("n_draws must be positive")
    rng = seed.generator()
    k = len(law.rho)
    z = rng.standard_normal((n_draws, k + 1))
    draws = law.b * z[:, 0]
    if k:
        draws = draws + (z[:, 1:] ** 2 - 1.0) @ (np.asarray(law.rho) / math.sqrt(2.0))
    return draws


def characteristic_function(law: MixtureLaw, u: np.ndarray) -> np.ndarray:
    """E exp(iuT) = exp(-b^2 u^2/2) prod_j exp(-iu rho_j/sqrt2)(1 - i sqrt2 u rho_j)^(-1/2)."""
    u = np.asarray(u, dtype=float)
    phi = np.exp(-0.5 * law.b**2 * u**2).astype(complex)
    for r in law.rho:
        a = r / math.sqrt(2.0)
        phi = phi * np.exp(-1j * u * a) / np.sqrt(1.0 - 2j * u * a)
    return phi


def _check_not_degenerate(law: MixtureLaw) -> None:
    top = law.rho[0] if law.rho else 0.0
    if max(law.b, top) == 0.0:
        raise DomainError("degenerate point-mass law")


def _cdf_cf(law: MixtureLaw, t: np.ndarray) -> np.ndarray:
    # Gil-Pelaez inversion: F(t) = 1/2 - (1/pi) int_0^inf Im[phi(u) e^{-iut}]/u du,
    # midpoint rule so u = 0 is never evaluated.
    top = law.rho[0] if law.rho else 0.0
    cut = 200.0 / max(law.b, top / math.sqrt(2.0))
    n_nodes = 2**16
    du = cut / n_nodes
    u = (np.arange(n_nodes) + 0.5) * du
    phi = characteristic_function(law, u)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    integrand = np.imag(phi[None, :] * np.exp(-1j * np.outer(t, u))) / u[None, :]
    vals = 0.5 - integrand.sum(axis=1) * du / math.pi
    return np.clip(vals, 0.0, 1.0)


def cdf(
    law: MixtureLaw,
    t: float,
    method: str = "monte_carlo",
    n_draws: int = DEFAULT_MC_DRAWS,
    seed: SeedSpec = SeedSpec(),
) -> float:
    """P(T <= t) under the law, by simulation or by inverting the
    characteristic function."""
    _check_not_degenerate(law)
    if method == "monte_carlo":
        draws = np.sort(sample_law(law, n_draws, seed))
        return float(np.searchsorted(draws, t, side="right")) / n_draws
    if method == "cf_inversion":
        return float(_cdf_cf(law, t)[0])
    raise DomainError(f"unknown cdf method {method!r}")


def p_value(
    law: MixtureLaw,
    statistic: float,
    method: str = "monte_carlo",
    n_draws: int = DEFAULT_MC_DRAWS,
    seed: SeedSpec = SeedSpec(),
) -> float:
    """Right-tail probability 1 - cdf(statistic); large statistics reject.

    Monte Carlo values are clipped below at 1/(n_draws + 1) so a p-value
    is never exactly zero.
    """
    val = 1.0 - cdf(law, statistic, method=method, n_draws=n_draws, seed=seed)
    if method == "monte_carlo":
        val = min(max(val, 1.0 / (n_draws + 1)), 1.0)
    return val


def law_to_dict(law: MixtureLaw) -> dict:
    return law.to_dict()


def law_from_dict(payload: dict) -> MixtureLaw:
    """Parse the {b, rho[]} JSON form; b is rederived from the weights."""
    if not isinstance(payload, dict) or "rho" not in payload:
        raise DomainError("law payload must be an object with a 'rho' list")
    rho = [float(x) for x in payload["rho"]]
    law = law_from_weights(rho)
    if "b" in payload and payload["b"] is not None:
        if abs(float(payload["b"]) - law.b) > 1e-6:
            raise DomainError("law payload b is inconsistent with its rho weights")
    return law
