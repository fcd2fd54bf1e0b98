"""Seeded random test systems and generators."""
from __future__ import annotations

import numpy as np

from .core import BilinearSystem, GeneratorPair, find_resonances


def random_stable_system(rng: np.random.Generator, n: int, abscissa: float = -0.5,
                         n_scale: float = 0.5, descriptor: bool = False) -> BilinearSystem:
    """Real random system with spectral abscissa of ``E^{-1}A`` equal to ``abscissa``."""
    E = np.eye(n)
    if descriptor:
        E = E + 0.2 * rng.standard_normal((n, n)) / np.sqrt(n)
    A0 = rng.standard_normal((n, n)) / np.sqrt(n)
    shift = np.max(np.linalg.eigvals(A0).real) - abscissa
    A = E @ (A0 - shift * np.eye(n))
    N = n_scale * rng.standard_normal((n, n)) / np.sqrt(n)
    B = rng.standard_normal(n)
    C = rng.standard_normal(n)
    return BilinearSystem(E, A, N, B, C)


def random_generator(rng: np.random.Generator, rho: int, kappa: int,
                     margin: float = 0.05, weights: bool = False) -> GeneratorPair:
    """Imaginary-axis generator, distinct points, off-resonance up to order κ+1.

    ``margin`` keeps ``|kλ_i - μ_j|`` and all pairwise gaps away from zero.
    """
    while True:
        lam = 1j * rng.uniform(0.3, 2.0, rho)
        mu = 1j * rng.uniform(0.3, 3.0, rho)
        gaps = [abs(k * a - b) for a in lam for b in mu for k in range(1, kappa + 2)]
        gaps += [abs(a - b) for v in (lam, mu) for x, a in enumerate(v) for b in v[x + 1:]]
        if min(gaps) > margin and not find_resonances(GeneratorPair.unit(lam, mu), kappa + 1):
            break
    if weights:
        R = rng.uniform(0.5, 1.5, rho) * np.exp(1j * rng.uniform(0, 2 * np.pi, rho))
        L = rng.uniform(0.5, 1.5, rho) * np.exp(1j * rng.uniform(0, 2 * np.pi, rho))
        return GeneratorPair(lam, R, mu, L)
    return GeneratorPair.unit(lam, mu)
