"""Reduced models: the bilinear BLF ROM and the moment-matching (MM) model.

The MM model has state ``x_r`` of dimension ρ and reads

    𝕃 w'(x_r) ẋ_r = 𝕃s w(x_r) - (T w(x_r) + V) u,    y_r = W w(x_r),

where ``w`` stacks the monomials ``(ζ_i, ζ_i^2, ..., ζ_i^κ)`` of every state
component and the Loewner matrices carry the tangential weights ``L_j`` (rows)
and ``R_i^k`` (columns).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .core import BilinearSystem, GeneratorPair
from .errors import SingularMass
from .lofuncs import LoewnerFunctionSeries, series_from_loewner_data
from .pencil import (DEFAULT_SVD_TOL, LoewnerData, assemble_loewner, blf_rom, blf_tuples,
                     moment_tuples)
from .volterra import eval_generalized_tf

MASS_COND_MAX = 1e12


def poly_map(kappa: int, rho: int, zeta):
    """Stacked monomials ``v(ζ_i)`` and their block-diagonal Jacobian.

    Returns ``value`` of length ρκ and ``jacobian`` of shape (ρκ, ρ).
    """
    z = np.atleast_1d(np.asarray(zeta, dtype=complex))
    if z.shape != (rho,):
        raise ValueError(f"ζ must have length {rho}, got shape {z.shape}")
    k = np.arange(1, kappa + 1)
    value = (z[:, None] ** k[None, :]).ravel()
    jac = np.zeros((rho * kappa, rho), dtype=complex)
    for i in range(rho):
        jac[i * kappa:(i + 1) * kappa, i] = k * z[i] ** (k - 1)
    return value, jac


@dataclass(frozen=True, eq=False)
class MomentMatchingROM:
    """Moment-matching model stored as unweighted Loewner data plus κ and the generator."""

    data: LoewnerData
    kappa: int
    gen: GeneratorPair

    def __post_init__(self):
        expect = (self.rho, self.rho * self.kappa)
        if self.data.Lw.shape != expect:
            raise ValueError(f"Loewner data must be {expect[0]}x{expect[1]}, got {self.data.Lw.shape}")

    @property
    def rho(self) -> int:
        return self.gen.rho

    @cached_property
    def weighted(self):
        """``(𝕃, 𝕃s, T, V, W)`` with the tangential weights applied."""
        rw = (self.gen.R[:, None] ** np.arange(1, self.kappa + 1)[None, :]).ravel()
        lw = self.gen.L
        d = self.data
        return (
            lw[:, None] * d.Lw * rw[None, :],
            lw[:, None] * d.Lws * rw[None, :],
            lw[:, None] * d.T * rw[None, :],
            lw * d.V,
            d.W * rw,
        )

    @cached_property
    def field(self) -> "_MMField":
        return _MMField(self)

    def loewner_series(self) -> LoewnerFunctionSeries:
        return series_from_loewner_data(self.data, self.gen, self.kappa)


def build_mm_rom(sys: BilinearSystem, gen: GeneratorPair, kappa: int) -> MomentMatchingROM:
    data = assemble_loewner(sys, moment_tuples(gen, kappa))
    return MomentMatchingROM(data=data, kappa=kappa, gen=gen)


def reduce_blf(sys: BilinearSystem, gen: GeneratorPair, kappa: int,
               svd_rel_tol: float = DEFAULT_SVD_TOL, max_order: int | None = None) -> BilinearSystem:
    """Bilinear ROM of order ρκ (fewer if the data is rank deficient)."""
    data = assemble_loewner(sys, blf_tuples(gen, kappa))
    return blf_rom(data, svd_rel_tol=svd_rel_tol, max_order=max_order)


class _MMField:
    """Precomputed pieces of the MM vector field; used in tight RK4 loops."""

    def __init__(self, rom: MomentMatchingROM):
        self.rho, self.kappa = rom.rho, rom.kappa
        self.Lw, self.Lws, self.T, self.V, self.W = rom.weighted
        self.powers = np.arange(1, self.kappa + 1)
        self.lw_norm = np.linalg.norm(self.Lw, 2)

    def monomials(self, x):
        xp = x[:, None] ** (self.powers - 1)[None, :]
        value = (xp * x[:, None]).ravel()
        dblocks = xp * self.powers[None, :]
        return value, dblocks

    def mass(self, dblocks):
        # 𝕃 · blockdiag(dv/dζ_i): column i only sees the i-th κ-block
        Lb = self.Lw.reshape(self.rho, self.rho, self.kappa)
        return np.einsum("jik,ik->ji", Lb, dblocks)

    def rhs(self, x, u):
        x = np.asarray(x, dtype=complex).reshape(self.rho)
        value, dblocks = self.monomials(x)
        M = self.mass(dblocks)
        jac_norm = np.max(np.linalg.norm(dblocks, axis=1))
        floor = self.lw_norm * jac_norm / MASS_COND_MAX
        if self.rho == 1:
            m = M[0, 0]
            if not abs(m) > floor:
                raise SingularMass(x.copy())
            return (self.Lws @ value - (self.T @ value + self.V) * u) / m
        sv = np.linalg.svd(M, compute_uv=False)
        if not sv[-1] > floor or sv[0] > MASS_COND_MAX * sv[-1]:
            raise SingularMass(x.copy())
        return np.linalg.solve(M, self.Lws @ value - (self.T @ value + self.V) * u)

    def output(self, x):
        value, _ = self.monomials(np.asarray(x, dtype=complex).reshape(self.rho))
        return complex(self.W @ value)


def mass_matrix(rom: MomentMatchingROM, x_r) -> np.ndarray:
    """``𝕃 · dw/dζ`` at ``x_r`` (ρ x ρ)."""
    Lw = rom.weighted[0]
    _, jac = poly_map(rom.kappa, rom.rho, x_r)
    return Lw @ jac


def mm_rhs(rom: MomentMatchingROM, x_r, u) -> np.ndarray:
    """Time derivative ``ẋ_r`` of the moment-matching model.

    Raises :class:`SingularMass` when the mass matrix has condition number
    above 1e12 or its smallest singular value is below
    ``1e-12 * ||𝕃|| * ||dw/dζ||``.
    """
    return rom.field.rhs(x_r, u)


def mm_output(rom: MomentMatchingROM, x_r) -> complex:
    return rom.field.output(x_r)


@dataclass
class BridgeReport:
    passed: bool
    max_rel_rhs: float
    max_rel_output: float
    samples: int
    rtol: float

    def __bool__(self):
        return self.passed

    def to_dict(self):
        return dict(passed=self.passed, max_rel_rhs=self.max_rel_rhs,
                    max_rel_output=self.max_rel_output, samples=self.samples, rtol=self.rtol)


def _rel(a, b):
    scale = max(np.linalg.norm(a), np.linalg.norm(b))
    return float(np.linalg.norm(a - b) / scale) if scale > 0 else 0.0


def bridge_compare(blf: BilinearSystem, mm: MomentMatchingROM, samples: int = 100,
                   rtol: float = 1e-10, seed: int = 0) -> BridgeReport:
    """Compare a κ=1 MM model with a bilinear ROM on random ``(x, u)``.

    The MM state is related to the bilinear state by ``z = diag(R) x``, which
    is the identity for unit weights.
    """
    if mm.kappa != 1:
        raise ValueError("the bridge holds for κ = 1 only")
    if blf.n != mm.rho:
        return BridgeReport(False, np.inf, np.inf, 0, rtol)
    D = np.asarray(mm.gen.R)
    rng = np.random.default_rng(seed)
    worst_f = worst_y = 0.0
    for _ in range(samples):
        x = rng.standard_normal(mm.rho) + 1j * rng.standard_normal(mm.rho)
        u = complex(rng.standard_normal(), rng.standard_normal())
        f_mm = mm_rhs(mm, x, u)
        f_blf = blf.vector_field(D * x, u) / D
        worst_f = max(worst_f, _rel(f_mm, f_blf))
        worst_y = max(worst_y, _rel(np.atleast_1d(mm_output(mm, x)), np.atleast_1d(blf.C @ (D * x))))
    passed = worst_f <= rtol and worst_y <= rtol
    return BridgeReport(passed, worst_f, worst_y, samples, rtol)


def kappa1_bridge_check(sys: BilinearSystem, gen: GeneratorPair, samples: int = 100,
                        rtol: float = 1e-10, seed: int = 0) -> BridgeReport:
    """Build both κ=1 reduced models and check that they coincide."""
    blf = reduce_blf(sys, gen, 1, svd_rel_tol=0.0)
    mm = build_mm_rom(sys, gen, 1)
    return bridge_compare(blf, mm, samples=samples, rtol=rtol, seed=seed)


@dataclass
class InterpolationReport:
    tol: float
    passed: bool
    max_rel_err: float
    entries: list

    def to_dict(self):
        return {"tol": self.tol, "verdict": "pass" if self.passed else "fail",
                "max_rel_err": self.max_rel_err, "entries": self.entries}


def check_interpolation(sys: BilinearSystem, rom: BilinearSystem, gen: GeneratorPair,
                        kappa: int, tol: float = 1e-8) -> InterpolationReport:
    """Compare ``H_l`` and ``H_{l+1}(μ_j, ·)`` of two systems at the moment points.

    For every ``i`` and ``l <= κ`` the right family is ``(lλ_i, ..., 2λ_i, λ_i)``;
    the left family prepends each ``μ_j``.
    """
    entries = []
    worst = 0.0
    for i, lam in enumerate(gen.lam, 1):
        for l in range(1, kappa + 1):
            right = [k * lam for k in range(l, 0, -1)]
            families = [("right", None, right)]
            families += [("left", j, [mu] + right) for j, mu in enumerate(gen.mu, 1)]
            for fam, j, pts in families:
                full = eval_generalized_tf(sys, pts)
                red = eval_generalized_tf(rom, pts)
                scale = max(abs(full), abs(red))
                rel = abs(full - red) / scale if scale > 0 else 0.0
                worst = max(worst, rel)
                entries.append({
                    "family": fam, "i": i, "j": j, "level": len(pts),
                    "full": [full.real, full.imag], "rom": [red.real, red.imag], "rel_err": rel,
                })
    return InterpolationReport(tol=tol, passed=worst <= tol, max_rel_err=worst, entries=entries)
