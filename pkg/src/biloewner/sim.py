"""Fixed-step RK4 simulation of full and reduced models.

Inputs are sampled on the uniform grid ``t_n = n dt`` and interpolated
linearly between samples, so the RK4 midpoint stages use ``(u_n + u_{n+1})/2``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as spla

from .core import BilinearSystem, GeneratorPair
from .errors import GridMismatch, NonFinite, SingularMass, SingularPencilAt
from .rom import MomentMatchingROM

DEFAULT_DT = 1e-3
DEFAULT_TRANSIENT = 0.8
IMAG_RESIDUE_WARN = 1e-12


@dataclass(frozen=True, eq=False)
class SimulationTrace:
    t: np.ndarray
    u: np.ndarray
    y: np.ndarray
    state_dim: int
    x: np.ndarray | None = None

    def __post_init__(self):
        if not (len(self.t) == len(self.u) == len(self.y)) or len(self.t) < 2:
            raise ValueError("trace arrays must have equal length >= 2")
        if np.any(np.diff(self.t) <= 0):
            raise ValueError("time grid must be strictly increasing")

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0])


def time_grid(horizon: float, dt: float = DEFAULT_DT) -> np.ndarray:
    steps = int(round(horizon / dt))
    return np.arange(steps + 1) * dt


def generator_signal(gen: GeneratorPair, zeta0, t, real: bool = False) -> np.ndarray:
    """``u(t) = Σ_i R_i ζ0_i exp(λ_i t)``, the free response of the input generator.

    With ``real=True`` the imaginary part is dropped; a residue above 1e-12
    (i.e. the generator is not a conjugate-symmetric pair) triggers a warning.
    """
    z0 = np.atleast_1d(np.asarray(zeta0, dtype=complex))
    if z0.shape != (gen.rho,):
        raise ValueError(f"ζ0 must have length {gen.rho}")
    t = np.asarray(t, dtype=float)
    u = np.exp(np.outer(t, gen.lam)) @ (gen.R * z0)
    if real:
        residue = float(np.max(np.abs(u.imag))) if u.size else 0.0
        if residue > IMAG_RESIDUE_WARN:
            warnings.warn(f"discarding imaginary input residue {residue:.3g}", RuntimeWarning, stacklevel=2)
        u = u.real.astype(complex)
    return u


def _rk4(f, x0, u, dt, out):
    u = np.asarray(u, dtype=complex)
    nsteps = len(u)
    x = np.array(x0, dtype=complex)
    xs = np.empty((nsteps, x.size), dtype=complex)
    ys = np.empty(nsteps, dtype=complex)
    xs[0], ys[0] = x, out(x)
    for n in range(nsteps - 1):
        t = n * dt
        u0, u1 = u[n], u[n + 1]
        um = 0.5 * (u0 + u1)
        k1 = f(x, u0, t)
        k2 = f(x + 0.5 * dt * k1, um, t)
        k3 = f(x + 0.5 * dt * k2, um, t)
        k4 = f(x + dt * k3, u1, t)
        x = x + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(x)):
            raise NonFinite((n + 1) * dt)
        xs[n + 1], ys[n + 1] = x, out(x)
    return xs, ys


def simulate_bilinear(sys: BilinearSystem, u, x0, dt: float = DEFAULT_DT) -> SimulationTrace:
    """RK4 on ``ẋ = E^{-1}(A x + N x u + B u)``, recording ``y = C x``."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    anorm = np.linalg.norm(sys.E, 1)
    if anorm == 0 or np.linalg.cond(sys.E) > 1 / np.finfo(float).eps:
        raise SingularPencilAt(np.inf)
    lu = spla.lu_factor(sys.E)
    A = spla.lu_solve(lu, sys.A)
    N = spla.lu_solve(lu, sys.N)
    B = spla.lu_solve(lu, sys.B)
    C = sys.C

    def f(x, uu, t):
        return A @ x + uu * (N @ x + B)

    xs, ys = _rk4(f, x0, u, dt, lambda x: C @ x)
    t = np.arange(len(ys)) * dt
    return SimulationTrace(t=t, u=np.asarray(u, dtype=complex), y=ys, state_dim=sys.n, x=xs)


def simulate_mm(rom: MomentMatchingROM, u, x0, dt: float = DEFAULT_DT) -> SimulationTrace:
    """RK4 on the moment-matching model; every stage evaluates the :func:`~biloewner.rom.mm_rhs` field."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    field = rom.field

    def f(x, uu, t):
        try:
            return field.rhs(x, uu)
        except SingularMass as exc:
            raise SingularMass(exc.x, t) from None

    xs, ys = _rk4(f, x0, u, dt, field.output)
    t = np.arange(len(ys)) * dt
    return SimulationTrace(t=t, u=np.asarray(u, dtype=complex), y=ys, state_dim=rom.rho, x=xs)


@dataclass
class CompareMetrics:
    rms_abs: float
    rms_rel: float
    sup_abs: float
    rel_is_abs: bool = False

    def to_dict(self):
        return dict(rms_abs=self.rms_abs, rms_rel=self.rms_rel, sup_abs=self.sup_abs,
                    rel_is_abs=self.rel_is_abs)


def steady_state_compare(a: SimulationTrace, b: SimulationTrace,
                         transient_fraction: float = DEFAULT_TRANSIENT) -> CompareMetrics:
    """Output mismatch over the trailing ``1 - transient_fraction`` of the horizon.

    ``rms_rel`` is normalized by the RMS of ``a`` on the window; if that is
    zero, ``rms_rel`` equals ``rms_abs`` and ``rel_is_abs`` is set.
    """
    if not 0 < transient_fraction < 1:
        raise ValueError("transient_fraction must lie in (0, 1)")
    if a.t.shape != b.t.shape or not np.array_equal(a.t, b.t):
        raise GridMismatch("traces are sampled on different time grids")
    t0 = a.t[0] + transient_fraction * (a.t[-1] - a.t[0])
    win = a.t >= t0
    d = a.y[win] - b.y[win]
    rms_abs = float(np.sqrt(np.mean(np.abs(d) ** 2)))
    ref = float(np.sqrt(np.mean(np.abs(a.y[win]) ** 2)))
    sup_abs = float(np.max(np.abs(d)))
    if ref == 0:
        return CompareMetrics(rms_abs, rms_abs, sup_abs, rel_is_abs=True)
    return CompareMetrics(rms_abs, rms_abs / ref, sup_abs)
