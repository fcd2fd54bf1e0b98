"""Power-series Loewner functions of bilinear systems.

For a generator ``(Λ, R, M, L)`` with diagonal ``Λ = diag(λ_i)`` and
``M = diag(μ_j)`` the tangential controllability function is the superposition
``X(ζ) = Σ_i Σ_k Φ_k^{(i)} ζ_i^k`` with

    Φ_1^{(i)} = (λ_i E - A)^{-1} B R_i
    Φ_k^{(i)} = (kλ_i E - A)^{-1} N Φ_{k-1}^{(i)} R_i,

and the observability rows are ``O_j = L_j C (μ_j E - A)^{-1}``. Every scalar
Loewner function then has a power series per index pair ``(j, i)``, stored in
arrays indexed ``[j, i, k-1]``.

Descriptor systems are handled by substituting ``E^{-1}A, E^{-1}N, E^{-1}B``
into the ``E = I`` formulas; this is why ``E`` appears in ``L_k = -O_j E Φ_k``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .core import (BilinearSystem, GeneratorPair, PencilSolver, check_resonance,
                   find_resonances, is_resonant)
from .errors import OutOfRadius

RADIUS_SAFETY = 0.5


@dataclass(frozen=True, eq=False)
class SeriesCoefficients:
    """Coefficients ``Φ_k^{(i)}`` stored as ``phi[i, k-1]`` (shape ρ x κ x n)."""

    phi: np.ndarray
    kappa: int
    gen: GeneratorPair

    def radius(self) -> np.ndarray:
        return convergence_radius(self)


def phi_coefficients(sys: BilinearSystem, gen: GeneratorPair, kappa: int) -> SeriesCoefficients:
    if kappa < 1:
        raise ValueError("kappa must be >= 1")
    phi = np.zeros((gen.rho, kappa, sys.n), dtype=complex)
    for i, (lam, r) in enumerate(zip(gen.lam, gen.R)):
        w = PencilSolver(sys, lam).solve(sys.B) * r
        phi[i, 0] = w
        for k in range(2, kappa + 1):
            w = PencilSolver(sys, k * lam).solve(sys.N @ w) * r
            phi[i, k - 1] = w
    phi.setflags(write=False)
    return SeriesCoefficients(phi=phi, kappa=kappa, gen=gen)


def convergence_radius(coeffs: SeriesCoefficients) -> np.ndarray:
    """Heuristic radius per generator component.

    Half the largest of the last three ratios ``|Φ_k| / |Φ_{k+1}|``. Infinite
    when fewer than two coefficients exist or the tail vanishes.
    """
    out = np.full(coeffs.gen.rho, np.inf)
    if coeffs.kappa < 2:
        return out
    for i in range(coeffs.gen.rho):
        norms = np.linalg.norm(coeffs.phi[i], axis=1)
        ratios = []
        for k in range(max(0, coeffs.kappa - 4), coeffs.kappa - 1):
            if norms[k + 1] == 0:
                ratios.append(np.inf)
            else:
                ratios.append(norms[k] / norms[k + 1])
        out[i] = RADIUS_SAFETY * max(ratios)
    return out


def _check_radius(coeffs, zeta):
    radius = convergence_radius(coeffs)
    for i, (z, r) in enumerate(zip(zeta, radius), 1):
        if abs(z) > r:
            raise OutOfRadius(i, abs(z), r)


def _as_zeta(zeta, rho):
    z = np.atleast_1d(np.asarray(zeta, dtype=complex))
    if z.shape != (rho,):
        raise ValueError(f"ζ must have length {rho}, got shape {z.shape}")
    return z


def eval_controllability(coeffs: SeriesCoefficients, zeta, check_radius: bool = True) -> np.ndarray:
    """``X̂(ζ) = Σ_i Σ_{k<=κ} Φ_k^{(i)} ζ_i^k``."""
    z = _as_zeta(zeta, coeffs.gen.rho)
    if check_radius:
        _check_radius(coeffs, z)
    powers = z[:, None] ** np.arange(1, coeffs.kappa + 1)[None, :]
    return np.einsum("ik,ikn->n", powers, coeffs.phi)


def observability_map(sys: BilinearSystem, gen: GeneratorPair) -> np.ndarray:
    """Rows ``O_j = L_j C (μ_j E - A)^{-1}`` (shape ρ x n)."""
    return np.vstack([
        PencilSolver(sys, mu).solve_left(sys.C) * l for mu, l in zip(gen.mu, gen.L)
    ])


@dataclass(frozen=True, eq=False)
class LoewnerFunctionSeries:
    """Truncated Loewner-function coefficients for every pair ``(j, i)``.

    ``L, Ls`` : orders 1..κ, shape (ρ, ρ, κ).
    ``Wf`` : orders 1..κ, shape (ρ, κ), indexed by ``i`` only.
    ``Vf`` : orders 0..κ, shape (ρ, ρ, κ+1).
    ``Ll, Lr`` : orders 1..κ+1, shape (ρ, ρ, κ+1). The order κ+1 entry of
    ``Lr`` is the boundary term ``-Ll_{κ+1}``; it is NaN when
    ``(κ+1)λ_i = μ_j``.
    ``O`` : observability rows, ``None`` when built from Loewner data.
    """

    gen: GeneratorPair
    kappa: int
    L: np.ndarray
    Ls: np.ndarray
    Vf: np.ndarray
    Wf: np.ndarray
    Ll: np.ndarray
    Lr: np.ndarray
    O: np.ndarray | None = None


def _left_right(gen, kappa, L, Vf):
    """Solve the left-Loewner equation order by order; ``Lr = L - Ll``.

    Order k of ``kλ Ll = μ Ll - (V R ζ)`` gives ``Ll_k = Vf_{k-1} R / (μ - kλ)``.
    """
    rho = gen.rho
    Ll = np.zeros((rho, rho, kappa + 1), dtype=complex)
    for j, mu in enumerate(gen.mu):
        for i, (lam, r) in enumerate(zip(gen.lam, gen.R)):
            for k in range(1, kappa + 2):
                if is_resonant(k * lam, mu):
                    Ll[j, i, k - 1] = np.nan
                else:
                    Ll[j, i, k - 1] = Vf[j, i, k - 1] * r / (mu - k * lam)
    Lr = np.empty_like(Ll)
    Lr[..., :kappa] = L - Ll[..., :kappa]
    Lr[..., kappa] = -Ll[..., kappa]
    return Ll, Lr


def _warn_boundary(gen, kappa):
    hits = [h for h in find_resonances(gen, kappa + 1) if h[2] == kappa + 1]
    if hits:
        i, j, k = hits[0]
        warnings.warn(
            f"resonance {k}·λ_{i} = μ_{j}: order-{k} boundary term is undefined (NaN)",
            RuntimeWarning,
            stacklevel=3,
        )


def loewner_series(sys: BilinearSystem, gen: GeneratorPair, kappa: int,
                   coeffs: SeriesCoefficients | None = None) -> LoewnerFunctionSeries:
    """Loewner-function coefficients of a bilinear system up to order κ.

    Raises :class:`ResonanceError` if ``kλ_i = μ_j`` for some ``k <= κ``. A
    resonance at exactly ``κ+1`` only leaves the boundary term undefined.
    """
    check_resonance(gen, kappa)
    _warn_boundary(gen, kappa)
    if coeffs is None:
        coeffs = phi_coefficients(sys, gen, kappa)
    O = observability_map(sys, gen)
    phi = coeffs.phi
    OE, OA, ON = O @ sys.E, O @ sys.A, O @ sys.N
    L = -np.einsum("jn,ikn->jik", OE, phi)
    Ls = -np.einsum("jn,ikn->jik", OA, phi)
    Wf = np.einsum("n,ikn->ik", sys.C, phi)
    rho = gen.rho
    Vf = np.empty((rho, rho, kappa + 1), dtype=complex)
    Vf[..., 0] = (O @ sys.B)[:, None]
    Vf[..., 1:] = np.einsum("jn,ikn->jik", ON, phi)
    Ll, Lr = _left_right(gen, kappa, L, Vf)
    return LoewnerFunctionSeries(gen=gen, kappa=kappa, L=L, Ls=Ls, Vf=Vf, Wf=Wf, Ll=Ll, Lr=Lr, O=O)


def series_from_loewner_data(data, gen: GeneratorPair, kappa: int) -> LoewnerFunctionSeries:
    """Loewner-function coefficients read off moment-matching Loewner matrices.

    ``data`` must come from :func:`~biloewner.pencil.moment_tuples`, so that
    column ``i*κ + k-1`` holds the order-k direction of generator component
    ``i``. The tangential weights enter as ``L_j`` on rows and ``R_i^k`` on
    columns: ``𝓛 = 𝕃 w``, ``𝓛s = 𝕃s w``, ``𝓥 = V + T w``, ``𝓦 = W w``.
    """
    check_resonance(gen, kappa)
    _warn_boundary(gen, kappa)
    rho = gen.rho
    if data.Lw.shape != (rho, rho * kappa):
        raise ValueError(f"expected {rho}x{rho * kappa} moment-matching data, got {data.Lw.shape}")
    rw = (gen.R[:, None] ** np.arange(1, kappa + 1)[None, :])
    lw = gen.L

    def blocks(M):
        return lw[:, None, None] * M.reshape(rho, rho, kappa) * rw[None]

    L = blocks(data.Lw)
    Ls = blocks(data.Lws)
    Wf = data.W.reshape(rho, kappa) * rw
    Vf = np.empty((rho, rho, kappa + 1), dtype=complex)
    Vf[..., 0] = (lw * data.V)[:, None]
    Vf[..., 1:] = blocks(data.T)
    Ll, Lr = _left_right(gen, kappa, L, Vf)
    return LoewnerFunctionSeries(gen=gen, kappa=kappa, L=L, Ls=Ls, Vf=Vf, Wf=Wf, Ll=Ll, Lr=Lr)


def _refined_phi(sys, coeffs, sweeps=3):
    """Φ_k^{(i)} refined to extended precision by iterative refinement.

    Residuals are formed in ``clongdouble`` and corrected with the double LU
    factors; the result satisfies the recursion to ~1e-19 instead of ~1e-16.
    """
    ext = np.clongdouble
    E, A, N, B = (np.asarray(m, dtype=ext) for m in (sys.E, sys.A, sys.N, sys.B))
    gen = coeffs.gen
    phi = coeffs.phi.astype(ext)
    for i, (lam, r) in enumerate(zip(gen.lam, gen.R)):
        r = ext(r)
        for k in range(1, coeffs.kappa + 1):
            s = ext(k * lam)
            solver = PencilSolver(sys, k * lam)
            rhs = B * r if k == 1 else (N @ phi[i, k - 2]) * r
            M = s * E - A
            x = phi[i, k - 1]
            for _ in range(sweeps):
                x = x + solver.solve((rhs - M @ x).astype(complex)).astype(ext)
            phi[i, k - 1] = x
    return phi


def pde_residual(sys: BilinearSystem, coeffs: SeriesCoefficients, samples,
                 check_radius: bool = True, cross_terms: bool = False, extended: bool = True):
    """Residual norm of the controllability equation at each sample ζ.

    ``r(ζ) = E X̂'(ζ) Λζ - A X̂(ζ) - (N X̂(ζ) + B) R ζ``. Per component the
    residual is a polynomial in ``ζ_i``; it is accumulated power by power so
    that the cancelling low orders do not swamp the ``ζ^{κ+1}`` tail. For
    ρ > 1 the mixed terms ``-N X̂^{(i)}(ζ_i) R_m ζ_m`` (i != m) are added.

    With ``extended=True`` the coefficients are refined and the residual is
    accumulated in extended precision; otherwise the stored double
    coefficients are used as is, and their rounding (~1e-16 per order) shows
    up in the residual. With ``cross_terms=True`` also returns the norms of
    the mixed part alone.
    """
    gen, kappa = coeffs.gen, coeffs.kappa
    rho, n = gen.rho, sys.n
    if extended:
        dt = np.clongdouble
        phi = _refined_phi(sys, coeffs)
    else:
        dt = complex
        phi = coeffs.phi
    E, A, N, B = (np.asarray(m, dtype=dt) for m in (sys.E, sys.A, sys.N, sys.B))
    # coefficient residuals, orders 1..κ+1
    res = np.zeros((rho, kappa + 1, n), dtype=dt)
    for i, (lam, r) in enumerate(zip(gen.lam, gen.R)):
        lam, r = dt(lam), dt(r)
        for k in range(1, kappa + 1):
            forcing = B * r if k == 1 else (N @ phi[i, k - 2]) * r
            res[i, k - 1] = k * lam * (E @ phi[i, k - 1]) - A @ phi[i, k - 1] - forcing
        res[i, kappa] = -(N @ phi[i, kappa - 1]) * r
    res = res.astype(complex)
    phi = phi.astype(complex)
    orders = np.arange(1, kappa + 2)
    norms, cross_norms = [], []
    for zeta in samples:
        z = _as_zeta(zeta, rho)
        if check_radius:
            _check_radius(coeffs, z)
        total = np.einsum("ik,ikn->n", z[:, None] ** orders[None, :], res)
        cross = np.zeros(n, dtype=complex)
        if rho > 1:
            xs = (z[:, None] ** orders[None, :kappa])[:, :, None] * phi
            xi = xs.sum(axis=1)
            for i in range(rho):
                for m in range(rho):
                    if i != m:
                        cross -= (sys.N @ xi[i]) * gen.R[m] * z[m]
        norms.append(float(np.linalg.norm(total + cross)))
        cross_norms.append(float(np.linalg.norm(cross)))
    if cross_terms:
        return np.array(norms), np.array(cross_norms)
    return np.array(norms)


@dataclass
class EquivalenceReport:
    """Per-order comparison of left/right Loewner coefficients."""

    kappa: int
    tol: float
    passed: bool
    orders: list
    entries: list

    def to_dict(self):
        return {
            "kappa": self.kappa,
            "tol": self.tol,
            "verdict": "pass" if self.passed else "fail",
            "orders": self.orders,
            "entries": self.entries,
        }


def _as_series(obj, gen, kappa):
    if isinstance(obj, LoewnerFunctionSeries):
        if obj.kappa < kappa:
            raise ValueError(f"series of order {obj.kappa} cannot be compared at κ = {kappa}")
        return obj
    if isinstance(obj, BilinearSystem):
        return loewner_series(obj, gen, kappa)
    if hasattr(obj, "loewner_series"):
        return obj.loewner_series()
    raise TypeError(f"cannot build Loewner series from {type(obj).__name__}")


def _cpair(z):
    return [float(z.real), float(z.imag)]


def kappa_equivalence(sysA, sysB, gen: GeneratorPair, kappa: int, tol: float,
                      atol: float = 0.0) -> EquivalenceReport:
    """Check κ-Loewner equivalence of two models at ``gen``.

    Derivatives at zero agree iff power-series coefficients agree, so the
    left/right Loewner coefficients of orders ``1..κ`` are compared. Order k
    of function F passes when ``||F_A - F_B|| <= tol * max(||F_A||, ||F_B||) + atol``
    (Frobenius norm over all index pairs). Either argument may be a
    :class:`BilinearSystem`, a :class:`LoewnerFunctionSeries` or any object
    with a ``loewner_series()`` method.
    """
    sa = _as_series(sysA, gen, kappa)
    sb = _as_series(sysB, gen, kappa)
    rho = gen.rho
    orders, entries = [], []
    passed = True
    for name in ("Ll", "Lr"):
        fa, fb = getattr(sa, name), getattr(sb, name)
        for k in range(1, kappa + 1):
            a, b = fa[..., k - 1], fb[..., k - 1]
            err = float(np.linalg.norm(a - b))
            scale = float(max(np.linalg.norm(a), np.linalg.norm(b)))
            rel = err / scale if scale > 0 else 0.0
            ok = bool(err <= tol * scale + atol)
            passed &= ok
            orders.append({"function": name, "k": k, "abs_diff": err, "rel_diff": rel, "pass": ok})
            for j in range(rho):
                for i in range(rho):
                    entries.append({
                        "function": name, "i": i + 1, "j": j + 1, "k": k,
                        "a": _cpair(a[j, i]), "b": _cpair(b[j, i]),
                        "delta": float(abs(a[j, i] - b[j, i])),
                    })
    return EquivalenceReport(kappa=kappa, tol=tol, passed=passed, orders=orders, entries=entries)
