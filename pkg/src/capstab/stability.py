"""Spectral stability: per-mode index-form pencils and classification.

The second-variation (index) form on a rotational surface separates over
spherical harmonics Y_ell on the orbit sphere: f = sum g_ell(s) Y_ell(omega).
For each mode the quadratic form reduces to a Sturm-Liouville form on the
profile,

    a_ell(g) = int (g'^2 + (mu_ell/x^2 - |sigma|^2) g^2) x^{n-1} ds
               - sum_walls q g(b)^2 x_b^{n-1},        mu_ell = ell(ell+n-2),

with the volume constraint  int g x^{n-1} ds = 0  active only at ell = 0.
Discretization is by linear finite elements on the uniform arclength grid
(element-midpoint weights, consistent mass, Robin terms as endpoint rank-1
contributions), giving a symmetric tridiagonal pencil (A, M).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.optimize import brentq

from .geometry import (RevolutionSurface, curvature_data, robin_coefficient,
                       unit_sphere_area)

#: default stability tolerance (verdict margin around zero)
EPS_STAB = 1e-7
#: |lambda| window and eigenfunction match used to recognize translation zero modes
ZERO_MODE_LAMBDA = 1e-5
ZERO_MODE_L2 = 1e-3
#: safety cap on the mode sweep
ELL_GUARD = 64

DENSE_CUTOFF = 400


@dataclass(frozen=True)
class ModePencil:
    """Tridiagonal quadratic-form pencil for one azimuthal mode."""

    ell: int
    a_diag: np.ndarray
    a_off: np.ndarray
    m_diag: np.ndarray
    m_off: np.ndarray
    c: np.ndarray            # constraint functional (zero vector for ell >= 1)
    dof_index: np.ndarray    # profile sample index per degree of freedom
    bc: dict                 # endpoint -> "robin" | "natural" | "essential"

    @property
    def size(self) -> int:
        return self.a_diag.size

    def a_matrix(self) -> sp.csc_matrix:
        return sp.diags([self.a_off, self.a_diag, self.a_off], [-1, 0, 1]).tocsc()

    def m_matrix(self) -> sp.csc_matrix:
        return sp.diags([self.m_off, self.m_diag, self.m_off], [-1, 0, 1]).tocsc()

    def apply_a(self, g: np.ndarray) -> np.ndarray:
        out = self.a_diag * g
        out[:-1] += self.a_off * g[1:]
        out[1:] += self.a_off * g[:-1]
        return out

    def apply_m(self, g: np.ndarray) -> np.ndarray:
        out = self.m_diag * g
        out[:-1] += self.m_off * g[1:]
        out[1:] += self.m_off * g[:-1]
        return out


def mu_ell(ell: int, n: int) -> int:
    return ell * (ell + n - 2)


def assemble_mode(surface: RevolutionSurface, ell: int) -> ModePencil:
    """Assemble the P1 pencil (A, M, c) for azimuthal mode ell."""
    if ell < 0:
        raise ValueError("ell must be >= 0")
    p = surface.profile
    n = surface.problem.n
    m = p.m
    ds = p.ds
    mu = mu_ell(ell, n)

    x_mid = 0.5 * (p.x[:-1] + p.x[1:])
    w_e = x_mid ** (n - 1)
    ssq = curvature_data(surface).sigma_sq
    ssq_mid = 0.5 * (ssq[:-1] + ssq[1:])
    v_mid = -ssq_mid
    if mu:
        v_mid = v_mid + mu / x_mid**2

    a_diag = np.zeros(m)
    a_off = np.zeros(m - 1)
    m_diag = np.zeros(m)
    m_off = np.zeros(m - 1)
    c = np.zeros(m)

    stiff = w_e / ds
    pot = w_e * v_mid * ds / 6.0
    mass = w_e * ds / 6.0
    a_diag[:-1] += stiff + 2.0 * pot
    a_diag[1:] += stiff + 2.0 * pot
    a_off[:] = -stiff + pot
    m_diag[:-1] += 2.0 * mass
    m_diag[1:] += 2.0 * mass
    m_off[:] = mass
    c[:-1] += w_e * ds / 2.0
    c[1:] += w_e * ds / 2.0

    bc = {}
    for e in surface.endpoints:
        if e.is_wall:
            q = robin_coefficient(surface, e)
            a_diag[e.index] -= q * e.x_b ** (n - 1)
            bc[e.where] = "robin"
        else:
            bc[e.where] = "natural" if ell == 0 else "essential"

    keep = np.ones(m, dtype=bool)
    if ell >= 1:
        for e in surface.endpoints:
            if e.kind == "axis":
                keep[e.index] = False
        c = np.zeros(m)

    idx = np.nonzero(keep)[0]
    a_diag = a_diag[keep]
    m_diag = m_diag[keep]
    c = c[keep]
    off_keep = keep[:-1] & keep[1:]
    a_off = a_off[off_keep]
    m_off = m_off[off_keep]
    return ModePencil(ell, a_diag, a_off, m_diag, m_off, c, idx, bc)


# ---------------------------------------------------------------------------
# eigenvalue solves
# ---------------------------------------------------------------------------

def _pencil_lower_bound(pencil: ModePencil) -> float:
    lam_a = sla.eigvalsh_tridiagonal(pencil.a_diag, pencil.a_off,
                                     select="i", select_range=(0, 0))[0]
    m_diag, m_off = pencil.m_diag, pencil.m_off
    pad = np.concatenate(([0.0], np.abs(m_off))) + np.concatenate((np.abs(m_off), [0.0]))
    m_lo = max(float(np.min(m_diag - pad)), 1e-300)
    m_hi = float(np.max(m_diag + pad))
    return lam_a / m_lo if lam_a < 0 else lam_a / m_hi


def _negcount(pencil: ModePencil, lam: float) -> int:
    """Eigenvalues of (A, M) strictly below lam, by LDL^T inertia."""
    d = pencil.a_diag - lam * pencil.m_diag
    e = pencil.a_off - lam * pencil.m_off
    count = 0
    piv = d[0]
    if piv == 0.0:
        piv = 1e-300
    if piv < 0:
        count += 1
    for i in range(1, d.size):
        piv = d[i] - e[i - 1] * e[i - 1] / piv
        if piv == 0.0:
            piv = 1e-300
        if piv < 0:
            count += 1
    return count


def _eig_by_bisection(pencil: ModePencil, i: int, lo: float | None = None,
                      rel_tol: float = 1e-12) -> float:
    """i-th smallest generalized eigenvalue by Sturm-sequence bisection.

    Deterministic and immune to the clustering that defeats iterative
    eigensolvers on neck-localized spectra.
    """
    if lo is None:
        lo = _pencil_lower_bound(pencil)
        step = abs(lo) + 1.0
        while _negcount(pencil, lo) > 0:
            lo -= step
            step *= 2.0
    hi = lo + abs(lo) * 0.5 + 1.0
    while _negcount(pencil, hi) < i + 1:
        hi += (hi - lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo <= rel_tol * (abs(mid) + 1.0):
            break
        if _negcount(pencil, mid) >= i + 1:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _tri_solve(pencil: ModePencil, lam: float, rhs: np.ndarray) -> np.ndarray:
    ab = np.zeros((3, pencil.size))
    ab[0, 1:] = pencil.a_off - lam * pencil.m_off
    ab[1, :] = pencil.a_diag - lam * pencil.m_diag
    ab[2, :-1] = pencil.a_off - lam * pencil.m_off
    return sla.solve_banded((1, 1), ab, rhs)


def _inverse_iteration(pencil: ModePencil, lam: float, iters: int = 3) -> np.ndarray:
    """M-normalized eigenvector estimate for the eigenvalue near lam."""
    shift = lam + 1e-9 * (abs(lam) + 1.0)
    g = np.ones(pencil.size)
    for _ in range(iters):
        try:
            g = _tri_solve(pencil, shift, g)
        except Exception:
            shift += 1e-8 * (abs(lam) + 1.0)
            g = _tri_solve(pencil, shift, g)
        g /= np.linalg.norm(g)
    nrm = math.sqrt(abs(g @ pencil.apply_m(g)))
    return g / nrm


def _dense_constrained(pencil: ModePencil) -> tuple[float, np.ndarray]:
    """Exact constrained minimum by projecting the dense pencil onto {c}^perp."""
    A = pencil.a_matrix().toarray()
    M = pencil.m_matrix().toarray()
    Q = sla.qr(pencil.c.reshape(-1, 1), mode="full")[0]
    Z = Q[:, 1:]
    vals, vecs = sla.eigh(Z.T @ A @ Z, Z.T @ M @ Z, subset_by_index=[0, 0])
    g = Z @ vecs[:, 0]
    g /= math.sqrt(g @ pencil.apply_m(g))
    return float(vals[0]), g


def min_eigenvalue(pencil: ModePencil, constrained: bool = False,
                   k: int = 6) -> tuple[float, np.ndarray]:
    """Smallest (optionally volume-constrained) eigenvalue of the pencil.

    Unconstrained: Sturm bisection for the eigenvalue, inverse iteration for
    the eigenvector.  Constrained (ell = 0 only): by interlacing, the
    constrained minimum lies in [lambda_0, lambda_1]; it is the root of the
    secular function  h(lambda) = c^T (A - lambda M)^{-1} c  in the open gap
    (h is increasing there, so a bracketed Brent solve is exact up to
    tolerance), or the gap endpoint whose unconstrained eigenvector already
    annihilates c when h has no sign change.

    Returns (lambda, g) with g M-normalized; g is sampled on pencil.dof_index.
    """
    lam0 = _eig_by_bisection(pencil, 0)
    if not constrained or not np.any(pencil.c):
        return lam0, _inverse_iteration(pencil, lam0)

    c = pencil.c
    lam1 = _eig_by_bisection(pencil, 1)
    eps0 = 1e-10 * (abs(lam0) + 1.0)
    eps1 = 1e-10 * (abs(lam1) + 1.0)
    lo, hi = lam0 + eps0, lam1 - eps1
    if hi <= lo:
        # numerically degenerate lowest pair: everything in the gap coincides
        g = _inverse_iteration(pencil, lam0)
        g -= (c @ g) / (c @ c) * c
        g /= math.sqrt(abs(g @ pencil.apply_m(g)))
        return lam0, g

    def secular(lam):
        return float(c @ _tri_solve(pencil, lam, c))

    f_lo, f_hi = secular(lo), secular(hi)
    if f_lo > 0.0:
        # no pole at lambda_0: its eigenvector already satisfies the constraint
        lam, near = lam0, lam0
    elif f_hi <= 0.0:
        # no pole at lambda_1 and no root below it: lambda_1 is the answer
        lam, near = lam1, lam1
    else:
        lam = brentq(secular, lo, hi, xtol=1e-13, rtol=1e-15)
        g = _tri_solve(pencil, lam, c)
        g /= math.sqrt(abs(g @ pencil.apply_m(g)))
        return float(lam), g
    g = _inverse_iteration(pencil, near)
    g -= (c @ g) / (c @ c) * c
    nrm = math.sqrt(abs(g @ pencil.apply_m(g)))
    if nrm > 0:
        g /= nrm
    return float(lam), g


def rayleigh(pencil: ModePencil, g: np.ndarray) -> float:
    return float(g @ pencil.apply_a(g)) / float(g @ pencil.apply_m(g))


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

@dataclass
class ModeResult:
    ell: int
    lambda_min: float
    constrained: bool
    zero_mode: bool = False


@dataclass
class StabilityReport:
    """Per-mode minimal eigenvalues plus verdict.

    Recognized geometric zero modes (translations along the walls, ell = 1,
    eigenfunction proportional to sin alpha) are reported but excluded from
    the verdict, so that discretization noise around a genuine kernel cannot
    flip it; the verdict over the remaining modes is: unstable iff some
    lambda < -eps_stab, marginal iff some |lambda| <= eps_stab, else stable.
    """

    modes: list[ModeResult]
    verdict: str
    ell_stop: int
    monotone_certified: bool
    grid: int
    eps_stab: float
    details: dict = field(default_factory=dict)

    @property
    def worst(self) -> tuple[int, float]:
        eff = [(m.lambda_min, m.ell) for m in self.modes if not m.zero_mode]
        lam, ell = min(eff)
        return ell, lam

    def to_dict(self) -> dict:
        ell, lam = self.worst
        return {
            "modes": [{"l": m.ell, "lambda_min": float(m.lambda_min),
                       "constrained": m.constrained, "zero_mode": m.zero_mode}
                      for m in self.modes],
            "verdict": self.verdict,
            "worst_l": ell,
            "worst_lambda": float(lam),
            "ell_stop": self.ell_stop,
            "monotone_certified": self.monotone_certified,
            "grid": self.grid,
            "eps_stab": self.eps_stab,
            "details": self.details,
        }


def _is_translation_zero(surface: RevolutionSurface, pencil: ModePencil,
                         lam: float, g: np.ndarray) -> bool:
    if pencil.ell != 1 or abs(lam) > ZERO_MODE_LAMBDA:
        return False
    ref = np.sin(surface.profile.alpha)[pencil.dof_index]
    nrm = math.sqrt(ref @ pencil.apply_m(ref))
    if nrm == 0.0:
        return False
    ref = ref / nrm
    resid = min(np.linalg.norm(g - ref), np.linalg.norm(g + ref))
    return bool(resid / np.linalg.norm(ref) <= ZERO_MODE_L2)


def classify_stability(surface: RevolutionSurface,
                       eps_stab: float = EPS_STAB,
                       ell_guard: int = ELL_GUARD) -> StabilityReport:
    """Sweep modes until the minimal eigenvalue clears +eps_stab.

    The ell-dependent potential term mu_ell/x^2 is pointwise nondecreasing in
    ell, so lambda_min(ell) is nondecreasing; the first ell with
    lambda_min >= +eps_stab certifies all higher modes.
    """
    modes: list[ModeResult] = []
    pen0 = assemble_mode(surface, 0)
    lam0, _ = min_eigenvalue(pen0, constrained=True)
    modes.append(ModeResult(0, lam0, constrained=True))

    monotone = False
    ell = 0
    for ell in range(1, ell_guard + 1):
        pen = assemble_mode(surface, ell)
        lam, g = min_eigenvalue(pen)
        zero = _is_translation_zero(surface, pen, lam, g)
        modes.append(ModeResult(ell, lam, constrained=False, zero_mode=zero))
        if lam >= eps_stab:
            monotone = True
            break

    effective = [m.lambda_min for m in modes if not m.zero_mode]
    if any(l < -eps_stab for l in effective):
        verdict = "unstable"
    elif any(abs(l) <= eps_stab for l in effective):
        verdict = "marginal"
    else:
        verdict = "stable"
    return StabilityReport(modes=modes, verdict=verdict, ell_stop=ell,
                           monotone_certified=monotone,
                           grid=surface.profile.m, eps_stab=eps_stab)


def index_value(surface: RevolutionSurface, parts: list[tuple[int, np.ndarray]]) -> float:
    """Index form I(f,f) for f given as finitely many (ell, g_ell) pairs.

    Normalization: the ell = 0 angular factor is the constant Y = 1 (carrying
    the full orbit-sphere measure omega_{n-1}); for ell >= 1 the harmonics
    are taken L^2-normalized, so distinct modes add with unit weight.
    """
    n = surface.problem.n
    total = 0.0
    for ell, g in parts:
        pen = assemble_mode(surface, ell)
        gv = np.asarray(g, dtype=float)
        if gv.size == surface.profile.m and pen.size != gv.size:
            gv = gv[pen.dof_index]
        w = unit_sphere_area(n) if ell == 0 else 1.0
        total += w * float(gv @ pen.apply_a(gv))
    return total
