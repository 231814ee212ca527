"""Quadrature and finite-difference verification of the geometric identities.

Each check evaluates both sides of an identity that exact capillary CMC
surfaces satisfy, so the reported residuals measure discretization error
only.  Max-pointwise residuals involving 1/x factors are taken over a fixed
interior window that excludes a neighborhood of the axis (the window is a
fraction of total arclength, held fixed under grid refinement so convergence
orders remain meaningful).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import PerturbationTooLarge
from .geometry import (RevolutionSurface, ball_volume, boundary_frame,
                       curvature_data, deriv, gauss_vertical,
                       laplacian_profile, support_function, trapz_weighted,
                       unit_sphere_area)

#: fraction of total arclength masked off next to an axis endpoint when
#: reporting max pointwise residuals
AXIS_MASK_FRAC = 0.05


@dataclass
class ResidualReport:
    identity: str
    grid: int
    max_pointwise: float | None = None
    integral_abs: float | None = None
    integral_rel: float | None = None
    convergence_order: float | None = None
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "identity": self.identity,
            "grid": self.grid,
            "max_pointwise": self.max_pointwise,
            "integral_abs": self.integral_abs,
            "integral_rel": self.integral_rel,
            "convergence_order": self.convergence_order,
            "details": self.details,
        }


def estimate_order(residual_coarse: float, residual_fine: float) -> float:
    """Convergence order from residuals at M and 2M samples."""
    if residual_fine <= 0:
        return math.inf
    return math.log2(residual_coarse / residual_fine)


def _interior_mask(surface: RevolutionSurface) -> np.ndarray:
    p = surface.profile
    mask = np.ones(p.m, dtype=bool)
    cut = AXIS_MASK_FRAC * p.length
    for e in surface.endpoints:
        if e.kind == "axis":
            mask &= np.abs(p.s - p.s[e.index]) >= cut
    return mask


def _pointwise_report(surface: RevolutionSurface, identity: str,
                      residual: np.ndarray, scale: np.ndarray) -> ResidualReport:
    p = surface.profile
    n = surface.problem.n
    mask = _interior_mask(surface)
    res = np.where(mask, residual, 0.0)
    w = p.x ** (n - 1)
    integral = trapz_weighted(np.abs(res), w, p.ds)
    ref = trapz_weighted(np.abs(np.where(mask, scale, 0.0)), w, p.ds)
    return ResidualReport(
        identity=identity, grid=p.m,
        max_pointwise=float(np.max(np.abs(res))),
        integral_abs=integral,
        integral_rel=integral / max(ref, 1e-300),
    )


# ---------------------------------------------------------------------------
# pointwise PDE identities
# ---------------------------------------------------------------------------

def check_position_laplacian(surface: RevolutionSurface) -> ResidualReport:
    """Coordinate functions are eigen-like: Laplacian of psi equals nH N.

    The vertical component z is a pure profile function; the horizontal
    components carry the first angular harmonic, so the radial profile part
    x(s) picks up the -(n-1)/x^2 angular term.
    """
    p = surface.profile
    n, H = surface.problem.n, surface.problem.H
    v_res = laplacian_profile(surface, p.z, ell=0) - n * H * (-np.cos(p.alpha))
    h_res = laplacian_profile(surface, p.x, ell=1) - n * H * np.sin(p.alpha)
    res = np.maximum(np.abs(v_res), np.abs(h_res))
    rep = _pointwise_report(surface, "position_laplacian", res,
                            np.full(p.m, n * H if H > 0 else 1.0))
    return rep


def check_support_equation(surface: RevolutionSurface) -> ResidualReport:
    """Support function u satisfies  Delta u + |sigma|^2 u + nH = 0."""
    n, H = surface.problem.n, surface.problem.H
    u = support_function(surface)
    ssq = curvature_data(surface).sigma_sq
    res = laplacian_profile(surface, u, ell=0) + ssq * u + n * H
    return _pointwise_report(surface, "support_equation", res, ssq * np.abs(u) + n * H)


def check_gauss_equation(surface: RevolutionSurface) -> ResidualReport:
    """Vertical Gauss-map component v satisfies  Delta v + |sigma|^2 v = 0."""
    v = gauss_vertical(surface)
    ssq = curvature_data(surface).sigma_sq
    res = laplacian_profile(surface, v, ell=0) + ssq * v
    return _pointwise_report(surface, "gauss_equation", res, ssq * np.abs(v) + 1.0)


# ---------------------------------------------------------------------------
# integrated divergence identities
# ---------------------------------------------------------------------------

def check_divergence_identities(surface: RevolutionSurface,
                                bands: int = 3) -> ResidualReport:
    """Tangential-divergence identities in integrated (band-flux) form.

    For a band of revolution between two parallels, the divergence theorem
    turns  div(psi^T) = n + nH<psi,N>  into a statement comparing the
    parallel flux of the tangential position field with an area integral,
    and likewise  div(a^T) = nH<a,N>  for the constant vertical field.
    """
    p = surface.profile
    n, H = surface.problem.n, surface.problem.H
    om = unit_sphere_area(n)
    w = p.x ** (n - 1)

    flux_pos = w * (p.x * np.cos(p.alpha) + p.z * np.sin(p.alpha))
    flux_vert = w * np.sin(p.alpha)
    dens_pos = (n + n * H * support_function(surface)) * w
    dens_vert = n * H * gauss_vertical(surface) * w

    cuts = np.linspace(0, p.m - 1, bands + 1).astype(int)
    windows = [(cuts[i], cuts[i + 1]) for i in range(bands)] + [(0, p.m - 1)]
    worst = 0.0
    per_band = []
    for i1, i2 in windows:
        sl = slice(i1, i2 + 1)
        for fl, de, tag in ((flux_pos, dens_pos, "position"),
                            (flux_vert, dens_vert, "vertical")):
            lhs = om * (fl[i2] - fl[i1])
            rhs = om * float(np.trapezoid(de[sl], dx=p.ds))
            rel = abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs))
            per_band.append({"band": [int(i1), int(i2)], "field": tag,
                             "lhs": lhs, "rhs": rhs, "rel": rel})
            worst = max(worst, rel)
    return ResidualReport(identity="divergence_identities", grid=p.m,
                          integral_abs=worst, integral_rel=worst,
                          details={"bands": per_band})


def check_normal_integral(surface: RevolutionSurface) -> ResidualReport:
    """Balance of the total normal against the boundary moment.

    n * integral of N over the surface equals the boundary integral of
    <psi,nu> N - <psi,N> nu; only vertical components survive the rotational
    symmetry.  Closed surfaces reduce to: the total normal vanishes.
    """
    p = surface.profile
    n = surface.problem.n
    om = unit_sphere_area(n)
    w = p.x ** (n - 1)
    lhs_z = n * om * trapz_weighted(gauss_vertical(surface), w, p.ds)

    rhs_z = 0.0
    moment = 0.0   # boundary integral of <psi, nu>, reused for the cap form
    for e in surface.wall_endpoints():
        N, nu, _, _ = boundary_frame(surface, e)
        x_b, z_b = p.x[e.index], p.z[e.index]
        psi_nu = x_b * nu[0] + z_b * nu[1]
        u_b = support_function(surface)[e.index]
        meas = om * x_b ** (n - 1)
        rhs_z += meas * (psi_nu * N[1] - u_b * nu[1])
        moment += meas * psi_nu

    details = {"lhs_z": lhs_z, "rhs_z": rhs_z}
    if surface.topology == "closed":
        resid = abs(lhs_z)
        rel = resid
    else:
        resid = abs(lhs_z - rhs_z)
        rel = resid / max(1.0, abs(lhs_z), abs(rhs_z))
        ct = math.cos(surface.problem.theta_lower)
        if surface.problem.domain == "halfspace" and abs(ct) > 1e-8:
            alt = -moment / ct
            details["cap_form_rhs_z"] = alt
            rel = max(rel, abs(lhs_z - alt) / max(1.0, abs(lhs_z), abs(alt)))
    return ResidualReport(identity="normal_integral", grid=p.m,
                          integral_abs=resid, integral_rel=rel, details=details)


# ---------------------------------------------------------------------------
# first variation by finite differences
# ---------------------------------------------------------------------------

def _perturbed_energy_volume(surface: RevolutionSurface, xi_r: np.ndarray,
                             xi_z: np.ndarray, t: float) -> tuple[float, float]:
    """(energy, algebraic volume) of the offset profile at parameter t.

    The offset curve is no longer arclength-parametrized, so lengths and the
    volume integrand carry the parametric Jacobian.  The algebraic volume is
    signed so that its t-derivative is the area integral of <xi, N>.
    """
    p, prob = surface.profile, surface.problem
    n = prob.n
    om = unit_sphere_area(n)
    X = p.x + t * xi_r
    Z = p.z + t * xi_z
    if np.any(X[1:-1] <= 0):
        raise PerturbationTooLarge("offset profile crosses the axis")
    Xp = deriv(X, p.ds)
    Zp = deriv(Z, p.ds)
    jac = np.hypot(Xp, Zp)
    lateral = om * trapz_weighted(jac, X ** (n - 1), p.ds)

    wetted = {"lower": 0.0, "upper": 0.0}
    for e in surface.wall_endpoints():
        wetted[e.wall] += e.nubar_sign * ball_volume(n, float(X[e.index]))
    vol = om * trapz_weighted(Z * Xp, X ** (n - 1), p.ds)
    if prob.domain == "slab":
        vol += prob.height * wetted["upper"]

    energy = lateral - math.cos(prob.theta_lower) * wetted["lower"]
    if prob.domain == "slab":
        energy -= math.cos(prob.theta_upper) * wetted["upper"]
    return energy, -vol


def admissible_field(surface: RevolutionSurface, f: np.ndarray):
    """Variation field f*N plus the tangential slide keeping endpoints on walls.

    The tangential coefficient is fixed at wall endpoints by the no-lift
    condition and interpolated linearly along the profile (zero at an axis
    endpoint).  Returns (xi_r, xi_z) profile components.
    """
    p = surface.profile
    f = np.asarray(f, dtype=float)
    eta_ends = {0: 0.0, p.m - 1: 0.0}
    for e in surface.wall_endpoints():
        sa = math.sin(p.alpha[e.index])
        if abs(sa) < 0.1:
            raise PerturbationTooLarge(
                "profile nearly tangent to the wall; endpoint slide blows up")
        eta_ends[e.index] = f[e.index] * math.cos(p.alpha[e.index]) / sa
    eta = np.interp(p.s, [p.s[0], p.s[-1]], [eta_ends[0], eta_ends[p.m - 1]])
    xi_r = f * np.sin(p.alpha) + eta * np.cos(p.alpha)
    xi_z = -f * np.cos(p.alpha) + eta * np.sin(p.alpha)
    return xi_r, xi_z


def first_variation_check(surface: RevolutionSurface, f: np.ndarray,
                          delta: float = 1e-2) -> ResidualReport:
    """Centered finite-difference E'(0), V'(0) against the closed forms.

    E'(0) = -nH * (integral of f) for admissible fields whose endpoint motion
    is wall-tangent (the boundary term then vanishes), and V'(0) equals the
    integral of f.  Defects are reported at delta and 2*delta so callers can
    verify the O(delta^2) scaling of the centered stencil.
    """
    p, prob = surface.profile, surface.problem
    n, H = prob.n, prob.H
    om = unit_sphere_area(n)
    f = np.asarray(f, dtype=float)
    xi_r, xi_z = admissible_field(surface, f)

    int_f = om * trapz_weighted(f, p.x ** (n - 1), p.ds)
    rhs_E = -n * H * int_f
    rhs_V = int_f

    out = {}
    for d in (delta, 2.0 * delta):
        Ep, Vp = _perturbed_energy_volume(surface, xi_r, xi_z, +d)
        Em, Vm = _perturbed_energy_volume(surface, xi_r, xi_z, -d)
        dE = (Ep - Em) / (2.0 * d)
        dV = (Vp - Vm) / (2.0 * d)
        out[d] = {"E_prime": dE, "V_prime": dV,
                  "defect_E": abs(dE - rhs_E), "defect_V": abs(dV - rhs_V),
                  "crit_defect": abs(dE + n * H * dV)}
    d1, d2 = out[delta], out[2.0 * delta]
    details = {
        "rhs_E": rhs_E, "rhs_V": rhs_V, "delta": delta,
        "E_prime": d1["E_prime"], "V_prime": d1["V_prime"],
        "defect_E": d1["defect_E"], "defect_V": d1["defect_V"],
        "defect_E_2d": d2["defect_E"], "defect_V_2d": d2["defect_V"],
        "crit_defect": d1["crit_defect"],
        "ratio_E": d2["defect_E"] / d1["defect_E"] if d1["defect_E"] > 0 else math.nan,
        "ratio_V": d2["defect_V"] / d1["defect_V"] if d1["defect_V"] > 0 else math.nan,
    }
    return ResidualReport(identity="first_variation", grid=p.m,
                          integral_abs=max(d1["defect_E"], d1["defect_V"]),
                          integral_rel=d1["crit_defect"] / max(1.0, abs(rhs_E)),
                          details=details)


ALL_CHECKS = {
    "position_laplacian": check_position_laplacian,
    "support_equation": check_support_equation,
    "gauss_equation": check_gauss_equation,
    "divergence_identities": check_divergence_identities,
    "normal_integral": check_normal_integral,
}


def run_all_checks(surface: RevolutionSurface) -> list[ResidualReport]:
    return [fn(surface) for fn in ALL_CHECKS.values()]
