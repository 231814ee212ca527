"""Rotational hypersurface geometry: profile curves, curvature data, boundary frames.

A hypersurface of revolution in R^{n+1} is described by its generating curve
(x(s), z(s)) in the (radial, vertical) half-plane, sampled on a uniform
arclength grid together with the tangent angle alpha, so that

    x' = cos(alpha),   z' = sin(alpha).

Orientation convention used throughout: the unit normal is

    N = (sin(alpha) * omega, -cos(alpha)),   omega in S^{n-1},

and the profile is traversed in the direction that makes the mean curvature
nonnegative with respect to N.  With that traversal the principal curvatures
are

    kappa1 = -alpha'          (meridian direction)
    kappa2 = -sin(alpha)/x    (rotational directions)

and the coordinate identity  Laplacian(psi) = n H N  holds exactly.  A sphere
of radius R is traversed from its top pole downwards (alpha = -s/R), a
cylinder downwards (alpha = -pi/2), and both carry H = +1/R resp. (n-1)/(n r).
"""

from __future__ import annotations

import hashlib
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AxisEndpoint, GridTooCoarse, NonPositiveRadius

MIN_SAMPLES = 16

#: tolerance for placing endpoints on walls / the axis
GEOM_TOL = 1e-7


def unit_sphere_area(n: int) -> float:
    """Surface measure of the unit (n-1)-sphere in R^n."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def ball_volume(n: int, r: float) -> float:
    """Lebesgue measure of the n-ball of radius r."""
    return unit_sphere_area(n) / n * r**n


# ---------------------------------------------------------------------------
# finite differences (2nd order interior, 2nd order one-sided at the ends)
# ---------------------------------------------------------------------------

def deriv(y: np.ndarray, ds: float) -> np.ndarray:
    d = np.empty_like(y)
    d[1:-1] = (y[2:] - y[:-2]) / (2.0 * ds)
    d[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * ds)
    d[-1] = (3.0 * y[-1] - 4.0 * y[-2] + y[-3]) / (2.0 * ds)
    return d


def deriv2(y: np.ndarray, ds: float) -> np.ndarray:
    d = np.empty_like(y)
    d[1:-1] = (y[2:] - 2.0 * y[1:-1] + y[:-2]) / ds**2
    d[0] = (2.0 * y[0] - 5.0 * y[1] + 4.0 * y[2] - y[3]) / ds**2
    d[-1] = (2.0 * y[-1] - 5.0 * y[-2] + 4.0 * y[-3] - y[-4]) / ds**2
    return d


def trapz_weighted(f: np.ndarray, w: np.ndarray, ds: float) -> float:
    """Composite trapezoid of f*w on the uniform grid."""
    g = f * w
    return float(np.trapezoid(g, dx=ds))


# ---------------------------------------------------------------------------
# profile curve
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProfileCurve:
    """Arclength-sampled generating curve of a hypersurface of revolution."""

    s: np.ndarray
    x: np.ndarray
    z: np.ndarray
    alpha: np.ndarray
    axis_start: bool = False
    axis_end: bool = False

    def __post_init__(self):
        for name in ("s", "x", "z", "alpha"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        m = self.s.size
        if m < MIN_SAMPLES:
            raise GridTooCoarse(f"need at least {MIN_SAMPLES} samples, got {m}")
        if not (self.x.size == self.z.size == self.alpha.size == m):
            raise ValueError("sample arrays must have equal length")
        ds = np.diff(self.s)
        if np.any(ds <= 0) or abs(ds.max() - ds.min()) > 1e-9 * abs(ds.mean()) + 1e-15:
            raise ValueError("arclength grid must be uniform and increasing")
        interior = self.x[1:-1]
        if np.any(interior <= 0):
            raise NonPositiveRadius("x <= 0 at an interior sample")
        if self.x[0] <= 0 and not self.axis_start:
            raise NonPositiveRadius("x <= 0 at a non-axis start sample")
        if self.x[-1] <= 0 and not self.axis_end:
            raise NonPositiveRadius("x <= 0 at a non-axis end sample")

    @property
    def m(self) -> int:
        return self.s.size

    @property
    def ds(self) -> float:
        return float(self.s[1] - self.s[0])

    @property
    def length(self) -> float:
        return float(self.s[-1] - self.s[0])

    def compatibility_defect(self) -> float:
        """max |dx/ds - cos(alpha)| at element midpoints (discrete tangency)."""
        a_mid = 0.5 * (self.alpha[1:] + self.alpha[:-1])
        dx = np.diff(self.x) / self.ds
        dz = np.diff(self.z) / self.ds
        return float(max(np.max(np.abs(dx - np.cos(a_mid))), np.max(np.abs(dz - np.sin(a_mid)))))

    # -- serialization ------------------------------------------------------

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("s,x,z,alpha\n")
        for row in zip(self.s, self.x, self.z, self.alpha):
            buf.write(",".join(f"{v:.17g}" for v in row) + "\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, axis_start: bool = False, axis_end: bool = False) -> "ProfileCurve":
        lines = [ln for ln in text.strip().splitlines() if ln.strip()]
        if lines[0].strip() != "s,x,z,alpha":
            raise ValueError("bad profile CSV header")
        data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
        return cls(data[:, 0], data[:, 1], data[:, 2], data[:, 3],
                   axis_start=axis_start, axis_end=axis_end)

    def content_hash(self) -> str:
        h = hashlib.sha256()
        for arr in (self.s, self.x, self.z, self.alpha):
            h.update(np.ascontiguousarray(arr).tobytes())
        return h.hexdigest()


# ---------------------------------------------------------------------------
# ambient problem
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CapillaryProblem:
    """Ambient domain, dimension, contact angles and mean curvature."""

    n: int
    domain: str                      # "halfspace" | "slab"
    H: float
    theta_lower: float
    theta_upper: float | None = None  # unused for halfspace
    height: float | None = None       # slab height

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("hypersurface dimension n must be >= 2")
        if self.domain not in ("halfspace", "slab"):
            raise ValueError(f"unknown domain {self.domain!r}")
        if not (0.0 < self.theta_lower < math.pi):
            raise ValueError("theta_lower must lie in (0, pi)")
        if self.domain == "slab":
            if self.height is None or self.height <= 0:
                raise ValueError("slab requires height > 0")
            if self.theta_upper is None or not (0.0 < self.theta_upper < math.pi):
                raise ValueError("slab requires theta_upper in (0, pi)")
        if self.H < 0:
            raise ValueError("mean curvature must be >= 0 under the orientation convention")


# ---------------------------------------------------------------------------
# endpoints and surfaces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Endpoint:
    """Boundary data at one end of the profile."""

    where: str           # "start" | "end"
    kind: str            # "axis" | "wall"
    wall: str | None     # "lower" | "upper" | None
    index: int           # 0 or m-1
    theta: float | None  # measured contact angle (wall endpoints)
    x_b: float | None    # boundary radius
    nubar_sign: float | None  # +1 if the in-wall normal points away from the axis

    @property
    def is_wall(self) -> bool:
        return self.kind == "wall"


@dataclass(frozen=True)
class CurvatureData:
    kappa1: np.ndarray
    kappa2: np.ndarray
    sigma_sq: np.ndarray
    H_check: np.ndarray


@dataclass(frozen=True)
class RevolutionSurface:
    """ProfileCurve + problem data + classified endpoints."""

    profile: ProfileCurve
    problem: CapillaryProblem
    endpoints: tuple[Endpoint, ...] = field(default=())
    wall_tol: float = 1e-6

    def __post_init__(self):
        if not self.endpoints:
            object.__setattr__(self, "endpoints", self._classify_endpoints())

    def _classify_endpoints(self) -> tuple[Endpoint, ...]:
        p, prob = self.profile, self.problem
        out = []
        for where, idx, axis_flag in (("start", 0, p.axis_start), ("end", p.m - 1, p.axis_end)):
            if axis_flag:
                if abs(p.x[idx]) > self.wall_tol:
                    raise ValueError("axis endpoint has x far from 0")
                out.append(Endpoint(where, "axis", None, idx, None, None, None))
                continue
            z = p.z[idx]
            if abs(z) <= self.wall_tol:
                wall = "lower"
            elif prob.domain == "slab" and abs(z - prob.height) <= self.wall_tol:
                wall = "upper"
            else:
                raise ValueError(f"{where} endpoint lies on no wall (z={z!r})")
            a = p.alpha[idx]
            # contact angle between N and the exterior wall normal
            if wall == "lower":
                cos_t = math.cos(a)       # <N, -e_z> = cos(alpha)
            else:
                cos_t = -math.cos(a)      # <N, +e_z>
            theta = math.acos(max(-1.0, min(1.0, cos_t)))
            nubar = self._nubar_sign(where, a, wall)
            out.append(Endpoint(where, "wall", wall, idx, theta, float(p.x[idx]), nubar))
        return tuple(out)

    @staticmethod
    def _nubar_sign(where: str, alpha: float, wall: str) -> float:
        # nu in the (r, z) plane: -(cos a, sin a) at the start, +(cos a, sin a) at the end
        sgn = -1.0 if where == "start" else 1.0
        n_vec = np.array([math.sin(alpha), -math.cos(alpha)])
        nu = sgn * np.array([math.cos(alpha), math.sin(alpha)])
        det = n_vec[0] * nu[1] - n_vec[1] * nu[0]
        # orientation compatibility: det[N, nu] = det[Nbar, nubar];
        # lower wall: Nbar = -e_z gives nubar_r = det; upper wall: Nbar = +e_z flips it.
        return float(det if wall == "lower" else -det)

    # -- convenience --------------------------------------------------------

    @property
    def topology(self) -> str:
        kinds = sorted(e.kind for e in self.endpoints)
        if kinds == ["axis", "axis"]:
            return "closed"
        if kinds == ["axis", "wall"]:
            return "disk"
        return "annulus"

    def wall_endpoints(self) -> list[Endpoint]:
        return [e for e in self.endpoints if e.is_wall]

    def endpoint_residuals(self) -> dict:
        """Wall-hit and prescribed-angle residuals per wall endpoint."""
        p, prob = self.profile, self.problem
        out = {}
        for e in self.wall_endpoints():
            z = p.z[e.index]
            z_target = 0.0 if e.wall == "lower" else prob.height
            planned = prob.theta_lower if e.wall == "lower" else prob.theta_upper
            out[e.where] = {
                "wall_residual": abs(z - z_target),
                "angle_residual": abs(e.theta - planned) if planned is not None else None,
            }
        return out

    def content_hash(self) -> str:
        h = hashlib.sha256(self.profile.content_hash().encode())
        prob = self.problem
        h.update(repr((prob.n, prob.domain, prob.H, prob.theta_lower,
                       prob.theta_upper, prob.height)).encode())
        return h.hexdigest()


# ---------------------------------------------------------------------------
# curvature
# ---------------------------------------------------------------------------

def curvature_data(surface: RevolutionSurface) -> CurvatureData:
    """Per-sample principal curvatures, |sigma|^2 and the mean-curvature check.

    At an axis endpoint the rotational curvature is continued by the regular
    limit kappa2 -> kappa1 (removable coordinate singularity).
    """
    p = surface.profile
    n = surface.problem.n
    if p.m < MIN_SAMPLES:
        raise GridTooCoarse(f"need at least {MIN_SAMPLES} samples")
    kappa1 = -deriv(p.alpha, p.ds)
    with np.errstate(divide="ignore", invalid="ignore"):
        kappa2 = -np.sin(p.alpha) / p.x
    for e in surface.endpoints:
        if e.kind == "axis":
            kappa2[e.index] = kappa1[e.index]
    if not np.all(np.isfinite(kappa2)):
        raise NonPositiveRadius("encountered x = 0 at a non-axis sample")
    sigma_sq = kappa1**2 + (n - 1) * kappa2**2
    h_check = (kappa1 + (n - 1) * kappa2) / n
    return CurvatureData(kappa1, kappa2, sigma_sq, h_check)


def robin_coefficient(surface: RevolutionSurface, endpoint: Endpoint) -> float:
    """Boundary coefficient q = cot(theta) * sigma(nu, nu) at a wall endpoint.

    For planar walls the wall's own second fundamental form vanishes, and the
    outward conormal is a principal direction, so sigma(nu, nu) is the
    meridian principal curvature at the endpoint.
    """
    if not endpoint.is_wall:
        raise AxisEndpoint("Robin coefficient is defined at wall endpoints only")
    cd = curvature_data(surface)
    sigma_nn = float(cd.kappa1[endpoint.index])
    return sigma_nn / math.tan(endpoint.theta)


def sigma_nu_nu(surface: RevolutionSurface, endpoint: Endpoint) -> float:
    if not endpoint.is_wall:
        raise AxisEndpoint("sigma(nu,nu) requested at an axis endpoint")
    cd = curvature_data(surface)
    return float(cd.kappa1[endpoint.index])


def boundary_frame(surface: RevolutionSurface, endpoint: Endpoint):
    """Unit vectors (N, nu, nubar, Nbar) in the (radial, vertical) plane."""
    if not endpoint.is_wall:
        raise AxisEndpoint("boundary frame is defined at wall endpoints only")
    a = float(surface.profile.alpha[endpoint.index])
    N = np.array([math.sin(a), -math.cos(a)])
    sgn = -1.0 if endpoint.where == "start" else 1.0
    nu = sgn * np.array([math.cos(a), math.sin(a)])
    Nbar = np.array([0.0, -1.0]) if endpoint.wall == "lower" else np.array([0.0, 1.0])
    nubar = np.array([endpoint.nubar_sign, 0.0])
    return N, nu, nubar, Nbar


def boundary_mean_curvature(surface: RevolutionSurface, endpoint: Endpoint) -> float:
    """Mean curvature of the boundary sphere inside the wall, w.r.t. nubar.

    The boundary of a rotational surface on a wall is a round (n-2)-sphere of
    radius x_b; computed with respect to the compatible in-wall normal nubar
    its mean curvature is -nubar_sign / x_b.  The sign was frozen after
    verifying the boundary identity sigma(nu,nu) = nH + (n-1) sin(theta) H_b
    on spherical caps.
    """
    if not endpoint.is_wall:
        raise AxisEndpoint("boundary mean curvature needs a wall endpoint")
    return -endpoint.nubar_sign / endpoint.x_b


# ---------------------------------------------------------------------------
# measures
# ---------------------------------------------------------------------------

def areas(surface: RevolutionSurface) -> tuple[float, dict, float]:
    """(lateral area, wetted area per wall, enclosed volume).

    Wetted areas are signed sums of flat-ball measures, one per wall endpoint,
    with the sign of the compatible in-wall normal; volume comes from the
    divergence theorem applied to the axisymmetric region.
    """
    p = surface.profile
    n = surface.problem.n
    om = unit_sphere_area(n)
    w = p.x ** (n - 1)
    lateral = om * trapz_weighted(np.ones(p.m), w, p.ds)

    wetted = {"lower": 0.0, "upper": 0.0}
    for e in surface.wall_endpoints():
        wetted[e.wall] += e.nubar_sign * ball_volume(n, e.x_b)

    vol = om * trapz_weighted(p.z * np.cos(p.alpha), w, p.ds)
    if surface.problem.domain == "slab":
        vol += surface.problem.height * wetted["upper"]
    return lateral, wetted, vol


def energy(surface: RevolutionSurface) -> float:
    """Capillary energy: lateral area minus cos(theta)-weighted wetted areas."""
    lat, wetted, _ = areas(surface)
    prob = surface.problem
    e = lat - math.cos(prob.theta_lower) * wetted["lower"]
    if prob.domain == "slab":
        e -= math.cos(prob.theta_upper) * wetted["upper"]
    return e


def flux(surface: RevolutionSurface) -> np.ndarray:
    """First integral of the profile equation, constant along exact profiles."""
    p = surface.profile
    n, H = surface.problem.n, surface.problem.H
    return -p.x ** (n - 1) * np.sin(p.alpha) - H * p.x**n


def support_function(surface: RevolutionSurface) -> np.ndarray:
    """u = <psi, N> on the profile."""
    p = surface.profile
    return p.x * np.sin(p.alpha) - p.z * np.cos(p.alpha)


def gauss_vertical(surface: RevolutionSurface) -> np.ndarray:
    """v = <N, e_{n+1}> on the profile."""
    return -np.cos(surface.profile.alpha)


def laplacian_profile(surface: RevolutionSurface, g: np.ndarray, ell: int = 0) -> np.ndarray:
    """Axisymmetric Laplacian of a separated mode g(s)*Y_ell(omega).

    Delta_ell g = g'' + (n-1)(x'/x) g' - ell(ell+n-2)/x^2 * g, by finite
    differences on the profile grid.  Near-axis samples are returned as-is;
    callers that need convergence orders should mask a fixed neighborhood of
    the axis where the 1/x factors amplify stencil noise.
    """
    p = surface.profile
    n = surface.problem.n
    g = np.asarray(g, dtype=float)
    d1 = deriv(g, p.ds)
    d2 = deriv2(g, p.ds)
    with np.errstate(divide="ignore", invalid="ignore"):
        lap = d2 + (n - 1) * (np.cos(p.alpha) / p.x) * d1
        if ell > 0:
            lap = lap - ell * (ell + n - 2) / p.x**2 * g
    return lap
