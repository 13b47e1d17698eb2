"""Ray-arc-ray cross-sections of the bend-and-smooth construction.

Everything lives in one normal 2-plane, written in geodesic normal
(exponential) coordinates centred at the wedge vertex o.  A coordinate point
``z`` with ``|z| = rho`` corresponds to the hyperboloid point
``(sinh(rho) z / rho, cosh(rho))``, so straight coordinate rays from the origin
are hyperbolic geodesics parametrised by arclength.

The two rays meet at angle ``theta``; the bisector is the +y axis.  The corner
is replaced by the Euclidean circle tangent to both rays at coordinate
distance ``r`` from the origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import ConfigurationError, DomainError
from .formulas import smoothing_radius, tangency_radius
from .hyperboloid import HPoint, Hyperplane, boost, dist, lorentz_inner, project_to_hyperplane

MIN_SAMPLES = 16
# sup k_g * R over the calibration sweep is about 1.042; frozen with headroom
CALIBRATED_C = 2.0

# central-difference weights (8th order) for the first and second derivative
_D1 = np.array([1 / 280, -4 / 105, 1 / 5, -4 / 5, 0.0, 4 / 5, -1 / 5, 4 / 105, -1 / 280])
_D2 = np.array([-1 / 560, 8 / 315, -1 / 5, 8 / 5, -205 / 72, 8 / 5, -1 / 5, 8 / 315, -1 / 560])
_OFFSETS = np.arange(-4, 5)


def _sinhc(rho):
    rho = np.asarray(rho, dtype=float)
    small = rho < 1e-4
    safe = np.where(small, 1.0, rho)
    return np.where(small, 1.0 + rho**2 / 6.0 + rho**4 / 120.0, np.sinh(safe) / safe)


def exp_map(z) -> np.ndarray:
    """Normal coordinates at the origin -> hyperboloid points (works on stacks)."""
    z = np.asarray(z, dtype=float)
    rho = np.hypot(z[..., 0], z[..., 1])
    s = _sinhc(rho)
    last = 1.0 + 2.0 * np.sinh(rho / 2.0) ** 2
    return np.stack([s * z[..., 0], s * z[..., 1], last], axis=-1)


def _linner(a, b):
    return a[..., 0] * b[..., 0] + a[..., 1] * b[..., 1] - a[..., 2] * b[..., 2]


@dataclass(frozen=True)
class SmoothedProfile:
    theta: float
    r: float
    R: float
    ray1: np.ndarray  # unit direction of the first ray
    ray2: np.ndarray
    center: np.ndarray
    tangent1: np.ndarray  # point where the circle touches ray1
    tangent2: np.ndarray
    samples: int = 2001
    ray_extent: float = 1.0
    degenerate: bool = False

    @property
    def arc_span(self) -> float:
        """Angle subtended by the arc at the circle centre."""
        return math.pi - self.theta

    @property
    def arc_euclidean_length(self) -> float:
        return 2.0 * self.r if self.degenerate else self.R * self.arc_span

    def arc_point(self, s):
        """Coordinates at Euclidean arclength ``s`` along the arc, measured from tangent1."""
        s = np.asarray(s, dtype=float)
        if self.degenerate:
            return self.tangent1[None, :] * (1.0 - s[..., None] / self.r) if s.ndim else self.tangent1 * (1.0 - s / self.r)
        # T1 + R (e^{i(phi0 + s/R)} - e^{i phi0}) without forming the far-away centre
        phi0 = math.atan2(self.tangent1[1] - self.center[1], self.tangent1[0] - self.center[0])
        half = s / (2.0 * self.R)
        chord = 2.0 * self.R * np.sin(half)
        ang = phi0 + half + math.pi / 2.0
        x = self.tangent1[0] + chord * np.cos(ang)
        y = self.tangent1[1] + chord * np.sin(ang)
        return np.stack([x, y], axis=-1)

    def arc_velocity(self, s):
        s = np.asarray(s, dtype=float)
        if self.degenerate:
            return np.broadcast_to(-self.tangent1 / self.r, s.shape + (2,))
        phi0 = math.atan2(self.tangent1[1] - self.center[1], self.tangent1[0] - self.center[0])
        ang = phi0 + s / self.R + math.pi / 2.0
        return np.stack([np.cos(ang), np.sin(ang)], axis=-1)

    def junction_errors(self) -> tuple[float, float]:
        """(C0, C1) mismatch at the two junctions, in coordinates."""
        L = self.arc_euclidean_length
        ends = self.arc_point(np.array([0.0, L]))
        c0 = max(np.max(np.abs(ends[0] - self.tangent1)), np.max(np.abs(ends[1] - self.tangent2)))
        vel = self.arc_velocity(np.array([0.0, L]))
        # incoming along ray1 toward the origin, outgoing along ray2 away from it
        c1 = max(np.max(np.abs(vel[0] + self.ray1)), np.max(np.abs(vel[1] - self.ray2)))
        return float(c0), float(c1)


def build_profile(theta: float, r: float, samples: int = 2001, ray_extent: float = 1.0) -> SmoothedProfile:
    """Circle of radius r tan(theta/2) tangent to both rays at coordinate distance ``r``.

    ``theta == pi`` returns the flagged straight-line profile.
    """
    if not r > 0:
        raise DomainError(f"r must be positive, got {r!r}")
    if samples < MIN_SAMPLES:
        raise ConfigurationError(f"need at least {MIN_SAMPLES} samples, got {samples}")
    if theta == math.pi:
        u1, u2 = np.array([-1.0, 0.0]), np.array([1.0, 0.0])
        return SmoothedProfile(theta, r, math.inf, u1, u2, np.array([0.0, math.inf]),
                               r * u1, r * u2, samples, ray_extent, degenerate=True)
    R = smoothing_radius(r, theta)
    half = theta / 2.0
    u1 = np.array([-math.sin(half), math.cos(half)])
    u2 = np.array([math.sin(half), math.cos(half)])
    center = np.array([0.0, r / math.cos(half)])
    return SmoothedProfile(theta, r, R, u1, u2, center, r * u1, r * u2, samples, ray_extent)


@dataclass(frozen=True)
class CurvatureReport:
    s: np.ndarray  # Euclidean coordinate arclength along the arc
    kappa: np.ndarray
    sup_curvature: float
    arc_length: float  # hyperbolic length of the arc
    ray_sup: float  # largest curvature seen on the ray pieces

    @property
    def samples(self):
        return list(zip(self.s.tolist(), self.kappa.tolist()))


def _stencil_derivatives(f, s, h):
    """First and second derivatives of f at s by 8th-order central differences."""
    pts = f(s[:, None] + h * _OFFSETS[None, :])  # (n, 9, dim)
    d1 = np.einsum("k,nkd->nd", _D1, pts) / h
    d2 = np.einsum("k,nkd->nd", _D2, pts) / h**2
    return d1, d2


def lorentz_curvature(c, c1, c2) -> np.ndarray:
    """Geodesic curvature on H^2 of a curve with hyperboloid position/velocity/acceleration."""
    tang = c2 + _linner(c2, c)[:, None] * c
    speed2 = _linner(c1, c1)
    a = tang - (_linner(tang, c1) / speed2)[:, None] * c1
    return np.sqrt(np.maximum(_linner(a, a), 0.0)) / speed2


def flat_curvature(c1, c2) -> np.ndarray:
    return np.abs(c1[:, 0] * c2[:, 1] - c1[:, 1] * c2[:, 0]) / np.hypot(c1[:, 0], c1[:, 1]) ** 3


def _fd_step(p: SmoothedProfile) -> float:
    return min(0.05 * p.r, 0.05 * p.R)


def curvature_profile(p: SmoothedProfile, flat: bool = False) -> CurvatureReport:
    """Sampled geodesic curvature of the arc in the hyperbolic metric.

    With ``flat=True`` the same samples are differentiated in the Euclidean
    metric of the chart instead; the arc then has curvature exactly 1/R.
    """
    if p.samples < MIN_SAMPLES:
        raise ConfigurationError(f"need at least {MIN_SAMPLES} samples, got {p.samples}")
    L = p.arc_euclidean_length
    s = np.linspace(0.0, L, p.samples)
    h = _fd_step(p)
    if flat:
        d1, d2 = _stencil_derivatives(p.arc_point, s, h)
        kappa = flat_curvature(d1, d2) if not p.degenerate else np.zeros_like(s)
    else:
        mapped = lambda q: exp_map(p.arc_point(q))
        c = exp_map(p.arc_point(s))
        d1, d2 = _stencil_derivatives(mapped, s, h)
        kappa = lorentz_curvature(c, d1, d2)
    ray_sup = _ray_curvature_sup(p, flat)
    return CurvatureReport(s=s, kappa=kappa, sup_curvature=float(np.max(kappa)),
                           arc_length=arc_hyperbolic_length(p), ray_sup=ray_sup)


def _ray_curvature_sup(p: SmoothedProfile, flat: bool) -> float:
    worst = 0.0
    n = max(p.samples // 4, MIN_SAMPLES)
    rho = np.linspace(p.r, p.r + p.ray_extent, n)
    h = 0.05 * max(p.r, 0.2)  # lines through the origin: the stencil may cross it safely
    for u in (p.ray1, p.ray2):
        f = lambda q, u=u: q[..., None] * u
        if flat:
            d1, d2 = _stencil_derivatives(f, rho, h)
            k = flat_curvature(d1, d2)
        else:
            c = exp_map(f(rho))
            d1, d2 = _stencil_derivatives(lambda q: exp_map(f(q)), rho, h)
            k = lorentz_curvature(c, d1, d2)
        worst = max(worst, float(np.max(k)))
    return worst


def hyperbolic_speed(z, v) -> np.ndarray:
    """|dX/ds| in the hyperbolic metric for coordinate position z and velocity v."""
    z = np.atleast_2d(z)
    v = np.atleast_2d(v)
    rho = np.hypot(z[:, 0], z[:, 1])
    safe = np.where(rho == 0, 1.0, rho)
    radial = np.where(rho == 0, np.hypot(v[:, 0], v[:, 1]), (z[:, 0] * v[:, 0] + z[:, 1] * v[:, 1]) / safe)
    tangential = np.where(rho == 0, 0.0, (z[:, 0] * v[:, 1] - z[:, 1] * v[:, 0]) / safe)
    return np.sqrt(radial**2 + (_sinhc(rho) * tangential) ** 2)


def arc_hyperbolic_length(p: SmoothedProfile) -> float:
    if p.degenerate:
        return 2.0 * p.r
    L = p.arc_euclidean_length
    f = lambda s: float(hyperbolic_speed(p.arc_point(s), p.arc_velocity(s))[0])
    val, _ = quad(f, 0.0, L, epsabs=1e-14, epsrel=1e-13, limit=200)
    return val


def decay_sweep(r: float, thetas, samples: int = 2001) -> list[tuple[float, float]]:
    thetas = list(thetas)
    if any(b <= a for a, b in zip(thetas, thetas[1:])):
        raise ConfigurationError("theta grid must be strictly increasing")
    return [(t, curvature_profile(build_profile(t, r, samples)).sup_curvature) for t in thetas]


@dataclass(frozen=True)
class LengthReport:
    arc_len: float
    corner_len: float
    strict: bool

    @property
    def ratio(self) -> float:
        return self.arc_len / self.corner_len


def length_decrease(p: SmoothedProfile) -> LengthReport:
    """Compare the arc with the corner path through the vertex (length 2r)."""
    arc = arc_hyperbolic_length(p)
    corner = 2.0 * p.r
    return LengthReport(arc_len=arc, corner_len=corner, strict=arc < corner)


# -- supporting geodesics of an eps-thickened wedge ---------------------------------

ORIGIN = np.array([0.0, 0.0, 1.0])
SAMPLE_RES = 1e-4
CONTACT_WINDOW = 1e-6


@dataclass(frozen=True)
class SupportResult:
    passed: bool
    p: HPoint
    dist_to_vertex: float
    witness: HPoint | None = None
    witness_ray: int | None = None
    """Index (1 or 2) of the ray whose eps-neighbourhood the geodesic enters."""


def _wedge_rays(theta):
    half = theta / 2.0
    v1 = np.array([math.cos(half), -math.sin(half), 0.0])
    v2 = np.array([math.cos(half), math.sin(half), 0.0])
    n1 = np.array([math.sin(half), math.cos(half), 0.0])  # normal to ray1, pointing toward ray2
    return v1, v2, n1


def boundary_position(eps: float, d: float) -> float:
    """Arclength along the eps-equidistant of ray1 at which the point sits at distance d from o."""
    if d < eps:
        raise DomainError(f"distance {d!r} is below eps={eps!r}")
    u = math.acosh(math.cosh(d) / math.cosh(eps))
    return u * math.cosh(eps)


def supporting_geodesic_check(theta: float, eps: float, s: float, convex_side: bool = True,
                              second_ray: bool = True) -> SupportResult:
    """Does the geodesic tangent to the eps-neighbourhood of ray1 at p avoid the rest of it?

    ``p`` is the point on the eps-equidistant curve of ray1 at arclength ``s``
    from the point above the vertex, on the side facing ray2 when
    ``convex_side`` is true.  The eps-neighbourhood of both rays is probed by
    sampling each ray at resolution 1e-4; a contact farther than 1e-6 from
    ``p`` is a failure and is returned as the witness.
    """
    if not 0.0 < theta < math.pi:
        raise DomainError(f"theta must lie in (0, pi), got {theta!r}")
    if not (eps > 0 and s >= 0):
        raise DomainError("need eps > 0 and s >= 0")
    v1, _, n1 = _wedge_rays(theta)
    sigma = 1.0 if convex_side else -1.0
    u = s / math.cosh(eps)
    # work in the frame where the foot of p on ray1 is the origin, ray1 runs along +x
    # and ray2 leaves to the +y side: p and the tangent geodesic then have O(1) coordinates
    ce, se = math.cosh(eps), math.sinh(eps)
    p_loc = np.array([0.0, sigma * se, ce])
    normal = np.array([0.0, sigma * ce, se])
    P = Hyperplane(normal)
    to_wedge = np.column_stack([v1, n1, ORIGIN]) @ boost(u)
    vertex = boost(-u) @ ORIGIN
    p_pt = HPoint(p_loc)
    d_po = dist(p_pt, HPoint(vertex))
    thresh = se * (1.0 - 1e-12)

    rays = [(1, 0.0)] + ([(2, theta)] if second_ray else [])
    best = None
    for idx, angle in rays:
        A = lorentz_inner(vertex, normal)
        B = lorentz_inner(boost(-u) @ np.array([math.cos(angle), math.sin(angle), 0.0]), normal)
        horizon = _sampling_horizon(A, B, eps, d_po)
        us = np.arange(0.0, horizon + SAMPLE_RES, SAMPLE_RES)
        pts = _ray_in_foot_frame(us, u, angle)
        g = pts[:, 0] * normal[0] + pts[:, 1] * normal[1] - pts[:, 2] * normal[2]
        hits = np.nonzero(np.abs(g) < thresh)[0]
        for j in hits[np.argsort(np.abs(g[hits]))]:
            w, _ = project_to_hyperplane(HPoint(pts[j]), P)
            if dist(w, p_pt) > CONTACT_WINDOW:
                if best is None or abs(g[j]) < best[0]:
                    best = (abs(g[j]), w, idx)
                break
    p_wedge = HPoint(to_wedge @ p_loc)
    if best is None:
        return SupportResult(True, p_wedge, d_po)
    return SupportResult(False, p_wedge, d_po, witness=HPoint(to_wedge @ best[1].coords), witness_ray=best[2])


def _ray_in_foot_frame(us, u, angle):
    """Points at distance ``us`` along the ray leaving the vertex at ``angle`` from ray1.

    Written so that points near the foot keep full relative accuracy even when
    the vertex is far away (no difference of two large hyperbolic functions).
    """
    k = 2.0 * math.sin(angle / 2.0) ** 2
    t = np.cosh(us - u) + k * math.sinh(u) * np.sinh(us)
    x = np.sinh(us - u) - k * np.sinh(us) * math.cosh(u)
    y = np.sinh(us) * math.sin(angle)
    return np.stack([x, y, t], axis=-1)


def _sampling_horizon(A: float, B: float, eps: float, d_po: float) -> float:
    # g(u) = A cosh u + B sinh u; beyond the horizon |g| is monotone and above 2 sinh(eps)
    base = d_po + 2.0
    S = A + B
    if abs(S) < 1e-14:
        return max(base, 30.0)
    need = math.log(max(4.0 * (abs(A - B) + math.sinh(eps)) / abs(S), 1.0)) + 1.0
    return min(max(base, need), 40.0)


def wedge_width_numeric(theta: float) -> float:
    """Distance from the vertex to the geodesic joining the rays' ideal endpoints."""
    if not 0.0 < theta < math.pi:
        raise DomainError(f"theta must lie in (0, pi), got {theta!r}")
    v1, v2, _ = _wedge_rays(theta)
    xi1, xi2 = ORIGIN + v1, ORIGIN + v2
    normal = np.cross(xi1, xi2) * np.array([1.0, 1.0, -1.0])
    line = Hyperplane.from_normal(normal)
    foot, _ = project_to_hyperplane(HPoint(ORIGIN), line)
    return dist(HPoint(ORIGIN), foot)


def tangency_point_distance(theta: float, eps: float) -> float:
    """Convenience re-export: the critical distance beyond which support must hold."""
    return tangency_radius(theta, eps)
