"""Unit-speed curves of prescribed geodesic curvature on H^2.

A curve b(t) on the hyperboloid with unit speed and signed geodesic
curvature kappa(t) satisfies

    b'' = <b', b'> b + kappa(t) n(b, b'),      n = J (b x b'),

where ``n`` is the tangent vector obtained by turning b' through +pi/2.
Integration is classical RK4 followed by projection of (b, b') back onto
``<b,b> = -1, <b,b'> = 0, <b',b'> = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigurationError, GeometryError, IntegrationError
from .hyperboloid import HPoint, TangentVector, dist

DRIFT_LIMIT = 1e-6


@dataclass(frozen=True)
class CurvatureProfile:
    """Signed curvature as a function of arclength, with a declared bound."""

    kappa: Callable[[float], float]
    bound: float

    @classmethod
    def constant(cls, k: float) -> "CurvatureProfile":
        return cls(_Constant(k), abs(k))

    def __call__(self, t: float) -> float:
        return self.kappa(t)


# module-level callables so profiles survive pickling into worker processes
@dataclass(frozen=True)
class _Constant:
    k: float

    def __call__(self, t):
        return self.k


@dataclass(frozen=True)
class SineCurvature:
    k: float

    def __call__(self, t):
        return self.k * math.sin(t)


@dataclass(frozen=True)
class BlockCurvature:
    """+k and -k alternating on blocks of length ``period``."""

    k: float
    period: float

    def __call__(self, t):
        return self.k if int(math.floor(t / self.period)) % 2 == 0 else -self.k


@dataclass(frozen=True)
class IntegratorConfig:
    h: float = 1e-3
    order: int = 4
    project: bool = True

    def __post_init__(self):
        if not 0.0 < self.h <= 0.01:
            raise ConfigurationError(f"step h must lie in (0, 0.01], got {self.h!r}")
        if self.order != 4:
            raise ConfigurationError("only the order-4 integrator is implemented")


@dataclass(frozen=True, eq=False)
class SampledCurve:
    h: float
    t: np.ndarray
    points: np.ndarray
    tangents: np.ndarray
    max_drift: float = field(default=0.0)

    def __len__(self):
        return self.t.size

    def point(self, i: int) -> HPoint:
        return HPoint(self.points[i])

    def tangent(self, i: int) -> TangentVector:
        return TangentVector(HPoint(self.points[i]), self.tangents[i])


def integrate_curve(p0: HPoint, v0, profile: CurvatureProfile | Callable, T: float,
                    cfg: IntegratorConfig | None = None) -> SampledCurve:
    """Integrate the unit-speed curve with curvature ``profile`` from ``(p0, v0)`` over [0, T]."""
    cfg = cfg or IntegratorConfig()
    if not isinstance(profile, CurvatureProfile):
        profile = CurvatureProfile(profile, math.inf)
    if p0.dim != 2:
        raise GeometryError("curve integration is restricted to H^2")
    tv = v0 if isinstance(v0, TangentVector) else TangentVector(p0, v0)
    if not tv.is_unit():
        raise GeometryError("initial velocity must be a unit tangent vector")
    if T < 0:
        raise ConfigurationError(f"T must be nonnegative, got {T!r}")

    n = max(1, math.ceil(T / cfg.h - 1e-9)) if T > 0 else 0
    h = T / n if n else cfg.h
    ts = np.arange(n + 1) * h
    P = np.empty((n + 1, 3))
    V = np.empty((n + 1, 3))
    b0, b1, b2 = (float(x) for x in p0.coords)
    w = tv.unit().dir
    v0_, v1, v2 = (float(x) for x in w)
    P[0] = (b0, b1, b2)
    V[0] = (v0_, v1, v2)
    kappa = profile.kappa
    bound = profile.bound
    worst = 0.0
    sqrt = math.sqrt

    # scalar arithmetic: numpy overhead on 3-vectors dominates otherwise
    def acc(x0, x1, x2, y0, y1, y2, k):
        s = y0 * y0 + y1 * y1 - y2 * y2
        return (s * x0 + k * (x1 * y2 - x2 * y1),
                s * x1 + k * (x2 * y0 - x0 * y2),
                s * x2 - k * (x0 * y1 - x1 * y0))

    for i in range(n):
        t = ts[i]
        k1 = kappa(t)
        k2 = kappa(t + 0.5 * h)
        k4 = kappa(t + h)
        if max(abs(k1), abs(k2), abs(k4)) > bound * (1 + 1e-12):
            raise ConfigurationError(f"curvature {max(abs(k1), abs(k2), abs(k4))!r} exceeds declared bound {bound!r}")
        hh = 0.5 * h
        a10, a11, a12 = acc(b0, b1, b2, v0_, v1, v2, k1)
        p20, p21, p22 = b0 + hh * v0_, b1 + hh * v1, b2 + hh * v2
        q20, q21, q22 = v0_ + hh * a10, v1 + hh * a11, v2 + hh * a12
        a20, a21, a22 = acc(p20, p21, p22, q20, q21, q22, k2)
        p30, p31, p32 = b0 + hh * q20, b1 + hh * q21, b2 + hh * q22
        q30, q31, q32 = v0_ + hh * a20, v1 + hh * a21, v2 + hh * a22
        a30, a31, a32 = acc(p30, p31, p32, q30, q31, q32, k2)
        p40, p41, p42 = b0 + h * q30, b1 + h * q31, b2 + h * q32
        q40, q41, q42 = v0_ + h * a30, v1 + h * a31, v2 + h * a32
        a40, a41, a42 = acc(p40, p41, p42, q40, q41, q42, k4)
        h6 = h / 6.0
        b0 += h6 * (v0_ + 2.0 * q20 + 2.0 * q30 + q40)
        b1 += h6 * (v1 + 2.0 * q21 + 2.0 * q31 + q41)
        b2 += h6 * (v2 + 2.0 * q22 + 2.0 * q32 + q42)
        v0_ += h6 * (a10 + 2.0 * a20 + 2.0 * a30 + a40)
        v1 += h6 * (a11 + 2.0 * a21 + 2.0 * a31 + a41)
        v2 += h6 * (a12 + 2.0 * a22 + 2.0 * a32 + a42)
        bb = b0 * b0 + b1 * b1 - b2 * b2
        bv = b0 * v0_ + b1 * v1 - b2 * v2
        vv = v0_ * v0_ + v1 * v1 - v2 * v2
        d = max(abs(bb + 1.0), abs(bv), abs(vv - 1.0))
        if not d <= DRIFT_LIMIT:
            raise IntegrationError(f"constraint drift {d!r} at t={t + h!r} exceeds {DRIFT_LIMIT}")
        if d > worst:
            worst = d
        if cfg.project:
            s = 1.0 / sqrt(-bb)
            b0, b1, b2 = b0 * s, b1 * s, b2 * s
            bv = b0 * v0_ + b1 * v1 - b2 * v2
            v0_, v1, v2 = v0_ + bv * b0, v1 + bv * b1, v2 + bv * b2
            s = 1.0 / sqrt(v0_ * v0_ + v1 * v1 - v2 * v2)
            v0_, v1, v2 = v0_ * s, v1 * s, v2 * s
        P[i + 1] = (b0, b1, b2)
        V[i + 1] = (v0_, v1, v2)
    return SampledCurve(h=h, t=ts, points=P, tangents=V, max_drift=worst)


def pairwise_dist(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Row-wise hyperbolic distance between two stacks of hyperboloid points."""
    D = A - B
    chord = D[:, 0] ** 2 + D[:, 1] ** 2 - D[:, 2] ** 2
    return 2.0 * np.arcsinh(np.sqrt(np.maximum(chord, 0.0)) / 2.0)


def geodesic_samples(p0: HPoint, v0, t: np.ndarray) -> np.ndarray:
    tv = v0 if isinstance(v0, TangentVector) else TangentVector(p0, v0)
    v = tv.unit().dir
    return np.cosh(t)[:, None] * p0.coords[None, :] + np.sinh(t)[:, None] * v[None, :]


def deviation_bound(k: float, t):
    """Upper bound k (cosh t - 1) on the drift of a k-curved curve from its tangent geodesic."""
    if k < 0:
        raise ConfigurationError(f"k must be nonnegative, got {k!r}")
    if np.ndim(t) == 0:
        if t < 0:
            raise ConfigurationError(f"t must be nonnegative, got {t!r}")
        return k * 2.0 * math.sinh(t / 2.0) ** 2
    return k * 2.0 * np.sinh(np.asarray(t) / 2.0) ** 2


REL_SLACK = 1e-5
ABS_SLACK = 1e-9


@dataclass(frozen=True)
class ComparisonReport:
    k: float
    T: float
    h: float
    max_ratio: float
    passed: bool
    worst_t: float


def _ratio_check(curve: SampledCurve, axis: np.ndarray, k: float):
    d = pairwise_dist(curve.points, axis)
    bound = deviation_bound(k, curve.t)
    ok = bool(np.all(d <= bound * (1.0 + REL_SLACK) + ABS_SLACK))
    mask = curve.t > 0
    if np.any(mask) and k > 0:
        ratios = d[mask] / bound[mask]
        j = int(np.argmax(ratios))
        return ok, float(ratios[j]), float(curve.t[mask][j])
    return ok, 0.0, 0.0


def verify_comparison(k: float, T: float, cfg: IntegratorConfig | None = None,
                      profile: CurvatureProfile | None = None) -> ComparisonReport:
    """Integrate a geodesic and a |kappa| <= k curve with equal initial data and test the bound.

    By default the curve has constant curvature ``k``; ``profile`` replaces it
    with any profile whose declared bound is at most ``k``.
    """
    cfg = cfg or IntegratorConfig()
    if not 0.0 < k < 1.0:
        raise ConfigurationError(f"k must lie in (0, 1), got {k!r}")
    if not 0.0 < T <= 6.0:
        raise ConfigurationError(f"T must lie in (0, 6], got {T!r}")
    if profile is None:
        profile = CurvatureProfile.constant(k)
    elif profile.bound > k:
        raise ConfigurationError(f"profile bound {profile.bound!r} exceeds k={k!r}")
    p0 = HPoint.origin(2)
    v0 = TangentVector(p0, [1.0, 0.0, 0.0])
    a = integrate_curve(p0, v0, CurvatureProfile.constant(0.0), T, cfg)
    b = integrate_curve(p0, v0, profile, T, cfg)
    ok, ratio, worst_t = _ratio_check(b, a.points, k)
    return ComparisonReport(k=k, T=T, h=b.h, max_ratio=ratio, passed=ok, worst_t=worst_t)


def cone_trap_check(curve: SampledCurve, k: float) -> bool:
    """True iff every sample stays within the comparison bound of the tangent geodesic at t=0."""
    axis = geodesic_samples(curve.point(0), curve.tangents[0], curve.t)
    ok, _, _ = _ratio_check(curve, axis, k)
    return ok


def max_geodesic_error(curve: SampledCurve) -> float:
    axis = geodesic_samples(curve.point(0), curve.tangents[0], curve.t)
    return float(np.max(pairwise_dist(curve.points, axis)))


def reverse_profile(profile: CurvatureProfile, T: float) -> CurvatureProfile:
    """Profile traversing the same curve backwards from its endpoint at time T."""
    return CurvatureProfile(_Reversed(profile.kappa, T), profile.bound)


@dataclass(frozen=True)
class _Reversed:
    kappa: Callable[[float], float]
    T: float

    def __call__(self, t):
        return -self.kappa(self.T - t)


def endpoint_distance(c1: SampledCurve, c2: SampledCurve) -> float:
    return dist(HPoint(c1.points[-1]), HPoint(c2.points[-1]))
