"""Closed-form hyperbolic trigonometry used by the bend-and-smooth construction.

All angles are in radians and all lengths are hyperbolic lengths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import BracketError, ConfigurationError, DomainError

# Area of the unit sphere S^{n-1} bounding the n-dimensional ball.
SPHERE_AREA = {
    1: 2.0,
    2: 2.0 * math.pi,
    3: 4.0 * math.pi,
    4: 2.0 * math.pi**2,
    5: 8.0 * math.pi**2 / 3.0,
    6: math.pi**3,
    7: 16.0 * math.pi**3 / 15.0,
    8: math.pi**4 / 3.0,
}
MAX_DIM = max(SPHERE_AREA)


@dataclass(frozen=True)
class TubeQuery:
    n: int
    A: float

    def __post_init__(self):
        if not isinstance(self.n, int) or not 2 <= self.n <= MAX_DIM:
            raise ConfigurationError(f"tube dimension must be an integer in [2, {MAX_DIM}], got {self.n!r}")
        if not self.A > 0 or not math.isfinite(self.A):
            raise DomainError(f"area must be positive and finite, got {self.A!r}")


@dataclass(frozen=True)
class WedgeParams:
    theta: float
    eps: float
    r: float

    def __post_init__(self):
        _check_angle(self.theta)
        if not (self.eps > 0 and self.r > 0):
            raise DomainError(f"eps and r must be positive, got eps={self.eps!r}, r={self.r!r}")


def _check_angle(theta: float) -> None:
    if not 0.0 < theta < math.pi:
        raise DomainError(f"angle must lie in (0, pi), got {theta!r}")


def inversion_r(x: float) -> float:
    """r(x) = log coth(x/2), written as log1p(2 / expm1(x)) for accuracy at both ends."""
    if not x > 0:
        raise DomainError(f"inversion_r needs x > 0, got {x!r}")
    if x > 700.0:
        val = 2.0 * math.exp(-x)
        if val == 0.0:
            raise DomainError(f"r({x!r}) underflows to zero in double precision")
        return val
    return math.log1p(2.0 / math.expm1(x))


def _sinh_power_series(k: int, rho: float, terms: int = 30) -> float:
    # integral_0^rho t^k (sinh t / t)^k dt, expanding (sinh t / t)^k in powers of t^2
    base = [1.0 / math.factorial(2 * j + 1) for j in range(terms)]
    coeffs = [1.0] + [0.0] * (terms - 1)
    for _ in range(k):
        coeffs = [sum(coeffs[i] * base[j - i] for i in range(j + 1)) for j in range(terms)]
    return sum(c * rho ** (k + 2 * j + 1) / (k + 2 * j + 1) for j, c in enumerate(coeffs))


def _sinh_power_integral(k: int, rho: float) -> float:
    """integral_0^rho sinh^k(t) dt."""
    if k == 0:
        return rho
    if k == 1:
        return 2.0 * math.sinh(rho / 2.0) ** 2
    if rho < 1.0:
        return _sinh_power_series(k, rho)
    s, c = math.sinh(rho), math.cosh(rho)
    return s ** (k - 1) * c / k - (k - 1) / k * _sinh_power_integral(k - 2, rho)


def ball_volume(n: int, rho: float) -> float:
    """Volume of the hyperbolic ball of radius ``rho`` in H^n."""
    if not isinstance(n, int) or n not in SPHERE_AREA:
        raise ConfigurationError(f"ball_volume supports n in [1, {MAX_DIM}], got {n!r}")
    if rho < 0:
        raise DomainError(f"radius must be nonnegative, got {rho!r}")
    return SPHERE_AREA[n] * _sinh_power_integral(n - 1, rho)


def tube_width(q: TubeQuery | int, A: float | None = None, rel_tol: float = 1e-12) -> float:
    """Tube width c with ``ball_volume(n, inversion_r(2c)) == A``.

    Accepts either a :class:`TubeQuery` or ``(n, A)``.
    """
    if not isinstance(q, TubeQuery):
        q = TubeQuery(q, A)
    n, A = q.n, q.A

    def g(x):
        return ball_volume(n, inversion_r(x)) - A

    lo, hi = 1e-3, 1.0
    while g(lo) < 0:
        lo /= 16.0
        if lo < 1e-300:
            raise BracketError(f"cannot bracket tube width from below for n={n}, A={A!r}")
    while g(hi) > 0:
        hi *= 2.0
        if hi > 1e3:
            raise BracketError(f"cannot bracket tube width from above for n={n}, A={A!r}")
    for _ in range(2000):
        mid = 0.5 * (lo + hi)
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= rel_tol * hi:
            break
    return 0.25 * (lo + hi)


def tangency_radius(theta: float, eps: float) -> float:
    """Distance from the bending locus beyond which supporting planes stay clear of the wedge."""
    _check_angle(theta)
    if not eps > 0:
        raise DomainError(f"eps must be positive, got {eps!r}")
    cot = 1.0 / math.tan(theta / 2.0)
    coth = 1.0 / math.tanh(eps)
    return math.acosh(math.cosh(eps) * math.sqrt(1.0 + (cot * coth) ** 2))


def lambert_leg(theta: float, eps: float) -> float:
    """Leg |oq| of the Lambert quadrilateral with acute angle theta/2 and opposite side eps."""
    _check_angle(theta)
    if not eps > 0:
        raise DomainError(f"eps must be positive, got {eps!r}")
    return math.asinh(1.0 / (math.tan(theta / 2.0) * math.tanh(eps)))


def right_triangle_hypotenuse(a: float, b: float) -> float:
    return math.acosh(math.cosh(a) * math.cosh(b))


def hull_width(theta: float, eps: float) -> float:
    """Width w of the convex hull of the eps-thickened wedge: cosh w = cosh eps / sin(theta/2)."""
    _check_angle(theta)
    if eps < 0:
        raise DomainError(f"eps must be nonnegative, got {eps!r}")
    s = math.sin(theta / 2.0)
    # cosh w - 1 = (cosh eps - sin(theta/2)) / sin(theta/2), both pieces evaluated without cancellation
    excess = (2.0 * math.sinh(eps / 2.0) ** 2 + 2.0 * math.sin((math.pi - theta) / 4.0) ** 2) / s
    if excess < 0:
        raise DomainError("arccosh argument below 1")
    return 2.0 * math.asinh(math.sqrt(excess / 2.0))


def smoothing_radius(r: float, theta: float) -> float:
    """Euclidean radius r tan(theta/2) of the circle tangent to both rays at distance r."""
    _check_angle(theta)
    if not r > 0:
        raise DomainError(f"r must be positive, got {r!r}")
    return r * math.tan(theta / 2.0)
