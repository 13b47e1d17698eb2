"""Hyperboloid-model primitives for H^m inside Minkowski space R^{m,1}.

Coordinates are ``(x_0, ..., x_{m-1}, x_m)`` with the time coordinate last,
so the bilinear form is ``<x, y> = sum_{i<m} x_i y_i - x_m y_m``.  Points of
H^m are the vectors with ``<x, x> = -1`` and ``x_m > 0``.

Every value type is immutable; constructors snap near-miss inputs back onto
their constraint set and reject anything further than ``REJECT_TOL`` away.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import GeometryError

REJECT_TOL = 1e-6
TANGENT_TOL = 1e-12
LIMIT_TOL = 1e-12


def _frozen(coords) -> np.ndarray:
    arr = np.array(coords, dtype=float)
    if arr.ndim != 1 or arr.size < 3:
        raise GeometryError(f"expected a vector with at least 3 entries, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise GeometryError("coordinates must be finite")
    arr.setflags(write=False)
    return arr


def _coords(x) -> np.ndarray:
    if isinstance(x, (HPoint, LorentzVector, Hyperplane, BoundaryPoint)):
        return x.coords
    return np.asarray(x, dtype=float)


def minkowski_matrix(dim: int) -> np.ndarray:
    """The Gram matrix J = diag(1, ..., 1, -1) of size ``dim``."""
    J = np.eye(dim)
    J[-1, -1] = -1.0
    return J


def lorentz_inner(x, y) -> float:
    """Minkowski pairing with the time coordinate last."""
    a, b = _coords(x), _coords(y)
    if a.shape != b.shape:
        raise GeometryError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(a[:-1] @ b[:-1] - a[-1] * b[-1])


def lorentz_norm_sq(x) -> float:
    return lorentz_inner(x, x)


@dataclass(frozen=True, eq=False)
class LorentzVector:
    coords: np.ndarray

    def __init__(self, coords):
        object.__setattr__(self, "coords", _frozen(coords))

    @property
    def dim(self) -> int:
        """Dimension m of the hyperbolic space this vector lives over."""
        return self.coords.size - 1

    @property
    def Q(self) -> float:
        return lorentz_norm_sq(self.coords)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coords, dtype=dtype)


@dataclass(frozen=True, eq=False)
class HPoint:
    """A point on the upper sheet of the hyperboloid."""

    coords: np.ndarray

    def __init__(self, coords):
        v = np.array(_coords(coords), dtype=float)
        q = float(v[:-1] @ v[:-1] - v[-1] ** 2)
        if not np.all(np.isfinite(v)) or v[-1] <= 0 or abs(q + 1.0) > REJECT_TOL * max(1.0, v[-1] ** 2):
            raise GeometryError(f"not a point of the upper hyperboloid sheet: Q={q!r}, coords={v!r}")
        if v[-1] < 1e5:
            v = v / math.sqrt(-q)
        else:
            # q itself has cancelled away out here; re-lift from the spatial part
            v[-1] = math.sqrt(1.0 + float(v[:-1] @ v[:-1]))
        object.__setattr__(self, "coords", _frozen(v))

    @classmethod
    def origin(cls, m: int = 2) -> "HPoint":
        v = np.zeros(m + 1)
        v[-1] = 1.0
        return cls(v)

    @classmethod
    def lift(cls, spatial) -> "HPoint":
        """Point whose first m coordinates are ``spatial``."""
        s = np.asarray(spatial, dtype=float)
        return cls(np.append(s, math.sqrt(1.0 + float(s @ s))))

    @property
    def dim(self) -> int:
        return self.coords.size - 1

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coords, dtype=dtype)

    def __repr__(self):
        return f"HPoint({self.coords.tolist()})"


@dataclass(frozen=True, eq=False)
class TangentVector:
    """A vector tangent to H^m at ``base`` (Lorentz-orthogonal to it)."""

    base: HPoint
    dir: np.ndarray

    def __init__(self, base: HPoint, direction):
        if not isinstance(base, HPoint):
            base = HPoint(base)
        d = np.array(_coords(direction), dtype=float)
        p = base.coords
        if d.shape != p.shape:
            raise GeometryError("tangent vector and base point differ in dimension")
        pairing = lorentz_inner(p, d)
        scale = max(1.0, float(np.max(np.abs(d))) * float(np.max(np.abs(p))))
        if abs(pairing) > REJECT_TOL * scale:
            raise GeometryError(f"direction is not tangent at base: <p, v> = {pairing!r}")
        d = d + pairing * p
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "dir", _frozen(d))

    @property
    def norm(self) -> float:
        return math.sqrt(max(lorentz_norm_sq(self.dir), 0.0))

    def unit(self) -> "TangentVector":
        n = self.norm
        if n == 0.0:
            raise GeometryError("zero tangent vector has no direction")
        return TangentVector(self.base, self.dir / n)

    def is_unit(self, tol: float = REJECT_TOL) -> bool:
        return abs(lorentz_norm_sq(self.dir) - 1.0) <= tol


@dataclass(frozen=True, eq=False)
class Hyperplane:
    """Totally geodesic hyperplane ``{x : <x, normal> = 0}``."""

    normal: np.ndarray

    def __init__(self, normal):
        u = np.array(_coords(normal), dtype=float)
        q = lorentz_norm_sq(u)
        if abs(q - 1.0) > REJECT_TOL:
            raise GeometryError(f"hyperplane normal must be unit spacelike, got Q={q!r}")
        object.__setattr__(self, "normal", _frozen(u / math.sqrt(q)))

    @classmethod
    def from_normal(cls, normal) -> "Hyperplane":
        """Scale an arbitrary spacelike vector to a unit normal."""
        u = np.array(_coords(normal), dtype=float)
        q = lorentz_norm_sq(u)
        if q <= 0:
            raise GeometryError(f"normal must be spacelike, got Q={q!r}")
        return cls(u / math.sqrt(q))

    @classmethod
    def through(cls, p: HPoint, v: TangentVector) -> "Hyperplane":
        """Geodesic of H^2 through ``p`` with direction ``v``."""
        if p.dim != 2:
            raise GeometryError("Hyperplane.through is only defined for H^2")
        return cls.from_normal(minkowski_matrix(3) @ np.cross(p.coords, v.dir))

    @property
    def coords(self) -> np.ndarray:
        return self.normal

    @property
    def dim(self) -> int:
        return self.normal.size - 1


@dataclass(frozen=True, eq=False)
class BoundaryPoint:
    """Ideal point, stored as the lightlike ray with last coordinate 1."""

    ray: np.ndarray

    def __init__(self, ray):
        r = np.array(_coords(ray), dtype=float)
        if r[-1] <= 0:
            raise GeometryError("boundary ray must point to the future (last coordinate > 0)")
        r = r / r[-1]
        if abs(lorentz_norm_sq(r)) > REJECT_TOL:
            raise GeometryError(f"boundary ray is not lightlike: Q={lorentz_norm_sq(r)!r}")
        spatial = r[:-1] / np.linalg.norm(r[:-1])
        object.__setattr__(self, "ray", _frozen(np.append(spatial, 1.0)))

    @classmethod
    def from_angle(cls, phi: float) -> "BoundaryPoint":
        return cls([math.cos(phi), math.sin(phi), 1.0])

    @property
    def coords(self) -> np.ndarray:
        return self.ray


def dist(p: HPoint, q: HPoint) -> float:
    """Hyperbolic distance; uses 2 asinh(|p - q| / 2) to stay accurate when p ~ q."""
    a, b = _coords(p), _coords(q)
    c = -lorentz_inner(a, b)
    # rounding in <p,q> grows like the product of the time coordinates
    if c < 1.0 - 1e-9 - 1e-14 * a[-1] * b[-1]:
        raise GeometryError(f"points are not on the same hyperboloid sheet: -<p,q> = {c!r}")
    diff = a - b
    chord_sq = max(lorentz_norm_sq(diff), 0.0)
    return 2.0 * math.asinh(math.sqrt(chord_sq) / 2.0)


def _require_unit_tangent(p: HPoint, v) -> np.ndarray:
    if isinstance(v, TangentVector):
        vv = v.dir
    else:
        vv = TangentVector(p, v).dir
    if abs(lorentz_inner(p.coords, vv)) > REJECT_TOL:
        raise GeometryError("tangent vector is not based at p")
    q = lorentz_norm_sq(vv)
    if abs(q - 1.0) > REJECT_TOL:
        raise GeometryError(f"geodesic direction must be a unit vector, got Q={q!r}")
    return vv / math.sqrt(q)


def geodesic_point(p: HPoint, v, t: float) -> HPoint:
    """Point at signed arclength ``t`` along the geodesic from ``p`` in direction ``v``."""
    vv = _require_unit_tangent(p, v)
    return HPoint(math.cosh(t) * p.coords + math.sinh(t) * vv)


def geodesic_tangent(p: HPoint, v, t: float) -> TangentVector:
    """Parallel transport of ``v`` to ``geodesic_point(p, v, t)``."""
    vv = _require_unit_tangent(p, v)
    q = geodesic_point(p, vv, t)
    return TangentVector(q, math.sinh(t) * p.coords + math.cosh(t) * vv)


class AngleKind(enum.Enum):
    INTERSECTING = "intersecting"
    COINCIDENT = "coincident"
    TANGENT = "tangent"
    NO_INTERSECTION = "no_intersection"


@dataclass(frozen=True)
class AngleResult:
    kind: AngleKind
    value: float
    """Angle in (0, pi/2] when intersecting, separation distance when disjoint, else 0."""

    @property
    def angle(self) -> float:
        if self.kind not in (AngleKind.INTERSECTING, AngleKind.COINCIDENT):
            raise GeometryError(f"hyperplanes do not meet at an angle ({self.kind.value})")
        return self.value


def hyperplane_angle(u1: Hyperplane, u2: Hyperplane) -> AngleResult:
    """Angle between two hyperplanes, or their separation when they are disjoint."""
    if not isinstance(u1, Hyperplane):
        u1 = Hyperplane(u1)
    if not isinstance(u2, Hyperplane):
        u2 = Hyperplane(u2)
    c = abs(lorentz_inner(u1.normal, u2.normal))
    if abs(c - 1.0) <= TANGENT_TOL:
        same = min(np.max(np.abs(u1.normal - u2.normal)), np.max(np.abs(u1.normal + u2.normal)))
        if same <= 1e-9:
            return AngleResult(AngleKind.COINCIDENT, 0.0)
        return AngleResult(AngleKind.TANGENT, 0.0)
    if c < 1.0:
        return AngleResult(AngleKind.INTERSECTING, math.acos(c))
    return AngleResult(AngleKind.NO_INTERSECTION, math.acosh(c))


def project_to_hyperplane(x: HPoint, u: Hyperplane) -> tuple[HPoint, float]:
    """Nearest-point projection onto ``u`` and the signed distance to it."""
    s = lorentz_inner(x.coords, u.normal)
    foot = (x.coords - s * u.normal) / math.sqrt(1.0 + s * s)
    return HPoint(foot), math.asinh(s)


def push_off(p: HPoint, u: Hyperplane, t: float) -> HPoint:
    """Move ``p`` on ``u`` a signed distance ``t`` along the normal geodesic."""
    pairing = lorentz_inner(p.coords, u.normal)
    if abs(pairing) > REJECT_TOL:
        raise GeometryError(f"point is not on the hyperplane: <p, u> = {pairing!r}")
    base = p.coords - pairing * u.normal
    base = base / math.sqrt(-lorentz_norm_sq(base))
    return HPoint(math.cosh(t) * base + math.sinh(t) * u.normal)


class Side(enum.Enum):
    SEPARATED = "separated"
    SAME_SIDE = "same_side"
    ON_LIMIT = "on_limit"


def separates(u: Hyperplane, b1: BoundaryPoint, b2: BoundaryPoint) -> Side:
    s1 = lorentz_inner(b1.ray, u.normal)
    s2 = lorentz_inner(b2.ray, u.normal)
    if abs(s1) <= LIMIT_TOL or abs(s2) <= LIMIT_TOL:
        return Side.ON_LIMIT
    return Side.SEPARATED if s1 * s2 < 0 else Side.SAME_SIDE


def is_lorentz(G, tol: float = 1e-9) -> bool:
    """True iff ``G^T J G = J`` entrywise to ``tol``."""
    G = np.asarray(G, dtype=float)
    J = minkowski_matrix(G.shape[0])
    return bool(np.max(np.abs(G.T @ J @ G - J)) <= tol)


def apply(G, obj):
    """Apply a Lorentz matrix to a point, hyperplane, boundary point or vector."""
    G = np.asarray(G, dtype=float)
    if isinstance(obj, HPoint):
        return HPoint(G @ obj.coords)
    if isinstance(obj, Hyperplane):
        return Hyperplane(G @ obj.normal)
    if isinstance(obj, BoundaryPoint):
        return BoundaryPoint(G @ obj.ray)
    if isinstance(obj, TangentVector):
        return TangentVector(HPoint(G @ obj.base.coords), G @ obj.dir)
    return LorentzVector(G @ _coords(obj))


def boost(t: float, axis: int = 0, m: int = 2) -> np.ndarray:
    """Hyperbolic translation by ``t`` along spatial ``axis``."""
    G = np.eye(m + 1)
    G[axis, axis] = G[m, m] = math.cosh(t)
    G[axis, m] = G[m, axis] = math.sinh(t)
    return G


def rotation(phi: float, m: int = 2, i: int = 0, j: int = 1) -> np.ndarray:
    G = np.eye(m + 1)
    c, s = math.cos(phi), math.sin(phi)
    G[i, i], G[i, j], G[j, i], G[j, j] = c, -s, s, c
    return G
