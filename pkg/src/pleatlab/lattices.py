"""Integral orthogonal groups of admissible quadratic forms over Q(sqrt d).

Forms are symmetric matrices of :class:`QuadElem`.  A form is admissible when
its real evaluation has signature (n, 1) and its Galois conjugate is positive
definite.  For diagonal admissible forms in at most three variables the group
of integral, cone-preserving isometries can be enumerated up to a height bound.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import ConfigurationError, DomainError, GeometryError, InconclusiveError
from .hyperboloid import Hyperplane, hyperplane_angle
from .quadfield import QuadElem, RingBasis, ring_basis

MAX_ENUM_DIM = 3
MAX_ENUM_HEIGHT = 4
MAX_ANGLE_HEIGHT = 2
CONE_MARGIN = 1e-9


def _elem(v, basis: RingBasis) -> QuadElem:
    if isinstance(v, QuadElem):
        if v.basis != basis:
            raise GeometryError(f"entry lives in Q(sqrt {v.d}), expected d={basis.d}")
        return v
    if isinstance(v, (tuple, list)) and len(v) == 2:
        return QuadElem(v[0], v[1], basis)
    return QuadElem(v, 0, basis)


def _matrix(rows, basis) -> tuple:
    return tuple(tuple(_elem(v, basis) for v in row) for row in rows)


@dataclass(frozen=True)
class QuadForm:
    """Symmetric form over Q(sqrt d), stored as a tuple-of-rows of QuadElem."""

    F: tuple
    d: int

    def __init__(self, rows, d: int):
        basis = ring_basis(d)
        F = _matrix(rows, basis)
        n = len(F)
        if n == 0 or any(len(r) != n for r in F):
            raise GeometryError("form matrix must be square and nonempty")
        for i in range(n):
            for j in range(i):
                if F[i][j] != F[j][i]:
                    raise GeometryError(f"form matrix is not symmetric at ({i}, {j})")
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "d", d)

    @classmethod
    def diagonal(cls, entries, d: int) -> "QuadForm":
        basis = ring_basis(d)
        n = len(entries)
        z = QuadElem(0, 0, basis)
        return cls([[_elem(entries[i], basis) if i == j else z for j in range(n)] for i in range(n)], d)

    @classmethod
    def standard(cls, n: int, d: int) -> "QuadForm":
        """diag(1, ..., 1, -sqrt d) in n + 1 variables."""
        basis = ring_basis(d)
        return cls.diagonal([1] * n + [-QuadElem.from_ab(0, 1, basis)], d)

    @property
    def basis(self) -> RingBasis:
        return self.F[0][0].basis

    @property
    def size(self) -> int:
        return len(self.F)

    def is_diagonal(self) -> bool:
        return all(self.F[i][j].is_zero() for i in range(self.size) for j in range(self.size) if i != j)

    def diag(self) -> tuple:
        return tuple(self.F[i][i] for i in range(self.size))

    def bilinear(self, u, v) -> QuadElem:
        b = self.basis
        u = [_elem(x, b) for x in u]
        v = [_elem(x, b) for x in v]
        out = QuadElem(0, 0, b)
        for i in range(self.size):
            for j in range(self.size):
                if not self.F[i][j].is_zero():
                    out = out + u[i] * self.F[i][j] * v[j]
        return out

    def value(self, v) -> QuadElem:
        return self.bilinear(v, v)

    def conjugate(self) -> "QuadForm":
        return QuadForm([[x.conj() for x in row] for row in self.F], self.d)

    def numeric(self, sigma: int = 1) -> np.ndarray:
        return np.array([[x.embed(sigma) for x in row] for row in self.F])


def signature(F: QuadForm, sigma: int = 1) -> tuple[int, int]:
    """(positive, negative) index of F under the embedding sqrt d -> sigma sqrt d.

    Exact symmetric elimination over the field; every pivot sign is decided by
    exact comparison, never by floating point.
    """
    A = [list(row) for row in F.F]
    n = len(A)
    pos = neg = 0
    for k in range(n):
        piv = next((i for i in range(k, n) if not A[i][i].is_zero()), None)
        if piv is None:
            pair = next(((i, j) for i in range(k, n) for j in range(i + 1, n) if not A[i][j].is_zero()), None)
            if pair is None:
                raise DomainError("quadratic form is degenerate")
            i, j = pair
            # row/col i += row/col j makes the (i, i) entry 2 a_ij != 0
            for c in range(n):
                A[i][c] = A[i][c] + A[j][c]
            for r in range(n):
                A[r][i] = A[r][i] + A[r][j]
            piv = i
        if piv != k:
            A[k], A[piv] = A[piv], A[k]
            for row in A:
                row[k], row[piv] = row[piv], row[k]
        p = A[k][k]
        s = p.sign() if sigma == 1 else p.conj_sign()
        if s > 0:
            pos += 1
        else:
            neg += 1
        inv = p.inverse()
        for i in range(k + 1, n):
            if A[i][k].is_zero():
                continue
            f = A[i][k] * inv
            for j in range(k, n):
                A[i][j] = A[i][j] - f * A[k][j]
    return pos, neg


def is_admissible(F: QuadForm) -> bool:
    """Negative index 1 under the identity embedding and positive definite Galois conjugate."""
    n = F.size
    return signature(F, 1) == (n - 1, 1) and signature(F, -1) == (n, 0)


def _matmul(A, B, basis) -> tuple:
    n, m, k = len(A), len(B[0]), len(B)
    z = QuadElem(0, 0, basis)
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = z
            for t in range(k):
                if not A[i][t].is_zero() and not B[t][j].is_zero():
                    acc = acc + A[i][t] * B[t][j]
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def _transpose(A) -> tuple:
    return tuple(zip(*A))


def preserves_form(T, F: QuadForm) -> bool:
    """Exact test of T^t F T == F."""
    basis = F.basis
    T = T.T if isinstance(T, LatticeElement) else _matrix(T, basis)
    if len(T) != F.size or any(len(r) != F.size for r in T):
        raise GeometryError("matrix and form have different sizes")
    return _matmul(_matmul(_transpose(T), F.F, basis), T, basis) == F.F


def _timelike_test_vector(F: QuadForm) -> np.ndarray:
    Fn = F.numeric(1)
    w, V = np.linalg.eigh(Fn)
    if w[0] >= 0:
        raise DomainError("form has no timelike directions")
    return V[:, 0]


def preserves_cone_components(T, F: QuadForm) -> bool:
    """True iff T maps the negative cone component of a test vector to itself.

    Two timelike vectors x, y are in the same component iff B(x, y) < 0.
    """
    basis = F.basis
    T = T.T if isinstance(T, LatticeElement) else _matrix(T, basis)
    Tn = np.array([[x.embed(1) for x in row] for row in T])
    Fn = F.numeric(1)
    t0 = _timelike_test_vector(F)
    b = float((Tn @ t0) @ Fn @ t0)
    scale = max(1.0, float(np.abs(Tn).max()))
    if abs(b) <= CONE_MARGIN * scale:
        raise InconclusiveError("test vector image lies within the margin of the cone boundary")
    return b < 0


@dataclass(frozen=True)
class LatticeElement:
    """Integral isometry T of a form, T^t F T = F, preserving both cone components."""

    T: tuple
    d: int = field(compare=False)

    @classmethod
    def make(cls, rows, F: QuadForm, check: bool = True) -> "LatticeElement":
        T = _matrix(rows, F.basis)
        if check:
            if not preserves_form(T, F):
                raise GeometryError("matrix does not preserve the form")
            if not preserves_cone_components(T, F):
                raise GeometryError("matrix swaps the cone components")
        return cls(T, F.d)

    @classmethod
    def identity(cls, F: QuadForm) -> "LatticeElement":
        n = F.size
        return cls.make([[1 if i == j else 0 for j in range(n)] for i in range(n)], F, check=False)

    @property
    def size(self) -> int:
        return len(self.T)

    def height(self) -> Fraction:
        return max(x.height() for row in self.T for x in row)

    def coords(self) -> list:
        """Nested list of integral-basis coordinate pairs."""
        return [[list(x.coords()) for x in row] for row in self.T]

    def numeric(self) -> np.ndarray:
        return np.array([[x.embed(1) for x in row] for row in self.T])

    def __matmul__(self, other: "LatticeElement") -> "LatticeElement":
        basis = self.T[0][0].basis
        return LatticeElement(_matmul(self.T, other.T, basis), self.d)

    def inverse(self, F: QuadForm) -> "LatticeElement":
        """F^-1 T^t F, exact."""
        basis = F.basis
        if not F.is_diagonal():
            raise ConfigurationError("exact inverse implemented for diagonal forms only")
        n = F.size
        z = QuadElem(0, 0, basis)
        Finv = tuple(tuple(F.F[i][i].inverse() if i == j else z for j in range(n)) for i in range(n))
        return LatticeElement(_matmul(_matmul(Finv, _transpose(self.T), basis), F.F, basis), self.d)


# ---- vectorized integral arithmetic on coordinate pairs ---------------------


def _pmul(ax, ay, bx, by, t, n):
    yy = ay * by
    return ax * bx + n * yy, ax * by + ay * bx + t * yy


def _integral_pair(e: QuadElem) -> tuple[int, int]:
    if not e.is_integral():
        raise ConfigurationError("enumeration needs form entries in the ring of integers")
    return int(e.x), int(e.y)


def coordinate_vectors(size: int, H: int) -> np.ndarray:
    """All integral vectors with coordinates in [-H, H]; shape (N, size, 2), lexicographic order."""
    rng = np.arange(-H, H + 1, dtype=np.int64)
    grid = np.array(list(itertools.product(rng, repeat=2 * size)), dtype=np.int64)
    return grid.reshape(-1, size, 2)


def _form_values(V: np.ndarray, diag, basis: RingBasis):
    """f(v) for diagonal f as integer coordinate pairs."""
    t, n = basis.trace, basis.norm_const
    fx = np.zeros(V.shape[0], dtype=np.int64)
    fy = np.zeros(V.shape[0], dtype=np.int64)
    for i, (p, q) in enumerate(diag):
        sx, sy = _pmul(V[:, i, 0], V[:, i, 1], V[:, i, 0], V[:, i, 1], t, n)
        gx, gy = _pmul(sx, sy, p, q, t, n)
        fx += gx
        fy += gy
    return fx, fy


def _gram(A: np.ndarray, B: np.ndarray, diag, basis: RingBasis):
    """B_f(a, b) for all rows a of A, b of B, as integer coordinate-pair matrices."""
    t, n = basis.trace, basis.norm_const
    gx = np.zeros((A.shape[0], B.shape[0]), dtype=np.int64)
    gy = np.zeros_like(gx)
    for i, (p, q) in enumerate(diag):
        ax, ay = _pmul(A[:, i, 0], A[:, i, 1], p, q, t, n)
        px, py = _pmul(ax[:, None], ay[:, None], B[None, :, i, 0], B[None, :, i, 1], t, n)
        gx += px
        gy += py
    return gx, gy


@dataclass(frozen=True)
class _EnumTask:
    first: np.ndarray
    cands: tuple
    diag: tuple
    basis: RingBasis


def _complete_columns(task: _EnumTask) -> list:
    """All column tuples starting with a column from ``task.first``, pairwise orthogonal."""
    cols = (task.first,) + task.cands[1:]
    size = len(cols)
    # orth[i][j][a, b] is True iff B_f(cols[i][a], cols[j][b]) == 0
    orth = {}
    for i in range(size):
        for j in range(i + 1, size):
            gx, gy = _gram(cols[i], cols[j], task.diag, task.basis)
            orth[i, j] = (gx == 0) & (gy == 0)
    out = []

    def extend(chosen):
        k = len(chosen)
        if k == size:
            out.append(tuple(chosen))
            return
        ok = np.ones(cols[k].shape[0], dtype=bool)
        for i, a in enumerate(chosen):
            ok &= orth[i, k][a]
        for b in np.flatnonzero(ok):
            extend(chosen + [int(b)])

    for a in range(cols[0].shape[0]):
        extend([a])
    return [tuple(cols[c][idx].tolist() for c, idx in enumerate(choice)) for choice in out]


def column_candidates(F: QuadForm, H: int) -> list[np.ndarray]:
    """For each j, integral vectors of height <= H with f(v) = F_jj."""
    basis = F.basis
    diag = tuple(_integral_pair(e) for e in F.diag())
    V = coordinate_vectors(F.size, H)
    fx, fy = _form_values(V, diag, basis)
    return [V[(fx == p) & (fy == q)] for p, q in diag]


def _check_enum_args(F: QuadForm, H: int) -> None:
    if not F.is_diagonal():
        raise ConfigurationError("enumeration supports diagonal forms only")
    if F.size > MAX_ENUM_DIM:
        raise ConfigurationError(f"enumeration supports at most {MAX_ENUM_DIM} variables, got {F.size}")
    if not isinstance(H, (int, np.integer)) or not 1 <= H <= MAX_ENUM_HEIGHT:
        raise ConfigurationError(f"height must be an integer in [1, {MAX_ENUM_HEIGHT}], got {H!r}")
    if not is_admissible(F):
        raise DomainError("form is not admissible")


def enumerate_elements(F: QuadForm, H: int, jobs: int = 1) -> set[LatticeElement]:
    """Every cone-preserving integral T of height <= H with T^t F T = F."""
    _check_enum_args(F, H)
    basis = F.basis
    diag = tuple(_integral_pair(e) for e in F.diag())
    cands = tuple(column_candidates(F, H))
    chunks = [c for c in np.array_split(cands[0], max(1, jobs)) if c.shape[0]]
    tasks = [_EnumTask(c, cands, diag, basis) for c in chunks]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_complete_columns, tasks))
    else:
        results = [_complete_columns(t) for t in tasks]
    out = set()
    for res in results:
        for columns in res:
            rows = [[tuple(columns[j][i]) for j in range(F.size)] for i in range(F.size)]
            T = _matrix(rows, basis)
            # exact re-verification; the integer pruning is only a filter
            if preserves_form(T, F) and preserves_cone_components(T, F):
                out.add(LatticeElement(T, F.d))
    return out


@dataclass(frozen=True)
class ClosureReport:
    size: int
    inverse_checked: int
    inverse_missing: int
    products_checked: int
    products_missing: int

    @property
    def closed(self) -> bool:
        return self.inverse_missing == 0 and self.products_missing == 0

    def as_dict(self) -> dict:
        return {
            "size": self.size,
            "inverse_checked": self.inverse_checked,
            "inverse_missing": self.inverse_missing,
            "products_checked": self.products_checked,
            "products_missing": self.products_missing,
            "closed": self.closed,
        }


def closure_report(elements, F: QuadForm, H: int, max_products: int = 250_000) -> ClosureReport:
    """Check closure under inverses and under products that stay within height H.

    Products are checked for all pairs when there are at most ``max_products``
    of them, otherwise for a deterministic prefix in sorted order.
    """
    elems = sorted(elements, key=lambda e: str(e.coords()))
    S = set(elems)
    inv_checked = inv_missing = 0
    for e in elems:
        g = e.inverse(F)
        if g.height() <= H:
            inv_checked += 1
            inv_missing += g not in S
    prod_checked = prod_missing = 0
    for k, (a, b) in enumerate(itertools.product(elems, repeat=2)):
        if k >= max_products:
            break
        g = a @ b
        if g.height() <= H:
            prod_checked += 1
            prod_missing += g not in S
    return ClosureReport(len(elems), inv_checked, inv_missing, prod_checked, prod_missing)


def conjugating_matrix(F: QuadForm) -> np.ndarray:
    """M = diag(|F_ii|^(-1/2)) with M F M = diag(1, ..., 1, -1); negative entry must be last."""
    if not F.is_diagonal():
        raise ConfigurationError("conjugation implemented for diagonal forms only")
    vals = np.array([e.embed(1) for e in F.diag()])
    if not (np.all(vals[:-1] > 0) and vals[-1] < 0):
        raise ConfigurationError("diagonal form must have its single negative entry last")
    return np.diag(1.0 / np.sqrt(np.abs(vals)))


def conjugate_to_lorentz(T, F: QuadForm) -> np.ndarray:
    """G = M^-1 T M, an element of O(n, 1) for the standard form diag(1, ..., 1, -1)."""
    M = conjugating_matrix(F)
    Tn = T.numeric() if isinstance(T, LatticeElement) else np.array(
        [[_elem(x, F.basis).embed(1) for x in row] for row in T])
    Minv = np.diag(1.0 / np.diag(M))
    return Minv @ Tn @ M


def rational_hyperplane(e, F: QuadForm) -> Hyperplane:
    """Hyperplane with normal M^-1 e in the standard model, for f(e) > 0."""
    basis = F.basis
    e = [_elem(x, basis) for x in e]
    if F.value(e).sign() <= 0:
        raise DomainError("normal vector must have f(e) > 0")
    M = conjugating_matrix(F)
    return Hyperplane.from_normal(np.array([x.embed(1) for x in e]) / np.diag(M))


@dataclass(frozen=True)
class AnglePair:
    e1: tuple
    e2: tuple
    angle: float

    def coords(self) -> dict:
        return {
            "e1": [list(x.coords()) for x in self.e1],
            "e2": [list(x.coords()) for x in self.e2],
            "angle": self.angle,
        }


@dataclass(frozen=True)
class AngleSearchResult:
    pairs: tuple
    bin_edges: np.ndarray = field(compare=False)
    counts: np.ndarray = field(compare=False)
    planes: int = 0
    intersecting: int = 0

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)


def exact_angle(e1, e2, F: QuadForm) -> float | None:
    """Intersection angle arccos(B / sqrt(f f)) in (0, pi), None when the planes do not cross.

    B^2 < f(e1) f(e2) is decided exactly.
    """
    B = F.bilinear(e1, e2)
    f1, f2 = F.value(e1), F.value(e2)
    if (f1 * f2 - B * B).sign() <= 0:
        return None
    c = B.embed(1) / math.sqrt(f1.embed(1) * f2.embed(1))
    return math.acos(max(-1.0, min(1.0, c)))


def _primitive_normals(F: QuadForm, H: int) -> list:
    """Spacelike integral vectors of height <= H, one per hyperplane, lowest height first."""
    basis = F.basis
    if not F.is_diagonal():
        raise ConfigurationError("angle search implemented for diagonal forms only")
    diag = tuple(_integral_pair(e) for e in F.diag())
    V = coordinate_vectors(F.size, H)
    height = np.abs(V).reshape(V.shape[0], -1).max(axis=1)
    flat = V.reshape(V.shape[0], -1)
    nz = flat != 0
    first = flat[np.arange(flat.shape[0]), np.argmax(nz, axis=1)]
    w = basis.omega_real
    wc = basis.trace - w
    # size over both real embeddings, so that units like 1 - sqrt 2 do not look small
    size = np.sum((V[:, :, 0] + w * V[:, :, 1]) ** 2 + (V[:, :, 0] + wc * V[:, :, 1]) ** 2, axis=1)
    # lowest height, then smallest size, then positive leading coordinate
    order = np.lexsort((np.arange(V.shape[0]), first < 0, np.round(size, 9), height))
    V = V[order]
    fx, fy = _form_values(V, diag, basis)
    out = []
    seen = set()
    M = conjugating_matrix(F)
    for v, x, y in zip(V, fx, fy):
        if QuadElem(int(x), int(y), basis).sign() <= 0:
            continue
        u = (v[:, 0] + v[:, 1] * w) / np.diag(M)
        u = u / math.sqrt(abs(u[:-1] @ u[:-1] - u[-1] ** 2))
        j = int(np.argmax(np.abs(u) > 1e-9))
        if u[j] < 0:
            u = -u
        key = tuple(np.round(u, 9) + 0.0)
        if key in seen:
            continue
        seen.add(key)
        out.append(tuple(QuadElem(int(a), int(b), basis) for a, b in v))
    return out


def angle_search(F: QuadForm, H: int, interval: tuple[float, float], bins: int = 36) -> AngleSearchResult:
    """All pairs of rational hyperplanes of height <= H crossing at an angle in ``interval``.

    Two crossing hyperplanes make angles a and pi - a; a pair is reported with
    whichever of the two lies in the interval.
    """
    lo, hi = interval
    if not 0.0 <= lo < hi <= math.pi:
        raise ConfigurationError(f"interval must be a nonempty subinterval of (0, pi), got {interval!r}")
    if not isinstance(H, (int, np.integer)) or not 1 <= H <= MAX_ANGLE_HEIGHT:
        raise ConfigurationError(f"angle search height must be an integer in [1, {MAX_ANGLE_HEIGHT}], got {H!r}")
    normals = _primitive_normals(F, H)
    E = np.array([[x.embed(1) for x in e] for e in normals])
    Fn = F.numeric(1)
    G = E @ Fn @ E.T
    f = np.diag(G).copy()
    C = G / np.sqrt(np.outer(f, f))
    iu, ju = np.triu_indices(len(normals), k=1)
    c = C[iu, ju]
    # numeric screen with slack; pairs near |c| = 1 are decided exactly below
    cand = np.abs(c) < 1.0 + 1e-9
    angles = np.arccos(np.clip(c[cand], -1.0, 1.0))
    counts, edges = np.histogram(angles, bins=bins, range=(0.0, math.pi))
    pairs = []
    pad = 1e-9
    hit = cand.copy()
    hit[cand] = ((angles > lo - pad) & (angles < hi + pad)) | ((math.pi - angles > lo - pad) & (math.pi - angles < hi + pad))
    for i, j, cij in zip(iu[hit], ju[hit], c[hit]):
        if abs(cij) > 1.0 - 1e-6 and exact_angle(normals[i], normals[j], F) is None:
            continue
        a = math.acos(max(-1.0, min(1.0, float(cij))))
        for val in (a, math.pi - a):
            if lo < val < hi:
                pairs.append(AnglePair(normals[i], normals[j], val))
                break
    pairs.sort(key=lambda p: (p.angle, str(p.coords())))
    return AngleSearchResult(tuple(pairs), edges, counts, planes=len(normals), intersecting=int(cand.sum()))


def check_angle_agreement(e1, e2, F: QuadForm) -> float:
    """|exact angle - hyperplane_angle of the conjugated normals|, folded to (0, pi/2]."""
    a = exact_angle(e1, e2, F)
    if a is None:
        raise DomainError("hyperplanes do not cross")
    g = hyperplane_angle(rational_hyperplane(e1, F), rational_hyperplane(e2, F)).angle
    return abs(min(a, math.pi - a) - g)
