"""Finite wall systems of chords on the ideal circle and their dual cube complexes.

A wall is a chord with ideal endpoints (alpha, beta).  Side 0 is the open arc
running counterclockwise from alpha to beta, side 1 the complementary arc.
Vertices of the dual complex are orientations, stored as bitmasks whose bit i
is the side chosen for wall i.  A cube is the pair (mask, base): the walls in
``mask`` are flipped freely and all other bits are fixed to those of ``base``
(which has every bit of ``mask`` cleared).
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DomainError, GeometryError

TWO_PI = 2.0 * math.pi
ENDPOINT_TOL = 1e-12
SYMMETRY_TOL = 1e-9
MAX_WALLS = 20


def _circ_gap(a: float, b: float) -> float:
    g = (a - b) % TWO_PI
    return min(g, TWO_PI - g)


@dataclass(frozen=True)
class Wall:
    alpha: float
    beta: float

    def __post_init__(self):
        a, b = float(self.alpha) % TWO_PI, float(self.beta) % TWO_PI
        if _circ_gap(a, b) <= ENDPOINT_TOL:
            raise GeometryError(f"wall endpoints must be distinct, got {self.alpha!r}, {self.beta!r}")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    def side(self, x: float) -> int:
        """0 if x lies on the ccw arc from alpha to beta, else 1; endpoints rejected."""
        x = float(x) % TWO_PI
        if min(_circ_gap(x, self.alpha), _circ_gap(x, self.beta)) <= ENDPOINT_TOL:
            raise DomainError(f"point {x!r} coincides with a wall endpoint")
        return 0 if (x - self.alpha) % TWO_PI < (self.beta - self.alpha) % TWO_PI else 1

    def rotated(self, phi: float) -> "Wall":
        return Wall(self.alpha + phi, self.beta + phi)

    def same_chord(self, other: "Wall", tol: float = SYMMETRY_TOL) -> bool:
        a = _circ_gap(self.alpha, other.alpha) <= tol and _circ_gap(self.beta, other.beta) <= tol
        b = _circ_gap(self.alpha, other.beta) <= tol and _circ_gap(self.beta, other.alpha) <= tol
        return a or b


def crosses(w1: Wall, w2: Wall) -> bool:
    """True iff the endpoints of w2 lie on different arcs of w1."""
    for a in (w2.alpha, w2.beta):
        for b in (w1.alpha, w1.beta):
            if _circ_gap(a, b) <= ENDPOINT_TOL:
                raise GeometryError("walls share an endpoint (general position violated)")
    return w1.side(w2.alpha) != w1.side(w2.beta)


@dataclass(frozen=True)
class WallSystem:
    walls: tuple
    symmetry_N: int = 1

    def __init__(self, walls, symmetry_N: int = 1):
        ws = tuple(w if isinstance(w, Wall) else Wall(*w) for w in walls)
        ends = sorted(x for w in ws for x in (w.alpha, w.beta))
        for a, b in zip(ends, ends[1:] + ends[:1]):
            if len(ends) > 1 and _circ_gap(a, b) <= ENDPOINT_TOL:
                raise GeometryError("wall endpoints must be pairwise distinct (general position)")
        if not isinstance(symmetry_N, (int, np.integer)) or symmetry_N < 1:
            raise ConfigurationError(f"symmetry_N must be a positive integer, got {symmetry_N!r}")
        object.__setattr__(self, "walls", ws)
        object.__setattr__(self, "symmetry_N", int(symmetry_N))

    def __len__(self):
        return len(self.walls)

    def rotation_permutation(self, N: int | None = None) -> list[int]:
        """Index permutation induced by rotation through 2 pi / N."""
        N = self.symmetry_N if N is None else N
        phi = TWO_PI / N
        perm = []
        for w in self.walls:
            r = w.rotated(phi)
            j = next((j for j, u in enumerate(self.walls) if u.same_chord(r)), None)
            if j is None:
                raise DomainError(f"rotation by 2pi/{N} does not permute the walls")
            perm.append(j)
        if len(set(perm)) != len(perm):
            raise DomainError(f"rotation by 2pi/{N} does not permute the walls")
        return perm

    def rotated(self, phi: float) -> "WallSystem":
        return WallSystem([w.rotated(phi) for w in self.walls], self.symmetry_N)

    def compatibility(self) -> np.ndarray:
        """compat[i, j, s, t] is True iff side s of wall i meets side t of wall j."""
        k = len(self.walls)
        ends = sorted(x for w in self.walls for x in (w.alpha, w.beta))
        mids = [(a + ((b - a) % TWO_PI) / 2.0) % TWO_PI for a, b in zip(ends, ends[1:] + ends[:1])]
        sides = np.array([[w.side(m) for w in self.walls] for m in mids], dtype=np.int64).reshape(len(mids), k)
        compat = np.zeros((k, k, 2, 2), dtype=bool)
        for row in sides:
            compat[np.arange(k)[:, None], np.arange(k)[None, :], row[:, None], row[None, :]] = True
        return compat


# ---- dual complex -------------------------------------------------------------


@dataclass(frozen=True)
class CubeComplex:
    n_walls: int
    vertices: frozenset
    cubes: frozenset
    """All cubes of dimension >= 1 as (mask, base) pairs."""

    def dim_of(self, mask: int) -> int:
        return bin(mask).count("1")

    @property
    def edges(self) -> list:
        return sorted(c for c in self.cubes if self.dim_of(c[0]) == 1)

    def cubes_by_dim(self) -> list[int]:
        counts = [len(self.vertices)]
        for m, _ in self.cubes:
            k = self.dim_of(m)
            while len(counts) <= k:
                counts.append(0)
            counts[k] += 1
        return counts

    def has_cube(self, mask: int, base: int) -> bool:
        if mask == 0:
            return base in self.vertices
        return (mask, base & ~mask) in self.cubes

    def without(self, cubes) -> "CubeComplex":
        """Copy with the given cube records deleted (faces and cofaces untouched)."""
        drop = set(cubes)
        return CubeComplex(self.n_walls, self.vertices, frozenset(c for c in self.cubes if c not in drop))

    def neighbors(self, v: int) -> list[tuple[int, int]]:
        out = []
        for i in range(self.n_walls):
            b = 1 << i
            if self.has_cube(b, v):
                out.append((i, v ^ b))
        return out


def _extend_orientations(args):
    prefix, start, compat, k = args
    out = []
    chosen = list(prefix)

    def rec(i):
        if i == k:
            out.append(sum(s << j for j, s in enumerate(chosen)))
            return
        for s in (0, 1):
            if all(compat[j, i, chosen[j], s] for j in range(i)):
                chosen.append(s)
                rec(i + 1)
                chosen.pop()

    rec(start)
    return out


def consistent_orientations(ws: WallSystem, jobs: int = 1) -> list[int]:
    """All pairwise-consistent orientations, as sorted bitmasks.

    The search fixes the sides of the first ceil(k/2) walls and completes each
    consistent prefix independently.
    """
    k = len(ws)
    if k == 0:
        return [0]
    compat = ws.compatibility()
    split = (k + 1) // 2
    prefixes = [p for p in _extend_orientations(((), 0, compat, split))]
    tasks = [(tuple((p >> j) & 1 for j in range(split)), split, compat, k) for p in prefixes]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            parts = list(ex.map(_extend_orientations, tasks))
    else:
        parts = [_extend_orientations(t) for t in tasks]
    return sorted(v for part in parts for v in part)


def build_dual(ws: WallSystem, jobs: int = 1) -> CubeComplex:
    """Sageev dual cube complex of a finite wall system."""
    k = len(ws)
    if k > MAX_WALLS:
        raise ConfigurationError(f"at most {MAX_WALLS} walls supported, got {k}")
    V = frozenset(consistent_orientations(ws, jobs))
    cubes = set()
    for v in V:
        # cubes with v as the corner having every flipped bit cleared
        up = [i for i in range(k) if not (v >> i) & 1 and (v | (1 << i)) in V]

        def grow(mask, corners, start):
            for idx in range(start, len(up)):
                b = 1 << up[idx]
                new = [c | b for c in corners]
                if all(c in V for c in new):
                    m = mask | b
                    cubes.add((m, v))
                    grow(m, corners + new, idx + 1)

        grow(0, [v], 0)
    return CubeComplex(k, V, frozenset(cubes))


# ---- CAT(0) verification ------------------------------------------------------


@dataclass(frozen=True)
class Cat0Report:
    connected: bool
    simply_connected: bool | None
    """True when every fundamental cycle reduces by square moves, False when H_1 is
    nonzero, None (inconclusive) otherwise."""
    flag_links: bool
    missing_faces: int = 0
    unfilled_cliques: int = 0

    @property
    def ok(self) -> bool:
        return self.connected and self.simply_connected is True and self.flag_links

    def as_dict(self) -> dict:
        return {
            "connected": self.connected,
            "simply_connected": self.simply_connected,
            "flag_links": self.flag_links,
        }


def _is_connected(c: CubeComplex) -> bool:
    if not c.vertices:
        return False
    start = min(c.vertices)
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for _, u in c.neighbors(v):
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return len(seen) == len(c.vertices)


def _missing_faces(c: CubeComplex) -> int:
    missing = 0
    for mask, base in c.cubes:
        bits = [1 << i for i in range(c.n_walls) if mask >> i & 1]
        if len(bits) < 2:
            for b in bits:
                missing += base not in c.vertices or (base | b) not in c.vertices
            continue
        for b in bits:
            for side in (0, b):
                missing += not c.has_cube(mask & ~b, base | side)
    return missing


def _unfilled_cliques(c: CubeComplex) -> int:
    """Cliques in vertex links that do not span a cube."""
    bad = 0
    for v in c.vertices:
        dirs = [i for i, _ in c.neighbors(v)]
        adj = {i: {j for j in dirs if j != i and c.has_cube((1 << i) | (1 << j), v)} for i in dirs}

        def cliques(current, cand):
            nonlocal bad
            for idx, j in enumerate(cand):
                nxt = current + [j]
                if len(nxt) >= 3:
                    mask = sum(1 << x for x in nxt)
                    bad += not c.has_cube(mask, v)
                cliques(nxt, [x for x in cand[idx + 1:] if x in adj[j]])

        cliques([], dirs)
    return bad


def _rank_mod_p(rows: list[list[int]], ncols: int, p: int = 2_147_483_647) -> int:
    if not rows or ncols == 0:
        return 0
    A = np.array(rows, dtype=np.int64) % p
    rank = 0
    for col in range(ncols):
        piv = next((r for r in range(rank, A.shape[0]) if A[r, col]), None)
        if piv is None:
            continue
        A[[rank, piv]] = A[[piv, rank]]
        inv = pow(int(A[rank, col]), p - 2, p)
        A[rank] = (A[rank] * inv) % p
        nz = np.flatnonzero(A[:, col])
        for r in nz:
            if r != rank:
                A[r] = (A[r] - A[r, col] * A[rank]) % p
        rank += 1
        if rank == A.shape[0]:
            break
    return rank


def first_betti(c: CubeComplex) -> int:
    """dim H_1 of the 2-skeleton over GF(p) for a connected complex."""
    edges = c.edges
    index = {e: i for i, e in enumerate(edges)}
    rows = []
    for mask, base in c.cubes:
        if c.dim_of(mask) != 2:
            continue
        a, b = [1 << i for i in range(c.n_walls) if mask >> i & 1]
        # boundary: a-edge at base, b-edge at base|a, minus a-edge at base|b, minus b-edge at base
        row = [0] * len(edges)
        for (m, v), sgn in (((a, base), 1), ((b, base | a), 1), ((a, base | b), -1), ((b, base), -1)):
            j = index.get((m, v))
            if j is None:
                return -1
            row[j] += sgn
        rows.append(row)
    return len(edges) - len(c.vertices) + 1 - _rank_mod_p(rows, len(edges))


def _spanning_tree(c: CubeComplex):
    root = min(c.vertices)
    parent = {root: None}
    order = [root]
    for v in order:
        for i, u in c.neighbors(v):
            if u not in parent:
                parent[u] = (v, i)
                order.append(u)
    return root, parent


def _path_to_root(v, parent) -> list[int]:
    path = [v]
    while parent[path[-1]] is not None:
        path.append(parent[path[-1]][0])
    return path


def _reduce_cycle(c: CubeComplex, cycle: list[int], cap: int) -> bool | None:
    """Reduce a closed vertex path to a point by backtrack removal and square moves.

    Returns True on success, None when the greedy search stalls or the cap is hit.
    """
    verts = list(cycle[:-1])
    if len(verts) > cap:
        return None
    steps = 0
    while verts:
        n = len(verts)
        if n == 1:
            return True
        labels = [(verts[i] ^ verts[(i + 1) % n]).bit_length() - 1 for i in range(n)]
        # backtrack removal first
        done = False
        for i in range(n):
            if labels[i] == labels[(i + 1) % n]:
                j = (i + 1) % n
                drop = {j, (j + 1) % n} if n > 2 else {j}
                verts = [verts[x] for x in range(n) if x not in drop] if n > 2 else [verts[i]]
                done = True
                break
        if done:
            steps += 1
            continue
        # innermost pair of equal labels; slide the first forward with square moves
        pairs = []
        for i in range(n):
            for g in range(1, n):
                if labels[(i + g) % n] == labels[i]:
                    pairs.append((g, i))
                    break
        pairs.sort()
        moved = False
        for g, i in pairs:
            w = verts[:]
            ok = True
            for s in range(g - 1):
                p = (i + s) % n
                v0, v1, v2 = w[p], w[(p + 1) % n], w[(p + 2) % n]
                a, b = v0 ^ v1, v1 ^ v2
                if not c.has_cube(a | b, v0):
                    ok = False
                    break
                w[(p + 1) % n] = v0 ^ b
            if ok:
                verts = w
                moved = True
                break
        if not moved:
            return None
        steps += 1
        if steps > cap * cap:
            return None
    return True


def simply_connected(c: CubeComplex) -> bool | None:
    """Square-move reduction of every fundamental cycle of a spanning tree.

    When some cycle does not reduce, a nonzero first Betti number certifies a
    negative answer; otherwise the result is inconclusive (None).
    """
    if not _is_connected(c):
        return False
    root, parent = _spanning_tree(c)
    cap = 2 * len(c.edges)
    for mask, base in c.edges:
        u, v = base, base | mask
        i = mask.bit_length() - 1
        if parent.get(v) == (u, i) or parent.get(u) == (v, i):
            continue
        # root ... u, then v ... root
        cycle = _path_to_root(u, parent)[::-1] + _path_to_root(v, parent)
        if _reduce_cycle(c, cycle, cap) is not True:
            return False if first_betti(c) > 0 else None
    return True


def check_cat0(c: CubeComplex) -> Cat0Report:
    missing = _missing_faces(c)
    unfilled = _unfilled_cliques(c)
    return Cat0Report(
        connected=_is_connected(c),
        simply_connected=simply_connected(c),
        flag_links=missing == 0 and unfilled == 0,
        missing_faces=missing,
        unfilled_cliques=unfilled,
    )


def hyperplane_classes(c: CubeComplex) -> list[set]:
    """Edge classes under the opposite-sides-of-a-square relation."""
    edges = c.edges
    index = {e: i for i, e in enumerate(edges)}
    parent = list(range(len(edges)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for mask, base in c.cubes:
        if c.dim_of(mask) != 2:
            continue
        a, b = [1 << i for i in range(c.n_walls) if mask >> i & 1]
        for e, f in (((a, base), (a, base | b)), ((b, base), (b, base | a))):
            if e in index and f in index:
                parent[find(index[e])] = find(index[f])
    groups: dict[int, set] = {}
    for e, i in index.items():
        groups.setdefault(find(i), set()).add(e)
    return list(groups.values())


def hyperplane_families(c: CubeComplex, ws: WallSystem, N: int | None = None) -> int:
    """Number of orbits of walls under the rotation symmetry of order N (default: ws.symmetry_N)."""
    classes = hyperplane_classes(c)
    labels = [{m for m, _ in cls} for cls in classes]
    walls_hit = sorted(m.bit_length() - 1 for lab in labels for m in lab)
    if any(len(lab) != 1 for lab in labels) or walls_hit != list(range(len(ws))):
        raise GeometryError("hyperplanes of the complex do not biject with walls")
    N = ws.symmetry_N if N is None else N
    if N == 1:
        return len(ws)
    perm = ws.rotation_permutation(N)
    seen = set()
    orbits = 0
    for i in range(len(ws)):
        if i in seen:
            continue
        orbits += 1
        j = i
        while j not in seen:
            seen.add(j)
            j = perm[j]
    return orbits


# ---- separation ---------------------------------------------------------------


@dataclass(frozen=True)
class Separation:
    separated: bool
    wall: int | None = None


NOT_SEPARATED = Separation(False, None)


def separates_pair(ws: WallSystem, b1: float, b2: float) -> Separation:
    """First wall whose arcs split {b1, b2}."""
    for i, w in enumerate(ws.walls):
        if w.side(b1) != w.side(b2):
            return Separation(True, i)
    # side() raises on endpoints; make sure every wall was checked for both points
    return NOT_SEPARATED


@dataclass(frozen=True)
class FillingReport:
    resolution: int
    filling: bool
    unseparated: int
    witness: tuple | None = field(default=None)


def grid_points(N: int, offset: float = 0.25) -> np.ndarray:
    return TWO_PI * (np.arange(N) + offset) / N


def filling_at_resolution(ws: WallSystem, points) -> FillingReport:
    """Check that every pair of sample points is separated by some wall."""
    pts = np.asarray(points, dtype=float)
    S = np.array([[w.side(x) for w in ws.walls] for x in pts], dtype=np.int8).reshape(len(pts), len(ws))
    same = np.all(S[:, None, :] == S[None, :, :], axis=2)
    iu, ju = np.triu_indices(len(pts), k=1)
    bad = same[iu, ju]
    witness = None
    if bad.any():
        j = int(np.argmax(bad))
        witness = (float(pts[iu[j]]), float(pts[ju[j]]))
    return FillingReport(len(pts), not bad.any(), int(bad.sum()), witness)


def rotated_diameters(N: int) -> WallSystem:
    """N diameters at angles k pi / N, invariant under rotation by pi / N."""
    return WallSystem([(k * math.pi / N, k * math.pi / N + math.pi) for k in range(N)])


def rotation_orbit(N: int, chord: float = 1.0, phase: float = 0.1) -> WallSystem:
    """N congruent chords forming a single orbit under rotation by 2 pi / N."""
    return WallSystem([(phase + TWO_PI * k / N, phase + TWO_PI * k / N + chord) for k in range(N)], N)


def crossing_family(n: int) -> WallSystem:
    """n pairwise-crossing walls (rotated diameters)."""
    return rotated_diameters(n)


def nested_family(n: int) -> WallSystem:
    """n pairwise non-crossing nested walls."""
    return WallSystem([(0.1 * (i + 1), math.pi - 0.1 * (i + 1)) for i in range(n)])
