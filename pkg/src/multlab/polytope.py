"""Exact lattice polytopes: hulls, Minkowski sums, volumes and mixed volumes.

All geometry runs on integer coordinates.  A polytope whose affine hull has
dimension ``k`` is handled in ``k`` of the ambient coordinates chosen so the
projection is injective on the hull; projection keeps points integral, and a
placing triangulation in those coordinates gives facets, vertices and volume.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .polyalg import Polynomial, VectorField

Point = tuple[int, ...]


class PolytopeError(ValueError):
    pass


def _det(rows: Sequence[Sequence[int]]) -> int:
    """Integer determinant by fraction-free (Bareiss) elimination."""
    m = [list(r) for r in rows]
    k = len(m)
    if k == 0:
        return 1
    sign = 1
    prev = 1
    for i in range(k - 1):
        if m[i][i] == 0:
            for r in range(i + 1, k):
                if m[r][i]:
                    m[i], m[r] = m[r], m[i]
                    sign = -sign
                    break
            else:
                return 0
        for r in range(i + 1, k):
            for c in range(i + 1, k):
                m[r][c] = (m[r][c] * m[i][i] - m[r][i] * m[i][c]) // prev
        prev = m[i][i]
    return sign * m[k - 1][k - 1]


def _pivot_columns(vectors: Sequence[Sequence[int]], width: int) -> tuple[list[int], list[int]]:
    """Row-reduce integer ``vectors``; return (indices of independent rows, pivot columns)."""
    basis: list[tuple[int, list[int]]] = []
    rows, cols = [], []
    for idx, vec in enumerate(vectors):
        r = list(vec)
        for col, b in basis:
            if r[col]:
                f, g = b[col], r[col]
                r = [x * f - g * y for x, y in zip(r, b)]
                h = math.gcd(*r)
                if h > 1:
                    r = [x // h for x in r]
        lead = next((c for c in range(width) if r[c]), None)
        if lead is not None:
            basis.append((lead, r))
            rows.append(idx)
            cols.append(lead)
    return rows, cols


class _Hull:
    """Placing triangulation of distinct integer points spanning ``R^k``."""

    def __init__(self, points: Sequence[Point]):
        self.points = sorted(points)
        self.k = len(self.points[0])
        self.simplices: list[tuple[int, ...]] = []
        # facet -> (normal, offset) with normal . x <= offset on the hull
        self.facets: dict[tuple[int, ...], tuple[Point, int]] = {}
        self._build()

    def _hyperplane(self, facet: tuple[int, ...]) -> tuple[Point, int]:
        pts = [self.points[i] for i in facet]
        base = pts[0]
        edges = [[a - b for a, b in zip(p, base)] for p in pts[1:]]
        k = self.k
        normal = []
        for j in range(k):
            minor = [[e[c] for c in range(k) if c != j] for e in edges]
            normal.append((-1) ** j * _det(minor))
        g = math.gcd(*normal)
        normal = tuple(x // g for x in normal)
        offset = sum(a * b for a, b in zip(normal, base))
        # orient outward: the interior reference is strictly inside
        ref = sum(a * b for a, b in zip(normal, self._centre_num))
        if ref > offset * self._centre_den:
            normal = tuple(-x for x in normal)
            offset = -offset
        return normal, offset

    def _build(self) -> None:
        pts = self.points
        k = self.k
        first = pts[0]
        chosen = [0]
        diffs: list[list[int]] = []
        for idx in range(1, len(pts)):
            cand = [a - b for a, b in zip(pts[idx], first)]
            rows, _ = _pivot_columns(diffs + [cand], k)
            if len(rows) == len(diffs) + 1:
                diffs.append(cand)
                chosen.append(idx)
                if len(chosen) == k + 1:
                    break
        if len(chosen) != k + 1:
            raise PolytopeError("points do not span the space")
        self._centre_num = tuple(sum(pts[i][c] for i in chosen) for c in range(k))
        self._centre_den = k + 1
        simplex = tuple(chosen)
        self.simplices.append(simplex)
        for face in itertools.combinations(simplex, k):
            self.facets[face] = self._hyperplane(face)
        used = set(chosen)
        for idx in range(len(pts)):
            if idx not in used:
                self._place(idx)

    def _place(self, idx: int) -> None:
        p = self.points[idx]
        visible = [f for f, (nrm, off) in self.facets.items()
                   if sum(a * b for a, b in zip(nrm, p)) > off]
        if not visible:
            return
        ridges: Counter = Counter()
        for f in visible:
            self.simplices.append(f + (idx,))
            for ridge in itertools.combinations(f, self.k - 1):
                ridges[ridge] += 1
            del self.facets[f]
        for ridge, count in ridges.items():
            if count == 1:
                face = tuple(sorted(ridge + (idx,)))
                self.facets[face] = self._hyperplane(face)

    def volume(self) -> Fraction:
        total = 0
        for s in self.simplices:
            base = self.points[s[0]]
            total += abs(_det([[a - b for a, b in zip(self.points[i], base)] for i in s[1:]]))
        return Fraction(total, math.factorial(self.k))

    def inequalities(self) -> list[tuple[Point, int]]:
        return sorted(set(self.facets.values()))

    def vertices(self) -> list[Point]:
        ineqs = self.inequalities()
        out = []
        candidates = sorted({i for f in self.facets for i in f})
        for i in candidates:
            p = self.points[i]
            tight = [nrm for nrm, off in ineqs if sum(a * b for a, b in zip(nrm, p)) == off]
            if len(_pivot_columns(tight, self.k)[0]) == self.k:
                out.append(p)
        return out


class LatticePolytope:
    """Convex hull of finitely many integer points in ``Z^n``.

    Equality and hashing use the vertex set, so two polytopes built from
    different generators compare equal when their hulls agree.
    """

    def __init__(self, points: Iterable[Sequence[int]], n: int | None = None):
        pts = []
        for p in points:
            q = tuple(int(x) for x in p)
            if any(q_ != x for q_, x in zip(q, p)):
                raise PolytopeError(f"non-integer point {tuple(p)}")
            pts.append(q)
        if not pts:
            raise PolytopeError("a polytope needs at least one point")
        if n is None:
            n = len(pts[0])
        if any(len(p) != n for p in pts):
            raise PolytopeError("points have mismatched dimensions")
        self.n = n
        self.generators = tuple(sorted(set(pts)))
        self._vertices_hint: tuple[Point, ...] | None = None

    @classmethod
    def _from_vertices(cls, vertices: Iterable[Point], n: int) -> LatticePolytope:
        # caller guarantees every point is extreme
        obj = cls(vertices, n)
        obj._vertices_hint = obj.generators
        return obj

    # affine hull -----------------------------------------------------------
    @cached_property
    def _frame(self) -> tuple[int, list[int]]:
        base = self.generators[0]
        diffs = [[a - b for a, b in zip(p, base)] for p in self.generators[1:]]
        rows, cols = _pivot_columns(diffs, self.n)
        return len(rows), sorted(cols)

    @cached_property
    def _equations(self) -> list[list[int]]:
        # normals spanning the orthogonal complement of the affine hull
        k, cols = self._frame
        if k == self.n:
            return []
        base = self.generators[0]
        basis: list[list[Fraction]] = []
        for p in self.generators[1:]:
            r = [Fraction(a - b) for a, b in zip(p, base)]
            for b in basis:
                lead = next(c for c, x in enumerate(b) if x)
                if r[lead]:
                    f = r[lead]
                    r = [x - f * y for x, y in zip(r, b)]
            lead = next((c for c, x in enumerate(r) if x), None)
            if lead is not None:
                r = [x / r[lead] for x in r]
                basis = [[x - b[lead] * y for x, y in zip(b, r)] for b in basis] + [r]
        pivots = {next(c for c, x in enumerate(b) if x): b for b in basis}
        out = []
        for free in (c for c in range(self.n) if c not in pivots):
            vec = [Fraction(0)] * self.n
            vec[free] = Fraction(1)
            for c, b in pivots.items():
                vec[c] = -b[free]
            scale = math.lcm(*(x.denominator for x in vec))
            out.append([int(x * scale) for x in vec])
        return out

    @cached_property
    def _inequalities(self) -> list[tuple[Point, int]]:
        return self._hull.inequalities() if self._hull is not None else []

    @property
    def dim(self) -> int:
        """Dimension of the affine hull."""
        return self._frame[0]

    def _project(self, p: Sequence[int]) -> Point:
        return tuple(p[c] for c in self._frame[1])

    @cached_property
    def _hull(self) -> _Hull | None:
        k, _ = self._frame
        if k < 2:
            return None
        return _Hull(sorted({self._project(p) for p in self.generators}))

    @cached_property
    def vertices(self) -> tuple[Point, ...]:
        if self._vertices_hint is not None:
            return self._vertices_hint
        k, cols = self._frame
        if k == 0:
            return (self.generators[0],)
        if k == 1:
            c = cols[0]
            lo = min(self.generators, key=lambda p: p[c])
            hi = max(self.generators, key=lambda p: p[c])
            return tuple(sorted({lo, hi}))
        lift = {self._project(p): p for p in self.generators}
        return tuple(sorted(lift[v] for v in self._hull.vertices()))

    def __eq__(self, other) -> bool:
        return isinstance(other, LatticePolytope) and self.n == other.n and self.vertices == other.vertices

    def __hash__(self) -> int:
        return hash((self.n, self.vertices))

    def __repr__(self) -> str:
        return f"LatticePolytope({list(self.vertices)})"

    # predicates ------------------------------------------------------------
    def contains_point(self, p: Sequence) -> bool:
        """Exact membership test for a point with rational coordinates."""
        if len(p) != self.n:
            raise PolytopeError("dimension mismatch")
        p = [Fraction(x) for x in p]
        if all(x.denominator == 1 for x in p):
            p = [int(x) for x in p]
        base = self.generators[0]
        k, cols = self._frame
        target = [x - b for x, b in zip(p, base)]
        if any(sum(a * b for a, b in zip(eq, target)) for eq in self._equations):
            return False
        q = [p[c] for c in cols]
        if k == 0:
            return True
        if k == 1:
            vals = [v[cols[0]] for v in self.vertices]
            return min(vals) <= q[0] <= max(vals)
        return all(sum(a * b for a, b in zip(nrm, q)) <= off for nrm, off in self._inequalities)

    def contains(self, other: LatticePolytope) -> bool:
        return all(self.contains_point(v) for v in other.vertices)

    def lattice_points(self) -> list[Point]:
        lo = [min(v[i] for v in self.vertices) for i in range(self.n)]
        hi = [max(v[i] for v in self.vertices) for i in range(self.n)]
        box = itertools.product(*(range(a, b + 1) for a, b in zip(lo, hi)))
        return [p for p in box if self.contains_point(p)]

    def translate(self, shift: Sequence[int]) -> LatticePolytope:
        return LatticePolytope._from_vertices(
            [tuple(a + b for a, b in zip(v, shift)) for v in self.vertices], self.n)


def standard_simplex(n: int) -> LatticePolytope:
    """``Delta_x``: the hull of the origin and the unit vectors."""
    pts = [(0,) * n] + [tuple(int(i == j) for j in range(n)) for i in range(n)]
    return LatticePolytope._from_vertices(pts, n)


def origin(n: int) -> LatticePolytope:
    return LatticePolytope._from_vertices([(0,) * n], n)


def newton_polytope(p: Polynomial) -> LatticePolytope:
    if p.is_zero():
        raise PolytopeError("the zero polynomial has no Newton polytope")
    return LatticePolytope(p.support(), p.n)


def vf_polytope(v: VectorField) -> LatticePolytope:
    """Hull of ``alpha - e_i`` over the monomials ``x^alpha`` of each ``Q_i``."""
    pts = []
    for i, q in enumerate(v.components):
        for exp in q.support():
            pts.append(tuple(e - (j == i) for j, e in enumerate(exp)))
    if not pts:
        raise PolytopeError("the zero vector field has no Newton polytope")
    return LatticePolytope(pts, v.n)


def minkowski_sum(a: LatticePolytope, b: LatticePolytope) -> LatticePolytope:
    if a.n != b.n:
        raise PolytopeError(f"dimension mismatch: {a.n} vs {b.n}")
    return LatticePolytope({tuple(x + y for x, y in zip(u, w)) for u in a.vertices for w in b.vertices}, a.n)


def dilate(a: LatticePolytope, m: int) -> LatticePolytope:
    if m < 0:
        raise PolytopeError("dilation factor must be nonnegative")
    if m == 0:
        return origin(a.n)
    return LatticePolytope._from_vertices([tuple(m * x for x in v) for v in a.vertices], a.n)


def volume(a: LatticePolytope) -> Fraction:
    """Euclidean ``n``-volume; zero for lower-dimensional hulls."""
    if a.dim < a.n:
        return Fraction(0)
    if a.n == 1:
        return Fraction(a.vertices[-1][0] - a.vertices[0][0])
    return a._hull.volume()


def _weighted_sum(pieces: Sequence[tuple[LatticePolytope, int]], n: int) -> LatticePolytope:
    acc = origin(n)
    for poly, m in pieces:
        if m:
            acc = minkowski_sum(acc, dilate(poly, m))
    return acc


def mixed_volume(deltas: Sequence[LatticePolytope]) -> Fraction:
    """Mixed volume normalised so that ``V(D, ..., D) = vol(D)``.

    Computed by inclusion-exclusion over subsets of slots; equal slots are
    grouped, so each distinct Minkowski combination is measured once.
    """
    deltas = list(deltas)
    if not deltas:
        raise PolytopeError("need at least one polytope")
    n = deltas[0].n
    if len(deltas) != n:
        raise PolytopeError(f"mixed volume in dimension {n} needs exactly {n} polytopes, got {len(deltas)}")
    if any(d.n != n for d in deltas):
        raise PolytopeError("polytopes have mismatched dimensions")
    groups: list[tuple[LatticePolytope, int]] = []
    for d in deltas:
        for i, (g, m) in enumerate(groups):
            if g == d:
                groups[i] = (g, m + 1)
                break
        else:
            groups.append((d, 1))
    total = Fraction(0)
    for counts in itertools.product(*(range(m + 1) for _, m in groups)):
        size = sum(counts)
        if size == 0:
            continue
        weight = math.prod(math.comb(m, c) for (_, m), c in zip(groups, counts))
        vol = volume(_weighted_sum([(g, c) for (g, _), c in zip(groups, counts)], n))
        total += (-1) ** (n - size) * weight * vol
    return total / math.factorial(n)


def quermassintegral(delta: LatticePolytope, j: int) -> Fraction:
    """``Q_j(D) = V(D, ..., D, Delta_x, ..., Delta_x)`` with ``j`` simplex slots."""
    n = delta.n
    if not 0 <= j <= n:
        raise PolytopeError(f"quermassintegral index {j} out of range 0..{n}")
    return mixed_volume([delta] * (n - j) + [standard_simplex(n)] * j)


def bk_count(deltas: Sequence[LatticePolytope]) -> int:
    """Generic number of torus solutions, ``n! * V(D_1, ..., D_n)``."""
    mu = math.factorial(len(deltas)) * mixed_volume(deltas)
    if mu.denominator != 1:
        raise ArithmeticError(f"n! * mixed volume is not an integer: {mu}")
    return int(mu)


# co-ideals -------------------------------------------------------------------


class CoIdealSet(frozenset):
    """A finite downward-closed set of nonnegative lattice points."""

    def __new__(cls, points: Iterable[Sequence[int]]):
        pts = frozenset(tuple(p) for p in points)
        if not is_coideal(pts):
            raise PolytopeError("point set is not downward closed")
        return super().__new__(cls, pts)


def is_coideal(points: Iterable[Sequence[int]]) -> bool:
    pts = {tuple(p) for p in points}
    for p in pts:
        if any(x < 0 for x in p):
            return False
        for i, x in enumerate(p):
            if x and p[:i] + (x - 1,) + p[i + 1:] not in pts:
                return False
    return True


def coideal_closure(points: Iterable[Sequence[int]]) -> CoIdealSet:
    out = set()
    for p in points:
        p = tuple(p)
        if any(x < 0 for x in p):
            raise PolytopeError(f"negative coordinate in {p}")
        out.update(itertools.product(*(range(x + 1) for x in p)))
    return CoIdealSet(out)


def is_coideal_polytope(a: LatticePolytope) -> bool:
    """True when ``a`` sits in the nonnegative orthant and its lattice points are downward closed."""
    if any(x < 0 for v in a.vertices for x in v):
        return False
    return is_coideal(a.lattice_points())


def contains_translate(big: LatticePolytope, small: LatticePolytope) -> bool:
    """Whether some lattice translate of ``small`` lies inside ``big``."""
    n = big.n
    lo = [min(v[i] for v in big.vertices) - min(v[i] for v in small.vertices) for i in range(n)]
    hi = [max(v[i] for v in big.vertices) - max(v[i] for v in small.vertices) for i in range(n)]
    for shift in itertools.product(*(range(a, b + 1) for a, b in zip(lo, hi))):
        if big.contains(small.translate(shift)):
            return True
    return False
