"""Evaluation matrices, witness sets and degree functions of simple cycles."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .polyalg import Polynomial, RationalPoint, as_point, evaluate


class WitnessError(ValueError):
    pass


def monomials(n: int, D: int) -> list[tuple[int, ...]]:
    """Exponents of total degree at most ``D``, by degree then with ``x1`` first."""
    out = []
    for deg in range(D + 1):
        layer = [e for e in itertools.product(range(deg + 1), repeat=n) if sum(e) == deg]
        out.extend(sorted(layer, reverse=True))
    return out


@dataclass(frozen=True)
class EvaluationMatrix:
    points: tuple[RationalPoint, ...]
    degree_bound: int
    monomials: tuple[tuple[int, ...], ...]
    entries: tuple[tuple[Fraction, ...], ...]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.entries), len(self.monomials)

    def rank(self) -> int:
        return len(independent_rows(self.entries))

    def kernel(self) -> list[list[Fraction]]:
        return right_kernel(self.entries, len(self.monomials))

    def polynomial(self, coefficients: Sequence) -> Polynomial:
        """The degree-``D`` polynomial with the given coefficient vector."""
        n = len(self.monomials[0])
        return Polynomial(n, dict(zip(self.monomials, coefficients)))


def evaluation_matrix(points: Sequence, n: int, D: int) -> EvaluationMatrix:
    if D < 0:
        raise WitnessError("degree bound must be nonnegative")
    pts = tuple(as_point(p) for p in points)
    for p in pts:
        if p.n != n:
            raise WitnessError(f"point {p} does not have dimension {n}")
    mons = tuple(monomials(n, D))
    rows = tuple(tuple(math.prod((x ** e for x, e in zip(p.coordinates, m)), start=Fraction(1)) for m in mons)
                 for p in pts)
    return EvaluationMatrix(pts, D, mons, rows)


def _reduce(row: list[Fraction], basis: list[tuple[int, list[Fraction]]]) -> list[Fraction]:
    for col, b in basis:
        if row[col]:
            f = row[col] / b[col]
            row = [x - f * y for x, y in zip(row, b)]
    return row


def independent_rows(rows: Sequence[Sequence[Fraction]]) -> list[int]:
    """Indices of rows that raise the rank, scanning in order."""
    basis: list[tuple[int, list[Fraction]]] = []
    keep = []
    for idx, row in enumerate(rows):
        r = _reduce([Fraction(x) for x in row], basis)
        lead = next((c for c, x in enumerate(r) if x), None)
        if lead is not None:
            basis.append((lead, r))
            keep.append(idx)
    return keep


def right_kernel(rows: Sequence[Sequence[Fraction]], width: int) -> list[list[Fraction]]:
    """Basis of ``{x : M x = 0}`` from the reduced row echelon form."""
    m = [[Fraction(x) for x in r] for r in rows]
    pivots = []
    r = 0
    for c in range(width):
        pr = next((i for i in range(r, len(m)) if m[i][c]), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        piv = m[r][c]
        m[r] = [x / piv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    free = [c for c in range(width) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * width
        vec[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            vec[pc] = -m[i][fc]
        basis.append(vec)
    return basis


def witness_set(points: Sequence, n: int, D: int) -> list[RationalPoint]:
    """Earliest points whose evaluation rows span the full row space."""
    mat = evaluation_matrix(points, n, D)
    return [mat.points[i] for i in independent_rows(mat.entries)]


def witness_family(level_sets: Mapping[int, Sequence], n: int, D: int) -> list[RationalPoint]:
    """Union of the witness sets of each superlevel set, in threshold order."""
    out: list[RationalPoint] = []
    seen = set()
    for i in sorted(level_sets):
        for p in witness_set(level_sets[i], n, D):
            if p not in seen:
                seen.add(p)
                out.append(p)
    return out


# cycles --------------------------------------------------------------------------


@dataclass(frozen=True)
class CycleComponent:
    kind: str  # "point" or "hypersurface"
    coefficient: int
    point: RationalPoint | None = None
    equation: Polynomial | None = None

    def __post_init__(self):
        if self.coefficient < 1:
            raise WitnessError("cycle coefficients must be positive")
        if self.kind == "point":
            if self.point is None:
                raise WitnessError("point component needs coordinates")
        elif self.kind == "hypersurface":
            if self.equation is None or self.equation.degree() < 1 or self.equation.has_negative_exponents():
                raise WitnessError("hypersurface component needs a nonconstant polynomial equation")
        else:
            raise WitnessError(f"unsupported component type {self.kind!r}; only points and hypersurfaces")

    @property
    def degree(self) -> int:
        return 1 if self.kind == "point" else self.equation.degree()

    @property
    def n(self) -> int:
        return self.point.n if self.kind == "point" else self.equation.n

    @property
    def dimension(self) -> int:
        return 0 if self.kind == "point" else self.n - 1

    def contains(self, at: RationalPoint) -> bool:
        if self.kind == "point":
            return self.point == at
        return evaluate(self.equation, at) == 0


@dataclass(frozen=True)
class Cycle:
    components: tuple[CycleComponent, ...]

    def __add__(self, other: Cycle) -> Cycle:
        return Cycle(self.components + other.components)


def point_component(coords, coefficient: int = 1) -> CycleComponent:
    return CycleComponent("point", coefficient, point=as_point(coords))


def hypersurface_component(equation: Polynomial, coefficient: int = 1) -> CycleComponent:
    return CycleComponent("hypersurface", coefficient, equation=equation)


def degf_eval(cycle: Cycle, at) -> int:
    """Sum of ``coefficient * degree`` over components passing through ``at``."""
    at = as_point(at)
    total = 0
    for comp in cycle.components:
        if comp.n != at.n:
            raise WitnessError(f"dimension mismatch: component in {comp.n}, point of length {at.n}")
        if comp.contains(at):
            total += comp.coefficient * comp.degree
    return total
