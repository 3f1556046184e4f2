"""Multiplicity and degree bounds, in closed degree form and Newton-polytope form.

Every value is an exact ``int`` or ``Fraction``.  Degree-form bounds replace
``d`` by ``max(d, n - 1)``; enlarging ``d`` can only weaken a bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

from .polytope import (
    LatticePolytope,
    contains_translate,
    dilate,
    is_coideal_polytope,
    minkowski_sum,
    quermassintegral,
    standard_simplex,
)

AFFINE = "affine"
TORUS = "torus"


class BoundError(ValueError):
    pass


class HypothesisError(BoundError):
    """A polytope bound was requested outside the hypotheses it is proved under."""


@dataclass(frozen=True)
class BoundParams:
    n: int
    d: int
    delta: int
    poly_polytope: LatticePolytope | None = None
    field_polytope: LatticePolytope | None = None
    mode: str = AFFINE

    def __post_init__(self):
        _check(self.n, self.d, self.delta)
        if self.mode not in (AFFINE, TORUS):
            raise BoundError(f"unknown mode {self.mode!r}")
        for poly in (self.poly_polytope, self.field_polytope):
            if poly is not None and poly.n != self.n:
                raise BoundError("polytope dimension does not match n")


def _check(n: int, d: int, delta: int) -> None:
    if n < 1:
        raise BoundError("n must be at least 1")
    if d < 1:
        raise BoundError("d must be at least 1")
    if delta < 1:
        raise BoundError("delta must be at least 1")


def padded_degree(n: int, d: int) -> int:
    return max(d, n - 1)


def gabrielov_bound(n: int, d: int, delta: int) -> int:
    _check(n, d, delta)
    return 2 ** (2 * n - 1) * sum((d + (i - 1) * (delta - 1)) ** (2 * n) for i in range(1, n + 1))


def mc_degree_simple(n: int, d: int, delta: int, k: int) -> int:
    """Right-hand side ``2^n (d + (n-k-1)(delta-1))^(n-k)`` of the degree bound on the k-th cycle."""
    _check(n, d, delta)
    if not 0 <= k <= n - 1:
        raise BoundError(f"k={k} out of range 0..{n - 1}")
    d = padded_degree(n, d)
    return 2 ** n * (d + (n - k - 1) * (delta - 1)) ** (n - k)


def single_point_bound(n: int, d: int, delta: int) -> int:
    return sum(mc_degree_simple(n, d, delta, k) for k in range(n))


def weak_single_point_bound(n: int, d: int, delta: int) -> int:
    _check(n, d, delta)
    d = padded_degree(n, d)
    return 2 ** (n + 1) * (d + (n - 1) * (delta - 1)) ** n


def multipoint_bound(n: int, d: int, delta: int, a) -> int:
    """Sum-of-multiplicities bound weighted by per-cycle incidence counts ``a_k``."""
    _check(n, d, delta)
    a = list(a)
    if len(a) != n:
        raise BoundError(f"expected {n} incidence counts, got {len(a)}")
    if any(x < 0 for x in a):
        raise BoundError("incidence counts must be nonnegative")
    d = padded_degree(n, d)
    return 2 ** n * sum(a[k] * (d + (n - k - 1) * (delta - 1)) ** (n - k) for k in range(n))


# polar-variety degrees ---------------------------------------------------------


def pv_degree(n: int, r: int, k: int, mode: str, delta_or_polytope, waive: bool = False):
    """Degree bound for a refined polar variety.

    ``mode`` is ``"torus"`` or ``"affine"`` (polytope argument) or
    ``"degree"`` (integer ``d``).
    """
    if r < 1 or not 1 <= k <= n - r + 1:
        raise BoundError(f"need r >= 1 and 1 <= k <= n - r + 1, got r={r}, k={k}")
    factor = math.comb(n, r + k - 1)
    if mode == "degree":
        d = delta_or_polytope
        if not isinstance(d, int) or d < 1:
            raise BoundError("degree mode needs a positive integer d")
        return factor * d ** (n - k + 1)
    if not isinstance(delta_or_polytope, LatticePolytope):
        raise BoundError(f"{mode} mode needs a polytope")
    poly = delta_or_polytope
    if poly.n != n:
        raise BoundError("polytope dimension does not match n")
    if mode == TORUS:
        poly = minkowski_sum(poly, standard_simplex(n))
    elif mode == AFFINE:
        if not waive and not is_coideal_polytope(poly):
            raise HypothesisError("affine polar-degree bound needs a convex co-ideal")
    else:
        raise BoundError(f"unknown mode {mode!r}")
    value = factor * math.factorial(n) * quermassintegral(poly, k - 1)
    return int(value) if value.denominator == 1 else value


# multiplicity-cycle degrees from Newton polytopes --------------------------------


def _nonnegative(poly: LatticePolytope) -> bool:
    return all(x >= 0 for v in poly.vertices for x in v)


def _hull_union(a: LatticePolytope, b: LatticePolytope) -> LatticePolytope:
    return LatticePolytope(a.vertices + b.vertices, a.n)


@dataclass(frozen=True)
class McPolytopeBound:
    sum_form: Fraction
    weak_form: Fraction
    hypothesis_verified: bool
    padded: bool = False


def mc_degree_polytope(n: int, k: int, poly_polytope: LatticePolytope, field_polytope: LatticePolytope,
                       mode: str = AFFINE, waive: bool = False) -> McPolytopeBound:
    """Bounds on ``deg mc^k`` from ``Delta(P)`` and ``Delta(V)``.

    In affine mode ``Delta(P)`` is enlarged to contain ``(n-1) Delta_x`` when
    it does not already, mirroring the degree padding.
    """
    if not 0 <= k <= n - 1:
        raise BoundError(f"k={k} out of range 0..{n - 1}")
    if poly_polytope.n != n or field_polytope.n != n:
        raise BoundError("polytope dimension does not match n")
    simplex = standard_simplex(n)
    floor = dilate(simplex, n - 1)
    verified = True
    padded = False
    base = poly_polytope
    if mode == TORUS:
        if not contains_translate(poly_polytope, floor):
            if not waive:
                raise HypothesisError("no translate of (n-1) Delta_x lies in Delta(P)")
            verified = False
    elif mode == AFFINE:
        if not (_nonnegative(poly_polytope) and _nonnegative(field_polytope)):
            if not waive:
                raise HypothesisError("affine bound needs Delta(P) and Delta(V) in the nonnegative orthant")
            verified = False
        if not poly_polytope.contains(floor):
            base = _hull_union(poly_polytope, floor)
            padded = True
    else:
        raise BoundError(f"unknown mode {mode!r}")

    def inner(m: int) -> LatticePolytope:
        out = minkowski_sum(base, dilate(field_polytope, m))
        return minkowski_sum(out, simplex) if mode == TORUS else out

    nf = math.factorial(n)
    total = sum((math.comb(n, r + k) * nf * quermassintegral(inner(r - 1), k) for r in range(1, n - k + 1)),
                Fraction(0))
    weak = 2 ** n * nf * quermassintegral(inner(n - k - 1), k)
    return McPolytopeBound(total, weak, verified, padded)


# three-dimensional comparison -----------------------------------------------


@dataclass(frozen=True)
class GRBounds:
    gr: int
    improved: int
    betti: tuple[int, int, int, int]


def gr_bounds(d: int, delta: int) -> GRBounds:
    """Gabrielov-Risler bound in C^3 and the even-Betti refinement."""
    if d < 2:
        raise BoundError("the C^3 comparison assumes d >= 2")
    if delta < 1:
        raise BoundError("delta must be at least 1")
    gr = d + 2 * d * (d + delta - 1) ** 2
    improved = d * (1 + (d - 1) ** 2 + (d + delta - 1) * (d + 2 * delta - 1))
    betti = (d, d * (d + delta - 1), d * (d + delta - 1) * (d + 2 * delta - 2), d * (d - 1) ** 2)
    if sum(betti) != improved:
        raise ArithmeticError("Betti summands do not reproduce the improved bound")
    return GRBounds(gr, improved, betti)


# Nesterenko's parametrized estimate -----------------------------------------


@dataclass(frozen=True)
class NesterenkoParams:
    """``C`` and the point-count table ``a(j, T)`` are supplied by the caller."""

    C: Fraction
    kappa: int
    a: Callable[[int, Fraction], int] | Mapping = field(compare=False)

    def __post_init__(self):
        object.__setattr__(self, "C", Fraction(self.C))
        if self.C <= 0:
            raise BoundError("C must be positive")
        if self.kappa < 1:
            raise BoundError("kappa must be at least 1")

    def count(self, j: int, T: Fraction) -> int:
        if j == 0:
            if isinstance(self.a, Mapping) and (0, T) in self.a and self.a[(0, T)] != 1:
                raise BoundError("a(0, T) must be 1")
            return 1
        if isinstance(self.a, Mapping):
            try:
                return self.a[(j, T)]
            except KeyError:
                raise BoundError(f"no table entry for a({j}, {T})") from None
        return self.a(j, T)


def nesterenko_bound(d: int, params: NesterenkoParams) -> Fraction:
    if d < 1:
        raise BoundError("d must be at least 1")
    C = params.C
    k = params.kappa
    return C * sum((params.count(k - j, C * d ** j) * d ** j for j in range(1, k + 1)), Fraction(0))


# report ----------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundEntry:
    name: str
    value: int | Fraction
    cite: str


@dataclass
class BoundReport:
    params: BoundParams
    entries: list[BoundEntry] = field(default_factory=list)
    comparisons: list[tuple[str, str, str]] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def add(self, name: str, value, cite: str) -> None:
        self.entries.append(BoundEntry(name, value, cite))

    def value(self, name: str):
        for e in self.entries:
            if e.name == name:
                return e.value
        raise KeyError(name)

    def assert_relation(self, left: str, rel: str, right: str) -> None:
        a, b = self.value(left), self.value(right)
        ok = a <= b if rel == "<=" else a < b
        if not ok:
            raise ArithmeticError(f"expected {left} {rel} {right}, got {a} vs {b}")
        self.comparisons.append((left, rel, right))

    def to_dict(self) -> dict:
        p = self.params
        return {
            "params": {"n": p.n, "d": p.d, "delta": p.delta, "mode": p.mode},
            "entries": [{"name": e.name, "value": str(e.value), "cite": e.cite} for e in self.entries],
            "comparisons": [" ".join(c) for c in self.comparisons],
            "notes": list(self.notes),
        }


def compare_report(params: BoundParams, which: str = "all", waive: bool = False,
                   nesterenko: NesterenkoParams | None = None) -> BoundReport:
    n, d, delta = params.n, params.d, params.delta
    report = BoundReport(params)
    want = lambda key: which in ("all", key)  # noqa: E731

    if nesterenko is not None and want("degree"):
        report.add("nesterenko", _exact(nesterenko_bound(d, nesterenko)), "parametrized: caller-supplied C and a_j(T)")

    if want("degree"):
        report.add("gabrielov", gabrielov_bound(n, d, delta), "Gabrielov single-point estimate")
        for k in range(n):
            report.add(f"mc_degree_k{k}", mc_degree_simple(n, d, delta, k), "degree bound on the k-th multiplicity cycle")
        report.add("sum", single_point_bound(n, d, delta), "sum of multiplicity-cycle degrees")
        report.add("weak", weak_single_point_bound(n, d, delta), "closed-form single-point estimate")
        report.assert_relation("sum", "<=", "weak")
        if d < n - 1:
            report.notes.append(f"d padded from {d} to {n - 1}")

    if want("gr") and n == 3 and d >= 2:
        g = gr_bounds(d, delta)
        report.add("gr", g.gr, "Gabrielov-Risler estimate in C^3")
        report.add("improved", g.improved, "even-Betti refinement in C^3")
        for label, b in zip(("b0_F0", "b0_F1", "b0_F2", "b2_F0"), g.betti):
            report.add(label, b, "Betti summand")
        report.assert_relation("improved", "<", "gr")

    if want("polytope") and params.poly_polytope is not None and params.field_polytope is not None:
        dp = padded_degree(n, d)
        total = Fraction(0)
        comparable = True
        for k in range(n):
            res = mc_degree_polytope(n, k, params.poly_polytope, params.field_polytope, params.mode, waive)
            report.add(f"mc_polytope_k{k}", _exact(res.sum_form), f"{params.mode} Newton-polytope bound on mc^{k}")
            report.add(f"mc_polytope_weak_k{k}", _exact(res.weak_form), f"{params.mode} weak Newton-polytope bound on mc^{k}")
            report.assert_relation(f"mc_polytope_k{k}", "<=", f"mc_polytope_weak_k{k}")
            total += res.sum_form
            if not res.hypothesis_verified:
                comparable = False
                report.notes.append(f"mc^{k}: hypothesis unverified (waived)")
            if res.padded and k == 0:
                report.notes.append("Delta(P) enlarged to contain (n-1) Delta_x")
        report.add("polytope_sum", _exact(total), "sum of Newton-polytope cycle bounds")
        inside = (params.mode == AFFINE
                  and dilate(standard_simplex(n), dp).contains(params.poly_polytope)
                  and dilate(standard_simplex(n), delta - 1).contains(params.field_polytope))
        if comparable and inside:
            if "mc_degree_k0" not in (e.name for e in report.entries):
                for k in range(n):
                    report.add(f"mc_degree_k{k}", mc_degree_simple(n, d, delta, k), "degree bound on the k-th multiplicity cycle")
            for k in range(n):
                report.assert_relation(f"mc_polytope_k{k}", "<=", f"mc_degree_k{k}")
    return report


def _exact(value: Fraction):
    return int(value) if value.denominator == 1 else value
