"""Multiplicity of a polynomial along the trajectory of a vector field.

Two independent oracles: the Lie-derivative chain (least ``r`` with
``(V^r P)(p) != 0``) and the valuation of ``P`` composed with the formal
trajectory.  Infinite multiplicity is only ever reported when certified, by
running the chain past a proven upper bound for finite multiplicities or by
the chain collapsing to the zero polynomial.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import bounds
from .polyalg import (
    AFFINE,
    Polynomial,
    PolynomialError,
    RationalPoint,
    VectorField,
    as_point,
    evaluate,
    iter_chain,
    trajectory_series,
)

FINITE = "finite"
CERTIFIED_INFINITE = "certified_infinite"
INCONCLUSIVE = "inconclusive"

AUTO = "auto"

SUM_BOUND = "single_point_sum_bound"
ZERO_CHAIN = "zero_chain"


class SingularPointError(PolynomialError):
    pass


@dataclass(frozen=True)
class MultiplicityResult:
    status: str
    order: int | None = None
    witness_value: Fraction | None = None
    cutoff: int | None = None
    certificate: str | None = None
    chain_values: tuple[Fraction, ...] = field(default=(), compare=False, repr=False)

    @property
    def is_finite(self) -> bool:
        return self.status == FINITE

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "order": self.order,
            "witness_value": None if self.witness_value is None else str(self.witness_value),
            "cutoff": self.cutoff,
            "certificate": self.certificate,
        }


def _check_inputs(v: VectorField, p: Polynomial, at) -> RationalPoint:
    at = as_point(at)
    if v.n != p.n or at.n != v.n:
        raise PolynomialError(f"dimension mismatch: field {v.n}, polynomial {p.n}, point {at.n}")
    laurent = p.has_negative_exponents() or any(q.has_negative_exponents() for q in v.components)
    if laurent and not at.in_torus():
        raise PolynomialError(f"point {at} is off the torus")
    if v.is_singular_at(at):
        raise SingularPointError(f"singular point of V at {at}")
    return at


def _clear_monomial(p: Polynomial) -> Polynomial:
    """Multiply by the smallest monomial making every exponent nonnegative."""
    if p.is_zero():
        return p.with_mode(AFFINE)
    shift = [max(0, -min(e[i] for e in p.support())) for i in range(p.n)]
    if not any(shift):
        return p.with_mode(AFFINE)
    return Polynomial(p.n, {tuple(a + b for a, b in zip(e, shift)): c for e, c in p.items()}, AFFINE)


def instance_degrees(v: VectorField, p: Polynomial) -> tuple[int, int]:
    """Degrees ``(d, delta)`` at which the degree-form bounds apply.

    Laurent inputs are multiplied through by monomials first: on the torus
    this neither moves the zero set of ``P`` nor the trajectories of ``V``
    (only their time parametrisation), so multiplicities are unchanged.
    """
    q = _clear_monomial(p)
    field_shift = [0] * v.n
    for comp in v.components:
        for e in comp.support():
            for i, x in enumerate(e):
                field_shift[i] = max(field_shift[i], -x)
    comps = [
        Polynomial(v.n, {tuple(a + b for a, b in zip(e, field_shift)): c for e, c in comp.items()}, AFFINE)
        for comp in v.components
    ]
    d = max(q.degree(), 1)
    delta = max(max(c.degree() for c in comps), 1)
    return d, delta


def certified_cutoff(v: VectorField, p: Polynomial) -> int:
    d, delta = instance_degrees(v, p)
    return bounds.single_point_bound(v.n, d, delta)


def multiplicity(v: VectorField, p: Polynomial, at, cutoff: int | str = AUTO) -> MultiplicityResult:
    """Order of vanishing of ``p`` along the trajectory of ``v`` through ``at``."""
    at = _check_inputs(v, p, at)
    bound = certified_cutoff(v, p)
    if cutoff == AUTO:
        limit = bound
    else:
        limit = int(cutoff)
        if limit < 0:
            raise ValueError("cutoff must be nonnegative")
    values = []
    for r, q in enumerate(iter_chain(v, p)):
        if q.is_zero():
            return MultiplicityResult(CERTIFIED_INFINITE, cutoff=r, certificate=ZERO_CHAIN,
                                      chain_values=tuple(values))
        val = evaluate(q, at)
        values.append(val)
        if val:
            return MultiplicityResult(FINITE, r, val, limit, chain_values=tuple(values))
        if r >= limit:
            break
    if limit >= bound:
        return MultiplicityResult(CERTIFIED_INFINITE, cutoff=limit, certificate=SUM_BOUND,
                                  chain_values=tuple(values))
    return MultiplicityResult(INCONCLUSIVE, cutoff=limit, chain_values=tuple(values))


def multiplicity_via_series(v: VectorField, p: Polynomial, at, order: int) -> MultiplicityResult:
    """Valuation of ``p(gamma(t))`` with ``gamma`` the formal trajectory, truncated at ``t^order``.

    The truncation order is grown geometrically up to ``order``; coefficients
    through degree ``N`` of the composite depend only on the trajectory
    through degree ``N``, so early exits are exact.
    """
    at = _check_inputs(v, p, at)
    if order < 1:
        raise ValueError("series order must be at least 1")
    n_try = min(order, 4)
    while True:
        series = trajectory_series(v, at, n_try)
        coeffs = series.compose(p)
        for j, c in enumerate(coeffs):
            if c:
                return MultiplicityResult(FINITE, j, c, order)
        if n_try == order:
            return MultiplicityResult(INCONCLUSIVE, cutoff=order)
        n_try = min(order, 2 * n_try)


@dataclass(frozen=True)
class MultiplicitySum:
    results: tuple[MultiplicityResult, ...]
    total: int
    valid: bool

    def to_dict(self) -> dict:
        return {"total": self.total, "valid": self.valid, "points": [r.to_dict() for r in self.results]}


class PointError(PolynomialError):
    def __init__(self, index: int, cause: Exception):
        self.index = index
        self.cause = cause
        super().__init__(f"point #{index}: {cause}")


def multiplicity_sum(v: VectorField, p: Polynomial, points: Sequence, cutoff: int | str = AUTO,
                     workers: int = 1) -> MultiplicitySum:
    def one(item):
        idx, pt = item
        try:
            return multiplicity(v, p, pt, cutoff)
        except PolynomialError as exc:
            raise PointError(idx, exc) from exc

    items = list(enumerate(points))
    if workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = tuple(pool.map(one, items))
    else:
        results = tuple(one(it) for it in items)
    total = sum(r.order for r in results if r.is_finite)
    return MultiplicitySum(results, total, all(r.is_finite for r in results))


@dataclass(frozen=True)
class VanishingCertificate:
    vanishes: bool
    bound_name: str
    bound_value: int
    checked_through: int
    result: MultiplicityResult


def certified_vanishing(v: VectorField, p: Polynomial, at) -> VanishingCertificate:
    """Decide whether ``p`` vanishes identically on the trajectory germ through ``at``."""
    if p.has_negative_exponents() or any(q.has_negative_exponents() for q in v.components):
        raise PolynomialError("certified vanishing needs polynomial (affine) inputs")
    res = multiplicity(v, p, at, AUTO)
    bound = certified_cutoff(v, p)
    checked = res.order if res.is_finite else res.cutoff
    return VanishingCertificate(res.status == CERTIFIED_INFINITE, SUM_BOUND, bound, checked, res)
