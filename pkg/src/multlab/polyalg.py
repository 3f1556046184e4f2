"""Exact sparse Laurent polynomials, vector fields and formal trajectories.

Coefficients are :class:`fractions.Fraction` throughout.  A polynomial
carries a *mode*: ``"affine"`` forbids negative exponents, ``"torus"``
allows them.  Values are immutable once built.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

AFFINE = "affine"
TORUS = "torus"
MODES = (AFFINE, TORUS)

Exponent = tuple[int, ...]


class PolynomialError(ValueError):
    pass


class ParseError(PolynomialError):
    def __init__(self, message: str, text: str, pos: int):
        self.text = text
        self.pos = pos
        super().__init__(f"{message} at position {pos}: {text!r}")


def as_rational(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError("floating point values are not accepted; use Fraction or str")
    return Fraction(value)


def _check_mode(mode: str) -> str:
    if mode not in MODES:
        raise PolynomialError(f"unknown mode {mode!r}")
    return mode


def _join_mode(a: str, b: str) -> str:
    return TORUS if TORUS in (a, b) else AFFINE


class Polynomial:
    """Sparse Laurent polynomial in ``n`` variables with rational coefficients."""

    __slots__ = ("n", "mode", "_terms", "_hash")

    def __init__(self, n: int, terms: Mapping[Exponent, object] | Iterable = (), mode: str = AFFINE):
        if n < 1:
            raise PolynomialError("dimension must be positive")
        self.n = n
        self.mode = _check_mode(mode)
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Exponent, Fraction] = {}
        for exp, coeff in items:
            exp = tuple(int(e) for e in exp)
            if len(exp) != n:
                raise PolynomialError(f"exponent {exp} has wrong length for n={n}")
            if mode == AFFINE and any(e < 0 for e in exp):
                raise PolynomialError(f"negative exponent {exp} in affine mode")
            c = acc.get(exp, Fraction(0)) + as_rational(coeff)
            if c:
                acc[exp] = c
            else:
                acc.pop(exp, None)
        self._terms = dict(sorted(acc.items()))
        self._hash = None

    @classmethod
    def _raw(cls, n: int, terms: dict[Exponent, Fraction], mode: str) -> Polynomial:
        obj = cls.__new__(cls)
        obj.n = n
        obj.mode = mode
        obj._terms = dict(sorted((e, c) for e, c in terms.items() if c))
        obj._hash = None
        return obj

    # construction helpers
    @classmethod
    def zero(cls, n: int, mode: str = AFFINE) -> Polynomial:
        return cls._raw(n, {}, mode)

    @classmethod
    def constant(cls, n: int, c, mode: str = AFFINE) -> Polynomial:
        return cls._raw(n, {(0,) * n: as_rational(c)}, mode)

    @classmethod
    def monomial(cls, exp: Sequence[int], coeff=1, mode: str = AFFINE) -> Polynomial:
        return cls(len(exp), {tuple(exp): coeff}, mode)

    @classmethod
    def variable(cls, n: int, i: int, mode: str = AFFINE) -> Polynomial:
        """The coordinate ``x_i`` (1-based)."""
        if not 1 <= i <= n:
            raise PolynomialError(f"variable index {i} out of range 1..{n}")
        exp = [0] * n
        exp[i - 1] = 1
        return cls._raw(n, {tuple(exp): Fraction(1)}, mode)

    # basic accessors
    @property
    def terms(self) -> dict[Exponent, Fraction]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[Exponent, Fraction]]:
        return iter(self._terms.items())

    def support(self) -> list[Exponent]:
        return list(self._terms)

    def coefficient(self, exp: Sequence[int]) -> Fraction:
        return self._terms.get(tuple(exp), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def degree(self) -> int:
        """Total degree; ``-1`` for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    def has_negative_exponents(self) -> bool:
        return any(x < 0 for e in self._terms for x in e)

    def with_mode(self, mode: str) -> Polynomial:
        if mode == self.mode:
            return self
        return Polynomial(self.n, self._terms, mode)

    # equality / hashing
    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self.n == other.n and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == ({(0,) * self.n: Fraction(other)} if other else {})
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n, tuple(self._terms.items())))
        return self._hash

    # arithmetic
    def _coerce(self, other) -> Polynomial:
        if isinstance(other, Polynomial):
            if other.n != self.n:
                raise PolynomialError(f"dimension mismatch: {self.n} vs {other.n}")
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(self.n, other, self.mode)
        raise TypeError(f"cannot combine Polynomial with {type(other).__name__}")

    def __add__(self, other) -> Polynomial:
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        acc = dict(self._terms)
        for e, c in other._terms.items():
            acc[e] = acc.get(e, 0) + c
        return Polynomial._raw(self.n, acc, _join_mode(self.mode, other.mode))

    __radd__ = __add__

    def __neg__(self) -> Polynomial:
        return Polynomial._raw(self.n, {e: -c for e, c in self._terms.items()}, self.mode)

    def __sub__(self, other) -> Polynomial:
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> Polynomial:
        return (-self) + other

    def scale(self, c) -> Polynomial:
        c = as_rational(c)
        return Polynomial._raw(self.n, {e: c * v for e, v in self._terms.items()}, self.mode)

    def __mul__(self, other) -> Polynomial:
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        acc: dict[Exponent, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                acc[e] = acc.get(e, 0) + c1 * c2
        return Polynomial._raw(self.n, acc, _join_mode(self.mode, other.mode))

    __rmul__ = __mul__

    def __pow__(self, k: int) -> Polynomial:
        if k < 0:
            if len(self._terms) == 1 and self.mode == TORUS:
                (e, c), = self._terms.items()
                return Polynomial._raw(self.n, {tuple(x * k for x in e): c ** k}, TORUS)
            raise PolynomialError("negative powers only for torus monomials")
        result = Polynomial.constant(self.n, 1, self.mode)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # calculus and evaluation
    def evaluate(self, point: Sequence) -> Fraction:
        return evaluate(self, point)

    def __call__(self, *point) -> Fraction:
        if len(point) == 1 and isinstance(point[0], (list, tuple, RationalPoint)):
            point = point[0]
        return evaluate(self, point)

    def diff(self, i: int) -> Polynomial:
        return differentiate(self, i)

    def __repr__(self) -> str:
        return f"Polynomial({self.n}, {format_poly(self)!r}, mode={self.mode!r})"

    def __str__(self) -> str:
        return format_poly(self)


@dataclass(frozen=True)
class RationalPoint:
    coordinates: tuple[Fraction, ...]

    def __init__(self, coordinates: Iterable):
        object.__setattr__(self, "coordinates", tuple(as_rational(c) for c in coordinates))

    @property
    def n(self) -> int:
        return len(self.coordinates)

    def in_torus(self) -> bool:
        return all(self.coordinates)

    def __iter__(self):
        return iter(self.coordinates)

    def __len__(self) -> int:
        return len(self.coordinates)

    def __getitem__(self, i):
        return self.coordinates[i]

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.coordinates) + ")"


def as_point(point) -> RationalPoint:
    return point if isinstance(point, RationalPoint) else RationalPoint(point)


def evaluate(p: Polynomial, at) -> Fraction:
    """Exact value of ``p`` at a rational point."""
    at = as_point(at)
    if at.n != p.n:
        raise PolynomialError(f"dimension mismatch: polynomial in {p.n} variables, point of length {at.n}")
    total = Fraction(0)
    for exp, c in p.items():
        term = c
        for x, e in zip(at.coordinates, exp):
            if e:
                if e < 0 and x == 0:
                    raise PolynomialError("zero coordinate raised to a negative exponent")
                term *= x ** e
        total += term
    return total


def differentiate(p: Polynomial, i: int) -> Polynomial:
    """Partial derivative with respect to ``x_i`` (1-based)."""
    if not 1 <= i <= p.n:
        raise PolynomialError(f"variable index {i} out of range 1..{p.n}")
    k = i - 1
    acc = {}
    for exp, c in p.items():
        e = exp[k]
        if e:
            new = exp[:k] + (e - 1,) + exp[k + 1:]
            acc[new] = c * e
    return Polynomial._raw(p.n, acc, p.mode)


def translate(p: Polynomial, shift: Sequence) -> Polynomial:
    """``p(x + shift)``; affine mode only."""
    if p.mode != AFFINE:
        raise PolynomialError("translation is only defined for affine polynomials")
    shift = [as_rational(c) for c in shift]
    if len(shift) != p.n:
        raise PolynomialError("shift has wrong length")
    n = p.n
    # (x_k + c_k)^e expanded once per (k, e)
    cache: dict[tuple[int, int], Polynomial] = {}

    def lin_pow(k: int, e: int) -> Polynomial:
        key = (k, e)
        if key not in cache:
            acc = {}
            for j in range(e + 1):
                exp = [0] * n
                exp[k] = j
                acc[tuple(exp)] = Fraction(math.comb(e, j)) * shift[k] ** (e - j)
            cache[key] = Polynomial._raw(n, acc, AFFINE)
        return cache[key]

    result = Polynomial.zero(n)
    for exp, c in p.items():
        term = Polynomial.constant(n, c)
        for k, e in enumerate(exp):
            if e:
                term = term * lin_pow(k, e)
        result = result + term
    return result


# --------------------------------------------------------------------------
# text format

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<var>x(?P<idx>\d+))|(?P<op>[-+*/^()]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            start = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[start]!r}", text, start)
        if m.group("num") is not None:
            tokens.append(("num", m.group("num"), m.start("num")))
        elif m.group("var") is not None:
            tokens.append(("var", m.group("idx"), m.start("var")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, n: int, mode: str):
        self.text = text
        self.n = n
        self.mode = mode
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, self.text, tok[2])

    def expect_op(self, op):
        tok = self.take()
        if tok[0] != "op" or tok[1] != op:
            self.error(f"expected {op!r}", tok)
        return tok

    def integer(self) -> int:
        sign = 1
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "(":
            self.take()
            value = self.integer()
            self.expect_op(")")
            return value
        if tok[0] == "op" and tok[1] in "+-":
            self.take()
            sign = -1 if tok[1] == "-" else 1
        tok = self.take()
        if tok[0] != "num":
            self.error("expected integer exponent", tok)
        return sign * int(tok[1])

    def parse(self) -> Polynomial:
        acc: dict[Exponent, Fraction] = {}
        first = True
        while True:
            tok = self.peek()
            sign = 1
            if tok[0] == "op" and tok[1] in "+-":
                self.take()
                sign = -1 if tok[1] == "-" else 1
            elif not first:
                if tok[0] == "end":
                    break
                self.error("expected '+' or '-'")
            if self.peek()[0] == "end":
                self.error("expected a term")
            coeff, exp = self.term()
            acc[exp] = acc.get(exp, 0) + sign * coeff
            first = False
            if self.peek()[0] == "end":
                break
        return Polynomial(self.n, acc, self.mode)

    def term(self) -> tuple[Fraction, Exponent]:
        coeff = Fraction(1)
        exp = [0] * self.n
        tok = self.peek()
        saw_factor = False
        if tok[0] == "num":
            self.take()
            coeff = Fraction(int(tok[1]))
            if self.peek()[:2] == ("op", "/"):
                self.take()
                den = self.take()
                if den[0] != "num":
                    self.error("expected denominator", den)
                if int(den[1]) == 0:
                    self.error("zero denominator", den)
                coeff /= int(den[1])
            saw_factor = True
            if self.peek()[:2] == ("op", "*"):
                self.take()
                if self.peek()[0] != "var":
                    self.error("expected variable after '*'")
        while self.peek()[0] == "var":
            var = self.take()
            k = int(var[1])
            if not 1 <= k <= self.n:
                self.error(f"variable index {k} out of range 1..{self.n}", var)
            e = 1
            if self.peek()[:2] == ("op", "^"):
                self.take()
                etok = self.peek()
                e = self.integer()
                if e < 0 and self.mode == AFFINE:
                    self.error("negative exponent in affine mode", etok)
            exp[k - 1] += e
            saw_factor = True
            if self.peek()[:2] == ("op", "*"):
                self.take()
                if self.peek()[0] != "var":
                    self.error("expected variable after '*'")
        if not saw_factor:
            self.error("expected coefficient or variable")
        return coeff, tuple(exp)


def parse_poly(text: str, n: int, mode: str = AFFINE) -> Polynomial:
    """Parse ``text`` such as ``"x1^2*x2 - 3/2*x2^-1"`` into a polynomial."""
    _check_mode(mode)
    if n < 1:
        raise PolynomialError("dimension must be positive")
    return _Parser(text, n, mode).parse()


def _format_monomial(exp: Exponent) -> str:
    parts = []
    for k, e in enumerate(exp, start=1):
        if e == 1:
            parts.append(f"x{k}")
        elif e:
            parts.append(f"x{k}^{e}")
    return "*".join(parts)


def format_poly(p: Polynomial) -> str:
    """Canonical text form, leading (lexicographically largest) term first."""
    if p.is_zero():
        return "0"
    out = []
    for exp, c in reversed(list(p.items())):
        mono = _format_monomial(exp)
        mag = abs(c)
        if not mono:
            body = str(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{mag}*{mono}"
        if not out:
            out.append(body if c > 0 else "-" + body)
        else:
            out.append(("+ " if c > 0 else "- ") + body)
    return " ".join(out)


# --------------------------------------------------------------------------
# vector fields


class VectorField:
    """``V = sum_i Q_i d/dx_i`` with polynomial components sharing ``n`` and mode."""

    __slots__ = ("n", "mode", "components")

    def __init__(self, components: Sequence[Polynomial], mode: str | None = None):
        components = tuple(components)
        if not components:
            raise PolynomialError("a vector field needs at least one component")
        n = components[0].n
        if len(components) != n:
            raise PolynomialError(f"expected {n} components, got {len(components)}")
        if any(q.n != n for q in components):
            raise PolynomialError("components have mismatched dimensions")
        if mode is None:
            mode = TORUS if any(q.mode == TORUS for q in components) else AFFINE
        _check_mode(mode)
        self.n = n
        self.mode = mode
        self.components = tuple(q.with_mode(mode) for q in components)

    @classmethod
    def parse(cls, texts: Sequence[str], n: int | None = None, mode: str = AFFINE) -> VectorField:
        n = len(texts) if n is None else n
        return cls([parse_poly(t, n, mode) for t in texts], mode)

    def degree(self) -> int:
        """Maximum total degree of the components (``-1`` for the zero field)."""
        return max(q.degree() for q in self.components)

    def is_zero(self) -> bool:
        return all(q.is_zero() for q in self.components)

    def at(self, point) -> tuple[Fraction, ...]:
        return tuple(evaluate(q, point) for q in self.components)

    def is_singular_at(self, point) -> bool:
        return not any(self.at(point))

    def translate(self, shift: Sequence) -> VectorField:
        return VectorField([translate(q, shift) for q in self.components], self.mode)

    def scale(self, factor: Polynomial) -> VectorField:
        return VectorField([factor * q for q in self.components], _join_mode(self.mode, factor.mode))

    def __eq__(self, other) -> bool:
        return isinstance(other, VectorField) and self.components == other.components

    def __hash__(self) -> int:
        return hash(self.components)

    def __repr__(self) -> str:
        return f"VectorField({[format_poly(q) for q in self.components]!r}, mode={self.mode!r})"


def lie_derivative(v: VectorField, p: Polynomial) -> Polynomial:
    """``V p = sum_i Q_i * dp/dx_i``."""
    if v.n != p.n:
        raise PolynomialError(f"dimension mismatch: field in {v.n}, polynomial in {p.n} variables")
    if p.mode == TORUS and v.mode == AFFINE and p.has_negative_exponents():
        raise PolynomialError("mode mismatch: Laurent polynomial with an affine field")
    mode = _join_mode(v.mode, p.mode)
    acc: dict[Exponent, Fraction] = {}
    for i, q in enumerate(v.components, start=1):
        if q.is_zero():
            continue
        dp = differentiate(p, i)
        for e1, c1 in q.items():
            for e2, c2 in dp.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                acc[e] = acc.get(e, 0) + c1 * c2
    return Polynomial._raw(p.n, acc, mode)


def iter_chain(v: VectorField, p: Polynomial) -> Iterator[Polynomial]:
    """Lazily yield ``p, Vp, V^2 p, ...``."""
    current = p
    while True:
        yield current
        current = lie_derivative(v, current)


def derivative_chain(v: VectorField, p: Polynomial, length: int) -> list[Polynomial]:
    if length < 1:
        raise PolynomialError("chain length must be at least 1")
    out = []
    for q in iter_chain(v, p):
        out.append(q)
        if len(out) == length:
            return out
    raise AssertionError("unreachable")


# --------------------------------------------------------------------------
# truncated power series in one formal variable t


def _series_mul(a: list[Fraction], b: list[Fraction], order: int) -> list[Fraction]:
    out = [Fraction(0)] * (order + 1)
    for i, x in enumerate(a[: order + 1]):
        if not x:
            continue
        for j in range(min(len(b), order + 1 - i)):
            y = b[j]
            if y:
                out[i + j] += x * y
    return out


def _series_inverse(a: list[Fraction], order: int) -> list[Fraction]:
    if not a[0]:
        raise PolynomialError("series with zero constant term has no inverse")
    inv = [Fraction(0)] * (order + 1)
    inv[0] = 1 / a[0]
    for k in range(1, order + 1):
        s = sum((a[j] * inv[k - j] for j in range(1, min(k, len(a) - 1) + 1)), Fraction(0))
        inv[k] = -s * inv[0]
    return inv


def _series_pow(a: list[Fraction], e: int, order: int) -> list[Fraction]:
    if e < 0:
        a = _series_inverse(a, order)
        e = -e
    result = [Fraction(1)] + [Fraction(0)] * order
    base = a
    while e:
        if e & 1:
            result = _series_mul(result, base, order)
        e >>= 1
        if e:
            base = _series_mul(base, base, order)
    return result


def compose_series(p: Polynomial, entries: Sequence[Sequence[Fraction]], order: int) -> list[Fraction]:
    """Coefficients of ``p(x(t))`` through degree ``order``."""
    total = [Fraction(0)] * (order + 1)
    powers: dict[tuple[int, int], list[Fraction]] = {}
    for exp, c in p.items():
        term = [c] + [Fraction(0)] * order
        for k, e in enumerate(exp):
            if e:
                key = (k, e)
                if key not in powers:
                    powers[key] = _series_pow(list(entries[k]), e, order)
                term = _series_mul(term, powers[key], order)
        for j in range(order + 1):
            total[j] += term[j]
    return total


@dataclass(frozen=True)
class SeriesVector:
    """Truncated formal curve ``x(t)``; each entry holds ``order + 1`` coefficients."""

    n: int
    order: int
    entries: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        if len(self.entries) != self.n:
            raise PolynomialError("wrong number of series entries")
        if any(len(e) != self.order + 1 for e in self.entries):
            raise PolynomialError("every entry must carry order + 1 coefficients")

    def compose(self, p: Polynomial) -> list[Fraction]:
        return compose_series(p, self.entries, self.order)


def trajectory_series(v: VectorField, start, order: int) -> SeriesVector:
    """Formal solution of ``x' = Q(x)``, ``x(0) = start``, through ``t^order``."""
    start = as_point(start)
    if start.n != v.n:
        raise PolynomialError(f"dimension mismatch: field in {v.n}, point of length {start.n}")
    if order < 1:
        raise PolynomialError("series order must be at least 1")
    needs_torus = any(q.has_negative_exponents() for q in v.components)
    if needs_torus and not start.in_torus():
        raise PolynomialError("start point must lie in the torus for a Laurent field")
    coeffs = [[x] + [Fraction(0)] * order for x in start.coordinates]
    # coefficient k of x_i is [t^(k-1)] Q_i(x(t)) / k, which needs x only through degree k-1
    for k in range(1, order + 1):
        truncated = [c[:k] + [Fraction(0)] * (order + 1 - k) for c in coeffs]
        for i, q in enumerate(v.components):
            val = compose_series(q, truncated, k - 1)[k - 1]
            coeffs[i][k] = val / k
    return SeriesVector(v.n, order, tuple(tuple(c) for c in coeffs))


# --------------------------------------------------------------------------
# deformation P + e * (c_0 + c_1 l + ... + c_{n-1} l^{n-1})


@dataclass(frozen=True)
class Deformation:
    base: Polynomial
    pivot: Polynomial
    coefficients: tuple[Fraction, ...]

    def perturbation(self) -> Polynomial:
        n = self.base.n
        out = Polynomial.zero(n, self.base.mode)
        power = Polynomial.constant(n, 1, self.base.mode)
        for c in self.coefficients:
            out = out + power.scale(c)
            power = power * self.pivot
        return out

    def at(self, e) -> Polynomial:
        """The member of the family at parameter value ``e``."""
        return self.base + self.perturbation().scale(as_rational(e))

    def family(self) -> Polynomial:
        """The whole family as a polynomial in ``n + 1`` variables, ``e`` last."""
        n = self.base.n
        acc: dict[Exponent, Fraction] = {}
        for exp, c in self.base.items():
            acc[exp + (0,)] = c
        for exp, c in self.perturbation().items():
            key = exp + (1,)
            acc[key] = acc.get(key, 0) + c
        return Polynomial(n + 1, acc, self.base.mode)


def make_deformation(p: Polynomial, pivot: Polynomial, coeffs: Sequence) -> Deformation:
    if pivot.n != p.n:
        raise PolynomialError("pivot dimension does not match the polynomial")
    if pivot.has_negative_exponents() or pivot.degree() > 1:
        raise PolynomialError("pivot must be an affine-linear form")
    coeffs = tuple(as_rational(c) for c in coeffs)
    if len(coeffs) != p.n:
        raise PolynomialError(f"expected {p.n} coefficients, got {len(coeffs)}")
    return Deformation(p, pivot, coeffs)
