from __future__ import annotations

import itertools
from fractions import Fraction

from hypothesis import strategies as st

from multlab.polyalg import Polynomial, VectorField

small_ints = st.integers(min_value=-3, max_value=3)
rationals = st.builds(Fraction, st.integers(-5, 5), st.integers(1, 4))


@st.composite
def polynomials(draw, n: int = 2, max_degree: int = 3, max_terms: int = 5):
    exps = [e for e in itertools.product(range(max_degree + 1), repeat=n) if sum(e) <= max_degree]
    chosen = draw(st.lists(st.sampled_from(exps), max_size=max_terms, unique=True))
    return Polynomial(n, {e: draw(small_ints) for e in chosen})


@st.composite
def laurent_polynomials(draw, n: int = 2, max_terms: int = 4):
    exps = list(itertools.product(range(-2, 3), repeat=n))
    chosen = draw(st.lists(st.sampled_from(exps), max_size=max_terms, unique=True))
    return Polynomial(n, {e: draw(rationals) for e in chosen}, "torus")


@st.composite
def vector_fields(draw, n: int = 2, max_degree: int = 2):
    return VectorField([draw(polynomials(n, max_degree, 4)) for _ in range(n)])


@st.composite
def points(draw, n: int = 2):
    return tuple(draw(rationals) for _ in range(n))
