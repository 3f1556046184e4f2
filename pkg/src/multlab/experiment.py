"""Seeded random soundness experiments: multiplicities against the proven bounds."""
from __future__ import annotations

import csv
import io
import itertools
import os
import random
from dataclasses import asdict, dataclass
from fractions import Fraction

from . import bounds
from .multiplicity import AUTO, multiplicity, instance_degrees
from .polyalg import Polynomial, RationalPoint, VectorField, evaluate, format_poly, parse_poly

SEED_ENV = "MULTLAB_SEED"
MAX_RETRIES = 100

CSV_FIELDS = ["instance", "n", "d", "delta", "field", "poly", "point", "status", "order",
              "sum_bound", "gabrielov_bound", "pass"]


class GenerationError(RuntimeError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    n: int = 2
    d: int = 3
    delta: int = 2
    trials: int = 100
    seed: int = 1
    coeff_range: int = 3
    cutoff: int | str = AUTO

    def __post_init__(self):
        if self.n < 1 or self.d < 1 or self.delta < 1 or self.trials < 0 or self.coeff_range < 1:
            raise ValueError(f"invalid experiment configuration: {self}")

    def with_env(self) -> ExperimentConfig:
        raw = os.environ.get(SEED_ENV)
        if raw is None:
            return self
        return ExperimentConfig(**{**asdict(self), "seed": int(raw)})


@dataclass(frozen=True)
class Instance:
    index: int
    field: VectorField
    poly: Polynomial
    point: RationalPoint

    def to_dict(self) -> dict:
        return {
            "instance": self.index,
            "n": self.field.n,
            "field": [str(q) for q in self.field.components],
            "poly": str(self.poly),
            "point": [str(x) for x in self.point],
        }

    @classmethod
    def from_dict(cls, data: dict) -> Instance:
        n = data["n"]
        return cls(data["instance"], VectorField.parse(data["field"], n),
                   parse_poly(data["poly"], n), RationalPoint(Fraction(x) for x in data["point"]))


def random_polynomial(rng: random.Random, n: int, degree: int, coeff_range: int) -> Polynomial:
    terms = {}
    for exp in itertools.product(range(degree + 1), repeat=n):
        if sum(exp) <= degree and rng.random() < 0.5:
            c = rng.randint(-coeff_range, coeff_range)
            if c:
                terms[exp] = c
    return Polynomial(n, terms)


def _random_point(rng: random.Random, n: int) -> RationalPoint:
    return RationalPoint(Fraction(rng.randint(-3, 3), rng.randint(1, 2)) for _ in range(n))


def generate_instance(config: ExperimentConfig, index: int) -> Instance:
    """Instance ``index`` of the stream; depends only on ``(seed, index)``."""
    rng = random.Random(f"{config.seed}:{index}")
    n = config.n
    point = _random_point(rng, n)
    for _ in range(MAX_RETRIES):
        poly = random_polynomial(rng, n, config.d, config.coeff_range)
        poly = poly - evaluate(poly, point)
        if poly.degree() >= 1:
            break
    else:
        raise GenerationError(f"instance {index}: could not draw a nonconstant polynomial")
    for _ in range(MAX_RETRIES):
        field = VectorField([random_polynomial(rng, n, config.delta, config.coeff_range) for _ in range(n)])
        if not field.is_singular_at(point):
            return Instance(index, field, poly, point)
    raise GenerationError(f"instance {index}: no field non-singular at {point} after {MAX_RETRIES} draws")


def run_instance(inst: Instance, cutoff: int | str = AUTO) -> dict:
    v, p = inst.field, inst.poly
    n = v.n
    d, delta = instance_degrees(v, p)
    res = multiplicity(v, p, inst.point, cutoff)
    sum_bound = bounds.single_point_bound(n, d, delta)
    gab = bounds.gabrielov_bound(n, d, delta)
    ok = not res.is_finite or (res.order <= sum_bound and res.order <= gab)
    return {
        "instance": inst.index,
        "n": n,
        "d": d,
        "delta": delta,
        "field": "; ".join(format_poly(q) for q in v.components),
        "poly": format_poly(p),
        "point": " ".join(str(x) for x in inst.point),
        "status": res.status,
        "order": "" if res.order is None else res.order,
        "sum_bound": sum_bound,
        "gabrielov_bound": gab,
        "pass": "pass" if ok else "FAIL",
    }


def run_experiment(config: ExperimentConfig) -> tuple[list[dict], list[Instance]]:
    rows, failures = [], []
    for i in range(config.trials):
        inst = generate_instance(config, i)
        row = run_instance(inst, config.cutoff)
        rows.append(row)
        if row["pass"] != "pass":
            failures.append(inst)
    return rows, failures


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()
