"""Independent oracles shared by the test modules.

Everything here works straight from definitions (multilinear evaluation,
shuffle sums, explicit sign counts) so library results can be checked
against a second, unrelated code path.
"""

from __future__ import annotations

import itertools
from math import comb

import numpy as np

from g2calc.forms import KForm, Metric, multi_indices


def evaluate(form: KForm, vectors) -> float | complex:
    """Evaluate a k-form on k vectors from the determinant definition."""
    if form.grade == 0:
        return form.coeffs[0]
    X = np.column_stack([np.asarray(v, dtype=float) for v in vectors])
    total = 0.0 * form.coeffs[0]
    for pos, idx in enumerate(multi_indices(form.dim, form.grade)):
        total += form.coeffs[pos] * np.linalg.det(X[list(idx), :])
    return total


def evaluate_wedge(a: KForm, b: KForm, vectors) -> float | complex:
    """(a ^ b)(x_1, ..., x_{k+l}) via the shuffle sum, independent of wedge()."""
    k, l = a.grade, b.grade
    total = 0.0
    for left in itertools.combinations(range(k + l), k):
        right = tuple(i for i in range(k + l) if i not in left)
        sign = 1
        for p in left:
            sign *= (-1) ** sum(1 for q in right if q < p)
        total += sign * evaluate(a, [vectors[i] for i in left]) * evaluate(
            b, [vectors[i] for i in right]
        )
    return total


def random_form(rng: np.random.Generator, n: int, k: int, scale: float = 1.0) -> KForm:
    return KForm(n, k, scale * rng.standard_normal(comb(n, k)))


def random_vector(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    return scale * rng.standard_normal(n)


def random_metric(rng: np.random.Generator, n: int, orientation: int = 1) -> Metric:
    a = rng.standard_normal((n, n))
    return Metric(n, a @ a.T + 0.5 * np.eye(n), orientation)
