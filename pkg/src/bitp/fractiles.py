"""Empirical fractiles: order-statistic thresholds of conditioned columns.

The upper fractile at probability ``p`` is the least column value ``c`` with
``P(v <= c | condition) >= p``; the lower fractile is the greatest ``c`` with
``P(v >= c | condition) >= p``.  Both are order statistics of the conditioned
column (rank ``ceil(p*n)``), never interpolated, so every returned bound is a
value some row actually takes.  Rank arithmetic is exact: ``p`` is treated as
the exact rational value of the given float.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .dataset import Dataset, condition
from .errors import ContractError, EvaluationError, UndefinedMeasureError


def _as_fraction(p) -> Fraction:
    p = Fraction(p)
    if not 0 < p <= 1:
        raise ContractError(f"fractile probability must be in (0, 1], got {p}")
    return p


def rank(p, n: int) -> int:
    """Least k with k/n >= p, i.e. ceil(p*n) computed over exact rationals."""
    p = _as_fraction(p)
    if n < 1:
        raise UndefinedMeasureError("fractile of an empty row set")
    scaled = p * n
    return -(-scaled.numerator // scaled.denominator)


def upper_from_sorted(sorted_values: np.ndarray, p):
    """Rank-``ceil(p*n)`` smallest element of an ascending array."""
    k = rank(p, len(sorted_values))
    return sorted_values[k - 1].item()


def lower_from_sorted(sorted_values: np.ndarray, p):
    """Rank-``ceil(p*n)`` largest element of an ascending array."""
    n = len(sorted_values)
    k = rank(p, n)
    return sorted_values[n - k].item()


def _conditioned_sorted(dataset: Dataset, observable: str, formula) -> np.ndarray:
    obs = dataset.observable(observable)
    if not obs.is_numeric:
        raise EvaluationError(f"fractiles are not defined on categorical column '{observable}'")
    restricted = condition(dataset, formula)
    if len(restricted) == 0:
        raise UndefinedMeasureError(
            f"fractile of '{observable}' conditioned on a zero-support formula"
        )
    return restricted.sorted_values(observable)


def upper_fractile(dataset: Dataset, p, observable: str, formula):
    """Least value c of the conditioned column with P(v <= c | formula) >= p."""
    return upper_from_sorted(_conditioned_sorted(dataset, observable, formula), p)


def lower_fractile(dataset: Dataset, p, observable: str, formula):
    """Greatest value c of the conditioned column with P(v >= c | formula) >= p."""
    return lower_from_sorted(_conditioned_sorted(dataset, observable, formula), p)
