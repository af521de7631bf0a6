"""Held-out evaluation of mined interpolants, pooled precision, and parameter sweeps.

Evaluation is exact: counts are integers, ratios are rationals, and floats
appear only in written artifacts.  Zero-support interpolants have undefined
precision; averages skip them and report how many were skipped, rather than
imputing a value.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .dataset import Dataset
from .errors import BitpError, ContractError
from .miner import MiningParams, conj_interp


@dataclass(frozen=True)
class EvalResult:
    """Test-set quality of one interpolant against one conclusion."""

    precision: Fraction | None
    recall: Fraction | None
    support: int
    b_support: int
    joint_support: int
    complexity: int

    def to_obj(self) -> dict:
        return {
            "precision": None if self.precision is None else float(self.precision),
            "recall": None if self.recall is None else float(self.recall),
            "support": self.support,
            "b_support": self.b_support,
            "joint_support": self.joint_support,
            "complexity": self.complexity,
        }


def evaluate(interpolant, conclusion, test_set: Dataset) -> EvalResult:
    """Exact precision/recall/support counts of ``interpolant`` for ``conclusion``."""
    if len(test_set) == 0:
        raise ContractError("cannot evaluate on an empty dataset")
    i_mask = interpolant.mask(test_set)
    b_mask = conclusion.mask(test_set)
    support = int(np.count_nonzero(i_mask))
    b_support = int(np.count_nonzero(b_mask))
    joint = int(np.count_nonzero(i_mask & b_mask))
    complexity = getattr(interpolant, "complexity", 0)
    return EvalResult(
        precision=None if support == 0 else Fraction(joint, support),
        recall=None if b_support == 0 else Fraction(joint, b_support),
        support=support,
        b_support=b_support,
        joint_support=joint,
        complexity=complexity,
    )


def pooled_precision(cases: Sequence[tuple], test_set: Dataset) -> Fraction | None:
    """Joint hits over joint support, summed across (interpolant, conclusion) cases.

    Zero-support cases contribute nothing; if every case has zero support the
    pooled value is undefined (``None``).
    """
    total_support = 0
    total_joint = 0
    for interpolant, conclusion in cases:
        i_mask = interpolant.mask(test_set)
        b_mask = conclusion.mask(test_set)
        total_support += int(np.count_nonzero(i_mask))
        total_joint += int(np.count_nonzero(i_mask & b_mask))
    if total_support == 0:
        return None
    return Fraction(total_joint, total_support)


@dataclass(frozen=True)
class SweepPoint:
    gamma: float
    mu: float
    avg_precision: Fraction | None
    avg_recall: Fraction | None
    avg_complexity: Fraction
    n_undefined: int
    n_total: int
    n_failed: int

    def to_obj(self) -> dict:
        return {
            "gamma": self.gamma,
            "mu": self.mu,
            "avg_precision": None if self.avg_precision is None else float(self.avg_precision),
            "avg_recall": None if self.avg_recall is None else float(self.avg_recall),
            "avg_complexity": float(self.avg_complexity),
            "n_undefined": self.n_undefined,
            "n_total": self.n_total,
            "n_failed": self.n_failed,
        }


@dataclass(frozen=True)
class SweepResult:
    points: tuple[SweepPoint, ...]


def sweep(
    premises: Sequence,
    conclusions: Sequence,
    train_set: Dataset,
    test_set: Dataset,
    alpha: float,
    gamma_grid: Sequence[float],
    mu_grid: Sequence[float],
    kappa: int,
    vocabulary: Sequence[str],
    run_many: Callable | None = None,
) -> SweepResult:
    """Mine every premise at every (gamma, mu) grid point and average test metrics.

    Per-premise mining failures are recorded in the point's ``n_failed``, not
    raised.  ``run_many`` lets the caller parallelize the per-point batch; it
    must preserve input order (default: sequential map).
    """
    if not gamma_grid or not mu_grid:
        raise ContractError("sweep needs a nonempty (gamma, mu) grid")
    if len(premises) == 0 or len(premises) != len(conclusions):
        raise ContractError("premises and conclusions must be matched nonempty batches")
    if run_many is None:
        run_many = lambda fn, items: [fn(x) for x in items]

    points = []
    for gamma in gamma_grid:
        for mu in mu_grid:
            params = MiningParams(alpha, gamma, mu, kappa, tuple(vocabulary))

            def mine_one(pair):
                premise, conclusion = pair
                try:
                    report = conj_interp(premise, conclusion, train_set, params)
                except BitpError as exc:
                    return ("failed", str(exc))
                result = evaluate(report.interpolant, conclusion, test_set)
                return ("ok", result)

            outcomes = run_many(mine_one, list(zip(premises, conclusions)))
            points.append(_aggregate(gamma, mu, outcomes))
    return SweepResult(tuple(points))


def _aggregate(gamma: float, mu: float, outcomes) -> SweepPoint:
    precisions: list[Fraction] = []
    recalls: list[Fraction] = []
    complexities: list[int] = []
    n_undefined = 0
    n_failed = 0
    for status, payload in outcomes:
        if status == "failed":
            n_failed += 1
            continue
        result: EvalResult = payload
        complexities.append(result.complexity)
        if result.precision is None:
            n_undefined += 1
        else:
            precisions.append(result.precision)
        if result.recall is not None:
            recalls.append(result.recall)
    return SweepPoint(
        gamma=gamma,
        mu=mu,
        avg_precision=sum(precisions, Fraction(0)) / len(precisions) if precisions else None,
        avg_recall=sum(recalls, Fraction(0)) / len(recalls) if recalls else None,
        avg_complexity=(
            Fraction(sum(complexities), len(complexities)) if complexities else Fraction(0)
        ),
        n_undefined=n_undefined,
        n_total=len(outcomes),
        n_failed=n_failed,
    )


SWEEP_CSV_COLUMNS = (
    "gamma",
    "mu",
    "avg_precision",
    "avg_recall",
    "avg_complexity",
    "n_undefined",
    "n_total",
)


def write_sweep_csv(result: SweepResult, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SWEEP_CSV_COLUMNS)
        for p in result.points:
            writer.writerow(
                [
                    repr(p.gamma),
                    repr(p.mu),
                    "" if p.avg_precision is None else repr(float(p.avg_precision)),
                    "" if p.avg_recall is None else repr(float(p.avg_recall)),
                    repr(float(p.avg_complexity)),
                    p.n_undefined,
                    p.n_total,
                ]
            )


def write_sweep_gnuplot(result: SweepResult, path) -> None:
    """Same table as the CSV, space-separated, blank line between gamma blocks."""
    lines = ["# " + " ".join(SWEEP_CSV_COLUMNS)]
    last_gamma = None
    for p in result.points:
        if last_gamma is not None and p.gamma != last_gamma:
            lines.append("")
        last_gamma = p.gamma
        lines.append(
            " ".join(
                [
                    repr(p.gamma),
                    repr(p.mu),
                    "nan" if p.avg_precision is None else repr(float(p.avg_precision)),
                    "nan" if p.avg_recall is None else repr(float(p.avg_recall)),
                    repr(float(p.avg_complexity)),
                    str(p.n_undefined),
                    str(p.n_total),
                ]
            )
        )
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
