"""Mining of bound-predicate interpolants.

``atomic_interp`` builds one lower- and one upper-bound candidate per
vocabulary observable from fractiles of the premise- and conclusion-
conditioned data, then returns the candidate of maximal precision.
``conj_interp`` boosts precision by conjoining atomic results, shrinking the
working set to the rows the interpolant still admits and decaying the recall
floor each round, until the precision target or the complexity cap is hit.

All probability comparisons are exact (integer counts against the exact
rational value of each hyperparameter), so runs are reproducible bit-for-bit
across platforms.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .dataset import Dataset, condition, conditional
from .errors import ContractError, NoCandidateError
from .fractiles import lower_from_sorted, upper_from_sorted
from .predicates import TRUE, Atom, Conjunction, conjoin

PRECISION_MET = "precision_met"
COMPLEXITY_CAP = "complexity_cap"
STAGNATION = "stagnation"

_REL_RANK = {"le": 0, "ge": 1}


@dataclass(frozen=True)
class MiningParams:
    """Search parameters: precision target, recall floor and its decay, size cap, vocabulary."""

    alpha: float
    gamma: float
    mu: float
    kappa: int
    vocabulary: tuple[str, ...]

    def __post_init__(self):
        a, g, m = Fraction(self.alpha), Fraction(self.gamma), Fraction(self.mu)
        if not 0 < a <= 1:
            raise ContractError(f"alpha must be in (0, 1], got {self.alpha}")
        if not 0 < g <= 1:
            raise ContractError(f"gamma must be in (0, 1], got {self.gamma}")
        if not 0 < m <= 1:
            raise ContractError(f"mu must be in (0, 1], got {self.mu}")
        if self.kappa < 1:
            raise ContractError(f"kappa must be >= 1, got {self.kappa}")
        if not self.vocabulary:
            raise ContractError("vocabulary must be nonempty")
        object.__setattr__(self, "vocabulary", tuple(self.vocabulary))

    @property
    def exact_alpha(self) -> Fraction:
        return Fraction(self.alpha)

    @property
    def exact_gamma(self) -> Fraction:
        return Fraction(self.gamma)

    @property
    def exact_mu(self) -> Fraction:
        return Fraction(self.mu)


@dataclass(frozen=True)
class CandidateSets:
    """The per-observable strongest feasible bounds: one >= atom and one <= atom each."""

    lower: tuple[Atom, ...]
    upper: tuple[Atom, ...]


@dataclass(frozen=True)
class RoundRecord:
    round: int
    atom: Atom
    precision: Fraction
    recall: Fraction
    surviving_rows: int
    gamma: Fraction


@dataclass(frozen=True)
class InterpolantReport:
    interpolant: Conjunction
    train_precision: Fraction
    train_recall: Fraction
    complexity: int
    trace: tuple[RoundRecord, ...]
    termination: str
    diagnostic: str | None = None


def _ordered_vocabulary(dataset: Dataset, params: MiningParams) -> list[str]:
    seen = set()
    resolved = []
    for name in params.vocabulary:
        obs = dataset.observable(name)
        if not obs.is_numeric:
            raise ContractError(f"vocabulary observable '{name}' is categorical; bounds need numeric columns")
        if name not in seen:
            seen.add(name)
            resolved.append(name)
    resolved.sort(key=dataset.column_position)
    return resolved


def candidate_sets(
    dataset: Dataset,
    premise_view: Dataset,
    conclusion_view: Dataset,
    params: MiningParams,
    gamma: Fraction | None = None,
) -> CandidateSets:
    """Fractile-derived candidate atoms for every vocabulary observable."""
    alpha = params.exact_alpha
    gamma = params.exact_gamma if gamma is None else gamma
    lower, upper = [], []
    for name in _ordered_vocabulary(dataset, params):
        sa = premise_view.sorted_values(name)
        sb = conclusion_view.sorted_values(name)
        c_low = min(lower_from_sorted(sa, alpha), lower_from_sorted(sb, gamma))
        c_up = max(upper_from_sorted(sa, alpha), upper_from_sorted(sb, gamma))
        lower.append(Atom(name, "ge", c_low))
        upper.append(Atom(name, "le", c_up))
    return CandidateSets(tuple(lower), tuple(upper))


def _count_ge(sorted_vals: np.ndarray, bound) -> int:
    return len(sorted_vals) - int(np.searchsorted(sorted_vals, bound, side="left"))


def _count_le(sorted_vals: np.ndarray, bound) -> int:
    return int(np.searchsorted(sorted_vals, bound, side="right"))


def _scored_atomic(
    dataset: Dataset,
    premise_view: Dataset,
    conclusion_view: Dataset,
    params: MiningParams,
    gamma: Fraction,
) -> tuple[Atom, Fraction, int]:
    cands = candidate_sets(dataset, premise_view, conclusion_view, params, gamma)
    best_key = None
    best = None
    for atom in cands.lower + cands.upper:
        full_sorted = dataset.sorted_values(atom.observable)
        b_sorted = conclusion_view.sorted_values(atom.observable)
        if atom.relation == "ge":
            support = _count_ge(full_sorted, atom.bound)
            true_pos = _count_ge(b_sorted, atom.bound)
        else:
            support = _count_le(full_sorted, atom.bound)
            true_pos = _count_le(b_sorted, atom.bound)
        if support == 0:
            continue  # precision undefined; not a legal argmax entry
        precision = Fraction(true_pos, support)
        key = (
            -precision,
            support,
            dataset.column_position(atom.observable),
            _REL_RANK[atom.relation],
        )
        if best_key is None or key < best_key:
            best_key = key
            best = (atom, precision, support)
    if best is None:
        raise NoCandidateError("every candidate bound has zero support")
    return best


def atomic_interp(premise, conclusion, dataset: Dataset, params: MiningParams) -> Atom:
    """Single most precise bound predicate meeting the premise/conclusion constraints.

    Requires nonzero support for both the premise and the conclusion.  The
    returned atom a satisfies Q(a | premise) >= alpha and
    Q(a | conclusion) >= gamma, and maximizes Q(conclusion | a) among the
    fractile-derived candidates; ties fall to the atom with smaller support,
    then the earlier column, then <= before >=.
    """
    premise_view = condition(dataset, premise)
    conclusion_view = condition(dataset, conclusion)
    if len(premise_view) == 0:
        raise ContractError("premise has zero support in the dataset")
    if len(conclusion_view) == 0:
        raise ContractError("conclusion has zero support in the dataset")
    atom, _, _ = _scored_atomic(dataset, premise_view, conclusion_view, params, params.exact_gamma)
    return atom


def conj_interp(premise, conclusion, dataset: Dataset, params: MiningParams) -> InterpolantReport:
    """Conjoin atomic interpolants until the precision target or the size cap is reached.

    Each round mines on the rows admitted by the interpolant so far, with the
    recall floor decayed by mu, exactly one atom per round.  A round that
    eliminates no rows (or starves the conclusion) ends the loop with a
    ``stagnation`` flag rather than looping to the cap.  The reported
    precision and recall are recomputed against the original dataset.
    """
    if len(dataset) == 0:
        raise ContractError("cannot mine an empty dataset")
    premise_view = condition(dataset, premise)
    conclusion_view = condition(dataset, conclusion)
    if len(premise_view) == 0:
        raise ContractError("premise has zero support in the dataset")
    if len(conclusion_view) == 0:
        raise ContractError("conclusion has zero support in the dataset")

    interp = TRUE
    work = dataset
    work_premise = premise_view
    work_conclusion = conclusion_view  # conclusion rows the interpolant still admits
    gamma = params.exact_gamma
    mu = params.exact_mu
    trace: list[RoundRecord] = []
    termination = None
    diagnostic = None

    while True:
        # all work rows satisfy the interpolant, so Q(B | I) on the original
        # data is just the conclusion share of the working set
        if Fraction(len(work_conclusion), len(work)) >= params.exact_alpha:
            termination = PRECISION_MET
            break
        if interp.complexity >= params.kappa:
            termination = COMPLEXITY_CAP
            break
        if len(work_conclusion) == 0:
            termination = STAGNATION
            diagnostic = "conclusion support vanished in the working set"
            break
        atom, _, _ = _scored_atomic(work, work_premise, work_conclusion, params, gamma)
        interp = conjoin(interp, atom)
        new_work = condition(work, atom)
        work_premise = condition(work_premise, atom)
        work_conclusion = condition(work_conclusion, atom)
        trace.append(
            RoundRecord(
                round=len(trace) + 1,
                atom=atom,
                precision=Fraction(len(work_conclusion), len(new_work)),
                recall=Fraction(len(work_conclusion), len(conclusion_view)),
                surviving_rows=len(new_work),
                gamma=gamma,
            )
        )
        if len(new_work) == len(work):
            termination = STAGNATION
            diagnostic = f"round {len(trace)} eliminated no rows"
            work = new_work
            break
        work = new_work
        gamma = gamma * mu

    train_precision = conditional(dataset, conclusion, interp)
    train_recall = conditional(dataset, interp, conclusion)
    return InterpolantReport(
        interpolant=interp,
        train_precision=train_precision,
        train_recall=train_recall,
        complexity=interp.complexity,
        trace=tuple(trace),
        termination=termination,
        diagnostic=diagnostic,
    )
