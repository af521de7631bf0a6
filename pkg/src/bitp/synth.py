"""Seeded synthetic tables and brute-force mining oracles for testing.

Generation uses a 64-bit linear congruential generator (Knuth/Numerical
Recipes constants, multiplier 6364136223846793005, increment
1442695040888963407, modulus 2**64; uniforms take the top 53 bits) so that
fixtures are reproducible from the seed alone, in any language.

The oracles re-derive mining answers by direct enumeration and counting,
sharing none of the sorted-column machinery of the fast path.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .dataset import Dataset, Observable, dataset_from_rows
from .errors import ContractError, GenerationError, NoCandidateError
from .miner import _REL_RANK, MiningParams
from .predicates import Atom, Conjunction

_LCG_MULT = 6364136223846793005
_LCG_INC = 1442695040888963407
_LCG_MASK = (1 << 64) - 1


class Lcg:
    """Deterministic 64-bit linear congruential generator."""

    def __init__(self, seed: int):
        self.state = seed & _LCG_MASK

    def next_u64(self) -> int:
        self.state = (self.state * _LCG_MULT + _LCG_INC) & _LCG_MASK
        return self.state

    def uniform(self) -> float:
        """Uniform in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * (2.0 ** -53)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n) by modulus (bias negligible for small n)."""
        return self.next_u64() % n


@dataclass(frozen=True)
class SynthSpec:
    """Recipe for a seeded table with a planted rule predicting the label column.

    Rows get integer input columns (``i0``.. with values below
    ``input_levels``), uniform real intermediate columns (``m0``..), and a
    binary categorical label.  The label is drawn true with probability
    ``precision_target`` where the planted rule holds and ``noise_rate``
    where it does not.
    """

    seed: int
    n_rows: int
    planted: Conjunction
    n_inputs: int = 2
    n_intermediates: int = 4
    input_levels: int = 3
    precision_target: float = 1.0
    noise_rate: float = 0.0
    label_name: str = "w"

    def __post_init__(self):
        if self.n_rows < 1:
            raise GenerationError("n_rows must be >= 1")
        if self.n_inputs < 1 or self.n_intermediates < 1 or self.input_levels < 1:
            raise GenerationError("column counts and input_levels must be >= 1")
        if not 0 <= self.precision_target <= 1 or not 0 <= self.noise_rate <= 1:
            raise GenerationError("precision_target and noise_rate must be probabilities")

    def observables(self) -> tuple[Observable, ...]:
        obs = [
            Observable(f"i{j}", "integer", "input", j) for j in range(self.n_inputs)
        ] + [
            Observable(f"m{j}", "real", "mid", j) for j in range(self.n_intermediates)
        ]
        obs.append(Observable(self.label_name, "categorical", "output", 0, ("0", "1")))
        return tuple(obs)


def generate(spec: SynthSpec) -> tuple[Dataset, dict]:
    """Deterministically realize ``spec``; returns the table and a ground-truth annotation.

    The annotation embeds the realized (directly counted) support, precision
    and recall of the planted rule, so downstream tests never trust the
    targets blindly.
    """
    for atom in spec.planted.atoms:
        if not atom.observable.startswith("m"):
            raise GenerationError("planted rule must be over intermediate columns")
    rng = Lcg(spec.seed)
    rows = []
    for _ in range(spec.n_rows):
        inputs = [rng.below(spec.input_levels) for _ in range(spec.n_inputs)]
        mids = [rng.uniform() for _ in range(spec.n_intermediates)]
        row = inputs + mids
        holds = _planted_holds(spec, row)
        p_true = spec.precision_target if holds else spec.noise_rate
        label = "1" if rng.uniform() < p_true else "0"
        rows.append(row + [label])
    dataset = dataset_from_rows(spec.observables(), rows, provenance=f"synth(seed={spec.seed})")

    rule_mask = spec.planted.mask(dataset)
    label_mask = dataset.values(spec.label_name) == 1
    rule_support = int(np.count_nonzero(rule_mask))
    label_support = int(np.count_nonzero(label_mask))
    joint = int(np.count_nonzero(rule_mask & label_mask))
    if rule_support == 0 and spec.planted.atoms:
        raise GenerationError(
            f"planted rule holds on no generated row; targets unreachable at n_rows={spec.n_rows}"
        )
    annotation = {
        "seed": spec.seed,
        "n_rows": spec.n_rows,
        "planted": spec.planted.to_obj(),
        "precision_target": spec.precision_target,
        "noise_rate": spec.noise_rate,
        "realized": {
            "rule_support": rule_support,
            "label_support": label_support,
            "joint_support": joint,
            "precision": None if rule_support == 0 else joint / rule_support,
            "recall": None if label_support == 0 else joint / label_support,
        },
    }
    return dataset, annotation


def _planted_holds(spec: SynthSpec, row: list) -> bool:
    by_name = {}
    for j in range(spec.n_inputs):
        by_name[f"i{j}"] = row[j]
    for j in range(spec.n_intermediates):
        by_name[f"m{j}"] = row[spec.n_inputs + j]
    for atom in spec.planted.atoms:
        v = by_name[atom.observable]
        ok = v <= atom.bound if atom.relation == "le" else v >= atom.bound if atom.relation == "ge" else v == atom.bound
        if not ok:
            return False
    return True


# -- brute-force oracles -------------------------------------------------------


def _count(mask: np.ndarray) -> int:
    return int(np.count_nonzero(mask))


def _atom_mask(dataset: Dataset, name: str, relation: str, bound) -> np.ndarray:
    col = dataset.values(name)
    return col >= bound if relation == "ge" else col <= bound


def _brute_lower_fractile(values: np.ndarray, p: Fraction):
    """Greatest candidate c among the values with count(v >= c)/n >= p, by full scan."""
    n = len(values)
    best = None
    for c in np.unique(values):
        if Fraction(_count(values >= c), n) >= p:
            if best is None or c > best:
                best = c
    return best.item()


def _brute_upper_fractile(values: np.ndarray, p: Fraction):
    n = len(values)
    best = None
    for c in np.unique(values):
        if Fraction(_count(values <= c), n) >= p:
            if best is None or c < best:
                best = c
    return best.item()


def oracle_atomic(premise, conclusion, dataset: Dataset, params: MiningParams, mode: str = "global") -> Atom:
    """Reference answer for atomic mining, by exhaustive enumeration.

    ``restricted`` scans every column value for the exact fractile-derived
    candidate pair per observable; ``global`` admits every (observable,
    relation, column value) triple that passes the premise and conclusion
    constraints.  Both maximize directly-counted precision under the miner's
    tie-break (smaller support, earlier column, <= before >=).
    """
    if mode not in ("restricted", "global"):
        raise ContractError(f"unknown oracle mode '{mode}'")
    a_mask = premise.mask(dataset)
    b_mask = conclusion.mask(dataset)
    n_a, n_b = _count(a_mask), _count(b_mask)
    if n_a == 0 or n_b == 0:
        raise ContractError("oracle requires nonzero premise and conclusion support")
    alpha, gamma = params.exact_alpha, params.exact_gamma

    vocab = sorted(
        {name for name in params.vocabulary},
        key=dataset.column_position,
    )
    candidates: list[Atom] = []
    if mode == "restricted":
        for name in vocab:
            col = dataset.values(name)
            va, vb = col[a_mask], col[b_mask]
            c_low = min(_brute_lower_fractile(va, alpha), _brute_lower_fractile(vb, gamma))
            c_up = max(_brute_upper_fractile(va, alpha), _brute_upper_fractile(vb, gamma))
            candidates.append(Atom(name, "ge", c_low))
            candidates.append(Atom(name, "le", c_up))
    else:
        for name in vocab:
            col = dataset.values(name)
            for relation in ("le", "ge"):
                for bound in np.unique(col):
                    mask = _atom_mask(dataset, name, relation, bound)
                    if Fraction(_count(mask & a_mask), n_a) < alpha:
                        continue
                    if Fraction(_count(mask & b_mask), n_b) < gamma:
                        continue
                    candidates.append(Atom(name, relation, bound.item()))

    best = None
    best_key = None
    for atom in candidates:
        mask = _atom_mask(dataset, atom.observable, atom.relation, atom.bound)
        support = _count(mask)
        if support == 0:
            continue
        precision = Fraction(_count(mask & b_mask), support)
        key = (-precision, support, dataset.column_position(atom.observable), _REL_RANK[atom.relation])
        if best_key is None or key < best_key:
            best_key = key
            best = atom
    if best is None:
        raise NoCandidateError("oracle found no feasible candidate")
    return best
