"""The formula language: bound/equality atoms closed under conjunction, plus premises.

Formulas are immutable values.  Each knows how to evaluate itself on a single
:class:`Observation` (``holds``) and, vectorized, on a whole :class:`Dataset`
view (``mask``).  Truth depends only on the observables in a formula's
vocabulary.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .errors import ContractError, EvaluationError

if TYPE_CHECKING:
    from .dataset import Dataset, Observation

RELATIONS = ("le", "ge", "eq")

_REL_SYMBOL = {"le": "<=", "ge": ">=", "eq": "="}


@dataclass(frozen=True)
class Atom:
    """A single bound or equality predicate over one observable."""

    observable: str
    relation: str
    bound: float | int | str

    def __post_init__(self):
        if self.relation not in RELATIONS:
            raise EvaluationError(f"unknown relation '{self.relation}'")
        if isinstance(self.bound, str) and self.relation != "eq":
            raise EvaluationError(
                f"atom on '{self.observable}': bounds on categorical values must use 'eq'"
            )

    def vocabulary(self) -> frozenset[str]:
        return frozenset((self.observable,))

    def _check_kind(self, range_kind: str):
        if range_kind == "categorical" and self.relation != "eq":
            raise EvaluationError(
                f"atom on '{self.observable}': le/ge are not defined on categorical columns"
            )

    def holds(self, observation: "Observation") -> bool:
        value = observation.value(self.observable)
        if isinstance(value, str) or isinstance(self.bound, str):
            if self.relation != "eq":
                raise EvaluationError(
                    f"atom on '{self.observable}': le/ge are not defined on categorical values"
                )
            return value == self.bound
        if self.relation == "le":
            return value <= self.bound
        if self.relation == "ge":
            return value >= self.bound
        return value == self.bound

    def mask(self, dataset: "Dataset") -> np.ndarray:
        obs = dataset.observable(self.observable)
        self._check_kind(obs.range_kind)
        col = dataset.values(self.observable)
        target = dataset.encode(self.observable, self.bound)
        if self.relation == "le":
            return col <= target
        if self.relation == "ge":
            return col >= target
        return col == target

    def __str__(self) -> str:
        return f"{self.observable} {_REL_SYMBOL[self.relation]} {self.bound}"

    def to_obj(self) -> dict:
        return {"observable": self.observable, "relation": self.relation, "bound": self.bound}

    @classmethod
    def from_obj(cls, obj: dict) -> "Atom":
        try:
            return cls(obj["observable"], obj["relation"], obj["bound"])
        except KeyError as exc:
            raise EvaluationError(f"atom object is missing key {exc}") from None


@dataclass(frozen=True)
class Conjunction:
    """An ordered conjunction of atoms; the empty conjunction is ``true``."""

    atoms: tuple[Atom, ...] = ()

    def vocabulary(self) -> frozenset[str]:
        return frozenset(a.observable for a in self.atoms)

    @property
    def complexity(self) -> int:
        """Number of bound predicates; duplicates are counted."""
        return len(self.atoms)

    def holds(self, observation: "Observation") -> bool:
        return all(a.holds(observation) for a in self.atoms)

    def mask(self, dataset: "Dataset") -> np.ndarray:
        out = np.ones(len(dataset), dtype=bool)
        for atom in self.atoms:
            out &= atom.mask(dataset)
        return out

    def __str__(self) -> str:
        if not self.atoms:
            return "true"
        return " and ".join(str(a) for a in self.atoms)

    def to_obj(self) -> list[dict]:
        return [a.to_obj() for a in self.atoms]

    @classmethod
    def from_obj(cls, obj) -> "Conjunction":
        if not isinstance(obj, list):
            raise EvaluationError("conjunct list expected")
        return cls(tuple(Atom.from_obj(a) for a in obj))


TRUE = Conjunction(())


def holds(observation: "Observation", formula) -> bool:
    """True iff every predicate of ``formula`` holds on ``observation``."""
    return formula.holds(observation)


def conjoin(conjunction: Conjunction, atom: Atom) -> Conjunction:
    """Append one atom; complexity grows by exactly one."""
    return Conjunction(conjunction.atoms + (atom,))


class Premise:
    """Exact equality with a designated row on every observable of one layer.

    Kept as (origin dataset, row index, layer tag) plus a snapshot of the
    row's stored values; satisfaction on any table compares those values
    bitwise (labels for categoricals).  Equivalent to the conjunction of
    per-observable equality atoms without materializing them.
    """

    def __init__(self, dataset: "Dataset", row_index: int, layer_tag: str):
        layer = dataset.layer(layer_tag)
        if not layer:
            raise ContractError(f"layer '{layer_tag}' names no observables")
        if not dataset.has_row(row_index):
            raise ContractError(f"row {row_index} is not in the dataset")
        self.row_index = int(row_index)
        self.layer_tag = layer_tag
        self._names = tuple(o.name for o in layer)
        self._targets = {
            o.name: dataset.decoded_value(row_index, o.name) for o in layer
        }
        # Columns equal to the row's nonzero values filter hardest; probing
        # them first lets mask() stop after a handful of comparisons.
        self._probe_order = sorted(
            self._names,
            key=lambda n: (-abs(self._targets[n]) if not isinstance(self._targets[n], str) else 0.0, n),
        )

    def vocabulary(self) -> frozenset[str]:
        return frozenset(self._names)

    def holds(self, observation: "Observation") -> bool:
        return all(observation.value(n) == self._targets[n] for n in self._names)

    def mask(self, dataset: "Dataset") -> np.ndarray:
        out = np.ones(len(dataset), dtype=bool)
        remaining = iter(self._probe_order)
        for name in remaining:
            target = dataset.encode(name, self._targets[name])
            out &= dataset.values(name) == target
            alive = int(np.count_nonzero(out))
            if alive == 0:
                return out
            if alive == 1:
                break
        # One survivor: finish with scalar compares instead of column scans.
        pos = int(np.flatnonzero(out)[0])
        row = int(dataset.indices[pos])
        for name in remaining:
            target = dataset.encode(name, self._targets[name])
            if dataset.raw_value(row, name) != target:
                out[pos] = False
                return out
        return out

    def __str__(self) -> str:
        return f"row {self.row_index} on layer '{self.layer_tag}'"


def premise_of_row(dataset: "Dataset", row_index: int, input_layer: str) -> Premise:
    """Premise stating that the input-layer observables equal those of one row."""
    return Premise(dataset, row_index, input_layer)
