"""Two-stage interpolants: an input-layer conjunction explaining each conjunct
of an intermediate-layer interpolant.

Each intermediate conjunct is treated as its own conclusion and mined over
only the input observables it causally depends on (the dependency map), then
the per-conjunct results are conjoined.  Parts whose conclusion has no support
are flagged and excluded instead of aborting the whole chain.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

from .dataset import Dataset, frequency
from .errors import ContractError, LoadError
from .miner import InterpolantReport, MiningParams, conj_interp
from .predicates import Atom, Conjunction, holds


@dataclass(frozen=True)
class DependencyMap:
    """For each intermediate observable, the input observables that can influence it."""

    entries: dict[str, tuple[str, ...]]

    def patch(self, name: str) -> tuple[str, ...]:
        try:
            return self.entries[name]
        except KeyError:
            raise ContractError(f"dependency map has no entry for '{name}'") from None

    @classmethod
    def load(cls, path) -> "DependencyMap":
        try:
            doc = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise LoadError(f"cannot read dependency map {path}: {exc}") from exc
        if not isinstance(doc, dict):
            raise LoadError(f"dependency map {path}: expected an object")
        entries = {}
        for key, names in doc.items():
            if not isinstance(names, list) or not names or not all(isinstance(x, str) for x in names):
                raise LoadError(f"dependency map {path}: entry '{key}' must be a nonempty name list")
            entries[key] = tuple(names)
        return cls(entries)

    def save(self, path) -> None:
        Path(path).write_text(
            json.dumps({k: list(v) for k, v in sorted(self.entries.items())}, indent=0) + "\n"
        )


@dataclass(frozen=True)
class SequencePart:
    """Input-layer explanation of one intermediate conjunct."""

    conjunct: Atom
    vocabulary: tuple[str, ...]
    interpolant: Conjunction | None
    report: InterpolantReport | None
    failed: bool
    reason: str | None = None


@dataclass(frozen=True)
class SequenceInterpolant:
    stage2: Conjunction
    parts: tuple[SequencePart, ...]

    @property
    def stage1(self) -> Conjunction:
        atoms: tuple[Atom, ...] = ()
        for part in self.parts:
            if not part.failed:
                atoms = atoms + part.interpolant.atoms
        return Conjunction(atoms)

    @property
    def stage1_parts(self) -> tuple[Conjunction | None, ...]:
        return tuple(p.interpolant for p in self.parts)


def sequence_interp(
    premise,
    stage2: Conjunction,
    dataset: Dataset,
    depmap: DependencyMap,
    params: MiningParams,
    part_params: MiningParams | None = None,
) -> SequenceInterpolant:
    """Mine one input-layer interpolant per conjunct of ``stage2`` and conjoin them.

    Each part keeps the same premise but takes the single conjunct as its
    conclusion and the conjunct's dependency patch as its vocabulary.  Parts
    default to the stage-2 search parameters; ``part_params`` overrides them
    (its vocabulary field is ignored, the patch always wins).  Requires the
    premise row to satisfy ``stage2``.
    """
    if len(dataset) == 0:
        raise ContractError("cannot mine an empty dataset")
    base = part_params if part_params is not None else params
    premise_row = getattr(premise, "row_index", None)
    if premise_row is not None and not holds(dataset.observation(premise_row), stage2):
        raise ContractError("premise row does not satisfy the intermediate interpolant")

    parts = []
    for atom in stage2.atoms:
        patch = depmap.patch(atom.observable)
        conclusion = Conjunction((atom,))
        if frequency(dataset, conclusion) == 0:
            parts.append(
                SequencePart(atom, patch, None, None, failed=True, reason="conclusion has zero support")
            )
            continue
        part_search = replace(base, vocabulary=patch)
        report = conj_interp(premise, conclusion, dataset, part_search)
        parts.append(
            SequencePart(atom, patch, report.interpolant, report, failed=False)
        )
    return SequenceInterpolant(stage2=stage2, parts=tuple(parts))
