"""JSON readers/writers for interpolant and sequence artifacts.

Serialization is deterministic: keys are sorted and floats use their shortest
round-trip representation, so identical runs produce identical bytes.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .errors import LoadError
from .miner import InterpolantReport, RoundRecord
from .predicates import Atom, Conjunction
from .sequence import SequenceInterpolant


def _num(x):
    if isinstance(x, Fraction):
        return float(x)
    return x


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


def report_to_obj(report: InterpolantReport) -> dict:
    return {
        "train_precision": _num(report.train_precision),
        "train_recall": _num(report.train_recall),
        "complexity": report.complexity,
        "termination": report.termination,
        "diagnostic": report.diagnostic,
    }


def trace_to_objs(trace: tuple[RoundRecord, ...]) -> list[dict]:
    return [
        {
            "round": r.round,
            "atom": r.atom.to_obj(),
            "precision": _num(r.precision),
            "recall": _num(r.recall),
            "surviving_rows": r.surviving_rows,
            "gamma": _num(r.gamma),
        }
        for r in trace
    ]


def params_obj(alpha, gamma, mu, kappa, vocabulary_tag: str) -> dict:
    return {
        "alpha": alpha,
        "gamma": gamma,
        "mu": mu,
        "kappa": kappa,
        "vocabulary": vocabulary_tag,
    }


def interpolant_obj(
    conjunction: Conjunction,
    params: dict,
    provenance: dict,
    report: InterpolantReport | None = None,
) -> dict:
    obj = {
        "conjuncts": conjunction.to_obj(),
        "params": params,
        "provenance": provenance,
    }
    if report is not None:
        obj["report"] = report_to_obj(report)
    return obj


def write_interpolant(path, obj: dict) -> None:
    Path(path).write_text(dumps(obj))


def read_interpolant(path) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise LoadError(f"cannot read interpolant file {path}: {exc}") from exc
    if not isinstance(doc, dict) or "conjuncts" not in doc:
        raise LoadError(f"interpolant file {path}: expected an object with 'conjuncts'")
    return doc


def interpolant_from_obj(doc: dict) -> Conjunction:
    return Conjunction.from_obj(doc["conjuncts"])


def conclusion_from_obj(doc: dict) -> Atom | None:
    prov = doc.get("provenance") or {}
    conclusion = prov.get("conclusion")
    if conclusion is None:
        return None
    return Atom.from_obj(conclusion)


def sequence_obj(seq: SequenceInterpolant, params: dict, provenance: dict) -> dict:
    parts = []
    for part in seq.parts:
        entry = {
            "conjunct": part.conjunct.to_obj(),
            "vocabulary": list(part.vocabulary),
            "failed": part.failed,
            "reason": part.reason,
            "conjuncts": None if part.interpolant is None else part.interpolant.to_obj(),
            "report": None if part.report is None else report_to_obj(part.report),
        }
        parts.append(entry)
    return {
        "stage2": seq.stage2.to_obj(),
        "stage1_parts": parts,
        "stage1": seq.stage1.to_obj(),
        "params": params,
        "provenance": provenance,
    }


def read_sequence(path) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise LoadError(f"cannot read sequence file {path}: {exc}") from exc
    if not isinstance(doc, dict) or "stage1" not in doc:
        raise LoadError(f"sequence file {path}: expected an object with 'stage1'")
    return doc
