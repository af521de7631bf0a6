"""bitp: mining of precise, simple bound-predicate explanations from observation tables."""

from .dataset import (
    Dataset,
    Observable,
    Observation,
    condition,
    conditional,
    dataset_from_rows,
    frequency,
    load_table,
)
from .errors import (
    BitpError,
    ContractError,
    EvaluationError,
    GenerationError,
    LoadError,
    NoCandidateError,
    PixelConflictError,
    UndefinedMeasureError,
)
from .fractiles import lower_fractile, upper_fractile
from .metrics import EvalResult, SweepResult, evaluate, pooled_precision, sweep
from .miner import (
    COMPLEXITY_CAP,
    PRECISION_MET,
    STAGNATION,
    InterpolantReport,
    MiningParams,
    atomic_interp,
    conj_interp,
)
from .predicates import TRUE, Atom, Conjunction, Premise, conjoin, holds, premise_of_row
from .render import classify_pixels, grid_layout, write_image
from .sequence import DependencyMap, SequenceInterpolant, sequence_interp
from .synth import Lcg, SynthSpec, generate, oracle_atomic

__version__ = "0.1.0"

__all__ = [
    "Atom",
    "BitpError",
    "COMPLEXITY_CAP",
    "Conjunction",
    "ContractError",
    "Dataset",
    "DependencyMap",
    "EvalResult",
    "EvaluationError",
    "GenerationError",
    "InterpolantReport",
    "Lcg",
    "LoadError",
    "MiningParams",
    "NoCandidateError",
    "Observable",
    "Observation",
    "PRECISION_MET",
    "PixelConflictError",
    "Premise",
    "STAGNATION",
    "SequenceInterpolant",
    "SweepResult",
    "SynthSpec",
    "TRUE",
    "UndefinedMeasureError",
    "atomic_interp",
    "classify_pixels",
    "condition",
    "conditional",
    "conj_interp",
    "conjoin",
    "dataset_from_rows",
    "evaluate",
    "frequency",
    "generate",
    "grid_layout",
    "holds",
    "load_table",
    "lower_fractile",
    "oracle_atomic",
    "pooled_precision",
    "premise_of_row",
    "sequence_interp",
    "sweep",
    "upper_fractile",
    "write_image",
]
