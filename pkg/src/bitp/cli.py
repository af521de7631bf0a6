"""Command-line front end: mine, mine-seq, eval, sweep, synth, render.

Every run resolves its configuration (flags beat the optional JSON config
file, which beats built-in defaults), writes its artifacts, and then writes a
manifest echoing the resolved configuration together with SHA-256 hashes of
all inputs and artifacts.  Identical inputs and configuration therefore yield
identical manifests.

Exit codes: 0 success, 1 contract or data error, 2 usage error.  Diagnostics
go to stderr; machine-readable results go to files or stdout as JSON.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from decimal import Decimal, InvalidOperation
from pathlib import Path

from . import __version__
from .dataset import Dataset, load_table, write_binary, write_csv, write_metadata
from .errors import BitpError, ContractError, LoadError
from .metrics import evaluate, pooled_precision, sweep, write_sweep_csv, write_sweep_gnuplot
from .miner import MiningParams, conj_interp
from .predicates import Atom, Conjunction, premise_of_row
from .render import classify_pixels, grid_layout, write_image
from .reportio import (
    conclusion_from_obj,
    dumps,
    interpolant_from_obj,
    interpolant_obj,
    params_obj,
    read_interpolant,
    read_sequence,
    report_to_obj,
    sequence_obj,
    trace_to_objs,
    write_interpolant,
)
from .sequence import DependencyMap, sequence_interp
from .synth import SynthSpec, generate

DEFAULT_ALPHA = 0.98
DEFAULT_GAMMA = 0.55
DEFAULT_MU = 0.9
DEFAULT_KAPPA = 10


# -- shared plumbing -----------------------------------------------------------


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _resolve_table_paths(spec: str) -> tuple[Path, Path]:
    """A dataset argument is a directory holding metadata.json plus data.csv or
    data.bin, or an explicit 'METADATA:DATA' pair."""
    p = Path(spec)
    if p.is_dir():
        meta = p / "metadata.json"
        if not meta.exists():
            raise LoadError(f"{p}: no metadata.json in dataset directory")
        candidates = [q for q in (p / "data.csv", p / "data.bin") if q.exists()]
        if len(candidates) != 1:
            raise LoadError(f"{p}: expected exactly one of data.csv or data.bin")
        return meta, candidates[0]
    if ":" in spec:
        meta_s, data_s = spec.split(":", 1)
        return Path(meta_s), Path(data_s)
    raise LoadError(f"'{spec}': expected a dataset directory or METADATA:DATA pair")


def _load_dataset(spec: str) -> tuple[Dataset, list[Path]]:
    meta, data = _resolve_table_paths(spec)
    return load_table(meta, data), [meta, data]


_CONCLUSION_RE = re.compile(r"^\s*([A-Za-z_][\w.\-]*)\s*(<=|>=|=)\s*(.+?)\s*$")


def _parse_conclusion(text: str, dataset: Dataset) -> Atom:
    m = _CONCLUSION_RE.match(text)
    if not m:
        raise ContractError(f"cannot parse conclusion '{text}' (expected NAME=VALUE, NAME<=V or NAME>=V)")
    name, op, raw = m.groups()
    relation = {"<=": "le", ">=": "ge", "=": "eq"}[op]
    obs = dataset.observable(name)
    if obs.range_kind == "categorical":
        bound: float | int | str = raw
    elif obs.range_kind == "integer":
        bound = int(raw)
    else:
        bound = float(raw)
    return Atom(name, relation, bound)


def _parse_rows(text: str) -> list[int]:
    text = text.strip()
    if ":" in text:
        lo_s, hi_s = text.split(":", 1)
        lo, hi = int(lo_s), int(hi_s)
        if hi <= lo:
            raise ContractError(f"empty row range '{text}'")
        return list(range(lo, hi))
    return [int(tok) for tok in text.split(",") if tok]


def _parse_vocab(text: str, dataset: Dataset) -> tuple[tuple[str, ...], str]:
    if text.startswith("layer:"):
        tag = text[len("layer:"):]
        names = tuple(o.name for o in dataset.layer(tag) if o.is_numeric)
        if not names:
            raise ContractError(f"layer '{tag}' has no numeric observables")
        return names, text
    if text.startswith("names:"):
        text = text[len("names:"):]
    names = tuple(tok for tok in text.split(",") if tok)
    if not names:
        raise ContractError("empty vocabulary")
    for n in names:
        dataset.observable(n)
    return names, "names:" + ",".join(names)


def _parse_grid(text: str) -> list[float]:
    """Comma list or START:STOP:STEP with decimal (not binary-float) stepping."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ContractError(f"grid '{text}': expected START:STOP:STEP")
        try:
            start, stop, step = (Decimal(p) for p in parts)
        except InvalidOperation:
            raise ContractError(f"grid '{text}': not decimal numbers") from None
        if step <= 0:
            raise ContractError(f"grid '{text}': step must be positive")
        out = []
        v = start
        while v <= stop:
            out.append(float(v))
            v += step
        return out
    return [float(tok) for tok in text.split(",") if tok]


def _jobs(args) -> int:
    if args.jobs is not None:
        return max(1, args.jobs)
    env = os.environ.get("BITP_JOBS")
    return max(1, int(env)) if env else 1


def _run_many(jobs: int):
    if jobs <= 1:
        return lambda fn, items: [fn(x) for x in items]

    def pooled(fn, items):
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, items))

    return pooled


class Manifest:
    def __init__(self, command: str, config: dict):
        self.doc = {
            "tool": {"name": "bitp", "version": __version__},
            "command": command,
            "config": config,
            "inputs": {},
            "artifacts": {},
        }

    def add_inputs(self, paths):
        for p in paths:
            self.doc["inputs"][str(p)] = _sha256(Path(p))

    def add_artifact(self, path):
        self.doc["artifacts"][str(path)] = _sha256(Path(path))

    def write(self, path):
        Path(path).write_text(dumps(self.doc))


def _mining_params(args, vocabulary) -> MiningParams:
    return MiningParams(args.alpha, args.gamma, args.mu, args.kappa, tuple(vocabulary))


def _config_echo(args, skip=("func", "config")) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip and not callable(v)}


# -- subcommands -----------------------------------------------------------------


def _premise_and_conclusion(args, train: Dataset, row: int):
    premise = premise_of_row(train, row, args.input_layer)
    if args.conclusion:
        conclusion = _parse_conclusion(args.conclusion, train)
    else:
        value = train.decoded_value(row, args.conclusion_from)
        conclusion = Atom(args.conclusion_from, "eq", value)
    return premise, conclusion


def _require_conclusion_source(args):
    if not args.conclusion and not args.conclusion_from:
        raise ContractError("one of --conclusion or --conclusion-from is required")


def cmd_mine(args) -> int:
    train, input_paths = _load_dataset(args.train)
    _require_conclusion_source(args)
    vocabulary, vocab_tag = _parse_vocab(args.vocab, train)
    params = _mining_params(args, vocabulary)
    rows = _parse_rows(args.rows) if args.rows else [args.row]
    if rows == [None]:
        raise ContractError("one of --row or --rows is required")

    manifest = Manifest("mine", _config_echo(args))
    manifest.add_inputs(input_paths)

    def mine_row(row: int):
        premise, conclusion = _premise_and_conclusion(args, train, row)
        report = conj_interp(premise, conclusion, train, params)
        obj = interpolant_obj(
            report.interpolant,
            params_obj(args.alpha, args.gamma, args.mu, args.kappa, vocab_tag),
            {
                "premise_row": row,
                "premise_layer": args.input_layer,
                "conclusion": conclusion.to_obj(),
                "train": args.train,
            },
            report=report,
        )
        if args.trace:
            obj["trace"] = trace_to_objs(report.trace)
        return report, obj

    outcomes = _run_many(_jobs(args))(mine_row, rows)

    out = Path(args.output)
    if len(rows) == 1:
        write_interpolant(out, outcomes[0][1])
        manifest.add_artifact(out)
        manifest.write(_manifest_path(out))
        return 0

    out.mkdir(parents=True, exist_ok=True)
    complexities = []
    terminations: dict[str, int] = {}
    for row, (report, obj) in zip(rows, outcomes):
        path = out / f"interp_{row}.json"
        write_interpolant(path, obj)
        manifest.add_artifact(path)
        complexities.append(report.complexity)
        terminations[report.termination] = terminations.get(report.termination, 0) + 1
    summary = {
        "rows": rows,
        "n": len(rows),
        "avg_complexity": sum(complexities) / len(complexities),
        "avg_train_precision": sum(float(r.train_precision) for r, _ in outcomes) / len(rows),
        "avg_train_recall": sum(float(r.train_recall) for r, _ in outcomes) / len(rows),
        "terminations": terminations,
    }
    summary_path = out / "summary.json"
    summary_path.write_text(dumps(summary))
    manifest.add_artifact(summary_path)
    manifest.write(out / "manifest.json")
    return 0


def cmd_mine_seq(args) -> int:
    train, input_paths = _load_dataset(args.train)
    _require_conclusion_source(args)
    vocabulary, vocab_tag = _parse_vocab(args.vocab, train)
    params = _mining_params(args, vocabulary)
    depmap = DependencyMap.load(args.depmap)
    rows = _parse_rows(args.rows) if args.rows else [args.row]
    if rows == [None]:
        raise ContractError("one of --row or --rows is required")

    part_params = None
    if args.part_alpha is not None:
        part_params = MiningParams(
            args.part_alpha, args.gamma, args.mu, args.kappa, tuple(vocabulary)
        )

    manifest = Manifest("mine-seq", _config_echo(args))
    manifest.add_inputs(input_paths + [Path(args.depmap)])

    def mine_row(row: int):
        premise, conclusion = _premise_and_conclusion(args, train, row)
        stage2_report = conj_interp(premise, conclusion, train, params)
        seq = sequence_interp(premise, stage2_report.interpolant, train, depmap, params, part_params)
        pobj = params_obj(args.alpha, args.gamma, args.mu, args.kappa, vocab_tag)
        obj = sequence_obj(
            seq,
            pobj,
            {
                "premise_row": row,
                "premise_layer": args.input_layer,
                "conclusion": conclusion.to_obj(),
                "train": args.train,
            },
        )
        obj["stage2_report"] = report_to_obj(stage2_report)
        return seq, obj

    outcomes = _run_many(_jobs(args))(mine_row, rows)

    out = Path(args.output)
    if len(rows) == 1:
        out.write_text(dumps(outcomes[0][1]))
        manifest.add_artifact(out)
        manifest.write(_manifest_path(out))
        return 0

    out.mkdir(parents=True, exist_ok=True)
    stage1_sizes = []
    failed_parts = 0
    for row, (seq, obj) in zip(rows, outcomes):
        path = out / f"seq_{row}.json"
        path.write_text(dumps(obj))
        manifest.add_artifact(path)
        stage1_sizes.append(seq.stage1.complexity)
        failed_parts += sum(1 for p in seq.parts if p.failed)
    summary = {
        "rows": rows,
        "n": len(rows),
        "avg_stage1_atoms": sum(stage1_sizes) / len(stage1_sizes),
        "failed_parts": failed_parts,
    }
    summary_path = out / "summary.json"
    summary_path.write_text(dumps(summary))
    manifest.add_artifact(summary_path)
    manifest.write(out / "manifest.json")
    return 0


def _interp_files(path: Path) -> list[Path]:
    if path.is_dir():
        return sorted(p for p in path.iterdir() if p.suffix == ".json" and p.name not in ("summary.json", "manifest.json"))
    return [path]


def _load_interp_case(path: Path, test: Dataset, conclusion_override: str | None):
    doc = json.loads(Path(path).read_text())
    if "stage1" in doc:
        doc = read_sequence(path)
        interp = Conjunction.from_obj(doc["stage1"])
    else:
        doc = read_interpolant(path)
        interp = interpolant_from_obj(doc)
    if conclusion_override:
        conclusion = _parse_conclusion(conclusion_override, test)
    else:
        conclusion = conclusion_from_obj(doc)
        if conclusion is None:
            raise ContractError(f"{path}: no conclusion in provenance; pass --conclusion")
    return interp, conclusion


def cmd_eval(args) -> int:
    test, input_paths = _load_dataset(args.test)
    files = _interp_files(Path(args.interp))
    if not files:
        raise ContractError(f"{args.interp}: no interpolant files found")
    manifest = Manifest("eval", _config_echo(args))
    manifest.add_inputs(input_paths + files)

    cases = [_load_interp_case(p, test, args.conclusion) for p in files]
    results = [evaluate(interp, conclusion, test) for interp, conclusion in cases]

    if len(files) == 1:
        payload = results[0].to_obj()
    else:
        defined = [r.precision for r in results if r.precision is not None]
        recalls = [r.recall for r in results if r.recall is not None]
        pooled = pooled_precision(cases, test)
        payload = {
            "results": {p.name: r.to_obj() for p, r in zip(files, results)},
            "aggregate": {
                "n": len(results),
                "n_undefined_precision": sum(1 for r in results if r.precision is None),
                "undefined_fraction": sum(1 for r in results if r.precision is None) / len(results),
                "avg_precision_defined": float(sum(defined, start=0) / len(defined)) if defined else None,
                "avg_recall": float(sum(recalls, start=0) / len(recalls)) if recalls else None,
                "avg_complexity": sum(r.complexity for r in results) / len(results),
                "avg_support": sum(r.support for r in results) / len(results),
                "pooled_precision": None if pooled is None else float(pooled),
            },
        }

    text = dumps(payload)
    if args.output:
        Path(args.output).write_text(text)
        manifest.add_artifact(args.output)
        manifest.write(_manifest_path(Path(args.output)))
    else:
        sys.stdout.write(text)
        manifest_path = Path(str(args.interp).rstrip("/") + ".eval.manifest.json")
        manifest.write(manifest_path)
    return 0


def cmd_sweep(args) -> int:
    train, train_paths = _load_dataset(args.train)
    test, test_paths = _load_dataset(args.test)
    _require_conclusion_source(args)
    vocabulary, _ = _parse_vocab(args.vocab, train)
    rows = _parse_rows(args.rows)
    premises = []
    conclusions = []
    for row in rows:
        premise, conclusion = _premise_and_conclusion(args, train, row)
        premises.append(premise)
        conclusions.append(conclusion)

    gammas = _parse_grid(args.gammas)
    mus = _parse_grid(args.mus)
    manifest = Manifest("sweep", _config_echo(args))
    manifest.add_inputs(train_paths + test_paths)

    result = sweep(
        premises,
        conclusions,
        train,
        test,
        args.alpha,
        gammas,
        mus,
        args.kappa,
        vocabulary,
        run_many=_run_many(_jobs(args)),
    )
    out = Path(args.output)
    write_sweep_csv(result, out)
    manifest.add_artifact(out)
    dat = out.with_suffix(out.suffix + ".dat") if out.suffix != ".csv" else out.with_suffix(".dat")
    write_sweep_gnuplot(result, dat)
    manifest.add_artifact(dat)
    manifest.write(_manifest_path(out))
    return 0


def cmd_synth(args) -> int:
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)

    plant_atoms = []
    for token in args.plant.split(","):
        m = _CONCLUSION_RE.match(token)
        if not m:
            raise ContractError(f"cannot parse planted atom '{token}'")
        name, op, raw = m.groups()
        plant_atoms.append(Atom(name, {"<=": "le", ">=": "ge", "=": "eq"}[op], float(raw)))
    spec = SynthSpec(
        seed=args.seed,
        n_rows=args.n_rows,
        planted=Conjunction(tuple(plant_atoms)),
        n_inputs=args.n_inputs,
        n_intermediates=args.n_intermediates,
        input_levels=args.input_levels,
        precision_target=args.precision_target,
        noise_rate=args.noise_rate,
    )
    dataset, annotation = generate(spec)

    manifest = Manifest("synth", _config_echo(args))
    meta_path = out / "metadata.json"
    data_path = out / ("data.bin" if args.binary else "data.csv")
    write_metadata(dataset.observables, meta_path)
    if args.binary:
        write_binary(dataset, data_path)
    else:
        write_csv(dataset, data_path)
    ann_path = out / "annotation.json"
    ann_path.write_text(dumps(annotation))
    for p in (meta_path, data_path, ann_path):
        manifest.add_artifact(p)
    manifest.write(out / "manifest.json")
    return 0


def cmd_render(args) -> int:
    doc = json.loads(Path(args.interp).read_text())
    if "stage1" in doc:
        interp = Conjunction.from_obj(read_sequence(args.interp)["stage1"])
    else:
        interp = interpolant_from_obj(read_interpolant(args.interp))

    dataset, input_paths = _load_dataset(args.train)
    layout = grid_layout(dataset.observables, args.width, args.height, args.layer)
    pixel_map = classify_pixels(interp, layout)
    background = None
    if args.background_row is not None:
        background = dataset.observation(args.background_row)

    manifest = Manifest("render", _config_echo(args))
    manifest.add_inputs([Path(args.interp)] + input_paths)
    write_image(pixel_map, background, args.output)
    manifest.add_artifact(args.output)
    manifest.write(_manifest_path(Path(args.output)))
    return 0


def _manifest_path(out: Path) -> Path:
    return out.parent / (out.name + ".manifest.json")


# -- parser ----------------------------------------------------------------------


def _add_mining_flags(p: argparse.ArgumentParser):
    p.add_argument("--train", required=True, help="training dataset (directory or META:DATA)")
    p.add_argument("--row", type=int, default=None, help="premise row index")
    p.add_argument("--rows", default=None, help="premise rows: 'A:B' or comma list")
    p.add_argument("--conclusion", default=None, help="conclusion atom, e.g. w=7")
    p.add_argument("--conclusion-from", default=None, help="column whose per-row value is the conclusion")
    p.add_argument("--vocab", required=True, help="vocabulary: 'layer:TAG' or 'names:a,b,c'")
    p.add_argument("--input-layer", default="input", help="layer tag for premises (default: input)")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--mu", type=float, default=None)
    p.add_argument("--kappa", type=int, default=None)


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", default=None, help="JSON config file (flags override it)")
    p.add_argument("--jobs", type=int, default=None, help="worker threads (default: $BITP_JOBS or 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bitp",
        description="Mine and evaluate bound-predicate explanations of model predictions.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("mine", help="mine a conjunctive interpolant for premise rows")
    _add_mining_flags(p)
    _add_common(p)
    p.add_argument("--trace", action="store_true", help="embed the per-round trace")
    p.add_argument("-o", "--output", required=True, help="output file (single row) or directory")
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("mine-seq", help="mine a two-stage (input-layer) interpolant")
    _add_mining_flags(p)
    _add_common(p)
    p.add_argument("--depmap", required=True, help="dependency-map JSON")
    p.add_argument("--part-alpha", type=float, default=None, help="override alpha for input-layer parts")
    p.add_argument("-o", "--output", required=True, help="output file (single row) or directory")
    p.set_defaults(func=cmd_mine_seq)

    p = sub.add_parser("eval", help="evaluate stored interpolants on a test dataset")
    p.add_argument("--interp", required=True, help="interpolant JSON file or directory of them")
    p.add_argument("--test", required=True, help="test dataset (directory or META:DATA)")
    p.add_argument("--conclusion", default=None, help="override the stored conclusion")
    _add_common(p)
    p.add_argument("-o", "--output", default=None, help="output JSON (default: stdout)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="grid sweep over gamma and mu")
    _add_mining_flags(p)
    _add_common(p)
    p.add_argument("--test", required=True, help="test dataset")
    p.add_argument("--gammas", required=True, help="grid: 'A:B:STEP' or comma list")
    p.add_argument("--mus", required=True, help="grid: 'A:B:STEP' or comma list")
    p.add_argument("-o", "--output", required=True, help="output CSV path")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("synth", help="generate a seeded synthetic dataset")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--n-rows", type=int, required=True)
    p.add_argument("--plant", required=True, help="planted rule, e.g. 'm0>=0.6,m1<=0.4'")
    p.add_argument("--n-inputs", type=int, default=2)
    p.add_argument("--n-intermediates", type=int, default=4)
    p.add_argument("--input-levels", type=int, default=3)
    p.add_argument("--precision-target", type=float, default=1.0)
    p.add_argument("--noise-rate", type=float, default=0.0)
    p.add_argument("--binary", action="store_true", help="write data.bin instead of data.csv")
    _add_common(p)
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("render", help="render an input-layer interpolant as a PPM image")
    p.add_argument("--interp", required=True, help="interpolant or sequence JSON")
    p.add_argument("--train", required=True, help="dataset supplying the pixel layout (and background)")
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--layer", default="input", help="layer tag of the pixel observables")
    p.add_argument("--background-row", type=int, default=None, help="overlay this row as background")
    _add_common(p)
    p.add_argument("-o", "--output", required=True, help="output .ppm path")
    p.set_defaults(func=cmd_render)

    return parser


_FLAG_DEFAULTS = {"alpha": DEFAULT_ALPHA, "gamma": DEFAULT_GAMMA, "mu": DEFAULT_MU, "kappa": DEFAULT_KAPPA}


def _apply_config(args: argparse.Namespace) -> argparse.Namespace:
    config = {}
    if getattr(args, "config", None):
        try:
            config = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise LoadError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(config, dict):
            raise LoadError(f"config {args.config}: expected a JSON object")
    for key, value in config.items():
        attr = key.replace("-", "_")
        if hasattr(args, attr) and getattr(args, attr) is None:
            setattr(args, attr, value)
    for key, default in _FLAG_DEFAULTS.items():
        if hasattr(args, key) and getattr(args, key) is None:
            setattr(args, key, default)
    return args


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = _apply_config(args)
        return args.func(args)
    except BitpError as exc:
        print(f"bitp: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
