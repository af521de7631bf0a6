"""Full-scale acceptance for the adapter + miner pipeline.

Trains the real model, exports all tables, mines the first 100 images the
model classifies as digit 7, and checks the published quality gates.  Takes
roughly ten minutes; enable with ``BITP_ADAPTER_FULL=1``.
"""

import json
import os
import subprocess
import time
from pathlib import Path

import pytest

from model_adapter.cli import train_and_export
from model_adapter.export import read_predicted_column

pytestmark = [
    pytest.mark.full,
    pytest.mark.skipif(
        not os.environ.get("BITP_ADAPTER_FULL"),
        reason="full adapter acceptance needs BITP_ADAPTER_FULL=1",
    ),
]

DIGIT = 7
N_PREMISES = 100
PARAMS = ["--alpha", "0.98", "--gamma", "0.55", "--mu", "0.9", "--kappa", "10"]


def run_cli(*argv):
    proc = subprocess.run([str(a) for a in argv], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    out = tmp_path_factory.mktemp("full") / "bundle"
    bundle = train_and_export(out, seed=20260810, epochs=12)
    rows = [int(r) for r in (read_predicted_column(out / "train") == DIGIT).nonzero()[0][:N_PREMISES]]
    assert len(rows) == N_PREMISES
    mine_dir = out.parent / "layer3"
    t0 = time.monotonic()
    run_cli(
        "bitp", "mine", "--train", out / "train", "--rows", ",".join(map(str, rows)),
        "--conclusion", f"w={DIGIT}", "--vocab", "layer:pool", *PARAMS,
        "--jobs", "4", "-o", mine_dir,
    )
    t_mine = time.monotonic() - t0
    seq_dir = out.parent / "seq"
    t0 = time.monotonic()
    run_cli(
        "bitp", "mine-seq", "--train", out / "train", "--rows", ",".join(map(str, rows)),
        "--conclusion", f"w={DIGIT}", "--vocab", "layer:pool", *PARAMS,
        "--depmap", out / "depmap.json", "--jobs", "4", "-o", seq_dir,
    )
    t_seq = time.monotonic() - t0
    return out, bundle, mine_dir, seq_dir, t_mine, t_seq


def _eval(interp_dir, table_dir, out_path) -> dict:
    run_cli("bitp", "eval", "--interp", interp_dir, "--test", table_dir, "-o", out_path)
    return json.loads(Path(out_path).read_text())


def test_model_accuracy_floor(workspace):
    _, bundle, *_ = workspace
    assert bundle["test_accuracy"] >= 0.97, bundle["test_accuracy"]
    assert bundle["training"]["seconds"] < 900
    assert bundle["tables"]["train"]["rows"] == 20000
    print(
        f"ACCEPTANCE [model accuracy >= 0.97, < 15 min]: PASS "
        f"({bundle['test_accuracy']} in {bundle['training']['seconds']}s)"
    )


def test_layer3_interpolant_quality(workspace, tmp_path):
    out, _, mine_dir, *_ = workspace
    summary = json.loads((mine_dir / "summary.json").read_text())
    agg = _eval(mine_dir, out / "test", tmp_path / "eval3.json")["aggregate"]
    assert 2 <= summary["avg_complexity"] <= 6, summary["avg_complexity"]
    assert agg["avg_precision_defined"] >= 0.95, agg
    assert 0.03 <= agg["avg_recall"] <= 0.3, agg
    print(
        f"ACCEPTANCE [layer-3 quality]: PASS (complexity {summary['avg_complexity']:.2f}, "
        f"test precision {agg['avg_precision_defined']:.4f}, test recall {agg['avg_recall']:.4f})"
    )


def test_sequence_interpolants_on_heldout(workspace, tmp_path):
    out, _, _, seq_dir, _, _ = workspace
    summary = json.loads((seq_dir / "summary.json").read_text())
    agg = _eval(seq_dir, out / "heldout", tmp_path / "evalseq.json")["aggregate"]
    assert agg["pooled_precision"] is not None and agg["pooled_precision"] >= 0.98, agg
    assert summary["avg_stage1_atoms"] <= 30, summary
    assert agg["n_undefined_precision"] > 0, agg
    print(
        f"ACCEPTANCE [sequence quality]: PASS (pooled precision {agg['pooled_precision']:.4f}, "
        f"stage-1 atoms {summary['avg_stage1_atoms']:.1f}, "
        f"undefined fraction {agg['undefined_fraction']:.2f})"
    )


def test_per_image_runtime(workspace):
    *_, t_mine, t_seq = workspace
    per_image = (t_mine + t_seq) / N_PREMISES
    assert per_image <= 30.0, per_image
    print(f"ACCEPTANCE [per-image runtime <= 30 s]: PASS ({per_image:.2f}s per image)")
