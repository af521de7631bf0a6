"""Two-stage interpolants: patch confinement, chain soundness, failed parts."""

from itertools import product

import pytest

from bitp import (
    Atom,
    Conjunction,
    ContractError,
    DependencyMap,
    MiningParams,
    Observable,
    PRECISION_MET,
    TRUE,
    conditional,
    dataset_from_rows,
    holds,
    premise_of_row,
    sequence_interp,
)


@pytest.fixture(scope="module")
def max_pipeline():
    """Exhaustive grid over six input pixels in {0, 0.5, 1}; each pool unit is
    the max of a four-pixel window, the label marks u0 saturating."""
    obs = (
        [Observable(f"x{j}", "real", "input", j) for j in range(6)]
        + [Observable("u0", "real", "pool", 0), Observable("u1", "real", "pool", 1)]
        + [Observable("w", "categorical", "output", 0, ("0", "1"))]
    )
    rows = []
    premise_row = None
    for i, xs in enumerate(product((0.0, 0.5, 1.0), repeat=6)):
        u0, u1 = max(xs[0:4]), max(xs[2:6])
        rows.append(list(xs) + [u0, u1, "1" if u0 >= 1.0 else "0"])
        if xs == (1.0, 0.5, 0.0, 0.5, 0.0, 0.5):
            premise_row = i
    ds = dataset_from_rows(obs, rows)
    depmap = DependencyMap({"u0": ("x0", "x1", "x2", "x3"), "u1": ("x2", "x3", "x4", "x5")})
    return ds, premise_of_row(ds, premise_row, "input"), depmap


PARAMS = MiningParams(1.0, 0.5, 0.9, 8, ("u0", "u1"))


class TestSequenceInterp:
    def test_empty_stage2_gives_true(self, max_pipeline):
        ds, premise, depmap = max_pipeline
        seq = sequence_interp(premise, TRUE, ds, depmap, PARAMS)
        assert seq.stage1 == TRUE
        assert seq.parts == ()

    def test_patch_confinement_and_soundness(self, max_pipeline):
        ds, premise, depmap = max_pipeline
        stage2 = Conjunction((Atom("u0", "ge", 1.0),))
        seq = sequence_interp(premise, stage2, ds, depmap, PARAMS)
        part = seq.parts[0]
        assert not part.failed
        assert part.interpolant.vocabulary() <= set(depmap.patch("u0"))
        assert part.report.termination == PRECISION_MET
        # brute force over all 729 rows: whatever satisfies the input-layer
        # part also saturates the pool unit
        for i in range(len(ds)):
            if holds(ds.observation(i), part.interpolant):
                assert ds.decoded_value(i, "u0") >= 1.0

    def test_parts_align_with_stage2_atoms(self, max_pipeline):
        ds, premise, depmap = max_pipeline
        stage2 = Conjunction((Atom("u0", "ge", 1.0), Atom("u1", "ge", 0.5), Atom("u0", "ge", 0.5)))
        seq = sequence_interp(premise, stage2, ds, depmap, PARAMS)
        assert len(seq.parts) == 3
        for atom, part in zip(stage2.atoms, seq.parts):
            assert part.conjunct == atom
            assert part.interpolant.vocabulary() <= set(depmap.patch(atom.observable))
        # stage1 is the conjunction of the parts, in stage-2 atom order
        expected = tuple(a for p in seq.parts for a in p.interpolant.atoms)
        assert seq.stage1.atoms == expected

    def test_chain_soundness_reported(self, max_pipeline):
        ds, premise, depmap = max_pipeline
        stage2 = Conjunction((Atom("u0", "ge", 1.0), Atom("u1", "ge", 0.5)))
        seq = sequence_interp(premise, stage2, ds, depmap, PARAMS)
        for part in seq.parts:
            if part.report.termination == PRECISION_MET:
                chain = conditional(ds, Conjunction((part.conjunct,)), part.interpolant)
                assert chain >= 1

    def test_premise_must_satisfy_stage2(self, max_pipeline):
        ds, premise, depmap = max_pipeline
        bad = Conjunction((Atom("u0", "le", 0.0),))  # premise row has u0 = 1
        with pytest.raises(ContractError):
            sequence_interp(premise, bad, ds, depmap, PARAMS)

    def test_zero_support_part_flagged_not_fatal(self, max_pipeline):
        ds, _, depmap = max_pipeline
        # a plain-formula premise skips the row check, letting a dead conjunct
        # reach the zero-support path
        formula_premise = Conjunction((Atom("x0", "ge", 1.0),))
        stage2 = Conjunction((Atom("u0", "ge", 99.0), Atom("u1", "ge", 0.5)))
        seq = sequence_interp(formula_premise, stage2, ds, depmap, PARAMS)
        assert seq.parts[0].failed
        assert seq.parts[0].interpolant is None
        assert "zero support" in seq.parts[0].reason
        assert not seq.parts[1].failed
        # failed part contributes nothing to stage1
        assert seq.stage1.atoms == seq.parts[1].interpolant.atoms

    def test_unmapped_conjunct_rejected(self, max_pipeline):
        ds, premise, depmap = max_pipeline
        stage2 = Conjunction((Atom("w", "eq", "1"),))
        with pytest.raises(ContractError):
            sequence_interp(premise, stage2, ds, depmap, PARAMS)

    def test_part_params_override(self, max_pipeline):
        ds, premise, depmap = max_pipeline
        stage2 = Conjunction((Atom("u0", "ge", 1.0),))
        relaxed = MiningParams(0.75, 0.5, 0.9, 8, ("unused",))
        seq = sequence_interp(premise, stage2, ds, depmap, PARAMS, part_params=relaxed)
        part = seq.parts[0]
        assert part.report.termination == PRECISION_MET
        assert part.report.train_precision >= 0.75


class TestDependencyMap:
    def test_round_trip(self, tmp_path):
        depmap = DependencyMap({"u0": ("x0", "x1"), "u1": ("x1", "x2")})
        path = tmp_path / "dep.json"
        depmap.save(path)
        back = DependencyMap.load(path)
        assert back == depmap

    def test_missing_entry_named(self):
        depmap = DependencyMap({"u0": ("x0",)})
        with pytest.raises(ContractError, match="u9"):
            depmap.patch("u9")
