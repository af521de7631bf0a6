"""Shared fixtures: the two worked examples and seeded random-table builders."""

from __future__ import annotations

import pytest

from bitp import Atom, Conjunction, Lcg, Observable, dataset_from_rows, premise_of_row

# Worked single-atom example: one premise row at v=6, eight labeled rows, two
# unlabeled rows inside [4, 6].  Direct counts give exactly the statistics the
# miner tests assert: fractiles 6/6 (premise, p=0.95) and 4/5 (labeled,
# p=0.75), P(B | v>=4) = 3/4, P(B | v<=6) = 4/5.
FIXTURE_A_ROWS = [
    (1, 6.0, "1"),
    (0, 2.0, "1"),
    (0, 3.0, "1"),
    (0, 4.0, "1"),
    (0, 4.0, "1"),
    (0, 5.0, "1"),
    (0, 5.0, "1"),
    (0, 6.0, "1"),
    (0, 5.0, "0"),
    (0, 4.0, "0"),
]

FIXTURE_A_OBSERVABLES = (
    Observable("a", "integer", "input", 0),
    Observable("v", "real", "mid", 0),
    Observable("w", "categorical", "output", 0, ("0", "1")),
)

# Worked two-round example over (v1, v2): six labeled points (premise at
# (5, 5)), two unlabeled points the second round eliminates, three unlabeled
# points that keep the competing candidates below 5/7 precision in round one.
FIXTURE_B_ROWS = [
    (1, 5.0, 5.0, "1"),
    (0, 4.0, 6.0, "1"),
    (0, 6.0, 6.0, "1"),
    (0, 6.0, 5.0, "1"),
    (0, 4.0, 3.0, "1"),
    (0, 0.0, 5.0, "1"),
    (0, 4.0, 4.0, "0"),
    (0, 6.0, 4.0, "0"),
    (0, 1.0, 5.0, "0"),
    (0, 2.0, 6.0, "0"),
    (0, 3.0, 5.5, "0"),
]

FIXTURE_B_OBSERVABLES = (
    Observable("a", "integer", "input", 0),
    Observable("v1", "real", "mid", 0),
    Observable("v2", "real", "mid", 1),
    Observable("w", "categorical", "output", 0, ("0", "1")),
)


@pytest.fixture
def fixture_a():
    dataset = dataset_from_rows(FIXTURE_A_OBSERVABLES, FIXTURE_A_ROWS, provenance="fixture-a")
    premise = premise_of_row(dataset, 0, "input")
    conclusion = Atom("w", "eq", "1")
    return dataset, premise, conclusion


@pytest.fixture
def fixture_b():
    dataset = dataset_from_rows(FIXTURE_B_OBSERVABLES, FIXTURE_B_ROWS, provenance="fixture-b")
    premise = premise_of_row(dataset, 0, "input")
    conclusion = Atom("w", "eq", "1")
    return dataset, premise, conclusion


def random_table(seed: int, max_rows: int = 200, n_mids: int | None = None, coarse_inputs: bool = True):
    """Seeded small table for oracle and property tests.

    Intermediate columns mix coarse grids (forcing duplicate values and
    tie-breaks) with continuous draws.  Row 0 is always labeled positive so a
    row-0 premise always has a satisfiable conclusion.
    """
    rng = Lcg(seed)
    n_rows = 30 + rng.below(max_rows - 29)
    if n_mids is None:
        n_mids = 2 + rng.below(3)
    observables = [Observable("i0", "integer", "input", 0)]
    if not coarse_inputs:
        observables.append(Observable("i1", "real", "input", 1))
    observables += [Observable(f"m{j}", "real", "mid", j) for j in range(n_mids)]
    observables.append(Observable("w", "categorical", "output", 0, ("0", "1")))

    coarse = [rng.below(2) == 0 for _ in range(n_mids)]
    threshold = 0.3 + 0.4 * rng.uniform()
    rows = []
    for i in range(n_rows):
        row: list = [rng.below(3)]
        if not coarse_inputs:
            row.append(rng.uniform())
        mids = []
        for j in range(n_mids):
            mids.append(float(rng.below(8)) if coarse[j] else rng.uniform() * 8.0)
        row += mids
        signal = mids[0] / 8.0
        p_true = 0.85 if signal >= threshold else 0.15
        label = "1" if (rng.uniform() < p_true or i == 0) else "0"
        rows.append(row + [label])
    dataset = dataset_from_rows(observables, rows, provenance=f"random({seed})")
    premise = premise_of_row(dataset, 0, "input")
    conclusion = Atom("w", "eq", "1")
    vocabulary = tuple(f"m{j}" for j in range(n_mids))
    return dataset, premise, conclusion, vocabulary


def pick(rng: Lcg, options):
    return options[rng.below(len(options))]


def sweep_benchmark():
    """Frozen synthetic benchmark for sweep-trend checks: singleton premises,
    one deterministic planted rule on m0, 1% label noise elsewhere."""
    import numpy as np

    from bitp import SynthSpec, generate

    planted = Conjunction((Atom("m0", "ge", 0.55),))

    def make(seed):
        spec = SynthSpec(
            seed=seed,
            n_rows=600,
            planted=planted,
            n_inputs=2,
            n_intermediates=4,
            input_levels=1000,
            precision_target=1.0,
            noise_rate=0.01,
        )
        return generate(spec)[0]

    train = make(20260810)
    test = make(20260811)
    labeled = np.flatnonzero(train.values("w") == 1)
    rows = [int(i) for i in labeled[:20]]
    premises = [premise_of_row(train, r, "input") for r in rows]
    conclusions = [Atom("w", "eq", "1")] * len(rows)
    vocabulary = ("m0", "m1", "m2", "m3")
    return train, test, premises, conclusions, vocabulary
