"""Formula language: evaluation, conjunction, premises, vocabulary dependence."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bitp import (
    Atom,
    Conjunction,
    ContractError,
    EvaluationError,
    Observable,
    TRUE,
    condition,
    conjoin,
    dataset_from_rows,
    frequency,
    holds,
    premise_of_row,
)


def _dataset():
    obs = [
        Observable("u", "real", "mid", 0),
        Observable("v", "real", "mid", 1),
        Observable("w", "categorical", "output", 0, ("0", "7")),
    ]
    rows = [(5.0, 1.0, "7"), (7.0, 2.0, "0"), (5.0, 3.0, "7")]
    return dataset_from_rows(obs, rows)


class TestHolds:
    def test_empty_conjunction_everywhere_true(self):
        ds = _dataset()
        for i in range(len(ds)):
            assert holds(ds.observation(i), TRUE)

    def test_interval_membership(self):
        ds = _dataset()
        phi = Conjunction((Atom("u", "le", 6.0), Atom("u", "ge", 4.0)))
        assert holds(ds.observation(0), phi)
        assert not holds(ds.observation(1), phi)

    def test_categorical_equality(self):
        ds = _dataset()
        assert holds(ds.observation(0), Atom("w", "eq", "7"))
        assert not holds(ds.observation(1), Atom("w", "eq", "7"))

    def test_unknown_observable_rejected(self):
        ds = _dataset()
        with pytest.raises(EvaluationError):
            holds(ds.observation(0), Atom("nope", "ge", 0.0))

    def test_order_on_categorical_rejected(self):
        ds = _dataset()
        with pytest.raises(EvaluationError):
            Atom("w", "le", "7")
        with pytest.raises(EvaluationError):
            Atom("w", "ge", 3).mask(ds)


class TestConjoin:
    def test_single_atom(self):
        phi = conjoin(TRUE, Atom("v", "ge", 4.0))
        assert phi.complexity == 1

    def test_vocabulary_grows(self):
        phi = conjoin(conjoin(TRUE, Atom("v", "ge", 4.0)), Atom("u", "le", 2.0))
        assert phi.complexity == 2
        assert phi.vocabulary() == {"u", "v"}

    def test_duplicates_counted(self):
        a = Atom("v", "ge", 4.0)
        phi = conjoin(conjoin(TRUE, a), a)
        assert phi.complexity == 2

    def test_conjoin_semantics(self):
        ds = _dataset()
        phi = Atom("u", "le", 6.0)
        conj = conjoin(Conjunction((phi,)), Atom("v", "ge", 2.0))
        for i in range(len(ds)):
            m = ds.observation(i)
            assert holds(m, conj) == (holds(m, phi) and holds(m, Atom("v", "ge", 2.0)))


class TestPremise:
    def test_self_row_satisfies(self, fixture_a):
        ds, premise, _ = fixture_a
        assert holds(ds.observation(0), premise)

    def test_differing_row_fails(self, fixture_a):
        ds, premise, _ = fixture_a
        assert not holds(ds.observation(1), premise)

    def test_frequency_at_least_one_row(self, fixture_a):
        ds, premise, _ = fixture_a
        assert frequency(ds, premise) >= Fraction(1, len(ds))

    def test_bad_row_rejected(self, fixture_a):
        ds, _, _ = fixture_a
        with pytest.raises(ContractError):
            premise_of_row(ds, 99, "input")

    def test_empty_layer_rejected(self, fixture_a):
        ds, _, _ = fixture_a
        with pytest.raises(ContractError):
            premise_of_row(ds, 0, "no-such-layer")

    def test_mask_on_foreign_dataset(self):
        obs = [
            Observable("i0", "integer", "input", 0),
            Observable("i1", "integer", "input", 1),
            Observable("m", "real", "mid", 0),
        ]
        train = dataset_from_rows(obs, [(1, 2, 0.5), (3, 4, 0.25)])
        test = dataset_from_rows(obs, [(3, 4, 0.9), (1, 2, 0.1), (1, 9, 0.2)])
        premise = premise_of_row(train, 0, "input")
        assert list(premise.mask(test)) == [False, True, False]

    def test_multi_match_premise(self):
        obs = [Observable("i0", "integer", "input", 0), Observable("m", "real", "mid", 0)]
        ds = dataset_from_rows(obs, [(1, 0.1), (1, 0.2), (0, 0.3), (1, 0.4)])
        premise = premise_of_row(ds, 0, "input")
        assert frequency(ds, premise) == Fraction(3, 4)
        assert list(condition(ds, premise).indices) == [0, 1, 3]


# Truth of a formula may depend only on the observables it mentions.
@settings(max_examples=100, deadline=None)
@given(
    st.floats(min_value=-10, max_value=10, allow_nan=False),
    st.floats(min_value=-10, max_value=10, allow_nan=False),
    st.floats(min_value=-10, max_value=10, allow_nan=False),
    st.sampled_from(["le", "ge"]),
)
def test_truth_depends_only_on_vocabulary(u, v_mentioned, bound, rel):
    obs = [Observable("u", "real", "mid", 0), Observable("v", "real", "mid", 1)]
    phi = Atom("v", rel, bound)
    base = dataset_from_rows(obs, [(u, v_mentioned)])
    mutated = dataset_from_rows(obs, [(u + 3.25, v_mentioned)])  # change outside Vocab(phi)
    assert holds(base.observation(0), phi) == holds(mutated.observation(0), phi)
    assert phi.mask(base)[0] == phi.mask(mutated)[0]
