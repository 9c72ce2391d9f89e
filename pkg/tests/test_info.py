import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gvlab.core import ExemplarTable
from gvlab.errors import GvlabError
from gvlab.info import LABELS, conditional_entropy, entropy, mutual_information

LN2 = math.log(2.0)


def table_from_counts(counts, axis_sizes, k):
    total = sum(counts.values())
    return ExemplarTable(tuple(range(len(axis_sizes))), tuple(axis_sizes), counts, total, k)


def random_table(rng, max_vars=3, max_card=4, max_k=4):
    m = int(rng.integers(1, max_vars + 1))
    sizes = tuple(int(rng.integers(2, max_card + 1)) for _ in range(m))
    k = int(rng.integers(2, max_k + 1))
    counts = {}
    for config in np.ndindex(*sizes):
        for label in range(k):
            c = int(rng.integers(0, 6))
            if c:
                counts[(tuple(int(v) for v in config), label)] = c
    if not counts:
        counts[(tuple(0 for _ in sizes), 0)] = 1
    return table_from_counts(counts, sizes, k)


class TestEntropy:
    def test_point_mass_is_zero(self):
        table = table_from_counts({((0,), 1): 7}, (2,), 2)
        assert entropy(table, "labels") == 0.0

    def test_uniform_binary_labels(self):
        table = table_from_counts({((0,), 0): 5, ((0,), 1): 5}, (1,), 2)
        assert entropy(table, "labels") == pytest.approx(LN2, abs=1e-12)

    def test_uniform_four_labels(self):
        counts = {((0,), y): 3 for y in range(4)}
        table = table_from_counts(counts, (1,), 4)
        assert entropy(table, "labels") == pytest.approx(math.log(4.0), abs=1e-12)

    def test_variables_and_joint_marginals(self):
        counts = {((0,), 0): 1, ((1,), 0): 1, ((0,), 1): 1, ((1,), 1): 1}
        table = table_from_counts(counts, (2,), 2)
        assert entropy(table, "variables") == pytest.approx(LN2, abs=1e-12)
        assert entropy(table, "joint") == pytest.approx(math.log(4.0), abs=1e-12)

    def test_empty_table_rejected(self):
        table = ExemplarTable((0,), (2,), {}, 0, 2)
        with pytest.raises(GvlabError) as err:
            entropy(table, "labels")
        assert err.value.code == "empty-table"


class TestConditionalEntropy:
    def test_functional_dependence_is_zero(self):
        counts = {((0,), 0): 3, ((1,), 1): 5}
        assert conditional_entropy(table_from_counts(counts, (2,), 2), "labels", [0]) == 0.0

    def test_uniform_conditionals(self):
        counts = {((0,), 0): 2, ((0,), 1): 2, ((1,), 0): 1, ((1,), 1): 1}
        table = table_from_counts(counts, (2,), 2)
        assert conditional_entropy(table, "labels", [0]) == pytest.approx(LN2, abs=1e-12)

    def test_conditioning_on_nothing_is_label_entropy(self):
        rng = np.random.default_rng(0)
        table = random_table(rng)
        assert conditional_entropy(table, "labels", []) == pytest.approx(
            entropy(table, "labels"), abs=1e-15)

    def test_unknown_given_id_rejected(self):
        table = table_from_counts({((0,), 0): 1}, (2,), 2)
        with pytest.raises(GvlabError) as err:
            conditional_entropy(table, "labels", [9])
        assert err.value.code == "bad-variable"


class TestMutualInformation:
    def test_independent_variables_have_zero_information(self):
        counts = {}
        for a in range(2):
            for b in range(3):
                counts[((a, b), 0)] = (a + 1) * (b + 1)  # product structure
        table = table_from_counts(counts, (2, 3), 2)
        assert mutual_information(table, [0], [1]) == pytest.approx(0.0, abs=1e-12)

    def test_identical_columns_give_full_entropy(self):
        counts = {((0, 0), 0): 1, ((1, 1), 0): 1}
        table = table_from_counts(counts, (2, 2), 2)
        assert mutual_information(table, [0], [1]) == pytest.approx(LN2, abs=1e-12)

    def test_overlapping_groups_rejected(self):
        table = table_from_counts({((0, 0), 0): 1}, (2, 2), 2)
        with pytest.raises(GvlabError) as err:
            mutual_information(table, [0], [0])
        assert err.value.code == "overlapping-variables"

    def test_labels_pseudo_id_only_on_side_a(self):
        table = table_from_counts({((0, 0), 0): 1}, (2, 2), 2)
        with pytest.raises(GvlabError):
            mutual_information(table, [0], [LABELS])

    def test_label_side_equals_entropy_difference(self):
        rng = np.random.default_rng(1)
        for _ in range(30):
            table = random_table(rng)
            var = table.variable_ids[0]
            mi = mutual_information(table, [LABELS], [var])
            expected = entropy(table, "labels") - conditional_entropy(table, "labels", [var])
            assert mi == pytest.approx(expected, abs=1e-12)


def test_chain_rule_on_random_tables():
    """I(Y; G0, G1) = I(Y; G0) + I(Y; G1 | G0) from the same counts."""
    rng = np.random.default_rng(2)
    for _ in range(50):
        table = random_table(rng, max_vars=3)
        if len(table.variable_ids) < 2:
            continue
        a, b = table.variable_ids[:2]
        joint = mutual_information(table, [LABELS], [a, b])
        chained = (mutual_information(table, [LABELS], [a])
                   + mutual_information(table, [LABELS], [b], [a]))
        assert joint == pytest.approx(chained, abs=1e-10)


def test_full_chain_rule_accumulates_all_variables():
    rng = np.random.default_rng(3)
    for _ in range(25):
        table = random_table(rng, max_vars=4, max_card=4)
        ids = table.variable_ids
        joint = mutual_information(table, [LABELS], list(ids))
        total = 0.0
        for i, var in enumerate(ids):
            total += mutual_information(table, [LABELS], [var], list(ids[:i]))
        assert joint == pytest.approx(total, abs=1e-10)


def test_conditioning_reduces_entropy_and_range():
    rng = np.random.default_rng(4)
    for _ in range(60):
        table = random_table(rng)
        h_y = entropy(table, "labels")
        h_cond = conditional_entropy(table, "labels", list(table.variable_ids))
        assert 0.0 <= h_cond <= h_y + 1e-12
        assert h_y <= math.log(table.k) + 1e-12


def test_information_is_nonnegative_and_symmetric():
    rng = np.random.default_rng(5)
    for _ in range(40):
        table = random_table(rng, max_vars=3)
        if len(table.variable_ids) < 2:
            continue
        a, b = table.variable_ids[:2]
        given = list(table.variable_ids[2:])
        ab = mutual_information(table, [a], [b], given)
        ba = mutual_information(table, [b], [a], given)
        assert ab >= 0.0
        assert ab == pytest.approx(ba, abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_label_information_identity(seed):
    """I(Y;G) computed conditionally equals H(Y) - H(Y|G) exactly."""
    table = random_table(np.random.default_rng(seed))
    ids = list(table.variable_ids)
    lhs = mutual_information(table, [LABELS], ids)
    rhs = entropy(table, "labels") - conditional_entropy(table, "labels", ids)
    assert lhs == pytest.approx(max(rhs, 0.0), abs=1e-12)
