import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from genderedlang.corpus import Gender
from genderedlang.errors import DataError
from genderedlang.model import TrainConfig
from genderedlang.pmi import (GenderCollapsedTable, collapse_by_gender, pmi, pmi_table,
                              prop1_check, restricted_train)

from conftest import make_table


def gtable(counts: dict) -> GenderCollapsedTable:
    vocab = tuple(sorted({w for w, _ in counts}))
    return GenderCollapsedTable(counts=dict(counts), vocab=vocab,
                                total=sum(counts.values()))


SYMMETRIC = {("a", Gender.MASC): 30, ("a", Gender.FEM): 10,
             ("b", Gender.MASC): 10, ("b", Gender.FEM): 30}


class TestPmi:
    def test_hand_value(self):
        # p(a,M)=0.375, p(a)=p(M)=0.5 -> ln 1.5
        assert pmi(gtable(SYMMETRIC), "a", Gender.MASC) == pytest.approx(math.log(1.5),
                                                                         abs=1e-12)

    def test_perfectly_balanced_counts_give_zero(self):
        t = gtable({("a", Gender.MASC): 20, ("a", Gender.FEM): 20,
                    ("b", Gender.MASC): 5, ("b", Gender.FEM): 5})
        for w in ("a", "b"):
            for g in (Gender.MASC, Gender.FEM):
                assert pmi(t, w, g) == pytest.approx(0.0, abs=1e-12)

    def test_symmetry_of_the_two_by_two_table(self):
        # swapping both the word and the gender leaves the table invariant,
        # so PMI(a,M)=PMI(b,F) and PMI(a,F)=PMI(b,M)=ln(0.5)
        t = gtable(SYMMETRIC)
        assert pmi(t, "a", Gender.MASC) == pytest.approx(pmi(t, "b", Gender.FEM), abs=1e-12)
        assert pmi(t, "a", Gender.FEM) == pytest.approx(pmi(t, "b", Gender.MASC), abs=1e-12)
        assert pmi(t, "b", Gender.MASC) == pytest.approx(math.log(0.5), abs=1e-12)

    def test_zero_joint_count_excluded(self):
        t = gtable({("a", Gender.MASC): 30, ("b", Gender.MASC): 10,
                    ("b", Gender.FEM): 30})
        with pytest.raises(DataError, match="zero joint count"):
            pmi(t, "a", Gender.FEM)
        table = pmi_table(t)
        assert ("a", Gender.FEM) not in table
        assert not any(math.isinf(v) for v in table.values())

    def test_collapse_preserves_total(self, lexicon):
        table = make_table({("x", "woman"): 4, ("x", "women"): 6, ("x", "man"): 5,
                            ("y", "he"): 2, ("y", "she"): 3}, lex=lexicon)
        collapsed = collapse_by_gender(table, lexicon)
        assert collapsed.total == table.total
        assert collapsed.counts[("x", Gender.FEM)] == 10
        assert collapsed.counts[("y", Gender.MASC)] == 2

    @given(st.lists(st.tuples(st.integers(1, 500), st.integers(1, 500)),
                    min_size=2, max_size=12))
    @settings(max_examples=40, deadline=None)
    def test_expected_pmi_is_nonnegative_per_gender(self, rows):
        # sum_v p(v,g) PMI(v,g) is KL(p(v|g) || p(v)) >= 0
        counts = {}
        for i, (cm, cf) in enumerate(rows):
            counts[(f"w{i}", Gender.MASC)] = cm
            counts[(f"w{i}", Gender.FEM)] = cf
        t = gtable(counts)
        values = pmi_table(t)
        total = t.total
        for g in (Gender.MASC, Gender.FEM):
            expected = sum((counts[(w, g)] / total) * values[(w, g)]
                           for w in {w for w, _ in counts})
            assert expected >= -1e-12


class TestRestrictedTrain:
    def test_saturated_fit(self):
        rng = np.random.default_rng(1)
        counts = {}
        for i in range(20):
            counts[(f"w{i:02d}", Gender.MASC)] = int(rng.integers(1, 400))
            counts[(f"w{i:02d}", Gender.FEM)] = int(rng.integers(1, 400))
        t = gtable(counts)
        result = restricted_train(t, TrainConfig(learning_rate=0.2), saturation_tol=1e-7)
        assert result.converged
        assert result.max_deviation <= 1e-7

    def test_single_gender_rejected(self):
        t = gtable({("a", Gender.MASC): 5, ("b", Gender.MASC): 3})
        with pytest.raises(DataError, match="both genders required"):
            restricted_train(t, TrainConfig())

    def test_regularizers_must_be_off(self):
        t = gtable(SYMMETRIC)
        with pytest.raises(DataError, match="alpha = beta = 0"):
            restricted_train(t, TrainConfig(alpha=0.01))


class TestProp1:
    def test_two_by_two_hand_values(self):
        report = prop1_check(gtable(SYMMETRIC), TrainConfig(learning_rate=0.2),
                             saturation_tol=1e-10)
        # normalized tau_M = (0.75, 0.25) = normalized exp(PMI) = (1.5, 0.5)/2
        counts = gtable(SYMMETRIC).count_matrix()
        eta = report.restricted.eta
        tau_m = np.exp(eta[:, 0]) / np.exp(eta[:, 0]).sum()
        assert tau_m == pytest.approx([0.75, 0.25], abs=1e-6)
        assert report.max_deviation[Gender.MASC] <= 1e-6
        assert report.rank_correlation[Gender.MASC] == 1.0
        assert report.rank_correlation[Gender.FEM] == 1.0

    def test_random_fifty_neighbor_table(self):
        rng = np.random.default_rng(3)
        counts = {}
        for i in range(50):
            counts[(f"w{i:02d}", Gender.MASC)] = int(rng.integers(1, 1001))
            counts[(f"w{i:02d}", Gender.FEM)] = int(rng.integers(1, 1001))
        report = prop1_check(gtable(counts), TrainConfig(learning_rate=0.2),
                             saturation_tol=1e-9)
        for g in (Gender.MASC, Gender.FEM):
            assert report.max_deviation[g] <= 1e-3
            assert report.rank_correlation[g] == 1.0
