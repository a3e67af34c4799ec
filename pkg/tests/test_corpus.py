import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from genderedlang.corpus import (Gender, IngestStats, Number, Pair, Relation,
                                 aggregate_counts, featurize_noun, gender_marginals,
                                 iter_arcs, iter_canonical, load_gender_lexicon,
                                 merge_tables, parse_arcs_line)
from genderedlang.errors import DataError, MalformedLineError

from conftest import DATA, make_table


class TestGenderLexicon:
    def test_bundled_size(self, lexicon):
        # 22 noun rows x 4 inflected forms, plus singular-only he/she
        assert len(lexicon) == 90
        assert len(lexicon.lemmas) == 23

    def test_row_example(self, lexicon):
        entry = lexicon.entries["stewardesses"]
        assert entry.lemma == "steward"
        assert entry.gender is Gender.FEM
        assert entry.number is Number.PL

    def test_pronoun_row_is_singular_only(self, lexicon):
        pronouns = [f for f, e in lexicon.entries.items() if e.lemma == "he"]
        assert sorted(pronouns) == ["he", "she"]
        assert all(lexicon.entries[f].number is Number.SG for f in pronouns)

    def test_each_lemma_at_most_four_forms(self, lexicon):
        from collections import Counter

        per_lemma = Counter(e.lemma for e in lexicon.entries.values())
        assert max(per_lemma.values()) <= 4

    def test_duplicate_form_rejected(self, tmp_path):
        path = tmp_path / "dup.tsv"
        path.write_text("man\tman\tmasc\tsg\nman\tman\tmasc\tsg\n")
        with pytest.raises(DataError, match="'man'"):
            load_gender_lexicon(path)

    def test_unknown_gender_rejected(self, tmp_path):
        path = tmp_path / "bad.tsv"
        path.write_text("man\tman\tneuter\tsg\n")
        with pytest.raises(DataError, match="gender"):
            load_gender_lexicon(path)

    def test_unknown_number_rejected(self, tmp_path):
        path = tmp_path / "bad.tsv"
        path.write_text("man\tman\tmasc\tdual\n")
        with pytest.raises(DataError, match="number"):
            load_gender_lexicon(path)

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "empty.tsv"
        path.write_text("")
        with pytest.raises(DataError, match="empty lexicon"):
            load_gender_lexicon(path)


class TestFeaturize:
    def test_stewardesses(self, lexicon, space):
        f = featurize_noun("stewardesses", lexicon, space)
        pl_index = len(space.lemmas) + 3
        assert set(np.nonzero(f)[0]) == {space.lemmas.index("steward"), space.fem_index, pl_index}
        assert f.sum() == 3

    def test_pronoun(self, lexicon, space):
        f = featurize_noun("he", lexicon, space)
        on = set(np.nonzero(f)[0])
        assert space.lemmas.index("he") in on
        assert space.masc_index in on
        assert len(space.lemmas) + 2 in on  # SG bit

    def test_number_bit_distinguishes_sg_pl(self, lexicon, space):
        sg = featurize_noun("stewardess", lexicon, space)
        pl = featurize_noun("stewardesses", lexicon, space)
        diff = np.nonzero(sg != pl)[0]
        assert set(diff) == {len(space.lemmas) + 2, len(space.lemmas) + 3}
        # lemma and gender bits agree
        assert sg[space.lemmas.index("steward")] == pl[space.lemmas.index("steward")] == 1
        assert sg[space.fem_index] == pl[space.fem_index] == 1

    def test_unknown_form(self, lexicon, space):
        with pytest.raises(DataError, match="'table'"):
            featurize_noun("table", lexicon, space)

    def test_every_form_has_exactly_three_bits(self, lexicon, space):
        for form in lexicon.forms():
            assert featurize_noun(form, lexicon, space).sum() == 3

    def test_injective_up_to_row_structure(self, lexicon, space):
        vectors = {form: tuple(featurize_noun(form, lexicon, space)) for form in lexicon.forms()}
        for a in lexicon.forms():
            for b in lexicon.forms():
                ea, eb = lexicon.entries[a], lexicon.entries[b]
                same_features = (ea.lemma, ea.gender, ea.number) == (eb.lemma, eb.gender, eb.number)
                assert (vectors[a] == vectors[b]) == same_features


class TestParseArcs:
    def test_amod_example(self, lexicon):
        line = "woman\tpretty/JJ/amod/2 woman/NN/ROOT/0\t42\t1999,2 2000,40"
        assert parse_arcs_line(line, lexicon) == [Pair("woman", "pretty", Relation.AMOD, 42)]

    def test_nsubj_orientation(self, lexicon):
        line = "laughed\twoman/NN/nsubj/2 laughed/VBD/ROOT/0\t17\t1990,17"
        assert parse_arcs_line(line, lexicon) == [Pair("woman", "laughed", Relation.NSUBJ, 17)]

    def test_dobj_orientation(self, lexicon):
        line = "praised\tqueen/NN/dobj/2 praised/VBD/ROOT/0\t8\t1992,8"
        assert parse_arcs_line(line, lexicon) == [Pair("queen", "praised", Relation.DOBJ, 8)]

    def test_filtered_relation(self, lexicon):
        line = "woman\tof/IN/prep/2 woman/NN/ROOT/0\t50\t1994,50"
        assert parse_arcs_line(line, lexicon) == []

    def test_non_lexicon_noun_filtered(self, lexicon):
        line = "table\told/JJ/amod/2 table/NN/ROOT/0\t99\t1993,99"
        assert parse_arcs_line(line, lexicon) == []

    def test_case_folding(self, lexicon):
        line = "Queen\tGracious/JJ/amod/2 Queen/NN/ROOT/0\t7\t2001,7"
        assert parse_arcs_line(line, lexicon) == [Pair("queen", "gracious", Relation.AMOD, 7)]

    def test_multiple_arcs_in_one_ngram(self, lexicon):
        line = "loved\twoman/NN/nsubj/3 pretty/JJ/amod/1 loved/VBD/ROOT/0\t6\t1997,6"
        pairs = parse_arcs_line(line, lexicon)
        assert Pair("woman", "loved", Relation.NSUBJ, 6) in pairs
        assert Pair("woman", "pretty", Relation.AMOD, 6) in pairs
        assert len(pairs) == 2

    def test_truncated_line_malformed(self, lexicon):
        with pytest.raises(MalformedLineError):
            parse_arcs_line("woman\t", lexicon)

    def test_bad_token_arity_malformed(self, lexicon):
        with pytest.raises(MalformedLineError):
            parse_arcs_line("man\tpretty/JJ/amod\t13\t1995,13", lexicon)

    def test_bad_count_malformed(self, lexicon):
        with pytest.raises(MalformedLineError):
            parse_arcs_line("girl\tyoung/JJ/amod/2 girl/NN/ROOT/0\toops\t1996,1", lexicon)

    def test_bulk_reader_counts_malformed(self, lexicon):
        stats = IngestStats()
        pairs = list(iter_arcs(DATA / "toy.arcs", lexicon, stats))
        assert stats.malformed == 3
        # year-aggregated duplicates are left for the aggregator
        amod_pairs = [p for p in pairs if p.relation is Relation.AMOD]
        assert Pair("woman", "pretty", Relation.AMOD, 42) in amod_pairs
        assert Pair("woman", "pretty", Relation.AMOD, 8) in amod_pairs


class TestAggregate:
    def test_additivity(self):
        pairs = [Pair("woman", "pretty", Relation.AMOD, 42),
                 Pair("woman", "pretty", Relation.AMOD, 8)]
        t = aggregate_counts_helper(pairs)
        assert t.counts[("pretty", "woman")] == 50

    def test_order_invariance(self):
        rng = random.Random(5)
        pairs = [Pair("woman", f"a{i%7}", Relation.AMOD, rng.randint(1, 20)) for i in range(40)]
        shuffled = pairs[:]
        rng.shuffle(shuffled)
        assert aggregate_counts_helper(pairs).counts == aggregate_counts_helper(shuffled).counts

    def test_two_shard_merge_equals_single_pass(self):
        # brute-force comparison on 100 random records
        rng = random.Random(11)
        forms = ["woman", "man", "girl", "boy"]
        pairs = [Pair(rng.choice(forms), f"a{rng.randint(0, 9)}", Relation.AMOD,
                      rng.randint(1, 30)) for _ in range(100)]
        cut = rng.randint(1, 99)
        merged = merge_tables(aggregate_counts_helper(pairs[:cut]),
                              aggregate_counts_helper(pairs[cut:]))
        single = aggregate_counts_helper(pairs)
        assert merged.counts == single.counts
        assert merged.total == single.total
        assert merged.vocab == single.vocab and merged.forms == single.forms

    def test_empty_rejected(self, lexicon):
        with pytest.raises(DataError, match="empty table"):
            aggregate_counts([], Relation.AMOD, lexicon)

    def test_zero_count_records_ignored(self, lexicon):
        pairs = [Pair("woman", "pretty", Relation.AMOD, 0)]
        with pytest.raises(DataError, match="empty table"):
            aggregate_counts(pairs, Relation.AMOD, lexicon)

    @given(st.lists(st.tuples(st.sampled_from(["woman", "man", "girl", "boy"]),
                              st.sampled_from(["a", "b", "c"]),
                              st.integers(min_value=1, max_value=50)),
                    min_size=1, max_size=30),
           st.integers(min_value=0, max_value=30))
    @settings(max_examples=50, deadline=None)
    def test_merge_is_a_monoid_over_splits(self, lexicon, records, cut_raw):
        pairs = [Pair(f, n, Relation.AMOD, c) for f, n, c in records]
        cut = min(cut_raw, len(pairs))
        if cut == 0 or cut == len(pairs):
            return
        merged = merge_tables(
            aggregate_counts(pairs[:cut], Relation.AMOD, lexicon),
            aggregate_counts(pairs[cut:], Relation.AMOD, lexicon))
        single = aggregate_counts(pairs, Relation.AMOD, lexicon)
        assert merged == single

    @given(st.dictionaries(
        st.tuples(st.sampled_from(["a", "b", "c", "d"]),
                  st.sampled_from(["woman", "man", "queens", "boys"])),
        st.integers(min_value=1, max_value=1000), min_size=1, max_size=12))
    @settings(max_examples=50, deadline=None)
    def test_p_hat_sums_to_one(self, lexicon, counts):
        table = make_table(counts, lex=lexicon)
        assert abs(table.p_hat().sum() - 1.0) < 1e-12


def aggregate_counts_helper(pairs):
    from genderedlang.corpus import GenderLexicon, LexiconEntry

    forms = {p.form for p in pairs}
    entries = {f: LexiconEntry(f, Gender.FEM if f in ("woman", "girl") else Gender.MASC,
                               Number.SG) for f in forms}
    lex = GenderLexicon(entries=entries, lemmas=tuple(sorted(forms)))
    return aggregate_counts(pairs, Relation.AMOD, lex)


class TestGenderMarginals:
    def test_toy_split(self, lexicon):
        table = make_table({("a", "woman"): 30, ("a", "man"): 10}, lex=lexicon)
        assert gender_marginals(table, lexicon) == {Gender.MASC: 10, Gender.FEM: 30}

    def test_corpus_scale_totals(self, lexicon):
        # Fixture carries the per-noun corpus totals (in raw counts); the
        # published per-noun figures are rounded to 0.1M, so the reassembled
        # totals land within 0.2M of 30.2M / 62.7M.
        table = aggregate_counts(iter_canonical(DATA / "table1_totals.tsv", lexicon),
                                 Relation.AMOD, lexicon)
        marg = gender_marginals(table, lexicon)
        assert abs(marg[Gender.FEM] - 30_200_000) <= 200_000
        assert abs(marg[Gender.MASC] - 62_700_000) <= 200_000

    def test_single_gender_table(self, lexicon):
        table = make_table({("a", "man"): 5, ("b", "kings"): 2}, lex=lexicon)
        assert gender_marginals(table, lexicon) == {Gender.MASC: 7, Gender.FEM: 0}
