from pathlib import Path

import pytest

from genderedlang.corpus import (Gender, GenderLexicon, LexiconEntry, Number, Pair,
                                 Relation, aggregate_counts, bundled_lexicon_path,
                                 load_gender_lexicon)
from genderedlang.lexicons import SenseKind, load_sense_inventory, load_sentiment_lexicon
from genderedlang.model import FeatureSpace

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def lexicon():
    return load_gender_lexicon(bundled_lexicon_path())


@pytest.fixture(scope="session")
def space(lexicon):
    return FeatureSpace.from_lexicon(lexicon)


@pytest.fixture(scope="session")
def tiny_lexicon():
    """Two lemmas, singular-only forms: 4 forms, feature dimension 6."""
    entries = {
        "alpha_m": LexiconEntry("alpha", Gender.MASC, Number.SG),
        "alpha_f": LexiconEntry("alpha", Gender.FEM, Number.SG),
        "beta_m": LexiconEntry("beta", Gender.MASC, Number.SG),
        "beta_f": LexiconEntry("beta", Gender.FEM, Number.SG),
    }
    return GenderLexicon(entries=entries, lemmas=("alpha", "beta"))


@pytest.fixture(scope="session")
def tiny_space(tiny_lexicon):
    return FeatureSpace.from_lexicon(tiny_lexicon)


def make_table(counts: dict, relation: Relation = Relation.AMOD, lex: GenderLexicon | None = None):
    """Build a CountTable from {(neighbor, form): count} via the aggregator."""
    pairs = [Pair(form, neighbor, relation, count) for (neighbor, form), count in counts.items()]
    if lex is None:
        forms = {form for _, form in counts}
        entries = {}
        for form in forms:
            entries[form] = LexiconEntry(form, Gender.MASC, Number.SG)
        lex = GenderLexicon(entries=entries, lemmas=tuple(sorted(forms)))
    return aggregate_counts(pairs, relation, lex)


@pytest.fixture(scope="session")
def toy_table(lexicon):
    from genderedlang.corpus import iter_canonical

    return aggregate_counts(iter_canonical(DATA / "toy_corpus.tsv", lexicon),
                            Relation.AMOD, lexicon)


@pytest.fixture(scope="session")
def toy_prior():
    return load_sentiment_lexicon(DATA / "toy_sentiment.tsv")


@pytest.fixture(scope="session")
def toy_inventory():
    return load_sense_inventory(DATA / "toy_senses_adj.tsv", SenseKind.ADJ)
