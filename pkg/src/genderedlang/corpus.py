"""Corpus ingestion: gendered-noun lexicon, arcs parsing, count aggregation.

Raw collocation data arrives either in the dependency-arcs export format
(``head_word<TAB>token-ngram<TAB>total_count<TAB>per-year...`` with tokens
``word/POS/deplabel/head-index``) or as canonical TSV
(``relation<TAB>noun_form<TAB>neighbor_lemma<TAB>count``).  Only amod, nsubj
and dobj arcs whose noun side is a known gendered, animate noun survive
ingestion; counts are aggregated across years into a sparse table per
relation.
"""

from __future__ import annotations

import hashlib
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple

import numpy as np

from .errors import DataError, MalformedLineError


class Relation(str, Enum):
    AMOD = "amod"
    NSUBJ = "nsubj"
    DOBJ = "dobj"


class Gender(str, Enum):
    MASC = "masc"
    FEM = "fem"


class Number(str, Enum):
    SG = "sg"
    PL = "pl"


class LexiconEntry(NamedTuple):
    lemma: str
    gender: Gender
    number: Number


class Pair(NamedTuple):
    """One observed (noun form, neighbor) collocation with its count."""

    form: str
    neighbor: str
    relation: Relation
    count: int


@dataclass(frozen=True)
class GenderLexicon:
    """Surface noun form -> (genderless lemma, gender, number)."""

    entries: dict[str, LexiconEntry]
    lemmas: tuple[str, ...]

    def __contains__(self, form: str) -> bool:
        return form in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def gender_of(self, form: str) -> Gender:
        return self.entries[form].gender

    def forms(self) -> tuple[str, ...]:
        return tuple(sorted(self.entries))


def bundled_lexicon_path() -> Path:
    """Path of the packaged gendered, animate noun list (90 forms)."""
    return Path(str(resources.files("genderedlang").joinpath("data/gendered_nouns.tsv")))


def load_gender_lexicon(path: str | Path) -> GenderLexicon:
    """Load a ``lemma<TAB>form<TAB>gender<TAB>number`` lexicon file.

    Each form must appear exactly once; genders are masc/fem and numbers
    sg/pl.  The lemma set loaded here fixes the feature-space dimension for
    every downstream model.
    """
    entries: dict[str, LexiconEntry] = {}
    per_lemma: Counter[str] = Counter()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 4:
                raise DataError(f"{path}:{lineno}: expected 4 tab-separated columns, got {len(fields)}")
            lemma, form, gender, number = (f.strip().lower() for f in fields)
            try:
                g = Gender(gender)
            except ValueError:
                raise DataError(f"{path}:{lineno}: unknown gender token {gender!r} for form {form!r}") from None
            try:
                n = Number(number)
            except ValueError:
                raise DataError(f"{path}:{lineno}: unknown number token {number!r} for form {form!r}") from None
            if form in entries:
                raise DataError(f"{path}:{lineno}: duplicate form {form!r}")
            per_lemma[lemma] += 1
            if per_lemma[lemma] > 4:
                raise DataError(f"{path}:{lineno}: lemma {lemma!r} has more than 4 inflected forms")
            entries[form] = LexiconEntry(lemma, g, n)
    if not entries:
        raise DataError(f"{path}: empty lexicon")
    return GenderLexicon(entries=entries, lemmas=tuple(sorted(per_lemma)))


# ---------------------------------------------------------------------------
# Arcs-format adapter


@dataclass
class IngestStats:
    lines: int = 0
    malformed: int = 0
    unknown_forms: int = 0
    pairs: int = 0

    def merge(self, other: "IngestStats") -> None:
        self.lines += other.lines
        self.malformed += other.malformed
        self.unknown_forms += other.unknown_forms
        self.pairs += other.pairs


_ACCEPTED_LABELS = {r.value: r for r in Relation}


def _parse_token(token: str) -> tuple[str, str, str, int]:
    parts = token.rsplit("/", 3)
    if len(parts) != 4:
        raise MalformedLineError(f"token {token!r} does not split into word/POS/deplabel/head-index")
    word, pos, dep, head = parts
    try:
        head_idx = int(head)
    except ValueError:
        raise MalformedLineError(f"token {token!r} has non-integer head index") from None
    return word, pos, dep, head_idx


def parse_arcs_line(line: str, lex: GenderLexicon) -> list[Pair]:
    """Extract gendered (noun form, neighbor) pairs from one arcs line.

    amod arcs attach the labeled modifier to its head noun; nsubj/dobj arcs
    attach the labeled noun to its head verb.  Pairs whose noun side is not
    in the lexicon, and arcs with other labels, are dropped silently.
    Structural problems raise MalformedLineError so bulk readers can skip
    the line and keep a counter.
    """
    fields = line.rstrip("\n").split("\t")
    if len(fields) < 3:
        raise MalformedLineError("fewer than 3 tab-separated fields")
    try:
        total = int(fields[2])
    except ValueError:
        raise MalformedLineError(f"non-integer total count {fields[2]!r}") from None
    if total < 0:
        raise MalformedLineError(f"negative count {total}")
    tokens = [_parse_token(t) for t in fields[1].split()]
    out: list[Pair] = []
    for word, _pos, dep, head_idx in tokens:
        relation = _ACCEPTED_LABELS.get(dep.lower())
        if relation is None:
            continue
        if not 1 <= head_idx <= len(tokens):
            raise MalformedLineError(f"head index {head_idx} outside ngram of {len(tokens)} tokens")
        head_word = tokens[head_idx - 1][0]
        if relation is Relation.AMOD:
            form, neighbor = head_word, word
        else:
            form, neighbor = word, head_word
        form = form.lower()
        if form not in lex:
            continue
        out.append(Pair(form, neighbor.lower(), relation, total))
    return out


def iter_arcs(path: str | Path, lex: GenderLexicon, stats: IngestStats | None = None) -> Iterator[Pair]:
    """Stream pairs from an arcs file, skipping malformed lines."""
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            if stats is not None:
                stats.lines += 1
            try:
                pairs = parse_arcs_line(line, lex)
            except MalformedLineError:
                if stats is not None:
                    stats.malformed += 1
                continue
            if stats is not None:
                stats.pairs += len(pairs)
            yield from pairs


def iter_canonical(path: str | Path, lex: GenderLexicon, stats: IngestStats | None = None) -> Iterator[Pair]:
    """Stream pairs from canonical ``relation form neighbor count`` TSV."""
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            if stats is not None:
                stats.lines += 1
            fields = line.rstrip("\n").split("\t")
            if len(fields) != 4:
                if stats is not None:
                    stats.malformed += 1
                continue
            rel_token, form, neighbor, count_token = fields
            try:
                relation = Relation(rel_token.strip().lower())
                count = int(count_token)
            except ValueError:
                if stats is not None:
                    stats.malformed += 1
                continue
            if count < 0:
                if stats is not None:
                    stats.malformed += 1
                continue
            form = form.strip().lower()
            if form not in lex:
                if stats is not None:
                    stats.unknown_forms += 1
                continue
            if stats is not None:
                stats.pairs += 1
            yield Pair(form, neighbor.strip().lower(), relation, count)


# ---------------------------------------------------------------------------
# Count tables


@dataclass(frozen=True)
class CountTable:
    """Aggregated #(neighbor, noun form) counts for one dependency relation."""

    relation: Relation
    counts: dict[tuple[str, str], int]  # (neighbor, form) -> count
    vocab: tuple[str, ...]
    forms: tuple[str, ...]
    total: int = field(default=0)

    def count_matrix(self) -> np.ndarray:
        """Dense counts, shape (|V|, |G|) in vocab x forms order."""
        v_idx = {v: i for i, v in enumerate(self.vocab)}
        f_idx = {f: i for i, f in enumerate(self.forms)}
        out = np.zeros((len(self.vocab), len(self.forms)))
        for (neighbor, form), count in self.counts.items():
            out[v_idx[neighbor], f_idx[form]] = count
        return out

    def p_hat(self) -> np.ndarray:
        """Empirical joint probability of (neighbor, noun form)."""
        return self.count_matrix() / self.total

    def fingerprint(self) -> str:
        """Order-independent sha256 of (relation, sorted count triples)."""
        h = hashlib.sha256()
        h.update(self.relation.value.encode())
        for neighbor, form in sorted(self.counts):
            h.update(f"\n{neighbor}\t{form}\t{self.counts[(neighbor, form)]}".encode())
        return h.hexdigest()


def aggregate_counts(records: Iterable[Pair], relation: Relation, lex: GenderLexicon) -> CountTable:
    """Sum records for one relation into a CountTable.

    Result is independent of record order; zero-count records are ignored.
    Raises DataError when no usable record survives.
    """
    counts: Counter[tuple[str, str]] = Counter()
    for form, neighbor, rel, count in records:
        if rel is not relation or count == 0:
            continue
        if form not in lex:
            raise DataError(f"noun form {form!r} not in gender lexicon")
        counts[(neighbor, form)] += count
    if not counts:
        raise DataError(f"empty table: no usable records for relation {relation.value!r}")
    vocab = tuple(sorted({neighbor for neighbor, _ in counts}))
    forms = tuple(sorted({form for _, form in counts}))
    return CountTable(
        relation=relation,
        counts=dict(counts),
        vocab=vocab,
        forms=forms,
        total=sum(counts.values()),
    )


def merge_tables(a: CountTable, b: CountTable) -> CountTable:
    """Associative, commutative merge of two shards of the same relation."""
    if a.relation is not b.relation:
        raise DataError(f"cannot merge tables for {a.relation.value} and {b.relation.value}")
    counts = Counter(a.counts)
    counts.update(b.counts)
    vocab = tuple(sorted(set(a.vocab) | set(b.vocab)))
    forms = tuple(sorted(set(a.forms) | set(b.forms)))
    return CountTable(a.relation, dict(counts), vocab, forms, a.total + b.total)


def write_canonical(path: str | Path, table: CountTable) -> None:
    """Write a table as sorted canonical TSV (deterministic bytes)."""
    with open(path, "w", encoding="utf-8") as fh:
        for neighbor, form in sorted(table.counts):
            fh.write(f"{table.relation.value}\t{form}\t{neighbor}\t{table.counts[(neighbor, form)]}\n")


def gender_marginals(table: CountTable, lex: GenderLexicon) -> dict[Gender, int]:
    """Total count per noun gender (reporting and PMI input)."""
    totals = {Gender.MASC: 0, Gender.FEM: 0}
    for (neighbor, form), count in table.counts.items():
        totals[lex.gender_of(form)] += count
    return totals


def featurize_noun(form: str, lex: GenderLexicon, space) -> np.ndarray:
    """Multi-hot lexical features of a noun form known to the lexicon."""
    if form not in lex:
        raise DataError(f"unknown noun form {form!r}")
    return space.featurize(form)
