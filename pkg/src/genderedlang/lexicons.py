"""External lexical resources: sentiment prior and supersense inventories.

The sentiment lexicon stores per-word Dirichlet concentrations over
(positive, negative, neutral); we keep only the Dirichlet mean, which is
what the posterior regularizer consumes.  Sense inventories map adjectives
to 13 coarse senses and verbs to 15, each word carrying a distribution over
senses.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .errors import DataError


class Sentiment(str, Enum):
    POS = "pos"
    NEG = "neg"
    NEU = "neu"


SENTIMENTS: tuple[Sentiment, ...] = (Sentiment.POS, Sentiment.NEG, Sentiment.NEU)

ADJECTIVE_SENSES: tuple[str, ...] = (
    "behavior",
    "body",
    "feeling",
    "mind",
    "miscellaneous",
    "motion",
    "perception",
    "quantity",
    "social",
    "spatial",
    "substance",
    "temporal",
    "weather",
)

VERB_SENSES: tuple[str, ...] = (
    "body",
    "change",
    "cognition",
    "communication",
    "competition",
    "consumption",
    "contact",
    "creation",
    "emotion",
    "motion",
    "perception",
    "possession",
    "social",
    "stative",
    "weather",
)


class SenseKind(str, Enum):
    ADJ = "adj"
    VERB = "verb"

    @property
    def senses(self) -> tuple[str, ...]:
        return ADJECTIVE_SENSES if self is SenseKind.ADJ else VERB_SENSES


@dataclass(frozen=True)
class SentimentPrior:
    """q(s | word): per-word (pos, neg, neu) probability triples."""

    probs: dict[str, tuple[float, float, float]]
    duplicates: int = 0

    def __contains__(self, word: str) -> bool:
        return word.lower() in self.probs

    def __len__(self) -> int:
        return len(self.probs)

    def get(self, word: str) -> tuple[float, float, float] | None:
        return self.probs.get(word.lower())


def load_sentiment_lexicon(path: str | Path) -> SentimentPrior:
    """Load ``word<TAB>alpha_pos<TAB>alpha_neg<TAB>alpha_neu`` concentrations.

    q(s | word) is the Dirichlet mean alpha_s / sum(alpha).  Concentrations
    must be strictly positive.  Duplicate words: last row wins, counted.
    """
    probs: dict[str, tuple[float, float, float]] = {}
    duplicates = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 4:
                raise DataError(f"{path}:{lineno}: expected 4 columns, got {len(fields)}")
            word = fields[0].strip().lower()
            try:
                alphas = [float(f) for f in fields[1:]]
            except ValueError:
                raise DataError(f"{path}:{lineno}: non-numeric concentration for {word!r}") from None
            if min(alphas) <= 0:
                raise DataError(f"{path}:{lineno}: non-positive concentration for {word!r}")
            total = sum(alphas)
            if word in probs:
                duplicates += 1
            probs[word] = (alphas[0] / total, alphas[1] / total, alphas[2] / total)
    return SentimentPrior(probs=probs, duplicates=duplicates)


def sentiment_of(prior: SentimentPrior, word: str) -> tuple[float, float, float] | None:
    """Case-folded lookup; None means the word carries no regularization term."""
    return prior.get(word)


@dataclass(frozen=True)
class SenseInventory:
    """Per-word distributions over the fixed sense set of one kind."""

    kind: SenseKind
    weights: dict[str, dict[str, float]]
    duplicates: int = 0

    def __contains__(self, word: str) -> bool:
        return word.lower() in self.weights

    def __len__(self) -> int:
        return len(self.weights)

    def get(self, word: str) -> dict[str, float] | None:
        return self.weights.get(word.lower())


def load_sense_inventory(path: str | Path, kind: SenseKind) -> SenseInventory:
    """Load ``word<TAB>sense:weight,sense:weight,...`` rows, normalizing weights.

    Sense names must belong to the inventory of `kind`; weights must be
    non-negative with a positive sum.
    """
    valid = set(kind.senses)
    weights: dict[str, dict[str, float]] = {}
    duplicates = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise DataError(f"{path}:{lineno}: expected 2 columns, got {len(fields)}")
            word = fields[0].strip().lower()
            items = [item for item in fields[1].split(",") if item.strip()]
            if not items:
                raise DataError(f"{path}:{lineno}: empty sense list for {word!r}")
            dist: dict[str, float] = {}
            for item in items:
                name, sep, weight_token = item.partition(":")
                name = name.strip().lower()
                if not sep:
                    raise DataError(f"{path}:{lineno}: malformed sense item {item!r}")
                if name not in valid:
                    raise DataError(f"{path}:{lineno}: unknown {kind.value} sense {name!r}")
                try:
                    weight = float(weight_token)
                except ValueError:
                    raise DataError(f"{path}:{lineno}: non-numeric weight in {item!r}") from None
                if weight < 0:
                    raise DataError(f"{path}:{lineno}: negative weight in {item!r}")
                dist[name] = dist.get(name, 0.0) + weight
            total = sum(dist.values())
            if total <= 0:
                raise DataError(f"{path}:{lineno}: sense weights for {word!r} sum to zero")
            if word in weights:
                duplicates += 1
            weights[word] = {name: w / total for name, w in dist.items()}
    return SenseInventory(kind=kind, weights=weights, duplicates=duplicates)
