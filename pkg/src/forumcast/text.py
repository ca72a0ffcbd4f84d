"""Language indicators: TF-IDF complexity and lexicon sentiment."""

from __future__ import annotations

import csv
import math
import re
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Protocol, Sequence

_TOKEN_RE = re.compile(r"[^\W_]+")


@dataclass(frozen=True)
class TokenizedPost:
    post_id: str
    tokens: tuple[str, ...]


def tokenize(body: str, post_id: str = "") -> TokenizedPost:
    """Lowercase and split on runs of non-alphanumeric characters."""
    return TokenizedPost(post_id, tuple(_TOKEN_RE.findall(body.lower())))


@dataclass(frozen=True)
class CorpusStats:
    n_documents: int
    document_frequency: Mapping[str, int]

    @classmethod
    def from_documents(cls, docs: Iterable[Sequence[str]]) -> "CorpusStats":
        df: Counter[str] = Counter()
        n = 0
        for tokens in docs:
            n += 1
            df.update(set(tokens))
        return cls(n, dict(df))

    def probability(self, word: str) -> float:
        return self.document_frequency[word] / self.n_documents


def post_complexity(post: TokenizedPost | Sequence[str], stats: CorpusStats) -> float:
    """Mean per-word surprisal ``(1/n) * sum_w q(w) * ln(1/p(w))``.

    ``q(w)`` counts ``w`` in the post and ``p(w)`` is the share of corpus
    documents containing ``w``. Returns NaN for an empty post.
    """
    tokens = post.tokens if isinstance(post, TokenizedPost) else tuple(post)
    if not tokens:
        return math.nan
    total = 0.0
    for word, q in Counter(tokens).items():
        total += q * math.log(stats.n_documents / stats.document_frequency[word])
    return total / len(tokens)


def monthly_complexity(bodies: Iterable[str]) -> float:
    """Mean complexity of the month's non-empty posts against the month's own corpus."""
    docs = [t for t in (tokenize(b).tokens for b in bodies) if t]
    if not docs:
        return math.nan
    stats = CorpusStats.from_documents(docs)
    return sum(post_complexity(d, stats) for d in docs) / len(docs)


class SentimentScorer(Protocol):
    name: str

    def score(self, text: str) -> float: ...


class ScorerRangeError(ValueError):
    pass


def checked_score(scorer: SentimentScorer, text: str) -> float:
    s = float(scorer.score(text))
    if not 0.0 <= s <= 1.0 or math.isnan(s):
        raise ScorerRangeError(f"scorer {scorer.name!r} returned {s} outside [0, 1]")
    return s


class ConstantScorer:
    def __init__(self, value: float = 0.5, name: str = "constant"):
        self.value = value
        self.name = name

    def score(self, text: str) -> float:
        return self.value


class LexiconScorer:
    """``0.5 + 0.5 * tanh(mean weight of matched tokens)``; 0.5 when nothing matches."""

    def __init__(self, weights: Mapping[str, float], name: str = "lexicon"):
        for word, w in weights.items():
            if not -1.0 <= w <= 1.0:
                raise ValueError(f"lexicon weight for {word!r} outside [-1, 1]: {w}")
        self.weights = dict(weights)
        self.name = name

    def score(self, text: str) -> float:
        matched = [self.weights[t] for t in tokenize(text).tokens if t in self.weights]
        if not matched:
            return 0.5
        return 0.5 + 0.5 * math.tanh(sum(matched) / len(matched))

    @classmethod
    def from_csv(cls, path: str | Path, name: str | None = None) -> "LexiconScorer":
        with open(path, encoding="utf-8", newline="") as fh:
            return cls(_read_lexicon(fh), name or Path(path).stem)

    @classmethod
    def default(cls) -> "LexiconScorer":
        ref = resources.files("forumcast.data").joinpath("lexicon.csv")
        with ref.open("r", encoding="utf-8") as fh:
            return cls(_read_lexicon(fh), "default-lexicon")


def _read_lexicon(fh) -> dict[str, float]:
    reader = csv.DictReader(fh)
    if reader.fieldnames is None or {"word", "weight"} - set(reader.fieldnames):
        raise ValueError("lexicon header must be 'word,weight'")
    return {row["word"].strip().lower(): float(row["weight"]) for row in reader}


def monthly_sentiment(bodies: Iterable[str], scorer: SentimentScorer) -> float:
    scores = [checked_score(scorer, b) for b in bodies]
    return sum(scores) / len(scores) if scores else math.nan
