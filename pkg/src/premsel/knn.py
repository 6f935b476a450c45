"""k-nearest-neighbours ranking over sparse string features.

A lazy learner: there is no training beyond indexing the corpus.  The
similarity of two feature sets weights shared features by how rare they
are in the training data; a feature carried by every training example is
worthless and weighs zero.  Predictions aggregate the premise sets of the
k most similar training examples into a ranking.

The index is immutable once built (rebuild it after the corpus changes);
prediction is pure, so any number of threads may query concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .dataset import Corpus, Example
from .features import FeatureSet

Ranking = list[tuple[str, float]]


class KnnError(ValueError):
    pass


@dataclass(frozen=True)
class KnnConfig:
    k: int = 100
    # Weight each neighbour's votes by its similarity instead of counting 1.
    similarity_weighted: bool = False

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")


class FeatureIndex:
    """Document frequencies and postings for one training corpus.

    ``weight(f)`` is the squared log inverse document frequency
    ``ln(N / df)**2``; features absent from the corpus weigh 0 and are
    ignored by the similarity.
    """

    def __init__(self, examples: list[Example] | tuple[Example, ...]):
        self.doc_count = len(examples)
        self.doc_freq: dict[str, int] = {}
        self.postings: dict[str, list[int]] = {}
        for i, ex in enumerate(examples):
            for f in ex.features:
                self.postings.setdefault(f, []).append(i)
        for f, posting in self.postings.items():
            posting.sort()
            self.doc_freq[f] = len(posting)
        self._weights = {
            f: math.log(self.doc_count / df) ** 2 for f, df in self.doc_freq.items()
        }
        # Per-example feature weight totals, accumulated in sorted feature
        # order so that sums are bit-identical with similarity().
        self.doc_weight = [self._sum_weights(ex.features) for ex in examples]

    @classmethod
    def build(cls, train: Corpus) -> "FeatureIndex":
        return cls(train.examples)

    def weight(self, f: str) -> float:
        return self._weights.get(f, 0.0)

    def _sum_weights(self, features: FeatureSet) -> float:
        total = 0.0
        for f in sorted(features):
            total += self.weight(f)
        return total


def feature_weight(f: str, idx: FeatureIndex) -> float:
    """Rarity weight of one feature: ln(N / df)**2, 0 when unindexed."""
    return idx.weight(f)


def similarity(f1: FeatureSet, f2: FeatureSet, idx: FeatureIndex) -> float:
    """Weighted overlap of two feature sets, in [0, 1].

    Shared weight over total weight (union-normalized); 0 when neither set
    carries any positively weighted feature.
    """
    inter = 0.0
    for f in sorted(f1 & f2):
        inter += idx.weight(f)
    w1 = idx._sum_weights(f1)
    w2 = idx._sum_weights(f2)
    denom = w1 + w2 - inter
    if denom <= 0.0:
        return 0.0
    return inter / denom


def sort_ranking(scores: dict[str, float]) -> Ranking:
    """Descending score, ties by ascending premise name."""
    return sorted(scores.items(), key=lambda item: (-item[1], item[0]))


def knn_predict(
    query: FeatureSet, train: Corpus, idx: FeatureIndex, cfg: KnnConfig = KnnConfig()
) -> Ranking:
    """Rank premises by frequency in the k training examples most similar
    to the query.

    Equivalent to scoring every training example with :func:`similarity`,
    sorting by (similarity desc, corpus position asc) and keeping the first
    k, but computed through the postings lists.
    """
    if not train.examples:
        raise KnnError("cannot predict from an empty training corpus")
    if idx.doc_count != len(train.examples):
        raise KnnError("index was built for a different corpus")

    query_weight = idx._sum_weights(query)
    shared: dict[int, float] = {}
    for f in sorted(query):
        w = idx.weight(f)
        if w == 0.0:
            continue
        for i in idx.postings[f]:
            shared[i] = shared.get(i, 0.0) + w

    sims: dict[int, float] = {}
    for i, inter in shared.items():
        denom = query_weight + idx.doc_weight[i] - inter
        sims[i] = inter / denom if denom > 0.0 else 0.0

    k = min(cfg.k, len(train.examples))
    positive = sorted(
        ((m, i) for i, m in sims.items() if m > 0.0), key=lambda t: (-t[0], t[1])
    )
    neighbours: list[tuple[int, float]] = [(i, m) for m, i in positive[:k]]
    if len(neighbours) < k:
        have = {i for i, _ in neighbours}
        for i in range(len(train.examples)):
            if len(neighbours) == k:
                break
            if i not in have and sims.get(i, 0.0) == 0.0:
                neighbours.append((i, 0.0))

    scores: dict[str, float] = {}
    for i, m in neighbours:
        vote = m if cfg.similarity_weighted else 1.0
        for p in sorted(train.examples[i].premises):
            scores[p] = scores.get(p, 0.0) + vote
    return sort_ranking(scores)
