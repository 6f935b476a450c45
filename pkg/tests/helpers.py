"""Shared test fixtures: corpus factories and independent oracles.

The oracles here are deliberately naive (full sorts, direct set counting)
so they stay independent of the production code paths they check.
"""

from __future__ import annotations

import random
from statistics import mean

from premsel.dataset import Corpus, Example
from premsel.expr import Statement, parse_expr
from premsel.knn import KnnConfig, similarity, sort_ranking


def mk_example(id_, features, premises, module="main"):
    return Example(id_, frozenset(features), frozenset(premises), module)


def mk_corpus(examples):
    modules = {ex.module: [] for ex in examples}
    return Corpus(tuple(examples), modules)


def random_corpus(rng: random.Random, n_examples, n_features=40, n_premises=12):
    """Unstructured random corpus; no planted signal."""
    examples = []
    for i in range(n_examples):
        n_feat = rng.randint(1, max(2, n_features // 3))
        feats = {f"T:f{rng.randrange(n_features)}" for _ in range(n_feat)}
        n_prem = rng.randint(1, 4)
        prems = {f"p{rng.randrange(n_premises)}" for _ in range(n_prem)}
        examples.append(mk_example(f"t{i}", feats, prems))
    return mk_corpus(examples)


def brute_force_knn(query, train, idx, cfg: KnnConfig):
    """Oracle: score every example with similarity(), full-sort, then count
    premise votes over the first k."""
    sims = [similarity(query, ex.features, idx) for ex in train.examples]
    order = sorted(range(len(train.examples)), key=lambda i: (-sims[i], i))
    scores: dict[str, float] = {}
    for i in order[: cfg.k]:
        vote = sims[i] if cfg.similarity_weighted else 1.0
        for p in sorted(train.examples[i].premises):
            scores[p] = scores.get(p, 0.0) + vote
    return sort_ranking(scores)


def shuffled_ranking_cover(premises, ranking, rng: random.Random) -> float:
    """Cover of a random permutation of the predicted ranking."""
    names = [name for name, _ in ranking]
    rng.shuffle(names)
    n = len(premises)
    return len(set(premises) & set(names[:n])) / n


def mean_shuffled_baseline(test_corpus, rankings, seed=0) -> float:
    rng = random.Random(seed)
    return mean(
        shuffled_ranking_cover(ex.premises, ranking, rng)
        for ex, ranking in zip(test_corpus.examples, rankings)
    )


# Hand-encoded statement of a division-nonzero lemma:
#   (ha : a != 0) (hb : b != 0) |- a / b != 0
# with the numeral 0 spelled out the way an elaborated formal statement
# spells it (an OfNat application backed by a Zero instance).
DIV_NE_ZERO_CONCLUSION = (
    "(Ne (HDiv.hDiv a b) (OfNat.ofNat 0 (Zero.toOfNat0 MonoidWithZero.toZero)))"
)
DIV_NE_ZERO_HYPOTHESES = (
    "(Ne a (OfNat.ofNat 0 (Zero.toOfNat0 MonoidWithZero.toZero)))",
    "(Ne b (OfNat.ofNat 0 (Zero.toOfNat0 MonoidWithZero.toZero)))",
)


def div_ne_zero_statement() -> Statement:
    return Statement(
        conclusion=parse_expr(DIV_NE_ZERO_CONCLUSION),
        hypotheses=tuple(parse_expr(h) for h in DIV_NE_ZERO_HYPOTHESES),
    )


DIV_NE_ZERO_RAW_PREMISES = frozenset(
    {
        "GroupWithZero.noZeroDivisors",
        "mul_ne_zero",
        "inv_ne_zero",
        "Eq.refl",
        "div_eq_mul_inv",
    }
)

DIV_NE_ZERO_PROOF_SOURCE = "by rw [div_eq_mul_inv]; exact mul_ne_zero ha (inv_ne_zero hb)"
