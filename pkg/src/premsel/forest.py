"""Online random forest for premise ranking.

Each tree node tests the presence of one feature and routes an example
left (absent) or right (present); leaves store the training examples that
reached them.  Trees are grown incrementally: an example is appended to
the leaf it routes to, and a full-enough leaf with at least two distinct
feature sets is split on the sampled candidate feature whose partition has
the lowest size-weighted Gini impurity over premise labels.

Updates build a fresh spine and share all untouched subtrees, so a tree
(and any forest snapshot holding it) is immutable once handed out: readers
may keep predicting from an old snapshot while the owner trains a new one.
Training itself is single-writer -- the per-tree random generators advance
in place.  Every random draw comes from a generator seeded from
``(rng_seed, tree index)`` or, for pass shuffling, ``(rng_seed,
"shuffle")``, which makes training bit-reproducible and would keep it so
even if distinct trees were trained in parallel within a pass.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, replace

from .dataset import Corpus, Example
from .features import FeatureSet
from .knn import Ranking, sort_ranking


class ForestError(ValueError):
    pass


@dataclass(frozen=True)
class Leaf:
    examples: tuple[Example, ...] = ()


@dataclass(frozen=True)
class Node:
    rule: str  # feature whose presence routes an example to the right child
    left: "Tree"
    right: "Tree"


Tree = Leaf | Node


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 300
    example_sampling_prob: float = 0.3
    n_passes: int = 3
    leaf_split_threshold: int = 16
    n_candidate_features: int = 32
    rng_seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1:
            raise ValueError("n_trees must be at least 1")
        if not 0 <= self.example_sampling_prob <= 1:
            raise ValueError("example_sampling_prob must be in [0, 1]")
        if self.n_passes < 1:
            raise ValueError("n_passes must be at least 1")
        if self.leaf_split_threshold < 2:
            raise ValueError("leaf_split_threshold must be at least 2")
        if self.n_candidate_features < 1:
            raise ValueError("n_candidate_features must be at least 1")


def tree_rng(seed: int, tree_index: int) -> random.Random:
    return random.Random(f"{seed}/tree/{tree_index}")


def shuffle_rng(seed: int) -> random.Random:
    return random.Random(f"{seed}/shuffle")


@dataclass
class Forest:
    trees: list[Tree]
    config: ForestConfig
    tree_rngs: list[random.Random]
    master_rng: random.Random

    @classmethod
    def empty(cls, config: ForestConfig) -> "Forest":
        return cls(
            trees=[Leaf() for _ in range(config.n_trees)],
            config=config,
            tree_rngs=[tree_rng(config.rng_seed, t) for t in range(config.n_trees)],
            master_rng=shuffle_rng(config.rng_seed),
        )


def route(tree: Tree, features: FeatureSet) -> Leaf:
    """Walk to the unique leaf: right when the node's feature is present."""
    while isinstance(tree, Node):
        tree = tree.right if tree.rule in features else tree.left
    return tree


def _gini(examples) -> float:
    counts = Counter(p for ex in examples for p in ex.premises)
    total = sum(counts.values())
    if total == 0:
        return 0.0
    # Sorted so the float sum never depends on set iteration order.
    return 1.0 - sum((c / total) ** 2 for c in sorted(counts.values()))


def split_impurity(left, right) -> float:
    """Size-weighted Gini impurity of a two-way example partition."""
    total = len(left) + len(right)
    return (len(left) * _gini(left) + len(right) * _gini(right)) / total


def make_split_rule(
    examples, cfg: ForestConfig, rng: random.Random
) -> str | None:
    """Pick the best of up to ``n_candidate_features`` sampled separating
    features, or None when no feature separates the examples."""
    counts: dict[str, int] = {}
    for ex in examples:
        for f in ex.features:
            counts[f] = counts.get(f, 0) + 1
    separating = sorted(f for f, c in counts.items() if 0 < c < len(examples))
    if not separating:
        return None
    candidates = rng.sample(separating, min(cfg.n_candidate_features, len(separating)))

    best: tuple[float, str] | None = None
    for f in candidates:
        left = [ex for ex in examples if f not in ex.features]
        right = [ex for ex in examples if f in ex.features]
        key = (split_impurity(left, right), f)
        if best is None or key < best:
            best = key
    return best[1]


def _should_split(examples, cfg: ForestConfig) -> bool:
    if len(examples) < cfg.leaf_split_threshold:
        return False
    return len({ex.features for ex in examples}) >= 2


def add_example_to_tree(
    tree: Tree, example: Example, cfg: ForestConfig, rng: random.Random
) -> Tree:
    """Insert one example, splitting the reached leaf when it is full and a
    separating feature exists.  Returns the updated tree; subtrees off the
    routing path are shared with the input."""
    path: list[tuple[Node, bool]] = []
    while isinstance(tree, Node):
        went_right = tree.rule in example.features
        path.append((tree, went_right))
        tree = tree.right if went_right else tree.left

    examples = tree.examples + (example,)
    new_tree: Tree = Leaf(examples)
    if _should_split(examples, cfg):
        rule = make_split_rule(examples, cfg, rng)
        if rule is not None:
            left = tuple(ex for ex in examples if rule not in ex.features)
            right = tuple(ex for ex in examples if rule in ex.features)
            new_tree = Node(rule, Leaf(left), Leaf(right))

    for node, went_right in reversed(path):
        if went_right:
            new_tree = Node(node.rule, node.left, new_tree)
        else:
            new_tree = Node(node.rule, new_tree, node.right)
    return new_tree


def _offer_to_trees(fst: Forest, example: Example) -> list[Tree]:
    trees = list(fst.trees)
    for t, rng in enumerate(fst.tree_rngs):
        if rng.random() < fst.config.example_sampling_prob:
            trees[t] = add_example_to_tree(trees[t], example, fst.config, rng)
    return trees


def update_forest(fst: Forest, example: Example) -> Forest:
    """Offer one example to every tree (online mode).  The returned forest
    shares unchanged subtrees with the input; the input's generator state
    advances, so keep using the returned value for further training."""
    return replace(fst, trees=_offer_to_trees(fst, example))


def train_passes(fst: Forest, train: Corpus, n_passes: int) -> Forest:
    """Run shuffled training passes over a corpus, starting from ``fst``
    (which may already hold examples, for continued training)."""
    for _ in range(n_passes):
        order = list(range(len(train.examples)))
        fst.master_rng.shuffle(order)
        for i in order:
            fst = update_forest(fst, train.examples[i])
    return fst


def train_forest(train: Corpus, cfg: ForestConfig) -> Forest:
    """Grow a forest with ``n_passes`` shuffled passes over the corpus.

    Each pass offers every example, in an order drawn from the shuffle
    generator, to every tree independently with probability
    ``example_sampling_prob``.  Fixed seed, fixed corpus: identical forest.
    """
    if not train.examples:
        raise ForestError("cannot train on an empty corpus")
    return train_passes(Forest.empty(cfg), train, cfg.n_passes)


def forest_predict(fst: Forest, query: FeatureSet) -> Ranking:
    """Route the query down every tree; each reached leaf votes for each
    premise with the fraction of its examples using that premise, and votes
    add up across trees."""
    scores: dict[str, float] = {}
    any_votes = False
    for tree in fst.trees:
        leaf = route(tree, query)
        if not leaf.examples:
            continue
        any_votes = True
        counts = Counter(p for ex in leaf.examples for p in ex.premises)
        size = len(leaf.examples)
        for p, c in counts.items():
            scores[p] = scores.get(p, 0.0) + c / size
    if not any_votes:
        raise ForestError("every tree in the forest is empty")
    return sort_ranking(scores)
