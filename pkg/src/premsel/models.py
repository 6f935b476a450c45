"""Trained-model wrappers and their on-disk format.

Both rankers serialize to a single self-describing JSON document (gzip
applies when the path ends in ``.gz``)::

    {"format": "premsel-model", "version": 1, "kind": "forest" | "knn", ...}

A forest file stores the full tree structure, the example table the leaves
reference, and the random-generator states, so reloading reproduces both
predictions and any continued training bit for bit.  A k-NN file stores
the training examples; the feature index is rebuilt on load (and after
online updates), which is deterministic and cheap relative to prediction.

Wrappers present one surface to the CLI, evaluator and service:
``predict(features)``, ``learn(example)``, ``feature_config``, ``kind``.
Wrappers are not internally locked; the service serializes writers.
"""

from __future__ import annotations

import json
import random
from .dataset import Corpus, Example, open_text
from .features import FeatureConfig, FeatureSet
from .forest import Forest, ForestConfig, Leaf, Node, Tree, forest_predict, update_forest
from .knn import FeatureIndex, KnnConfig, Ranking, knn_predict

FORMAT_NAME = "premsel-model"
FORMAT_VERSION = 1


class ModelError(ValueError):
    pass


def _example_to_row(ex: Example) -> list:
    return [ex.id, ex.module, sorted(ex.features), sorted(ex.premises)]


def _example_from_row(row: list) -> Example:
    id_, module, features, premises = row
    return Example(id_, frozenset(features), frozenset(premises), module)


class KnnModel:
    """Lazy learner: the stored corpus plus a rebuilt-on-demand index."""

    kind = "knn"

    def __init__(
        self,
        examples: list[Example],
        config: KnnConfig,
        feature_config: FeatureConfig,
    ):
        if not examples:
            raise ModelError("a k-NN model needs at least one training example")
        self.examples = list(examples)
        self.config = config
        self.feature_config = feature_config
        self._index: FeatureIndex | None = None
        self._corpus: Corpus | None = None

    def _materialize(self) -> tuple[Corpus, FeatureIndex]:
        if self._index is None or self._corpus is None:
            modules = {ex.module: [] for ex in self.examples}
            self._corpus = Corpus(tuple(self.examples), modules)
            self._index = FeatureIndex(self.examples)
        return self._corpus, self._index

    def predict(self, features: FeatureSet) -> Ranking:
        corpus, index = self._materialize()
        return knn_predict(features, corpus, index, self.config)

    def learn(self, example: Example) -> None:
        self.examples.append(example)
        self._index = None
        self._corpus = None

    def describe(self) -> dict:
        return {
            "kind": self.kind,
            "features": self.feature_config.spec(),
            "examples": len(self.examples),
            "k": self.config.k,
            "similarity_weighted": self.config.similarity_weighted,
        }

    def to_payload(self) -> dict:
        return {
            "k": self.config.k,
            "similarity_weighted": self.config.similarity_weighted,
            "examples": [_example_to_row(ex) for ex in self.examples],
        }

    @classmethod
    def from_payload(cls, payload: dict, feature_config: FeatureConfig) -> "KnnModel":
        return cls(
            examples=[_example_from_row(r) for r in payload["examples"]],
            config=KnnConfig(
                k=payload["k"], similarity_weighted=payload["similarity_weighted"]
            ),
            feature_config=feature_config,
        )


def _encode_tree(tree: Tree, example_ids: dict[str, int]) -> list:
    """Flat preorder encoding: node = ["n", rule, left-index, right-index],
    leaf = ["l", [example-table indices]]; the root sits at index 0."""
    order: list[Tree] = []
    stack: list[Tree] = [tree]
    while stack:
        t = stack.pop()
        order.append(t)
        if isinstance(t, Node):
            stack.append(t.right)
            stack.append(t.left)
    index_of = {id(t): i for i, t in enumerate(order)}
    out: list = []
    for t in order:
        if isinstance(t, Node):
            out.append(["n", t.rule, index_of[id(t.left)], index_of[id(t.right)]])
        else:
            out.append(["l", [example_ids[ex.id] for ex in t.examples]])
    return out


def _decode_tree(flat: list, table: list[Example]) -> Tree:
    built: list[Tree | None] = [None] * len(flat)
    for i in range(len(flat) - 1, -1, -1):
        row = flat[i]
        if row[0] == "l":
            built[i] = Leaf(tuple(table[j] for j in row[1]))
        else:
            left = built[row[2]]
            right = built[row[3]]
            if left is None or right is None:
                raise ModelError("malformed tree encoding: child before parent")
            built[i] = Node(row[1], left, right)
    root = built[0]
    if root is None:
        raise ModelError("malformed tree encoding: empty tree")
    return root


def _rng_state_to_json(rng: random.Random) -> list:
    version, internal, gauss = rng.getstate()
    return [version, list(internal), gauss]


def _rng_state_from_json(state: list) -> random.Random:
    rng = random.Random()
    rng.setstate((state[0], tuple(state[1]), state[2]))
    return rng


class ForestModel:
    """Eager learner: a trained forest, updatable one example at a time."""

    kind = "forest"

    def __init__(self, forest: Forest, feature_config: FeatureConfig):
        self.forest = forest
        self.feature_config = feature_config

    def predict(self, features: FeatureSet) -> Ranking:
        return forest_predict(self.forest, features)

    def learn(self, example: Example) -> None:
        self.forest = update_forest(self.forest, example)

    def describe(self) -> dict:
        cfg = self.forest.config
        return {
            "kind": self.kind,
            "features": self.feature_config.spec(),
            "trees": cfg.n_trees,
            "example_sampling_prob": cfg.example_sampling_prob,
            "passes": cfg.n_passes,
            "stored_examples": sum(
                len(leaf.examples) for tree in self.forest.trees for leaf in _leaves(tree)
            ),
        }

    def to_payload(self) -> dict:
        table: list[Example] = []
        ids: dict[str, int] = {}
        for tree in self.forest.trees:
            for leaf in _leaves(tree):
                for ex in leaf.examples:
                    if ex.id not in ids:
                        ids[ex.id] = len(table)
                        table.append(ex)
                    elif table[ids[ex.id]] != ex:
                        # The table is keyed by id; two different examples
                        # under one id would serialize wrongly.
                        raise ModelError(
                            f"two different examples share the id {ex.id!r}"
                        )
        cfg = self.forest.config
        return {
            "config": {
                "n_trees": cfg.n_trees,
                "example_sampling_prob": cfg.example_sampling_prob,
                "n_passes": cfg.n_passes,
                "leaf_split_threshold": cfg.leaf_split_threshold,
                "n_candidate_features": cfg.n_candidate_features,
                "rng_seed": cfg.rng_seed,
            },
            "examples": [_example_to_row(ex) for ex in table],
            "trees": [_encode_tree(t, ids) for t in self.forest.trees],
            "tree_rngs": [_rng_state_to_json(r) for r in self.forest.tree_rngs],
            "master_rng": _rng_state_to_json(self.forest.master_rng),
        }

    @classmethod
    def from_payload(cls, payload: dict, feature_config: FeatureConfig) -> "ForestModel":
        cfg = ForestConfig(**payload["config"])
        table = [_example_from_row(r) for r in payload["examples"]]
        forest = Forest(
            trees=[_decode_tree(t, table) for t in payload["trees"]],
            config=cfg,
            tree_rngs=[_rng_state_from_json(s) for s in payload["tree_rngs"]],
            master_rng=_rng_state_from_json(payload["master_rng"]),
        )
        if len(forest.trees) != cfg.n_trees or len(forest.tree_rngs) != cfg.n_trees:
            raise ModelError("tree count does not match the stored config")
        return cls(forest, feature_config)


def _leaves(tree: Tree):
    stack = [tree]
    while stack:
        t = stack.pop()
        if isinstance(t, Node):
            stack.append(t.right)
            stack.append(t.left)
        else:
            yield t


Model = KnnModel | ForestModel


def save_model(model: Model, path) -> None:
    doc = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "kind": model.kind,
        "feature_config": model.feature_config.spec(),
        "payload": model.to_payload(),
    }
    with open_text(path, "wt") as fh:
        fh.write(json.dumps(doc, separators=(",", ":")) + "\n")


def load_model(path) -> Model:
    with open_text(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as err:
            raise ModelError(f"{path}: not a model file ({err})") from None
    if not isinstance(doc, dict) or doc.get("format") != FORMAT_NAME:
        raise ModelError(f"{path}: not a {FORMAT_NAME} file")
    if doc.get("version") != FORMAT_VERSION:
        raise ModelError(f"{path}: unsupported format version {doc.get('version')!r}")
    feature_config = FeatureConfig.from_spec(doc["feature_config"])
    if doc["kind"] == "knn":
        return KnnModel.from_payload(doc["payload"], feature_config)
    if doc["kind"] == "forest":
        return ForestModel.from_payload(doc["payload"], feature_config)
    raise ModelError(f"{path}: unknown model kind {doc['kind']!r}")
