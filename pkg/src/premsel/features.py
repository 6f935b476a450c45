"""Sparse string features of statements: names, bigrams, trigrams.

Every feature is a string ``<tag>:<g1>[/<g2>[/<g3>]]`` where the tag is
``T`` for the conclusion and ``H`` for a hypothesis:

* names    -- the bag of constant names occurring anywhere in the tree;
* bigrams  -- ``head/child`` for a node and each of its direct arguments;
* trigrams -- ``a/b/c`` for every downward chain of three nodes.

All functions are pure; feature sets are plain frozensets of strings.
"""

from __future__ import annotations

from dataclasses import dataclass

from .expr import Expr, Statement

CONCLUSION_TAG = "T"
HYPOTHESIS_TAG = "H"

FeatureSet = frozenset[str]


@dataclass(frozen=True)
class FeatureConfig:
    """Which feature classes to extract.  At least one must be enabled."""

    use_names: bool = True
    use_bigrams: bool = False
    use_trigrams: bool = False

    def __post_init__(self):
        if not (self.use_names or self.use_bigrams or self.use_trigrams):
            raise ValueError("at least one feature class must be enabled")

    @classmethod
    def from_spec(cls, spec: str) -> "FeatureConfig":
        """Parse the short form: ``n``, ``n+b`` or ``n+b+t``."""
        parts = set(spec.split("+"))
        if not parts <= {"n", "b", "t"} or not parts:
            raise ValueError(f"unknown feature spec {spec!r}; expected n, n+b or n+b+t")
        return cls(use_names="n" in parts, use_bigrams="b" in parts, use_trigrams="t" in parts)

    def spec(self) -> str:
        parts = []
        if self.use_names:
            parts.append("n")
        if self.use_bigrams:
            parts.append("b")
        if self.use_trigrams:
            parts.append("t")
        return "+".join(parts)


def extract_names(e: Expr, tag: str) -> set[str]:
    """All constant names in ``e``, tagged and deduplicated."""
    return {f"{tag}:{node.head}" for node in e.walk()}


def extract_bigrams(e: Expr, tag: str) -> set[str]:
    """Head/argument pairs: one feature per (node, direct child)."""
    return {f"{tag}:{node.head}/{child.head}" for node in e.walk() for child in node.args}


def extract_trigrams(e: Expr, tag: str) -> set[str]:
    """Downward three-node chains: node/child/grandchild, anywhere in the tree."""
    return {
        f"{tag}:{a.head}/{b.head}/{c.head}"
        for a in e.walk()
        for b in a.args
        for c in b.args
    }


def extract_all(e: Expr, tag: str, cfg: FeatureConfig) -> set[str]:
    feats: set[str] = set()
    if cfg.use_names:
        feats |= extract_names(e, tag)
    if cfg.use_bigrams:
        feats |= extract_bigrams(e, tag)
    if cfg.use_trigrams:
        feats |= extract_trigrams(e, tag)
    return feats


def featurize(s: Statement, cfg: FeatureConfig) -> FeatureSet:
    """Union of the enabled extractors: conclusion tagged T, hypotheses H."""
    feats = extract_all(s.conclusion, CONCLUSION_TAG, cfg)
    for hyp in s.hypotheses:
        feats |= extract_all(hyp, HYPOTHESIS_TAG, cfg)
    return frozenset(feats)


def parse_feature(feature: str) -> tuple[str, list[str]]:
    """Split a feature string into (tag, name components); raises ValueError."""
    tag, sep, rest = feature.partition(":")
    if not sep or tag not in (CONCLUSION_TAG, HYPOTHESIS_TAG):
        raise ValueError(f"feature {feature!r} lacks an H:/T: tag")
    parts = rest.split("/")
    if not 1 <= len(parts) <= 3 or any(not p for p in parts):
        raise ValueError(f"feature {feature!r} must have 1-3 nonempty name components")
    return tag, parts


def feature_arities(features) -> set[int]:
    """Set of n-gram lengths present (1=names, 2=bigrams, 3=trigrams)."""
    return {len(parse_feature(f)[1]) for f in features}


def infer_config(features) -> FeatureConfig:
    """Most permissive config consistent with the n-gram lengths seen."""
    arities = feature_arities(features)
    return FeatureConfig(
        use_names=True,
        use_bigrams=2 in arities or 3 in arities,
        use_trigrams=3 in arities,
    )
