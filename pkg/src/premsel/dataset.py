"""Corpora of (features, premises) examples: filtering, splitting, file IO.

On-disk format is line-parallel text, gzip-transparent when a path ends in
``.gz``:

* ``*.features`` -- line i: space-separated feature strings of example i;
* ``*.labels``   -- line i: ``<module>:<theorem-id>`` (a bare id means
  module ``main``) followed by space-separated premise names;
* ``*.deps``     -- one ``<module>: <dep> <dep> ...`` line per module.

A corpus is immutable after loading; loading either succeeds fully or
raises without producing a partial corpus.
"""

from __future__ import annotations

import gzip
import random
import re
from dataclasses import dataclass, field
from enum import Enum
from statistics import mean
from typing import Iterable, NamedTuple

from .features import FeatureSet, parse_feature

DEFAULT_MODULE = "main"


class DatasetError(ValueError):
    pass


class FileFormatError(DatasetError):
    def __init__(self, path, line: int | None, message: str):
        where = f"{path}:{line}" if line is not None else str(path)
        super().__init__(f"{where}: {message}")
        self.path = path
        self.line = line


class DependencyCycleError(DatasetError):
    def __init__(self, cycle: list[str]):
        super().__init__("module dependency cycle: " + " -> ".join(cycle))
        self.cycle = cycle


@dataclass(frozen=True)
class Example:
    """One data point: a theorem's features and the premises its proof used."""

    id: str
    features: FeatureSet
    premises: frozenset[str]
    module: str = DEFAULT_MODULE

    def __post_init__(self):
        object.__setattr__(self, "features", frozenset(self.features))
        object.__setattr__(self, "premises", frozenset(self.premises))
        if not self.features:
            raise DatasetError(f"example {self.id!r} has no features")
        if not self.premises:
            raise DatasetError(f"example {self.id!r} has no premises")


@dataclass(frozen=True)
class Corpus:
    """An ordered list of examples plus the module dependency map."""

    examples: tuple[Example, ...]
    modules: dict[str, list[str]] = field(default_factory=lambda: {DEFAULT_MODULE: []})

    def __post_init__(self):
        object.__setattr__(self, "examples", tuple(self.examples))

    def __len__(self) -> int:
        return len(self.examples)

    def validate(self) -> None:
        seen: set[str] = set()
        for ex in self.examples:
            if ex.id in seen:
                raise DatasetError(f"duplicate example id {ex.id!r}")
            seen.add(ex.id)
            if ex.module not in self.modules:
                raise DatasetError(f"example {ex.id!r} names unknown module {ex.module!r}")


class FilterKind(str, Enum):
    ALL = "all"
    SOURCE = "source"
    MATH = "math"


@dataclass(frozen=True)
class FilterContext:
    """Inputs the filters need: a whitelist for ``math``, sources for ``source``."""

    math_whitelist: frozenset[str] = frozenset()
    source_texts: dict[str, str] = field(default_factory=dict)


# Identifier tokens as they appear in proof sources; dots keep qualified
# names whole, primes are legal in theorem names.
_IDENT = re.compile(r"[\w.']+")


def _has_underscore_component(name: str) -> bool:
    return any(part.startswith("_") for part in name.split("."))


def filter_premises(
    raw: Iterable[str], kind: FilterKind, ctx: FilterContext, id: str
) -> frozenset[str]:
    """Apply one of the three premise filters to a raw premise set.

    ``all`` drops auto-generated premises (any dot-separated component
    starting with an underscore); ``source`` keeps premises occurring as
    whole identifier tokens in the proof source of ``id``; ``math`` keeps
    premises on the whitelist.
    """
    raw = frozenset(raw)
    if kind == FilterKind.ALL:
        return frozenset(p for p in raw if not _has_underscore_component(p))
    if kind == FilterKind.SOURCE:
        if id not in ctx.source_texts:
            raise DatasetError(f"no proof source recorded for theorem {id!r}")
        tokens = set(_IDENT.findall(ctx.source_texts[id]))
        return frozenset(p for p in raw if p in tokens)
    if kind == FilterKind.MATH:
        if not ctx.math_whitelist:
            raise DatasetError("the math filter needs a non-empty whitelist")
        return frozenset(p for p in raw if p in ctx.math_whitelist)
    raise DatasetError(f"unknown filter kind {kind!r}")


def filter_corpus(c: Corpus, kind: FilterKind, ctx: FilterContext) -> Corpus:
    """Filter every example's premises, dropping examples left empty."""
    kept = []
    for ex in c.examples:
        premises = filter_premises(ex.premises, kind, ctx, ex.id)
        if premises:
            kept.append(Example(ex.id, ex.features, premises, ex.module))
    return Corpus(tuple(kept), dict(c.modules))


def transitive_dependencies(modules: dict[str, list[str]]) -> dict[str, set[str]]:
    """Transitive closure of the dependency map; raises on cycles."""
    closed: dict[str, set[str]] = {}
    state: dict[str, int] = {}  # 1 = on stack, 2 = done

    for root in modules:
        stack = [(root, iter(modules.get(root, ())))]
        path = [root]
        if state.get(root) == 2:
            continue
        state[root] = 1
        closed.setdefault(root, set())
        while stack:
            mod, deps = stack[-1]
            advanced = False
            for dep in deps:
                if state.get(dep) == 1:
                    cycle = path[path.index(dep):] + [dep]
                    raise DependencyCycleError(cycle)
                closed[mod].add(dep)
                if state.get(dep) == 2:
                    closed[mod] |= closed[dep]
                    continue
                state[dep] = 1
                closed.setdefault(dep, set())
                stack.append((dep, iter(modules.get(dep, ()))))
                path.append(dep)
                advanced = True
                break
            if not advanced:
                state[mod] = 2
                stack.pop()
                path.pop()
                if stack:
                    closed[stack[-1][0]] |= closed[mod]
    return closed


def leaf_modules(modules: dict[str, list[str]]) -> set[str]:
    """Modules no other module depends on, directly or transitively."""
    closed = transitive_dependencies(modules)
    depended_on: set[str] = set()
    for deps in closed.values():
        depended_on |= deps
    return set(closed) - depended_on


def split_corpus(c: Corpus) -> tuple[Corpus, Corpus]:
    """Split into (train, test): test examples live in the leaf modules.

    This mirrors a user developing a new module on top of the library:
    nothing in the training set depends on a test module.
    """
    test_mods = leaf_modules(c.modules)
    train = [ex for ex in c.examples if ex.module not in test_mods]
    test = [ex for ex in c.examples if ex.module in test_mods]
    return (
        Corpus(tuple(train), dict(c.modules)),
        Corpus(tuple(test), dict(c.modules)),
    )


class CorpusStats(NamedTuple):
    total_premises: int
    total_examples: int
    premises_per_example: float


def corpus_stats(c: Corpus) -> CorpusStats:
    """Distinct premise count, example count, and mean premise-set size."""
    if not c.examples:
        return CorpusStats(0, 0, 0.0)
    union: set[str] = set()
    for ex in c.examples:
        union |= ex.premises
    return CorpusStats(
        len(union),
        len(c.examples),
        mean(len(ex.premises) for ex in c.examples),
    )


def open_text(path, mode: str = "rt"):
    """Open a text file, transparently gzipped when the name ends in .gz."""
    if str(path).endswith(".gz"):
        return gzip.open(path, mode, encoding="utf-8")
    return open(path, mode, encoding="utf-8")


def _data_lines(path) -> list[tuple[int, str]]:
    with open_text(path) as fh:
        lines = []
        for no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            lines.append((no, line))
        return lines


def parse_label_token(token: str) -> tuple[str, str]:
    """Split ``module:id`` (a bare token means module ``main``)."""
    module, sep, name = token.partition(":")
    if not sep:
        return DEFAULT_MODULE, token
    if not module or not name:
        raise ValueError(f"malformed id token {token!r}")
    return module, name


def load_deps(path) -> dict[str, list[str]]:
    modules: dict[str, list[str]] = {}
    for no, line in _data_lines(path):
        head, sep, rest = line.partition(":")
        if not sep or not head.strip():
            raise FileFormatError(path, no, "expected '<module>: <dep> ...'")
        module = head.strip()
        if module in modules:
            raise FileFormatError(path, no, f"duplicate module {module!r}")
        modules[module] = rest.split()
    # Dependency targets without their own line are legal leaf-less entries.
    for deps in list(modules.values()):
        for dep in deps:
            modules.setdefault(dep, [])
    return modules


def load_corpus(features_path, labels_path, deps_path=None) -> Corpus:
    """Load a corpus from parallel features/labels files plus a deps map.

    Fails atomically: any malformed line raises :class:`FileFormatError`
    with its line number and nothing is returned.
    """
    feature_lines = _data_lines(features_path)
    label_lines = _data_lines(labels_path)
    if len(feature_lines) != len(label_lines):
        raise FileFormatError(
            features_path,
            None,
            f"{len(feature_lines)} feature lines but {len(label_lines)} label lines "
            f"in {labels_path}",
        )
    # Without a deps file the module graph is unknown: every module named in
    # the labels registers itself with no dependencies.  With one, a module
    # missing from the map is an error.
    strict_modules = deps_path is not None
    modules = load_deps(deps_path) if strict_modules else {DEFAULT_MODULE: []}

    examples: list[Example] = []
    seen_ids: set[str] = set()
    for (fno, fline), (lno, lline) in zip(feature_lines, label_lines):
        tokens = lline.split()
        try:
            module, name = parse_label_token(tokens[0])
        except ValueError as err:
            raise FileFormatError(labels_path, lno, str(err)) from None
        premises = tokens[1:]
        if not premises:
            raise FileFormatError(labels_path, lno, f"example {name!r} has no premises")
        if name in seen_ids:
            raise FileFormatError(labels_path, lno, f"duplicate example id {name!r}")
        seen_ids.add(name)
        features = fline.split()
        for f in features:
            try:
                parse_feature(f)
            except ValueError as err:
                raise FileFormatError(features_path, fno, str(err)) from None
        if module not in modules:
            if strict_modules:
                raise FileFormatError(labels_path, lno, f"unknown module {module!r}")
            modules[module] = []
        examples.append(Example(name, frozenset(features), frozenset(premises), module))
    return Corpus(tuple(examples), modules)


def save_corpus(c: Corpus, features_path, labels_path, deps_path=None) -> None:
    """Write a corpus back out; feature/premise order is sorted for stable diffs."""
    with open_text(features_path, "wt") as fh:
        for ex in c.examples:
            fh.write(" ".join(sorted(ex.features)) + "\n")
    with open_text(labels_path, "wt") as fh:
        for ex in c.examples:
            fh.write(f"{ex.module}:{ex.id} " + " ".join(sorted(ex.premises)) + "\n")
    if deps_path is not None:
        with open_text(deps_path, "wt") as fh:
            for module in sorted(c.modules):
                fh.write(f"{module}: " + " ".join(c.modules[module]) + "\n")


def generate_synthetic(
    seed: int,
    n_examples: int,
    n_features: int,
    n_premises: int,
    sparsity: float,
    n_modules: int = 5,
    noise: float = 0.05,
    n_common: int = 32,
) -> Corpus:
    """Deterministic corpus with planted feature clusters.

    Each premise owns a block of feature names; an example picks one to
    three adjacent premises and samples their blocks (each block feature
    kept with probability ``sparsity``), plus a few uniform noise features.
    Because premises and feature blocks co-occur, rankers have signal to
    learn.  ``n_common`` extra features are sprinkled over roughly half the
    corpus each, mimicking the near-ubiquitous constants of real statement
    corpora (they carry almost no signal but dominate posting lists).  The
    module map is a chain, so exactly the last module is a dependency of
    nothing and becomes the test set under :func:`split_corpus`.
    """
    if n_examples <= 0 or n_features <= 0 or n_premises <= 0:
        raise ValueError("all counts must be positive")
    if not 0 < sparsity <= 1:
        raise ValueError("sparsity must be in (0, 1]")
    rng = random.Random(f"synthetic/{seed}")
    block = max(1, n_features // n_premises)
    width = len(str(n_features - 1))
    pwidth = len(str(n_premises - 1))

    def feature_name(i: int) -> str:
        return f"T:f{i % n_features:0{width}d}"

    examples = []
    for i in range(n_examples):
        anchor = rng.randrange(n_premises)
        count = rng.choices((1, 2, 3), weights=(0.5, 0.35, 0.15))[0]
        premise_ids = [(anchor + j) % n_premises for j in range(count)]
        feats: set[str] = set()
        for p in premise_ids:
            start = p * block
            chosen = [f for f in range(start, start + block) if rng.random() < sparsity]
            if not chosen:
                chosen = [start]
            feats.update(feature_name(f) for f in chosen)
        for f in range(n_features):
            if rng.random() < noise * block / n_features:
                feats.add(feature_name(f))
        for c in range(n_common):
            if rng.random() < 0.5:
                feats.add(f"T:g{c:03d}")
        examples.append(
            Example(
                id=f"thm{i:06d}",
                features=frozenset(feats),
                premises=frozenset(f"p{p:0{pwidth}d}" for p in premise_ids),
                module=f"mod{i % n_modules}",
            )
        )
    modules = {f"mod{m}": ([f"mod{m - 1}"] if m > 0 else []) for m in range(n_modules)}
    return Corpus(tuple(examples), modules)
