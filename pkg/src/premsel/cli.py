"""Command-line interface.

Batch commands (featurize, filter, split, train, evaluate) transform files
locally; serve runs the HTTP service; suggest, learn and health are thin
clients for a running service.  Flag values fall back to the config file
named by ``PREMSEL_CONFIG`` and then to built-in defaults.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
import urllib.error
import urllib.request

from . import __version__
from .config import ConfigError, load_env_config, resolve
from .dataset import (
    Corpus,
    DatasetError,
    FileFormatError,
    FilterContext,
    FilterKind,
    filter_premises,
    load_corpus,
    open_text,
    parse_label_token,
    save_corpus,
    split_corpus,
)
from .evaluation import EvalError, eval_records, evaluate, report
from .expr import ExprError, parse_statement_line
from .features import FeatureConfig, featurize, infer_config
from .forest import ForestConfig, ForestError, train_forest, train_passes
from .knn import KnnConfig, KnnError
from .models import ForestModel, KnnModel, ModelError, load_model, save_model


class CliError(Exception):
    pass


def _feature_config(spec: str | None, corpus: Corpus | None = None) -> FeatureConfig:
    if spec is not None:
        return FeatureConfig.from_spec(spec)
    if corpus is not None:
        return infer_config(f for ex in corpus.examples for f in ex.features)
    return FeatureConfig.from_spec("n+b")


def cmd_featurize(args, conf) -> int:
    spec = resolve(args.features, conf, "features", "n+b")
    cfg = FeatureConfig.from_spec(spec)
    lines_out = []
    with open_text(args.statements) as fh:
        for no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                _, statement = parse_statement_line(line)
            except ExprError as err:
                raise CliError(f"{args.statements}:{no}: {err}") from None
            lines_out.append(" ".join(sorted(featurize(statement, cfg))))
    with open_text(args.out, "wt") as fh:
        for line in lines_out:
            fh.write(line + "\n")
    print(f"featurized {len(lines_out)} statements with features={cfg.spec()}")
    return 0


def _load_sources(path) -> dict[str, str]:
    sources: dict[str, str] = {}
    with open_text(path) as fh:
        for no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            name, sep, text = line.partition("\t")
            if not sep:
                raise CliError(f"{path}:{no}: expected '<id>\\t<proof source>'")
            sources[name] = text
    return sources


def _load_names(path) -> frozenset[str]:
    with open_text(path) as fh:
        return frozenset(
            line.strip() for line in fh if line.strip() and not line.startswith("#")
        )


def cmd_filter(args, conf) -> int:
    kind = FilterKind(args.kind)
    ctx = FilterContext(
        math_whitelist=_load_names(args.whitelist) if args.whitelist else frozenset(),
        source_texts=_load_sources(args.sources) if args.sources else {},
    )
    if kind == FilterKind.MATH and not args.whitelist:
        raise CliError("--whitelist is required for the math filter")
    if kind == FilterKind.SOURCE and not args.sources:
        raise CliError("--sources is required for the source filter")

    feature_lines: list[str] | None = None
    if args.features:
        if not args.features_out:
            raise CliError("--features-out is required when --features is given")
        with open_text(args.features) as fh:
            feature_lines = [
                line.strip()
                for line in fh
                if line.strip() and not line.startswith("#")
            ]

    kept_labels: list[str] = []
    kept_features: list[str] = []
    premise_union: set[str] = set()
    premise_total = 0
    data_index = 0
    with open_text(args.labels) as fh:
        for no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            tokens = line.split()
            try:
                module, name = parse_label_token(tokens[0])
            except ValueError as err:
                raise CliError(f"{args.labels}:{no}: {err}") from None
            kept = filter_premises(frozenset(tokens[1:]), kind, ctx, name)
            if kept:
                kept_labels.append(f"{module}:{name} " + " ".join(sorted(kept)))
                premise_union |= kept
                premise_total += len(kept)
                if feature_lines is not None:
                    if data_index >= len(feature_lines):
                        raise CliError(
                            f"{args.features}: fewer feature lines than label lines"
                        )
                    kept_features.append(feature_lines[data_index])
            data_index += 1
    if feature_lines is not None and data_index != len(feature_lines):
        raise CliError(
            f"{args.features}: {len(feature_lines)} feature lines "
            f"but {data_index} label lines"
        )

    with open_text(args.out, "wt") as fh:
        for line in kept_labels:
            fh.write(line + "\n")
    if feature_lines is not None:
        with open_text(args.features_out, "wt") as fh:
            for line in kept_features:
                fh.write(line + "\n")

    n = len(kept_labels)
    per = premise_total / n if n else 0.0
    print(
        f"filter={kind.value} total_premises={len(premise_union)} "
        f"total_examples={n} premises_per_example={per:.2f}"
    )
    return 0


def cmd_split(args, conf) -> int:
    corpus = load_corpus(args.features, args.labels, args.deps)
    train, test = split_corpus(corpus)
    save_corpus(train, args.train_features, args.train_labels)
    save_corpus(test, args.test_features, args.test_labels)
    train_mods = {ex.module for ex in train.examples}
    test_mods = {ex.module for ex in test.examples}
    print(
        f"train: {len(train.examples)} examples in {len(train_mods)} modules; "
        f"test: {len(test.examples)} examples in {len(test_mods)} modules"
    )
    return 0


def cmd_train(args, conf) -> int:
    corpus = load_corpus(args.features_file, args.labels_file, args.deps_file)
    if not corpus.examples:
        raise CliError("training corpus is empty")
    feature_cfg = _feature_config(resolve(args.features, conf, "features", None), corpus)
    seed = resolve(args.seed, conf, "seed", 0, int)
    started = time.perf_counter()

    if args.model == "forest":
        n_passes = resolve(args.passes, conf, "passes", 3, int)
        if args.init_model:
            base = load_model(args.init_model)
            if base.kind != "forest":
                raise CliError("--init-model must point at a forest model")
            # Continued training keeps the loaded forest's structure; only
            # the number of additional passes comes from the flags.
            forest = train_passes(base.forest, corpus, n_passes)
            model = ForestModel(forest, base.feature_config)
        else:
            cfg = ForestConfig(
                n_trees=resolve(args.trees, conf, "trees", 300, int),
                example_sampling_prob=resolve(args.sample_p, conf, "sample-p", 0.3, float),
                n_passes=n_passes,
                leaf_split_threshold=resolve(
                    args.leaf_threshold, conf, "leaf-threshold", 16, int
                ),
                n_candidate_features=resolve(args.candidates, conf, "candidates", 32, int),
                rng_seed=seed,
            )
            model = ForestModel(train_forest(corpus, cfg), feature_cfg)
        trained_cfg = model.forest.config
        echo = (
            f"trees={trained_cfg.n_trees} p={trained_cfg.example_sampling_prob:g} "
            f"passes={n_passes} seed={trained_cfg.rng_seed}"
        )
    else:
        k = resolve(args.k, conf, "k", 100, int)
        weighted = resolve(
            args.similarity_weighted, conf, "similarity-weighted", False, bool
        )
        examples = list(corpus.examples)
        if args.init_model:
            base = load_model(args.init_model)
            if base.kind != "knn":
                raise CliError("--init-model must point at a knn model")
            examples = base.examples + examples
            feature_cfg = base.feature_config
        model = KnnModel(
            examples, KnnConfig(k=k, similarity_weighted=weighted), feature_cfg
        )
        echo = f"k={k}" + (" similarity_weighted" if weighted else "")

    save_model(model, args.out)
    elapsed = time.perf_counter() - started
    print(f"trained {args.model} ({echo}) features={model.feature_config.spec()}")
    print(f"wall_time={elapsed:.2f}s model={args.out}")
    return 0


def cmd_evaluate(args, conf) -> int:
    model = load_model(args.model_file)
    test = load_corpus(args.test_features, args.test_labels, args.deps_file)
    spec = resolve(args.features, conf, "features", None)
    cfg = FeatureConfig.from_spec(spec) if spec else _feature_config(None, test)
    result = evaluate(model, test, cfg)
    if args.out:
        with open_text(args.out, "wt") as fh:
            for record in eval_records(result):
                fh.write(json.dumps(record, separators=(",", ":")) + "\n")
    label = f"{model.kind}/{model.feature_config.spec()}"
    print(report([result], [("test", label)]).text)
    print(
        f"examples={result.example_count} mean_cover={result.mean_cover:.4f} "
        f"mean_cover_plus={result.mean_cover_plus:.4f} "
        f"mean_prediction_seconds={result.mean_prediction_seconds:.4f} "
        f"parallelism={result.parallelism}"
    )
    return 0


def _parse_addr(addr: str) -> tuple[str, int]:
    host, sep, port = addr.rpartition(":")
    if not sep or not port.isdigit():
        raise CliError(f"--addr must look like HOST:PORT, got {addr!r}")
    return host or "127.0.0.1", int(port)


def cmd_serve(args, conf) -> int:
    import uvicorn

    from .service import build_store, create_app

    addr = resolve(args.addr, conf, "addr", "127.0.0.1:8752")
    host, port = _parse_addr(addr)
    store = build_store(
        model_paths=args.model_file or [],
        train_features=args.train_features,
        train_labels=args.train_labels,
        train_deps=args.train_deps,
        knn_k=resolve(args.k, conf, "k", 100, int),
    )
    app = create_app(store, ui_dir=args.ui_dir)
    loaded = ", ".join(sorted(store.models))
    print(f"serving models [{loaded}] on http://{host}:{port}")
    uvicorn.run(app, host=host, port=port, log_level="warning")
    return 0


def _post(addr: str, endpoint: str, payload: dict) -> dict:
    url = f"http://{addr}{endpoint}"
    data = json.dumps(payload).encode("utf-8")
    req = urllib.request.Request(
        url, data=data, headers={"Content-Type": "application/json"}
    )
    try:
        with urllib.request.urlopen(req) as resp:
            return json.loads(resp.read().decode("utf-8"))
    except urllib.error.HTTPError as err:
        body = err.read().decode("utf-8", errors="replace")
        raise CliError(f"{url} -> {err.code}: {body}") from None
    except urllib.error.URLError as err:
        raise CliError(f"cannot reach {url}: {err.reason}") from None


def _statement_payload(args) -> dict:
    payload: dict = {}
    if args.conclusion:
        payload["statement"] = {
            "conclusion": args.conclusion,
            "hypotheses": args.hyp or [],
        }
    elif args.features_line:
        payload["features"] = args.features_line.split()
    else:
        raise CliError("provide --conclusion (with optional --hyp) or --features-line")
    return payload


def cmd_suggest(args, conf) -> int:
    addr = resolve(args.addr, conf, "addr", "127.0.0.1:8752")
    payload = _statement_payload(args)
    payload["model"] = args.model
    payload["max_suggestions"] = args.max_suggestions
    resp = _post(addr, "/suggest", payload)
    for s in resp["suggestions"]:
        print(f"{s['name']}\t{s['score']:.4f}")
    print(
        f"# model_version={resp['model_version']} elapsed={resp['elapsed']:.4f}s",
        file=sys.stderr,
    )
    return 0


def cmd_learn(args, conf) -> int:
    addr = resolve(args.addr, conf, "addr", "127.0.0.1:8752")
    payload = _statement_payload(args)
    payload["premises"] = args.premises.split()
    resp = _post(addr, "/learn", payload)
    print(f"model_version={resp['model_version']}")
    return 0


def cmd_health(args, conf) -> int:
    addr = resolve(args.addr, conf, "addr", "127.0.0.1:8752")
    url = f"http://{addr}/health"
    try:
        with urllib.request.urlopen(url) as resp:
            print(json.dumps(json.loads(resp.read().decode("utf-8")), indent=2))
    except urllib.error.URLError as err:
        raise CliError(f"cannot reach {url}: {err}") from None
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="premsel", description="premise selection engine"
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("featurize", help="turn a statement file into a features file")
    p.add_argument("--statements", required=True)
    p.add_argument("--features", choices=["n", "n+b", "n+b+t"])
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_featurize)

    p = sub.add_parser("filter", help="filter premise labels")
    p.add_argument("--labels", required=True)
    p.add_argument("--kind", required=True, choices=[k.value for k in FilterKind])
    p.add_argument("--whitelist")
    p.add_argument("--sources")
    p.add_argument("--out", required=True)
    p.add_argument("--features", help="parallel features file to prune in sync")
    p.add_argument("--features-out")
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("split", help="split a corpus by module dependencies")
    p.add_argument("--deps", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--train-features", required=True)
    p.add_argument("--train-labels", required=True)
    p.add_argument("--test-features", required=True)
    p.add_argument("--test-labels", required=True)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("train", help="train a model")
    p.add_argument("--model", required=True, choices=["forest", "knn"])
    p.add_argument("--features-file", required=True)
    p.add_argument("--labels-file", required=True)
    p.add_argument("--deps-file")
    p.add_argument("--seed", type=int)
    p.add_argument("--trees", type=int)
    p.add_argument("--sample-p", type=float)
    p.add_argument("--passes", type=int)
    p.add_argument("--leaf-threshold", type=int)
    p.add_argument("--candidates", type=int)
    p.add_argument("--k", type=int)
    p.add_argument(
        "--similarity-weighted",
        action="store_true",
        default=None,
        help="weight k-NN votes by neighbour similarity instead of counting",
    )
    p.add_argument("--features", choices=["n", "n+b", "n+b+t"])
    p.add_argument("--init-model", help="continue training from this model file")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="evaluate a model on a test corpus")
    p.add_argument("--model-file", required=True)
    p.add_argument("--test-features", required=True)
    p.add_argument("--test-labels", required=True)
    p.add_argument("--deps-file")
    p.add_argument("--features", choices=["n", "n+b", "n+b+t"])
    p.add_argument("--out", help="write per-example records (JSON lines) here")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("serve", help="run the suggestion service")
    p.add_argument("--model-file", action="append")
    p.add_argument("--addr")
    p.add_argument("--train-features", help="build a k-NN model from this corpus")
    p.add_argument("--train-labels")
    p.add_argument("--train-deps")
    p.add_argument("--k", type=int)
    p.add_argument("--ui-dir", help="serve this directory at /ui")
    p.set_defaults(func=cmd_serve)

    for name, func in (("suggest", cmd_suggest), ("learn", cmd_learn)):
        p = sub.add_parser(name, help=f"{name} against a running service")
        p.add_argument("--addr")
        p.add_argument("--conclusion", help="conclusion s-expression")
        p.add_argument("--hyp", action="append", help="hypothesis s-expression")
        p.add_argument("--features-line", help="space-separated feature strings")
        if name == "suggest":
            p.add_argument("--model", default="forest", choices=["forest", "knn"])
            p.add_argument("--max-suggestions", type=int, default=32)
        else:
            p.add_argument("--premises", required=True, help="space-separated names")
        p.set_defaults(func=func)

    p = sub.add_parser("health", help="query a running service")
    p.add_argument("--addr")
    p.set_defaults(func=cmd_health)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        conf = load_env_config()
        return args.func(args, conf)
    except (
        CliError,
        ConfigError,
        DatasetError,
        EvalError,
        ExprError,
        FileFormatError,
        ForestError,
        KnnError,
        ModelError,
        ValueError,
        OSError,
    ) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
