"""Long-running suggestion service: /suggest, /learn, /health.

Suggestions are read-only and run concurrently; learning takes the write
side of a readers-writer lock, so a suggestion observes either the
pre-learn or the post-learn model, never a partial update.  After a learn
returns version v, every later suggestion reports a version >= v.

Endpoints are plain synchronous handlers (the framework runs them on a
thread pool), which is what makes the lock meaningful.
"""

from __future__ import annotations

import os
import threading
import time
from contextlib import contextmanager
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.staticfiles import StaticFiles

from .dataset import Example, load_corpus
from .expr import ExprError, Statement, parse_expr
from .features import FeatureSet, featurize, parse_feature
from .knn import KnnConfig
from .models import KnnModel, Model, load_model
from .schemas import (
    HealthResponse,
    LearnRequest,
    LearnResponse,
    StatementPayload,
    SuggestRequest,
    SuggestResponse,
    Suggestion,
)


class RWLock:
    """Readers-writer lock; a waiting writer blocks new readers."""

    def __init__(self):
        self._cond = threading.Condition()
        self._readers = 0
        self._writers_waiting = 0
        self._writing = False

    @contextmanager
    def read(self):
        with self._cond:
            while self._writing or self._writers_waiting:
                self._cond.wait()
            self._readers += 1
        try:
            yield
        finally:
            with self._cond:
                self._readers -= 1
                if self._readers == 0:
                    self._cond.notify_all()

    @contextmanager
    def write(self):
        with self._cond:
            self._writers_waiting += 1
            while self._writing or self._readers:
                self._cond.wait()
            self._writers_waiting -= 1
            self._writing = True
        try:
            yield
        finally:
            with self._cond:
                self._writing = False
                self._cond.notify_all()


def _bad_request(message: str, position: int | None = None):
    detail: dict = {"error": message}
    if position is not None:
        detail["position"] = position
    return HTTPException(status_code=400, detail=detail)


def _parse_statement(payload: StatementPayload) -> Statement:
    try:
        conclusion = parse_expr(payload.conclusion)
        hypotheses = tuple(parse_expr(h) for h in payload.hypotheses)
    except ExprError as err:
        raise _bad_request(str(err), err.position) from None
    return Statement(conclusion, hypotheses)


def _validate_features(features: list[str]) -> FeatureSet:
    for f in features:
        try:
            parse_feature(f)
        except ValueError as err:
            raise _bad_request(str(err)) from None
    return frozenset(features)


class ModelStore:
    """The served models plus the version counter, under one RWLock."""

    def __init__(self, models: dict[str, Model]):
        if not models:
            raise ValueError("the service needs at least one model")
        self.models = models
        self.version = 1
        self.lock = RWLock()
        self._learned = 0

    def _features_for(self, model: Model, req) -> FeatureSet:
        if req.features is not None:
            return _validate_features(req.features)
        return featurize(_parse_statement(req.statement), model.feature_config)

    def suggest(self, req: SuggestRequest) -> SuggestResponse:
        model = self.models.get(req.model)
        if model is None:
            raise _bad_request(f"model {req.model!r} is not loaded")
        features = self._features_for(model, req)
        with self.lock.read():
            start = time.perf_counter()
            ranking = model.predict(features)
            elapsed = time.perf_counter() - start
            version = self.version
        return SuggestResponse(
            suggestions=[
                Suggestion(name=name, score=score, action_hint=name)
                for name, score in ranking[: req.max_suggestions]
            ],
            model_version=version,
            elapsed=elapsed,
        )

    def learn(self, req: LearnRequest) -> int:
        # Featurize outside the lock; a statement is featurized per model
        # because feature configurations may differ.
        features = {
            kind: self._features_for(model, req) for kind, model in self.models.items()
        }
        with self.lock.write():
            self._learned += 1
            example_id = f"user{self._learned}"
            for kind, model in self.models.items():
                model.learn(
                    Example(
                        id=example_id,
                        features=features[kind],
                        premises=frozenset(req.premises),
                        module="online",
                    )
                )
            self.version += 1
            return self.version

    def health(self) -> HealthResponse:
        with self.lock.read():
            return HealthResponse(
                model_version=self.version,
                models={kind: model.describe() for kind, model in self.models.items()},
            )


def build_store(
    model_paths=(),
    train_features=None,
    train_labels=None,
    train_deps=None,
    knn_k: int = 100,
) -> ModelStore:
    """Load model files; optionally build a k-NN model straight from a
    training corpus (it is a lazy learner, no separate training needed)."""
    models: dict[str, Model] = {}
    for path in model_paths:
        model = load_model(path)
        if model.kind in models:
            raise ValueError(f"two models of kind {model.kind!r} given")
        models[model.kind] = model
    if train_features and train_labels and "knn" not in models:
        corpus = load_corpus(train_features, train_labels, train_deps)
        from .features import infer_config

        models["knn"] = KnnModel(
            list(corpus.examples),
            KnnConfig(k=knn_k),
            infer_config(f for ex in corpus.examples for f in ex.features),
        )
    return ModelStore(models)


def create_app(store: ModelStore, ui_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="premsel", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.store = store

    @app.post("/suggest", response_model=SuggestResponse)
    def suggest(req: SuggestRequest):
        return store.suggest(req)

    @app.post("/learn", response_model=LearnResponse)
    def learn(req: LearnRequest):
        return LearnResponse(model_version=store.learn(req))

    @app.get("/health", response_model=HealthResponse)
    def health():
        return store.health()

    ui = ui_dir or os.environ.get("PREMSEL_UI_DIR")
    if ui and Path(ui).is_dir():
        app.mount("/ui", StaticFiles(directory=ui, html=True), name="ui")
    return app
