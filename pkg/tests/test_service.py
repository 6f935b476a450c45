import threading

import pytest
from fastapi.testclient import TestClient

from premsel.features import FeatureConfig
from premsel.forest import ForestConfig, route, train_forest
from premsel.knn import KnnConfig
from premsel.models import ForestModel, KnnModel
from premsel.schemas import LearnRequest, SuggestRequest, SuggestResponse
from premsel.service import ModelStore, RWLock, create_app
from helpers import mk_corpus, mk_example


def _unique_corpus(n=20):
    return mk_corpus(
        [
            mk_example(f"t{i}", {f"T:u{i}", f"T:v{i}"}, {f"p{i}a", f"p{i}b"})
            for i in range(n)
        ]
    )


@pytest.fixture()
def client():
    corpus = _unique_corpus()
    forest_cfg = ForestConfig(
        n_trees=8,
        example_sampling_prob=1.0,
        n_passes=1,
        leaf_split_threshold=2,
        n_candidate_features=16,
        rng_seed=3,
    )
    store = ModelStore(
        {
            "forest": ForestModel(
                train_forest(corpus, forest_cfg), FeatureConfig.from_spec("n")
            ),
            "knn": KnnModel(
                list(corpus.examples), KnnConfig(k=1), FeatureConfig.from_spec("n")
            ),
        }
    )
    with TestClient(create_app(store)) as c:
        c.store = store
        yield c


def test_knn_suggest_training_example(client):
    resp = client.post(
        "/suggest",
        json={"features": ["T:u3", "T:v3"], "model": "knn", "max_suggestions": 4},
    )
    assert resp.status_code == 200
    body = resp.json()
    names = {s["name"] for s in body["suggestions"][:2]}
    assert names == {"p3a", "p3b"}
    assert body["model_version"] == 1
    assert body["elapsed"] >= 0.0


def test_forest_suggest_training_example(client):
    resp = client.post(
        "/suggest", json={"features": ["T:u5", "T:v5"], "model": "forest"}
    )
    assert resp.status_code == 200
    top = resp.json()["suggestions"][:2]
    assert {s["name"] for s in top} == {"p5a", "p5b"}


def test_suggest_with_statement_payload(client):
    resp = client.post(
        "/suggest",
        json={
            "statement": {"conclusion": "(u7 v7)", "hypotheses": []},
            "model": "knn",
        },
    )
    assert resp.status_code == 200
    assert resp.json()["suggestions"]


def test_suggestions_sorted_and_truncated(client):
    resp = client.post(
        "/suggest", json={"features": ["T:u1"], "model": "knn", "max_suggestions": 1}
    )
    body = resp.json()
    assert len(body["suggestions"]) == 1
    scores = [s["score"] for s in body["suggestions"]]
    assert scores == sorted(scores, reverse=True)


def test_learn_then_suggest_new_example(client):
    learn = client.post(
        "/learn",
        json={"features": ["T:fresh1", "T:fresh2"], "premises": ["brand_new"]},
    )
    assert learn.status_code == 200
    version = learn.json()["model_version"]
    assert version == 2

    again = client.post(
        "/suggest", json={"features": ["T:fresh1", "T:fresh2"], "model": "knn"}
    )
    body = again.json()
    assert body["suggestions"][0]["name"] == "brand_new"
    assert body["model_version"] >= version

    # The forced-sampling forest holds the new example in every tree.
    forest = client.store.models["forest"].forest
    for tree in forest.trees:
        leaf = route(tree, frozenset({"T:fresh1", "T:fresh2"}))
        assert any(ex.id == "user1" for ex in leaf.examples)


def test_health_reports_models_and_version(client):
    resp = client.get("/health")
    assert resp.status_code == 200
    body = resp.json()
    assert body["status"] == "ok"
    assert body["model_version"] == 1
    assert body["models"]["knn"]["examples"] == 20
    assert body["models"]["forest"]["trees"] == 8


def test_rejects_both_or_neither_input(client):
    both = client.post(
        "/suggest",
        json={
            "statement": {"conclusion": "x"},
            "features": ["T:a"],
            "model": "knn",
        },
    )
    assert both.status_code == 422
    neither = client.post("/suggest", json={"model": "knn"})
    assert neither.status_code == 422


def test_rejects_malformed_statement_with_position(client):
    resp = client.post(
        "/suggest",
        json={"statement": {"conclusion": "(f (g"}, "model": "knn"},
    )
    assert resp.status_code == 400
    detail = resp.json()["detail"]
    assert detail["position"] == 3
    assert "unclosed" in detail["error"]


def test_rejects_bad_feature_strings(client):
    resp = client.post("/suggest", json={"features": ["untagged"], "model": "knn"})
    assert resp.status_code == 400
    assert "tag" in resp.json()["detail"]["error"]


def test_rejects_unknown_model_and_empty_premises(client):
    resp = client.post("/suggest", json={"features": ["T:a"], "model": "svm"})
    assert resp.status_code == 422
    resp = client.post("/learn", json={"features": ["T:a"], "premises": []})
    assert resp.status_code == 422


def test_single_kind_store_rejects_missing_model():
    corpus = _unique_corpus(5)
    store = ModelStore(
        {"knn": KnnModel(list(corpus.examples), KnnConfig(k=1), FeatureConfig.from_spec("n"))}
    )
    with TestClient(create_app(store)) as client:
        resp = client.post("/suggest", json={"features": ["T:u1"], "model": "forest"})
        assert resp.status_code == 400
        assert "not loaded" in resp.json()["detail"]["error"]


def test_documented_payloads_roundtrip_schema():
    suggest = {
        "statement": {"conclusion": "(Ne (HDiv.hDiv a b) 0)", "hypotheses": ["(Ne a 0)"]},
        "model": "knn",
        "max_suggestions": 16,
    }
    req = SuggestRequest.model_validate(suggest)
    assert SuggestRequest.model_validate(req.model_dump()) == req
    assert req.statement.conclusion.startswith("(Ne")
    assert req.features is None
    learn = {"features": ["T:a", "H:b/c"], "premises": ["mul_comm"]}
    parsed = LearnRequest.model_validate(learn)
    assert parsed.features == ["T:a", "H:b/c"]
    resp = SuggestResponse.model_validate(
        {
            "suggestions": [{"name": "mul_comm", "score": 3.0, "action_hint": "mul_comm"}],
            "model_version": 4,
            "elapsed": 0.002,
        }
    )
    assert resp.suggestions[0].action_hint == "mul_comm"


def test_concurrent_suggests_and_learns(client):
    errors = []
    versions = []

    def reader():
        try:
            local = []
            for _ in range(25):
                r = client.post(
                    "/suggest", json={"features": ["T:u1", "T:v1"], "model": "knn"}
                )
                assert r.status_code == 200
                local.append(r.json()["model_version"])
            versions.append(local)
        except Exception as err:  # noqa: BLE001
            errors.append(err)

    def writer():
        try:
            for i in range(10):
                r = client.post(
                    "/learn",
                    json={"features": [f"T:w{i}"], "premises": [f"np{i}"]},
                )
                assert r.status_code == 200
        except Exception as err:  # noqa: BLE001
            errors.append(err)

    threads = [threading.Thread(target=reader) for _ in range(4)]
    threads.append(threading.Thread(target=writer))
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert not errors
    for seen in versions:
        assert seen == sorted(seen)  # versions never go backwards per thread
    final = client.get("/health").json()
    assert final["model_version"] == 11


def test_rwlock_mutual_exclusion():
    lock = RWLock()
    state = {"readers": 0, "writer": False}
    violations = []

    def read_once():
        with lock.read():
            state["readers"] += 1
            if state["writer"]:
                violations.append("reader during write")
            state["readers"] -= 1

    def write_once():
        with lock.write():
            if state["writer"] or state["readers"]:
                violations.append("writer overlap")
            state["writer"] = True
            state["writer"] = False

    threads = [threading.Thread(target=read_once) for _ in range(20)]
    threads += [threading.Thread(target=write_once) for _ in range(5)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert not violations


def test_store_requires_a_model():
    with pytest.raises(ValueError):
        ModelStore({})
