import pytest
from fastapi.testclient import TestClient

from quizforge.evaluation.rubric import DEFAULT_CATEGORIES, RubricItem
from quizforge.model import BloomLevel, QuestionType
from quizforge.gateway import mock_generate
from quizforge.parsing import lint_mcq, parse_mcq
from quizforge.service import create_app
from quizforge.store import Store
from tests.test_rubric import make_annotation

GOOD_JUDGMENTS = {item.value: DEFAULT_CATEGORIES[item][0] for item in RubricItem}


def _mcq(lo_id, qtype=QuestionType.RECALL):
    raw = mock_generate(lo_id, qtype)
    return parse_mcq(raw, lo_id=lo_id, qtype=qtype, bloom=BloomLevel.REMEMBER,
                     model="mock", created_at="t")


@pytest.fixture
def store(tmp_path):
    store = Store(tmp_path / "store")
    mcqs = [_mcq("lo-1"), _mcq("lo-2"), _mcq("lo-3")]
    store.append_mcqs([(m, lint_mcq(m)) for m in mcqs])
    return store


@pytest.fixture
def client(store):
    return TestClient(create_app(store, iterations=10_000))


def test_fresh_store_serves_first_mcq_by_id(client, store):
    response = client.get("/api/tasks", params={"raterId": "alice"})
    assert response.status_code == 200
    payload = response.json()
    first_id = sorted(s.mcq.id for s in store.load_mcqs())[0]
    assert payload["task"]["mcqId"] == first_id
    assert payload["progress"]["totalMcqs"] == 3
    assert payload["rubric"]


def test_task_payload_never_leaks_key_or_explanation(client):
    response = client.get("/api/tasks", params={"raterId": "alice"})
    body = response.text
    assert "correctAnswer" not in body
    assert "explanation" not in body
    assert set(response.json()["task"]) == {
        "mcqId", "loId", "questionType", "bloom", "source",
        "stem", "choices", "codeInStem", "lints",
    }


def test_least_annotated_mcq_is_served_first(store):
    ids = sorted(s.mcq.id for s in store.load_mcqs())
    # first two MCQs each get one annotation; the third stays bare
    for mcq_id in ids[:2]:
        store.append_annotation(make_annotation(mcq_id=mcq_id, rater_id="other"))
    client = TestClient(create_app(store))
    response = client.get("/api/tasks", params={"raterId": "alice"})
    assert response.json()["task"]["mcqId"] == ids[2]


def test_rater_who_finished_everything_gets_204(store):
    for stored in store.load_mcqs():
        store.append_annotation(make_annotation(mcq_id=stored.mcq.id, rater_id="alice"))
    client = TestClient(create_app(store))
    response = client.get("/api/tasks", params={"raterId": "alice"})
    assert response.status_code == 204


def _answer(client, mcq_id, rater="alice", option="A"):
    return client.post(f"/api/tasks/{mcq_id}/answer", json={"raterId": rater, "option": option})


def test_answer_reveals_key_and_correctness(client, store):
    mcq = store.load_mcqs()[0].mcq
    response = _answer(client, mcq.id, option="B")
    assert response.status_code == 200
    payload = response.json()
    assert payload["correct"] is (mcq.correct_answer == "B")
    assert payload["key"] == mcq.correct_answer
    assert payload["explanation"] == mcq.explanation


def test_duplicate_answer_is_409(client, store):
    mcq_id = store.load_mcqs()[0].mcq.id
    assert _answer(client, mcq_id).status_code == 200
    assert _answer(client, mcq_id).status_code == 409


def test_answer_unknown_mcq_is_404(client):
    assert _answer(client, "nope").status_code == 404


def test_answer_bad_option_is_422(client, store):
    mcq_id = store.load_mcqs()[0].mcq.id
    assert _answer(client, mcq_id, option="D").status_code == 422


def test_rubric_before_answer_is_412(client, store):
    mcq_id = store.load_mcqs()[0].mcq.id
    response = client.post(
        f"/api/tasks/{mcq_id}/rubric",
        json={"raterId": "alice", "raterRole": "student", "judgments": GOOD_JUDGMENTS},
    )
    assert response.status_code == 412


def test_full_answer_then_rubric_flow(client, store):
    mcq_id = sorted(s.mcq.id for s in store.load_mcqs())[0]
    assert _answer(client, mcq_id).status_code == 200
    response = client.post(
        f"/api/tasks/{mcq_id}/rubric",
        json={"raterId": "alice", "raterRole": "student", "judgments": GOOD_JUDGMENTS},
    )
    assert response.status_code == 201, response.text
    stored = store.load_annotations(mcq_id=mcq_id)
    assert len(stored) == 1
    assert stored[0].rater_id == "alice"
    assert stored[0].answered_option == "A"
    assert stored[0].answered_correctly is True
    # the served next task moves on for this rater
    next_task = client.get("/api/tasks", params={"raterId": "alice"}).json()
    assert next_task["task"]["mcqId"] != mcq_id
    assert next_task["progress"]["annotatedByRater"] == 1


def test_rubric_missing_item_is_422(client, store):
    mcq_id = store.load_mcqs()[0].mcq.id
    _answer(client, mcq_id)
    judgments = dict(GOOD_JUDGMENTS)
    del judgments["correct_code"]
    response = client.post(
        f"/api/tasks/{mcq_id}/rubric",
        json={"raterId": "alice", "raterRole": "student", "judgments": judgments},
    )
    assert response.status_code == 422


def test_rubric_unknown_category_is_422(client, store):
    mcq_id = store.load_mcqs()[0].mcq.id
    _answer(client, mcq_id)
    judgments = dict(GOOD_JUDGMENTS, lo_alignment="sideways")
    response = client.post(
        f"/api/tasks/{mcq_id}/rubric",
        json={"raterId": "alice", "raterRole": "student", "judgments": judgments},
    )
    assert response.status_code == 422


def test_rubric_unknown_role_is_422(client, store):
    mcq_id = store.load_mcqs()[0].mcq.id
    _answer(client, mcq_id)
    response = client.post(
        f"/api/tasks/{mcq_id}/rubric",
        json={"raterId": "alice", "raterRole": "dean", "judgments": GOOD_JUDGMENTS},
    )
    assert response.status_code == 422


def test_verdict_majority(client, store):
    mcq_id = store.load_mcqs()[0].mcq.id
    for rater in ("r1", "r2"):
        store.append_annotation(
            make_annotation(mcq_id=mcq_id, rater_id=rater, lo_alignment="aligned")
        )
    store.append_annotation(
        make_annotation(mcq_id=mcq_id, rater_id="r3", lo_alignment="unrelated")
    )
    response = client.get(f"/api/mcqs/{mcq_id}/verdict")
    assert response.status_code == 200
    payload = response.json()
    assert payload["categories"]["lo_alignment"] == "aligned"
    assert payload["resolutionRule"]["lo_alignment"] == "majority"


def test_verdict_without_annotations_is_404(client, store):
    assert client.get(f"/api/mcqs/{store.load_mcqs()[0].mcq.id}/verdict").status_code == 404


def test_agreement_endpoint_unanimous(client, store):
    for stored in store.load_mcqs():
        for rater in ("r1", "r2", "r3"):
            store.append_annotation(make_annotation(mcq_id=stored.mcq.id, rater_id=rater))
    payload = client.get("/api/stats/agreement").json()
    for item_stats in payload["items"].values():
        assert item_stats["fleissKappa"] == 1.0
        assert item_stats["gwetAc1"] == 1.0


def test_agreement_endpoint_empty_store(tmp_path):
    client = TestClient(create_app(Store(tmp_path / "empty")))
    payload = client.get("/api/stats/agreement").json()
    assert payload["items"] == {}


def test_comparison_endpoint_self_similar_pools(store):
    human = parse_mcq(
        mock_generate("lo-h", QuestionType.RECALL),
        lo_id="lo-h", qtype=QuestionType.RECALL, bloom=BloomLevel.REMEMBER,
        model="", created_at="t",
    )
    from dataclasses import replace
    from quizforge.model import McqSource

    human = replace(human, id="human-1", source=McqSource.HUMAN)
    store.append_mcqs([(human, [])])
    for stored in store.load_mcqs():
        store.append_annotation(make_annotation(mcq_id=stored.mcq.id, rater_id="r1"))
    client = TestClient(create_app(store, iterations=10_000))
    payload = client.get("/api/stats/comparison").json()
    assert payload["poolSizeA"] == 3
    assert payload["poolSizeB"] == 1
    for item in payload["items"].values():
        assert item["pValue"] >= 0.99


def test_comparison_endpoint_without_pools(tmp_path):
    client = TestClient(create_app(Store(tmp_path / "empty")))
    payload = client.get("/api/stats/comparison").json()
    assert payload["items"] == {}
