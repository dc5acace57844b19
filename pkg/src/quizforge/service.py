"""HTTP API backing the review UI.

The annotation protocol is answer-first: a rater must submit an answer
attempt for an MCQ before the rubric can be filed, and no pre-answer payload
ever includes the key or the explanation. Enforcement is server-side: the
rubric endpoint returns 412 without a recorded answer, and answer attempts
are kept in memory until the rubric lands (the completed annotation is what
gets persisted).
"""

from __future__ import annotations

import threading
from pathlib import Path
from typing import Any

from fastapi import FastAPI, HTTPException, Response
from pydantic import BaseModel

from .evaluation import (
    EmptyPoolError,
    NoEligibleItemsError,
    RaterRole,
    RubricAnnotation,
    RubricItem,
    agreement_report,
    compare_pools,
    default_rubric_schema,
    resolve,
    resolve_all,
)
from .evaluation.rubric import RubricError
from .evaluation.significance import DEFAULT_MC_ITERATIONS
from .model import CHOICE_LABELS, McqSource, QuizforgeError
from .store import Store, StoredMcq


class AnswerBody(BaseModel):
    raterId: str
    option: str


class RubricBody(BaseModel):
    raterId: str
    raterRole: str
    judgments: dict[str, str]


def _task_payload(stored: StoredMcq) -> dict[str, Any]:
    """MCQ view for a rater who has not answered yet: no key, no explanation."""
    mcq = stored.mcq
    return {
        "mcqId": mcq.id,
        "loId": mcq.lo_id,
        "questionType": mcq.question_type.value,
        "bloom": mcq.bloom.value,
        "source": mcq.source.value,
        "stem": mcq.stem,
        "choices": [{"option": c.option, "text": c.text} for c in mcq.choices],
        "codeInStem": mcq.code_in_stem,
        "lints": [finding.to_record() for finding in stored.lints],
    }


def create_app(
    store: Store,
    assets_dir: str | Path | None = None,
    iterations: int = DEFAULT_MC_ITERATIONS,
    seed: int = 0,
) -> FastAPI:
    app = FastAPI(title="quizforge review service")
    schema = default_rubric_schema()
    # Answer attempts awaiting their rubric, keyed by (mcqId, raterId).
    pending_answers: dict[tuple[str, str], str] = {}
    state_lock = threading.Lock()

    def _mcq_index() -> dict[str, StoredMcq]:
        return {stored.mcq.id: stored for stored in store.load_mcqs()}

    @app.get("/api/rubric")
    def rubric_schema() -> dict[str, Any]:
        return {"items": schema.to_record()}

    @app.get("/api/tasks")
    def next_task(raterId: str) -> Any:
        if not raterId:
            raise HTTPException(status_code=422, detail="raterId is required")
        mcqs = _mcq_index()
        annotations = store.load_annotations()
        counts: dict[str, int] = {mcq_id: 0 for mcq_id in mcqs}
        rated_by_rater: set[str] = set()
        for annotation in annotations:
            if annotation.mcq_id in counts:
                counts[annotation.mcq_id] += 1
            if annotation.rater_id == raterId:
                rated_by_rater.add(annotation.mcq_id)

        candidates = [mcq_id for mcq_id in mcqs if mcq_id not in rated_by_rater]
        if not candidates:
            return Response(status_code=204)
        chosen = min(candidates, key=lambda mcq_id: (counts[mcq_id], mcq_id))
        return {
            "task": _task_payload(mcqs[chosen]),
            "rubric": schema.to_record(),
            "progress": {
                "totalMcqs": len(mcqs),
                "annotatedByRater": len(rated_by_rater),
                "remainingForRater": len(candidates),
                "totalAnnotations": len(annotations),
            },
        }

    @app.post("/api/tasks/{mcq_id}/answer")
    def submit_answer(mcq_id: str, body: AnswerBody) -> dict[str, Any]:
        mcqs = _mcq_index()
        stored = mcqs.get(mcq_id)
        if stored is None:
            raise HTTPException(status_code=404, detail=f"unknown MCQ {mcq_id!r}")
        if body.option not in CHOICE_LABELS:
            raise HTTPException(status_code=422, detail=f"option must be one of {CHOICE_LABELS}")
        key = (mcq_id, body.raterId)
        with state_lock:
            already_annotated = any(
                a.rater_id == body.raterId for a in store.load_annotations(mcq_id=mcq_id)
            )
            if key in pending_answers or already_annotated:
                raise HTTPException(status_code=409, detail="answer already recorded")
            pending_answers[key] = body.option
        return {
            "correct": body.option == stored.mcq.correct_answer,
            "key": stored.mcq.correct_answer,
            "explanation": stored.mcq.explanation,
        }

    @app.post("/api/tasks/{mcq_id}/rubric", status_code=201)
    def submit_rubric(mcq_id: str, body: RubricBody) -> dict[str, Any]:
        mcqs = _mcq_index()
        stored = mcqs.get(mcq_id)
        if stored is None:
            raise HTTPException(status_code=404, detail=f"unknown MCQ {mcq_id!r}")
        try:
            role = RaterRole(body.raterRole)
        except ValueError:
            raise HTTPException(status_code=422, detail=f"unknown rater role {body.raterRole!r}")
        try:
            judgments = {RubricItem(item): category for item, category in body.judgments.items()}
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=f"unknown rubric item: {exc}")

        key = (mcq_id, body.raterId)
        with state_lock:
            if key not in pending_answers:
                raise HTTPException(
                    status_code=412, detail="answer the MCQ before filing the rubric"
                )
            option = pending_answers[key]
            try:
                annotation = RubricAnnotation(
                    mcq_id=mcq_id,
                    rater_id=body.raterId,
                    rater_role=role,
                    answered_option=option,
                    answered_correctly=option == stored.mcq.correct_answer,
                    judgments=judgments,
                )
                schema.validate_judgments(annotation.judgments)
            except RubricError as exc:
                raise HTTPException(status_code=422, detail=str(exc))
            try:
                store.append_annotation(annotation)
            except QuizforgeError as exc:
                raise HTTPException(status_code=409, detail=str(exc))
            del pending_answers[key]
        return annotation.to_record()

    @app.get("/api/stats/agreement")
    def stats_agreement() -> dict[str, Any]:
        annotations = store.load_annotations()
        try:
            report = agreement_report(annotations, schema)
        except NoEligibleItemsError:
            return {"items": {}, "nAnnotations": len(annotations)}
        return {"items": report.to_record(), "nAnnotations": len(annotations)}

    @app.get("/api/stats/comparison")
    def stats_comparison(iterationsOverride: int | None = None, seedOverride: int | None = None) -> dict[str, Any]:
        annotations = store.load_annotations()
        source_by_id = {stored.mcq.id: stored.mcq.source for stored in store.load_mcqs()}
        verdicts = resolve_all(annotations, schema)
        generated = [v for v in verdicts if source_by_id.get(v.mcq_id) is McqSource.GENERATED]
        human = [v for v in verdicts if source_by_id.get(v.mcq_id) is McqSource.HUMAN]
        try:
            report = compare_pools(
                generated,
                human,
                schema,
                iterations=iterationsOverride or iterations,
                seed=seed if seedOverride is None else seedOverride,
            )
        except EmptyPoolError:
            return {"items": {}, "poolSizeA": len(generated), "poolSizeB": len(human)}
        return report.to_record()

    @app.get("/api/mcqs/{mcq_id}/verdict")
    def verdict(mcq_id: str) -> dict[str, Any]:
        annotations = store.load_annotations(mcq_id=mcq_id)
        if not annotations:
            raise HTTPException(status_code=404, detail=f"no annotations for MCQ {mcq_id!r}")
        return resolve(annotations, schema).to_record()

    if assets_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(assets_dir), html=True), name="ui")

    return app
