"""End-to-end generation: classify, plan, prompt, complete, parse, lint, persist.

Per learning objective, one MCQ is requested for every question type mapped
to its Bloom level. A generation that fails to parse is retried once with
the identical prompt, then discarded and recorded; failures never abort the
batch. Results are merged in (objective id, question type) order before
persisting, so batch output is a pure function of its inputs regardless of
the concurrency limit.
"""

from __future__ import annotations

import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

from .bloom import Classifier, LexiconClassifier, default_lexicon
from .gateway import CompletionRequest, Gateway, MockBackend
from .model import (
    QUESTION_TYPE_ORDER,
    Course,
    GenerationParams,
    LearningObjective,
    Mcq,
    QuestionType,
    QuizforgeError,
    utc_now_iso,
)
from .parsing import LintFinding, lint_mcq, parse_mcq
from .prompts import DesignResources, build_prompt_pair, load_design_resources
from .qtypes import TypeMapping, UnclassifiedLoError, default_type_mapping, plan_generation
from .store import Store


@dataclass(frozen=True)
class GeneratedMcq:
    mcq: Mcq
    lints: tuple[LintFinding, ...]
    attempts: int


@dataclass(frozen=True)
class GenerationFailure:
    lo_id: str
    question_type: QuestionType
    attempts: int
    reason: str

    def to_record(self) -> dict:
        return {
            "loId": self.lo_id,
            "questionType": self.question_type.value,
            "attempts": self.attempts,
            "reason": self.reason,
        }


@dataclass(frozen=True)
class LoOutcome:
    """Everything one learning objective produced, including what was lost."""

    lo: LearningObjective
    generated: tuple[GeneratedMcq, ...]
    failures: tuple[GenerationFailure, ...]

    @property
    def attempts(self) -> int:
        return sum(g.attempts for g in self.generated) + sum(f.attempts for f in self.failures)


@dataclass(frozen=True)
class GenerationRun:
    """Manifest of one batch run, persisted as ``runs/<runId>.json``."""

    run_id: str
    course_ref: str
    planned: int
    produced: int
    failed: int
    params: GenerationParams
    started_at: str
    finished_at: str
    failures: tuple[GenerationFailure, ...] = ()

    def to_record(self) -> dict:
        return {
            "runId": self.run_id,
            "courseRef": self.course_ref,
            "planned": self.planned,
            "produced": self.produced,
            "failed": self.failed,
            "params": self.params.to_record(),
            "startedAt": self.started_at,
            "finishedAt": self.finished_at,
            "failures": [f.to_record() for f in self.failures],
        }


class Pipeline:
    """Wires the classifier, type mapping, prompt builder and gateway together.

    All collaborators default to the offline-friendly bundled setup: lexicon
    classifier, shipped type mapping and prompt resources, mock backend.
    """

    def __init__(
        self,
        gateway: Gateway | None = None,
        resources: DesignResources | None = None,
        classifier: Classifier | None = None,
        mapping: TypeMapping | None = None,
        params: GenerationParams | None = None,
        clock: Callable[[], str] = utc_now_iso,
        parse_retries: int = 1,
    ):
        self.gateway = gateway if gateway is not None else Gateway(MockBackend())
        self.resources = resources if resources is not None else load_design_resources()
        self.classifier = classifier if classifier is not None else LexiconClassifier(default_lexicon())
        self.mapping = mapping if mapping is not None else default_type_mapping()
        self.params = params if params is not None else GenerationParams()
        self.clock = clock
        self.parse_retries = parse_retries

    def _resolve_bloom(self, lo: LearningObjective) -> LearningObjective:
        if lo.bloom is not None:
            return lo
        if self.classifier is None:
            raise UnclassifiedLoError([lo.id])
        return lo.with_bloom(self.classifier.classify(lo.text))

    def generate_for_lo(
        self,
        course: Course,
        module_name: str,
        lo: LearningObjective,
        created_at: str | None = None,
    ) -> LoOutcome:
        """Generate one MCQ per mapped question type for a single objective."""
        if not any(module.name == module_name for module in course.modules):
            raise QuizforgeError(f"course {course.title!r} has no module {module_name!r}")
        lo = self._resolve_bloom(lo)
        stamp = created_at if created_at is not None else self.clock()

        generated: list[GeneratedMcq] = []
        failures: list[GenerationFailure] = []
        for qtype in self.mapping[lo.bloom]:
            prompt = build_prompt_pair(course, module_name, lo, qtype, self.resources)
            request = CompletionRequest(
                system=prompt.system,
                user=prompt.user,
                params=self.params,
                tags={"loId": lo.id, "questionType": qtype.value},
            )
            attempts = 0
            last_error = ""
            mcq: Mcq | None = None
            while attempts <= self.parse_retries and mcq is None:
                attempts += 1
                try:
                    completion = self.gateway.complete(request)
                    mcq = parse_mcq(
                        completion.raw_text,
                        lo_id=lo.id,
                        qtype=qtype,
                        bloom=lo.bloom,
                        model=self.params.model,
                        created_at=stamp,
                    )
                except QuizforgeError as exc:
                    # Parse, validation and gateway failures are all per-item;
                    # only store errors (raised later, at persist) abort a batch.
                    last_error = f"{type(exc).__name__}: {exc}"
            if mcq is None:
                failures.append(
                    GenerationFailure(
                        lo_id=lo.id, question_type=qtype, attempts=attempts, reason=last_error
                    )
                )
            else:
                generated.append(
                    GeneratedMcq(mcq=mcq, lints=tuple(lint_mcq(mcq)), attempts=attempts)
                )
        return LoOutcome(lo=lo, generated=tuple(generated), failures=tuple(failures))

    def generate_batch(
        self,
        course: Course,
        store: Store,
        concurrency: int = 4,
        run_id: str | None = None,
        lo_ids: Sequence[str] | None = None,
    ) -> GenerationRun:
        """Generate for every objective of a course with bounded parallelism."""
        if concurrency < 1:
            raise QuizforgeError("concurrency limit must be >= 1")
        started = self.clock()
        run_id = run_id or f"run-{uuid.uuid4().hex[:12]}"

        tasks: list[tuple[str, LearningObjective]] = []
        for module in course.modules:
            for lo in module.los:
                if lo_ids is not None and lo.id not in lo_ids:
                    continue
                tasks.append((module.name, self._resolve_bloom(lo)))

        planned = sum(len(plan.types) for plan in plan_generation([lo for _, lo in tasks], self.mapping))

        stamp = self.clock()
        if concurrency == 1:
            outcomes = [self.generate_for_lo(course, name, lo, created_at=stamp) for name, lo in tasks]
        else:
            with ThreadPoolExecutor(max_workers=concurrency) as pool:
                outcomes = list(
                    pool.map(
                        lambda task: self.generate_for_lo(course, task[0], task[1], created_at=stamp),
                        tasks,
                    )
                )

        produced = [g for outcome in outcomes for g in outcome.generated]
        failures = [f for outcome in outcomes for f in outcome.failures]
        produced.sort(key=lambda g: (g.mcq.lo_id, QUESTION_TYPE_ORDER.index(g.mcq.question_type)))
        failures.sort(key=lambda f: (f.lo_id, QUESTION_TYPE_ORDER.index(f.question_type)))

        store.append_mcqs([(g.mcq, g.lints) for g in produced])

        attempts = sum(outcome.attempts for outcome in outcomes)
        run = GenerationRun(
            run_id=run_id,
            course_ref=course.title,
            planned=planned,
            produced=len(produced),
            failed=attempts - len(produced),
            params=self.params,
            started_at=started,
            finished_at=self.clock(),
            failures=tuple(failures),
        )
        store.write_run(run.run_id, run.to_record())
        return run
