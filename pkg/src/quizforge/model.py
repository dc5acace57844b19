"""Core domain types shared by every other module.

Everything here is an immutable value object, safe to share across threads.
Validation happens at the boundaries (``validate_mcq``, course import); once
constructed, records are trusted.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Mapping, Optional, Sequence


class QuizforgeError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(QuizforgeError):
    """A record or input file violates a documented invariant."""


class MissingFieldError(ValidationError):
    """A required field is absent from a raw record."""


class ChoiceCountError(ValidationError):
    """An MCQ does not have exactly three choices."""


class KeyNotInChoicesError(ValidationError):
    """The correct-answer label does not match any choice option."""


class DuplicateOptionLabelError(ValidationError):
    """Two choices in one MCQ share an option label."""


class BloomLevel(str, Enum):
    """Cognitive depth of a learning objective.

    Six working levels plus ``UNASSIGNED`` for objectives that could not be
    categorized (e.g. no action verb).
    """

    REMEMBER = "remember"
    UNDERSTAND = "understand"
    APPLY = "apply"
    ANALYZE = "analyze"
    EVALUATE = "evaluate"
    CREATE = "create"
    UNASSIGNED = "unassigned"

    @classmethod
    def assigned_levels(cls) -> tuple["BloomLevel", ...]:
        return tuple(level for level in cls if level is not cls.UNASSIGNED)


class QuestionType(str, Enum):
    """The five supported kinds of programming MCQs."""

    RECALL = "recall"
    FILL_IN_THE_BLANK = "fill_in_the_blank"
    SCENARIO_BASED = "scenario_based"
    CORRECT_OUTPUT = "correct_output"
    CODE_ANALYSIS = "code_analysis"


#: Canonical display order for question types; plans and reports follow it.
QUESTION_TYPE_ORDER: tuple[QuestionType, ...] = (
    QuestionType.RECALL,
    QuestionType.FILL_IN_THE_BLANK,
    QuestionType.SCENARIO_BASED,
    QuestionType.CORRECT_OUTPUT,
    QuestionType.CODE_ANALYSIS,
)

#: The only valid choice labels. The pipeline always requests exactly three
#: choices, so imported MCQs with other labels are rejected with a diagnostic.
CHOICE_LABELS: tuple[str, ...] = ("A", "B", "C")


class McqSource(str, Enum):
    GENERATED = "generated"
    HUMAN = "human"


@dataclass(frozen=True)
class LearningObjective:
    """A module-level learning objective, optionally Bloom-classified."""

    id: str
    text: str
    bloom: Optional[BloomLevel] = None

    def __post_init__(self) -> None:
        if not self.id:
            raise ValidationError("learning objective id must be nonempty")
        if not self.text.strip():
            raise ValidationError(f"learning objective {self.id!r} has empty text")

    def with_bloom(self, bloom: BloomLevel) -> "LearningObjective":
        return replace(self, bloom=bloom)


@dataclass(frozen=True)
class CourseModule:
    """A named course unit holding learning objectives."""

    name: str
    los: tuple[LearningObjective, ...] = ()

    def __post_init__(self) -> None:
        if not self.name.strip():
            raise ValidationError("module name must be nonempty")


@dataclass(frozen=True)
class Course:
    """High-level course context: the only user input the pipeline needs."""

    title: str
    description: str = ""
    course_level_los: tuple[str, ...] = ()
    modules: tuple[CourseModule, ...] = ()

    def __post_init__(self) -> None:
        if not self.title.strip():
            raise ValidationError("course title must be nonempty")
        if not self.modules:
            raise ValidationError(f"course {self.title!r} must have at least one module")
        seen: set[str] = set()
        for module in self.modules:
            for lo in module.los:
                if lo.id in seen:
                    raise ValidationError(f"duplicate learning objective id {lo.id!r}")
                seen.add(lo.id)

    def all_los(self) -> tuple[LearningObjective, ...]:
        return tuple(lo for module in self.modules for lo in module.los)

    def module_of(self, lo_id: str) -> CourseModule:
        for module in self.modules:
            if any(lo.id == lo_id for lo in module.los):
                return module
        raise ValidationError(f"learning objective {lo_id!r} not found in course {self.title!r}")


@dataclass(frozen=True)
class Choice:
    """One answer choice; text may contain a fenced code block."""

    option: str
    text: str


@dataclass(frozen=True)
class Mcq:
    """A validated single-key multiple-choice question."""

    id: str
    lo_id: str
    question_type: QuestionType
    bloom: BloomLevel
    source: McqSource
    stem: str
    choices: tuple[Choice, ...]
    correct_answer: str
    code_in_stem: bool
    explanation: str
    model: str = ""
    created_at: str = ""

    def key_choice(self) -> Choice:
        for choice in self.choices:
            if choice.option == self.correct_answer:
                return choice
        raise KeyNotInChoicesError(
            f"mcq {self.id!r}: correct answer {self.correct_answer!r} not among choices"
        )


@dataclass(frozen=True)
class GenerationParams:
    """Chat-completion sampling parameters.

    Defaults reproduce the generation setup the shipped prompts were designed
    for; only ``max_tokens`` caps the response length.
    """

    model: str = "gpt-4-0613"
    temperature: float = 1.0
    top_p: float = 1.0
    frequency_penalty: float = 0.0
    presence_penalty: float = 0.0
    max_tokens: int = 2000

    def __post_init__(self) -> None:
        if self.temperature < 0:
            raise ValidationError("temperature must be >= 0")
        if not 0 < self.top_p <= 1:
            raise ValidationError("top_p must be in (0, 1]")
        if self.max_tokens < 1:
            raise ValidationError("max_tokens must be >= 1")

    def to_record(self) -> dict[str, Any]:
        return {
            "model": self.model,
            "temperature": self.temperature,
            "topP": self.top_p,
            "frequencyPenalty": self.frequency_penalty,
            "presencePenalty": self.presence_penalty,
            "maxTokens": self.max_tokens,
        }

    @classmethod
    def from_record(cls, record: Mapping[str, Any]) -> "GenerationParams":
        return cls(
            model=record.get("model", "gpt-4-0613"),
            temperature=record.get("temperature", 1.0),
            top_p=record.get("topP", 1.0),
            frequency_penalty=record.get("frequencyPenalty", 0.0),
            presence_penalty=record.get("presencePenalty", 0.0),
            max_tokens=record.get("maxTokens", 2000),
        )


def utc_now_iso() -> str:
    """Current UTC time as an ISO-8601 string (audit metadata only)."""
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


_MCQ_REQUIRED_FIELDS = (
    "id",
    "loId",
    "questionType",
    "bloom",
    "source",
    "stem",
    "choices",
    "correctAnswer",
    "codeInStem",
    "explanation",
    "model",
    "createdAt",
)


def validate_mcq(candidate: Mapping[str, Any]) -> Mcq:
    """Validate a raw MCQ record and return the typed value.

    Raises instead of repairing: a malformed record is never silently fixed.
    """
    missing = [name for name in _MCQ_REQUIRED_FIELDS if candidate.get(name) is None]
    if missing:
        raise MissingFieldError(f"missing MCQ fields: {', '.join(missing)}")

    raw_choices = candidate["choices"]
    if not isinstance(raw_choices, Sequence) or isinstance(raw_choices, (str, bytes)):
        raise ChoiceCountError("choices must be a list of option/text objects")
    if len(raw_choices) != 3:
        raise ChoiceCountError(f"expected exactly 3 choices, got {len(raw_choices)}")

    choices: list[Choice] = []
    for raw in raw_choices:
        if "option" not in raw or "text" not in raw:
            raise MissingFieldError("each choice needs 'option' and 'text'")
        option = str(raw["option"]).strip()
        if option not in CHOICE_LABELS:
            raise KeyNotInChoicesError(
                f"choice label {option!r} is not one of {'/'.join(CHOICE_LABELS)}"
            )
        choices.append(Choice(option=option, text=str(raw["text"])))

    labels = [c.option for c in choices]
    if len(set(labels)) != len(labels):
        raise DuplicateOptionLabelError(f"duplicate choice labels: {labels}")

    key = str(candidate["correctAnswer"]).strip()
    if key not in labels:
        raise KeyNotInChoicesError(f"correct answer {key!r} not among labels {labels}")

    stem = str(candidate["stem"])
    if not stem.strip():
        raise MissingFieldError("stem must be nonempty")

    try:
        question_type = QuestionType(candidate["questionType"])
    except ValueError:
        raise ValidationError(f"unknown question type {candidate['questionType']!r}") from None
    try:
        bloom = BloomLevel(candidate["bloom"])
    except ValueError:
        raise ValidationError(f"unknown bloom level {candidate['bloom']!r}") from None
    try:
        source = McqSource(candidate["source"])
    except ValueError:
        raise ValidationError(f"unknown source {candidate['source']!r}") from None

    return Mcq(
        id=str(candidate["id"]),
        lo_id=str(candidate["loId"]),
        question_type=question_type,
        bloom=bloom,
        source=source,
        stem=stem,
        choices=tuple(choices),
        correct_answer=key,
        code_in_stem=_as_bool(candidate["codeInStem"]),
        explanation=str(candidate["explanation"]),
        model=str(candidate["model"]),
        created_at=str(candidate["createdAt"]),
    )


def _as_bool(value: Any) -> bool:
    """Accept the documented encodings of the code flag (bool or True/False text)."""
    if isinstance(value, bool):
        return value
    if isinstance(value, str) and value.strip().lower() in ("true", "false"):
        return value.strip().lower() == "true"
    raise ValidationError(f"codeInStem must be boolean or 'True'/'False', got {value!r}")


def mcq_to_record(mcq: Mcq) -> dict[str, Any]:
    """Serialize an Mcq to the flat JSON layout used by files and the API."""
    return {
        "id": mcq.id,
        "loId": mcq.lo_id,
        "questionType": mcq.question_type.value,
        "bloom": mcq.bloom.value,
        "source": mcq.source.value,
        "stem": mcq.stem,
        "choices": [{"option": c.option, "text": c.text} for c in mcq.choices],
        "correctAnswer": mcq.correct_answer,
        "codeInStem": mcq.code_in_stem,
        "explanation": mcq.explanation,
        "model": mcq.model,
        "createdAt": mcq.created_at,
    }


def course_from_record(record: Mapping[str, Any]) -> Course:
    """Build a Course from the documented course-file JSON layout."""
    if "title" not in record:
        raise MissingFieldError("course file needs a 'title'")
    modules = []
    for raw_module in record.get("modules", []):
        if "name" not in raw_module:
            raise MissingFieldError("each module needs a 'name'")
        los = []
        for raw_lo in raw_module.get("los", []):
            if "id" not in raw_lo or "text" not in raw_lo:
                raise MissingFieldError("each learning objective needs 'id' and 'text'")
            bloom_raw = raw_lo.get("bloom")
            bloom = None
            if bloom_raw is not None:
                try:
                    bloom = BloomLevel(bloom_raw)
                except ValueError:
                    raise ValidationError(
                        f"learning objective {raw_lo['id']!r}: unknown bloom level {bloom_raw!r}"
                    ) from None
            los.append(LearningObjective(id=str(raw_lo["id"]), text=str(raw_lo["text"]), bloom=bloom))
        modules.append(CourseModule(name=str(raw_module["name"]), los=tuple(los)))
    return Course(
        title=str(record["title"]),
        description=str(record.get("description", "")),
        course_level_los=tuple(str(t) for t in record.get("courseLevelLos", [])),
        modules=tuple(modules),
    )


def course_to_record(course: Course) -> dict[str, Any]:
    return {
        "title": course.title,
        "description": course.description,
        "courseLevelLos": list(course.course_level_los),
        "modules": [
            {
                "name": module.name,
                "los": [
                    {
                        "id": lo.id,
                        "text": lo.text,
                        "bloom": lo.bloom.value if lo.bloom is not None else None,
                    }
                    for lo in module.los
                ],
            }
            for module in course.modules
        ],
    }
