"""The six-item review rubric, annotation records, and disagreement resolution.

Each rubric item has a fixed, ordered category set (best first, worst last);
the order doubles as the "least favorable" ranking used by the final
resolution rule. Category sets are reconstructions and deliberately
configurable through ``RubricSchema``.

Disagreements between raters are resolved per item by a four-rule cascade:

1. strict plurality over all annotations;
2. on a tie, strict plurality over instructor annotations, restricted to the
   categories still tied;
3. on a tie (or no instructor votes), the same over annotations whose rater
   answered the MCQ correctly;
4. finally, the least favorable of the categories still tied.

Each later rule only narrows the tie left by the previous one, which makes
the cascade monotone and total.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Any, Iterable, Mapping, Sequence

from ..model import CHOICE_LABELS, QuizforgeError


class RubricError(QuizforgeError):
    pass


class EmptyAnnotationSetError(RubricError):
    pass


class MixedMcqIdsError(RubricError):
    pass


class RaterRole(str, Enum):
    STUDENT = "student"
    INSTRUCTOR = "instructor"


class RubricItem(str, Enum):
    SUFFICIENT_INFO = "sufficient_info"
    CORRECT_ANSWER = "correct_answer"
    UNIQUE_CHOICES = "unique_choices"
    NO_OBVIOUS_WRONG = "no_obvious_wrong"
    CORRECT_CODE = "correct_code"
    LO_ALIGNMENT = "lo_alignment"


#: Category sets per item, ordered best to worst. ``no_code`` ranks right
#: after ``correct`` so questions without code are not penalized.
DEFAULT_CATEGORIES: dict[RubricItem, tuple[str, ...]] = {
    RubricItem.SUFFICIENT_INFO: ("pass", "fail"),
    RubricItem.CORRECT_ANSWER: ("single", "multiple", "none"),
    RubricItem.UNIQUE_CHOICES: ("unique", "overlapping"),
    RubricItem.NO_OBVIOUS_WRONG: ("pass", "giveaway"),
    RubricItem.CORRECT_CODE: ("correct", "no_code", "incorrect"),
    RubricItem.LO_ALIGNMENT: ("aligned", "related_not_targeting", "unrelated"),
}


@dataclass(frozen=True)
class RubricSchema:
    """Rubric items with their ordered category sets."""

    categories: Mapping[RubricItem, tuple[str, ...]]

    def __post_init__(self) -> None:
        for item in RubricItem:
            cats = self.categories.get(item)
            if not cats or len(cats) < 2:
                raise RubricError(f"rubric item {item.value!r} needs at least two categories")
            if len(set(cats)) != len(cats):
                raise RubricError(f"rubric item {item.value!r} has duplicate categories")

    def validate_judgments(self, judgments: Mapping[RubricItem, str]) -> None:
        for item in RubricItem:
            if item not in judgments:
                raise RubricError(f"judgment missing for rubric item {item.value!r}")
            if judgments[item] not in self.categories[item]:
                raise RubricError(
                    f"unknown category {judgments[item]!r} for rubric item {item.value!r}"
                )

    def worst_of(self, item: RubricItem, candidates: Sequence[str]) -> str:
        order = self.categories[item]
        return max(candidates, key=order.index)

    def to_record(self) -> dict[str, list[str]]:
        return {item.value: list(self.categories[item]) for item in RubricItem}


def default_rubric_schema() -> RubricSchema:
    return RubricSchema(categories=dict(DEFAULT_CATEGORIES))


@dataclass(frozen=True)
class RubricAnnotation:
    """One rater's answer attempt plus their six rubric judgments for one MCQ."""

    mcq_id: str
    rater_id: str
    rater_role: RaterRole
    answered_option: str
    answered_correctly: bool
    judgments: Mapping[RubricItem, str]

    def __post_init__(self) -> None:
        if self.answered_option not in CHOICE_LABELS:
            raise RubricError(f"answered option must be one of {CHOICE_LABELS}")
        for item in RubricItem:
            if item not in self.judgments:
                raise RubricError(f"annotation lacks judgment for {item.value!r}")

    def to_record(self) -> dict[str, Any]:
        return {
            "mcqId": self.mcq_id,
            "raterId": self.rater_id,
            "raterRole": self.rater_role.value,
            "answeredOption": self.answered_option,
            "answeredCorrectly": self.answered_correctly,
            "judgments": {item.value: self.judgments[item] for item in RubricItem},
        }


def annotation_from_record(record: Mapping[str, Any]) -> RubricAnnotation:
    try:
        judgments = {RubricItem(k): str(v) for k, v in record["judgments"].items()}
        return RubricAnnotation(
            mcq_id=str(record["mcqId"]),
            rater_id=str(record["raterId"]),
            rater_role=RaterRole(record["raterRole"]),
            answered_option=str(record["answeredOption"]),
            answered_correctly=bool(record["answeredCorrectly"]),
            judgments=judgments,
        )
    except (KeyError, ValueError) as exc:
        raise RubricError(f"bad annotation record: {exc}") from exc


class ResolutionRule(str, Enum):
    MAJORITY = "majority"
    INSTRUCTOR = "instructor"
    CORRECT_ANSWERER = "correct_answerer"
    LEAST_FAVORABLE = "least_favorable"


@dataclass(frozen=True)
class ResolvedVerdict:
    """Per-item resolved categories for one MCQ plus the rule that decided each."""

    mcq_id: str
    categories: Mapping[RubricItem, str]
    rules: Mapping[RubricItem, ResolutionRule]

    def to_record(self) -> dict[str, Any]:
        return {
            "mcqId": self.mcq_id,
            "categories": {item.value: self.categories[item] for item in RubricItem},
            "resolutionRule": {item.value: self.rules[item].value for item in RubricItem},
        }


def _plurality(
    votes: Counter[str], among: tuple[str, ...], order: tuple[str, ...]
) -> tuple[str, ...]:
    """Categories from ``among`` holding the (possibly tied) maximum vote count.

    With no votes at all, the tie is left untouched so the next rule sees the
    same candidate set.
    """
    counts = {cat: votes.get(cat, 0) for cat in among}
    top = max(counts.values())
    if top == 0:
        return among
    winners = tuple(cat for cat in order if cat in counts and counts[cat] == top)
    return winners


def resolve(
    annotations: Sequence[RubricAnnotation], schema: RubricSchema | None = None
) -> ResolvedVerdict:
    """Apply the four-rule cascade per rubric item.

    Permutation-invariant: only vote counts matter, never annotation order.
    """
    if schema is None:
        schema = default_rubric_schema()
    if not annotations:
        raise EmptyAnnotationSetError("cannot resolve an empty annotation set")
    mcq_ids = {a.mcq_id for a in annotations}
    if len(mcq_ids) != 1:
        raise MixedMcqIdsError(f"annotations span several MCQs: {sorted(mcq_ids)}")
    for annotation in annotations:
        schema.validate_judgments(annotation.judgments)

    categories: dict[RubricItem, str] = {}
    rules: dict[RubricItem, ResolutionRule] = {}
    for item in RubricItem:
        order = schema.categories[item]
        all_votes = Counter(a.judgments[item] for a in annotations)
        tied = _plurality(all_votes, tuple(all_votes), order)
        if len(tied) == 1:
            categories[item], rules[item] = tied[0], ResolutionRule.MAJORITY
            continue

        instructor_votes = Counter(
            a.judgments[item] for a in annotations if a.rater_role is RaterRole.INSTRUCTOR
        )
        tied = _plurality(instructor_votes, tied, order)
        if len(tied) == 1:
            categories[item], rules[item] = tied[0], ResolutionRule.INSTRUCTOR
            continue

        correct_votes = Counter(a.judgments[item] for a in annotations if a.answered_correctly)
        tied = _plurality(correct_votes, tied, order)
        if len(tied) == 1:
            categories[item], rules[item] = tied[0], ResolutionRule.CORRECT_ANSWERER
            continue

        categories[item] = schema.worst_of(item, tied)
        rules[item] = ResolutionRule.LEAST_FAVORABLE

    return ResolvedVerdict(mcq_id=annotations[0].mcq_id, categories=categories, rules=rules)


def resolve_all(
    annotations: Iterable[RubricAnnotation], schema: RubricSchema | None = None
) -> list[ResolvedVerdict]:
    """Group annotations by MCQ and resolve each group; ordered by MCQ id."""
    by_mcq: dict[str, list[RubricAnnotation]] = {}
    for annotation in annotations:
        by_mcq.setdefault(annotation.mcq_id, []).append(annotation)
    return [resolve(group, schema) for _, group in sorted(by_mcq.items())]
