"""Mapping from Bloom levels to the question types worth generating.

The mapping is data, not code: instructors can retarget it with their own
JSON file. One MCQ is planned per (learning objective, question type) pair;
objectives without a Bloom level get every type.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from .model import (
    QUESTION_TYPE_ORDER,
    BloomLevel,
    LearningObjective,
    QuestionType,
    QuizforgeError,
)
from .resources import resource_path


class MappingError(QuizforgeError):
    """A type-mapping file is unusable."""


class UnclassifiedLoError(QuizforgeError):
    """Planning was attempted on objectives that still lack a Bloom level."""

    def __init__(self, lo_ids: Sequence[str]):
        self.lo_ids = tuple(lo_ids)
        super().__init__(f"learning objectives without a bloom level: {', '.join(self.lo_ids)}")


TypeMapping = Mapping[BloomLevel, tuple[QuestionType, ...]]


@dataclass(frozen=True)
class TypePlan:
    """Which question types will be generated for one learning objective."""

    lo_id: str
    bloom: BloomLevel
    types: tuple[QuestionType, ...]

    def __post_init__(self) -> None:
        if not self.types:
            raise MappingError(f"plan for {self.lo_id!r} has no question types")


def load_type_mapping(path: str | Path) -> TypeMapping:
    """Load a ``{"remember": ["recall", ...], ...}`` mapping file.

    Every Bloom level (including ``unassigned``) must map to a nonempty
    subset of the five question types; the stored order is normalized to the
    canonical type order.
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise MappingError(f"cannot read type mapping {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise MappingError(f"type mapping {path} must be a JSON object")

    mapping: dict[BloomLevel, tuple[QuestionType, ...]] = {}
    for level_name, type_names in raw.items():
        try:
            level = BloomLevel(level_name)
        except ValueError:
            raise MappingError(f"unknown bloom level {level_name!r} in {path}") from None
        try:
            types = {QuestionType(name) for name in type_names}
        except ValueError as exc:
            raise MappingError(f"level {level_name!r}: {exc}") from None
        if not types:
            raise MappingError(f"level {level_name!r} maps to no question types")
        mapping[level] = tuple(t for t in QUESTION_TYPE_ORDER if t in types)

    missing = [level.value for level in BloomLevel if level not in mapping]
    if missing:
        raise MappingError(f"type mapping {path} lacks levels: {', '.join(missing)}")
    return mapping


def default_type_mapping() -> TypeMapping:
    return load_type_mapping(resource_path("type_mapping.json"))


def map_types(bloom: BloomLevel, mapping: TypeMapping | None = None) -> tuple[QuestionType, ...]:
    """Question types to generate for one Bloom level, in canonical order."""
    if mapping is None:
        mapping = default_type_mapping()
    return mapping[bloom]


def plan_generation(
    los: Sequence[LearningObjective], mapping: TypeMapping | None = None
) -> list[TypePlan]:
    """One TypePlan per objective; total MCQ count is the sum of plan sizes."""
    if mapping is None:
        mapping = default_type_mapping()
    unclassified = [lo.id for lo in los if lo.bloom is None]
    if unclassified:
        raise UnclassifiedLoError(unclassified)
    return [TypePlan(lo_id=lo.id, bloom=lo.bloom, types=mapping[lo.bloom]) for lo in los]


def planned_type_totals(plans: Sequence[TypePlan]) -> dict[QuestionType, int]:
    """How many MCQs a plan will request per question type."""
    totals = {qtype: 0 for qtype in QUESTION_TYPE_ORDER}
    for plan in plans:
        for qtype in plan.types:
            totals[qtype] += 1
    return totals
