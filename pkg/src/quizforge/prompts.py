"""Assembly of the system and user prompts from static design resources.

The system prompt concatenates five sections: MCQ authoring principles,
Bloom level definitions, course context, the selected question type with its
examples, and the output format. All heavyweight text lives in plain files
under ``resources/prompts/`` so instructors can edit it; rendering is pure
``{{placeholder}}`` substitution with no template logic, keeping prompts
auditable byte for byte.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .model import BloomLevel, Course, LearningObjective, QuestionType, QuizforgeError
from .resources import resource_path

TYPE_DISPLAY_NAMES: Mapping[QuestionType, str] = {
    QuestionType.RECALL: "Recall",
    QuestionType.FILL_IN_THE_BLANK: "Fill in the Blank",
    QuestionType.SCENARIO_BASED: "Scenario Based",
    QuestionType.CORRECT_OUTPUT: "Correct Output",
    QuestionType.CODE_ANALYSIS: "Code Analysis",
}

_COURSE_CONTEXT_TEMPLATE = """Course Context

Below is a brief description of the {{course_title}} course.

Description: {{course_description}}"""

_USER_TEMPLATE = (
    "Generate a top quality {{question_type}} multiple-choice question "
    "for the course {{course_title}} on the unit: {{module_name}}.\n"
    "Your generated question should target the following learning objective:\n"
    "{{lo_text}}"
)

_USER_BLOOM_SENTENCE = (
    "\nYour generated question should also be at the {{bloom_level}} level "
    "in Bloom's taxonomy."
)

_PLACEHOLDER_RE = re.compile(r"\{\{(\w+)\}\}")

#: Field names the model is instructed to emit; the output-format resource
#: must mention every one of them.
OUTPUT_FORMAT_FIELDS = ("question", "choices", "correctAnswer", "code_in_stem", "explanation")


class MissingResourceError(QuizforgeError):
    """A required design resource file or entry is absent."""


def render_template(template: str, values: Mapping[str, str]) -> str:
    """Substitute ``{{name}}`` placeholders; unresolved names are an error."""

    def _sub(match: re.Match[str]) -> str:
        name = match.group(1)
        if name not in values:
            raise MissingResourceError(f"template placeholder {{{{{name}}}}} has no value")
        return values[name]

    return _PLACEHOLDER_RE.sub(_sub, template)


@dataclass(frozen=True)
class DesignResources:
    """Static texts the system prompt is assembled from."""

    mcq_principles: str
    bloom_definitions: str
    qtype_definitions: Mapping[QuestionType, str]
    qtype_examples: Mapping[QuestionType, tuple[str, ...]]
    output_format_spec: str

    def __post_init__(self) -> None:
        for qtype in QuestionType:
            if not self.qtype_definitions.get(qtype, "").strip():
                raise MissingResourceError(f"no definition for question type {qtype.value!r}")
            if not self.qtype_examples.get(qtype):
                raise MissingResourceError(f"no examples for question type {qtype.value!r}")
        for field_name in OUTPUT_FORMAT_FIELDS:
            if field_name not in self.output_format_spec:
                raise MissingResourceError(
                    f"output format spec does not mention field {field_name!r}"
                )


@dataclass(frozen=True)
class PromptPair:
    """One ready-to-send prompt: system context plus user message."""

    system: str
    user: str

    def __post_init__(self) -> None:
        if not self.system.strip() or not self.user.strip():
            raise MissingResourceError("prompts must be nonempty")


def _read(path: Path) -> str:
    if not path.is_file():
        raise MissingResourceError(f"missing resource file {path}")
    return path.read_text(encoding="utf-8").rstrip("\n")


def load_design_resources(directory: str | Path | None = None) -> DesignResources:
    """Load resources from a directory (default: the bundled set).

    Expected layout: ``principles.txt``, ``bloom.txt``, ``output_format.txt``,
    ``qtypes/<type>.txt`` and ``examples/<type>.json``.
    """
    root = Path(directory) if directory is not None else resource_path("prompts")
    definitions: dict[QuestionType, str] = {}
    examples: dict[QuestionType, tuple[str, ...]] = {}
    for qtype in QuestionType:
        definitions[qtype] = _read(root / "qtypes" / f"{qtype.value}.txt")
        examples_file = root / "examples" / f"{qtype.value}.json"
        if not examples_file.is_file():
            raise MissingResourceError(f"missing resource file {examples_file}")
        try:
            raw_examples = json.loads(examples_file.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise MissingResourceError(f"bad JSON in {examples_file}: {exc}") from exc
        if not isinstance(raw_examples, list) or not raw_examples:
            raise MissingResourceError(f"{examples_file} must hold a nonempty JSON array")
        examples[qtype] = tuple(json.dumps(e, indent=4, ensure_ascii=False) for e in raw_examples)
    return DesignResources(
        mcq_principles=_read(root / "principles.txt"),
        bloom_definitions=_read(root / "bloom.txt"),
        qtype_definitions=definitions,
        qtype_examples=examples,
        output_format_spec=_read(root / "output_format.txt"),
    )


def _course_context_section(course: Course) -> str:
    section = render_template(
        _COURSE_CONTEXT_TEMPLATE,
        {"course_title": course.title, "course_description": course.description},
    )
    if course.course_level_los:
        bullets = "\n".join(f"- {lo}" for lo in course.course_level_los)
        section += f"\n\nCourse-level learning objectives:\n{bullets}"
    return section


def _qtype_section(qtype: QuestionType, resources: DesignResources) -> str:
    parts = [f"Question type: {TYPE_DISPLAY_NAMES[qtype]}", resources.qtype_definitions[qtype]]
    rendered = [
        f"Example {i}:\n{text}" for i, text in enumerate(resources.qtype_examples[qtype], start=1)
    ]
    parts.append("Below are some examples:\n\n" + "\n\n".join(rendered))
    return "\n\n".join(parts)


def build_system_prompt(course: Course, qtype: QuestionType, resources: DesignResources) -> str:
    """Render the full system prompt; byte-deterministic for fixed inputs."""
    sections = [
        resources.mcq_principles,
        resources.bloom_definitions,
        _course_context_section(course),
        _qtype_section(qtype, resources),
        resources.output_format_spec,
    ]
    return "\n\n".join(sections)


def build_user_prompt(
    course: Course, module_name: str, lo: LearningObjective, qtype: QuestionType
) -> str:
    """Render the user message; the Bloom sentence is omitted for unassigned LOs."""
    bloom = lo.bloom if lo.bloom is not None else BloomLevel.UNASSIGNED
    text = render_template(
        _USER_TEMPLATE,
        {
            "question_type": TYPE_DISPLAY_NAMES[qtype],
            "course_title": course.title,
            "module_name": module_name,
            "lo_text": lo.text,
        },
    )
    if bloom is not BloomLevel.UNASSIGNED:
        text += render_template(_USER_BLOOM_SENTENCE, {"bloom_level": bloom.value})
    return text


def build_prompt_pair(
    course: Course,
    module_name: str,
    lo: LearningObjective,
    qtype: QuestionType,
    resources: DesignResources,
) -> PromptPair:
    return PromptPair(
        system=build_system_prompt(course, qtype, resources),
        user=build_user_prompt(course, module_name, lo, qtype),
    )
