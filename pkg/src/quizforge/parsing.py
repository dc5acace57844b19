"""Parsing of raw model output into validated MCQs, plus quality linting.

Models wrap their JSON in prose more often than not, so extraction scans for
the first balanced ``{...}`` block that parses; strictness lives in
``validate_mcq``, not in the extraction. Lint findings mirror the quality
rules the generation prompt itself states; they are advisory (except broken
code fences) because human review, not automation, gates quality.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from enum import Enum

from .model import (
    BloomLevel,
    Mcq,
    McqSource,
    QuestionType,
    QuizforgeError,
    validate_mcq,
)


class ParseFailure(QuizforgeError):
    pass


class NoJsonFoundError(ParseFailure):
    """The raw text contains no ``{`` at all."""


class JsonMalformedError(ParseFailure):
    """Braces exist but no balanced block parses as a JSON object."""


class LintCode(str, Enum):
    BAD_CODE_FENCE = "BadCodeFence"
    CHOICE_CODE_TOO_LONG = "ChoiceCodeTooLong"
    CODE_FLAG_MISMATCH = "CodeFlagMismatch"
    EMPTY_EXPLANATION = "EmptyExplanation"
    NONE_OF_THE_ABOVE = "NoneOfTheAbove"
    STEM_CODE_TOO_LONG = "StemCodeTooLong"


class LintSeverity(str, Enum):
    WARNING = "warning"
    ERROR = "error"


@dataclass(frozen=True)
class LintFinding:
    code: LintCode
    severity: LintSeverity
    detail: str

    def __post_init__(self) -> None:
        if not self.detail:
            raise QuizforgeError("lint finding detail must be nonempty")

    def to_record(self) -> dict:
        return {"code": self.code.value, "severity": self.severity.value, "detail": self.detail}


MAX_STEM_CODE_LINES = 20
MAX_CHOICE_CODE_LINES = 10

_DISCOURAGED_CHOICES = ("none of the above", "all of the above")


def _balanced_slice(text: str, start: int) -> str | None:
    """The substring from ``start`` to its matching closing brace, if any."""
    depth = 0
    in_string = False
    escaped = False
    for i in range(start, len(text)):
        ch = text[i]
        if in_string:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == '"':
                in_string = False
            continue
        if ch == '"':
            in_string = True
        elif ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
            if depth == 0:
                return text[start : i + 1]
    return None


def extract_json_object(text: str) -> dict:
    """First balanced top-level JSON object in ``text``, prose tolerated."""
    first = text.find("{")
    if first == -1:
        raise NoJsonFoundError("no JSON object in model output")
    start = first
    while start != -1:
        candidate = _balanced_slice(text, start)
        if candidate is not None:
            try:
                parsed = json.loads(candidate)
            except json.JSONDecodeError:
                parsed = None
            if isinstance(parsed, dict):
                return parsed
        start = text.find("{", start + 1)
    raise JsonMalformedError("braces present but no valid JSON object found")


def derive_mcq_id(lo_id: str, qtype: QuestionType, stem: str) -> str:
    digest = hashlib.sha256(f"{lo_id}|{qtype.value}|{stem}".encode("utf-8")).hexdigest()
    return f"mcq-{digest[:12]}"


def parse_mcq(
    raw_text: str,
    *,
    lo_id: str,
    qtype: QuestionType,
    bloom: BloomLevel,
    model: str,
    created_at: str = "",
) -> Mcq:
    """Parse model output into a validated, metadata-carrying Mcq.

    The id is derived from (learning objective, type, stem), so identical
    generations map to identical records. A missing ``code_in_stem`` flag is
    derived from whether the stem actually contains a fenced block; every
    other absent field is an error.
    """
    raw = extract_json_object(raw_text)
    candidate: dict = {
        "id": "",
        "loId": lo_id,
        "questionType": qtype.value,
        "bloom": bloom.value,
        "source": McqSource.GENERATED.value,
        "model": model,
        "createdAt": created_at,
    }
    stem = raw.get("question", raw.get("stem"))
    if stem is not None:
        candidate["stem"] = stem
        candidate["id"] = derive_mcq_id(lo_id, qtype, str(stem))
    if "choices" in raw:
        candidate["choices"] = raw["choices"]
    if "correctAnswer" in raw:
        candidate["correctAnswer"] = raw["correctAnswer"]
    if "explanation" in raw:
        candidate["explanation"] = raw["explanation"]
    flag = raw.get("code_in_stem", raw.get("codeInStem"))
    candidate["codeInStem"] = flag if flag is not None else _has_fence(str(stem or ""))
    return validate_mcq(candidate)


_FENCE_RE = re.compile(r"```[^\n]*\n(.*?)```", re.DOTALL)


def _has_fence(text: str) -> bool:
    return "```" in text


def _fence_blocks(text: str) -> list[list[str]]:
    """Content lines of each fenced block, fence marker lines excluded."""
    blocks = []
    for match in _FENCE_RE.finditer(text):
        lines = match.group(1).split("\n")
        if lines and lines[-1] == "":
            lines = lines[:-1]
        blocks.append(lines)
    return blocks


def _fences_balanced(text: str) -> bool:
    return text.count("```") % 2 == 0


def lint_mcq(mcq: Mcq) -> list[LintFinding]:
    """All quality findings for one MCQ, order-stable (sorted by code)."""
    findings: list[LintFinding] = []

    for choice in mcq.choices:
        if choice.text.strip().lower().rstrip(".") in _DISCOURAGED_CHOICES:
            findings.append(
                LintFinding(
                    code=LintCode.NONE_OF_THE_ABOVE,
                    severity=LintSeverity.WARNING,
                    detail=f"choice {choice.option} is a discouraged catch-all: {choice.text!r}",
                )
            )

    if not _fences_balanced(mcq.stem):
        findings.append(
            LintFinding(
                code=LintCode.BAD_CODE_FENCE,
                severity=LintSeverity.ERROR,
                detail="unbalanced ``` fence in stem",
            )
        )
    for choice in mcq.choices:
        if not _fences_balanced(choice.text):
            findings.append(
                LintFinding(
                    code=LintCode.BAD_CODE_FENCE,
                    severity=LintSeverity.ERROR,
                    detail=f"unbalanced ``` fence in choice {choice.option}",
                )
            )

    for block in _fence_blocks(mcq.stem):
        if len(block) > MAX_STEM_CODE_LINES:
            findings.append(
                LintFinding(
                    code=LintCode.STEM_CODE_TOO_LONG,
                    severity=LintSeverity.WARNING,
                    detail=f"stem code block has {len(block)} lines (max {MAX_STEM_CODE_LINES})",
                )
            )
    for choice in mcq.choices:
        for block in _fence_blocks(choice.text):
            if len(block) > MAX_CHOICE_CODE_LINES:
                findings.append(
                    LintFinding(
                        code=LintCode.CHOICE_CODE_TOO_LONG,
                        severity=LintSeverity.WARNING,
                        detail=(
                            f"choice {choice.option} code block has {len(block)} lines "
                            f"(max {MAX_CHOICE_CODE_LINES})"
                        ),
                    )
                )

    stem_has_code = _has_fence(mcq.stem)
    if mcq.code_in_stem != stem_has_code:
        findings.append(
            LintFinding(
                code=LintCode.CODE_FLAG_MISMATCH,
                severity=LintSeverity.WARNING,
                detail=(
                    f"code_in_stem={mcq.code_in_stem} but stem "
                    f"{'contains' if stem_has_code else 'has no'} fenced code"
                ),
            )
        )

    if not mcq.explanation.strip():
        findings.append(
            LintFinding(
                code=LintCode.EMPTY_EXPLANATION,
                severity=LintSeverity.WARNING,
                detail="explanation is empty",
            )
        )

    return sorted(findings, key=lambda f: (f.code.value, f.detail))
