"""File-backed persistence: one directory, JSONL record files, JSON manifests.

Layout under the store root:

    courses/           normalized course files (one JSON per imported course)
    mcqs.jsonl         one MCQ record per line, with its lint findings
    annotations.jsonl  one rubric annotation per line
    runs/              generation-run manifests
    reports/           agreement / comparison reports

JSONL files are append-only: existing lines are never rewritten, record ids
are unique per file, and every line is written in a canonical form (sorted
keys) so that loading and re-serializing a store reproduces it byte for
byte. Appends are serialized through a single in-process lock; concurrent
readers are safe once a write has completed.
"""

from __future__ import annotations

import json
import re
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterator, Sequence

from .evaluation.rubric import RubricAnnotation, annotation_from_record
from .model import (
    Course,
    Mcq,
    McqSource,
    QuizforgeError,
    course_from_record,
    course_to_record,
    mcq_to_record,
    validate_mcq,
)
from .parsing import LintCode, LintFinding, LintSeverity


class StoreError(QuizforgeError):
    pass


class StoreIoError(StoreError):
    pass


class StoreParseError(StoreError):
    """A persisted line is unreadable; carries the 1-based line number."""

    def __init__(self, path: Path, line: int, reason: str):
        self.path = path
        self.line = line
        super().__init__(f"{path}: line {line}: {reason}")


def _canonical_line(record: dict[str, Any]) -> str:
    return json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n"


def _slugify(title: str) -> str:
    slug = re.sub(r"[^a-z0-9]+", "-", title.lower()).strip("-")
    return slug or "course"


@dataclass(frozen=True)
class StoredMcq:
    """An MCQ plus the lint findings recorded when it was persisted."""

    mcq: Mcq
    lints: tuple[LintFinding, ...]

    @property
    def is_clean(self) -> bool:
        return not self.lints


def _lint_from_record(record: dict[str, Any]) -> LintFinding:
    return LintFinding(
        code=LintCode(record["code"]),
        severity=LintSeverity(record["severity"]),
        detail=record["detail"],
    )


class Store:
    """Single-directory persistence for courses, MCQs, annotations and runs."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.courses_dir = self.root / "courses"
        self.runs_dir = self.root / "runs"
        self.reports_dir = self.root / "reports"
        self.mcqs_path = self.root / "mcqs.jsonl"
        self.annotations_path = self.root / "annotations.jsonl"
        self._write_lock = threading.Lock()
        try:
            for directory in (self.root, self.courses_dir, self.runs_dir, self.reports_dir):
                directory.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise StoreIoError(f"cannot initialize store at {self.root}: {exc}") from exc

    # -- generic JSONL plumbing -------------------------------------------

    def _iter_lines(self, path: Path) -> Iterator[tuple[int, dict[str, Any]]]:
        if not path.exists():
            return
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise StoreIoError(f"cannot read {path}: {exc}") from exc
        for number, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise StoreParseError(path, number, f"invalid JSON: {exc}") from exc
            if not isinstance(record, dict):
                raise StoreParseError(path, number, "record is not a JSON object")
            yield number, record

    def _append_lines(self, path: Path, records: Sequence[dict[str, Any]]) -> None:
        try:
            with path.open("a", encoding="utf-8") as handle:
                for record in records:
                    handle.write(_canonical_line(record))
        except OSError as exc:
            raise StoreIoError(f"cannot append to {path}: {exc}") from exc

    # -- courses -----------------------------------------------------------

    def import_course(self, path: str | Path) -> Course:
        """Validate a course file and keep a normalized copy in the store."""
        path = Path(path)
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise StoreIoError(f"cannot read course file {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise StoreParseError(path, exc.lineno, f"invalid JSON: {exc.msg}") from exc
        course = course_from_record(raw)
        target = self.courses_dir / f"{_slugify(course.title)}.json"
        try:
            target.write_text(
                json.dumps(course_to_record(course), ensure_ascii=False, indent=2) + "\n",
                encoding="utf-8",
            )
        except OSError as exc:
            raise StoreIoError(f"cannot write {target}: {exc}") from exc
        return course

    def load_course(self, title_or_slug: str) -> Course:
        target = self.courses_dir / f"{_slugify(title_or_slug)}.json"
        if not target.is_file():
            raise StoreError(f"no imported course {title_or_slug!r} (looked for {target})")
        return course_from_record(json.loads(target.read_text(encoding="utf-8")))

    # -- MCQs ----------------------------------------------------------------

    def append_mcqs(self, entries: Sequence[tuple[Mcq, Sequence[LintFinding]]]) -> None:
        """Append MCQs with their lint findings; ids must be new to the file."""
        with self._write_lock:
            existing = {record["id"] for _, record in self._iter_lines(self.mcqs_path)}
            lines = []
            for mcq, lints in entries:
                if mcq.id in existing:
                    raise StoreError(f"mcq id {mcq.id!r} already stored")
                existing.add(mcq.id)
                record = mcq_to_record(mcq)
                record["lints"] = [finding.to_record() for finding in lints]
                lines.append(record)
            self._append_lines(self.mcqs_path, lines)

    def load_mcqs(
        self,
        source: McqSource | None = None,
        lo_id: str | None = None,
        status: str | None = None,
    ) -> list[StoredMcq]:
        """Load stored MCQs; filters are pure predicates.

        ``status`` accepts ``"clean"`` (no lint findings) or ``"flagged"``.
        """
        if status not in (None, "clean", "flagged"):
            raise StoreError(f"unknown status filter {status!r}")
        result: list[StoredMcq] = []
        for number, record in self._iter_lines(self.mcqs_path):
            try:
                lints = tuple(_lint_from_record(r) for r in record.get("lints", []))
                stored = StoredMcq(mcq=validate_mcq(record), lints=lints)
            except QuizforgeError as exc:
                raise StoreParseError(self.mcqs_path, number, str(exc)) from exc
            if source is not None and stored.mcq.source is not source:
                continue
            if lo_id is not None and stored.mcq.lo_id != lo_id:
                continue
            if status == "clean" and not stored.is_clean:
                continue
            if status == "flagged" and stored.is_clean:
                continue
            result.append(stored)
        return result

    # -- annotations ---------------------------------------------------------

    def append_annotation(self, annotation: RubricAnnotation) -> None:
        """Append one annotation; a rater may annotate an MCQ only once."""
        with self._write_lock:
            for _, record in self._iter_lines(self.annotations_path):
                if (
                    record.get("mcqId") == annotation.mcq_id
                    and record.get("raterId") == annotation.rater_id
                ):
                    raise StoreError(
                        f"rater {annotation.rater_id!r} already annotated {annotation.mcq_id!r}"
                    )
            self._append_lines(self.annotations_path, [annotation.to_record()])

    def load_annotations(self, mcq_id: str | None = None) -> list[RubricAnnotation]:
        result = []
        for number, record in self._iter_lines(self.annotations_path):
            try:
                annotation = annotation_from_record(record)
            except QuizforgeError as exc:
                raise StoreParseError(self.annotations_path, number, str(exc)) from exc
            if mcq_id is None or annotation.mcq_id == mcq_id:
                result.append(annotation)
        return result

    # -- runs and reports ------------------------------------------------------

    def write_run(self, run_id: str, record: dict[str, Any]) -> Path:
        target = self.runs_dir / f"{run_id}.json"
        try:
            target.write_text(
                json.dumps(record, ensure_ascii=False, indent=2, sort_keys=True) + "\n",
                encoding="utf-8",
            )
        except OSError as exc:
            raise StoreIoError(f"cannot write run manifest {target}: {exc}") from exc
        return target

    def load_run(self, run_id: str) -> dict[str, Any]:
        target = self.runs_dir / f"{run_id}.json"
        if not target.is_file():
            raise StoreError(f"no run manifest {run_id!r}")
        return json.loads(target.read_text(encoding="utf-8"))

    def write_report(self, name: str, record: dict[str, Any]) -> Path:
        target = self.reports_dir / f"{name}.json"
        try:
            target.write_text(
                json.dumps(record, ensure_ascii=False, indent=2, sort_keys=True) + "\n",
                encoding="utf-8",
            )
        except OSError as exc:
            raise StoreIoError(f"cannot write report {target}: {exc}") from exc
        return target

    # -- integrity ---------------------------------------------------------------

    def reserialize_jsonl(self, which: str) -> str:
        """Canonical bytes of a JSONL file re-serialized from parsed records.

        Matches the on-disk content exactly for files this store wrote, which
        is the round-trip stability check callers can assert.
        """
        path = {"mcqs": self.mcqs_path, "annotations": self.annotations_path}[which]
        return "".join(_canonical_line(record) for _, record in self._iter_lines(path))
