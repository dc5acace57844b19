"""Command-line entry point for the batch workflows.

Exit codes: 0 on success, 2 for user or validation errors (bad files, bad
flags, violated preconditions), 1 for anything unexpected. Every command
accepts ``--json`` for machine-readable output, and all randomness flows
from ``--seed``.
"""

from __future__ import annotations

import json
import os
import sys
from collections import Counter
from pathlib import Path

import click

from .bloom import LexiconClassifier, default_lexicon, load_lexicon
from .evaluation import (
    DEFAULT_MC_ITERATIONS,
    RaterRole,
    agreement_report,
    answer_rate,
    compare_pools,
    resolve_all,
)
from .evaluation.compare import NoMatchingAnnotationsError
from .gateway import ENV_API_KEY, Gateway, HttpBackend, MockBackend
from .model import (
    BloomLevel,
    GenerationParams,
    McqSource,
    QuestionType,
    QuizforgeError,
    course_from_record,
    course_to_record,
    utc_now_iso,
    validate_mcq,
)
from .parsing import derive_mcq_id, lint_mcq
from .pipeline import Pipeline
from .qtypes import default_type_mapping, load_type_mapping, plan_generation, planned_type_totals
from .store import Store


def _load_course_file(path: Path):
    try:
        record = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise QuizforgeError(f"{path} is not valid JSON: {exc}") from exc
    return course_from_record(record)


def _emit(payload: dict, as_json: bool, human_lines: list[str]) -> None:
    if as_json:
        click.echo(json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True))
    else:
        for line in human_lines:
            click.echo(line)


class _Cli(click.Group):
    """Group that maps domain errors onto the documented exit codes."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except click.ClickException:
            raise
        except QuizforgeError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)


@click.group(cls=_Cli)
@click.version_option(package_name="quizforge")
def main() -> None:
    """Generate, lint, annotate and compare multiple-choice questions."""


@main.command()
@click.argument("course_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--lexicon", "lexicon_path", type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="Override the bundled verb lexicon.")
@click.option("--output", type=click.Path(dir_okay=False, path_type=Path),
              help="Write the annotated course file here instead of only printing counts.")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
def classify(course_file: Path, lexicon_path: Path | None, output: Path | None, as_json: bool) -> None:
    """Predict a Bloom level for every learning objective in a course file."""
    course = _load_course_file(course_file)
    lexicon = load_lexicon(lexicon_path) if lexicon_path else default_lexicon()
    classifier = LexiconClassifier(lexicon)

    annotated_modules = []
    counts: Counter[str] = Counter()
    for module in course.modules:
        los = []
        for lo in module.los:
            level = classifier.classify(lo.text)
            counts[level.value] += 1
            los.append(lo.with_bloom(level))
        annotated_modules.append((module, tuple(los)))

    record = course_to_record(course)
    for raw_module, (_, los) in zip(record["modules"], annotated_modules):
        for raw_lo, lo in zip(raw_module["los"], los):
            raw_lo["bloom"] = lo.bloom.value
    if output is not None:
        output.write_text(json.dumps(record, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")

    ordered = {level.value: counts.get(level.value, 0) for level in BloomLevel}
    _emit(
        {"course": course.title, "bloomCounts": ordered, "totalLos": sum(ordered.values())},
        as_json,
        [f"{course.title}: {sum(ordered.values())} learning objectives"]
        + [f"  {name:<12} {n}" for name, n in ordered.items()],
    )


@main.command()
@click.argument("course_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--mapping", "mapping_path", type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="Override the bundled bloom-to-type mapping.")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
def plan(course_file: Path, mapping_path: Path | None, as_json: bool) -> None:
    """Show how many MCQs of each type a generation run would request."""
    course = _load_course_file(course_file)
    mapping = load_type_mapping(mapping_path) if mapping_path else default_type_mapping()
    plans = plan_generation(course.all_los(), mapping)
    totals = planned_type_totals(plans)
    total = sum(totals.values())
    _emit(
        {
            "course": course.title,
            "perType": {qtype.value: n for qtype, n in totals.items()},
            "totalPlanned": total,
            "los": len(plans),
        },
        as_json,
        [f"{course.title}: {len(plans)} objectives, {total} MCQs planned"]
        + [f"  {qtype.value:<18} {n}" for qtype, n in totals.items()],
    )


@main.command()
@click.argument("course_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--store", "store_path", required=True, type=click.Path(file_okay=False, path_type=Path))
@click.option("--backend", type=click.Choice(["mock", "http"]), default="mock", show_default=True)
@click.option("--model", default=None, help="Completion model name.")
@click.option("--temperature", type=float, default=None)
@click.option("--max-tokens", type=int, default=None)
@click.option("--concurrency", type=int, default=4, show_default=True)
@click.option("--lo-id", "lo_ids", multiple=True, help="Restrict generation to these objective ids.")
@click.option("--lexicon", "lexicon_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--mapping", "mapping_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--run-id", default=None, help="Fixed run id (otherwise generated).")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
def generate(
    course_file: Path,
    store_path: Path,
    backend: str,
    model: str | None,
    temperature: float | None,
    max_tokens: int | None,
    concurrency: int,
    lo_ids: tuple[str, ...],
    lexicon_path: Path | None,
    mapping_path: Path | None,
    run_id: str | None,
    as_json: bool,
) -> None:
    """Generate MCQs for every objective of a course into a store."""
    if backend == "http" and not os.environ.get(ENV_API_KEY):
        raise QuizforgeError(f"backend 'http' requires the {ENV_API_KEY} environment variable")

    params = GenerationParams()
    overrides = {}
    if model is not None:
        overrides["model"] = model
    if temperature is not None:
        overrides["temperature"] = temperature
    if max_tokens is not None:
        overrides["max_tokens"] = max_tokens
    if overrides:
        params = GenerationParams(
            model=overrides.get("model", params.model),
            temperature=overrides.get("temperature", params.temperature),
            top_p=params.top_p,
            frequency_penalty=params.frequency_penalty,
            presence_penalty=params.presence_penalty,
            max_tokens=overrides.get("max_tokens", params.max_tokens),
        )

    store = Store(store_path)
    course = store.import_course(course_file)
    gateway = Gateway(MockBackend() if backend == "mock" else HttpBackend())
    lexicon = load_lexicon(lexicon_path) if lexicon_path else default_lexicon()
    mapping = load_type_mapping(mapping_path) if mapping_path else default_type_mapping()
    pipeline = Pipeline(
        gateway=gateway,
        classifier=LexiconClassifier(lexicon),
        mapping=mapping,
        params=params,
    )
    run = pipeline.generate_batch(
        course,
        store,
        concurrency=concurrency,
        run_id=run_id,
        lo_ids=list(lo_ids) or None,
    )
    _emit(
        run.to_record(),
        as_json,
        [
            f"run {run.run_id}: planned {run.planned}, produced {run.produced}, "
            f"failed attempts {run.failed}",
            f"store: {store_path}",
        ],
    )


@main.command("import-mcqs")
@click.argument("mcqs_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--store", "store_path", required=True, type=click.Path(file_okay=False, path_type=Path))
@click.option("--source", type=click.Choice(["human", "generated"]), default="human", show_default=True)
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
def import_mcqs(mcqs_file: Path, store_path: Path, source: str, as_json: bool) -> None:
    """Import externally written MCQs (a JSON array of records) into a store.

    Records need loId, stem (or question), choices, correctAnswer and
    explanation; an id is derived when absent. Anything that is not a
    three-choice single-key MCQ is rejected with a diagnostic.
    """
    try:
        raw_records = json.loads(mcqs_file.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise QuizforgeError(f"{mcqs_file} is not valid JSON: {exc}") from exc
    if not isinstance(raw_records, list):
        raise QuizforgeError(f"{mcqs_file} must hold a JSON array of MCQ records")

    store = Store(store_path)
    now = utc_now_iso()
    entries = []
    for position, raw in enumerate(raw_records, start=1):
        candidate = dict(raw)
        if "stem" not in candidate and "question" in candidate:
            candidate["stem"] = candidate.pop("question")
        candidate.setdefault("source", source)
        candidate.setdefault("model", "")
        candidate.setdefault("bloom", BloomLevel.UNASSIGNED.value)
        candidate.setdefault("questionType", "recall")
        candidate.setdefault("createdAt", now)
        candidate.setdefault("codeInStem", "```" in str(candidate.get("stem") or ""))
        if not candidate.get("id"):
            candidate["id"] = derive_mcq_id(
                str(candidate.get("loId", "")),
                QuestionType(candidate["questionType"]),
                str(candidate.get("stem") or ""),
            )
        try:
            mcq = validate_mcq(candidate)
        except QuizforgeError as exc:
            raise QuizforgeError(f"{mcqs_file}: record {position}: {exc}") from exc
        entries.append((mcq, lint_mcq(mcq)))
    store.append_mcqs(entries)
    _emit(
        {"imported": len(entries), "source": source},
        as_json,
        [f"imported {len(entries)} {source} MCQs into {store_path}"],
    )


@main.command()
@click.argument("mcqs_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
def lint(mcqs_file: Path, as_json: bool) -> None:
    """Re-lint a JSONL file of stored MCQ records and list the findings."""
    findings_out = []
    lines = mcqs_file.read_text(encoding="utf-8").splitlines()
    for number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            mcq = validate_mcq(record)
        except (json.JSONDecodeError, QuizforgeError) as exc:
            raise QuizforgeError(f"{mcqs_file}: line {number}: {exc}") from exc
        for finding in lint_mcq(mcq):
            findings_out.append({"mcqId": mcq.id, **finding.to_record()})
    _emit(
        {"findings": findings_out, "count": len(findings_out)},
        as_json,
        [f"{len(findings_out)} finding(s)"]
        + [f"  {f['mcqId']}  {f['severity']:<7} {f['code']}: {f['detail']}" for f in findings_out],
    )


@main.command()
@click.option("--store", "store_path", required=True, type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
def stats(store_path: Path, as_json: bool) -> None:
    """Inter-rater agreement (Fleiss kappa, Gwet AC1) per rubric item."""
    store = Store(store_path)
    annotations = store.load_annotations()
    report = agreement_report(annotations)
    rates = {}
    for label, role in (("overall", None), ("student", RaterRole.STUDENT), ("instructor", RaterRole.INSTRUCTOR)):
        try:
            rates[label] = answer_rate(annotations, role)
        except NoMatchingAnnotationsError:
            rates[label] = None
    payload = {"agreement": report.to_record(), "answerRates": rates}
    store.write_report("agreement", payload)
    lines = [f"{'rubric item':<22} {'AC1':>7} {'kappa':>7} {'n':>5}"]
    for item, item_stats in report.items.items():
        lines.append(
            f"{item.value:<22} {item_stats.gwet_ac1:>7.3f} {item_stats.fleiss_kappa:>7.3f} "
            f"{item_stats.n_items:>5}"
        )
    lines.append(
        "answer rates: "
        + ", ".join(f"{k}={v:.3f}" if v is not None else f"{k}=n/a" for k, v in rates.items())
    )
    _emit(payload, as_json, lines)


@main.command()
@click.option("--store", "store_path", required=True, type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--iterations", type=int, default=DEFAULT_MC_ITERATIONS, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
def compare(store_path: Path, iterations: int, seed: int, as_json: bool) -> None:
    """Compare generated vs human MCQ pools per rubric item (Fisher tests)."""
    store = Store(store_path)
    annotations = store.load_annotations()
    source_by_id = {s.mcq.id: s.mcq.source for s in store.load_mcqs()}
    verdicts = resolve_all(annotations)
    pool_a = [v for v in verdicts if source_by_id.get(v.mcq_id) is McqSource.GENERATED]
    pool_b = [v for v in verdicts if source_by_id.get(v.mcq_id) is McqSource.HUMAN]
    report = compare_pools(pool_a, pool_b, iterations=iterations, seed=seed)
    payload = report.to_record()
    store.write_report("comparison", payload)
    lines = [f"generated pool: {report.n_a}, human pool: {report.n_b} (seed {seed})"]
    for item, comparison in report.items.items():
        lines.append(f"  {item.value:<22} p={comparison.p_value:.3g} [{comparison.method.value}]")
    _emit(payload, as_json, lines)


@main.command()
@click.option("--store", "store_path", required=True, type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--assets", "assets_dir", type=click.Path(exists=True, file_okay=False, path_type=Path),
              help="Directory of built review-UI assets to serve at /.")
@click.option("--iterations", type=int, default=DEFAULT_MC_ITERATIONS, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def serve(store_path: Path, port: int, host: str, assets_dir: Path | None,
          iterations: int, seed: int) -> None:
    """Run the annotation/review HTTP service."""
    import uvicorn

    from .service import create_app

    app = create_app(Store(store_path), assets_dir=assets_dir, iterations=iterations, seed=seed)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
