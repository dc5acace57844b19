"""Bloom-level classification of learning objectives.

The default backend is a deterministic action-verb lexicon: the first token
of the objective that appears in the lexicon decides the level. Learned
classifiers can be plugged in through the ``Classifier`` protocol without
touching the pipeline.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Protocol

from .model import BloomLevel, QuizforgeError
from .resources import resource_path

MIN_VERBS_PER_LEVEL = 3

_TOKEN_RE = re.compile(r"[a-z]+")


class LexiconError(QuizforgeError):
    """A lexicon file is unusable."""


class LexiconParseError(LexiconError):
    pass


class DuplicateVerbError(LexiconError):
    pass


class EmptyLevelError(LexiconError):
    pass


@dataclass(frozen=True)
class VerbLexicon:
    """Immutable map from lowercase action verb to Bloom level.

    Each verb belongs to exactly one level, which removes any need for
    cross-level tie-breaking, and every assigned level carries at least
    ``MIN_VERBS_PER_LEVEL`` verbs.
    """

    entries: Mapping[str, BloomLevel]

    def __post_init__(self) -> None:
        counts: dict[BloomLevel, int] = {level: 0 for level in BloomLevel.assigned_levels()}
        for verb, level in self.entries.items():
            if verb != verb.lower():
                raise LexiconError(f"lexicon verbs must be lowercase: {verb!r}")
            if level is BloomLevel.UNASSIGNED:
                raise LexiconError(f"verb {verb!r} may not map to the unassigned level")
            counts[level] += 1
        for level, n in counts.items():
            if n < MIN_VERBS_PER_LEVEL:
                raise EmptyLevelError(
                    f"level {level.value!r} has {n} verbs, needs at least {MIN_VERBS_PER_LEVEL}"
                )

    def level_of(self, verb: str) -> BloomLevel | None:
        return self.entries.get(verb)

    def verbs_for(self, level: BloomLevel) -> tuple[str, ...]:
        return tuple(sorted(v for v, lvl in self.entries.items() if lvl is level))


class Classifier(Protocol):
    """Anything that can assign a Bloom level to objective text."""

    def classify(self, text: str) -> BloomLevel: ...


class LexiconClassifier:
    """First-matching-verb rule over a validated lexicon.

    Objectives conventionally lead with their action verb, so scanning left
    to right and taking the first lexicon hit is both deterministic and easy
    to explain to instructors.
    """

    def __init__(self, lexicon: VerbLexicon):
        self.lexicon = lexicon

    def classify(self, text: str) -> BloomLevel:
        return classify_lo(text, self.lexicon)


def classify_lo(text: str, lexicon: VerbLexicon) -> BloomLevel:
    """Return the level of the first lexicon verb in ``text``.

    Case-insensitive, punctuation-insensitive, total: unmatched text maps to
    ``BloomLevel.UNASSIGNED``.
    """
    for token in _TOKEN_RE.findall(text.lower()):
        level = lexicon.level_of(token)
        if level is not None:
            return level
    return BloomLevel.UNASSIGNED


def _reject_duplicate_keys(pairs: Iterable[tuple[str, object]]) -> dict:
    result: dict = {}
    for key, value in pairs:
        if key in result:
            raise DuplicateVerbError(f"verb {key!r} appears more than once")
        result[key] = value
    return result


def load_lexicon(path: str | Path) -> VerbLexicon:
    """Load and validate a ``{"verb": "level", ...}`` JSON lexicon file."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"), object_pairs_hook=_reject_duplicate_keys)
    except DuplicateVerbError:
        raise
    except (OSError, json.JSONDecodeError) as exc:
        raise LexiconParseError(f"cannot read lexicon {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise LexiconParseError(f"lexicon {path} must be a JSON object")

    entries: dict[str, BloomLevel] = {}
    for verb, level_name in raw.items():
        try:
            level = BloomLevel(level_name)
        except ValueError:
            raise LexiconParseError(f"unknown bloom level {level_name!r} for verb {verb!r}") from None
        entries[verb.strip().lower()] = level
    return VerbLexicon(entries=entries)


def default_lexicon() -> VerbLexicon:
    """The lexicon shipped with the package."""
    return load_lexicon(resource_path("lexicon.json"))
