"""Comparison of two MCQ pools over their resolved rubric verdicts.

Per rubric item the resolved categories of both pools are tabulated into a
2xC contingency table and tested for a difference: exactly for binary items,
by seeded Monte Carlo for items with three or more categories. When a table
is degenerate (every verdict in one category), no difference is detectable
and the p-value is reported as 1.0 rather than an error.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any, Mapping, Sequence

from ..model import QuizforgeError
from .rubric import (
    RaterRole,
    ResolvedVerdict,
    RubricAnnotation,
    RubricItem,
    RubricSchema,
    default_rubric_schema,
)
from .significance import (
    DEFAULT_MC_ITERATIONS,
    fisher_exact_2x2,
    fisher_exact_2xk,
)


class CompareError(QuizforgeError):
    pass


class EmptyPoolError(CompareError):
    pass


class NoMatchingAnnotationsError(CompareError):
    pass


class ComparisonMethod(str, Enum):
    EXACT_2X2 = "exact2x2"
    MC_2XK = "mc2xk"


@dataclass(frozen=True)
class ItemComparison:
    counts_a: Mapping[str, int]
    counts_b: Mapping[str, int]
    p_value: float
    method: ComparisonMethod


@dataclass(frozen=True)
class ComparisonReport:
    items: Mapping[RubricItem, ItemComparison]
    n_a: int
    n_b: int
    iterations: int
    seed: int

    def to_record(self) -> dict[str, Any]:
        return {
            "poolSizeA": self.n_a,
            "poolSizeB": self.n_b,
            "iterations": self.iterations,
            "seed": self.seed,
            "items": {
                item.value: {
                    "countsA": dict(comparison.counts_a),
                    "countsB": dict(comparison.counts_b),
                    "pValue": comparison.p_value,
                    "method": comparison.method.value,
                }
                for item, comparison in self.items.items()
            },
        }


def _tabulate(
    verdicts: Sequence[ResolvedVerdict], item: RubricItem, categories: tuple[str, ...]
) -> dict[str, int]:
    counts = {category: 0 for category in categories}
    for verdict in verdicts:
        counts[verdict.categories[item]] += 1
    return counts


def compare_pools(
    verdicts_a: Sequence[ResolvedVerdict],
    verdicts_b: Sequence[ResolvedVerdict],
    schema: RubricSchema | None = None,
    iterations: int = DEFAULT_MC_ITERATIONS,
    seed: int = 0,
) -> ComparisonReport:
    """Per-item category counts and difference p-values for two verdict pools."""
    if schema is None:
        schema = default_rubric_schema()
    if not verdicts_a or not verdicts_b:
        raise EmptyPoolError("both pools must be nonempty")

    items: dict[RubricItem, ItemComparison] = {}
    for item in RubricItem:
        categories = schema.categories[item]
        counts_a = _tabulate(verdicts_a, item, categories)
        counts_b = _tabulate(verdicts_b, item, categories)
        table = [
            [counts_a[c] for c in categories],
            [counts_b[c] for c in categories],
        ]
        method = ComparisonMethod.EXACT_2X2 if len(categories) == 2 else ComparisonMethod.MC_2XK
        used_columns = sum(1 for c in categories if counts_a[c] + counts_b[c] > 0)
        if used_columns < 2:
            p_value = 1.0
        elif method is ComparisonMethod.EXACT_2X2:
            p_value = fisher_exact_2x2(table)
        else:
            p_value = fisher_exact_2xk(table, iterations=iterations, seed=seed)
        items[item] = ItemComparison(
            counts_a=counts_a, counts_b=counts_b, p_value=p_value, method=method
        )
    return ComparisonReport(
        items=items, n_a=len(verdicts_a), n_b=len(verdicts_b), iterations=iterations, seed=seed
    )


def answer_rate(
    annotations: Sequence[RubricAnnotation], role: RaterRole | None = None
) -> float:
    """Fraction of matching annotations whose rater answered correctly."""
    matching = [a for a in annotations if role is None or a.rater_role is role]
    if not matching:
        raise NoMatchingAnnotationsError(
            "no annotations" if role is None else f"no annotations from {role.value} raters"
        )
    return sum(1 for a in matching if a.answered_correctly) / len(matching)
