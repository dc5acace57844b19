"""Chance-corrected inter-rater agreement over category-count matrices.

Input shape for both statistics: an ``n_units x n_categories`` matrix where
cell (i, k) counts how many raters put unit i into category k. Row sums (the
number of raters) may vary between units; units rated by fewer than two
raters carry no pairwise agreement information and are skipped.

Fleiss' kappa uses the squared marginal category proportions as its chance
term:

    pa   = mean_i [ sum_k r_ik (r_ik - 1) / (r_i (r_i - 1)) ]
    p_k  = sum_i r_ik / sum_i r_i
    pe   = sum_k p_k^2
    kappa = (pa - pe) / (1 - pe)

Gwet's AC1 replaces the chance term with one that stays stable when a single
category dominates (exactly the regime where kappa collapses):

    pi_k    = mean_i (r_ik / r_i)
    pe_ac1  = (1 / (K - 1)) sum_k pi_k (1 - pi_k)
    ac1     = (pa - pe_ac1) / (1 - pe_ac1)
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping, Sequence

import numpy as np

from ..model import QuizforgeError
from .rubric import RubricAnnotation, RubricItem, RubricSchema, default_rubric_schema


class AgreementError(QuizforgeError):
    pass


class NoEligibleItemsError(AgreementError):
    """No unit has the two or more ratings agreement statistics require."""


def _prepare(counts: Any) -> tuple[np.ndarray, np.ndarray]:
    table = np.asarray(counts, dtype=float)
    if table.ndim != 2 or table.shape[1] < 2:
        raise AgreementError("expected an n_units x n_categories matrix with >= 2 categories")
    if (table < 0).any() or not np.isfinite(table).all():
        raise AgreementError("rating counts must be finite and non-negative")
    raters = table.sum(axis=1)
    eligible = raters >= 2
    if not eligible.any():
        raise NoEligibleItemsError("no unit has >= 2 ratings")
    return table[eligible], raters[eligible]


def _observed_agreement(table: np.ndarray, raters: np.ndarray) -> float:
    per_unit = (table * (table - 1)).sum(axis=1) / (raters * (raters - 1))
    return float(per_unit.mean())


def fleiss_kappa(counts: Any) -> float:
    """Fleiss' kappa, generalized to a variable number of raters per unit.

    Returns exactly 1.0 in the degenerate all-one-category case where both
    observed and chance agreement hit 1.
    """
    table, raters = _prepare(counts)
    pa = _observed_agreement(table, raters)
    p_k = table.sum(axis=0) / raters.sum()
    pe = float((p_k**2).sum())
    if 1.0 - pe < 1e-15:
        return 1.0
    return (pa - pe) / (1.0 - pe)


def gwet_ac1(counts: Any) -> float:
    """Gwet's AC1 over the same matrix shape as ``fleiss_kappa``."""
    table, raters = _prepare(counts)
    n_categories = table.shape[1]
    pa = _observed_agreement(table, raters)
    pi_k = (table / raters[:, None]).mean(axis=0)
    pe = float((pi_k * (1.0 - pi_k)).sum()) / (n_categories - 1)
    return (pa - pe) / (1.0 - pe)


@dataclass(frozen=True)
class ItemAgreement:
    fleiss_kappa: float
    gwet_ac1: float
    n_items: int
    n_annotations: int


@dataclass(frozen=True)
class AgreementReport:
    """Per-rubric-item agreement over an annotation set."""

    items: Mapping[RubricItem, ItemAgreement]

    def to_record(self) -> dict[str, Any]:
        return {
            item.value: {
                "fleissKappa": stats.fleiss_kappa,
                "gwetAc1": stats.gwet_ac1,
                "nItems": stats.n_items,
                "nAnnotations": stats.n_annotations,
            }
            for item, stats in self.items.items()
        }


def rating_matrix(
    annotations: Sequence[RubricAnnotation], item: RubricItem, schema: RubricSchema
) -> np.ndarray:
    """Category-count matrix for one rubric item, one row per annotated MCQ."""
    categories = schema.categories[item]
    index = {category: k for k, category in enumerate(categories)}
    by_mcq: dict[str, np.ndarray] = {}
    for annotation in annotations:
        row = by_mcq.setdefault(annotation.mcq_id, np.zeros(len(categories)))
        row[index[annotation.judgments[item]]] += 1
    return np.array([by_mcq[mcq_id] for mcq_id in sorted(by_mcq)])


def agreement_report(
    annotations: Sequence[RubricAnnotation], schema: RubricSchema | None = None
) -> AgreementReport:
    """Fleiss kappa and Gwet AC1 for each rubric item over raw annotations."""
    if schema is None:
        schema = default_rubric_schema()
    if not annotations:
        raise NoEligibleItemsError("no annotations")
    items: dict[RubricItem, ItemAgreement] = {}
    for item in RubricItem:
        matrix = rating_matrix(annotations, item, schema)
        eligible = matrix.sum(axis=1) >= 2
        items[item] = ItemAgreement(
            fleiss_kappa=fleiss_kappa(matrix),
            gwet_ac1=gwet_ac1(matrix),
            n_items=int(eligible.sum()),
            n_annotations=int(matrix[eligible].sum()),
        )
    return AgreementReport(items=items)
