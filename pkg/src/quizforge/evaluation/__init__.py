"""Evaluation apparatus: rubric annotation, disagreement resolution,
inter-rater agreement statistics, and pool comparison."""

from .agreement import (
    AgreementError,
    AgreementReport,
    ItemAgreement,
    NoEligibleItemsError,
    agreement_report,
    fleiss_kappa,
    gwet_ac1,
    rating_matrix,
)
from .compare import (
    ComparisonMethod,
    ComparisonReport,
    EmptyPoolError,
    ItemComparison,
    NoMatchingAnnotationsError,
    answer_rate,
    compare_pools,
)
from .rubric import (
    DEFAULT_CATEGORIES,
    EmptyAnnotationSetError,
    MixedMcqIdsError,
    RaterRole,
    ResolutionRule,
    ResolvedVerdict,
    RubricAnnotation,
    RubricError,
    RubricItem,
    RubricSchema,
    annotation_from_record,
    default_rubric_schema,
    resolve,
    resolve_all,
)
from .significance import (
    DEFAULT_MC_ITERATIONS,
    DegenerateMarginsError,
    SignificanceError,
    fisher_exact_2x2,
    fisher_exact_2xk,
)

__all__ = [
    "AgreementError",
    "AgreementReport",
    "ComparisonMethod",
    "ComparisonReport",
    "DEFAULT_CATEGORIES",
    "DEFAULT_MC_ITERATIONS",
    "DegenerateMarginsError",
    "EmptyAnnotationSetError",
    "EmptyPoolError",
    "ItemAgreement",
    "ItemComparison",
    "MixedMcqIdsError",
    "NoEligibleItemsError",
    "NoMatchingAnnotationsError",
    "RaterRole",
    "ResolutionRule",
    "ResolvedVerdict",
    "RubricAnnotation",
    "RubricError",
    "RubricItem",
    "RubricSchema",
    "SignificanceError",
    "agreement_report",
    "annotation_from_record",
    "answer_rate",
    "compare_pools",
    "default_rubric_schema",
    "fisher_exact_2x2",
    "fisher_exact_2xk",
    "fleiss_kappa",
    "gwet_ac1",
    "rating_matrix",
    "resolve",
    "resolve_all",
]
