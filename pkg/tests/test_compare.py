import pytest

from quizforge.evaluation.compare import (
    ComparisonMethod,
    EmptyPoolError,
    NoMatchingAnnotationsError,
    answer_rate,
    compare_pools,
)
from quizforge.evaluation.rubric import RaterRole, RubricItem, resolve_all
from tests.test_rubric import make_annotation

BINARY_ITEMS = {RubricItem.SUFFICIENT_INFO, RubricItem.UNIQUE_CHOICES, RubricItem.NO_OBVIOUS_WRONG}


def _verdicts(spec):
    """spec: list of (mcq_id, judgment overrides) -> resolved verdicts."""
    annotations = [make_annotation(mcq_id=mcq_id, **overrides) for mcq_id, overrides in spec]
    return resolve_all(annotations)


def test_pool_compared_with_itself_is_insignificant():
    pool = _verdicts(
        [
            ("m1", {"lo_alignment": "aligned", "sufficient_info": "pass"}),
            ("m2", {"lo_alignment": "unrelated", "sufficient_info": "fail"}),
            ("m3", {"lo_alignment": "related_not_targeting"}),
            ("m4", {"correct_answer": "multiple"}),
            ("m5", {"correct_code": "incorrect", "unique_choices": "overlapping"}),
            ("m6", {"no_obvious_wrong": "giveaway"}),
        ]
    )
    report = compare_pools(pool, pool, iterations=20_000, seed=1)
    for item, comparison in report.items.items():
        if comparison.method is ComparisonMethod.EXACT_2X2:
            assert comparison.p_value == 1.0
        else:
            assert comparison.p_value >= 0.99
        assert item in RubricItem


def test_methods_follow_category_arity():
    pool = _verdicts([("m1", {}), ("m2", {})])
    report = compare_pools(pool, pool, iterations=10_000, seed=0)
    for item, comparison in report.items.items():
        expected = ComparisonMethod.EXACT_2X2 if item in BINARY_ITEMS else ComparisonMethod.MC_2XK
        assert comparison.method is expected


def test_counts_sum_to_pool_sizes():
    pool_a = _verdicts([(f"a{i}", {"lo_alignment": "aligned"}) for i in range(5)])
    pool_b = _verdicts([(f"b{i}", {"lo_alignment": "unrelated"}) for i in range(3)])
    report = compare_pools(pool_a, pool_b, iterations=10_000, seed=0)
    for comparison in report.items.values():
        assert sum(comparison.counts_a.values()) == 5
        assert sum(comparison.counts_b.values()) == 3
    assert report.n_a == 5
    assert report.n_b == 3


def test_unanimous_pools_degenerate_to_p_one():
    # Every verdict identical on both sides: single used category per item.
    pool_a = _verdicts([(f"a{i}", {}) for i in range(4)])
    pool_b = _verdicts([(f"b{i}", {}) for i in range(4)])
    report = compare_pools(pool_a, pool_b, iterations=10_000, seed=0)
    for comparison in report.items.values():
        assert comparison.p_value == 1.0


def test_clearly_different_pools_are_significant():
    pool_a = _verdicts([(f"a{i}", {"sufficient_info": "pass"}) for i in range(30)])
    pool_b = _verdicts([(f"b{i}", {"sufficient_info": "fail"}) for i in range(30)])
    report = compare_pools(pool_a, pool_b, iterations=10_000, seed=0)
    assert report.items[RubricItem.SUFFICIENT_INFO].p_value < 1e-6


def test_empty_pool_rejected():
    pool = _verdicts([("m1", {})])
    with pytest.raises(EmptyPoolError):
        compare_pools(pool, [], iterations=10_000, seed=0)
    with pytest.raises(EmptyPoolError):
        compare_pools([], pool, iterations=10_000, seed=0)


def test_answer_rate_all_correct():
    annotations = [make_annotation(rater_id=f"r{i}", correct=True) for i in range(4)]
    assert answer_rate(annotations) == 1.0


def test_answer_rate_half():
    annotations = [
        make_annotation(rater_id="r1", correct=True),
        make_annotation(rater_id="r2", correct=False),
    ]
    assert answer_rate(annotations) == 0.5


def test_answer_rate_role_filter():
    annotations = [
        make_annotation(rater_id="s1", role=RaterRole.STUDENT, correct=False),
        make_annotation(rater_id="s2", role=RaterRole.STUDENT, correct=True),
        make_annotation(rater_id="i1", role=RaterRole.INSTRUCTOR, correct=True),
    ]
    assert answer_rate(annotations, RaterRole.STUDENT) == 0.5
    assert answer_rate(annotations, RaterRole.INSTRUCTOR) == 1.0
    assert answer_rate(annotations) == pytest.approx(2 / 3)


def test_answer_rate_matches_hand_count_on_fixture():
    rng_cases = [
        ("m1", "r1", RaterRole.STUDENT, True),
        ("m1", "r2", RaterRole.STUDENT, False),
        ("m2", "r1", RaterRole.INSTRUCTOR, True),
        ("m2", "r3", RaterRole.STUDENT, True),
        ("m3", "r4", RaterRole.INSTRUCTOR, False),
    ]
    annotations = [
        make_annotation(mcq_id=m, rater_id=r, role=role, correct=ok)
        for m, r, role, ok in rng_cases
    ]
    assert answer_rate(annotations) == pytest.approx(3 / 5)
    assert answer_rate(annotations, RaterRole.STUDENT) == pytest.approx(2 / 3)
    assert answer_rate(annotations, RaterRole.INSTRUCTOR) == pytest.approx(1 / 2)


def test_answer_rate_requires_matches():
    with pytest.raises(NoMatchingAnnotationsError):
        answer_rate([])
    with pytest.raises(NoMatchingAnnotationsError):
        answer_rate([make_annotation(role=RaterRole.STUDENT)], RaterRole.INSTRUCTOR)
