"""Fisher's exact test for 2x2 tables and a seeded Monte Carlo extension to
2xK tables.

The 2x2 test is computed exactly: with all margins fixed, the table is
determined by its top-left cell, whose null distribution is hypergeometric.
The two-sided p-value sums the probabilities of every table at most as
probable as the observed one. Weights are kept as exact integers
(``comb``-products sharing one denominator) so the "at most as probable"
comparison never suffers float ties; a 1e-7 relative slack keeps tables that
are equal in probability up to rounding on the "included" side.

For 2xK tables the null is multivariate hypergeometric. Exact enumeration is
infeasible at real table sizes, so the p-value is estimated by sampling
margin-preserving tables and counting those no more probable than the
observed one, with the observed table itself always included:

    p = (1 + #{t : P(t) <= P(observed)}) / (1 + iterations)

Sampling is driven by a single seeded generator in fixed-size batches, so a
given (table, iterations, seed) triple always yields the same estimate.
"""

from __future__ import annotations

import math
from typing import Any, Sequence

import numpy as np

from ..model import QuizforgeError

RELATIVE_SLACK = 1e-7
_SLACK_SCALE = 10**7  # integer form of the relative slack for exact weights

MIN_MC_ITERATIONS = 10_000
DEFAULT_MC_ITERATIONS = 1_000_000
_MC_BATCH = 100_000


class SignificanceError(QuizforgeError):
    pass


class DegenerateMarginsError(SignificanceError):
    """A margin of the table is zero, so the test statistic is constant."""


def _as_int_table(table: Any, rows: int | None = None) -> list[list[int]]:
    out: list[list[int]] = []
    for row in table:
        converted = []
        for value in row:
            as_int = int(value)
            if as_int != value or as_int < 0:
                raise SignificanceError(f"counts must be non-negative integers, got {value!r}")
            converted.append(as_int)
        out.append(converted)
    if rows is not None and len(out) != rows:
        raise SignificanceError(f"expected {rows} rows, got {len(out)}")
    if len({len(row) for row in out}) != 1:
        raise SignificanceError("ragged table")
    return out


def fisher_exact_2x2(table: Sequence[Sequence[int]]) -> float:
    """Two-sided Fisher exact p-value for a 2x2 count table."""
    (a, b), (c, d) = _as_int_table(table, rows=2)
    row1, row2 = a + b, c + d
    col1, col2 = a + c, b + d
    if min(row1, row2, col1, col2) <= 0:
        raise DegenerateMarginsError(f"margins must be positive: {table}")
    total = row1 + row2

    lo = max(0, col1 - row2)
    hi = min(row1, col1)
    observed = math.comb(row1, a) * math.comb(row2, c)
    threshold = observed * (_SLACK_SCALE + 1)

    acc = 0
    for x in range(lo, hi + 1):
        weight = math.comb(row1, x) * math.comb(row2, col1 - x)
        if weight * _SLACK_SCALE <= threshold:
            acc += weight
    return acc / math.comb(total, col1)


def _log_factorials(n: int) -> np.ndarray:
    values = np.ones(n + 1)
    values[0] = 1.0
    np.log(np.arange(1, n + 1), out=values[1:])
    return np.concatenate(([0.0], np.cumsum(values[1:])))


def fisher_exact_2xk(
    table: Sequence[Sequence[int]],
    iterations: int = DEFAULT_MC_ITERATIONS,
    seed: int = 0,
) -> float:
    """Monte Carlo two-sided Fisher-style p-value for a 2xK count table."""
    rows = _as_int_table(table, rows=2)
    arr = np.asarray(rows, dtype=np.int64)
    n_categories = arr.shape[1]
    if n_categories < 2:
        raise SignificanceError("need at least two categories")
    if iterations < MIN_MC_ITERATIONS:
        raise SignificanceError(f"need at least {MIN_MC_ITERATIONS} iterations")
    row_sums = arr.sum(axis=1)
    cols = arr.sum(axis=0)
    if (row_sums <= 0).any() or (cols > 0).sum() < 2:
        raise DegenerateMarginsError(f"margins leave no freedom: {rows}")

    total = int(arr.sum())
    draw = int(row_sums[0])
    lf = _log_factorials(total)

    # log weight of a table given margins, up to the shared denominator:
    # sum_k [ lf(col_k) - lf(a_k) - lf(col_k - a_k) ]
    const = lf[cols].sum()

    def log_weight(top_rows: np.ndarray) -> np.ndarray:
        return const - lf[top_rows].sum(axis=-1) - lf[cols - top_rows].sum(axis=-1)

    observed = float(log_weight(arr[0][None, :])[0])
    cutoff = observed + math.log1p(RELATIVE_SLACK)

    rng = np.random.default_rng(seed)
    hits = 0
    remaining = iterations
    while remaining > 0:
        size = min(_MC_BATCH, remaining)
        samples = rng.multivariate_hypergeometric(cols, draw, size=size)
        hits += int((log_weight(samples) <= cutoff).sum())
        remaining -= size
    return (hits + 1) / (iterations + 1)
