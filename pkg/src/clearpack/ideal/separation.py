"""Minimal dependent row sets (circuits) of a rank-deficient tight system.

Default search enumerates subsets by increasing size and certifies the first
dependent one exactly; an alternative solves the big-M support-minimization
MILP with the in-repo branch and bound and re-verifies the answer in exact
arithmetic (a too-small M can only ever produce a certificate that fails the
re-verification, never a silently wrong circuit).
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Sequence

from ..formulations import LinearRow, MBLPModel, RowTag, VariableDescriptor
from ..linalg import RatMatrix, nullspace_vector, rank


class NotDeficientError(ValueError):
    """The tight system has full row rank; there is nothing to separate."""


def separate_circuit(
    vectors: Sequence[Sequence[Fraction]],
    method: str = "subset",
    big_m: Fraction = Fraction(1000),
    subset_limit: int = 12,
) -> tuple[tuple[int, ...], tuple[Fraction, ...]]:
    """Minimal dependent subset of the given augmented rows.

    Returns (indices, multipliers over those indices).  `method` is "subset"
    (exact increasing-size search) or "milp" (the support-minimization
    program solved by branch and bound, then re-verified exactly).
    """
    vectors = [list(v) for v in vectors]
    matrix = RatMatrix.from_rows(vectors)
    if rank(matrix) == len(vectors):
        raise NotDeficientError("rows are linearly independent")
    if method == "milp":
        support = _milp_support(vectors, big_m)
        sub = RatMatrix.from_rows([vectors[i] for i in support])
        mult = nullspace_vector(sub)
        if mult is not None and _is_minimal(vectors, support):
            return tuple(support), tuple(mult)
        # fall through: an inadequate big-M can yield a non-minimal support
        method = "subset"
    if len(vectors) > subset_limit:
        raise ValueError(
            f"{len(vectors)} rows exceeds the subset search limit {subset_limit}; use method='milp'"
        )
    for size in range(2, len(vectors) + 1):
        for combo in combinations(range(len(vectors)), size):
            sub = RatMatrix.from_rows([vectors[i] for i in combo])
            mult = nullspace_vector(sub)
            if mult is not None:
                return tuple(combo), tuple(mult)
    raise AssertionError("rank deficiency without a dependent subset")


def _is_minimal(vectors, support) -> bool:
    sub = [vectors[i] for i in support]
    if rank(RatMatrix.from_rows(sub)) != len(sub) - 1:
        return False
    for drop in range(len(sub)):
        rest = [v for k, v in enumerate(sub) if k != drop]
        if rank(RatMatrix.from_rows(rest)) < len(rest):
            return False
    return True


def _milp_support(vectors, big_m: Fraction) -> list[int]:
    """Support minimization: min sum(mu + nu) over multipliers p with
    (A_T|b_T)^T p = 0, p_i in [1, M] when mu_i, in [-M, -1] when nu_i, else
     0; at least one of mu, nu active (p = 0 is excluded)."""
    from ..solver import solve_milp  # local import to avoid a cycle

    t = len(vectors)
    width = len(vectors[0])
    variables = []
    for idx in range(t):
        variables.append(VariableDescriptor(f"p_{idx}", "continuous", -big_m, big_m))
    for idx in range(t):
        variables.append(VariableDescriptor(f"mu_{idx}", "binary", Fraction(0), Fraction(1)))
    for idx in range(t):
        variables.append(VariableDescriptor(f"nu_{idx}", "binary", Fraction(0), Fraction(1)))
    rows = []
    for col in range(width):
        coeffs = {}
        for idx in range(t):
            if vectors[idx][col]:
                coeffs[f"p_{idx}"] = vectors[idx][col]
        rows.append(LinearRow(coeffs, "==", Fraction(0), RowTag("orth", (col,))))
    for idx in range(t):
        # 1 - (M+1)(1 - mu) <= p <= M mu   and   -M nu <= p <= (M+1)(1-nu) - 1
        rows.append(
            LinearRow(
                {f"p_{idx}": Fraction(1), f"mu_{idx}": -(big_m + 1)},
                ">=",
                -big_m,
                RowTag("chain", (idx, "lo+")),
            )
        )
        rows.append(
            LinearRow(
                {f"p_{idx}": Fraction(1), f"mu_{idx}": -big_m},
                "<=",
                Fraction(0),
                RowTag("chain", (idx, "hi+")),
            )
        )
        rows.append(
            LinearRow(
                {f"p_{idx}": Fraction(1), f"nu_{idx}": big_m},
                ">=",
                Fraction(0),
                RowTag("chain", (idx, "lo-")),
            )
        )
        rows.append(
            LinearRow(
                {f"p_{idx}": Fraction(1), f"nu_{idx}": (big_m + 1)},
                "<=",
                big_m,
                RowTag("chain", (idx, "hi-")),
            )
        )
    rows.append(
        LinearRow(
            {f"mu_{idx}": Fraction(1) for idx in range(t)}
            | {f"nu_{idx}": Fraction(1) for idx in range(t)},
            ">=",
            Fraction(1),
            RowTag("nontrivial", ()),
        )
    )
    model = MBLPModel(
        tuple(variables),
        tuple(rows),
        objective_sense="min",
        objective={f"mu_{idx}": Fraction(1) for idx in range(t)}
        | {f"nu_{idx}": Fraction(1) for idx in range(t)},
        metadata={"kind": "circuit-support"},
    )
    result = solve_milp(model)
    if result.status != "optimal":
        raise RuntimeError(f"support MILP ended {result.status}")
    support = [
        idx
        for idx in range(t)
        if result.incumbent_point[f"mu_{idx}"] == 1 or result.incumbent_point[f"nu_{idx}"] == 1
    ]
    return support
