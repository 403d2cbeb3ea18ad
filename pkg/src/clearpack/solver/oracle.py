"""Direct enumeration of the pairwise disjunction.

Every pair independently picks one of its four precedence terms; each of the
4^(pairs) assignments is an LP in the centers and the height.  All
assignments share one tableau: a term is switched off by relaxing its row's
right-hand side to the exact supremum of the left side (no big-M), and the
enumeration walks assignments in a Gray-code order so consecutive LPs differ
in a single pair and re-solve by dual simplex in a few pivots.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional

from ..packing import Instance, derive_parameters
from .simplex import INFEASIBLE, OPTIMAL, ExactTableau, _to_fraction


class TooLargeError(ValueError):
    """The assignment space 4^(pairs) exceeds the configured cap."""


def _mixed_radix_gray(n_slots: int, base: int = 4):
    """Reflected Gray sequence over base**n_slots states; yields the state
    list after each single-slot step, starting with the initial all-zero
    state."""
    state = [0] * n_slots
    direction = [1] * n_slots
    yield state
    total = base**n_slots
    for _ in range(total - 1):
        for slot in range(n_slots):
            nxt = state[slot] + direction[slot]
            if 0 <= nxt < base:
                state[slot] = nxt
                yield state
                break
            direction[slot] = -direction[slot]
        else:  # pragma: no cover - unreachable for well-formed input
            return


def disjunction_oracle(
    inst: Instance, cap_objects: int = 4, collect=None
) -> Optional[Fraction]:
    """Exact minimum strip height over all disjunct assignments, or None when
    no assignment is feasible.  `collect`, when given, receives
    (assignment tuple, height or None) per assignment."""
    if inst.n > cap_objects:
        raise TooLargeError(f"{inst.n} objects exceeds the oracle cap {cap_objects}")
    params = derive_parameters(inst)
    pairs = inst.pairs()
    ids = [o.id for o in inst.objects]

    names = []
    bounds = []
    for i in ids:
        for s in ("x", "y"):
            names.append(f"c_{i}_{s}")
            bounds.append((params.lb[(i, s)], params.ub[(i, s)]))
    names.append("h")
    bounds.append((Fraction(0), inst.region.height))
    col = {name: j for j, name in enumerate(names)}

    rows = []
    for obj in inst.objects:
        rows.append(
            (
                {col["h"]: Fraction(1), col[f"c_{obj.id}_y"]: Fraction(-1)},
                ">=",
                obj.dim("y") / 2 + obj.clear_plus("y"),
            )
        )
    # One row per (pair, disjunct): c_ks - c_ls <= rhs, toggled between the
    # active value -PM and the inactive exact supremum UB_ks - LB_ls.
    term_rows: list[list[tuple[int, Fraction, Fraction]]] = []
    from ..formulations import triples  # local import to avoid a cycle

    for i, j in pairs:
        slot = []
        for k, l, s in triples(i, j):
            active = -params.pm[(k, l, s)]
            inactive = params.ub[(k, s)] - params.lb[(l, s)]
            row_idx = len(rows)
            rows.append(
                (
                    {col[f"c_{k}_{s}"]: Fraction(1), col[f"c_{l}_{s}"]: Fraction(-1)},
                    "<=",
                    inactive,
                )
            )
            slot.append((row_idx, active, inactive))
        term_rows.append(slot)

    tableau = ExactTableau(len(names), bounds, rows)
    costs = {col["h"]: Fraction(1)}

    best: Optional[Fraction] = None
    current = [None] * len(pairs)

    def apply_slot(slot_idx: int, choice: int):
        for pos, (row_idx, active, inactive) in enumerate(term_rows[slot_idx]):
            tableau.change_rhs(row_idx, active if pos == choice else inactive)
        current[slot_idx] = choice

    def resolve() -> Optional[Fraction]:
        # Two phases from the current basis: a zero-cost dual repair (always
        # dual feasible) restores primal feasibility or proves the assignment
        # infeasible and leaves a clean basis for the next toggle; then the
        # real objective comes in through a primal pass.
        tableau.set_costs({})
        if tableau.dual_optimize() == INFEASIBLE:
            return None
        tableau.set_costs(costs)
        status = tableau.primal_optimize()
        if status != OPTIMAL:
            raise RuntimeError("oracle subproblem unbounded; the height is capped")
        return _to_fraction(tableau.objective_value())

    if not pairs:
        return resolve()

    for state in _mixed_radix_gray(len(pairs)):
        changed = [idx for idx in range(len(pairs)) if current[idx] != state[idx]]
        for idx in changed:
            apply_slot(idx, state[idx])
        height = resolve()
        if height is not None and (best is None or height < best):
            best = height
        if collect is not None:
            collect(tuple(state), height)
    return best
