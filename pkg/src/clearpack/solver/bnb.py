"""Exact branch-and-bound over the rational simplex.

Children are solved by dual-simplex warm starts in depth-first mode (one
bound change against the parent basis); best-bound mode keeps a FIFO-tied
heap and rebuilds nodes from the root basis.  No cuts and no internal
heuristics, deliberately: branching plus exact bounds is the whole method.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Optional

from ..formulations import MBLPModel, cvar, dvar, gvar, prodvar, triples
from ..packing import DIRECTIONS, PackingSolution, derive_parameters
from .simplex import (
    OPTIMAL,
    UNBOUNDED,
    ExactTableau,
    _model_arrays,
    _to_fraction,
)


@dataclass
class SolveOptions:
    node_limit: Optional[int] = None
    use_priorities: bool = False
    branching: str = "most-fractional"  # | "priority-then-most-fractional"
    node_order: str = "best-bound"  # | "depth-first"
    warm_start: Optional[PackingSolution] = None
    log_path: Optional[str] = None


@dataclass
class BnBResult:
    status: str  # optimal | bounded | infeasible
    incumbent_point: Optional[dict[str, Fraction]]
    incumbent_objective: Optional[Fraction]
    best_bound: Optional[Fraction]
    node_count: int

    @property
    def incumbent(self):
        if self.incumbent_point is None:
            return None
        return (self.incumbent_point, self.incumbent_objective)


class _Logger:
    def __init__(self, path: Optional[str]):
        self.handle = open(path, "w") if path else None

    def emit(self, **fields):
        if self.handle is None:
            return
        printable = {
            k: (str(v) if isinstance(v, Fraction) else v) for k, v in fields.items()
        }
        self.handle.write(json.dumps(printable) + "\n")

    def close(self):
        if self.handle is not None:
            self.handle.close()


def _pick_branch(values, binaries, priorities, rule):
    best = None
    best_key = None
    for j in binaries:
        v = values[j]
        if v == 0 or v == 1:
            continue
        frac = v if v < Fraction(1, 2) else 1 - v
        if rule == "priority-then-most-fractional":
            key = (priorities.get(j, Fraction(0)), frac, -j)
        else:
            key = (frac, -j)
        if best_key is None or key > best_key:
            best_key = key
            best = j
    return best


def solve_milp(model: MBLPModel, opts: SolveOptions | None = None) -> BnBResult:
    """Exact B&B; minimizes or maximizes per the model's objective sense."""
    opts = opts or SolveOptions()
    names, index, bounds, rows, costs, sense = _model_arrays(model)
    binaries = [index[v.name] for v in model.variables if v.kind == "binary"]
    priorities = {}
    if opts.use_priorities:
        for v in model.variables:
            if v.branch_priority is not None and v.name in index:
                priorities[index[v.name]] = v.branch_priority
    rule = (
        "priority-then-most-fractional"
        if opts.use_priorities and opts.branching != "most-fractional"
        else opts.branching
    )
    log = _Logger(opts.log_path)

    incumbent_point: Optional[dict[str, Fraction]] = None
    incumbent_obj: Optional[Fraction] = None  # internal min-sense value
    if opts.warm_start is not None:
        assignment = layout_assignment(model, opts.warm_start)
        if assignment is not None:
            incumbent_point = assignment
            raw = sum(
                (model.objective.get(k, Fraction(0)) * v for k, v in assignment.items()),
                Fraction(0),
            )
            incumbent_obj = raw if sense == 1 else -raw

    def public_obj(internal):
        return internal if sense == 1 else -internal

    if opts.node_limit is not None and opts.node_limit <= 0:
        # Contract: install the warm start, report a static bound, touch no
        # nodes.  Large instances use this to assert warm-start dominance.
        return BnBResult(
            "bounded" if incumbent_point is not None else "infeasible",
            incumbent_point,
            None if incumbent_obj is None else public_obj(incumbent_obj),
            _static_bound(model),
            0,
        )

    tableau = ExactTableau(len(names), bounds, rows)
    node_count = 0
    limit_hit = False
    limit_bound: Optional[Fraction] = None

    def node_allowance(frontier=None) -> bool:
        nonlocal limit_hit, limit_bound
        if opts.node_limit is not None and node_count >= opts.node_limit:
            if not limit_hit and frontier:
                # every unexplored node hangs off the current path, so the
                # smallest path bound is a valid global bound at the cutoff
                limit_bound = min(frontier)
            limit_hit = True
            return False
        return True

    def frac_values():
        vals = tableau.point()
        return {j: _to_fraction(vals[j]) for j in range(len(names))}

    def accept_if_integral(values, obj):
        nonlocal incumbent_point, incumbent_obj
        j = _pick_branch(values, binaries, priorities, rule)
        if j is not None:
            return j
        if incumbent_obj is None or obj < incumbent_obj:
            incumbent_point = {names[k]: values[k] for k in range(len(names))}
            incumbent_obj = obj
        return None

    best_bound: Optional[Fraction] = None

    if opts.node_order == "depth-first":
        path_bounds: list[Fraction] = []

        def recurse():
            nonlocal node_count
            obj = _to_fraction(tableau.objective_value())
            if incumbent_obj is not None and obj >= incumbent_obj:
                return
            values = frac_values()
            branch = accept_if_integral(values, obj)
            if branch is None:
                return
            v = values[branch]
            first = 1 if v >= Fraction(1, 2) else 0
            path_bounds.append(obj)
            for choice in (first, 1 - first):
                if not node_allowance(path_bounds):
                    break
                snap = tableau.snapshot()
                tableau.change_bounds(branch, choice, choice)
                status = tableau.reoptimize()
                node_count += 1
                log.emit(
                    node=node_count,
                    depth=len(path_bounds),
                    bound=(
                        public_obj(_to_fraction(tableau.objective_value()))
                        if status == OPTIMAL
                        else None
                    ),
                    incumbent=None if incumbent_obj is None else public_obj(incumbent_obj),
                    branch=names[branch],
                    status=status,
                )
                if status == OPTIMAL:
                    recurse()
                tableau.load(snap)
            path_bounds.pop()

        status = tableau.solve_fresh(costs)
        node_count += 1
        log.emit(node=node_count, depth=0, bound=None, incumbent=None, branch=None, status=status)
        if status == OPTIMAL:
            recurse()
            if limit_hit:
                candidates = [] if limit_bound is None else [limit_bound]
                if incumbent_obj is not None:
                    candidates.append(incumbent_obj)
                best_bound = min(candidates) if candidates else None
        elif status == UNBOUNDED:
            log.close()
            raise ValueError("relaxation unbounded; bound every variable or cap the objective")
    else:
        # best-bound with FIFO tie-break; nodes rebuilt from the root basis
        status = tableau.solve_fresh(costs)
        node_count += 1
        if status == UNBOUNDED:
            log.close()
            raise ValueError("relaxation unbounded; bound every variable or cap the objective")
        heap: list = []
        counter = 0
        root_snap = tableau.snapshot()
        if status == OPTIMAL:
            heapq.heappush(heap, (_to_fraction(tableau.objective_value()), counter, []))
        while heap:
            bound, _, changes = heap[0]
            if incumbent_obj is not None and bound >= incumbent_obj:
                break  # every open node is dominated
            if not node_allowance():
                break
            heapq.heappop(heap)
            tableau.load(root_snap)
            for j, val in changes:
                tableau.change_bounds(j, val, val)
            status = tableau.reoptimize()
            node_count += 1
            if status != OPTIMAL:
                continue
            obj = _to_fraction(tableau.objective_value())
            log.emit(
                node=node_count,
                depth=len(changes),
                bound=public_obj(obj),
                incumbent=None if incumbent_obj is None else public_obj(incumbent_obj),
                branch=names[changes[-1][0]] if changes else None,
                status=status,
            )
            if incumbent_obj is not None and obj >= incumbent_obj:
                continue
            values = frac_values()
            branch = accept_if_integral(values, obj)
            if branch is None:
                continue
            v = values[branch]
            first = 1 if v >= Fraction(1, 2) else 0
            for choice in (first, 1 - first):
                counter += 1
                heapq.heappush(heap, (obj, counter, changes + [(branch, choice)]))
        if heap:
            open_bounds = [entry[0] for entry in heap]
            if incumbent_obj is not None:
                open_bounds.append(incumbent_obj)
            best_bound = min(open_bounds)

    log.close()
    exhausted = not limit_hit
    if incumbent_obj is None:
        if exhausted and best_bound is None:
            return BnBResult("infeasible", None, None, None, node_count)
        return BnBResult(
            "bounded", None, None, None if best_bound is None else public_obj(best_bound), node_count
        )
    proven = exhausted and best_bound is None
    proven = proven or (best_bound is not None and best_bound >= incumbent_obj)
    if proven:
        return BnBResult(
            "optimal",
            incumbent_point,
            public_obj(incumbent_obj),
            public_obj(incumbent_obj),
            node_count,
        )
    return BnBResult(
        "bounded",
        incumbent_point,
        public_obj(incumbent_obj),
        None if best_bound is None else public_obj(best_bound),
        node_count,
    )


def _static_bound(model: MBLPModel) -> Optional[Fraction]:
    inst = model.metadata.get("instance")
    if inst is None or not model.metadata.get("strip"):
        return None
    params = derive_parameters(inst)
    return max(
        params.lb[(o.id, "y")] + o.dim("y") / 2 + o.clear_plus("y") for o in inst.objects
    )


# ---------------------------------------------------------------------------
# Warm starts from layouts


def layout_assignment(model: MBLPModel, sol: PackingSolution) -> Optional[dict[str, Fraction]]:
    """Full variable assignment matching a valid layout, or None.

    Indicator codes are picked per the precedence semantics; when
    sequence-pair rows are present the per-pair picks are searched so those
    rows hold as well (a valid layout can force the alternative disjunct).
    """
    meta = model.metadata
    inst = meta.get("instance")
    if inst is None:
        return None
    kind = meta["kind"]
    params = derive_parameters(inst)
    pairs = meta["pairs"]
    relations = {}
    for i, j in pairs:
        for k, l, s in triples(i, j):
            relations[(k, l, s)] = (
                sol.center(k, s) + params.pm[(k, l, s)] <= sol.center(l, s)
            )

    assignment: dict[str, Fraction] = {}
    for i in [o.id for o in inst.objects]:
        for s in DIRECTIONS:
            assignment[cvar(i, s)] = sol.center(i, s)
    if "h" in model.objective or any(v.name == "h" for v in model.variables):
        assignment["h"] = sol.height

    if kind == "ru":
        for i, j in pairs:
            for k, l, s in triples(i, j):
                assignment[dvar(k, l, s)] = Fraction(1 if relations[(k, l, s)] else 0)
        return assignment if _satisfies(model, assignment) else None

    choice_sets = []
    for i, j in pairs:
        sat = [t for t in triples(i, j) if relations[t]]
        if not sat:
            return None
        choice_sets.append(sat)
    seq = meta.get("options", {}).get("sequence_pair", False)
    if not seq:
        picks = [c[0] for c in choice_sets]
        assignment = _apply_picks(model, assignment, pairs, picks, kind)
        return assignment if _satisfies(model, assignment) else None
    if len(pairs) > 12:
        return None  # search space too large; caller proceeds cold
    for picks in product(*choice_sets):
        trial = _apply_picks(model, dict(assignment), pairs, list(picks), kind)
        if _satisfies(model, trial):
            return trial
    return None


def _apply_picks(model, assignment, pairs, picks, kind):
    for (i, j), pick in zip(pairs, picks):
        if kind == "su":
            for t in triples(i, j):
                assignment[dvar(*t)] = Fraction(1 if t == pick else 0)
        else:
            k, _, s = pick
            code = {
                (True, "x"): (0, 0),
                (True, "y"): (1, 0),
                (False, "x"): (1, 1),
                (False, "y"): (0, 1),
            }[(k == i, s)]
            assignment[gvar(i, j)] = Fraction(code[0])
            assignment[gvar(j, i)] = Fraction(code[1])
            if kind == "sbm":
                assignment[prodvar(i, j)] = Fraction(code[0] * code[1])
    return assignment


def _satisfies(model: MBLPModel, assignment: dict[str, Fraction]) -> bool:
    for v in model.variables:
        if v.name not in assignment:
            return False
        val = assignment[v.name]
        if v.lower is not None and val < v.lower:
            return False
        if v.upper is not None and val > v.upper:
            return False
    for row in model.rows:
        lhs = sum((c * assignment[k] for k, c in row.coeffs.items()), Fraction(0))
        if row.sense == "<=" and lhs > row.rhs:
            return False
        if row.sense == ">=" and lhs < row.rhs:
            return False
        if row.sense == "==" and lhs != row.rhs:
            return False
    return True
