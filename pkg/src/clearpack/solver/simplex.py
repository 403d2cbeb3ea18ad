"""Exact rational simplex over bounded variables.

The tableau keeps every number as an exact rational (gmpy2.mpq when
available, stdlib Fraction otherwise; results are identical).  Rows enter as
equalities with one slack each, plus one artificial column per row for the
primal phase 1; variable bounds are handled natively so branch-and-bound can
warm start children with a dual-simplex repair after a single bound change.

Termination: the primal iterations use the generalized Bland rule (smallest
entering index; smallest blocking variable index, the entering variable's
own bound span included), which never cycles.  The dual repair uses
smallest-index rules plus bound flips and is iteration-guarded: if it stalls
on a degenerate cycle, the solve falls back to a rebuild followed by the
provably finite primal path, so every solve terminates with the exact answer.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

try:  # pragma: no cover - exercised implicitly by every test either way
    from gmpy2 import mpq as _mpq

    def _to_rat(value):
        if isinstance(value, Fraction):
            return _mpq(value.numerator, value.denominator)
        return _mpq(value)

    def _to_fraction(value) -> Fraction:
        return Fraction(int(value.numerator), int(value.denominator))

except ImportError:  # pragma: no cover
    def _to_rat(value):
        return value if isinstance(value, Fraction) else Fraction(value)

    def _to_fraction(value) -> Fraction:
        return value

_ZERO = _to_rat(0)
_ONE = _to_rat(1)

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
STALLED = "stalled"

AT_LOWER = 0
AT_UPPER = 1
FREE = 2
BASIC = 3

_PRIMAL_GUARD = 5_000_000


class SimplexStalled(RuntimeError):
    """Primal iteration guard tripped; indicates a bug, not a model property."""


@dataclass
class LPSolution:
    status: str
    point: Optional[dict[str, Fraction]]
    objective: Optional[Fraction]
    tight_rows: list[int]
    duals: Optional[list[Fraction]]
    reduced_costs: Optional[dict[str, Fraction]]


class ExactTableau:
    """Bounded-variable dense tableau with primal and dual Bland pivoting.

    Construction: `rows` is a list of (sparse dict col->value, sense, rhs)
    over structural columns 0..n-1; bounds is a list of (lo, hi) with None
    for an absent bound.  Senses: "<=", ">=", "==".  Columns are laid out
    [structural | slack | artificial].
    """

    def __init__(self, n_struct: int, bounds, rows):
        self.n = n_struct
        self.m = len(rows)
        self.spec_rows = [
            ({c: _to_rat(v) for c, v in coeffs.items()}, sense, _to_rat(rhs))
            for coeffs, sense, rhs in rows
        ]
        ncols = self.n + 2 * self.m
        self.ncols = ncols
        self.lo: list = [None] * ncols
        self.up: list = [None] * ncols
        for j, (lo, hi) in enumerate(bounds):
            self.lo[j] = None if lo is None else _to_rat(lo)
            self.up[j] = None if hi is None else _to_rat(hi)
        self.rhs: list = []
        self.T: list[list] = []
        for r, (coeffs, sense, rhs) in enumerate(self.spec_rows):
            dense = [_ZERO] * ncols
            for col, val in coeffs.items():
                dense[col] = val
            dense[self.n + r] = _ONE
            dense[self.n + self.m + r] = _ONE
            self.T.append(dense)
            self.rhs.append(rhs)
            slack = self.n + r
            if sense == "<=":
                self.lo[slack], self.up[slack] = _ZERO, None
            elif sense == ">=":
                self.lo[slack], self.up[slack] = None, _ZERO
            elif sense == "==":
                self.lo[slack], self.up[slack] = _ZERO, _ZERO
            else:
                raise ValueError(f"bad sense {sense!r}")
            art = self.n + self.m + r
            self.lo[art], self.up[art] = _ZERO, _ZERO
        self.status = [AT_LOWER] * ncols
        self.value: list = [_ZERO] * ncols
        for j in range(ncols):
            if self.lo[j] is not None:
                self.status[j], self.value[j] = AT_LOWER, self.lo[j]
            elif self.up[j] is not None:
                self.status[j], self.value[j] = AT_UPPER, self.up[j]
            else:
                self.status[j], self.value[j] = FREE, _ZERO
        self.basis: list[int] = []
        self.basic_row: dict[int, int] = {}
        for r in range(self.m):
            slack = self.n + r
            self.basis.append(slack)
            self.basic_row[slack] = r
            self.status[slack] = BASIC
        self.xB: list = [_ZERO] * self.m
        self._recompute_basics()
        self.z: list = [_ZERO] * ncols
        self.costs: list = [_ZERO] * ncols
        self._cost_spec: dict[int, object] = {}

    # -- bookkeeping --------------------------------------------------------

    def _recompute_basics(self):
        for r in range(self.m):
            acc = self.rhs[r]
            row = self.T[r]
            for j in range(self.ncols):
                if self.status[j] != BASIC:
                    v = self.value[j]
                    if v and row[j]:
                        acc -= row[j] * v
            self.xB[r] = acc

    def set_costs(self, costs: dict[int, object]):
        self.costs = [_ZERO] * self.ncols
        for j, c in costs.items():
            self.costs[j] = _to_rat(c)
        self._reprice()

    def _reprice(self):
        z = list(self.costs)
        for r, var in enumerate(self.basis):
            cb = self.costs[var]
            if cb:
                row = self.T[r]
                for j in range(self.ncols):
                    if row[j]:
                        z[j] -= cb * row[j]
        for var in self.basis:
            z[var] = _ZERO
        self.z = z

    def snapshot(self):
        return (
            [row[:] for row in self.T],
            self.xB[:],
            self.z[:],
            self.basis[:],
            dict(self.basic_row),
            self.status[:],
            self.value[:],
            self.lo[:],
            self.up[:],
            self.rhs[:],
            self.costs[:],
            dict(self._cost_spec),
        )

    def load(self, snap):
        (T, xB, z, basis, basic_row, status, value, lo, up, rhs, costs, spec) = snap
        self.T = [row[:] for row in T]
        self.xB = xB[:]
        self.z = z[:]
        self.basis = basis[:]
        self.basic_row = dict(basic_row)
        self.status = status[:]
        self.value = value[:]
        self.lo = lo[:]
        self.up = up[:]
        self.rhs = rhs[:]
        self.costs = costs[:]
        self._cost_spec = dict(spec)

    def point(self) -> list:
        vals = [None] * self.ncols
        for j in range(self.ncols):
            if self.status[j] != BASIC:
                vals[j] = self.value[j]
        for r, var in enumerate(self.basis):
            vals[var] = self.xB[r]
        return vals

    def objective_value(self):
        vals = self.point()
        return sum(
            (self.costs[j] * vals[j] for j in range(self.ncols) if self.costs[j]),
            _ZERO,
        )

    # -- modifications (used by branch-and-bound / enumeration) -------------

    def change_bounds(self, j: int, lo, up):
        self.lo[j] = None if lo is None else _to_rat(lo)
        self.up[j] = None if up is None else _to_rat(up)
        if self.status[j] == BASIC:
            return
        old = self.value[j]
        lo_j, up_j = self.lo[j], self.up[j]
        if lo_j is None and up_j is None:
            self.status[j] = FREE
            return
        # A nonbasic variable must sit exactly on a finite bound; keep the
        # previous side when it is still finite, else take the one that is.
        if self.status[j] == AT_UPPER and up_j is not None:
            new, st = up_j, AT_UPPER
        elif lo_j is not None:
            new, st = lo_j, AT_LOWER
        else:
            new, st = up_j, AT_UPPER
        self.status[j] = st
        delta = new - old
        self.value[j] = new
        if delta:
            for r in range(self.m):
                tv = self.T[r][j]
                if tv:
                    self.xB[r] -= tv * delta

    def change_rhs(self, r: int, new_rhs):
        new_rhs = _to_rat(new_rhs)
        delta = new_rhs - self.rhs[r]
        if not delta:
            return
        self.rhs[r] = new_rhs
        slack = self.n + r
        for i in range(self.m):
            tv = self.T[i][slack]
            if tv:
                self.xB[i] += tv * delta

    # -- pivoting ------------------------------------------------------------

    def _pivot(self, row: int, col: int):
        T = self.T
        prow = T[row]
        piv = prow[col]
        if piv != _ONE:
            inv = _ONE / piv
            for j in range(self.ncols):
                if prow[j]:
                    prow[j] = prow[j] * inv
        nz = [j for j in range(self.ncols) if prow[j]]
        for i in range(self.m):
            if i == row:
                continue
            ri = T[i]
            f = ri[col]
            if f:
                for j in nz:
                    ri[j] -= f * prow[j]
        zf = self.z[col]
        if zf:
            z = self.z
            for j in nz:
                z[j] -= zf * prow[j]
        out = self.basis[row]
        del self.basic_row[out]
        self.basis[row] = col
        self.basic_row[col] = row
        self.status[col] = BASIC
        self.z[col] = _ZERO
        return out

    def primal_optimize(self) -> str:
        """Generalized Bland primal simplex on a primal-feasible basis."""
        for _ in range(_PRIMAL_GUARD):
            enter = -1
            sigma = 1
            for j in range(self.ncols):
                st = self.status[j]
                if st == BASIC:
                    continue
                if self.lo[j] is not None and self.lo[j] == self.up[j]:
                    continue  # pinned: cannot move
                zj = self.z[j]
                if st == AT_LOWER and zj < _ZERO:
                    enter, sigma = j, 1
                    break
                if st == AT_UPPER and zj > _ZERO:
                    enter, sigma = j, -1
                    break
                if st == FREE and zj:
                    enter, sigma = j, (1 if zj < _ZERO else -1)
                    break
            if enter < 0:
                return OPTIMAL
            # ratio test: smallest blocking step; ties to smallest var index
            best_t = None
            best_var = None
            best_row = -1
            if self.status[enter] != FREE and self.lo[enter] is not None and self.up[enter] is not None:
                best_t = self.up[enter] - self.lo[enter]
                best_var = enter
                best_row = -1
            for r in range(self.m):
                d = self.T[r][enter] * sigma
                if not d:
                    continue
                bvar = self.basis[r]
                if d > _ZERO:
                    if self.lo[bvar] is None:
                        continue
                    t = (self.xB[r] - self.lo[bvar]) / d
                else:
                    if self.up[bvar] is None:
                        continue
                    t = (self.up[bvar] - self.xB[r]) / (-d)
                if best_t is None or t < best_t or (t == best_t and bvar < best_var):
                    best_t, best_var, best_row = t, bvar, r
            if best_t is None:
                return UNBOUNDED
            t = best_t
            if t:
                for r in range(self.m):
                    tv = self.T[r][enter]
                    if tv:
                        self.xB[r] -= sigma * t * tv
            new_val = self.value[enter] + sigma * t
            if best_row < 0:
                # bound flip, no basis change
                self.value[enter] = new_val
                self.status[enter] = AT_UPPER if sigma > 0 else AT_LOWER
                continue
            leave = self.basis[best_row]
            target = self.lo[leave] if (self.T[best_row][enter] * sigma) > _ZERO else self.up[leave]
            self.value[enter] = new_val
            self.xB[best_row] = new_val
            self._pivot(best_row, enter)
            self.value[leave] = target
            self.status[leave] = AT_LOWER if target == self.lo[leave] else AT_UPPER
        raise SimplexStalled("primal iteration guard exceeded")

    def dual_optimize(self, max_iter: int = 20_000) -> str:
        """Smallest-index dual simplex with bound flips; repairs primal
        feasibility while keeping the reduced-cost row dual feasible.
        Returns STALLED when the iteration cap is hit (degenerate cycling),
        so callers can fall back to the provably finite primal path."""
        for _ in range(max_iter):
            row = -1
            leave_var = None
            need = 0
            for r in range(self.m):
                bvar = self.basis[r]
                if self.lo[bvar] is not None and self.xB[r] < self.lo[bvar]:
                    if leave_var is None or bvar < leave_var:
                        row, leave_var, need = r, bvar, 1
                elif self.up[bvar] is not None and self.xB[r] > self.up[bvar]:
                    if leave_var is None or bvar < leave_var:
                        row, leave_var, need = r, bvar, -1
            if row < 0:
                return OPTIMAL
            trow = self.T[row]
            best = None  # (|z|, |d|) compared by cross-multiplication
            enter = -1
            for j in range(self.ncols):
                st = self.status[j]
                if st == BASIC:
                    continue
                d = trow[j]
                if not d:
                    continue
                if st == AT_LOWER:
                    if self.lo[j] is not None and self.lo[j] == self.up[j]:
                        continue
                    if not (need * d < _ZERO):
                        continue
                elif st == AT_UPPER:
                    if self.lo[j] is not None and self.lo[j] == self.up[j]:
                        continue
                    if not (need * d > _ZERO):
                        continue
                zj = self.z[j]
                abs_z = -zj if zj < _ZERO else zj
                abs_d = -d if d < _ZERO else d
                if best is None or abs_z * best[1] < best[0] * abs_d:
                    best = (abs_z, abs_d)
                    enter = j
            if enter < 0:
                return INFEASIBLE
            beta = self.lo[leave_var] if need > 0 else self.up[leave_var]
            tau = (self.xB[row] - beta) / trow[enter]
            # Bound flip: if the pivot would push the entering variable past
            # its own opposite bound, flip it there and re-examine instead.
            st_e = self.status[enter]
            if st_e == AT_LOWER and self.up[enter] is not None and tau > self.up[enter] - self.lo[enter]:
                span = self.up[enter] - self.lo[enter]
                self.status[enter] = AT_UPPER
                self.value[enter] = self.up[enter]
                if span:
                    for r in range(self.m):
                        tv = self.T[r][enter]
                        if tv:
                            self.xB[r] -= span * tv
                continue
            if st_e == AT_UPPER and self.lo[enter] is not None and tau < self.lo[enter] - self.up[enter]:
                span = self.lo[enter] - self.up[enter]
                self.status[enter] = AT_LOWER
                self.value[enter] = self.lo[enter]
                if span:
                    for r in range(self.m):
                        tv = self.T[r][enter]
                        if tv:
                            self.xB[r] -= span * tv
                continue
            if tau:
                for r in range(self.m):
                    tv = self.T[r][enter]
                    if tv:
                        self.xB[r] -= tau * tv
            new_val = self.value[enter] + tau
            self.value[enter] = new_val
            self.xB[row] = new_val
            self._pivot(row, enter)
            self.value[leave_var] = beta
            self.status[leave_var] = AT_LOWER if beta == self.lo[leave_var] else AT_UPPER
        return STALLED

    # -- solve drivers -------------------------------------------------------

    def solve_fresh(self, costs: dict[int, object]) -> str:
        """Artificial-variable primal phase 1, then primal phase 2.

        Must be called on a pristine basis (as after construction or
        rebuild); both phases use the generalized Bland rule and terminate.
        """
        self._cost_spec = dict(costs)
        phase1 = {}
        for r in range(self.m):
            slack = self.n + r
            art = self.n + self.m + r
            rho = self.xB[r]
            slo, sup = self.lo[slack], self.up[slack]
            if slo is not None and rho < slo:
                resid = rho - slo
                s_val = slo
            elif sup is not None and rho > sup:
                resid = rho - sup
                s_val = sup
            else:
                continue
            # swap: slack leaves to its nearest bound, artificial absorbs
            self.basis[r] = art
            del self.basic_row[slack]
            self.basic_row[art] = r
            self.status[art] = BASIC
            self.status[slack] = AT_LOWER if s_val == slo else AT_UPPER
            self.value[slack] = s_val
            self.xB[r] = resid
            if resid > _ZERO:
                self.lo[art], self.up[art] = _ZERO, None
                phase1[art] = _ONE
            else:
                self.lo[art], self.up[art] = None, _ZERO
                phase1[art] = -_ONE
        if phase1:
            self.set_costs(phase1)
            status = self.primal_optimize()
            if status == UNBOUNDED:
                raise SimplexStalled("phase 1 unbounded; artificial costs are sign-definite")
            if self.objective_value() != _ZERO:
                return INFEASIBLE
            for art in list(phase1):
                self.lo[art], self.up[art] = _ZERO, _ZERO
                if self.status[art] != BASIC:
                    self.status[art] = AT_LOWER
                    self.value[art] = _ZERO
        self.set_costs(costs)
        return self.primal_optimize()

    def rebuild(self):
        """Reconstruct a pristine tableau with the current rhs and current
        structural bounds (branching state), dropping all pivots."""
        bounds = [(self.lo[j], self.up[j]) for j in range(self.n)]
        rows = [
            (coeffs, sense, self.rhs[r])
            for r, (coeffs, sense, _) in enumerate(self.spec_rows)
        ]
        fresh = ExactTableau(self.n, bounds, rows)
        self.__dict__.update(fresh.__dict__)

    def reoptimize(self) -> str:
        """Re-solve after bound/rhs changes: dual repair from the current
        basis, falling back to rebuild + fresh primal solve on a stall."""
        status = self.dual_optimize()
        if status == STALLED:
            spec = dict(self._cost_spec)
            self.rebuild()
            return self.solve_fresh(spec)
        if status == INFEASIBLE:
            return INFEASIBLE
        # Bound changes can flip a nonbasic's side and leave an entering
        # candidate behind; the primal pass settles it (usually 0 pivots).
        return self.primal_optimize()


# ---------------------------------------------------------------------------
# Model-level interface


def _model_arrays(model):
    names = model.var_names()
    index = {name: j for j, name in enumerate(names)}
    bounds = [(v.lower, v.upper) for v in model.variables]
    rows = []
    for row in model.rows:
        rows.append(({index[k]: v for k, v in row.coeffs.items()}, row.sense, row.rhs))
    sense = 1 if model.objective_sense == "min" else -1
    costs = {index[k]: (v if sense == 1 else -v) for k, v in model.objective.items()}
    return names, index, bounds, rows, costs, sense


def solve_lp(model) -> LPSolution:
    """Exact optimum of the model's continuous relaxation.

    Binaries already carry [0,1] bounds, so nothing special is needed to
    relax them.  Tight rows are recomputed from the returned point, and a
    dual certificate (row duals + reduced costs) is attached.
    """
    names, index, bounds, rows, costs, sense = _model_arrays(model)
    tableau = ExactTableau(len(names), bounds, rows)
    status = tableau.solve_fresh(costs)
    if status == INFEASIBLE:
        return LPSolution(INFEASIBLE, None, None, [], None, None)
    if status == UNBOUNDED:
        return LPSolution(UNBOUNDED, None, None, [], None, None)
    vals = tableau.point()
    point = {name: _to_fraction(vals[j]) for name, j in index.items()}
    objective = _to_fraction(tableau.objective_value())
    if sense == -1:
        objective = -objective
    tight = []
    for ridx, row in enumerate(model.rows):
        lhs = sum((c * point[k] for k, c in row.coeffs.items()), Fraction(0))
        if lhs == row.rhs:
            tight.append(ridx)
    duals = []
    for r in range(tableau.m):
        y = -_to_fraction(tableau.z[tableau.n + r])
        duals.append(y if sense == 1 else -y)
    reduced = {}
    for name, j in index.items():
        zj = _to_fraction(tableau.z[j])
        reduced[name] = zj if sense == 1 else -zj
    return LPSolution(OPTIMAL, point, objective, tight, duals, reduced)
