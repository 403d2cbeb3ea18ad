"""Exact extreme-point enumeration for small relaxation polytopes.

A vertex is a feasible point tight on a linearly independent set of
(variables)-many rows.  Enumeration walks row subsets depth-first over an
integer (denominator-cleared) elimination state; each accepted pivot reduces
every remaining candidate row once, and rows whose coefficients vanish under
the current pivots (dependent or inconsistent prefixes) are dropped on the
spot, which never loses a vertex: a superset of a dependent or inconsistent
set is never an independent tight set.  Output is a stream of deduplicated
vertices, each carrying its full tight set and fractionality penalty.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterator, Optional

from ..linalg import RatMatrix, rank
from .relax import RelaxationPolytope


class TooManyVariablesError(ValueError):
    """Polytope dimension exceeds the enumeration cap."""


class OutOfRangeError(ValueError):
    """Penalty evaluated outside [0, 1]."""


@dataclass(frozen=True)
class ExtremePoint:
    point: dict[str, Fraction]
    tight_set: tuple[int, ...]  # indices into the polytope's inequality list
    penalty: Fraction

    def fractional_binaries(self, binary_names) -> list[str]:
        return [b for b in binary_names if 0 < self.point[b] < 1]


def penalty_of_value(y: Fraction) -> Fraction:
    if not (0 <= y <= 1):
        raise OutOfRangeError(f"relaxed binary out of range: {y}")
    return 1 - abs(2 * y - 1)


def penalty(values: dict[str, Fraction], binary_names) -> Fraction:
    """Total fractionality: sum of 1 - |2y - 1| over the relaxed binaries."""
    return sum((penalty_of_value(values[b]) for b in binary_names), Fraction(0))


def _int_rows(poly: RelaxationPolytope, rows) -> list[tuple[int, ...]]:
    out = []
    for row in rows:
        vec = poly.augmented_vector(row)
        mult = 1
        for v in vec:
            mult = lcm(mult, v.denominator)
        out.append(tuple(int(v * mult) for v in vec))
    return out


def _normalize(row: tuple) -> tuple:
    g = 0
    for v in row:
        if v:
            g = gcd(g, v)
            if g == 1:
                return row
    if g > 1:
        return tuple(v // g for v in row)
    return row


def _leaf_stream(poly: RelaxationPolytope, cap: int):
    """Yields pivot stacks for every independent, consistent tight subset of
    the right size; pivot stack entries are (column, reduced row)."""
    nv = len(poly.var_names)
    if nv > cap:
        raise TooManyVariablesError(f"{nv} variables exceeds cap {cap}")
    width = nv + 1
    eq_pivots: list[tuple[int, tuple[int, ...]]] = []
    for vec in _int_rows(poly, poly.equalities):
        row = list(vec)
        for col, prow in eq_pivots:
            f = row[col]
            if f:
                p = prow[col]
                row = [row[k] * p - prow[k] * f for k in range(width)]
        lead = next((k for k in range(nv) if row[k]), None)
        if lead is None:
            if row[nv]:
                return  # inconsistent equalities: empty polytope
            continue
        eq_pivots.append((lead, _normalize(tuple(row))))
    need = nv - len(eq_pivots)

    cands = []
    for idx, vec in enumerate(_int_rows(poly, poly.ineqs)):
        row = list(vec)
        for col, prow in eq_pivots:
            f = row[col]
            if f:
                p = prow[col]
                row = [row[k] * p - prow[k] * f for k in range(width)]
        if any(row[k] for k in range(nv)):
            cands.append((idx, _normalize(tuple(row))))

    cols = range(width)

    def rec(cands, pivots, remaining):
        if remaining == 0:
            yield pivots
            return
        last = len(cands) - remaining
        for pos in range(last + 1):
            idx, row = cands[pos]
            lead = 0
            while not row[lead]:
                lead += 1
            piv = row[lead]
            new_cands = []
            for entry in cands[pos + 1 :]:
                row2 = entry[1]
                f = row2[lead]
                if f:
                    nr = tuple(row2[k] * piv - row[k] * f for k in cols)
                    for k in range(nv):
                        if nr[k]:
                            new_cands.append((entry[0], _normalize(nr)))
                            break
                else:
                    new_cands.append(entry)
            yield from rec(new_cands, pivots + ((lead, row),), remaining - 1)

    yield from rec(cands, tuple(eq_pivots), need)


def _solve_pivots(pivots, nv: int) -> list[Fraction]:
    # Reverse insertion order: each pivot row was reduced against all earlier
    # pivots, so its off-pivot entries sit only on later pivots' columns,
    # already solved by the time it is visited.
    values: dict[int, Fraction] = {}
    for col, prow in reversed(pivots):
        acc = Fraction(prow[nv])
        for k in range(nv):
            if k != col and prow[k]:
                acc -= prow[k] * values[k]
        values[col] = acc / prow[col]
    return [values[k] for k in range(nv)]


def enumerate_extreme_points(
    poly: RelaxationPolytope, cap: int = 12
) -> Iterator[ExtremePoint]:
    nv = len(poly.var_names)
    frac_rows = [(poly.augmented_vector(r), r.sense) for r in poly.ineqs]
    binaries = poly.binary_names
    bin_idx = [poly.var_names.index(b) for b in binaries]
    seen: set[tuple] = set()
    for pivots in _leaf_stream(poly, cap):
        vals = _solve_pivots(pivots, nv)
        key = tuple(vals)
        if key in seen:
            continue
        tight = []
        feasible = True
        for idx, (vec, sense) in enumerate(frac_rows):
            lhs = sum((vec[k] * vals[k] for k in range(nv) if vec[k]), Fraction(0))
            rhs = vec[nv]
            if lhs == rhs:
                tight.append(idx)
            elif (sense == "<=" and lhs > rhs) or (sense == ">=" and lhs < rhs):
                feasible = False
                break
        if not feasible:
            continue
        if any(not (0 <= vals[b] <= 1) for b in bin_idx):
            continue
        seen.add(key)
        point = {name: vals[k] for k, name in enumerate(poly.var_names)}
        yield ExtremePoint(point, tuple(tight), penalty(point, binaries))


def find_fractional_vertex(
    poly: RelaxationPolytope, cap: int = 12
) -> Optional[ExtremePoint]:
    """First vertex with a strictly fractional relaxed binary, or None.

    Same subset walk as enumerate_extreme_points, but candidates whose binary
    block is already integral are discarded before the (more expensive)
    feasibility scan; the verdict is unchanged because integral candidates
    can never witness fractionality.
    """
    nv = len(poly.var_names)
    frac_rows = [(poly.augmented_vector(r), r.sense) for r in poly.ineqs]
    binaries = poly.binary_names
    bin_idx = [poly.var_names.index(b) for b in binaries]
    seen: set[tuple] = set()
    for pivots in _leaf_stream(poly, cap):
        vals = _solve_pivots(pivots, nv)
        interesting = False
        in_range = True
        for b in bin_idx:
            v = vals[b]
            if v < 0 or v > 1:
                in_range = False
                break
            if 0 < v < 1:
                interesting = True
        if not in_range or not interesting:
            continue
        key = tuple(vals)
        if key in seen:
            continue
        seen.add(key)
        tight = []
        feasible = True
        for idx, (vec, sense) in enumerate(frac_rows):
            lhs = sum((vec[k] * vals[k] for k in range(nv) if vec[k]), Fraction(0))
            rhs = vec[nv]
            if lhs == rhs:
                tight.append(idx)
            elif (sense == "<=" and lhs > rhs) or (sense == ">=" and lhs < rhs):
                feasible = False
                break
        if not feasible:
            continue
        point = {name: vals[k] for k, name in enumerate(poly.var_names)}
        return ExtremePoint(point, tuple(tight), penalty(point, binaries))
    return None


def max_penalty(poly: RelaxationPolytope, cap: int = 12) -> tuple[Fraction, Optional[ExtremePoint]]:
    """Exhaustive maximum fractionality over all vertices."""
    best = Fraction(0)
    arg = None
    for ep in enumerate_extreme_points(poly, cap):
        if ep.penalty > best:
            best, arg = ep.penalty, ep
    return best, arg


def tight_rank(poly: RelaxationPolytope, ep: ExtremePoint) -> int:
    rows = [poly.augmented_vector(poly.ineqs[i])[:-1] for i in ep.tight_set]
    rows += [poly.augmented_vector(r)[:-1] for r in poly.equalities]
    if not rows:
        return 0
    return rank(RatMatrix.from_rows(rows))
