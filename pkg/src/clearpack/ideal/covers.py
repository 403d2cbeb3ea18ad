"""Known dependence-cover families and exact certificate verification.

A cover is a set of relaxation rows that cannot all be tight at a genuine
extreme point because they are linearly dependent (as augmented rows).
Families below are closed-form per formulation; every instantiation is
certified here by computing exact nullspace multipliers, and minimality is
decided by removing one row at a time.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from ..formulations import RowTag, triples
from ..linalg import RatMatrix, nullspace_vector, rank
from ..packing import DerivedParams
from .relax import RelaxationPolytope


class UnsupportedFormulationError(ValueError):
    """No cover family catalogue for this kind (the linear binary embedding
    is refuted by counterexample instead)."""


@dataclass(frozen=True)
class CoverFamily:
    formulation: str
    name: str
    tags: tuple[RowTag, ...]
    # Exact minimality predicate over the instantiating parameters, or None
    # when the family is minimal unconditionally.
    minimal_when: Optional[Callable[[DerivedParams, int, int], bool]] = None

    def is_minimal_expected(self, params: DerivedParams, i: int, j: int) -> bool:
        if self.minimal_when is None:
            return True
        return self.minimal_when(params, i, j)


@dataclass(frozen=True)
class Circuit:
    tags: tuple[RowTag, ...]
    multipliers: tuple[Fraction, ...]
    minimal: bool


def _margin(params: DerivedParams, k: int, l: int, s: str) -> Fraction:
    # The slack of the idealness margin: zero exactly on the degenerate edge.
    return params.lb[(k, s)] + params.pm[(k, l, s)] - params.ub[(l, s)]


def known_covers(kind: str, i: int = 1, j: int = 2, include_integral_forcing: bool = False):
    """Cover families for the pair (i, j), as row-tag tuples."""
    fams: list[CoverFamily] = []
    if kind == "su":
        for k, l, s in triples(i, j):
            fams.append(
                CoverFamily(
                    "su",
                    f"unary-slack-{k}-{l}-{s}",
                    (
                        RowTag("lb", (k, l, s)),
                        RowTag("ub", (k, l, s)),
                        RowTag("prec", (k, l, s)),
                        RowTag("indic", (k, l, s)),
                    ),
                    lambda p, a, b, k=k, l=l, s=s: _margin(p, k, l, s) != 0,
                )
            )
    elif kind == "ru":
        for s, s_other in (("x", "y"), ("y", "x")):
            fams.append(
                CoverFamily(
                    "ru",
                    f"refined-logic-{s}",
                    (
                        RowTag("disj", (i, j)),
                        RowTag("tight", (i, j, s)),
                        RowTag("indic", (i, j, s_other)),
                        RowTag("indic", (j, i, s_other)),
                    ),
                    None,
                )
            )
        for k, l, s in triples(i, j):
            fams.append(
                CoverFamily(
                    "ru",
                    f"refined-lowers-{k}-{l}-{s}",
                    (
                        RowTag("lb", (k, l, s)),
                        RowTag("lb", (l, k, s)),
                        RowTag("prec", (k, l, s)),
                        RowTag("tight", (i, j, s)),
                        RowTag("indic", (l, k, s)),
                    ),
                    lambda p, a, b, k=k, l=l, s=s: _margin(p, l, k, s) != 0,
                )
            )
            fams.append(
                CoverFamily(
                    "ru",
                    f"refined-window-{k}-{l}-{s}",
                    (
                        RowTag("lb", (k, l, s)),
                        RowTag("ub", (k, l, s)),
                        RowTag("prec", (k, l, s)),
                        RowTag("tight", (i, j, s)),
                        RowTag("indic", (k, l, s)),
                    ),
                    lambda p, a, b, k=k, l=l, s=s: _margin(p, k, l, s) != 0,
                )
            )
            fams.append(
                CoverFamily(
                    "ru",
                    f"refined-uppers-{k}-{l}-{s}",
                    (
                        RowTag("ub", (k, l, s)),
                        RowTag("ub", (l, k, s)),
                        RowTag("prec", (k, l, s)),
                        RowTag("tight", (i, j, s)),
                        RowTag("indic", (l, k, s)),
                    ),
                    lambda p, a, b, k=k, l=l, s=s: _margin(p, l, k, s) != 0,
                )
            )
        if include_integral_forcing:
            # Seven-row collection that forces integral indicator values when
            # tight; dependence must be re-verified at the data before use.
            for k, l, s in triples(i, j):
                s_other = "y" if s == "x" else "x"
                fams.append(
                    CoverFamily(
                        "ru",
                        f"refined-integral-{k}-{l}-{s}",
                        (
                            RowTag("lb", (k, l, s)),
                            RowTag("ub", (k, l, s)),
                            RowTag("prec", (k, l, s)),
                            RowTag("disj", (i, j)),
                            RowTag("indic", (i, j, s_other)),
                            RowTag("indic", (j, i, s_other)),
                            RowTag("indic", (k, l, s)),
                        ),
                        None,
                    )
                )
    elif kind == "sbm":
        mc_sum = RowTag("mccormick", ("sum", i, j))
        mc_first = RowTag("mccormick", ("first", i, j))
        mc_second = RowTag("mccormick", ("second", i, j))
        db_plus = {(i, j): RowTag("dbplus", (i, j)), (j, i): RowTag("dbplus", (j, i))}
        db_minus = {(i, j): RowTag("dbminus", (i, j)), (j, i): RowTag("dbminus", (j, i))}
        mc12 = {(i, j): mc_first, (j, i): mc_second}

        def sb3(k, l, s):
            return (RowTag("lb", (k, l, s)), RowTag("ub", (k, l, s)), RowTag("prec", (k, l, s)))

        for k, l in ((i, j), (j, i)):
            fams.append(
                CoverFamily(
                    "sbm",
                    f"envelope-chain-{k}-{l}",
                    (mc_sum, mc12[(k, l)], db_plus[(l, k)]),
                    None,
                )
            )
        fams.append(CoverFamily("sbm", "first-x-sum", sb3(i, j, "x") + (mc_sum,), None))
        fams.append(
            CoverFamily("sbm", "first-x-left", sb3(i, j, "x") + (mc_first, db_plus[(j, i)]), None)
        )
        fams.append(
            CoverFamily("sbm", "first-x-right", sb3(i, j, "x") + (mc_second, db_plus[(i, j)]), None)
        )
        fams.append(CoverFamily("sbm", "first-y-prod", sb3(i, j, "y") + (mc_first,), None))
        fams.append(
            CoverFamily("sbm", "first-y-sum", sb3(i, j, "y") + (mc_sum, db_plus[(j, i)]), None)
        )
        fams.append(
            CoverFamily("sbm", "second-x-left", sb3(j, i, "x") + (mc_first, db_minus[(i, j)]), None)
        )
        fams.append(
            CoverFamily("sbm", "second-x-right", sb3(j, i, "x") + (mc_second, db_minus[(j, i)]), None)
        )
        fams.append(CoverFamily("sbm", "second-y-prod", sb3(j, i, "y") + (mc_second,), None))
        fams.append(
            CoverFamily("sbm", "second-y-sum", sb3(j, i, "y") + (mc_sum, db_plus[(i, j)]), None)
        )

        # Seven-row cross-direction families; minimal exactly when both
        # direction margins (the closed-form multiplier's denominator and the
        # x residual's scale) are nonzero.
        fams.append(
            CoverFamily(
                "sbm",
                "cross-first-first",
                sb3(i, j, "x") + sb3(i, j, "y") + (db_plus[(j, i)],),
                lambda p, a, b: _margin(p, a, b, "y") != 0 and _margin(p, a, b, "x") != 0,
            )
        )
        fams.append(
            CoverFamily(
                "sbm",
                "cross-first-second",
                sb3(i, j, "x") + sb3(j, i, "y") + (db_plus[(i, j)],),
                lambda p, a, b: _margin(p, b, a, "y") != 0 and _margin(p, a, b, "x") != 0,
            )
        )
        fams.append(
            CoverFamily(
                "sbm",
                "cross-second-first",
                sb3(j, i, "x") + sb3(i, j, "y") + (db_minus[(i, j)],),
                lambda p, a, b: _margin(p, a, b, "y") != 0 and _margin(p, b, a, "x") != 0,
            )
        )
        fams.append(
            CoverFamily(
                "sbm",
                "cross-second-second",
                sb3(j, i, "x") + sb3(j, i, "y") + (db_minus[(j, i)],),
                lambda p, a, b: _margin(p, b, a, "y") != 0 and _margin(p, b, a, "x") != 0,
            )
        )
    elif kind == "sbl":
        raise UnsupportedFormulationError(
            "no cover catalogue for the linear binary embedding; it has a fractional-vertex counterexample"
        )
    else:
        raise ValueError(f"unknown formulation kind {kind!r}")
    return fams


def verify_cover(poly: RelaxationPolytope, tags) -> Optional[Circuit]:
    """Exact dependence certificate for the tagged rows, or None.

    The returned multipliers combine the natural-orientation augmented rows
    to zero, normalized so the first nonzero multiplier is 1.  `minimal` is
    True when every proper subset is independent.
    """
    vectors = []
    for tag in tags:
        row = _find_row(poly, tag)
        vectors.append(poly.augmented_vector(row))
    matrix = RatMatrix.from_rows(vectors)
    multipliers = nullspace_vector(matrix)
    if multipliers is None:
        return None
    size = len(vectors)
    full_rank = rank(matrix)
    minimal = full_rank == size - 1
    if minimal:
        for drop in range(size):
            sub = [v for idx, v in enumerate(vectors) if idx != drop]
            if rank(RatMatrix.from_rows(sub)) < size - 1:
                minimal = False
                break
    return Circuit(tuple(tags), tuple(multipliers), minimal)


def _find_row(poly: RelaxationPolytope, tag: RowTag):
    for row in poly.ineqs:
        if row.tag == tag:
            return row
    for row in poly.equalities:
        if row.tag == tag:
            return row
    raise KeyError(tag)
