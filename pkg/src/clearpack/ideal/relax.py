"""Continuous relaxations of the pairwise models as explicit row polytopes.

Each relaxation keeps exactly the canonical row set for its formulation:
dynamic bound rows, precedence rows, the logic rows, nonnegativity of the
indicators (upper bounds only where not already implied), static center
bounds where the formulation carries them, and the product variable's
envelope rows.  Redundant indicator upper bounds are omitted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from ..formulations import (
    LinearRow,
    MBLPModel,
    RowTag,
    cvar,
    dvar,
    gvar,
    prodvar,
    triples,
)


@dataclass(frozen=True)
class RelaxationPolytope:
    """Inequalities + equalities over an ordered variable list; the binary
    block records which variables the penalty ranges over."""

    var_names: tuple[str, ...]
    binary_names: tuple[str, ...]
    ineqs: tuple[LinearRow, ...]
    equalities: tuple[LinearRow, ...]
    metadata: dict = field(default_factory=dict)

    @property
    def m(self) -> int:
        return len(self.var_names) - len(self.binary_names)

    @property
    def n(self) -> int:
        return len(self.binary_names)

    def row_by_tag(self, tag: RowTag) -> tuple[int, LinearRow]:
        for idx, row in enumerate(self.ineqs):
            if row.tag == tag:
                return idx, row
        raise KeyError(tag)

    def augmented_vector(self, row: LinearRow) -> list[Fraction]:
        """Natural-orientation coefficient vector with the rhs appended."""
        vec = [row.coeffs.get(name, Fraction(0)) for name in self.var_names]
        vec.append(row.rhs)
        return vec


def relax(model: MBLPModel) -> RelaxationPolytope:
    """Relaxation polytope of a pairwise model built without enhancements."""
    meta = model.metadata
    kind = meta["kind"]
    pairs = meta["pairs"]
    if len(pairs) != 1:
        raise ValueError("relaxations are defined pairwise; build the model for one pair")
    if meta.get("options", {}).get("static_bounds") and kind != "sbl":
        raise ValueError("relax the canonical dynamic-bound form, not the static variant")
    if meta.get("options", {}).get("sequence_pair"):
        raise ValueError("sequence-pair rows are not part of the pairwise relaxation")
    i, j = pairs[0]

    ineqs = [r for r in model.rows if r.sense != "=="]
    equalities = [r for r in model.rows if r.sense == "=="]
    # Reporting order: c block (direction-major, as in the counterexample
    # matrix), then the indicator block, then auxiliaries.
    centers = [cvar(a, s) for s in ("x", "y") for a in (i, j)]
    aux: list[str] = []

    if kind in ("su", "ru"):
        binaries = [dvar(*t) for t in triples(i, j)]
        for t in triples(i, j):
            ineqs.append(
                LinearRow({dvar(*t): Fraction(1)}, ">=", Fraction(0), RowTag("indic", t))
            )
        # indicator <= 1 rows are implied (by the at-most-one or the
        # exactly-one logic row) and omitted, as in the explicit relaxations.
    elif kind == "sbl":
        binaries = [gvar(i, j), gvar(j, i)]
        for a in (i, j):
            for s in ("x", "y"):
                desc = model.var(cvar(a, s))
                ineqs.append(
                    LinearRow(
                        {cvar(a, s): Fraction(1)}, ">=", desc.lower, RowTag("sbnd", (a, s, "lo"))
                    )
                )
                ineqs.append(
                    LinearRow(
                        {cvar(a, s): Fraction(1)}, "<=", desc.upper, RowTag("sbnd", (a, s, "hi"))
                    )
                )
        for k, l in ((i, j), (j, i)):
            ineqs.append(
                LinearRow({gvar(k, l): Fraction(1)}, ">=", Fraction(0), RowTag("dbminus", (k, l)))
            )
            ineqs.append(
                LinearRow({gvar(k, l): Fraction(1)}, "<=", Fraction(1), RowTag("dbplus", (k, l)))
            )
    elif kind == "sbm":
        binaries = [gvar(i, j), gvar(j, i)]
        aux = [prodvar(i, j)]
        for k, l in ((i, j), (j, i)):
            ineqs.append(
                LinearRow({gvar(k, l): Fraction(1)}, ">=", Fraction(0), RowTag("dbminus", (k, l)))
            )
            ineqs.append(
                LinearRow({gvar(k, l): Fraction(1)}, "<=", Fraction(1), RowTag("dbplus", (k, l)))
            )
        ineqs.append(
            LinearRow({prodvar(i, j): Fraction(1)}, ">=", Fraction(0), RowTag("auxlb", (i, j)))
        )
    else:
        raise ValueError(f"unknown formulation kind {kind!r}")

    var_order = centers + binaries + aux
    return RelaxationPolytope(
        tuple(var_order),
        tuple(binaries),
        tuple(ineqs),
        tuple(equalities),
        metadata={"kind": kind, "pair": (i, j)},
    )
