"""Mixed-binary model builders for the pairwise non-overlap disjunction.

Four embeddings are provided: two unary ones driven by one indicator per
ordered pair and direction (with a refined variant whose precedence row reads
two indicators), and two binary ones that encode the four disjuncts on two
bits via a reflective Gray code, either with the linear comparison function
(plus static center bounds) or with its multilinear correction linearized
through the product variable and its envelope rows.

All coefficients are exact rationals.  Builders are pure; models are plain
data and never mutated in place.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import permutations
from typing import NamedTuple, Optional, Sequence

from .linalg import rat
from .packing import DIRECTIONS, DerivedParams, Instance, derive_parameters

UNARY_KINDS = ("su", "ru")
BINARY_KINDS = ("sbl", "sbm")
ALL_KINDS = UNARY_KINDS + BINARY_KINDS


class NotApplicableError(ValueError):
    """Raised for enhancements that require more objects than the model has."""


class RowTag(NamedTuple):
    family: str  # lb | ub | prec | disj | tight | mccormick | height | seqpair
    index: tuple


@dataclass(frozen=True)
class VariableDescriptor:
    name: str
    kind: str  # "continuous" | "binary"
    lower: Optional[Fraction] = None
    upper: Optional[Fraction] = None
    branch_priority: Optional[Fraction] = None


@dataclass(frozen=True)
class LinearRow:
    coeffs: dict[str, Fraction]
    sense: str  # "<=" | ">=" | "=="
    rhs: Fraction
    tag: RowTag

    def __post_init__(self):
        object.__setattr__(
            self, "coeffs", {k: v for k, v in self.coeffs.items() if v != 0}
        )


@dataclass(frozen=True)
class MBLPModel:
    variables: tuple[VariableDescriptor, ...]
    rows: tuple[LinearRow, ...]
    objective_sense: str = "min"
    objective: dict[str, Fraction] = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def var_names(self) -> list[str]:
        return [v.name for v in self.variables]

    def var(self, name: str) -> VariableDescriptor:
        for v in self.variables:
            if v.name == name:
                return v
        raise KeyError(name)

    def binary_names(self) -> list[str]:
        return [v.name for v in self.variables if v.kind == "binary"]

    def count_family(self, *families: str) -> int:
        return sum(1 for r in self.rows if r.tag.family in families)

    def family_counts(self) -> dict[str, int]:
        """Constraint-family sizes: precedence / bounds / logic rows."""
        return {
            "precedence": self.count_family("prec"),
            "bounds": self.count_family("lb", "ub"),
            "logic": self.count_family("disj", "tight", "mccormick"),
        }

    def to_json(self) -> str:
        payload = {
            "objective_sense": self.objective_sense,
            "objective": {k: str(v) for k, v in sorted(self.objective.items())},
            "variables": [
                {
                    "name": v.name,
                    "kind": v.kind,
                    "lower": None if v.lower is None else str(v.lower),
                    "upper": None if v.upper is None else str(v.upper),
                    "priority": None if v.branch_priority is None else str(v.branch_priority),
                }
                for v in self.variables
            ],
            "rows": [
                {
                    "coeffs": {k: str(v) for k, v in sorted(r.coeffs.items())},
                    "sense": r.sense,
                    "rhs": str(r.rhs),
                    "tag": [r.tag.family, list(r.tag.index)],
                }
                for r in self.rows
            ],
            "metadata": {k: v for k, v in self.metadata.items() if k != "instance"},
        }
        return json.dumps(payload, indent=2, default=str) + "\n"


@dataclass(frozen=True)
class FormulationOptions:
    static_bounds: bool = False
    sequence_pair: bool = False
    branch_priorities: bool = False


def cvar(i: int, s: str) -> str:
    return f"c_{i}_{s}"


def dvar(k: int, l: int, s: str) -> str:
    return f"d_{k}_{l}_{s}"


def gvar(k: int, l: int) -> str:
    return f"g_{k}_{l}"


def prodvar(i: int, j: int) -> str:
    return f"D_{i}_{j}"


def triples(i: int, j: int) -> list[tuple[int, int, str]]:
    """The four ordered (k, l, s) combinations for a pair, fixed order."""
    return [(i, j, "x"), (j, i, "x"), (i, j, "y"), (j, i, "y")]


# ---------------------------------------------------------------------------
# Boolean comparison functions on two-bit codes


@dataclass(frozen=True)
class AffineForm:
    """const + sum coeff[name] * var[name], exact."""

    const: Fraction
    coeffs: dict[str, Fraction]

    def evaluate(self, values: dict[str, Fraction]) -> Fraction:
        return self.const + sum(
            (c * values[name] for name, c in self.coeffs.items()), Fraction(0)
        )


GRAY_CODES = {
    # (k-is-first-of-pair, s) -> two-bit code; pair order (i, j) with i < j.
    (True, "x"): (0, 0),
    (True, "y"): (1, 0),
    (False, "x"): (1, 1),
    (False, "y"): (0, 1),
}


def gray_code(i: int, j: int, k: int, s: str) -> tuple[int, int]:
    return GRAY_CODES[(k == min(i, j), s)]


def bcf_bar(a: tuple[int, int], b) -> "Fraction | AffineForm":
    """One-norm comparison of a fixed code against a bit pair.

    With numeric b returns the exact value a1+a2-2a1b1-2a2b2+b1+b2; with a
    pair of variable names returns the reduced affine form.
    """
    a1, a2 = (Fraction(v) for v in a)
    if _symbolic(b):
        n1, n2 = b
        return AffineForm(a1 + a2, {n1: 1 - 2 * a1, n2: 1 - 2 * a2})
    b1, b2 = (rat(v) for v in b)
    return a1 + a2 - 2 * a1 * b1 - 2 * a2 * b2 + b1 + b2


def bcf_tilde(a: tuple[int, int], b, delta) -> "Fraction | AffineForm":
    """Comparison with the double-mismatch case subtracted, linear in
    (b1, b2, delta) once the bit product is replaced by the delta variable."""
    a1, a2 = (Fraction(v) for v in a)
    if _symbolic(b):
        n1, n2 = b
        form = {n1: Fraction(1), n2: Fraction(1), delta: Fraction(-1)}
        const = Fraction(0)

        def add(scale, c, d1, d2, dd):
            nonlocal const
            if scale == 0:
                return
            const += scale * c
            form[n1] += scale * d1
            form[n2] += scale * d2
            form[delta] += scale * dd

        add(a1 * (1 - a2), 1, -2, -1, 2)
        add((1 - a1) * a2, 1, -1, -2, 2)
        add(a1 * a2, 1, -1, -1, 0)
        return AffineForm(const, {k: v for k, v in form.items() if v != 0})
    b1, b2 = (rat(v) for v in b)
    dval = rat(delta)
    return (
        b1
        + b2
        - dval
        + a1 * (1 - a2) * (1 - 2 * b1 - b2 + 2 * dval)
        + (1 - a1) * a2 * (1 - b1 - 2 * b2 + 2 * dval)
        + a1 * a2 * (1 - b1 - b2)
    )


def _symbolic(b) -> bool:
    return isinstance(b[0], str)


# ---------------------------------------------------------------------------
# Shared row pieces


def _normalize_pairs(params: DerivedParams, pair_or_all) -> list[tuple[int, int]]:
    if pair_or_all == "all" or pair_or_all is None:
        return params.pairs()
    if isinstance(pair_or_all, tuple) and len(pair_or_all) == 2 and isinstance(pair_or_all[0], int):
        return [pair_or_all]
    return list(pair_or_all)


def _center_descriptors(
    params: DerivedParams, ids: Sequence[int], static: bool
) -> list[VariableDescriptor]:
    out = []
    for i in ids:
        for s in DIRECTIONS:
            lo = params.lb[(i, s)] if static else None
            hi = params.ub[(i, s)] if static else None
            out.append(VariableDescriptor(cvar(i, s), "continuous", lo, hi))
    return out


def _pair_ids(pairs: list[tuple[int, int]]) -> list[int]:
    seen: list[int] = []
    for i, j in pairs:
        for v in (i, j):
            if v not in seen:
                seen.append(v)
    return sorted(seen)


def _unary_bound_rows(params: DerivedParams, k: int, l: int, s: str) -> list[LinearRow]:
    lb_l, lb_k = params.lb[(l, s)], params.lb[(k, s)]
    ub_k, ub_l = params.ub[(k, s)], params.ub[(l, s)]
    pm = params.pm[(k, l, s)]
    lb_row = LinearRow(
        {cvar(l, s): Fraction(1), dvar(k, l, s): -(lb_k + pm - lb_l)},
        ">=",
        lb_l,
        RowTag("lb", (k, l, s)),
    )
    ub_row = LinearRow(
        {cvar(k, s): Fraction(1), dvar(k, l, s): -(ub_l - pm - ub_k)},
        "<=",
        ub_k,
        RowTag("ub", (k, l, s)),
    )
    return [lb_row, ub_row]


# ---------------------------------------------------------------------------
# Unary embeddings


def build_su(
    params: DerivedParams,
    pair_or_all="all",
    opts: FormulationOptions = FormulationOptions(),
) -> MBLPModel:
    """Standard unary embedding: one indicator per ordered pair/direction,
    exactly one active (equality logic row)."""
    pairs = _normalize_pairs(params, pair_or_all)
    ids = _pair_ids(pairs)
    variables = _center_descriptors(params, ids, opts.static_bounds)
    rows: list[LinearRow] = []
    for i, j in pairs:
        for k, l, s in triples(i, j):
            variables.append(VariableDescriptor(dvar(k, l, s), "binary", Fraction(0), Fraction(1)))
            if not opts.static_bounds:
                rows.extend(_unary_bound_rows(params, k, l, s))
            pm = params.pm[(k, l, s)]
            ub_k, lb_l = params.ub[(k, s)], params.lb[(l, s)]
            rows.append(
                LinearRow(
                    {
                        cvar(k, s): Fraction(1),
                        cvar(l, s): Fraction(-1),
                        dvar(k, l, s): -(lb_l - pm - ub_k),
                    },
                    "<=",
                    ub_k - lb_l,
                    RowTag("prec", (k, l, s)),
                )
            )
        rows.append(
            LinearRow(
                {dvar(k, l, s): Fraction(1) for k, l, s in triples(i, j)},
                "==",
                Fraction(1),
                RowTag("disj", (i, j)),
            )
        )
    model = MBLPModel(
        tuple(variables),
        tuple(rows),
        metadata={"kind": "su", "pairs": pairs, "ids": ids, "options": vars(opts).copy()},
    )
    return _apply_options(model, params, opts)


def build_ru(
    params: DerivedParams,
    pair_or_all="all",
    opts: FormulationOptions = FormulationOptions(),
) -> MBLPModel:
    """Refined unary embedding: two-indicator precedence rows add a third,
    spatially informative state; logic rows are two at-most-one rows per
    direction plus an at-least-one row."""
    pairs = _normalize_pairs(params, pair_or_all)
    ids = _pair_ids(pairs)
    variables = _center_descriptors(params, ids, opts.static_bounds)
    rows: list[LinearRow] = []
    for i, j in pairs:
        for k, l, s in triples(i, j):
            variables.append(VariableDescriptor(dvar(k, l, s), "binary", Fraction(0), Fraction(1)))
            if not opts.static_bounds:
                rows.extend(_unary_bound_rows(params, k, l, s))
            pm_kl = params.pm[(k, l, s)]
            pm_lk = params.pm[(l, k, s)]
            ub_k, lb_l = params.ub[(k, s)], params.lb[(l, s)]
            rows.append(
                LinearRow(
                    {
                        cvar(k, s): Fraction(1),
                        cvar(l, s): Fraction(-1),
                        dvar(k, l, s): pm_lk + pm_kl,
                        dvar(l, k, s): -(ub_k - pm_lk - lb_l),
                    },
                    "<=",
                    pm_lk,
                    RowTag("prec", (k, l, s)),
                )
            )
        for s in DIRECTIONS:
            rows.append(
                LinearRow(
                    {dvar(i, j, s): Fraction(1), dvar(j, i, s): Fraction(1)},
                    "<=",
                    Fraction(1),
                    RowTag("tight", (i, j, s)),
                )
            )
        rows.append(
            LinearRow(
                {dvar(k, l, s): Fraction(1) for k, l, s in triples(i, j)},
                ">=",
                Fraction(1),
                RowTag("disj", (i, j)),
            )
        )
    model = MBLPModel(
        tuple(variables),
        tuple(rows),
        metadata={"kind": "ru", "pairs": pairs, "ids": ids, "options": vars(opts).copy()},
    )
    return _apply_options(model, params, opts)


# ---------------------------------------------------------------------------
# Binary embeddings


def _sb_rows(
    params: DerivedParams, i: int, j: int, forms: dict[tuple[int, int, str], AffineForm]
) -> list[LinearRow]:
    rows = []
    for k, l, s in triples(i, j):
        form = forms[(k, l, s)]
        lb_k, lb_l = params.lb[(k, s)], params.lb[(l, s)]
        ub_k, ub_l = params.ub[(k, s)], params.ub[(l, s)]
        pm = params.pm[(k, l, s)]
        k_lb = lb_k + pm - lb_l
        coeffs = {cvar(l, s): Fraction(1)}
        for name, coeff in form.coeffs.items():
            coeffs[name] = coeffs.get(name, Fraction(0)) + k_lb * coeff
        rows.append(
            LinearRow(coeffs, ">=", lb_k + pm - k_lb * form.const, RowTag("lb", (k, l, s)))
        )
        k_ub = ub_l - pm - ub_k
        coeffs = {cvar(k, s): Fraction(1)}
        for name, coeff in form.coeffs.items():
            coeffs[name] = coeffs.get(name, Fraction(0)) + k_ub * coeff
        rows.append(
            LinearRow(coeffs, "<=", ub_l - pm - k_ub * form.const, RowTag("ub", (k, l, s)))
        )
        k_pr = lb_l - pm - ub_k
        coeffs = {cvar(l, s): Fraction(1), cvar(k, s): Fraction(-1)}
        for name, coeff in form.coeffs.items():
            coeffs[name] = coeffs.get(name, Fraction(0)) - k_pr * coeff
        rows.append(
            LinearRow(coeffs, ">=", pm + k_pr * form.const, RowTag("prec", (k, l, s)))
        )
    return rows


def build_sbl(
    params: DerivedParams,
    pair_or_all="all",
    opts: FormulationOptions = FormulationOptions(),
) -> MBLPModel:
    """Two-bit binary embedding with the linear comparison function; the
    centers carry static window bounds (required for validity here)."""
    pairs = _normalize_pairs(params, pair_or_all)
    ids = _pair_ids(pairs)
    # Static center bounds are part of this formulation, kept as variable
    # bounds so constraint-family counts stay (4 prec, 8 bounds, 0 logic).
    variables = _center_descriptors(params, ids, static=True)
    rows: list[LinearRow] = []
    for i, j in pairs:
        bits = (gvar(i, j), gvar(j, i))
        variables.append(VariableDescriptor(bits[0], "binary", Fraction(0), Fraction(1)))
        variables.append(VariableDescriptor(bits[1], "binary", Fraction(0), Fraction(1)))
        forms = {
            (k, l, s): bcf_bar(gray_code(i, j, k, s), bits) for k, l, s in triples(i, j)
        }
        rows.extend(_sb_rows(params, i, j, forms))
    model = MBLPModel(
        tuple(variables),
        tuple(rows),
        metadata={"kind": "sbl", "pairs": pairs, "ids": ids, "options": vars(opts).copy()},
    )
    return _apply_options(model, params, opts)


def build_sbm(
    params: DerivedParams,
    pair_or_all="all",
    opts: FormulationOptions = FormulationOptions(),
) -> MBLPModel:
    """Two-bit binary embedding with the corrected comparison function,
    linearized through the bit-product variable and its envelope rows; static
    center bounds are dropped."""
    pairs = _normalize_pairs(params, pair_or_all)
    ids = _pair_ids(pairs)
    variables = _center_descriptors(params, ids, static=opts.static_bounds)
    rows: list[LinearRow] = []
    for i, j in pairs:
        bits = (gvar(i, j), gvar(j, i))
        prod = prodvar(i, j)
        variables.append(VariableDescriptor(bits[0], "binary", Fraction(0), Fraction(1)))
        variables.append(VariableDescriptor(bits[1], "binary", Fraction(0), Fraction(1)))
        variables.append(VariableDescriptor(prod, "continuous", Fraction(0), Fraction(1)))
        forms = {
            (k, l, s): bcf_tilde(gray_code(i, j, k, s), bits, prod)
            for k, l, s in triples(i, j)
        }
        rows.extend(_sb_rows(params, i, j, forms))
        rows.append(
            LinearRow(
                {bits[0]: Fraction(1), bits[1]: Fraction(1), prod: Fraction(-1)},
                "<=",
                Fraction(1),
                RowTag("mccormick", ("sum", i, j)),
            )
        )
        rows.append(
            LinearRow(
                {bits[0]: Fraction(1), prod: Fraction(-1)},
                ">=",
                Fraction(0),
                RowTag("mccormick", ("first", i, j)),
            )
        )
        rows.append(
            LinearRow(
                {bits[1]: Fraction(1), prod: Fraction(-1)},
                ">=",
                Fraction(0),
                RowTag("mccormick", ("second", i, j)),
            )
        )
    model = MBLPModel(
        tuple(variables),
        tuple(rows),
        metadata={"kind": "sbm", "pairs": pairs, "ids": ids, "options": vars(opts).copy()},
    )
    return _apply_options(model, params, opts)


BUILDERS = {"su": build_su, "ru": build_ru, "sbl": build_sbl, "sbm": build_sbm}


def _apply_options(model: MBLPModel, params: DerivedParams, opts: FormulationOptions) -> MBLPModel:
    if opts.sequence_pair and len(model.metadata["ids"]) >= 3:
        kind = "unary" if model.metadata["kind"] in UNARY_KINDS else "binary"
        model = add_sequence_pair(model, kind)
    return model


# ---------------------------------------------------------------------------
# Enhancements


def add_sequence_pair(model: MBLPModel, kind: str, triple_set=None) -> MBLPModel:
    """Transitivity rows on the indicators.

    Unary: one row per ordered permutation of each triple and direction
    (all six orderings are valid and are instantiated, deduplicated).
    Binary: the two two-sided chains per triple, split into four rows.
    """
    ids = model.metadata["ids"]
    if triple_set is None:
        triple_set = [
            (a, b, c)
            for ai, a in enumerate(ids)
            for bi, b in enumerate(ids[ai + 1 :], ai + 1)
            for c in ids[bi + 1 :]
        ]
    if len(ids) < 3 or not triple_set:
        raise NotApplicableError("sequence-pair rows need at least three objects")
    rows = list(model.rows)
    seen = set()
    for a, b, c in triple_set:
        if kind == "unary":
            for p, q, r in permutations((a, b, c)):
                for s in DIRECTIONS:
                    key = (p, q, r, s)
                    if key in seen:
                        continue
                    seen.add(key)
                    rows.append(
                        LinearRow(
                            {
                                dvar(p, q, s): Fraction(1),
                                dvar(q, r, s): Fraction(1),
                                dvar(p, r, s): Fraction(-1),
                            },
                            "<=",
                            Fraction(1),
                            RowTag("seqpair", (p, q, r, s)),
                        )
                    )
        else:
            for chain in ((a, b, c), (c, b, a)):
                p, q, r = chain
                coeffs = {
                    gvar(p, q): Fraction(1),
                    gvar(q, r): Fraction(1),
                    gvar(p, r): Fraction(-1),
                }
                rows.append(LinearRow(coeffs, "<=", Fraction(1), RowTag("seqpair", (p, q, r, "hi"))))
                rows.append(LinearRow(coeffs, ">=", Fraction(0), RowTag("seqpair", (p, q, r, "lo"))))
    meta = dict(model.metadata)
    meta["options"] = dict(meta.get("options", {}), sequence_pair=True)
    return replace(model, rows=tuple(rows), metadata=meta)


def branching_priorities(inst: Instance, kind: str) -> dict[str, Fraction]:
    """Priority per indicator: largest for pairs of large objects with large
    clearances, nested so area dominates, then directional size, then
    clearance mass."""
    sigma_dir = {
        (o.id, s): o.clear_plus(s) + o.clear_minus(s) for o in inst.objects for s in DIRECTIONS
    }
    area = {o.id: o.area() for o in inst.objects}
    out: dict[str, Fraction] = {}
    if kind == "unary":
        for s in DIRECTIONS:
            max_sigma = max(sigma_dir[(o.id, s)] for o in inst.objects)
            max_dim = max(o.dim(s) for o in inst.objects)
            for i, j in inst.pairs():
                oi = inst.objects[i - 1]
                oj = inst.objects[j - 1]
                pr = min(sigma_dir[(i, s)], sigma_dir[(j, s)]) + (max_sigma + 1) * (
                    min(oi.dim(s), oj.dim(s)) + (max_dim + 1) * min(area[i], area[j])
                )
                out[dvar(i, j, s)] = pr
                out[dvar(j, i, s)] = pr
    elif kind == "binary":
        sigma_tot = {o.id: sigma_dir[(o.id, "x")] + sigma_dir[(o.id, "y")] for o in inst.objects}
        max_sigma = max(sigma_tot.values())
        for i, j in inst.pairs():
            pr = min(sigma_tot[i], sigma_tot[j]) + (max_sigma + 1) * min(area[i], area[j])
            out[gvar(i, j)] = pr
            out[gvar(j, i)] = pr
    else:
        raise ValueError(f"unknown priority kind {kind!r}")
    return out


def attach_priorities(model: MBLPModel, priorities: dict[str, Fraction]) -> MBLPModel:
    variables = tuple(
        replace(v, branch_priority=priorities.get(v.name, v.branch_priority))
        for v in model.variables
    )
    return replace(model, variables=variables)


# ---------------------------------------------------------------------------
# Strip packing


def build_strip_packing(
    inst: Instance, kind: str, opts: FormulationOptions = FormulationOptions()
) -> MBLPModel:
    """Minimize the strip height h with h covering every object's physical
    top plus its upper clearance; the region height acts as a hard cap."""
    if kind not in BUILDERS:
        raise ValueError(f"unknown formulation kind {kind!r}")
    params = derive_parameters(inst)
    static = opts.static_bounds or kind == "sbl"
    if inst.n >= 2:
        model = BUILDERS[kind](params, "all", opts)
        variables = list(model.variables)
        rows = list(model.rows)
        meta = dict(model.metadata)
    else:
        variables = list(_center_descriptors(params, [o.id for o in inst.objects], static))
        rows = []
        meta = {"kind": kind, "pairs": [], "ids": [o.id for o in inst.objects], "options": vars(opts).copy()}
    variables.append(VariableDescriptor("h", "continuous", Fraction(0), inst.region.height))
    for obj in inst.objects:
        rows.append(
            LinearRow(
                {"h": Fraction(1), cvar(obj.id, "y"): Fraction(-1)},
                ">=",
                obj.dim("y") / 2 + obj.clear_plus("y"),
                RowTag("height", (obj.id,)),
            )
        )
    if inst.n == 1 and not static:
        # A lone object has no pair rows; pin its window explicitly.
        for s in DIRECTIONS:
            i = inst.objects[0].id
            rows.append(LinearRow({cvar(i, s): Fraction(1)}, ">=", params.lb[(i, s)], RowTag("lb", (i, i, s))))
            rows.append(LinearRow({cvar(i, s): Fraction(1)}, "<=", params.ub[(i, s)], RowTag("ub", (i, i, s))))
    meta["strip"] = True
    model = MBLPModel(
        tuple(variables),
        tuple(rows),
        objective_sense="min",
        objective={"h": Fraction(1)},
        metadata=meta,
    )
    if opts.branch_priorities:
        pk = "unary" if kind in UNARY_KINDS else "binary"
        model = attach_priorities(model, branching_priorities(inst, pk))
    return model
