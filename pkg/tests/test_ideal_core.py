"""Relaxation polytopes, extreme-point enumeration, and penalties."""

from fractions import Fraction as F

import pytest

from clearpack.formulations import (
    BUILDERS,
    FormulationOptions,
    LinearRow,
    RowTag,
)
from clearpack.ideal import (
    OutOfRangeError,
    RelaxationPolytope,
    TooManyVariablesError,
    enumerate_extreme_points,
    find_fractional_vertex,
    max_penalty,
    penalty,
    relax,
    tight_rank,
)

COUNTEREXAMPLE_MATRIX = [
    [0, 1, 0, 0, 2, 2],
    [0, 0, 0, 1, -2, 2],
    [-1, 0, 0, 0, 2, 2],
    [0, 0, -1, 0, -2, 2],
    [-1, 1, 0, 0, 10, 10],
    [0, 0, -1, 1, -10, 10],
]
COUNTEREXAMPLE_RHS = [3, 1, -7, -9, 2, -8]


def test_relax_row_counts(square_pair_params):
    expected = {"su": (16, 1, 8), "ru": (19, 0, 8), "sbm": (20, 0, 7), "sbl": (24, 0, 6)}
    for kind, (n_ineq, n_eq, n_vars) in expected.items():
        poly = relax(BUILDERS[kind](square_pair_params, (1, 2)))
        assert len(poly.ineqs) == n_ineq
        assert len(poly.equalities) == n_eq
        assert len(poly.var_names) == n_vars


def test_relax_requires_pairwise(square_pair_params):
    from clearpack.packing import derive_parameters, generate_instance

    inst = generate_instance(1, 3)
    model = BUILDERS["su"](derive_parameters(inst), "all")
    with pytest.raises(ValueError):
        relax(model)


def test_relax_rejects_static_variant(square_pair_params):
    model = BUILDERS["su"](square_pair_params, (1, 2), FormulationOptions(static_bounds=True))
    with pytest.raises(ValueError):
        relax(model)


def test_relax_blocks(square_pair_params):
    poly = relax(BUILDERS["sbm"](square_pair_params, (1, 2)))
    assert poly.m == 5 and poly.n == 2  # 4 centers + product var; 2 bits
    poly = relax(BUILDERS["su"](square_pair_params, (1, 2)))
    assert poly.m == 4 and poly.n == 4


# -- penalty -------------------------------------------------------------------


def test_penalty_values():
    names = ["a", "b", "c", "d"]
    assert penalty(dict(zip(names, [F(0), F(1), F(0), F(1)])), names) == 0
    assert penalty({"a": F(1, 2), "b": F(1, 2)}, ["a", "b"]) == 2
    assert penalty({"a": F(1, 4)}, ["a"]) == F(1, 2)


def test_penalty_out_of_range():
    with pytest.raises(OutOfRangeError):
        penalty({"a": F(3, 2)}, ["a"])


# -- enumeration ---------------------------------------------------------------


def _unit_box():
    rows = []
    for idx, name in enumerate(("y1", "y2")):
        rows.append(LinearRow({name: F(1)}, ">=", F(0), RowTag("lo", (idx,))))
        rows.append(LinearRow({name: F(1)}, "<=", F(1), RowTag("hi", (idx,))))
    return RelaxationPolytope(("y1", "y2"), ("y1", "y2"), tuple(rows), ())


def test_unit_box_vertices():
    pts = list(enumerate_extreme_points(_unit_box()))
    assert len(pts) == 4
    corners = {(ep.point["y1"], ep.point["y2"]) for ep in pts}
    assert corners == {(F(0), F(0)), (F(0), F(1)), (F(1), F(0)), (F(1), F(1))}
    assert all(ep.penalty == 0 for ep in pts)
    assert find_fractional_vertex(_unit_box()) is None


def test_cap_enforced(square_pair_params):
    poly = relax(BUILDERS["su"](square_pair_params, (1, 2)))
    with pytest.raises(TooManyVariablesError):
        list(enumerate_extreme_points(poly, cap=4))


def test_counterexample_vertex(square_pair_params):
    poly = relax(BUILDERS["sbl"](square_pair_params, (1, 2)))
    target = (F(9), F(1), F(9), F(1), F(1, 2), F(1, 2))
    witness = None
    for ep in enumerate_extreme_points(poly):
        if tuple(ep.point[n] for n in poly.var_names) == target:
            witness = ep
            break
    assert witness is not None
    assert witness.penalty == 2
    assert tight_rank(poly, witness) == 6
    # the tight dynamic rows reproduce the 6x6 proof system exactly
    order = [
        ("lb", (1, 2, "x")), ("lb", (1, 2, "y")),
        ("ub", (1, 2, "x")), ("ub", (1, 2, "y")),
        ("prec", (1, 2, "x")), ("prec", (1, 2, "y")),
    ]
    tight_tags = {poly.ineqs[i].tag for i in witness.tight_set}
    matrix = []
    rhs = []
    for fam, idx in order:
        tag = RowTag(fam, idx)
        assert tag in tight_tags
        _, row = poly.row_by_tag(tag)
        flip = -1 if row.sense == "<=" else 1
        matrix.append([flip * row.coeffs.get(n, F(0)) for n in poly.var_names])
        rhs.append(flip * row.rhs)
    assert matrix == [[F(v) for v in r] for r in COUNTEREXAMPLE_MATRIX]
    assert rhs == [F(v) for v in COUNTEREXAMPLE_RHS]


def test_every_vertex_has_full_tight_rank(square_pair_params):
    poly = relax(BUILDERS["sbm"](square_pair_params, (1, 2)))
    count = 0
    for ep in enumerate_extreme_points(poly):
        assert tight_rank(poly, ep) == len(poly.var_names)
        count += 1
    assert count > 0


def test_su_relaxation_all_integral(square_pair_params):
    # strict margins: 2 < 8, so the unary relaxation has no fractional vertex
    poly = relax(BUILDERS["su"](square_pair_params, (1, 2)))
    assert find_fractional_vertex(poly) is None
    best, _ = max_penalty(poly)
    assert best == 0


def test_sbl_max_penalty(square_pair_params):
    poly = relax(BUILDERS["sbl"](square_pair_params, (1, 2)))
    best, arg = max_penalty(poly)
    assert best == 2 and arg is not None


def test_degenerate_vertices_deduplicated():
    # square with a redundant diagonal-touching row: corners stay 4
    rows = list(_unit_box().ineqs)
    rows.append(LinearRow({"y1": F(1), "y2": F(1)}, "<=", F(2), RowTag("extra", (0,))))
    poly = RelaxationPolytope(("y1", "y2"), ("y1", "y2"), tuple(rows), ())
    pts = list(enumerate_extreme_points(poly))
    assert len(pts) == 4
    top = next(ep for ep in pts if ep.point["y1"] == 1 and ep.point["y2"] == 1)
    assert len(top.tight_set) == 3  # degenerate corner keeps its full tight set
