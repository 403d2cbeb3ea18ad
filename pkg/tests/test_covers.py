"""Dependence-cover families, certificates, and circuit separation."""

import random
from fractions import Fraction as F

import pytest

from clearpack.formulations import BUILDERS, FormulationOptions, RowTag
from clearpack.ideal import (
    NotDeficientError,
    UnsupportedFormulationError,
    known_covers,
    relax,
    sample_pair_params,
    separate_circuit,
    verify_cover,
)
from clearpack.linalg import RatMatrix, rank
from clearpack.packing import DerivedParams


def _poly(kind, params):
    return relax(BUILDERS[kind](params, (1, 2), FormulationOptions()))


def test_family_catalogue_sizes():
    su = known_covers("su")
    assert len(su) == 4 and all(len(f.tags) == 4 for f in su)
    ru = known_covers("ru")
    assert len(ru) == 14
    assert sum(1 for f in ru if len(f.tags) == 4) == 2  # the logic families
    assert sum(1 for f in ru if len(f.tags) == 5) == 12
    sbm = known_covers("sbm")
    assert len(sbm) == 15
    assert sum(1 for f in sbm if len(f.tags) == 7) == 4  # cross-direction ones


def test_sbl_unsupported():
    with pytest.raises(UnsupportedFormulationError):
        known_covers("sbl")


def test_su_multipliers_on_counterexample(square_pair_params):
    poly = _poly("su", square_pair_params)
    fam = next(f for f in known_covers("su") if f.tags[0].index == (1, 2, "x"))
    circuit = verify_cover(poly, fam.tags)
    assert circuit is not None
    # order (lb, ub, prec, indic): multipliers 1, -1, 1, PM - (UB - LB) = -6
    assert list(circuit.multipliers) == [F(1), F(-1), F(1), F(-6)]
    assert circuit.minimal


def test_envelope_chain_combination(square_pair_params):
    # sum row minus the first-bit envelope row minus the opposite upper bound
    poly = _poly("sbm", square_pair_params)
    fam = next(f for f in known_covers("sbm") if f.name == "envelope-chain-1-2")
    circuit = verify_cover(poly, fam.tags)
    assert circuit is not None
    assert list(circuit.multipliers) == [F(1), F(-1), F(-1)]


def test_families_dependent_over_draws():
    rng = random.Random(17)
    for kind in ("su", "ru", "sbm"):
        fams = known_covers(kind)
        for _ in range(8):
            params = sample_pair_params(rng)
            poly = _poly(kind, params)
            for fam in fams:
                circuit = verify_cover(poly, fam.tags)
                assert circuit is not None, (kind, fam.name)
                assert circuit.minimal == fam.is_minimal_expected(params, 1, 2), (
                    kind,
                    fam.name,
                )
                # exact certificate: multipliers combine the rows to zero
                vectors = [
                    poly.augmented_vector(
                        poly.ineqs[poly.row_by_tag(t)[0]]
                        if any(r.tag == t for r in poly.ineqs)
                        else next(r for r in poly.equalities if r.tag == t)
                    )
                    for t in fam.tags
                ]
                width = len(vectors[0])
                combo = [
                    sum(circuit.multipliers[i] * vectors[i][j] for i in range(len(vectors)))
                    for j in range(width)
                ]
                assert all(v == 0 for v in combo)


def _degenerate_su_params():
    # PM = UB - LB exactly in one triple: LB=1, UB=9, PM_12x = 8
    lb = {(a, s): F(1) for a in (1, 2) for s in "xy"}
    ub = {(a, s): F(9) for a in (1, 2) for s in "xy"}
    pm = {(k, l, s): F(2) for k, l in ((1, 2), (2, 1)) for s in "xy"}
    pm[(1, 2, "x")] = F(8)
    return DerivedParams.from_tables((1, 2), lb, ub, pm)


def test_su_boundary_margin_not_minimal():
    params = _degenerate_su_params()
    poly = _poly("su", params)
    fams = {f.tags[0].index: f for f in known_covers("su")}
    degenerate = verify_cover(poly, fams[(1, 2, "x")].tags)
    assert degenerate is not None and not degenerate.minimal
    assert not fams[(1, 2, "x")].is_minimal_expected(params, 1, 2)
    healthy = verify_cover(poly, fams[(2, 1, "x")].tags)
    assert healthy is not None and healthy.minimal


def test_sbm_cross_family_denominator_zero():
    # y margin zero: LB_1y + PM_12y - UB_2y = 0 (1 + 8 - 9)
    lb = {(a, s): F(1) for a in (1, 2) for s in "xy"}
    ub = {(a, s): F(9) for a in (1, 2) for s in "xy"}
    pm = {(k, l, s): F(2) for k, l in ((1, 2), (2, 1)) for s in "xy"}
    pm[(1, 2, "y")] = F(8)
    params = DerivedParams.from_tables((1, 2), lb, ub, pm)
    poly = _poly("sbm", params)
    fam = next(f for f in known_covers("sbm") if f.name == "cross-first-first")
    circuit = verify_cover(poly, fam.tags)
    # dependence still holds (the y triple collapses on its own) but the
    # seven-row family is no longer minimal, matching the stated condition
    assert circuit is not None and not circuit.minimal
    assert not fam.is_minimal_expected(params, 1, 2)


def test_ru_integral_forcing_optional():
    rng = random.Random(29)
    params = sample_pair_params(rng)
    default = {f.name for f in known_covers("ru")}
    extended = known_covers("ru", include_integral_forcing=True)
    extra = [f for f in extended if f.name not in default]
    assert len(extra) == 4 and all(len(f.tags) == 7 for f in extra)
    poly = _poly("ru", params)
    for fam in extra:
        assert verify_cover(poly, fam.tags) is not None


def test_verify_cover_independent_returns_none(square_pair_params):
    poly = _poly("su", square_pair_params)
    tags = (RowTag("lb", (1, 2, "x")), RowTag("ub", (1, 2, "x")), RowTag("indic", (1, 2, "x")))
    assert verify_cover(poly, tags) is None


# -- circuit separation --------------------------------------------------------


def test_separate_trivial_circuit():
    rows = [[F(1), F(0), F(1)], [F(2), F(0), F(2)], [F(0), F(1), F(0)]]
    support, mult = separate_circuit(rows)
    assert support == (0, 1)
    assert list(mult) == [F(1), F(-1, 2)]


def test_separate_full_rank_raises():
    rows = [[F(1), F(0)], [F(0), F(1)]]
    with pytest.raises(NotDeficientError):
        separate_circuit(rows)


def test_separate_circuit_minimality_random():
    rng = random.Random(31)
    for _ in range(20):
        n = rng.randint(3, 5)
        base = [[F(rng.randint(-3, 3)) for _ in range(n)] for _ in range(n - 1)]
        mult = [F(rng.randint(1, 2)) for _ in range(2)]
        dep = [mult[0] * base[0][j] + mult[1] * base[1][j] for j in range(n)]
        rows = base + [dep]
        if rank(RatMatrix.from_rows(rows)) == len(rows):
            continue
        support, _ = separate_circuit(rows)
        sub = [rows[i] for i in support]
        assert rank(RatMatrix.from_rows(sub)) == len(sub) - 1
        for drop in range(len(sub)):
            rest = [v for k, v in enumerate(sub) if k != drop]
            assert rank(RatMatrix.from_rows(rest)) == len(rest)


def test_separate_matches_lemma_family():
    """A known five-row dependent family plus one independent extra row is
    separated back to exactly the family."""
    rng = random.Random(37)
    params = sample_pair_params(rng)
    poly = _poly("ru", params)
    fam = next(f for f in known_covers("ru") if f.name == "refined-lowers-1-2-x")
    if not fam.is_minimal_expected(params, 1, 2):
        pytest.skip("degenerate draw")
    vectors = [
        poly.augmented_vector(poly.ineqs[poly.row_by_tag(t)[0]]) for t in fam.tags
    ]
    extra_idx, extra = poly.row_by_tag(RowTag("ub", (2, 1, "y")))
    vectors.append(poly.augmented_vector(extra))
    support, mult = separate_circuit(vectors)
    assert support == (0, 1, 2, 3, 4)


def test_separate_milp_mode_agrees():
    rows = [
        [F(1), F(2), F(0)],
        [F(0), F(1), F(1)],
        [F(2), F(4), F(0)],
        [F(1), F(0), F(3)],
    ]
    sub_support, _ = separate_circuit(rows, method="subset")
    milp_support, milp_mult = separate_circuit(rows, method="milp", big_m=F(1000))
    assert set(milp_support) == set(sub_support) == {0, 2}
    combo = [
        sum(m * rows[i][j] for m, i in zip(milp_mult, milp_support)) for j in range(3)
    ]
    assert all(v == 0 for v in combo)
