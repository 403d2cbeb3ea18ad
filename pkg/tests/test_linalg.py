import random
from fractions import Fraction as F

import pytest

from clearpack.linalg import (
    RatMatrix,
    SingularMatrixError,
    nullspace_vector,
    rank,
    rat,
    solve_square,
)

# The 6x6 counterexample system: rows are the two lower-bound rows, the two
# upper-bound rows, and the two precedence rows of the (1,2,x)/(1,2,y)
# triples at LB=1, UB=9, PM=2, in >= orientation over
# (c_1x, c_2x, c_1y, c_2y, g_12, g_21).
COUNTEREXAMPLE_ROWS = [
    [0, 1, 0, 0, 2, 2],
    [0, 0, 0, 1, -2, 2],
    [-1, 0, 0, 0, 2, 2],
    [0, 0, -1, 0, -2, 2],
    [-1, 1, 0, 0, 10, 10],
    [0, 0, -1, 1, -10, 10],
]
COUNTEREXAMPLE_RHS = [3, 1, -7, -9, 2, -8]
COUNTEREXAMPLE_POINT = [F(9), F(1), F(9), F(1), F(1, 2), F(1, 2)]


def test_rat_coercion():
    assert rat("3/4") == F(3, 4)
    assert rat(5) == F(5)
    with pytest.raises(TypeError):
        rat(0.5)


def test_rank_identity():
    assert rank(RatMatrix.identity(2)) == 2


def test_rank_scalar_multiple_rows():
    m = RatMatrix.from_rows([[1, 0, 1], [2, 0, 2]])
    assert m.rows == 2 and m.cols == 3
    assert rank(m) == 1


def test_rank_counterexample_matrix_full():
    assert rank(RatMatrix.from_rows(COUNTEREXAMPLE_ROWS)) == 6


def test_solve_identity():
    sol = solve_square(RatMatrix.identity(2), [3, F(-1, 2)])
    assert sol == [F(3), F(-1, 2)]


def test_solve_counterexample_point():
    sol = solve_square(RatMatrix.from_rows(COUNTEREXAMPLE_ROWS), COUNTEREXAMPLE_RHS)
    assert sol == COUNTEREXAMPLE_POINT


def test_solve_singular_raises():
    m = RatMatrix.from_rows([[1, 1], [1, 1]])
    with pytest.raises(SingularMatrixError):
        solve_square(m, [1, 2])


def test_nullspace_scalar_multiple():
    p = nullspace_vector(RatMatrix.from_rows([[1, 0], [2, 0]]))
    assert p == [F(1), F(-1, 2)]


def test_nullspace_full_rank_none():
    assert nullspace_vector(RatMatrix.identity(3)) is None


def test_nullspace_reduced_window_rows():
    # c_l >= LB_l; c_k <= UB_k; c_k - c_l <= UB_k - LB_l, as equalities in
    # (c_k, c_l) with the <= rows in >= orientation; generic rational bounds.
    lb, ub = F(7, 3), F(29, 4)
    rows = [[0, 1, lb], [-1, 0, -ub], [-1, 1, lb - ub]]
    p = nullspace_vector(RatMatrix.from_rows(rows))
    assert p == [F(1), F(1), F(-1)]
    # and the certified combination reduces to 0 = 0
    m = RatMatrix.from_rows(rows)
    combo = [
        sum(p[i] * m.row(i)[j] for i in range(3)) for j in range(3)
    ]
    assert all(v == 0 for v in combo)


def _reference_rank(rows):
    rows = [list(map(F, r)) for r in rows]
    if not rows:
        return 0
    cols = len(rows[0])
    at = 0
    r = 0
    for c in range(cols):
        piv = next((i for i in range(at, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[at], rows[piv] = rows[piv], rows[at]
        for i in range(at + 1, len(rows)):
            if rows[i][c] != 0:
                f = rows[i][c] / rows[at][c]
                for j in range(c, cols):
                    rows[i][j] -= f * rows[at][j]
        at += 1
        r += 1
    return r


def test_rank_matches_reference_and_transpose():
    rng = random.Random(5)
    for _ in range(250):
        nr, nc = rng.randint(1, 6), rng.randint(1, 6)
        rows = [
            [F(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(nc)]
            for _ in range(nr)
        ]
        if rng.random() < 0.4 and nr >= 2:
            rows[-1] = [2 * v for v in rows[rng.randrange(nr - 1)]]
        m = RatMatrix.from_rows(rows)
        assert rank(m) == _reference_rank(rows) == rank(m.transpose())


def test_solve_round_trip_random():
    rng = random.Random(11)
    for _ in range(60):
        n = rng.randint(1, 5)
        while True:
            m = RatMatrix.from_rows(
                [[F(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(n)] for _ in range(n)]
            )
            if rank(m) == n:
                break
        x = [F(rng.randint(-7, 7), rng.randint(1, 5)) for _ in range(n)]
        assert solve_square(m, m.mat_vec(x)) == x


def test_nullspace_certificate_random():
    rng = random.Random(13)
    for _ in range(60):
        nr, nc = rng.randint(2, 6), rng.randint(1, 5)
        rows = [[F(rng.randint(-3, 3)) for _ in range(nc)] for _ in range(nr - 1)]
        mult = [F(rng.randint(-2, 2)) for _ in range(nr - 1)]
        rows.append([sum(mult[i] * rows[i][j] for i in range(nr - 1)) for j in range(nc)])
        m = RatMatrix.from_rows(rows)
        p = nullspace_vector(m)
        assert p is not None and any(v != 0 for v in p)
        combo = [sum(p[i] * m.row(i)[j] for i in range(nr)) for j in range(nc)]
        assert all(v == 0 for v in combo)
        first = next(v for v in p if v != 0)
        assert first == 1
