"""Exact linear algebra: spec examples, oracle cross-checks, identity properties."""

import json
import random
from fractions import Fraction

import pytest

from koszul_rank.exact_linalg import (
    ExactMatrix,
    commutator,
    det_exact,
    det_rank_update,
    invert,
    matrix_from_json,
    matrix_to_json,
    random_int_matrix,
    random_invertible,
    rank_exact,
    schur_block_det,
)
from oracles import cofactor_det, gauss_det, gauss_rank


def test_commutator_self_is_zero():
    x = ExactMatrix([[1, 2], [3, 4]])
    assert commutator(x, x).is_zero()


def test_commutator_diagonal_matrices_commute():
    x = ExactMatrix([[1, 0], [0, 2]])
    y = ExactMatrix([[3, 0], [0, 4]])
    assert commutator(x, y).is_zero()


def test_commutator_hand_example():
    x = ExactMatrix([[0, 1], [0, 0]])
    y = ExactMatrix([[0, 0], [1, 0]])
    assert commutator(x, y) == ExactMatrix([[1, 0], [0, -1]])


def test_commutator_shape_errors():
    with pytest.raises(ValueError, match="incompatible shapes"):
        commutator(ExactMatrix([[1, 2]]), ExactMatrix([[1, 2]]))
    with pytest.raises(ValueError, match="incompatible shapes"):
        commutator(ExactMatrix.identity(2), ExactMatrix.identity(3))


def test_det_examples():
    assert det_exact(ExactMatrix.identity(5)) == 1
    assert det_exact(ExactMatrix([[1, 2], [3, 4]])) == -2
    assert det_exact(ExactMatrix([[1, 2], [2, 4]])) == 0
    with pytest.raises(ValueError):
        det_exact(ExactMatrix([[1, 2, 3], [4, 5, 6]]))


def test_det_against_oracles():
    rng = random.Random(41)
    for trial in range(60):
        n = rng.randint(1, 5)
        m = ExactMatrix(
            [
                [Fraction(rng.randint(-8, 8), rng.randint(1, 4)) for _ in range(n)]
                for _ in range(n)
            ]
        )
        expected = gauss_det([list(r) for r in m])
        assert det_exact(m) == expected, f"trial {trial}"
        if n <= 4:
            assert cofactor_det([list(r) for r in m]) == expected


def test_rank_examples():
    assert rank_exact(ExactMatrix.zeros(3, 4)) == 0
    assert rank_exact(ExactMatrix.identity(6)) == 6
    u = [1, 2, 0, -1]
    v = [3, 1, 2, 2]
    outer = ExactMatrix([[a * b for b in v] for a in u])
    assert rank_exact(outer) == 1


def test_rank_against_oracle_and_transpose():
    rng = random.Random(42)
    for _ in range(50):
        rows, cols = rng.randint(1, 6), rng.randint(1, 6)
        m = random_int_matrix(rng, rows, cols, -3, 3)
        r = rank_exact(m)
        assert r == gauss_rank([list(row) for row in m])
        assert r == rank_exact(m.transpose())


def test_elimination_fuzz_structured_inputs():
    # low-rank products, repeated/zero rows, rational entries
    rng = random.Random(321)
    for trial in range(120):
        kind = rng.randrange(4)
        rows, cols = rng.randint(1, 7), rng.randint(1, 7)
        if kind == 0:
            m = random_int_matrix(rng, rows, cols, -6, 6)
        elif kind == 1:
            r = rng.randint(0, min(rows, cols))
            if r:
                m = random_int_matrix(rng, rows, r, -4, 4) * random_int_matrix(rng, r, cols, -4, 4)
            else:
                m = ExactMatrix.zeros(rows, cols)
        elif kind == 2:
            base = random_int_matrix(rng, rows, cols, -5, 5)
            m = ExactMatrix([list(base.row(rng.randrange(rows))) for _ in range(rows)])
        else:
            m = ExactMatrix(
                [
                    [Fraction(rng.randint(-9, 9), rng.randint(1, 7)) for _ in range(cols)]
                    for _ in range(rows)
                ]
            )
        assert rank_exact(m) == gauss_rank([list(row) for row in m]), f"trial {trial}"
        if rows == cols:
            assert det_exact(m) == gauss_det([list(row) for row in m]), f"trial {trial}"


def test_det_nonzero_iff_full_rank():
    rng = random.Random(43)
    for _ in range(40):
        n = rng.randint(1, 5)
        m = random_int_matrix(rng, n, n, -2, 2)
        assert (det_exact(m) != 0) == (rank_exact(m) == n)


def test_det_multiplicative():
    rng = random.Random(44)
    for _ in range(20):
        n = rng.randint(1, 4)
        a = random_int_matrix(rng, n, n)
        b = random_int_matrix(rng, n, n)
        assert det_exact(a * b) == det_exact(a) * det_exact(b)


def test_invert_roundtrip_and_singular():
    rng = random.Random(45)
    for _ in range(20):
        n = rng.randint(1, 4)
        a = random_invertible(rng, n)
        assert a * invert(a) == ExactMatrix.identity(n)
    with pytest.raises(ValueError):
        invert(ExactMatrix([[1, 2], [2, 4]]))


def test_schur_block_det_examples():
    eye2 = ExactMatrix.identity(2)
    zero2 = ExactMatrix.zeros(2, 2)
    assert schur_block_det(eye2, zero2, zero2, eye2) == 1
    w = ExactMatrix([[2, 1], [0, 3]])
    assert schur_block_det(eye2, ExactMatrix([[1, 5], [7, 2]]), zero2, w) == det_exact(w)


def test_schur_block_det_matches_assembled():
    rng = random.Random(46)
    for trial in range(20):
        n = m = 2
        x = random_invertible(rng, n, -5, 5)
        y = random_int_matrix(rng, n, m, -5, 5)
        z = random_int_matrix(rng, m, n, -5, 5)
        w = random_int_matrix(rng, m, m, -5, 5)
        assembled = ExactMatrix.from_blocks([[x, y], [z, w]])
        assert schur_block_det(x, y, z, w) == det_exact(assembled), f"seed trial {trial}"


def test_schur_pivot_singular():
    sing = ExactMatrix([[1, 2], [2, 4]])
    blk = ExactMatrix.identity(2)
    with pytest.raises(ValueError, match="Schur pivot singular"):
        schur_block_det(sing, blk, blk, blk)


def test_det_rank_update_examples():
    a = ExactMatrix([[2, 1, 0], [0, 1, 4], [1, 0, 3]])
    zero = ExactMatrix.zeros(3, 2)
    assert det_rank_update(a, zero, zero) == det_exact(a)
    e1 = ExactMatrix([[1], [0], [0]])
    assert det_rank_update(ExactMatrix.identity(3), e1, e1) == 2


def test_det_rank_update_matches_direct():
    rng = random.Random(47)
    for trial in range(20):
        a = random_invertible(rng, 3, -5, 5)
        u = random_int_matrix(rng, 3, 2, -5, 5)
        v = random_int_matrix(rng, 3, 2, -5, 5)
        assert det_rank_update(a, u, v) == det_exact(a + u * v.transpose()), f"trial {trial}"


def test_matrix_json_roundtrip():
    m = ExactMatrix([[Fraction(1, 2), 3], [Fraction(-7, 5), 0]])
    obj = matrix_to_json(m)
    assert obj["entries"][0][0] == "1/2"
    assert matrix_from_json(json.loads(json.dumps(obj))) == m
    with pytest.raises(ValueError):
        matrix_from_json({"rows": 2, "cols": 2, "entries": [["1", "2"]]})
