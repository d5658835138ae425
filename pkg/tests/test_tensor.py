"""Tensors, slices, decompositions, kernels, and the endomorphism lift."""

import random
from fractions import Fraction

import pytest

from koszul_rank.exact_linalg import ExactMatrix, commutator, rank_exact, random_int_matrix
from koszul_rank.tensor_core import (
    RankOneTerm,
    Tensor3,
    contract_a,
    decomposition_to_json,
    decomposition_from_json,
    left_kernel_dim,
    lift_endomorphism,
    matmul_tensor,
    slice_family,
    strassen_decomposition,
    tensor_from_json,
    tensor_to_json,
    unfold_a,
    verify_decomposition,
)
from oracles import apply_bilinear


def test_matmul_tensor_examples():
    t = matmul_tensor(1, 1, 1)
    assert t.dims == (1, 1, 1) and t.entries == {(0, 0, 0): 1}
    t = matmul_tensor(2, 2, 2)
    assert t.dims == (4, 4, 4) and t.nnz() == 8
    assert all(v == 1 for v in t.entries.values())
    t = matmul_tensor(2, 3, 2)
    assert t.dims == (6, 6, 4) and t.nnz() == 12
    with pytest.raises(ValueError, match="zero dimension"):
        matmul_tensor(2, 0, 1)


def test_matmul_tensor_evaluates_matrix_products():
    rng = random.Random(7)
    for n, l, m in [(2, 2, 2), (3, 2, 4), (3, 3, 3)]:
        t = matmul_tensor(n, l, m)
        x = [[Fraction(rng.randint(-5, 5)) for _ in range(l)] for _ in range(n)]
        y = [[Fraction(rng.randint(-5, 5)) for _ in range(m)] for _ in range(l)]
        out = apply_bilinear(t, [x[i][j] for i in range(n) for j in range(l)],
                             [y[j][k] for j in range(l) for k in range(m)])
        product = [sum(x[i][j] * y[j][k] for j in range(l)) for i in range(n) for k in range(m)]
        assert out == product


def test_contract_examples():
    t = matmul_tensor(2, 2, 2)
    zero = contract_a(t, [0, 0, 0, 0])
    assert zero.is_zero()
    ident = contract_a(t, [1, 0, 0, 1])
    assert ident == ExactMatrix.identity(4)
    assert rank_exact(ident) == 4
    single = Tensor3((1, 1, 1), {(0, 0, 0): 1})
    assert contract_a(single, [1]) == ExactMatrix([[1]])
    with pytest.raises(ValueError, match="length mismatch"):
        contract_a(t, [1, 0])


def test_contract_is_linear_in_alpha():
    rng = random.Random(8)
    t = matmul_tensor(2, 2, 2)
    for _ in range(10):
        x = [rng.randint(-5, 5) for _ in range(4)]
        y = [rng.randint(-5, 5) for _ in range(4)]
        both = contract_a(t, [a + b for a, b in zip(x, y)])
        assert both == contract_a(t, x) + contract_a(t, y)


def test_slice_family_examples():
    t = matmul_tensor(2, 2, 2)
    family = slice_family(t, [[1, 0, 0, 1], [0, 1, 0, 0], [0, 0, 1, 0]])
    assert family.p == 1
    assert rank_exact(family.slices[0]) == 4
    with pytest.raises(ValueError, match="subspace"):
        slice_family(t, [[1, 0, 0, 1], [1, 0, 0, 1], [0, 0, 1, 0]])
    simple = Tensor3((3, 2, 2), {(0, 0, 0): 1})
    basis_family = slice_family(simple, [[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert basis_family.slices[0] == ExactMatrix([[1, 0], [0, 0]])
    assert basis_family.slices[1].is_zero() and basis_family.slices[2].is_zero()


def test_verify_decomposition_unit_terms():
    t = matmul_tensor(2, 2, 2)
    terms = []
    for (i, j, k) in t.entries:
        a = [Fraction(0)] * 4
        b = [Fraction(0)] * 4
        c = [Fraction(0)] * 4
        a[i], b[j], c[k] = Fraction(1), Fraction(1), Fraction(1)
        terms.append(RankOneTerm(tuple(a), tuple(b), tuple(c)))
    assert len(terms) == 8
    assert verify_decomposition(t, terms)


def test_strassen_decomposition_is_valid():
    terms = strassen_decomposition()
    assert len(terms) == 7
    assert verify_decomposition(matmul_tensor(2, 2, 2), terms)


def test_verify_decomposition_invariances():
    t = matmul_tensor(2, 2, 2)
    terms = strassen_decomposition()
    rng = random.Random(9)
    shuffled = list(terms)
    rng.shuffle(shuffled)
    assert verify_decomposition(t, shuffled)
    lam = Fraction(5, 3)
    rescaled = [
        RankOneTerm(tuple(lam * x for x in terms[0].a), terms[0].b,
                    tuple(x / lam for x in terms[0].c))
    ] + list(terms[1:])
    assert verify_decomposition(t, rescaled)
    assert not verify_decomposition(t, terms[:6])


def test_verify_decomposition_empty_terms():
    zero = Tensor3((2, 2, 2), {})
    assert verify_decomposition(zero, [])
    assert not verify_decomposition(matmul_tensor(2, 2, 2), [])


def test_rank_one_term_rejects_zero_factor():
    with pytest.raises(ValueError):
        RankOneTerm((0, 0), (1, 0), (1, 0))


def test_left_kernel_examples():
    for n, m in [(2, 2), (2, 3), (3, 3)]:
        assert left_kernel_dim(matmul_tensor(n, n, m)) == 0
    zero = Tensor3((5, 2, 2), {})
    assert left_kernel_dim(zero) == 5
    single = Tensor3((3, 2, 2), {(0, 0, 0): 1})
    assert left_kernel_dim(single) == 2


def test_unfolding_rank_is_full_for_matmul():
    for n, l, m in [(2, 2, 2), (2, 3, 2), (3, 2, 2)]:
        assert rank_exact(unfold_a(matmul_tensor(n, l, m))) == n * l


def test_lift_endomorphism_examples():
    assert lift_endomorphism(ExactMatrix.identity(3), 2) == ExactMatrix.identity(6)
    rank1 = ExactMatrix([[1, 2], [2, 4]])
    assert rank_exact(lift_endomorphism(rank1, 3)) == 3
    with pytest.raises(ValueError):
        lift_endomorphism(ExactMatrix([[1, 2, 3], [4, 5, 6]]), 2)


def test_lift_commutator_rank_scales_by_copies():
    rng = random.Random(10)
    for trial in range(8):
        m = rng.randint(1, 3)
        a1 = random_int_matrix(rng, 2, 2)
        a2 = random_int_matrix(rng, 2, 2)
        lifted = commutator(lift_endomorphism(a1, m), lift_endomorphism(a2, m))
        assert rank_exact(lifted) == m * rank_exact(commutator(a1, a2)), f"trial {trial}"


def test_tensor_json_roundtrip():
    t = matmul_tensor(2, 3, 2)
    assert tensor_from_json(tensor_to_json(t)) == t
    obj = {"dims": [2, 2, 2], "entries": [[0, 0, 0, "1/3"], [1, 1, 1, "-2"]]}
    t2 = tensor_from_json(obj)
    assert t2.entries[(0, 0, 0)] == Fraction(1, 3)
    assert tensor_to_json(t2)["entries"][1] == [1, 1, 1, "-2"]


def test_tensor_validation():
    with pytest.raises(ValueError, match="duplicate"):
        Tensor3((2, 2, 2), [((0, 0, 0), 1), ((0, 0, 0), 2)])
    with pytest.raises(ValueError, match="out of range"):
        Tensor3((2, 2, 2), {(0, 0, 5): 1})
    t = Tensor3((2, 2, 2), {(0, 0, 0): 0})
    assert t.nnz() == 0


def test_decomposition_json_roundtrip():
    terms = strassen_decomposition()
    assert decomposition_from_json(decomposition_to_json(terms)) == terms
