"""Randomized support-restriction search and the staged witness pipeline.

The central primitive: a nonzero polynomial of degree d, restricted to a
coordinate subspace, stays nonzero on some support of at most d coordinates.
support_restriction_search realizes this by greedy variable elimination with
randomized nonzero testing; at the fixpoint, zeroing any remaining variable
kills the polynomial, so every monomial uses all remaining variables and the
support size is bounded by the degree.  Sampling ranges scale with
2^20 * degree so a false "identically zero" verdict is astronomically
unlikely, and every accepted step is witnessed by an exact nonzero value.

key_lemma_search chains four such searches (pipeline for p in {1, 2}):

  stage 0   det over the matrix space          -> alpha^0, support <= n
  stage 1   dets of middle-slice commutators   -> v_2..v_{2p-1}, <= n*binom(2p,p+1)
  stage 2   det([X_1, fixed X_2])              -> v_1, support <= n
  stage 3   det of the commutator grid in v_2p -> v_2p, <= n*(binom(2p,p+1)-binom(2p-2,p-1))

fixing the sampled witness after each stage.  The product structure
det(grid) = det(diagonal part) * det(Schur factors) makes the final
det != 0 automatic once every stage succeeded; the witness is re-validated
from scratch anyway.  Stage arithmetic uses adjugate-normalized slices
adj(alpha^0) * v (integer entries), which rescales each stage polynomial by a
nonzero constant without moving its zero set or degree.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .exact_linalg import (
    ExactMatrix,
    commutator,
    det_exact,
    invert,
    rank_exact,
)
from .flattening import assemble, commutator_matrix, commutator_pattern
from .tensor_core import SliceFamily


class KeyLemmaStageError(RuntimeError):
    """A pipeline stage failed its nonzero search; the message names the stage."""


@dataclass(frozen=True)
class PolynomialEvaluator:
    """A black-box polynomial: arity, a degree bound, and an exact evaluator."""

    arity: int
    degree_bound: int
    evaluate: Callable[[Sequence[int]], Fraction]


@dataclass(frozen=True)
class SupportWitness:
    support: tuple[int, ...]
    point: tuple[int, ...]
    value: Fraction


def _child_seed(seed: int, *tags: int) -> int:
    out = seed & (2**63 - 1)
    for t in tags:
        out = (out * 6364136223846793005 + t * 1442695040888963407 + 1) % (2**63)
    return out


def support_restriction_search(
    poly: PolynomialEvaluator,
    seed: int = 0,
    sample_budget: int = 4,
    stop_at: Optional[int] = None,
) -> SupportWitness:
    """Greedy support shrinking with randomized nonzero tests.

    Returns a support with an integer point (zero off the support) where the
    polynomial provably does not vanish.  By default the support is shrunk to
    a fixpoint, which the degree argument caps at degree_bound; passing
    stop_at ends the shrinking as soon as the support is that small.  The
    staged pipeline stops at its per-stage budgets rather than at minimal
    supports: inclusion-minimal supports tend to be structurally degenerate
    (for instance, all slices singular), which starves the later stages.
    Raises KeyLemmaStageError when the polynomial looks identically zero.
    """
    rng = random.Random(_child_seed(seed, 0xA11CE))
    span = max(2**20 * max(poly.degree_bound, 1), 1024)
    target = poly.degree_bound if stop_at is None else max(stop_at, poly.degree_bound)

    def sample(support: Sequence[int], budget: int) -> Optional[tuple[tuple[int, ...], Fraction]]:
        for _ in range(budget):
            point = [0] * poly.arity
            for i in support:
                point[i] = rng.randint(-span, span)
            value = poly.evaluate(point)
            if value != 0:
                return tuple(point), value
        return None

    support = list(range(poly.arity))
    found = sample(support, sample_budget * 2)
    if found is None:
        raise KeyLemmaStageError("polynomial appears identically zero (probabilistic)")
    point, value = found

    budget = sample_budget
    for _round in range(3):
        progress = True
        while progress and not (stop_at is not None and len(support) <= stop_at):
            progress = False
            order = list(support)
            rng.shuffle(order)
            for i in order:
                if stop_at is not None and len(support) <= stop_at:
                    break
                candidate = [j for j in support if j != i]
                found = sample(candidate, budget)
                if found is not None:
                    support = candidate
                    point, value = found
                    progress = True
        if len(support) <= target:
            break
        budget *= 8  # escalate before concluding the fixpoint is real
    if len(support) > target:
        raise KeyLemmaStageError(
            f"support {len(support)} exceeds degree bound {poly.degree_bound}"
        )
    return SupportWitness(tuple(support), point, value)


def shrink_witness(
    poly: PolynomialEvaluator, witness: SupportWitness, seed: int = 0
) -> SupportWitness:
    """Re-draw the witness point with small entries on the same support.

    Keeps downstream arithmetic small; every candidate is re-verified exactly,
    with the range doubling on repeated failure, and the original witness is
    the fallback.
    """
    rng = random.Random(_child_seed(seed, 0x5A11))
    span = 99
    for _ in range(24):
        point = [0] * poly.arity
        for i in witness.support:
            point[i] = rng.randint(-span, span)
        value = poly.evaluate(point)
        if value != 0:
            return SupportWitness(witness.support, tuple(point), value)
        span *= 2
    return witness


def h_value(n: int, p: int) -> int:
    """n^2 - n(2 binom(2p,p+1) - binom(2p-2,p-1) + 2); may be negative."""
    if p < 1:
        raise ValueError("p must be >= 1")
    coefficient = 2 * math.comb(2 * p, p + 1) - math.comb(2 * p - 2, p - 1) + 2
    return n * n - n * coefficient


def elementary_basis(n: int) -> list[ExactMatrix]:
    """The n^2 matrix units, row-major."""
    out = []
    for r in range(n):
        for c in range(n):
            grid = [[Fraction(0)] * n for _ in range(n)]
            grid[r][c] = Fraction(1)
            out.append(ExactMatrix(grid))
    return out


def _matrix_from_coords(coords: Sequence, basis: Sequence[ExactMatrix], n: int) -> ExactMatrix:
    grid = [[Fraction(0)] * n for _ in range(n)]
    for x, b in zip(coords, basis):
        if x:
            for i in range(n):
                row = b.row(i)
                for j in range(n):
                    if row[j]:
                        grid[i][j] += x * row[j]
    return ExactMatrix(grid)


@dataclass(frozen=True)
class NonvanishingReport:
    nonzero: bool
    witness: Optional[SliceFamily]
    trials_used: int
    seed: int
    det: Optional[Fraction]


def generic_nonvanishing(n: int, p: int, seed: int = 0, trials: int = 5) -> NonvanishingReport:
    """Sample random traceless integer slices (X_0 = Id) until det(grid) != 0."""
    if n < 2 or 2 * p + 1 > n * n:
        raise ValueError("p too large for n")
    for t in range(trials):
        rng = random.Random(_child_seed(seed, 0x6E0, t))
        xs = []
        for _ in range(2 * p):
            grid = [[Fraction(rng.randint(-9, 9)) for _ in range(n)] for _ in range(n)]
            trace = sum(grid[i][i] for i in range(n))
            grid[n - 1][n - 1] -= trace  # integer traceless sampling
            xs.append(ExactMatrix(grid))
        family = SliceFamily(p, n, n, (ExactMatrix.identity(n), *xs))
        _, numeric = commutator_matrix(family)
        value = det_exact(numeric)
        if value != 0:
            return NonvanishingReport(True, family, t + 1, seed, value)
    return NonvanishingReport(False, None, trials, seed, None)


def degree_along_line(poly: PolynomialEvaluator, seed: int = 0) -> int:
    """Degree of t -> P(x0 + t v) for a random integer line, by exact interpolation.

    Evaluates at degree_bound + 3 points; the last two verify the Newton
    interpolant, so a non-polynomial evaluator (or an understated bound) is
    detected instead of silently mismeasured.  Equals the total degree of P
    with high probability over the line choice.
    """
    rng = random.Random(_child_seed(seed, 0xDE6))
    base = [rng.randint(-9, 9) for _ in range(poly.arity)]
    direction = [rng.randint(-9, 9) for _ in range(poly.arity)]
    if not any(direction):
        direction[0] = 1
    d = poly.degree_bound
    values = [
        poly.evaluate([b + t * v for b, v in zip(base, direction)]) for t in range(d + 3)
    ]
    diffs = []
    row = [Fraction(x) for x in values[: d + 1]]
    while row:
        diffs.append(row[0])
        row = [b - a for a, b in zip(row, row[1:])]

    def newton_eval(t: int) -> Fraction:
        acc = Fraction(0)
        for k, c in enumerate(diffs):
            if c:
                acc += c * math.comb(t, k)
        return acc

    if newton_eval(d + 1) != values[d + 1] or newton_eval(d + 2) != values[d + 2]:
        raise ValueError("interpolation inconsistency: evaluator is not a polynomial of the stated degree")
    degree = 0
    for k, c in enumerate(diffs):
        if c != 0:
            degree = k
    return degree


@dataclass(frozen=True)
class KeyLemmaWitness:
    """Everything needed to replay and re-validate one pipeline run."""

    n: int
    p: int
    seed: int
    support0: tuple[int, ...]
    support1: tuple[int, ...]
    support2: tuple[int, ...]
    support3: tuple[int, ...]
    alphas: tuple[ExactMatrix, ...]
    h_achieved: int
    h_required: int
    union_size: int
    grid_det: Fraction

    def supports_union(self) -> set[int]:
        return set(self.support0) | set(self.support1) | set(self.support2) | set(self.support3)


def _support_of(matrix: ExactMatrix, basis_index: dict) -> set[int]:
    out = set()
    for i in range(matrix.rows):
        for j in range(matrix.cols):
            if matrix[i, j]:
                out.add(basis_index[(i, j)])
    return out


def validate_witness(witness: KeyLemmaWitness, basis: Sequence[ExactMatrix]) -> None:
    """Re-check every claim of a witness from scratch; raises ValueError."""
    n, p = witness.n, witness.p
    budgets = (
        n,
        n * math.comb(2 * p, p + 1),
        n,
        n * (math.comb(2 * p, p + 1) - math.comb(2 * p - 2, p - 1)),
    )
    supports = (witness.support0, witness.support1, witness.support2, witness.support3)
    for idx, (sup, cap) in enumerate(zip(supports, budgets)):
        if len(sup) > cap:
            raise ValueError(f"support {idx} has {len(sup)} > budget {cap}")
    union = witness.supports_union()
    if witness.union_size != len(union):
        raise ValueError("union size mismatch")
    if witness.h_achieved != n * n - len(union):
        raise ValueError("h_achieved mismatch")
    if witness.h_achieved < h_value(n, p):
        raise ValueError("h_achieved below the guaranteed count")
    if len(witness.alphas) != 2 * p + 1:
        raise ValueError("wrong number of alphas")
    stacked = ExactMatrix([[a[i, j] for i in range(n) for j in range(n)] for a in witness.alphas])
    if rank_exact(stacked) != 2 * p + 1:
        raise ValueError("alphas are linearly dependent")
    alpha0 = witness.alphas[0]
    det0 = det_exact(alpha0)
    if det0 == 0:
        raise ValueError("alpha^0 is singular")
    inv0 = invert(alpha0)
    slices = (ExactMatrix.identity(n),) + tuple(inv0 * a for a in witness.alphas[1:])
    family = SliceFamily(p, n, n, slices)
    _, numeric = commutator_matrix(family)
    value = det_exact(numeric)
    if value == 0:
        raise ValueError("commutator grid determinant vanishes")
    if value != witness.grid_det:
        raise ValueError("stored grid determinant does not replay")
    # every alpha must live inside the claimed supports
    coords = {}
    for idx, b in enumerate(basis):
        for i in range(n):
            for j in range(n):
                if b[i, j]:
                    coords.setdefault(idx, []).append((i, j))
    # generic basis: express each alpha in the basis and check support containment
    columns = ExactMatrix(
        [[b[i, j] for b in basis] for i in range(n) for j in range(n)]
    )
    inv_columns = invert(columns)
    stage_members = (set(witness.support0) | set(witness.support1)
                     | set(witness.support2) | set(witness.support3))
    for which, alpha in enumerate(witness.alphas):
        vec = ExactMatrix([[alpha[i, j]] for i in range(n) for j in range(n)])
        coeffs = inv_columns * vec
        used = {idx for idx in range(len(basis)) if coeffs[idx, 0] != 0}
        if not used <= stage_members:
            raise ValueError(f"alpha^{which} uses basis vectors outside the supports")


def _middle_pairs(p: int) -> list[tuple[int, int]]:
    """Distinct diagonal commutator pairs not touching index 1 or 2p."""
    grid = commutator_pattern(p)
    pairs = []
    for i in range(grid.block_rows):
        label = grid.label(i, i)
        if label.is_zero:
            continue
        a, b = label.pair
        if a in (1, 2 * p) or b in (1, 2 * p):
            continue
        if (a, b) not in pairs:
            pairs.append((a, b))
    return pairs


def key_lemma_search(
    n: int, p: int, basis: Optional[Sequence[ExactMatrix]] = None, seed: int = 0
) -> KeyLemmaWitness:
    """Run the staged pipeline and return a fully validated witness.

    Implemented for p in {1, 2}; each stage fixes the (shrunken) witness point
    of the previous one, exactly in pipeline order.  Retries the whole run a
    few times on stage failure (fresh derived seeds) before giving up.
    """
    if p not in (1, 2):
        raise NotImplementedError("pipeline implemented for p in {1, 2}")
    if n < 2:
        raise ValueError("n must be >= 2")
    if basis is None:
        basis = elementary_basis(n)
    basis = list(basis)
    if len(basis) != n * n:
        raise KeyLemmaStageError("stage P0: basis must have n^2 elements")
    stacked = ExactMatrix([[b[i, j] for i in range(n) for j in range(n)] for b in basis])
    if rank_exact(stacked) != n * n:
        raise KeyLemmaStageError("stage P0: basis does not span the matrix space")

    last_error: Optional[Exception] = None
    for attempt in range(5):
        try:
            return _run_pipeline(n, p, basis, seed, attempt)
        except KeyLemmaStageError as exc:
            last_error = exc
    raise last_error  # type: ignore[misc]


def _run_pipeline(
    n: int, p: int, basis: Sequence[ExactMatrix], seed: int, attempt: int
) -> KeyLemmaWitness:
    arity = n * n

    def build(coords: Sequence) -> ExactMatrix:
        return _matrix_from_coords(coords, basis, n)

    def stage_seed(stage: int) -> int:
        return _child_seed(seed, attempt, stage)

    # stage 0: the determinant itself
    p0 = PolynomialEvaluator(arity, n, lambda x: det_exact(build(x)))
    try:
        w0 = shrink_witness(p0, support_restriction_search(p0, stage_seed(0), stop_at=n), stage_seed(0))
    except KeyLemmaStageError as exc:
        raise KeyLemmaStageError(f"stage P0: {exc}") from None
    alpha0 = build(w0.point)
    adj0 = invert(alpha0) * det_exact(alpha0)  # integral for integral alpha0

    def normalized(coords: Sequence) -> ExactMatrix:
        return adj0 * build(coords)

    # stage 1: middle slices v_2 .. v_{2p-1}
    middles = list(range(2, 2 * p))
    fixed: dict[int, ExactMatrix] = {}
    if p == 1:
        # no middle slices exist; fix v_2 = v_2p here against a seeded
        # auxiliary matrix so the stage budget n * binom(2,2) = n is used
        rng_aux = random.Random(_child_seed(seed, attempt, 0xA0))
        aux = ExactMatrix([[rng_aux.randint(-9, 9) for _ in range(n)] for _ in range(n)])
        p1 = PolynomialEvaluator(
            arity, n, lambda x: det_exact(commutator(aux, normalized(x)))
        )
        try:
            w1 = shrink_witness(p1, support_restriction_search(p1, stage_seed(1), stop_at=n), stage_seed(1))
        except KeyLemmaStageError as exc:
            raise KeyLemmaStageError(f"stage P1: {exc}") from None
        support1 = w1.support
        fixed[2] = build(w1.point)
    else:
        pairs = _middle_pairs(p)
        slot_of = {m: s for s, m in enumerate(middles)}

        def eval_stage1(x: Sequence) -> Fraction:
            mats = {
                m: normalized(x[slot_of[m] * arity : (slot_of[m] + 1) * arity])
                for m in middles
            }
            value = Fraction(1)
            for a, b in pairs:
                value *= det_exact(commutator(mats[a], mats[b]))
                if value == 0:
                    break
            return value

        p1 = PolynomialEvaluator(len(middles) * arity, 2 * n * len(pairs), eval_stage1)
        budget1 = n * math.comb(2 * p, p + 1)
        try:
            w1 = shrink_witness(p1, support_restriction_search(p1, stage_seed(1), stop_at=budget1), stage_seed(1))
        except KeyLemmaStageError as exc:
            raise KeyLemmaStageError(f"stage P1: {exc}") from None
        used = set()
        for var in w1.support:
            used.add(var % arity)
        support1 = tuple(sorted(used))
        for m in middles:
            fixed[m] = build(w1.point[slot_of[m] * arity : (slot_of[m] + 1) * arity])

    # stage 2: v_1 against the fixed v_2
    x2_normalized = adj0 * fixed[2]
    p2 = PolynomialEvaluator(
        arity, n, lambda x: det_exact(commutator(normalized(x), x2_normalized))
    )
    try:
        w2 = shrink_witness(p2, support_restriction_search(p2, stage_seed(2), stop_at=n), stage_seed(2))
    except KeyLemmaStageError as exc:
        raise KeyLemmaStageError(f"stage P2: {exc}") from None
    fixed[1] = build(w2.point)

    # stage 3: the last slice v_2p through the full commutator grid
    if p == 1:
        support3: tuple[int, ...] = ()
    else:
        pattern = commutator_pattern(p)
        others = {i: adj0 * fixed[i] for i in range(1, 2 * p)}
        identity = ExactMatrix.identity(n)

        def eval_stage3(x: Sequence) -> Fraction:
            xs = [identity] + [others[i] for i in range(1, 2 * p)] + [normalized(x)]
            family = SliceFamily(p, n, n, tuple(xs))
            return det_exact(assemble(pattern, family))

        cap = n * (math.comb(2 * p, p + 1) - math.comb(2 * p - 2, p - 1))
        p3 = PolynomialEvaluator(arity, cap, eval_stage3)
        try:
            w3 = shrink_witness(p3, support_restriction_search(p3, stage_seed(3), stop_at=cap), stage_seed(3))
        except KeyLemmaStageError as exc:
            raise KeyLemmaStageError(f"stage P3: {exc}") from None
        support3 = w3.support
        fixed[2 * p] = build(w3.point)

    alphas = (alpha0,) + tuple(fixed[i] for i in range(1, 2 * p + 1))
    stacked = ExactMatrix([[a[i, j] for i in range(n) for j in range(n)] for a in alphas])
    if rank_exact(stacked) != 2 * p + 1:
        raise KeyLemmaStageError("final: alphas are linearly dependent")
    inv0 = invert(alpha0)
    family = SliceFamily(
        p, n, n, (ExactMatrix.identity(n),) + tuple(inv0 * a for a in alphas[1:])
    )
    _, numeric = commutator_matrix(family)
    grid_det = det_exact(numeric)
    if grid_det == 0:
        raise KeyLemmaStageError("final: commutator grid determinant vanishes")

    union = set(w0.support) | set(support1) | set(w2.support) | set(support3)
    witness = KeyLemmaWitness(
        n=n,
        p=p,
        seed=seed,
        support0=w0.support,
        support1=tuple(sorted(support1)),
        support2=w2.support,
        support3=tuple(sorted(support3)),
        alphas=alphas,
        h_achieved=n * n - len(union),
        h_required=h_value(n, p),
        union_size=len(union),
        grid_det=grid_det,
    )
    validate_witness(witness, basis)
    return witness


def skew_commutator_matrix(xs: Sequence[ExactMatrix], n: int) -> ExactMatrix:
    """The alternating 4x4 arrangement of [X_i, X_j] used by the refined p=2 audit."""
    zero = ExactMatrix.zeros(n, n)

    def c(i: int, j: int) -> ExactMatrix:
        return commutator(xs[i], xs[j])

    grid = [
        [zero, c(1, 2), c(1, 3), c(1, 4)],
        [-c(1, 2), zero, c(2, 3), c(2, 4)],
        [-c(1, 3), -c(2, 3), zero, c(3, 4)],
        [-c(1, 4), -c(2, 4), -c(3, 4), zero],
    ]
    return ExactMatrix.from_blocks(grid)


def refined_p2_degree(n: int, seed: int = 0) -> int:
    """Measured degree of det(Id + A^-1 U) for the refined p=2 block pivot.

    A = diag([[0, C12], [-C12, 0]], Id_2n) with C12 = [v1, v2] fixed from a
    seeded draw; U is the rest of the skew commutator arrangement; the degree
    is measured along a random line in the joint (v3, v4) coordinates.
    """
    rng = random.Random(_child_seed(seed, 0xF2))
    while True:
        v1 = ExactMatrix([[rng.randint(-9, 9) for _ in range(n)] for _ in range(n)])
        v2 = ExactMatrix([[rng.randint(-9, 9) for _ in range(n)] for _ in range(n)])
        c12 = commutator(v1, v2)
        if det_exact(c12) != 0:
            break
    zero = ExactMatrix.zeros(n, n)
    identity = ExactMatrix.identity(n)
    a = ExactMatrix.from_blocks(
        [
            [zero, c12, zero, zero],
            [-c12, zero, zero, zero],
            [zero, zero, identity, zero],
            [zero, zero, zero, identity],
        ]
    )
    a_inv = invert(a)
    big_identity = ExactMatrix.identity(4 * n)
    arity = n * n

    def evaluate(x: Sequence) -> Fraction:
        v3 = ExactMatrix([list(x[i * n : (i + 1) * n]) for i in range(n)])
        v4 = ExactMatrix([list(x[arity + i * n : arity + (i + 1) * n]) for i in range(n)])
        m = skew_commutator_matrix([None, v1, v2, v3, v4], n)
        return det_exact(big_identity + a_inv * (m - a))

    poly = PolynomialEvaluator(2 * arity, 6 * n, evaluate)
    return degree_along_line(poly, _child_seed(seed, 0xF3))


def reduced_diagonal_degree(n: int, p: int, seed: int = 0) -> tuple[int, int]:
    """(expected, measured) degree of the product of distinct diagonal dets.

    Expected is 2n per distinct non-excluded diagonal commutator; measured
    interpolates the product along a random line in the joint middle-slice
    coordinates.
    """
    pairs = _middle_pairs(p)
    middles = list(range(2, 2 * p))
    slot_of = {m: s for s, m in enumerate(middles)}
    arity = n * n

    def evaluate(x: Sequence) -> Fraction:
        mats = {
            m: ExactMatrix(
                [list(x[slot_of[m] * arity + i * n : slot_of[m] * arity + (i + 1) * n]) for i in range(n)]
            )
            for m in middles
        }
        value = Fraction(1)
        for a, b in pairs:
            value *= det_exact(commutator(mats[a], mats[b]))
        return value

    expected = 2 * n * len(pairs)
    poly = PolynomialEvaluator(len(middles) * arity, max(expected, 1), evaluate)
    return expected, degree_along_line(poly, _child_seed(seed, 0xD3))
