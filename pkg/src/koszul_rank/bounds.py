"""Closed-form rank lower bounds, crossover scans, and border-rank certificates.

The bound kinds:

  strassen        (3/2) n^2
  blaser          (5/2) n^2 - 3n
  landsberg:p     (3 - 1/(p+1)) n^2 - (1 + 2p binom(2p,p)) n
  mr:p            (1 + p/(p+1)) nm + n^2 - (2 binom(2p,p+1) - binom(2p-2,p-1) + 2) n
  mr_p2_refined   (8/3) n^2 - 7n
  mr_p3_refined   (11/4) n^2 - 17n

All values are exact rationals; reports carry the integer ceiling and a
vacuity flag (a bound below zero says nothing).  mr:p at p = 1 coincides with
blaser's formula, coefficient 2*binom(2,2) - binom(0,0) + 2 = 3.

certify_border_rank restricts a tensor to a random (2p+1)-dimensional
subspace of covectors, assembles the flattening, and returns
ceil(rank / binom(2p,p)), a valid border-rank (hence rank) lower bound;
binom(2p,p) is the flattening rank of a single rank-one tensor.
"""

from __future__ import annotations

import math
import os
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .exact_linalg import rank_exact
from .flattening import assemble, build_flattening
from .tensor_core import Tensor3, slice_family

SQUARE_ONLY_TAGS = {"strassen", "blaser", "landsberg", "mr_p2_refined", "mr_p3_refined"}
PARAMETRIC_TAGS = {"landsberg", "mr"}
ALL_TAGS = {"strassen", "blaser", "landsberg", "mr", "mr_p2_refined", "mr_p3_refined"}


class DegenerateSubspaceError(RuntimeError):
    """No usable covector subspace was found (or p does not fit the tensor)."""


@dataclass(frozen=True)
class BoundKind:
    tag: str
    p: Optional[int] = None

    def __post_init__(self):
        if self.tag not in ALL_TAGS:
            raise ValueError(f"unknown bound kind {self.tag!r}")
        if self.tag in PARAMETRIC_TAGS:
            if self.p is None or self.p < 1:
                raise ValueError(f"kind {self.tag!r} needs p >= 1")
        elif self.p is not None:
            raise ValueError(f"kind {self.tag!r} takes no p")

    def __str__(self) -> str:
        return f"{self.tag}:{self.p}" if self.p is not None else self.tag

    @classmethod
    def parse(cls, text: str) -> "BoundKind":
        if ":" in text:
            tag, p_text = text.split(":", 1)
            return cls(tag, int(p_text))
        return cls(text)


@dataclass(frozen=True)
class BoundReport:
    kind: BoundKind
    n: int
    m: int
    value: Fraction
    ceiling: int
    vacuous: bool


def bound_value(kind: BoundKind, n: int, m: Optional[int] = None) -> BoundReport:
    """Evaluate a bound formula exactly at (n, m); m defaults to n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if m is None:
        m = n
    if kind.tag in SQUARE_ONLY_TAGS and m != n:
        raise ValueError(f"kind {kind} is defined only for m = n")
    p = kind.p
    if kind.tag == "strassen":
        value = Fraction(3, 2) * n * n
    elif kind.tag == "blaser":
        value = Fraction(5, 2) * n * n - 3 * n
    elif kind.tag == "landsberg":
        value = (3 - Fraction(1, p + 1)) * n * n - (1 + 2 * p * math.comb(2 * p, p)) * n
    elif kind.tag == "mr":
        coefficient = 2 * math.comb(2 * p, p + 1) - math.comb(2 * p - 2, p - 1) + 2
        value = (1 + Fraction(p, p + 1)) * n * m + n * n - coefficient * n
    elif kind.tag == "mr_p2_refined":
        value = Fraction(8, 3) * n * n - 7 * n
    elif kind.tag == "mr_p3_refined":
        value = Fraction(11, 4) * n * n - 17 * n
    else:  # pragma: no cover
        raise AssertionError(kind)
    return BoundReport(kind, n, m, value, math.ceil(value), value < 0)


def best_mr(n: int) -> tuple[int, BoundReport]:
    """The p maximizing the mr:p ceiling at (n, n); ties break to smaller p."""
    if n < 1:
        raise ValueError("n must be >= 1")
    best_p, best = 1, bound_value(BoundKind("mr", 1), n)
    for p in range(2, n + 1):
        coefficient = 2 * math.comb(2 * p, p + 1) - math.comb(2 * p - 2, p - 1) + 2
        if coefficient > 3 * n and best.value >= 0:
            break  # every later value is negative: (3 - 1/(p+1)) n^2 < coefficient * n
        report = bound_value(BoundKind("mr", p), n)
        if report.ceiling > best.ceiling:
            best_p, best = p, report
    return best_p, best


@dataclass(frozen=True)
class CrossoverReport:
    a: BoundKind
    b: BoundKind
    n_max: int
    first_geq: Optional[int]
    first_strict: Optional[int]
    first_geq_ceiling: Optional[int]
    first_strict_ceiling: Optional[int]
    monotone_after: Optional[bool]


def crossover(a: BoundKind, b: BoundKind, n_max: int = 1000) -> CrossoverReport:
    """First n where value(a) >= value(b) (and >), on exact values and ceilings.

    monotone_after reports whether value(a) - value(b) is nondecreasing from
    the first_geq point up to n_max.
    """
    first_geq = first_strict = None
    first_geq_c = first_strict_c = None
    diffs = []
    for n in range(1, n_max + 1):
        va, vb = bound_value(a, n), bound_value(b, n)
        diff = va.value - vb.value
        diffs.append(diff)
        if first_geq is None and diff >= 0:
            first_geq = n
        if first_strict is None and diff > 0:
            first_strict = n
        if first_geq_c is None and va.ceiling >= vb.ceiling:
            first_geq_c = n
        if first_strict_c is None and va.ceiling > vb.ceiling:
            first_strict_c = n
    monotone = None
    if first_geq is not None:
        tail = diffs[first_geq - 1 :]
        monotone = all(x <= y for x, y in zip(tail, tail[1:]))
    return CrossoverReport(a, b, n_max, first_geq, first_strict, first_geq_c, first_strict_c, monotone)


@dataclass(frozen=True)
class Certificate:
    """Replayable border-rank certificate from one flattening rank computation."""

    bound: int
    flattening_rank: int
    divisor: int
    p: int
    seed: int
    trials: int
    alphas: tuple[tuple[Fraction, ...], ...]
    trial_ranks: tuple[int, ...]


def _child_seed(seed: int, index: int) -> int:
    return (seed * 1000003 + index * 7919 + 12345) % (2**63)


def _worker_count() -> int:
    raw = os.environ.get("KOSZUL_RANK_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def certify_border_rank(
    tensor: Tensor3,
    p: int,
    alphas: Optional[Sequence[Sequence]] = None,
    seed: int = 0,
    trials: int = 3,
) -> Certificate:
    """Max over trials of ceil(rank(flattening) / binom(2p,p)).

    Covectors default to random integer vectors with entries in [-9, 9]; an
    explicit alphas list replaces the random search (single evaluation).  The
    result is a valid lower bound for the border rank (hence rank) of the
    tensor.  Trials are indexed, so results are reproducible for a given seed
    regardless of the KOSZUL_RANK_THREADS parallelism cap.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    if tensor.dim_b != tensor.dim_c:
        raise DegenerateSubspaceError("slices are not square (dimB != dimC)")
    count = 2 * p + 1
    if count > tensor.dim_a:
        raise DegenerateSubspaceError(f"p too large: need 2p+1 <= dimA = {tensor.dim_a}")
    divisor = math.comb(2 * p, p)

    def evaluate(alpha_list) -> Optional[tuple[int, tuple]]:
        try:
            family = slice_family(tensor, alpha_list)
        except ValueError:
            return None
        sym, _ = build_flattening(family)
        rank = rank_exact(assemble(sym, family))
        return rank, tuple(tuple(Fraction(x) for x in a) for a in alpha_list)

    if alphas is not None:
        result = evaluate(list(alphas))
        if result is None:
            raise DegenerateSubspaceError("provided covectors are dependent")
        rank, used = result
        return Certificate(
            -(-rank // divisor), rank, divisor, p, seed, 1, used, (rank,)
        )

    def run_trial(index: int):
        rng = random.Random(_child_seed(seed, index))
        draw = [[rng.randint(-9, 9) for _ in range(tensor.dim_a)] for _ in range(count)]
        return evaluate(draw)

    workers = _worker_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_trial, range(trials)))
    else:
        results = [run_trial(i) for i in range(trials)]

    usable = [(rank, used, i) for i, r in enumerate(results) if r is not None for rank, used in [r]]
    if not usable:
        raise DegenerateSubspaceError("degenerate subspace after all trials")
    best_rank, best_alphas, _ = max(usable, key=lambda t: (t[0], -t[2]))
    ranks = tuple(rank for rank, _, _ in usable)
    return Certificate(
        -(-best_rank // divisor), best_rank, divisor, p, seed, trials, best_alphas, ranks
    )
