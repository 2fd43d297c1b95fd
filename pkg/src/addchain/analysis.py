"""Per-chain growth analysis: step kinds, growth budgets, blocks, domination.

Steps of a chain are partitioned by their growth ratio a_j / a_{j-1}:

* ``A`` doubling (ratio exactly 2),
* ``B`` large (ratio strictly between the golden ratio and 2),
* ``C`` midsize (ratio in [1 + delta, golden ratio), delta = 1/log m),
* ``D`` small (ratio below 1 + delta).

The golden-ratio boundary is decided by the exact integer sign of
x^2 - xy - y^2 (equality is impossible for integers), the 1 + delta
boundary in >= 80-bit precision with a guard band that raises instead of
guessing.  On top of the labels sit the nondoubling/small step budgets, the
large-step predecessor property, additive-block structure with the
type-1/type-2 split, chain domination, and the marked-step patterns.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath

from .core import Chain
from .errors import MTooSmall, PrecisionEscalation

GAMMA = (1 + math.sqrt(5)) / 2
LOG2_GAMMA = math.log2(GAMMA)

_GUARD = 1e-15
_PREC_BITS = 96

KIND_DOUBLING = "A"
KIND_LARGE = "B"
KIND_MIDSIZE = "C"
KIND_SMALL = "D"


@dataclass(frozen=True)
class StepTaxonomy:
    """Step labels and their counts for one chain at parameter m."""

    chain: Chain
    m: int
    delta: float
    kinds: tuple[str, ...]
    doubling: int
    large: int
    midsize: int
    small: int

    @property
    def nondoubling(self) -> int:
        return self.large + self.midsize + self.small


@dataclass(frozen=True)
class BudgetReport:
    """One inequality check: lhs <= rhs, plus context fields."""

    lhs: float
    rhs: float
    holds: bool
    impossible: bool = False


@dataclass(frozen=True)
class GrowthBudgetReport:
    """Nondoubling-step budget report, with the Fibonacci-growth check.

    ``growth_holds`` verifies target <= 2^doubling * gamma^nondoubling
    directly on the chain (log2 comparison).
    """

    lhs: int
    rhs: float
    holds: bool
    growth_value: int
    growth_log2_bound: float
    growth_holds: bool


@dataclass(frozen=True)
class PredecessorReport:
    violations: tuple[int, ...]


@dataclass(frozen=True)
class Block:
    """A maximal run of consecutive nondoubling steps."""

    start: int
    length: int
    d_count: int
    bc_count: int
    block_type: int
    marked: bool


@dataclass(frozen=True)
class BlockStructure:
    blocks: tuple[Block, ...]
    num_blocks: int
    num_type1: int
    num_type2: int


@dataclass(frozen=True)
class DominationVerdict:
    dominates: bool
    first_strict_index: int | None = None
    reason: str | None = None


def golden_exceeds(x: int, y: int) -> bool:
    """Exact integer test for x/y > golden ratio (y > 0).

    x/y > (1+sqrt 5)/2 iff x^2 - xy - y^2 > 0; equality cannot occur since
    the golden ratio is irrational.
    """
    return x * x > x * y + y * y


@lru_cache(maxsize=256)
def _log_m(m: int):
    with mpmath.workprec(_PREC_BITS):
        return +mpmath.log(m)


def _meets_midsize_floor(gap: int, prev: int, m: int) -> bool:
    """Whether gap * log(m) >= prev, i.e. the step ratio is >= 1 + 1/log m."""
    with mpmath.workprec(_PREC_BITS):
        lhs = gap * _log_m(m)
        diff = lhs - prev
        if abs(diff) <= _GUARD * prev:
            raise PrecisionEscalation(
                f"ratio comparison too close to 1 + 1/log {m}: "
                f"gap={gap}, prev={prev}"
            )
        return diff > 0


def classify_steps(chain: Chain, m: int) -> StepTaxonomy:
    """Label every step of the chain as A/B/C/D relative to parameter m."""
    if m < 5:
        raise MTooSmall(f"step taxonomy needs m >= 5, got {m}")
    values = chain.values
    kinds = []
    counts = {KIND_DOUBLING: 0, KIND_LARGE: 0, KIND_MIDSIZE: 0, KIND_SMALL: 0}
    for j in range(1, len(values)):
        v, prev = values[j], values[j - 1]
        if v == 2 * prev:
            kind = KIND_DOUBLING
        elif golden_exceeds(v, prev):
            kind = KIND_LARGE
        elif _meets_midsize_floor(v - prev, prev, m):
            kind = KIND_MIDSIZE
        else:
            kind = KIND_SMALL
        kinds.append(kind)
        counts[kind] += 1
    return StepTaxonomy(
        chain=chain,
        m=m,
        delta=1.0 / math.log(m),
        kinds=tuple(kinds),
        doubling=counts[KIND_DOUBLING],
        large=counts[KIND_LARGE],
        midsize=counts[KIND_MIDSIZE],
        small=counts[KIND_SMALL],
    )


def check_nondoubling_budget(tax: StepTaxonomy, r: float) -> GrowthBudgetReport:
    """Check nondoubling steps <= r / (1 - log2 gamma), plus the growth bound.

    A chain with nondoubling steps cannot grow faster than the Fibonacci
    sequence, so target <= 2^doubling * gamma^nondoubling always holds;
    both facts are reported, never asserted here.
    """
    lhs = tax.nondoubling
    rhs = r / (1 - LOG2_GAMMA)
    n = tax.chain.target
    log2_bound = tax.doubling + tax.nondoubling * LOG2_GAMMA
    return GrowthBudgetReport(
        lhs=lhs,
        rhs=rhs,
        holds=lhs <= rhs,
        growth_value=n,
        growth_log2_bound=log2_bound,
        growth_holds=math.log2(n) <= log2_bound + 1e-9,
    )


def check_small_step_budget(tax: StepTaxonomy, r: float) -> BudgetReport:
    """Check small steps <= (r - midsize*(1 - log2 gamma)) / (1 - log2(1+delta)).

    A negative right side means no chain of the assumed shape can exist at
    all; that is flagged as ``impossible`` rather than hidden.
    """
    lhs = tax.small
    rhs = (r - tax.midsize * (1 - LOG2_GAMMA)) / (
        1 - math.log2(1 + tax.delta)
    )
    return BudgetReport(
        lhs=lhs, rhs=rhs, holds=lhs <= rhs, impossible=rhs < 0
    )


def check_large_step_predecessors(chain: Chain, m: int) -> PredecessorReport:
    """Indices of large steps not preceded by a midsize or small step.

    Provably empty for every well-formed chain (a large step cannot follow
    a doubling or another large step, by the Fibonacci growth limit): a
    nonempty list signals a broken chain or an implementation bug, so it
    is surfaced, never filtered.
    """
    tax = classify_steps(chain, m)
    violations = []
    for j in range(2, len(tax.kinds) + 1):
        if tax.kinds[j - 1] == KIND_LARGE and tax.kinds[j - 2] not in (
            KIND_MIDSIZE,
            KIND_SMALL,
        ):
            violations.append(j)
    if tax.kinds and tax.kinds[0] == KIND_LARGE:
        violations.insert(0, 1)
    return PredecessorReport(tuple(violations))


def block_structure(chain: Chain, m: int) -> BlockStructure:
    """Maximal nondoubling-step blocks with type and marked flags.

    A block is type 1 when the seed element 1 or an element of an earlier
    type-1 block appears as an operand inside it, type 2 otherwise.  It is
    marked when every operand taken from before the block is a doubling
    step: the whole block could then be slid one doubling earlier, so some
    element of it must be reused later for the chain to be minimal.
    """
    tax = classify_steps(chain, m)
    kinds = tax.kinds
    spans = []
    start = None
    for j in range(1, len(kinds) + 1):
        if kinds[j - 1] != KIND_DOUBLING:
            if start is None:
                start = j
        elif start is not None:
            spans.append((start, j - 1))
            start = None
    if start is not None:
        spans.append((start, len(kinds)))

    blocks = []
    type1_spans: list[tuple[int, int]] = []
    for lo, hi in spans:
        d_count = sum(1 for j in range(lo, hi + 1) if kinds[j - 1] == KIND_SMALL)
        uses_seed = False
        uses_type1 = False
        all_outside_doubling = True
        for j in range(lo, hi + 1):
            for t in chain.steps[j].operands:
                if t == 0:
                    uses_seed = True
                if any(a <= t <= b for a, b in type1_spans):
                    uses_type1 = True
                if t < lo and (t == 0 or kinds[t - 1] != KIND_DOUBLING):
                    all_outside_doubling = False
        block_type = 1 if (uses_seed or uses_type1) else 2
        if block_type == 1:
            type1_spans.append((lo, hi))
        blocks.append(
            Block(
                start=lo,
                length=hi - lo + 1,
                d_count=d_count,
                bc_count=hi - lo + 1 - d_count,
                block_type=block_type,
                marked=all_outside_doubling,
            )
        )
    num_type1 = sum(1 for b in blocks if b.block_type == 1)
    return BlockStructure(
        blocks=tuple(blocks),
        num_blocks=len(blocks),
        num_type1=num_type1,
        num_type2=len(blocks) - num_type1,
    )


def dominates(a: Chain, b: Chain) -> DominationVerdict:
    """Whether chain a dominates chain b.

    Requires equal length and target, b_j <= a_j everywhere and b_s < a_s
    somewhere; a dominating chain cannot be a canonical minimal chain.
    """
    if a.length != b.length:
        return DominationVerdict(False, reason="length mismatch")
    av, bv = a.values, b.values
    if av[-1] != bv[-1]:
        return DominationVerdict(False, reason="target mismatch")
    first_strict = None
    for j, (x, y) in enumerate(zip(av, bv)):
        if y > x:
            return DominationVerdict(False)
        if y < x and first_strict is None:
            first_strict = j
    if first_strict is None:
        return DominationVerdict(False)
    return DominationVerdict(True, first_strict_index=first_strict)


def find_marked_steps(chain: Chain) -> tuple[int, ...]:
    """Steps that must feed a later addition for the chain to be minimal.

    Two detectable patterns:

    * a non-final step never used as an operand later (it could simply be
      dropped, shortening the chain);
    * a doubling step immediately consumed by an addition of another
      doubling step's value: the addition could be done one level lower
      and re-doubled, producing a dominated rewrite, unless the doubled
      value is needed again later.

    Coverage is exactly these patterns; no general minimality oracle.
    """
    values = chain.values
    k = chain.length
    used_by: dict[int, list[int]] = {}
    for j in range(1, k + 1):
        for t in chain.steps[j].operands:
            used_by.setdefault(t, []).append(j)

    marked = set()
    for s in range(k):
        if s not in used_by:
            marked.add(s)
    for j in range(1, k):
        if values[j] != 2 * values[j - 1]:
            continue
        i, s = chain.steps[j + 1].operands
        if s == j and i < j and i >= 1 and values[i] == 2 * values[i - 1]:
            marked.add(j)
    return tuple(sorted(marked))
