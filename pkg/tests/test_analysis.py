import math
import random
from fractions import Fraction

import mpmath
import pytest

from addchain.analysis import (
    LOG2_GAMMA,
    _meets_midsize_floor,
    block_structure,
    check_large_step_predecessors,
    check_nondoubling_budget,
    check_small_step_budget,
    classify_steps,
    dominates,
    find_marked_steps,
    golden_exceeds,
)
from addchain.core import infer_operands, validate_chain
from addchain.errors import MTooSmall, PrecisionEscalation
from addchain.family import FamilyParams, enumerate_family
from addchain.search import ell

from conftest import make_random_chain


def _fib(n):
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a


class TestClassify:
    def test_pure_doubling(self):
        chain = infer_operands([1, 2, 4, 8, 16])
        for m in (5, 8, 100, 10**6):
            assert classify_steps(chain, m).kinds == ("A", "A", "A", "A")

    def test_large_and_midsize(self):
        tax = classify_steps(infer_operands([1, 2, 3, 5]), 8)
        assert tax.kinds == ("A", "C", "B")
        assert (tax.doubling, tax.large, tax.midsize, tax.small) == (1, 1, 1, 0)

    def test_small(self):
        tax = classify_steps(infer_operands([1, 2, 4, 5]), 8)
        assert tax.kinds == ("A", "A", "D")

    def test_m_too_small(self):
        with pytest.raises(MTooSmall):
            classify_steps(infer_operands([1, 2]), 4)

    def test_partition(self, rng):
        for _ in range(100):
            chain = make_random_chain(rng, rng.randint(1, 15))
            tax = classify_steps(chain, 9)
            assert len(tax.kinds) == chain.length
            assert (
                tax.doubling + tax.large + tax.midsize + tax.small
                == chain.length
            )


class TestGoldenRatioTest:
    def test_against_fibonacci_bracket(self):
        # F(120)/F(119) < golden ratio < F(121)/F(120); no ratio of 31-bit
        # integers can land between convergents this deep, so the bracket
        # decides every sample exactly.
        f119, f120, f121 = _fib(119), _fib(120), _fib(121)
        rng = random.Random(1618)
        for _ in range(10**6):
            x = rng.randrange(1, 1 << 31)
            y = rng.randrange(1, 1 << 31)
            if x * f120 > y * f121:
                expected = True
            elif x * f119 < y * f120:
                expected = False
            else:  # pragma: no cover - impossible for 31-bit inputs
                raise AssertionError(f"bracket failed for {x}/{y}")
            assert golden_exceeds(x, y) is expected

    def test_fibonacci_neighbours(self):
        # consecutive Fibonacci ratios alternate around the golden ratio
        for n in range(3, 40):
            above = golden_exceeds(_fib(n + 1), _fib(n))
            assert above == (n % 2 == 0)


class TestNondoublingBudget:
    def test_all_doubling(self):
        tax = classify_steps(infer_operands([1, 2, 4, 8, 16, 32]), 8)
        rep = check_nondoubling_budget(tax, 0.0)
        assert rep.lhs == 0 and rep.holds and rep.growth_holds

    def test_budget_closed_form(self):
        tax = classify_steps(infer_operands([1, 2, 4]), 100)
        r = 0.5 * 100 / math.log(100)
        rep = check_nondoubling_budget(tax, r)
        assert rep.rhs == pytest.approx(35.51, abs=0.01)
        assert 1 - LOG2_GAMMA == pytest.approx(0.30576, abs=1e-5)

    def test_chain_to_nine(self):
        chain = validate_chain(
            [1, 2, 4, 5, 7, 9], [(0, 0), (1, 1), (0, 2), (1, 3), (2, 3)]
        )
        tax = classify_steps(chain, 8)
        rep = check_nondoubling_budget(tax, 3.0)
        assert rep.lhs == 3
        # 9 <= 2^2 * gamma^3 ~ 16.94
        assert rep.growth_value == 9
        assert 2.0**rep.growth_log2_bound == pytest.approx(16.944, abs=0.001)
        assert rep.growth_holds

    def test_growth_bound_on_random_chains(self, rng):
        for _ in range(300):
            chain = make_random_chain(rng, rng.randint(1, 18))
            tax = classify_steps(chain, 12)
            rep = check_nondoubling_budget(tax, 5.0)
            assert rep.growth_holds


class TestSmallStepBudget:
    def test_all_doubling(self):
        tax = classify_steps(infer_operands([1, 2, 4, 8]), 8)
        rep = check_small_step_budget(tax, 1.0)
        assert rep.lhs == 0 and rep.holds and not rep.impossible

    def test_closed_form(self):
        tax = classify_steps(infer_operands([1, 2, 4]), 100)  # C = 0
        r = 0.5 * 100 / math.log(100)
        rep = check_small_step_budget(tax, r)
        assert rep.rhs == pytest.approx(15.15, abs=0.01)

    def test_degenerate_negative_bound(self):
        # two midsize steps against a tiny budget: rhs < 0 is impossible
        chain = infer_operands([1, 2, 3, 4, 6])  # kinds A C D C at m=8
        tax = classify_steps(chain, 8)
        assert tax.midsize >= 2
        rep = check_small_step_budget(tax, 0.1)
        assert rep.rhs < 0
        assert rep.impossible and not rep.holds


class TestLargeStepPredecessors:
    def test_examples(self):
        assert check_large_step_predecessors(
            infer_operands([1, 2, 3, 5]), 8
        ).violations == ()
        assert check_large_step_predecessors(
            infer_operands([1, 2, 4, 8]), 8
        ).violations == ()

    def test_random_chains(self, rng):
        for _ in range(1000):
            chain = make_random_chain(rng, rng.randint(1, 20))
            rep = check_large_step_predecessors(chain, 8)
            assert rep.violations == ()

    def test_search_witnesses(self):
        for n in range(2, 513):
            chain = ell(n).witness
            assert check_large_step_predecessors(chain, 9).violations == ()


class TestBlocks:
    def test_marked_type2_block(self):
        chain = validate_chain(
            [1, 2, 4, 8, 10, 14, 28],
            [(0, 0), (1, 1), (2, 2), (1, 3), (2, 4), (5, 5)],
        )
        bs = block_structure(chain, 8)
        assert bs.num_blocks == 1
        block = bs.blocks[0]
        assert (block.start, block.length) == (4, 2)
        assert block.block_type == 2
        assert block.marked

    def test_pure_doubling_has_no_blocks(self):
        bs = block_structure(infer_operands([1, 2, 4, 8, 16]), 8)
        assert bs.num_blocks == 0
        assert bs.blocks == ()

    def test_seed_makes_type1(self):
        bs = block_structure(infer_operands([1, 2, 3, 5]), 8)
        assert bs.num_blocks == 1
        block = bs.blocks[0]
        assert (block.start, block.length) == (2, 2)
        assert block.block_type == 1

    def test_type1_propagates(self):
        # 12 = 9 + 3 consumes an element of the earlier type-1 block
        chain = validate_chain(
            [1, 2, 3, 6, 9, 12, 24],
            [(0, 0), (0, 1), (2, 2), (2, 3), (2, 4), (5, 5)],
        )
        bs = block_structure(chain, 8)
        types = [b.block_type for b in bs.blocks]
        assert types == [1, 1]

    def test_counts_and_lengths(self, rng):
        for _ in range(200):
            chain = make_random_chain(rng, rng.randint(1, 15))
            tax = classify_steps(chain, 8)
            bs = block_structure(chain, 8)
            assert bs.num_blocks == len(bs.blocks)
            assert bs.num_type1 + bs.num_type2 == bs.num_blocks
            total = sum(b.length for b in bs.blocks)
            assert total == tax.nondoubling
            for b in bs.blocks:
                assert b.d_count + b.bc_count == b.length

    def test_first_type2_block_is_marked(self, rng):
        # outside operands of the earliest type-2 block can only be doubling
        # steps, so it is always marked; later type-2 blocks may feed on it
        corpus = [ell(n).witness for n in range(2, 400)]
        corpus += [make_random_chain(rng, rng.randint(1, 16)) for _ in range(300)]
        corpus += [
            inst.chain
            for inst in enumerate_family(FamilyParams(digits=8, u=3, k=2))
        ]
        for chain in corpus:
            bs = block_structure(chain, 8)
            for block in bs.blocks:
                if block.block_type == 2:
                    assert block.marked, (chain.values, block)
                    break

    def test_family_blocks_are_all_type1(self):
        for inst in enumerate_family(FamilyParams(digits=10, u=3, k=2)):
            bs = block_structure(inst.chain, 8)
            assert all(b.block_type == 1 for b in bs.blocks)


class TestDominates:
    def test_classic_pair(self):
        a = infer_operands([1, 2, 4, 5])
        b = infer_operands([1, 2, 3, 5])
        verdict = dominates(a, b)
        assert verdict.dominates and verdict.first_strict_index == 2

    def test_irreflexive(self):
        a = infer_operands([1, 2, 4, 5])
        assert not dominates(a, a).dominates

    def test_reversed_order_fails(self):
        a = infer_operands([1, 2, 3, 5])
        b = infer_operands([1, 2, 4, 5])
        assert not dominates(a, b).dominates

    def test_mismatches_report_reason(self):
        a = infer_operands([1, 2, 4])
        b = infer_operands([1, 2, 3, 5])
        assert dominates(a, b).reason == "length mismatch"
        c = infer_operands([1, 2, 3, 6])
        d = infer_operands([1, 2, 3, 5])
        assert dominates(c, d).reason == "target mismatch"

    def test_antisymmetric_on_corpus(self, rng):
        chains = [make_random_chain(rng, 6) for _ in range(60)]
        for a in chains:
            for b in chains:
                if dominates(a, b).dominates:
                    assert not dominates(b, a).dominates


class TestMarkedSteps:
    def test_doubling_feed_pattern(self):
        chain = validate_chain(
            [1, 2, 4, 8, 10, 20], [(0, 0), (1, 1), (2, 2), (1, 3), (4, 4)]
        )
        assert find_marked_steps(chain) == (3,)

    def test_unused_step(self):
        chain = validate_chain(
            [1, 2, 4, 5, 8, 16], [(0, 0), (1, 1), (0, 2), (2, 2), (4, 4)]
        )
        assert find_marked_steps(chain) == (3,)

    def test_clean_doubling_chain(self):
        assert find_marked_steps(infer_operands([1, 2, 4, 8])) == ()

    def test_marked_step_used_later_is_still_marked(self):
        # the doubled value is reused afterwards; the requirement it marks
        # is then satisfied, but the structural mark remains
        chain = validate_chain(
            [1, 2, 4, 8, 10, 18],
            [(0, 0), (1, 1), (2, 2), (1, 3), (3, 4)],
        )
        assert 3 in find_marked_steps(chain)


class TestReportSerialization:
    def test_budget_reports_expose_lhs_rhs_holds(self):
        from dataclasses import asdict

        tax = classify_steps(infer_operands([1, 2, 3, 5]), 8)
        nd = asdict(check_nondoubling_budget(tax, 2.0))
        assert {"lhs", "rhs", "holds"} <= set(nd)
        small = asdict(check_small_step_budget(tax, 2.0))
        assert {"lhs", "rhs", "holds", "impossible"} <= set(small)
        pred = asdict(check_large_step_predecessors(infer_operands([1, 2, 3, 5]), 8))
        assert set(pred) == {"violations"}


class TestPrecisionGuard:
    def test_guard_band_raises(self):
        # a continued-fraction convergent of 1/log(8) lands inside the
        # comparison's guard band; the classifier must refuse to guess
        with mpmath.workprec(300):
            x = 1 / mpmath.log(8)
            frac = Fraction(mpmath.nstr(x, 60, strip_zeros=False)).limit_denominator(
                10**10
            )
            gap, prev = frac.numerator, frac.denominator
            rel = abs(gap * mpmath.log(8) - prev) / prev
            assert rel < 1e-15, "construction sanity"
        with pytest.raises(PrecisionEscalation):
            _meets_midsize_floor(gap, prev, 8)

    def test_comfortable_margins_decide(self):
        assert _meets_midsize_floor(1, 2, 8)  # 1 * log 8 > 2
        assert not _meets_midsize_floor(1, 3, 8)  # 1 * log 8 < 3
