import math
import random

import pytest

from addchain.core import validate_chain
from addchain.errors import (
    CapExceeded,
    DomainError,
    InvariantViolation,
    OverflowRisk,
)
from addchain.family import (
    FamilyParams,
    choose_params,
    enumerate_family,
    family_size,
    generate_chain,
    window_values,
)
from addchain.search import ell


class TestWindows:
    def test_values(self):
        assert window_values(1) == (1,)
        assert window_values(2) == (3,)
        assert window_values(3) == (5, 7)
        assert window_values(4) == (9, 11, 13, 15)

    def test_count(self):
        for u in range(2, 10):
            assert len(window_values(u)) == 1 << (u - 2)


class TestGenerateChain:
    def test_reference_instance(self):
        params = FamilyParams(digits=8, u=3, k=2)
        inst = generate_chain(params, (2,), (5, 7))
        assert inst.target == 0b10100111 == 167
        assert inst.chain.values == (1, 2, 3, 4, 5, 6, 7, 10, 20, 40, 80, 160, 167)
        assert inst.chain.length == 12
        assert params.length_budget == 13
        assert inst.padded_length == 13

    def test_same_window_twice(self):
        params = FamilyParams(digits=8, u=3, k=2)
        inst = generate_chain(params, (2,), (7, 7))
        assert inst.target == 0b11100111 == 231

    def test_single_window_degenerate(self):
        params = FamilyParams(digits=3, u=3, k=1)
        inst = generate_chain(params, (), (5,))
        assert inst.target == 5
        assert inst.chain.values == (1, 2, 3, 4, 5)

    def test_unit_width_windows(self):
        params = FamilyParams(digits=5, u=1, k=2, budget_r=10)
        inst = generate_chain(params, (3,), (1, 1))
        assert inst.target == 0b10001 == 17
        assert inst.chain.target == 17

    def test_chain_is_valid_and_sized(self):
        params = FamilyParams(digits=11, u=3, k=3, budget_r=12)
        inst = generate_chain(params, (1, 1), (5, 7, 5))
        validate_chain(inst.chain.values, inst.chain.operands)
        assert inst.target.bit_length() == 11
        assert inst.chain.length <= params.length_budget

    def test_gap_sum_violation(self):
        params = FamilyParams(digits=8, u=3, k=2)
        with pytest.raises(InvariantViolation):
            generate_chain(params, (1,), (5, 7))

    def test_window_violations(self):
        params = FamilyParams(digits=8, u=3, k=2)
        with pytest.raises(InvariantViolation):
            generate_chain(params, (2,), (4, 7))  # even
        with pytest.raises(InvariantViolation):
            generate_chain(params, (2,), (9, 7))  # too wide
        with pytest.raises(InvariantViolation):
            generate_chain(params, (2,), (5,))  # wrong count

    def test_params_violation(self):
        params = FamilyParams(digits=4, u=3, k=2, budget_r=100)
        with pytest.raises(InvariantViolation):
            generate_chain(params, (0,), (5, 7))

    def test_overflow_guard(self):
        params = FamilyParams(digits=70, u=3, k=2, budget_r=100)
        with pytest.raises(OverflowRisk):
            generate_chain(params, (64,), (5, 7))


class TestEnumerate:
    def test_reference_family(self):
        params = FamilyParams(digits=8, u=3, k=2)
        instances = list(enumerate_family(params))
        assert len(instances) == 4
        targets = sorted(inst.target for inst in instances)
        assert targets == [165, 167, 229, 231]

    def test_distinct_targets(self):
        params = FamilyParams(digits=12, u=3, k=3, budget_r=12)
        targets = [inst.target for inst in enumerate_family(params)]
        assert len(targets) == len(set(targets))

    def test_single_window_count(self):
        params = FamilyParams(digits=3, u=3, k=1)
        assert [i.target for i in enumerate_family(params)] == [5, 7]

    def test_count_matches_size(self):
        rng = random.Random(42)
        tried = 0
        while tried < 20:
            u = rng.randint(1, 3)
            k = rng.randint(1, 3)
            extra = rng.randint(0, 5) if k > 1 else 0
            digits = k * u + extra
            params = FamilyParams(digits=digits, u=u, k=k, budget_r=1e9)
            size = family_size(params)
            if size.total == 0 or size.total > 3000:
                continue
            tried += 1
            instances = list(enumerate_family(params))
            assert len(instances) == size.total
            assert len({i.target for i in instances}) == size.total

    def test_digit_count_and_length_budget(self):
        params = FamilyParams(digits=10, u=2, k=3, budget_r=8)
        for inst in enumerate_family(params):
            assert inst.target.bit_length() == 10
            assert inst.chain.length <= params.length_budget

    def test_cap(self):
        params = FamilyParams(digits=60, u=5, k=5, budget_r=1e9)
        assert family_size(params).total > 10**7
        with pytest.raises(CapExceeded):
            next(enumerate_family(params))


class TestFamilySize:
    def test_reference(self):
        size = family_size(FamilyParams(digits=8, u=3, k=2))
        assert size.total == 4
        assert size.window_choices == 4
        assert size.gap_solutions == 1
        assert size.gap_solutions_alt == 2  # the off-by-one variant

    def test_k1(self):
        size = family_size(FamilyParams(digits=3, u=3, k=1))
        assert size.total == 2

    def test_three_windows(self):
        size = family_size(FamilyParams(digits=12, u=3, k=3, budget_r=1e9))
        assert size.total == 32
        assert size.gap_solutions == 4  # s1 + s2 = 3 over 2 slots

    def test_stars_and_bars_oracle(self):
        # brute-force composition count agrees with the closed form
        for k in range(1, 5):
            for total in range(0, 7):
                expected = 0
                if k == 1:
                    expected = 1 if total == 0 else 0
                else:
                    slots = k - 1
                    for combo in range((total + 1) ** slots):
                        parts = []
                        x = combo
                        for _ in range(slots):
                            parts.append(x % (total + 1))
                            x //= total + 1
                        if sum(parts) == total:
                            expected += 1
                params = FamilyParams(
                    digits=total + k, u=1, k=k, budget_r=1e9
                )
                assert family_size(params).gap_solutions == expected


class TestLowerBoundWitness:
    def test_family_members_reach_interval_cheaply(self):
        # digits = m + 1 puts every target in [2^m, 2^(m+1)); the chain
        # length caps the minimal length, so each target counts toward
        # the interval count at slack length - m
        m = 8
        params = FamilyParams(digits=m + 1, u=3, k=2, budget_r=10)
        instances = list(enumerate_family(params))
        assert instances
        for inst in instances:
            assert (1 << m) <= inst.target < 1 << (m + 1)
            assert ell(inst.target).ell <= inst.chain.length


class TestChooseParams:
    def test_large_m(self):
        params = choose_params(10**4, 0.5)
        assert params.k == 484
        assert params.u == 6
        assert params.digits == 10**4
        assert params.budget_r == pytest.approx(542.87, abs=0.01)
        assert params.violations() == ()

    def test_m_100(self):
        params = choose_params(100, 0.5)
        assert params.k == 8
        assert params.u == 2
        assert params.budget_r == pytest.approx(10.857, abs=0.001)
        # all invariants hold here: 2^2 + 8 - 2 = 10 <= 10.857 and ku = 16 <= 100
        assert params.violations() == ()

    def test_small_m_flags(self):
        params = choose_params(10, 0.3)
        assert params.violations()  # slack budget fails, reported not raised

    def test_invariant_echo(self):
        for m, c in [(50, 0.2), (200, 0.6), (1000, 0.4)]:
            params = choose_params(m, c)
            assert (params.k * params.u <= params.digits) == (
                "window area" not in " ".join(params.violations())
            )

    def test_domain(self):
        with pytest.raises(DomainError):
            choose_params(100, 0.8)
        with pytest.raises(DomainError):
            choose_params(100, 0.0)
        with pytest.raises(DomainError):
            choose_params(1, 0.5)


class TestRoundHalfEven:
    def test_tie_break(self):
        # round() ties go to even, pinning determinism of the choice
        assert round(1.5) == 2 and round(2.5) == 2
