"""Constructive family of chains reaching binary-concatenation targets.

Each family member is built from k odd u-bit windows W_1..W_k separated by
zero runs of lengths s_1..s_{k-1}: the target N is the binary concatenation
W_1 0^{s_1} W_2 ... 0^{s_{k-1}} W_k.  Its chain is an initial consecutive
run 1, 2, ..., 2^u - 1 (which contains every window), followed, for each
window after the first, by s_j + u doublings and one addition of the next
window from the run.  Enumerating all (gaps, windows) choices yields
pairwise distinct targets with a common digit count and a common length
budget, which makes the family a constructive lower-bound witness for the
interval counting function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

from .core import Chain, format_chain, validate_chain
from .errors import CapExceeded, DomainError, InvariantViolation, OverflowRisk

ENUM_CAP = 10**7
MAX_DIGITS = 63


@dataclass(frozen=True)
class FamilyParams:
    """Construction parameters.

    digits: binary digit count of every target (equals sum(gaps) + k*u);
    u: window bit width; k: window count; budget_r: the slack budget the
    construction is meant to fit, i.e. 2^u + k - u <= budget_r.
    """

    digits: int
    u: int
    k: int
    budget_r: float | None = None

    def __post_init__(self):
        if self.digits < 1 or self.u < 1 or self.k < 1:
            raise ValueError("digits, u and k must be positive")
        if self.budget_r is None:
            # smallest budget the slack invariant allows
            object.__setattr__(
                self, "budget_r", float((1 << self.u) + self.k - self.u)
            )

    def violations(self) -> tuple[str, ...]:
        """Invariant flags; empty means the construction is well-posed."""
        out = []
        if self.k * self.u > self.digits:
            out.append(
                f"window area k*u = {self.k * self.u} exceeds digits = {self.digits}"
            )
        if (1 << self.u) + self.k - self.u > self.budget_r:
            out.append(
                f"slack 2^u + k - u = {(1 << self.u) + self.k - self.u} "
                f"exceeds budget_r = {self.budget_r:g}"
            )
        return tuple(out)

    @property
    def gap_total(self) -> int:
        return self.digits - self.k * self.u

    @property
    def length_budget(self) -> int:
        """Largest chain length the construction can produce."""
        return (1 << self.u) + self.digits - self.u + self.k - 2


@dataclass(frozen=True)
class FamilyInstance:
    params: FamilyParams
    gaps: tuple[int, ...]
    windows: tuple[int, ...]
    target: int
    chain: Chain

    @property
    def padded_length(self) -> int:
        """Step count when the first window is re-listed as its own step."""
        return self.chain.length + 1

    def to_dict(self) -> dict:
        return {
            "params": {
                "digits": self.params.digits,
                "u": self.params.u,
                "k": self.params.k,
                "budget_r": self.params.budget_r,
            },
            "s": list(self.gaps),
            "U": list(self.windows),
            "N": self.target,
            "N_binary": format(self.target, "b"),
            "chain": format_chain(self.chain),
            "length": self.chain.length,
            "length_budget": self.params.length_budget,
        }


@dataclass(frozen=True)
class FamilySize:
    """Family cardinality with its two factors.

    ``gap_solutions_alt`` is the same binomial with lower index k - 1
    instead of k - 2; enumeration matches ``gap_solutions``, the alt value
    is reported for comparison only and asserted nowhere.
    """

    total: int
    window_choices: int
    gap_solutions: int
    gap_solutions_alt: int


def window_values(u: int) -> tuple[int, ...]:
    """Odd integers with exactly u binary digits, ascending."""
    if u < 1:
        raise ValueError("u must be >= 1")
    if u == 1:
        return (1,)
    return tuple(range((1 << (u - 1)) + 1, 1 << u, 2))


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """Nonnegative integer tuples of the given size summing to total, lex order."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


def _count_compositions(total: int, parts: int) -> int:
    if total < 0:
        return 0
    if parts == 0:
        return 1 if total == 0 else 0
    return math.comb(total + parts - 1, parts - 1)


def family_size(params: FamilyParams) -> FamilySize:
    """Exact family cardinality: window choices times gap compositions."""
    windows = len(window_values(params.u)) ** params.k
    gaps = _count_compositions(params.gap_total, params.k - 1)
    alt = (
        math.comb(params.gap_total + params.k - 2, params.k - 1)
        if params.gap_total + params.k - 2 >= 0
        else 0
    )
    return FamilySize(
        total=windows * gaps,
        window_choices=windows,
        gap_solutions=gaps,
        gap_solutions_alt=alt,
    )


def generate_chain(params: FamilyParams, gaps, windows) -> FamilyInstance:
    """Build and verify one family member for explicit gaps and windows."""
    gaps = tuple(int(g) for g in gaps)
    windows = tuple(int(w) for w in windows)
    if params.digits > MAX_DIGITS:
        raise OverflowRisk(
            f"target would have {params.digits} > {MAX_DIGITS} bits"
        )
    bad = params.violations()
    if bad:
        raise InvariantViolation("; ".join(bad))
    if len(gaps) != params.k - 1:
        raise InvariantViolation(
            f"gaps: need {params.k - 1} zero-run lengths, got {len(gaps)}"
        )
    if any(g < 0 for g in gaps):
        raise InvariantViolation("gaps: zero-run lengths must be nonnegative")
    if sum(gaps) + params.k * params.u != params.digits:
        raise InvariantViolation(
            f"gaps: sum(s) + k*u = {sum(gaps) + params.k * params.u} "
            f"must equal digits = {params.digits}"
        )
    if len(windows) != params.k:
        raise InvariantViolation(
            f"windows: need {params.k} windows, got {len(windows)}"
        )
    valid = set(window_values(params.u))
    for w in windows:
        if w not in valid:
            raise InvariantViolation(
                f"windows: {w} is not an odd {params.u}-bit integer"
            )

    target = windows[0]
    for gap, w in zip(gaps, windows[1:]):
        target = (target << (gap + params.u)) | w

    values: list[int]
    operands: list[tuple[int, int]]
    if params.k == 1:
        # no concatenation: the consecutive run up to the single window
        values = list(range(1, windows[0] + 1))
        operands = [(0, j - 1) for j in range(1, len(values))]
    else:
        run_top = (1 << params.u) - 1
        values = list(range(1, run_top + 1))
        operands = [(0, j - 1) for j in range(1, len(values))]
        cur = windows[0]
        cur_idx = cur - 1
        for gap, w in zip(gaps, windows[1:]):
            for _ in range(gap + params.u):
                values.append(2 * cur)
                operands.append((cur_idx, cur_idx))
                cur = values[-1]
                cur_idx = len(values) - 1
            values.append(cur + w)
            operands.append((w - 1, cur_idx))
            cur = values[-1]
            cur_idx = len(values) - 1

    if values[-1] != target:
        raise InvariantViolation(
            f"construction reached {values[-1]}, expected {target}"
        )
    if target.bit_length() != params.digits:
        raise InvariantViolation(
            f"target {target} has {target.bit_length()} digits, "
            f"expected {params.digits}"
        )
    chain = validate_chain(values, operands)
    return FamilyInstance(
        params=params, gaps=gaps, windows=windows, target=target, chain=chain
    )


def enumerate_family(params: FamilyParams) -> Iterator[FamilyInstance]:
    """Every (gaps, windows) combination exactly once, in lexicographic order."""
    bad = params.violations()
    if bad:
        raise InvariantViolation("; ".join(bad))
    size = family_size(params)
    if size.total > ENUM_CAP:
        raise CapExceeded(
            f"family has {size.total} members, cap is {ENUM_CAP}"
        )
    wvals = window_values(params.u)
    for gaps in _compositions(params.gap_total, params.k - 1):
        for windows in _window_product(wvals, params.k):
            yield generate_chain(params, gaps, windows)


def _window_product(wvals, k):
    if k == 0:
        yield ()
        return
    for head in wvals:
        for rest in _window_product(wvals, k - 1):
            yield (head,) + rest


def choose_params(m: int, c: float) -> FamilyParams:
    """The asymptotic parameter choice for digit count m and constant c.

    Sets r = c*m/log m, takes k = round(r - y) with y = c*m/(log m)^2 and
    u = round(log2(r - k)), clamping both to stay positive at small m.
    Violated invariants are reported by ``violations()``, never raised:
    small m is exactly the regime where the choice stops working.
    """
    if not 0 < c < math.log(2):
        raise DomainError(f"c must be in (0, log 2), got {c}")
    if m < 2:
        raise DomainError(f"m must be >= 2, got {m}")
    log_m = math.log(m)
    r = c * m / log_m
    y = c * m / (log_m * log_m)
    k = max(1, round(r - y))
    if r - k >= 1:
        u = max(1, round(math.log2(r - k)))
    else:
        u = 1
    return FamilyParams(digits=m, u=u, k=k, budget_r=r)
