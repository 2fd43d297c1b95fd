"""Addition chains as validated value/operand sequences, plus bit utilities.

An addition chain is a strictly increasing sequence 1 = a_0 < a_1 < ... < a_k
where every a_j (j >= 1) is the sum of two earlier terms a_i + a_s (i = s
allowed, which encodes doubling).  Chains here remember *which* decomposition
produced each step, since the downstream step analysis depends on it.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    BadOperandIndex,
    NoDecomposition,
    NotIncreasing,
    NotStartingAtOne,
    SumMismatch,
    ValueTooLarge,
)

# Chain values must stay within 63 bits; desk-scale work never gets close.
MAX_VALUE = 1 << 63


@dataclass(frozen=True)
class ChainStep:
    """One chain element: its value and the index pair that produced it.

    ``operands`` is ``(i, s)`` with ``i <= s`` and is ``None`` only for the
    seed element a_0 = 1.
    """

    value: int
    operands: tuple[int, int] | None = None


@dataclass(frozen=True)
class Chain:
    """A validated addition chain.  ``length`` excludes the seed a_0."""

    steps: tuple[ChainStep, ...]

    @property
    def length(self) -> int:
        return len(self.steps) - 1

    @property
    def values(self) -> tuple[int, ...]:
        return tuple(st.value for st in self.steps)

    @property
    def operands(self) -> tuple[tuple[int, int], ...]:
        return tuple(st.operands for st in self.steps[1:])

    @property
    def target(self) -> int:
        return self.steps[-1].value

    @property
    def is_star(self) -> bool:
        """True when every step uses the immediately preceding element."""
        return all(st.operands[1] == j for j, st in enumerate(self.steps[1:]))

    def __iter__(self):
        return iter(self.steps)

    def __len__(self) -> int:
        return len(self.steps)


def validate_chain(values, operands) -> Chain:
    """Build a Chain from explicit values and per-step operand index pairs.

    ``operands[j-1]`` justifies ``values[j]``.  Raises the error naming the
    first offending index when any chain invariant fails.
    """
    values = list(values)
    operands = [tuple(p) for p in operands]
    if not values:
        raise NotStartingAtOne("empty value list", index=0)
    if values[0] != 1:
        raise NotStartingAtOne(f"chain starts at {values[0]}, not 1", index=0)
    if len(operands) != len(values) - 1:
        raise BadOperandIndex(
            f"{len(values) - 1} steps need {len(values) - 1} operand pairs, "
            f"got {len(operands)}",
            index=min(len(operands) + 1, len(values) - 1),
        )
    steps = [ChainStep(1)]
    for j in range(1, len(values)):
        v = values[j]
        if v > MAX_VALUE:
            raise ValueTooLarge(f"value {v} at index {j} exceeds 2^63", index=j)
        if v <= values[j - 1]:
            raise NotIncreasing(
                f"value {v} at index {j} does not exceed {values[j - 1]}", index=j
            )
        i, s = operands[j - 1]
        if not (0 <= i <= s < j):
            raise BadOperandIndex(
                f"operands ({i},{s}) at index {j} not within 0 <= i <= s < {j}",
                index=j,
            )
        if values[i] + values[s] != v:
            raise SumMismatch(
                f"{values[i]} + {values[s]} != {v} at index {j}", index=j
            )
        steps.append(ChainStep(v, (i, s)))
    return Chain(tuple(steps))


def infer_operands(values) -> Chain:
    """Build a Chain from a bare value listing.

    Each step gets the lexicographically smallest valid (i, s) pair; raises
    NoDecomposition at the first step that admits none.
    """
    values = list(values)
    operands = []
    for j in range(1, len(values)):
        pair = _smallest_pair(values, j)
        if pair is None:
            raise NoDecomposition(
                f"value {values[j]} at index {j} is not a sum of two earlier values",
                index=j,
            )
        operands.append(pair)
    return validate_chain(values, operands)


def _smallest_pair(values, j) -> tuple[int, int] | None:
    v = values[j]
    for i in range(j):
        rest = v - values[i]
        if rest < values[i]:
            break
        # earlier values are strictly increasing, so binary search would do;
        # chains are short enough that a scan is fine
        for s in range(i, j):
            if values[s] == rest:
                return (i, s)
            if values[s] > rest:
                break
    return None


def nu(n: int) -> int:
    """Number of ones in the binary expansion of n (popcount)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return n.bit_count()


def binary_chain(n: int) -> Chain:
    """The binary-method chain to n: double per bit, add one per set bit.

    Its length floor_log2(n) + nu(n) - 1 is the classical upper bound on
    the minimal chain length.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > MAX_VALUE:
        raise ValueTooLarge(f"{n} exceeds 2^63", index=0)
    values = [1]
    operands: list[tuple[int, int]] = []
    for bit in bin(n)[3:]:
        j = len(values)
        values.append(values[-1] * 2)
        operands.append((j - 1, j - 1))
        if bit == "1":
            j = len(values)
            values.append(values[-1] + 1)
            operands.append((0, j - 1))
    return validate_chain(values, operands)


def floor_log2(n: int) -> int:
    """The unique m with 2^m <= n < 2^(m+1)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return n.bit_length() - 1


# --- textual chain format -------------------------------------------------
#
# One chain per line, comma-separated values, each value optionally
# annotated with its operand pair:  1,2(0,0),3(0,1),5(1,2)
# Steps without an annotation get the smallest valid pair inferred.


def format_chain(chain: Chain, annotate: bool = True) -> str:
    parts = [str(chain.steps[0].value)]
    for st in chain.steps[1:]:
        if annotate:
            parts.append(f"{st.value}({st.operands[0]},{st.operands[1]})")
        else:
            parts.append(str(st.value))
    return ",".join(parts)


def parse_chain(line: str) -> Chain:
    """Parse one chain line; mixes of annotated and bare values are fine."""
    values: list[int] = []
    operands: list[tuple[int, int] | None] = []
    for j, token in enumerate(_split_chain_tokens(line)):
        token = token.strip()
        if "(" in token:
            vpart, rest = token.split("(", 1)
            if not rest.endswith(")"):
                raise ValueError(f"malformed operand annotation in {token!r}")
            i_s = rest[:-1].split(",")
            if len(i_s) != 2:
                raise ValueError(f"malformed operand annotation in {token!r}")
            values.append(int(vpart))
            operands.append((int(i_s[0]), int(i_s[1])))
        else:
            values.append(int(token))
            operands.append(None)
    if not values:
        raise ValueError("empty chain line")
    filled = []
    for j in range(1, len(values)):
        pair = operands[j]
        if pair is None:
            pair = _smallest_pair(values, j)
            if pair is None:
                raise NoDecomposition(
                    f"value {values[j]} at index {j} is not a sum of two earlier values",
                    index=j,
                )
        filled.append(pair)
    return validate_chain(values, filled)


def _split_chain_tokens(line: str):
    """Split on commas that are not inside operand parentheses."""
    depth = 0
    start = 0
    for pos, ch in enumerate(line):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            yield line[start:pos]
            start = pos + 1
    tail = line[start:].strip()
    if tail:
        yield tail


def read_chain_file(path) -> list[Chain]:
    """Read a chain-per-line text file, skipping blanks and # comments."""
    chains = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            stripped = raw.strip()
            if not stripped or stripped.startswith("#"):
                continue
            chains.append(parse_chain(stripped))
    return chains
