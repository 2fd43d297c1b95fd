import random

import pytest

from addchain.core import Chain, ChainStep, validate_chain


def make_random_chain(rng: random.Random, length: int) -> Chain:
    """A random valid chain of exactly the given length.

    Each step picks a random operand pair among those whose sum exceeds the
    current maximum; doubling the maximum is always available, so the build
    never gets stuck.
    """
    values = [1]
    operands = []
    while len(values) <= length:
        j = len(values)
        pairs = [
            (i, s)
            for s in range(j)
            for i in range(s + 1)
            if values[i] + values[s] > values[-1]
        ]
        i, s = rng.choice(pairs)
        values.append(values[i] + values[s])
        operands.append((i, s))
    return validate_chain(values, operands)


@pytest.fixture
def rng():
    return random.Random(0xADDC)
