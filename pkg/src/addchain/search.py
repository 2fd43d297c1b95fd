"""Exact minimal addition-chain search.

Two independent searches live here:

* the engine (`ell`) -- iterative-deepening DFS with a fixed candidate
  order, a mandatory reachability cutoff (a partial chain whose last value
  cannot reach the target even by pure doubling is abandoned), an optional
  popcount-based starting depth, and an optional golden-ratio growth budget
  on nondoubling steps;
* the oracle (`ell_oracle`) -- a minimally pruned iterative deepening used
  as ground truth in tests.  It shares no traversal code with the engine
  and applies only the doubling cutoff.

Both are certified exact: iterative deepening proves minimality by
exhausting every shorter depth.  Hot loops are numba-compiled; results are
deterministic and independent of the optional pruning flags.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .core import Chain, binary_chain, nu, validate_chain
from .errors import BudgetExhausted, CapExceeded

GAMMA = (1 + math.sqrt(5)) / 2
LOG2_GAMMA = math.log2(GAMMA)

# Engine accepts targets below 2^39 so chain length stays under the kernel's
# fixed stack depth (binary-method length < 78); oracle cap is 2^20.
ENGINE_MAX_N = 1 << 39
ORACLE_MAX_N = 1 << 20

_ENGINE_MAXD = 80
_ENGINE_WIDTH = (_ENGINE_MAXD + 2) * (_ENGINE_MAXD + 3) // 2
_ORACLE_MAXD = 42
_ORACLE_WIDTH = (_ORACLE_MAXD + 2) * (_ORACLE_MAXD + 3) // 2

# Kernel exit statuses.
_FOUND = 0
_EXHAUSTED = 1
_BUDGET = 2


@dataclass(frozen=True)
class SearchConfig:
    """Optional pruning switches; they change speed, never results."""

    use_schonhage_pruning: bool = True
    use_gamma_pruning: bool = True
    node_budget: int | None = None

    def __post_init__(self):
        if self.node_budget is not None and self.node_budget <= 0:
            raise ValueError("node_budget must be positive")


@dataclass(frozen=True)
class SearchResult:
    n: int
    ell: int
    witness: Chain
    nodes_expanded: int
    prunings_applied: tuple[str, ...] = ()
    exact: bool = True


@njit(cache=True, nogil=True)
def _engine_dls(n, L, ndmax, budget, chain_out):
    """Depth-limited engine search for a length-L chain to n.

    Candidates at each node are enumerated star-first (sums using the last
    element, decreasing), then remaining pair sums in decreasing order,
    deduplicated.  Extensions must exceed the current maximum, stay <= n,
    and be able to reach n by doubling in the remaining steps.  ndmax caps
    the number of nondoubling steps on a branch (golden-ratio growth bound).

    Returns (status, nodes, doubling_bound_bound, gamma_hits); on _FOUND the
    chain values are in chain_out[0..L].
    """
    cands = np.empty((_ENGINE_MAXD + 2, _ENGINE_WIDTH), dtype=np.int64)
    cnt = np.zeros(_ENGINE_MAXD + 2, dtype=np.int64)
    ptr = np.zeros(_ENGINE_MAXD + 2, dtype=np.int64)
    ndc = np.zeros(_ENGINE_MAXD + 2, dtype=np.int64)
    tmp = np.empty(_ENGINE_WIDTH, dtype=np.int64)

    chain_out[0] = 1
    nodes = np.int64(0)
    doubling_binds = np.int64(0)
    gamma_hits = np.int64(0)

    j = 0
    expand = True
    while j >= 0:
        if expand:
            nodes += 1
            if nodes > budget:
                return _BUDGET, nodes, doubling_binds, gamma_hits
            a = chain_out[j]
            d = L - j
            de = d - 1
            if de > 62:
                de = 62
            need = (n + (np.int64(1) << de) - 1) >> de
            if need > a + 1:
                doubling_binds += 1
            lo = a + 1
            if need > lo:
                lo = need
            if d == 1:
                # exact last step: two-pointer over the sorted chain
                p, q = 0, j
                while p <= q:
                    s = chain_out[p] + chain_out[q]
                    if s == n:
                        chain_out[j + 1] = n
                        return _FOUND, nodes, doubling_binds, gamma_hits
                    if s < n:
                        p += 1
                    else:
                        q -= 1
                expand = False
                continue
            # star sums, already in decreasing order
            c = 0
            for i in range(j, -1, -1):
                x = a + chain_out[i]
                if x < lo:
                    break
                if x <= n:
                    cands[j, c] = x
                    c += 1
            nstar = c
            # remaining pair sums, collected then insertion-sorted (desc)
            t = 0
            for s in range(j - 1, -1, -1):
                b = chain_out[s]
                if b + b < lo:
                    break
                for i in range(s, -1, -1):
                    x = b + chain_out[i]
                    if x < lo:
                        break
                    if x <= n:
                        tmp[t] = x
                        t += 1
            for u in range(1, t):
                x = tmp[u]
                v = u - 1
                while v >= 0 and tmp[v] < x:
                    tmp[v + 1] = tmp[v]
                    v -= 1
                tmp[v + 1] = x
            # append non-star sums not already offered by a star pair
            p = 0
            for u in range(t):
                x = tmp[u]
                if u > 0 and tmp[u - 1] == x:
                    continue
                while p < nstar and cands[j, p] > x:
                    p += 1
                if p < nstar and cands[j, p] == x:
                    continue
                cands[j, c] = x
                c += 1
            cnt[j] = c
            ptr[j] = 0
        # visit next candidate at this level
        advanced = False
        a = chain_out[j]
        dbl = a + a
        while ptr[j] < cnt[j]:
            x = cands[j, ptr[j]]
            ptr[j] += 1
            nd = ndc[j]
            if x != dbl:
                nd += 1
                if nd > ndmax:
                    gamma_hits += 1
                    continue
            chain_out[j + 1] = x
            ndc[j + 1] = nd
            j += 1
            expand = True
            advanced = True
            break
        if not advanced:
            j -= 1
            expand = False
    return _EXHAUSTED, nodes, doubling_binds, gamma_hits


@njit(cache=True, nogil=True)
def _oracle_dls(n, L):
    """Depth-limited search with only the doubling cutoff.

    Pairs are walked directly in (s desc, i desc) order with a per-level
    tried-value list for deduplication; no candidate array is materialized
    and no bound other than value-times-2^remaining is consulted.
    Returns (found, nodes).
    """
    chain = np.empty(_ORACLE_MAXD + 2, dtype=np.int64)
    s_idx = np.empty(_ORACLE_MAXD + 2, dtype=np.int64)
    i_idx = np.empty(_ORACLE_MAXD + 2, dtype=np.int64)
    tried = np.empty((_ORACLE_MAXD + 2, _ORACLE_WIDTH), dtype=np.int64)
    tried_cnt = np.zeros(_ORACLE_MAXD + 2, dtype=np.int64)

    chain[0] = 1
    nodes = np.int64(1)
    j = 0
    s_idx[0] = 0
    i_idx[0] = 0
    tried_cnt[0] = 0
    while j >= 0:
        d = L - j
        a = chain[j]
        de = d - 1
        if de > 62:
            de = 62
        need = (n + (np.int64(1) << de) - 1) >> de
        lo = a + 1
        if need > lo:
            lo = need
        if d == 1:
            hit = False
            for s in range(j, -1, -1):
                b = chain[s]
                if b + b < n:
                    break
                x = n - b
                if x < 1 or x > b:
                    continue
                p, q = 0, s
                while p <= q:
                    mid = (p + q) >> 1
                    if chain[mid] == x:
                        hit = True
                        break
                    elif chain[mid] < x:
                        p = mid + 1
                    else:
                        q = mid - 1
                if hit:
                    break
            if hit:
                return True, nodes
            j -= 1
            continue
        found_x = np.int64(-1)
        si = s_idx[j]
        ii = i_idx[j]
        while si >= 0:
            b = chain[si]
            if b + b < lo:
                si = -1
                break
            while ii >= 0:
                x = b + chain[ii]
                ii -= 1
                if x < lo:
                    ii = -1
                    break
                if x > n:
                    continue
                dup = False
                for t in range(tried_cnt[j]):
                    if tried[j, t] == x:
                        dup = True
                        break
                if not dup:
                    found_x = x
                    break
            if found_x > 0:
                break
            si -= 1
            ii = si
        s_idx[j] = si
        i_idx[j] = ii
        if found_x < 0:
            j -= 1
            continue
        tried[j, tried_cnt[j]] = found_x
        tried_cnt[j] += 1
        j += 1
        nodes += 1
        chain[j] = found_x
        s_idx[j] = j
        i_idx[j] = j
        tried_cnt[j] = 0
    return False, nodes


def _start_depth(n: int, use_schonhage: bool) -> tuple[int, bool]:
    base = (n - 1).bit_length()  # ceil(log2 n)
    if not use_schonhage:
        return base, False
    # the epsilon keeps a float wobble from overshooting the true ceiling,
    # which would skip the witness depth; undershooting only costs time
    sch = math.ceil(math.log2(n) + math.log2(nu(n)) - 2.13 - 1e-9)
    return max(base, sch), sch > base


def _nd_budget(n: int, L: int) -> int:
    # largest nondoubling-step count compatible with 2^A * gamma^nd >= n
    return int((L - math.log2(n)) / (1 - LOG2_GAMMA) + 1e-9)


def _canonical_operands(values: list[int]) -> list[tuple[int, int]]:
    """Operand pairs matching the engine's candidate order.

    For each step, the star pair (using the previous element) wins when one
    exists; otherwise the pair with the largest smaller-summand index.
    """
    index = {v: i for i, v in enumerate(values)}
    pairs = []
    for j in range(1, len(values)):
        v = values[j]
        rest = v - values[j - 1]
        i = index.get(rest)
        if i is not None and i <= j - 1:
            pairs.append((min(i, j - 1), j - 1))
            continue
        pair = None
        for s in range(j - 2, -1, -1):
            rest = v - values[s]
            if rest > values[s]:
                break
            i = index.get(rest)
            if i is not None and i <= s:
                pair = (i, s)
                break
        if pair is None:  # cannot happen for kernel output
            raise AssertionError(f"no operand pair for step {j} of {values}")
        pairs.append(pair)
    return pairs


def ell(n: int, config: SearchConfig | None = None) -> SearchResult:
    """Exact minimal chain length for n with one witness chain.

    Iterative deepening: depths below the returned length are exhausted,
    which certifies minimality.  Raises BudgetExhausted (carrying the
    binary-method fallback, flagged inexact) when config.node_budget is hit
    first.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n >= ENGINE_MAX_N:
        raise CapExceeded(f"search supports n < 2^39, got {n}")
    config = config or SearchConfig()
    if n == 1:
        return SearchResult(1, 0, validate_chain([1], []), 0)

    budget = config.node_budget if config.node_budget is not None else (1 << 62)
    start, sch_raised = _start_depth(n, config.use_schonhage_pruning)
    pruned: set[str] = set()
    if sch_raised:
        pruned.add("schonhage-start")

    chain_out = np.empty(_ENGINE_MAXD + 2, dtype=np.int64)
    total_nodes = 0
    L = start
    while True:
        ndmax = _nd_budget(n, L) if config.use_gamma_pruning else 1 << 32
        status, nodes, d_binds, g_hits = _engine_dls(
            n, L, ndmax, budget - total_nodes, chain_out
        )
        total_nodes += int(nodes)
        if d_binds > 0:
            pruned.add("doubling")
        if g_hits > 0:
            pruned.add("gamma")
        if status == _FOUND:
            values = [int(v) for v in chain_out[: L + 1]]
            witness = validate_chain(values, _canonical_operands(values))
            return SearchResult(
                n, L, witness, total_nodes, tuple(sorted(pruned))
            )
        if status == _BUDGET:
            fallback = binary_chain(n)
            best = SearchResult(
                n,
                fallback.length,
                fallback,
                total_nodes,
                tuple(sorted(pruned)),
                exact=False,
            )
            raise BudgetExhausted(
                f"node budget {config.node_budget} exhausted at depth {L} "
                f"for n={n}",
                best=best,
                proven_lower=L,
            )
        L += 1


def ell_oracle(n: int) -> int:
    """Ground-truth minimal length by minimally pruned iterative deepening."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > ORACLE_MAX_N:
        raise CapExceeded(f"oracle supports n <= 2^20, got {n}")
    if n == 1:
        return 0
    L = (n - 1).bit_length()
    while True:
        found, _ = _oracle_dls(n, L)
        if found:
            return L
        L += 1


def shortest_chain(n: int, config: SearchConfig | None = None) -> Chain:
    """One minimal chain to n (the engine's deterministic witness)."""
    return ell(n, config).witness


def exists_chain_of_length(n: int, L: int) -> bool:
    """Whether any chain of exactly length L reaches n (exact, engine kernel)."""
    if n < 1 or L < 0:
        raise ValueError("need n >= 1 and L >= 0")
    if n >= ENGINE_MAX_N or L > _ENGINE_MAXD:
        raise CapExceeded("beyond supported search range")
    if n == 1:
        return L == 0
    if L == 0:
        return False
    chain_out = np.empty(_ENGINE_MAXD + 2, dtype=np.int64)
    status, _, _, _ = _engine_dls(n, L, _nd_budget(n, L), 1 << 62, chain_out)
    return status == _FOUND
