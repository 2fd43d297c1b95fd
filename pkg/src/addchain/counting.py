"""Exact reachability counting: H(k), interval counts F(m, r), histograms.

H(k) counts the distinct integers reachable by some chain of length <= k,
found by exhaustive DFS over strictly increasing chains (reachability is a
property of the whole chain prefix, so no value-set shortcut is sound).
F(m, r) counts n in [2^m, 2^(m+1)) with minimal length <= m + r and is a
prefix-sum read of the interval's minimal-length histogram.  Interval
evaluation can shard across threads and consults a file-backed cache of
minimal lengths.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import CacheError, CapExceeded
from .search import ell

H_MAX_K = 12
F_MAX_M_UNCACHED = 14
F_MAX_M = 18

_SPOT_CHECKS = 4
_SPOT_CHECK_MAX_N = 1 << 16


@dataclass(frozen=True)
class HResult:
    k: int
    h: int
    reachable: tuple[int, ...] | None = None


@dataclass(frozen=True)
class CountResult:
    m: int
    r: float
    f: int
    histogram: dict[int, int]


@njit(cache=True, nogil=True)
def _reach_dfs(k, reached):
    """Mark every integer reachable by an increasing chain of length <= k."""
    chain = np.empty(k + 2, dtype=np.int64)
    s_idx = np.empty(k + 2, dtype=np.int64)
    i_idx = np.empty(k + 2, dtype=np.int64)
    width = (k + 2) * (k + 3) // 2
    tried = np.empty((k + 2, width), dtype=np.int64)
    tried_cnt = np.zeros(k + 2, dtype=np.int64)

    chain[0] = 1
    reached[1] = 1
    if k == 0:
        return
    j = 0
    s_idx[0] = 0
    i_idx[0] = 0
    tried_cnt[0] = 0
    while j >= 0:
        if k - j == 0:
            j -= 1
            continue
        a = chain[j]
        found_x = np.int64(-1)
        si = s_idx[j]
        ii = i_idx[j]
        while si >= 0:
            b = chain[si]
            if b + b <= a:
                si = -1
                break
            while ii >= 0:
                x = b + chain[ii]
                ii -= 1
                if x <= a:
                    ii = -1
                    break
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
        reached[found_x] = 1
        j += 1
        chain[j] = found_x
        s_idx[j] = j
        i_idx[j] = j
        tried_cnt[j] = 0


def count_H(k: int, collect: bool = False) -> HResult:
    """Exact count of integers reachable by a chain of length <= k.

    Cost grows close to 12x per unit of k; the cap keeps runs desk-scale.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    if k > H_MAX_K:
        raise CapExceeded(f"count_H supports k <= {H_MAX_K}, got {k}")
    reached = np.zeros((1 << k) + 1, dtype=np.uint8)
    _reach_dfs(k, reached)
    h = int(np.count_nonzero(reached))
    reachable = None
    if collect:
        reachable = tuple(int(v) for v in np.nonzero(reached)[0])
    return HResult(k, h, reachable)


class EllCache:
    """File-backed map n -> minimal chain length.

    Text format: one ``n,ell`` record per line, strictly increasing n, no
    header.  Loading merges records into memory; saving rewrites the whole
    file sorted.  A few loaded entries are spot-checked against the search
    engine so a corrupt file fails fast.
    """

    def __init__(self, source_path: str | os.PathLike | None = None):
        self.entries: dict[int, int] = {}
        self.source_path = os.fspath(source_path) if source_path else None
        if self.source_path and os.path.exists(self.source_path):
            self.merge_file(self.source_path)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, n: int) -> bool:
        return n in self.entries

    def get(self, n: int) -> int | None:
        return self.entries.get(n)

    def merge_file(self, path: str | os.PathLike) -> int:
        """Merge records from a cache file; returns the record count read."""
        loaded: dict[int, int] = {}
        last = 0
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.strip()
                if not line:
                    continue
                try:
                    n_str, ell_str = line.split(",")
                    n, ell_val = int(n_str), int(ell_str)
                except ValueError:
                    raise CacheError(f"{path}:{lineno}: malformed record {line!r}")
                if n <= last:
                    raise CacheError(
                        f"{path}:{lineno}: n values must be strictly increasing"
                    )
                last = n
                loaded[n] = ell_val
        for n, ell_val in loaded.items():
            old = self.entries.get(n)
            if old is not None and old != ell_val:
                raise CacheError(
                    f"{path}: cached ell({n})={ell_val} conflicts with {old}"
                )
        self._spot_check(loaded, path)
        self.entries.update(loaded)
        return len(loaded)

    def _spot_check(self, loaded: dict[int, int], path):
        eligible = sorted(n for n in loaded if n <= _SPOT_CHECK_MAX_N)
        if not eligible:
            return
        step = max(1, len(eligible) // _SPOT_CHECKS)
        for n in eligible[::step][:_SPOT_CHECKS]:
            actual = ell(n).ell
            if actual != loaded[n]:
                raise CacheError(
                    f"{path}: cached ell({n})={loaded[n]} but search gives {actual}"
                )

    def add_many(self, items: dict[int, int]) -> None:
        self.entries.update(items)

    def save(self, path: str | os.PathLike | None = None) -> str:
        target = os.fspath(path) if path else self.source_path
        if target is None:
            raise ValueError("no path to save to")
        tmp = f"{target}.tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            for n in sorted(self.entries):
                fh.write(f"{n},{self.entries[n]}\n")
        os.replace(tmp, target)
        return target


def _ell_of_targets(targets) -> dict[int, int]:
    return {n: ell(n).ell for n in targets}


def _interval_ells(m: int, cache: EllCache | None, threads: int) -> dict[int, int]:
    lo, hi = 1 << m, 1 << (m + 1)
    out: dict[int, int] = {}
    missing: list[int] = []
    for n in range(lo, hi):
        if cache is not None and n in cache:
            out[n] = cache.entries[n]
        else:
            missing.append(n)
    if missing and m > F_MAX_M_UNCACHED:
        raise CapExceeded(
            f"m={m} needs a warm cache ({len(missing)} values missing; "
            f"uncached cap is m <= {F_MAX_M_UNCACHED})"
        )
    if missing:
        fresh: dict[int, int] = {}
        if threads <= 1:
            fresh = _ell_of_targets(missing)
        else:
            # contiguous shards, merged in shard order; the search kernel
            # releases the GIL so shards genuinely run in parallel
            shards = np.array_split(np.array(missing, dtype=np.int64), threads)
            with ThreadPoolExecutor(max_workers=threads) as pool:
                futures = [
                    pool.submit(_ell_of_targets, [int(n) for n in shard])
                    for shard in shards
                    if len(shard)
                ]
                for fut in futures:
                    fresh.update(fut.result())
        out.update(fresh)
        if cache is not None:
            cache.add_many(fresh)
            if cache.source_path:
                cache.save()
    return out


def ell_histogram(
    m: int, cache: EllCache | None = None, threads: int = 1
) -> dict[int, int]:
    """Histogram of minimal chain lengths over [2^m, 2^(m+1))."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if m > F_MAX_M:
        raise CapExceeded(f"supported up to m = {F_MAX_M}, got {m}")
    ells = _interval_ells(m, cache, threads)
    hist: dict[int, int] = {}
    for v in ells.values():
        hist[v] = hist.get(v, 0) + 1
    return dict(sorted(hist.items()))


def count_F(
    m: int,
    r: float,
    cache: EllCache | None = None,
    threads: int = 1,
) -> CountResult:
    """Exact count of n in [2^m, 2^(m+1)) whose minimal length is <= m + r.

    The threshold compares the integer minimal length against the real
    m + r directly; r is never floored.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if r < 0:
        raise ValueError("r must be >= 0")
    hist = ell_histogram(m, cache, threads)
    f = sum(count for length, count in hist.items() if length <= m + r)
    return CountResult(m, float(r), f, hist)
