"""Breadth-first search over token configurations encoded as uint64 bitsets.

Two interchangeable engines produce identical stores (same configurations in
the same order, same parents): a numba kernel with an open-addressing hash
table, and a vectorised numpy engine that expands blocks of the queue at once.
``ISRECONF_BACKEND=numpy`` forces the numpy engine; the default is numba when
it imports.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

FOUND, EXHAUSTED, LIMIT, TIMEOUT = "found", "exhausted", "limit", "timeout"

_ONE = np.uint64(1)


def backend() -> str:
    choice = os.environ.get("ISRECONF_BACKEND", "").strip().lower()
    if choice == "numpy" or not HAVE_NUMBA:
        return "numpy"
    if choice not in ("", "numba"):
        raise ValueError(f"unknown ISRECONF_BACKEND {choice!r}")
    return "numba"


def n_words(n: int) -> int:
    return max(1, (n + 63) // 64)


def encode(vertices, words: int) -> np.ndarray:
    row = np.zeros(words, dtype=np.uint64)
    for v in vertices:
        row[v >> 6] |= _ONE << np.uint64(v & 63)
    return row


def decode_rows(rows: np.ndarray, n: int) -> np.ndarray:
    """Boolean membership matrix (len(rows), n) for bitset rows."""
    bits = np.unpackbits(np.ascontiguousarray(rows).view(np.uint8), axis=1, bitorder="little")
    return bits[:, :n].astype(bool)


def adjacency_words(adj, n: int) -> np.ndarray:
    out = np.zeros((n, n_words(n)), dtype=np.uint64)
    for v, nb in enumerate(adj):
        for w in nb:
            out[v, w >> 6] |= _ONE << np.uint64(w & 63)
    return out


def full_mask(n: int) -> np.ndarray:
    return encode(range(n), n_words(n))


@dataclass
class SearchOutput:
    status: str
    store: np.ndarray  # (count, W) configurations in discovery order
    parent: np.ndarray
    move_from: np.ndarray
    move_to: np.ndarray
    found: int  # index of the target in store, or -1

    @property
    def count(self) -> int:
        return len(self.store)

    def path_moves(self, idx: int) -> list[tuple[int, int]]:
        moves = []
        while idx > 0:
            moves.append((int(self.move_from[idx]), int(self.move_to[idx])))
            idx = int(self.parent[idx])
        moves.reverse()
        return moves


def search(adj, n, start, target, sliding, max_configs, max_seconds) -> SearchOutput:
    """BFS from ``start`` until ``target`` is stored or the space is closed.

    ``target=None`` exhausts the reachable set.  Moves are generated by
    (token vertex, destination) in increasing order.
    """
    words = n_words(n)
    adjw = adjacency_words(adj, n)
    s = encode(start, words)
    t = encode(target, words) if target is not None else np.zeros(words, dtype=np.uint64)
    deadline = time.perf_counter() + max_seconds
    k = len(start)
    engine = _search_numba if backend() == "numba" else _search_numpy
    return engine(adjw, n, k, s, t, target is not None, bool(sliding), int(max_configs), deadline)


def _finish(status, store, parent, mf, mt, count, found) -> SearchOutput:
    return SearchOutput(status, store[:count].copy(), parent[:count].copy(), mf[:count].copy(), mt[:count].copy(), found)


# ---------------------------------------------------------------- numba engine

if HAVE_NUMBA:

    @njit(cache=True)
    def _ctz(x):
        # x is a nonzero uint64 with exactly one bit set
        i = 0
        if x >> np.uint64(32):
            i += 32
            x >>= np.uint64(32)
        if x >> np.uint64(16):
            i += 16
            x >>= np.uint64(16)
        if x >> np.uint64(8):
            i += 8
            x >>= np.uint64(8)
        if x >> np.uint64(4):
            i += 4
            x >>= np.uint64(4)
        if x >> np.uint64(2):
            i += 2
            x >>= np.uint64(2)
        if x >> np.uint64(1):
            i += 1
        return i

    @njit(cache=True)
    def _hash(row):
        h = np.uint64(14695981039346656037)
        for x in row:
            h ^= x
            h *= np.uint64(1099511628211)
            h ^= h >> np.uint64(29)
        return h

    @njit(cache=True)
    def _lookup(table, store, row):
        mask = np.uint64(table.shape[0] - 1)
        slot = _hash(row) & mask
        W = row.shape[0]
        while True:
            idx = table[slot]
            if idx < 0:
                return -1, slot
            same = True
            for w in range(W):
                if store[idx, w] != row[w]:
                    same = False
                    break
            if same:
                return idx, slot
            slot = (slot + np.uint64(1)) & mask

    @njit(cache=True)
    def _rehash(table, store, count):
        table[:] = -1
        for i in range(count):
            _, slot = _lookup(table, store, store[i])
            table[slot] = i

    @njit(cache=True)
    def _expand(adjw, fullw, sliding, k, store, parent, mf, mt, table, count, head, budget, target, has_target, max_configs):
        """Expand queue entries from ``head``; returns (code, count, head, found).

        code 0: budget spent, 1: target stored, 2: queue empty,
        3: configuration cap reached, 4: arrays need to grow.
        """
        W = store.shape[1]
        n = adjw.shape[0]
        toks = np.empty(k, dtype=np.int64)
        pre = np.zeros((k + 1, W), dtype=np.uint64)
        suf = np.zeros((k + 1, W), dtype=np.uint64)
        new = np.empty(W, dtype=np.uint64)
        cand = np.empty(W, dtype=np.uint64)
        zero = np.uint64(0)
        stop = head + budget
        while head < count and head < stop:
            if count + k * n > store.shape[0] or 2 * (count + k * n) > table.shape[0]:
                return 4, count, head, -1
            row = store[head]
            t = 0
            for w in range(W):
                x = row[w]
                while x != zero:
                    low = x & (~x + _ONE)
                    toks[t] = w * 64 + _ctz(low)
                    t += 1
                    x ^= low
            for i in range(k):
                for w in range(W):
                    pre[i + 1, w] = pre[i, w] | adjw[toks[i], w]
            for i in range(k - 1, -1, -1):
                for w in range(W):
                    suf[i, w] = suf[i + 1, w] | adjw[toks[i], w]
            for i in range(k):
                u = toks[i]
                for w in range(W):
                    base = adjw[u, w] if sliding else fullw[w]
                    cand[w] = base & ~(pre[i, w] | suf[i + 1, w] | row[w])
                for w in range(W):
                    x = cand[w]
                    while x != zero:
                        low = x & (~x + _ONE)
                        x ^= low
                        v = w * 64 + _ctz(low)
                        for j in range(W):
                            new[j] = row[j]
                        new[u >> 6] ^= _ONE << np.uint64(u & 63)
                        new[v >> 6] ^= _ONE << np.uint64(v & 63)
                        idx, slot = _lookup(table, store, new)
                        if idx >= 0:
                            continue
                        if count >= max_configs:
                            return 3, count, head, -1
                        for j in range(W):
                            store[count, j] = new[j]
                        parent[count] = head
                        mf[count] = u
                        mt[count] = v
                        table[slot] = count
                        count += 1
                        if has_target:
                            same = True
                            for j in range(W):
                                if new[j] != target[j]:
                                    same = False
                                    break
                            if same:
                                return 1, count, head, count - 1
            head += 1
        if head >= count:
            return 2, count, head, -1
        return 0, count, head, -1


def _search_numba(adjw, n, k, s, t, has_target, sliding, max_configs, deadline):
    W = adjw.shape[1]
    cap = 1024 + 2 * k * n
    store = np.zeros((cap, W), dtype=np.uint64)
    parent = np.full(cap, -1, dtype=np.int64)
    mf = np.full(cap, -1, dtype=np.int64)
    mt = np.full(cap, -1, dtype=np.int64)
    table = np.full(1 << int(np.ceil(np.log2(4 * cap))), -1, dtype=np.int64)
    store[0] = s
    count = 1
    _rehash(table, store, count)
    if has_target and np.array_equal(s, t):
        return _finish(FOUND, store, parent, mf, mt, 1, 0)
    fullw = full_mask(n)
    head = 0
    budget = 4096
    while True:
        code, count, head, found = _expand(
            adjw, fullw, sliding, k, store, parent, mf, mt, table, count, head, budget, t, has_target, max_configs
        )
        if code == 1:
            return _finish(FOUND, store, parent, mf, mt, count, found)
        if code == 2:
            return _finish(EXHAUSTED, store, parent, mf, mt, count, -1)
        if code == 3:
            return _finish(LIMIT, store, parent, mf, mt, count, -1)
        if code == 4:
            cap = 2 * cap
            store = np.concatenate([store, np.zeros((cap - len(store), W), dtype=np.uint64)])
            parent, mf, mt = (np.concatenate([a, np.full(cap - len(a), -1, dtype=np.int64)]) for a in (parent, mf, mt))
            table = np.full(2 * len(table), -1, dtype=np.int64)
            _rehash(table, store, count)
            continue
        if time.perf_counter() > deadline:
            return _finish(TIMEOUT, store, parent, mf, mt, count, -1)


# ---------------------------------------------------------------- numpy engine


def _void(rows: np.ndarray) -> np.ndarray:
    rows = np.ascontiguousarray(rows)
    return rows.view(np.dtype((np.void, rows.dtype.itemsize * rows.shape[1]))).ravel()


def _search_numpy(adjw, n, k, s, t, has_target, sliding, max_configs, deadline):
    W = adjw.shape[1]
    chunks = [s[None, :]]
    parents = [np.array([-1])]
    froms = [np.array([-1])]
    tos = [np.array([-1])]
    count = 1
    seen = _void(s[None, :]).copy()  # sorted
    if has_target and np.array_equal(s, t):
        return _numpy_out(FOUND, chunks, parents, froms, tos, 0)
    tvoid = _void(t[None, :])[0]
    fullw = full_mask(n)
    queue = s[None, :]  # rows not yet expanded, in order
    head = 0
    word_of = np.arange(n) >> 6
    bit_of = np.left_shift(np.uint64(1), (np.arange(n) & 63).astype(np.uint64))
    while len(queue):
        block_len = max(1, min(len(queue), (1 << 22) // max(1, k * n)))
        block = queue[:block_len]
        queue = queue[block_len:]
        F = len(block)
        member = decode_rows(block, n)
        toks = np.nonzero(member)[1].reshape(F, k)
        nbw = adjw[toks]  # (F, k, W)
        pre = np.zeros_like(nbw)
        pre[:, 1:] = np.bitwise_or.accumulate(nbw, axis=1)[:, :-1]
        suf = np.zeros_like(nbw)
        suf[:, :-1] = np.bitwise_or.accumulate(nbw[:, ::-1], axis=1)[:, ::-1][:, 1:]
        blocked = pre | suf | block[:, None, :]
        base = nbw if sliding else np.broadcast_to(fullw, nbw.shape)
        cand = base & ~blocked
        cbits = decode_rows(cand.reshape(F * k, W), n).reshape(F, k, n)
        f, i, v = np.nonzero(cbits)
        u = toks[f, i]
        rows = block[f].copy()
        r = np.arange(len(f))
        rows[r, word_of[u]] ^= bit_of[u]
        rows[r, word_of[v]] ^= bit_of[v]
        keys = _void(rows)
        _, first = np.unique(keys, return_index=True)
        first.sort()
        keys_u = keys[first]
        pos = np.searchsorted(seen, keys_u)
        pos[pos == len(seen)] = 0
        fresh = first[seen[pos] != keys_u] if len(seen) else first
        new_rows = rows[fresh]
        new_parent = head + f[fresh]
        new_from, new_to = u[fresh], v[fresh]
        head += F
        status, cut, found = None, len(fresh), -1
        if has_target:
            hit = np.nonzero(_void(new_rows) == tvoid)[0]
            if len(hit):
                cut = int(hit[0]) + 1
                status = FOUND
        if count + cut > max_configs:
            cut = max_configs - count
            status = LIMIT
        elif status == FOUND:
            found = count + cut - 1
        chunks.append(new_rows[:cut])
        parents.append(new_parent[:cut])
        froms.append(new_from[:cut])
        tos.append(new_to[:cut])
        count += cut
        if status is not None:
            return _numpy_out(status, chunks, parents, froms, tos, found)
        seen = np.sort(np.concatenate([seen, _void(new_rows)]))
        queue = np.concatenate([queue, new_rows]) if len(queue) else new_rows
        if time.perf_counter() > deadline and len(queue):
            return _numpy_out(TIMEOUT, chunks, parents, froms, tos, -1)
    return _numpy_out(EXHAUSTED, chunks, parents, froms, tos, -1)


def _numpy_out(status, chunks, parents, froms, tos, found) -> SearchOutput:
    cat = lambda xs: np.concatenate([np.asarray(x, dtype=np.int64) for x in xs])
    return SearchOutput(status, np.concatenate(chunks), cat(parents), cat(froms), cat(tos), found)
