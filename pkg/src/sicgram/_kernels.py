"""Compiled inner loops: necklace generation and batched linked-pair counting.

Letters are small integers a=0, b=1, A=2, B=3, so ``x ^ 2`` is the inverse
of ``x`` and integer order is the canonical letter order.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def reset_walk(a, P, state):
    a[:] = 0
    P[:] = 0
    P[1] = 1
    state[0] = 1


@njit(cache=True)
def seek_walk(a, P, state, cursor):
    """Position the walk just after ``cursor`` (a word it has emitted)."""
    n = cursor.shape[0]
    a[0] = 0
    for t in range(1, n + 1):
        a[t] = cursor[t - 1]
    P[1] = 1
    for t in range(1, n + 1):
        if a[t] == a[t - P[t]]:
            P[t + 1] = P[t]
        else:
            P[t + 1] = t
    a[n] += 1
    state[0] = n


@njit(cache=True)
def fill_necklaces(a, P, state, n, prefix, out, include_powers):
    """Write up to ``out.shape[0]`` canonical words into ``out``; return the count.

    Depth-first FKM walk over prenecklaces with the no-cancellation rule
    applied letter by letter and the wrap-around rule at emission. The walk
    state lives in ``a``, ``P`` and ``state[0]`` (0 once exhausted), so a
    later call continues exactly where this one stopped. Letters at the
    first ``len(prefix)`` positions are pinned to ``prefix``.
    """
    k = prefix.shape[0]
    cap = out.shape[0]
    count = 0
    t = state[0]
    while t > 0 and count < cap:
        x = a[t]
        if t <= k:
            want = prefix[t - 1]
            if x < want:
                a[t] = want
                continue
            if x > want:
                x = 4
        if x > 3:
            t -= 1
            if t > 0:
                a[t] += 1
            continue
        if t > 1 and x == (a[t - 1] ^ 2):
            a[t] += 1
            continue
        if x == a[t - P[t]]:
            P[t + 1] = P[t]
        else:
            P[t + 1] = t
        if t == n:
            p = P[n + 1]
            if (p == n or (include_powers and n % p == 0)) and x != (a[1] ^ 2):
                for i in range(n):
                    out[count, i] = a[i + 1]
                count += 1
            a[t] += 1
            continue
        t += 1
        a[t] = a[t - P[t]]
    state[0] = t
    return count


@njit(cache=True)
def _key_less(keys, r, s, n):
    # -1: r < s, 1: r > s, 0: equal
    for k in range(n):
        if keys[r, k] != keys[s, k]:
            return -1 if keys[r, k] < keys[s, k] else 1
    return 0


@njit(cache=True)
def batch_self_intersection(words, count, rank, root_rank, out):
    """Self-intersection numbers of the first ``count`` rows of ``words``.

    ``rank[incoming, x]`` is the position of ``x`` in the linear order seen
    when arriving from direction ``incoming``; ``root_rank`` is the order at
    the basepoint. Rows whose rays are not pairwise distinct (proper powers)
    get -1.
    """
    n = words.shape[1]
    m = 2 * n
    keys = np.empty((m, n), dtype=np.int8)
    order = np.empty(m, dtype=np.int64)
    pos = np.empty(m, dtype=np.int64)
    for r in range(count):
        w = words[r]
        for i in range(n):
            # ray 2i: backward from vertex i; ray 2i+1: forward from vertex i
            prev = -1
            for k in range(n):
                x = w[(i - 1 - k) % n] ^ 2
                keys[2 * i, k] = root_rank[x] if k == 0 else rank[prev ^ 2, x]
                prev = x
            prev = -1
            for k in range(n):
                x = w[(i + k) % n]
                keys[2 * i + 1, k] = root_rank[x] if k == 0 else rank[prev ^ 2, x]
                prev = x
        bad = False
        for s in range(m):
            order[s] = s
        for s in range(1, m):
            cur = order[s]
            u = s - 1
            while u >= 0:
                c = _key_less(keys, cur, order[u], n)
                if c == 0:
                    bad = True
                if c >= 0:
                    break
                order[u + 1] = order[u]
                u -= 1
            order[u + 1] = cur
        if bad:
            out[r] = -1
            continue
        for s in range(m):
            pos[order[s]] = s
        total = 0
        for i in range(n):
            lo = pos[2 * i]
            hi = pos[2 * i + 1]
            if lo > hi:
                lo, hi = hi, lo
            wi = w[i]
            wp = w[i - 1] if i > 0 else w[n - 1]
            for j in range(i + 1, n):
                q0 = pos[2 * j]
                q1 = pos[2 * j + 1]
                in0 = lo < q0 and q0 < hi
                in1 = lo < q1 and q1 < hi
                if in0 != in1:
                    wj = w[j]
                    wq = w[j - 1]
                    shared = 0
                    if wi == wj:
                        shared += 1
                    if wp == wq:
                        shared += 1
                    if wi == (wq ^ 2):
                        shared += 1
                    if wp == (wj ^ 2):
                        shared += 1
                    total += 2 - shared
        out[r] = total // 2
    return out
