"""Compiled op-count kernel for complete Horner schemes.

Same semantics as ``SchemeEvaluator._count_py``.  Rows are radix-sorted by
the scheme order so every sub-polynomial of the nesting is a contiguous row
range, the nesting is walked with an explicit stack, and nodes are
hash-consed in an open-addressing table that is reused across calls: a slot
is live only if its generation stamp equals the current call's stamp, so
nothing is cleared between evaluations.  ``hs`` holds the structural hash
of every node id (leaves pre-filled by the caller) and orients differences
exactly as ``csedag`` does.
"""

import numpy as np
from numba import njit

MUL, ADD, SUB = 1, 2, 3


_GOLDEN = np.uint64(11400714819323198485)
_SM1 = np.uint64(0x9E3779B97F4A7C15)
_SM2 = np.uint64(0xBF58476D1CE4E5B9)
_SM3 = np.uint64(0x94D049BB133111EB)
_U3 = np.uint64(3)


@njit(cache=True, inline="always")
def _fmix(z):
    z = z + _SM1
    z = (z ^ (z >> np.uint64(30))) * _SM2
    z = (z ^ (z >> np.uint64(27))) * _SM3
    return z ^ (z >> np.uint64(31))


@njit(cache=True, inline="always")
def _op_hash(kind, ha, hb):
    # hash codes: MUL 3, ADD 4, SUB 5 (csedag._HASH_CODE)
    if kind != SUB and ha > hb:
        ha, hb = hb, ha
    return _fmix((_fmix(ha + np.uint64(kind + 2)) * _U3) ^ hb)


@njit(cache=True, inline="always")
def _node(table, hs, stamp, ctr, kind, a, b):
    # table rows are (generation, key, node id)
    key = (kind << 60) | (a << 30) | b
    mask = table.shape[0] - 1
    # Fibonacci hashing: the top bits of key * 2^64/phi
    shift = np.uint64(64 - ctr[4])
    h = np.int64((np.uint64(key) * _GOLDEN) >> shift)
    while True:
        if table[h, 0] != stamp:
            nid = ctr[0]
            table[h, 0] = stamp
            table[h, 1] = key
            table[h, 2] = nid
            hs[nid] = _op_hash(kind, hs[a], hs[b])
            ctr[0] = nid + 1
            ctr[kind] += 1
            return nid
        if table[h, 1] == key:
            return table[h, 2]
        h = (h + 1) & mask


@njit(cache=True, inline="always")
def _mul(table, hs, stamp, ctr, a, b):
    if a < b:
        return _node(table, hs, stamp, ctr, MUL, a, b)
    return _node(table, hs, stamp, ctr, MUL, b, a)


@njit(cache=True, inline="always")
def _times_power(table, hs, stamp, ctr, pw, pwgen, v, e, inner, one):
    # v^e (left-deep chain, memoized per call) times inner; inner == one is omitted
    p = v
    for k in range(2, e + 1):
        if pwgen[v, k] != stamp:
            pw[v, k] = _mul(table, hs, stamp, ctr, p, v)
            pwgen[v, k] = stamp
        p = pw[v, k]
    if inner == one:
        return p
    return _mul(table, hs, stamp, ctr, p, inner)


@njit(cache=True)
def _log2(x):
    k = 0
    while (1 << (k + 1)) <= x:
        k += 1
    return k


@njit(cache=True)
def count_scheme(X, order, neg, cid, one, table, hs, stamp, pw, pwgen, maxexp):
    """Return ``(muls, adds)`` for the effective extraction ``order``.

    Returns ``(-1, -1)`` when the node table passes half load; the caller
    grows it and retries.
    """
    T = X.shape[0]
    n = order.shape[0]
    ctr = np.zeros(5, dtype=np.int64)
    ctr[0] = cid.max() + 1 if T else 0
    ctr[4] = _log2(table.shape[0])
    limit = ctr[0] + table.shape[0] // 2
    if T == 0:
        return 0, 0

    # stable LSD counting sort by order[n-1], ..., order[0]
    perm = np.arange(T)
    tmp = np.empty(T, dtype=np.int64)
    cnt = np.empty(maxexp + 2, dtype=np.int64)
    for d in range(n - 1, -1, -1):
        col = order[d]
        cnt[:] = 0
        for i in range(T):
            cnt[X[perm[i], col] + 1] += 1
        for k in range(1, maxexp + 2):
            cnt[k] += cnt[k - 1]
        for i in range(T):
            r = perm[i]
            e = X[r, col]
            tmp[cnt[e]] = r
            cnt[e] += 1
        perm, tmp = tmp, perm
    E = np.empty((T, n), dtype=np.int64)
    sneg = np.empty(T, dtype=np.bool_)
    scid = np.empty(T, dtype=np.int64)
    for i in range(T):
        r = perm[i]
        for d in range(n):
            E[i, d] = X[r, order[d]]
        sneg[i] = neg[r]
        scid[i] = cid[r]

    depth_cap = n + 2
    f_lo = np.empty(depth_cap, dtype=np.int64)
    f_d = np.empty(depth_cap, dtype=np.int64)
    f_ghi = np.empty(depth_cap, dtype=np.int64)
    f_prev = np.empty(depth_cap, dtype=np.int64)
    f_acc = np.empty(depth_cap, dtype=np.int64)
    f_inner = np.empty(depth_cap, dtype=np.int64)
    f_s = np.empty(depth_cap, dtype=np.bool_)
    f_phase = np.empty(depth_cap, dtype=np.int64)

    sp = 0
    lo, hi, d = 0, T, 0
    calling = True
    res_s = False
    res_n = 0
    while True:
        if calling:
            if hi - lo == 1:
                acc = scid[lo]
                for dd in range(n - 1, d - 1, -1):
                    e = E[lo, dd]
                    if e:
                        acc = _times_power(table, hs, stamp, ctr, pw, pwgen,
                                           order[dd], e, acc, one)
                res_s = sneg[lo]
                res_n = acc
                calling = False
                continue
            while E[hi - 1, d] == 0:
                d += 1
            e_last = E[hi - 1, d]
            j = hi - 1
            while j > lo and E[j - 1, d] == e_last:
                j -= 1
            f_lo[sp] = lo
            f_d[sp] = d
            f_ghi[sp] = j
            f_prev[sp] = e_last
            f_phase[sp] = 0
            sp += 1
            lo, hi, d = j, hi, d + 1
            continue

        if ctr[0] > limit:
            return -1, -1
        if sp == 0:
            break
        f = sp - 1
        if f_phase[f] == 0:
            f_s[f] = res_s
            f_acc[f] = res_n
        else:
            inner = f_inner[f]
            s = f_s[f]
            if res_s == s:
                if res_n < inner:
                    f_acc[f] = _node(table, hs, stamp, ctr, ADD, res_n, inner)
                else:
                    f_acc[f] = _node(table, hs, stamp, ctr, ADD, inner, res_n)
            else:
                if res_s:
                    pos, ng = inner, res_n
                else:
                    pos, ng = res_n, inner
                if hs[pos] <= hs[ng]:
                    f_acc[f] = _node(table, hs, stamp, ctr, SUB, pos, ng)
                    f_s[f] = False
                else:
                    f_acc[f] = _node(table, hs, stamp, ctr, SUB, ng, pos)
                    f_s[f] = True
        dd = f_d[f]
        v = order[dd]
        if f_ghi[f] > f_lo[f]:
            g_hi = f_ghi[f]
            e = E[g_hi - 1, dd]
            g_lo = g_hi - 1
            while g_lo > f_lo[f] and E[g_lo - 1, dd] == e:
                g_lo -= 1
            f_inner[f] = _times_power(table, hs, stamp, ctr, pw, pwgen,
                                      v, f_prev[f] - e, f_acc[f], one)
            f_prev[f] = e
            f_ghi[f] = g_lo
            f_phase[f] = 1
            lo, hi, d = g_lo, g_hi, dd + 1
            calling = True
        else:
            acc = f_acc[f]
            if f_prev[f] > 0:
                acc = _times_power(table, hs, stamp, ctr, pw, pwgen,
                                   v, f_prev[f], acc, one)
            res_s = f_s[f]
            res_n = acc
            sp -= 1
    return ctr[MUL], ctr[ADD] + ctr[SUB]


def make_node_table(capacity: int):
    return np.zeros((1 << max(4, (capacity - 1).bit_length()), 3), dtype=np.int64)


def make_power_tables(nvars: int, maxexp: int):
    return (        np.zeros((max(nvars, 1), maxexp + 2), dtype=np.int64),
        np.zeros((max(nvars, 1), maxexp + 2), dtype=np.int64),
    )
