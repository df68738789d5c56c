# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled context-count kernel (same contract as ``_pykernel``)."""
import numpy as np

from libc.math cimport log2
from libcpp.unordered_map cimport unordered_map
from cython.operator cimport dereference as deref


def order_profile(symbols, long long alphabet_size, int max_order):
    cdef const long long[::1] x = np.ascontiguousarray(symbols, dtype=np.int64)
    cdef Py_ssize_t t = x.shape[0]
    cdef double half = alphabet_size / 2.0
    cdef double log2_a = log2(<double>alphabet_size)

    log_k = []
    next_total = []
    next_syms = []
    next_cnts = []

    buf_a = np.zeros(t + 1, dtype=np.int64)
    buf_b = np.zeros(t + 1, dtype=np.int64)
    ctx_count_arr = np.zeros(t + 1, dtype=np.int64)
    pair_count_arr = np.zeros(t + 1, dtype=np.int64)
    hit_arr = np.zeros(t + 1, dtype=np.int64)
    cdef long long[::1] ctx = buf_a
    cdef long long[::1] nxt = buf_b
    cdef long long[::1] tmp
    cdef long long[::1] ctx_count = ctx_count_arr
    cdef long long[::1] pair_count = pair_count_arr
    cdef long long[::1] hits = hit_arr
    cdef unordered_map[long long, long long] ids
    cdef unordered_map[long long, long long].iterator it

    cdef long long sfx = 0
    cdef long long n_ctx_ids = 1
    cdef long long n_pairs, cid, sym, key, pid, npc, ncc, n_hits
    cdef Py_ssize_t order, k, n
    cdef double acc
    cdef bint distinct

    for order in range(max_order + 1):
        n = t - order
        if n <= 0:
            log_k.append(-min(order, t) * log2_a)
            next_total.append(0)
            next_syms.append(np.empty(0, dtype=np.int64))
            next_cnts.append(np.empty(0, dtype=np.int64))
            break
        with nogil:
            ids.clear()
            n_pairs = 0
            n_hits = 0
            for k in range(n_ctx_ids):
                ctx_count[k] = 0
            acc = 0.0
            distinct = True
            for k in range(n):
                cid = ctx[k]
                sym = x[order + k]
                key = cid * alphabet_size + sym
                it = ids.find(key)
                if it == ids.end():
                    pid = n_pairs
                    ids[key] = pid
                    pair_count[pid] = 0
                    n_pairs += 1
                else:
                    pid = deref(it).second
                npc = pair_count[pid]
                ncc = ctx_count[cid]
                if ncc > 0:
                    distinct = False
                acc += log2((npc + 0.5) / (ncc + half))
                pair_count[pid] = npc + 1
                ctx_count[cid] = ncc + 1
                nxt[k] = pid
                if cid == sfx:
                    hits[n_hits] = sym
                    n_hits += 1

        log_k.append(-order * log2_a + acc)
        s, c = np.unique(hit_arr[:n_hits], return_counts=True)
        next_total.append(int(n_hits))
        next_syms.append(s.astype(np.int64))
        next_cnts.append(c.astype(np.int64))
        if distinct:
            break
        sfx = nxt[n - 1]
        n_ctx_ids = n_pairs
        tmp = ctx
        ctx = nxt
        nxt = tmp

    return (
        np.asarray(log_k, dtype=np.float64),
        np.asarray(next_total, dtype=np.int64),
        next_syms,
        next_cnts,
    )
