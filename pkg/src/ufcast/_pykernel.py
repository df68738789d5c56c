"""Numpy implementation of the context-count kernel.

Same contract as the compiled ``_ckernel.order_profile``; see
:func:`ufcast.kernel.order_profile` for the meaning of the outputs.
"""
import numpy as np


def _group_ranks(keys):
    """Dense group ids and within-group occurrence ranks (in input order)."""
    n = keys.size
    order = np.argsort(keys, kind="stable")
    sorted_keys = keys[order]
    starts = np.empty(n, dtype=bool)
    starts[0] = True
    np.not_equal(sorted_keys[1:], sorted_keys[:-1], out=starts[1:])
    idx = np.arange(n)
    group_start = np.maximum.accumulate(np.where(starts, idx, 0))
    ranks = np.empty(n, dtype=np.int64)
    ranks[order] = idx - group_start
    ids = np.empty(n, dtype=np.int64)
    ids[order] = np.cumsum(starts) - 1
    return ids, ranks


def order_profile(symbols, alphabet_size, max_order):
    x = np.ascontiguousarray(symbols, dtype=np.int64)
    t = x.size
    a_size = int(alphabet_size)
    half = a_size / 2.0
    log2_a = np.log2(a_size)

    log_k = []
    next_total = []
    next_syms = []
    next_cnts = []

    ctx = np.zeros(t, dtype=np.int64)
    sfx = 0
    for order in range(max_order + 1):
        n = t - order
        if n <= 0:
            log_k.append(-min(order, t) * log2_a)
            next_total.append(0)
            next_syms.append(np.empty(0, dtype=np.int64))
            next_cnts.append(np.empty(0, dtype=np.int64))
            break
        sym = x[order:]
        pair_id, pair_rank = _group_ranks(ctx * a_size + sym)
        _, ctx_rank = _group_ranks(ctx)
        steps = np.log2((pair_rank + 0.5) / (ctx_rank + half))
        log_k.append(-order * log2_a + float(steps.sum()))

        hit = ctx == sfx
        s, c = np.unique(sym[hit], return_counts=True)
        next_total.append(int(hit.sum()))
        next_syms.append(s.astype(np.int64))
        next_cnts.append(c.astype(np.int64))

        if ctx_rank.max() == 0:
            break
        ctx = pair_id[:-1]
        sfx = int(pair_id[-1])

    return (
        np.asarray(log_k, dtype=np.float64),
        np.asarray(next_total, dtype=np.int64),
        next_syms,
        next_cnts,
    )
