import itertools
import math

import pytest


def naive_kt_log(seq, m, size):
    """log2 K_m by direct recounting at every step (no shared code)."""
    total = 0.0
    for j, a in enumerate(seq):
        if j < m:
            total -= math.log2(size)
            continue
        ctx = tuple(seq[j - m:j])
        pair = ctx_n = 0
        for k in range(m, j):
            if tuple(seq[k - m:k]) == ctx:
                ctx_n += 1
                pair += seq[k] == a
        total += math.log2((pair + 0.5) / (ctx_n + size / 2))
    return total


def naive_r(seq, size, depth=None):
    """Linear-space R from the naive KT; exact infinite mixture unless depth is given."""
    t = len(seq)
    lin = lambda v: 2.0 ** v
    if depth is None or t - 1 <= depth:
        out = sum((1 / math.log2(i + 2) - 1 / math.log2(i + 3) if i > 0 else 1 - 1 / math.log2(3))
                  * lin(naive_kt_log(seq, i, size)) for i in range(t))
        return out + size ** -t / math.log2(t + 2)
    w = [1 - 1 / math.log2(3)] + [1 / math.log2(i + 1) - 1 / math.log2(i + 2) for i in range(2, depth + 1)]
    out = sum(w[i] * lin(naive_kt_log(seq, i, size)) for i in range(depth))
    return out + lin(naive_kt_log(seq, depth, size)) / math.log2(depth + 2)


def all_words(size, t):
    return itertools.product(range(size), repeat=t)


@pytest.fixture
def words():
    return all_words


ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[key])
