import numpy as np
import pytest

from conftest import naive_kt_log
from ufcast import kernel
from ufcast.kernel import BACKENDS, order_profile
from ufcast.logspace import LOG_ZERO, log2_add, log2_sum

needs_ext = pytest.mark.skipif("cython" not in BACKENDS, reason="compiled kernel not built")


def test_backend_is_known():
    assert kernel.BACKEND in BACKENDS


@pytest.mark.parametrize("backend", sorted(BACKENDS))
def test_profile_matches_recount(backend):
    rng = np.random.default_rng(10)
    for _ in range(20):
        size = int(rng.integers(2, 5))
        seq = rng.integers(size, size=int(rng.integers(1, 80)))
        prof = order_profile(seq, size, 6, backend=backend)
        for m in range(7):
            got = prof.log_k[m] if m < prof.n_orders else prof.uniform_log_k()
            assert got == pytest.approx(naive_kt_log(seq.tolist(), m, size), abs=1e-10)


@pytest.mark.parametrize("backend", sorted(BACKENDS))
def test_next_conditional_matches_extension(backend):
    rng = np.random.default_rng(11)
    seq = rng.integers(3, size=50)
    prof = order_profile(seq, 3, 4, backend=backend)
    lp = prof.next_log_prob(np.arange(3))
    for a in range(3):
        ext = order_profile(np.append(seq, a), 3, 4, backend=backend)
        for i in range(prof.n_orders):
            assert prof.log_k[i] + lp[i, a] == pytest.approx(ext.log_k[i], abs=1e-10)


@needs_ext
def test_backends_agree():
    rng = np.random.default_rng(12)
    for size, t, depth in [(2, 5000, 32), (4, 3000, 8), (1024, 500, 32), (2, 1, 3), (3, 0, 2)]:
        seq = rng.integers(size, size=t)
        a = order_profile(seq, size, depth, backend="python")
        b = order_profile(seq, size, depth, backend="cython")
        assert a.n_orders == b.n_orders
        np.testing.assert_allclose(a.log_k, b.log_k, rtol=1e-12, atol=1e-9)
        np.testing.assert_array_equal(a.next_total, b.next_total)
        for sa, sb, ca, cb in zip(a.next_symbols, b.next_symbols, a.next_counts, b.next_counts):
            np.testing.assert_array_equal(sa, sb)
            np.testing.assert_array_equal(ca, cb)


def test_saturation_on_distinct_contexts():
    # all order-1 contexts are distinct, so orders >= 2 are uniform
    prof = order_profile(np.arange(16), 16, 32)
    assert prof.saturated
    assert prof.n_orders == 2
    assert prof.log_k[1] == prof.uniform_log_k()
    assert not order_profile(np.zeros(40, dtype=int), 2, 32).saturated


def test_logspace_helpers():
    assert log2_add(LOG_ZERO, LOG_ZERO) == LOG_ZERO
    assert log2_add(-1.0, -1.0) == pytest.approx(0.0)
    assert log2_sum([]) == LOG_ZERO
    big = np.array([-2000.0, -2000.0])
    assert log2_sum(big) == pytest.approx(-1999.0)
    rows = np.array([[0.0, LOG_ZERO], [0.0, LOG_ZERO]])
    out = log2_sum(rows, axis=0)
    assert out[0] == pytest.approx(1.0) and out[1] == LOG_ZERO
