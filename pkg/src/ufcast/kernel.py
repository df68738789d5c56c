"""Backend selection for the context-count kernel.

The compiled extension is used when it was built; ``UF_KERNEL=python``
forces the numpy fallback (useful for benchmarks and parity tests).
"""
import os
from dataclasses import dataclass

import numpy as np

from . import _pykernel

try:
    from . import _ckernel
except ImportError:  # extension not built
    _ckernel = None

if _ckernel is not None and os.environ.get("UF_KERNEL", "").lower() != "python":
    BACKEND = "cython"
    _order_profile = _ckernel.order_profile
else:
    BACKEND = "python"
    _order_profile = _pykernel.order_profile

BACKENDS = {"python": _pykernel.order_profile}
if _ckernel is not None:
    BACKENDS["cython"] = _ckernel.order_profile


@dataclass(frozen=True)
class OrderProfile:
    """Per-order Krichevsky statistics of one symbol sequence.

    ``log_k[i]`` is log2 K_i(x) for the orders that were computed. When
    ``saturated`` is true every order ``>= len(log_k)`` has the uniform value
    ``-t*log2(A)`` and a uniform next-symbol conditional, because all contexts
    of order ``len(log_k) - 1`` were already distinct.

    ``next_total[i]`` and ``next_symbols[i]``/``next_counts[i]`` are the
    counts of the length-i suffix context of x and of the symbols that
    followed it; they give the KT conditional of the symbol at position t+1.
    """

    length: int
    alphabet_size: int
    max_order: int
    log_k: np.ndarray
    next_total: np.ndarray
    next_symbols: list
    next_counts: list

    @property
    def n_orders(self):
        return self.log_k.size

    @property
    def saturated(self):
        return self.log_k.size <= self.max_order

    def uniform_log_k(self, extra=0):
        return -(self.length + extra) * np.log2(self.alphabet_size)

    def next_log_prob(self, symbols):
        """log2 KT conditional of each candidate symbol, one row per computed order."""
        symbols = np.asarray(symbols, dtype=np.int64)
        half = self.alphabet_size / 2.0
        out = np.empty((self.n_orders, symbols.size))
        for i in range(self.n_orders):
            s = self.next_symbols[i]
            c = self.next_counts[i]
            counts = np.zeros(symbols.size)
            if s.size:
                pos = np.searchsorted(s, symbols)
                pos_c = np.minimum(pos, s.size - 1)
                found = s[pos_c] == symbols
                counts[found] = c[pos_c[found]]
            out[i] = np.log2((counts + 0.5) / (self.next_total[i] + half))
        return out


def order_profile(symbols, alphabet_size, max_order, backend=None):
    """Count contexts of every order 0..max_order and accumulate log2 K_i.

    Parameters
    ----------
    symbols : array_like of int
        Symbol indices in ``[0, alphabet_size)``.
    alphabet_size : int
    max_order : int
    backend : {"cython", "python"}, optional
        Override the import-time selection.
    """
    fn = _order_profile if backend is None else BACKENDS[backend]
    x = np.ascontiguousarray(symbols, dtype=np.int64)
    log_k, totals, syms, cnts = fn(x, int(alphabet_size), int(max_order))
    return OrderProfile(
        length=int(x.size),
        alphabet_size=int(alphabet_size),
        max_order=int(max_order),
        log_k=log_k,
        next_total=totals,
        next_symbols=syms,
        next_counts=cnts,
    )
