"""Finite-alphabet universal measures.

Occurrence counting, the Krichevsky measure ``K_m``, the telescoping
``omega`` prior on the integers, and the order mixture ``R`` together with
its conditional probabilities. Everything is computed in log base 2.
"""
import math
from dataclasses import dataclass

import numpy as np

from .kernel import order_profile
from .logspace import log2_sum

_LN2 = math.log(2.0)
_LGAMMA_HALF = math.lgamma(0.5)


# --------------------------------------------------------------------------
# omega prior
# --------------------------------------------------------------------------

def omega_weight(i):
    """Weight of the positive integer ``i`` under the telescoping prior."""
    if i < 1:
        raise ValueError(f"omega is defined on i >= 1, got {i}")
    if i == 1:
        return 1.0 - 1.0 / math.log2(3.0)
    return 1.0 / math.log2(i + 1) - 1.0 / math.log2(i + 2)


def omega_tail(k):
    """Residual mass ``sum_{i > k} omega_i = 1 / log2(k + 2)``."""
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    return 1.0 / math.log2(k + 2)


# --------------------------------------------------------------------------
# domain types
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Alphabet:
    size: int

    def __post_init__(self):
        if int(self.size) != self.size or self.size < 2:
            raise ValueError(f"alphabet size must be an integer >= 2, got {self.size}")
        if self.size > 2 ** 40:
            raise ValueError("alphabet too large for 64-bit context keys")


class SymbolSequence:
    """An immutable string over ``Alphabet``; symbols are indices."""

    __slots__ = ("symbols", "alphabet")

    def __init__(self, symbols, alphabet):
        if not isinstance(alphabet, Alphabet):
            alphabet = Alphabet(int(alphabet))
        arr = np.asarray(symbols, dtype=np.int64).ravel()
        if arr.size and (arr.min() < 0 or arr.max() >= alphabet.size):
            raise ValueError(f"symbol outside alphabet of size {alphabet.size}")
        arr.setflags(write=False)
        self.symbols = arr
        self.alphabet = alphabet

    @classmethod
    def from_string(cls, text, alphabet=2):
        return cls([int(ch) for ch in text], alphabet)

    def __len__(self):
        return int(self.symbols.size)

    def __repr__(self):
        return f"SymbolSequence({self.symbols.tolist()!r}, alphabet={self.alphabet.size})"

    def append(self, symbol):
        return SymbolSequence(np.append(self.symbols, symbol), self.alphabet)


def _as_sequence(x, alphabet=None):
    if isinstance(x, SymbolSequence):
        return x
    if isinstance(x, str):
        return SymbolSequence.from_string(x, alphabet or 2)
    if alphabet is None:
        raise TypeError("alphabet size required for a raw symbol list")
    return SymbolSequence(x, alphabet)


@dataclass(frozen=True)
class MixtureConfig:
    """Truncation policy for the order mixture.

    Orders ``0..max_order`` enter explicitly; order ``max_order`` carries the
    residual prior mass, so the truncated mixture is still a measure. With
    ``exact_tail`` and ``t - 1 <= max_order`` the infinite mixture is
    evaluated exactly by folding the orders ``>= t`` analytically.
    """

    max_order: int = 32
    exact_tail: bool = True

    def __post_init__(self):
        if int(self.max_order) != self.max_order or self.max_order < 0:
            raise ValueError(f"max_order must be a non-negative integer, got {self.max_order}")

    def order_log_weights(self):
        d = self.max_order
        w = [omega_weight(i + 1) for i in range(d)] + [omega_tail(d)]
        return np.log2(np.asarray(w))


# --------------------------------------------------------------------------
# context counts
# --------------------------------------------------------------------------

def kt_ratio(pair_count, context_count, alphabet_size):
    """Add-1/2 conditional ``(nu(v a) + 1/2) / (nu(v) + |A|/2)``."""
    return (pair_count + 0.5) / (context_count + alphabet_size / 2.0)


class ContextTree:
    """Occurrence counts of every context of length ``<= max_order``.

    ``counts[(v, a)]`` is the number of times symbol ``a`` followed context
    ``v`` (a tuple of symbols, oldest first) and ``totals[v]`` the number of
    times ``v`` was followed by anything. The tree also accumulates the
    sequential ``log2 K_i`` of the appended string for every order ``i``.
    Single writer; :meth:`rollback` undoes the last :meth:`append` exactly.
    """

    def __init__(self, alphabet_size, max_order):
        self.alphabet = Alphabet(alphabet_size)
        if max_order < 0:
            raise ValueError("max_order must be non-negative")
        self.max_order = int(max_order)
        self.counts = {}
        self.totals = {}
        self.history = []
        self.log_k = [0.0] * (self.max_order + 1)
        self._undo = []

    def __len__(self):
        return len(self.history)

    def context(self, order):
        """The length-``order`` suffix of the history, or None if too short."""
        if order > len(self.history):
            return None
        return tuple(self.history[len(self.history) - order:])

    def conditional(self, context, symbol):
        return kt_conditional(self, context, symbol)

    def append(self, symbol):
        a = int(symbol)
        if not 0 <= a < self.alphabet.size:
            raise ValueError(f"symbol {symbol} outside alphabet of size {self.alphabet.size}")
        size = self.alphabet.size
        prev_log_k = list(self.log_k)
        touched = []
        for order in range(self.max_order + 1):
            v = self.context(order)
            if v is None:
                self.log_k[order] -= math.log2(size)
                continue
            self.log_k[order] += math.log2(
                kt_ratio(self.counts.get((v, a), 0), self.totals.get(v, 0), size))
            self.counts[(v, a)] = self.counts.get((v, a), 0) + 1
            self.totals[v] = self.totals.get(v, 0) + 1
            touched.append(v)
        self._undo.append((prev_log_k, touched))
        self.history.append(a)

    def rollback(self):
        if not self.history:
            raise IndexError("rollback on an empty tree")
        a = self.history.pop()
        prev_log_k, touched = self._undo.pop()
        for v in touched:
            key = (v, a)
            self.counts[key] -= 1
            if self.counts[key] == 0:
                del self.counts[key]
            self.totals[v] -= 1
            if self.totals[v] == 0:
                del self.totals[v]
        self.log_k = prev_log_k

    def copy(self):
        other = ContextTree(self.alphabet.size, self.max_order)
        other.counts = dict(self.counts)
        other.totals = dict(self.totals)
        other.history = list(self.history)
        other.log_k = list(self.log_k)
        other._undo = list(self._undo)
        return other

    def log_r(self, mixture=None):
        """log2 of the truncated order mixture over the appended string."""
        mix = mixture or MixtureConfig(max_order=self.max_order)
        if mix.max_order != self.max_order:
            raise ValueError("mixture depth must match the tree depth")
        return log2_sum(mix.order_log_weights() + np.asarray(self.log_k))


def kt_conditional(tree, context, symbol):
    """KT probability of ``symbol`` after ``context`` under ``tree``'s counts.

    Unseen contexts have zero counts and give ``1/|A|``.
    """
    v = tuple(context)
    return kt_ratio(tree.counts.get((v, int(symbol)), 0), tree.totals.get(v, 0),
                    tree.alphabet.size)


def count_words(symbols, length):
    """Occurrences of every word of ``length`` in ``symbols`` (sliding)."""
    x = list(symbols)
    out = {}
    for j in range(len(x) - length + 1):
        w = tuple(x[j:j + length])
        out[w] = out.get(w, 0) + 1
    return out


# --------------------------------------------------------------------------
# Krichevsky measure
# --------------------------------------------------------------------------

def kt_block_log(x, m, alphabet=None):
    """log2 K_m(x) from the closed gamma-function form.

    Only observed contexts enter the product; unobserved ones contribute a
    factor of one.
    """
    seq = _as_sequence(x, alphabet)
    if m < 0:
        raise ValueError(f"memory m must be non-negative, got {m}")
    t = len(seq)
    size = seq.alphabet.size
    if t <= m:
        return -t * math.log2(size)
    words = count_words(seq.symbols.tolist(), m + 1)
    per_context = {}
    for w, n in words.items():
        per_context.setdefault(w[:-1], []).append(n)
    half = size / 2.0
    lg_half_a = math.lgamma(half)
    terms = []
    for ns in per_context.values():
        terms.append(lg_half_a - math.lgamma(sum(ns) + half))
        terms.extend(math.lgamma(n + 0.5) - _LGAMMA_HALF for n in ns)
    return -m * math.log2(size) + math.fsum(terms) / _LN2


def kt_sequential_log(x, m, alphabet=None):
    """log2 K_m(x) as the accumulated product of KT conditionals."""
    seq = _as_sequence(x, alphabet)
    if m < 0:
        raise ValueError(f"memory m must be non-negative, got {m}")
    prof = order_profile(seq.symbols, seq.alphabet.size, m)
    if m < prof.n_orders:
        return float(prof.log_k[m])
    return prof.uniform_log_k()


# --------------------------------------------------------------------------
# mixture R
# --------------------------------------------------------------------------

def _profile_log_terms(prof, mixture, extra_log_prob=None):
    """Weighted per-order log terms of the truncated mixture."""
    logw = mixture.order_log_weights()
    n = prof.n_orders
    terms = logw[:n] + prof.log_k
    if extra_log_prob is not None:
        terms = terms[:, None] + extra_log_prob
    if prof.saturated:
        tail = math.log2(omega_tail(n)) + prof.uniform_log_k(0 if extra_log_prob is None else 1)
        if extra_log_prob is None:
            terms = np.append(terms, tail)
        else:
            terms = np.vstack([terms, np.full(terms.shape[1], tail)])
    return terms


def r_log_from_profile(prof, mixture):
    """log2 R(x) (truncated form) from a precomputed order profile."""
    return log2_sum(_profile_log_terms(prof, mixture))


def r_next_log_from_profile(prof, mixture, symbols):
    """log2 R(x a) for each candidate symbol ``a`` from the profile of x."""
    lp = prof.next_log_prob(symbols)
    return log2_sum(_profile_log_terms(prof, mixture, lp), axis=0)


def r_measure_log(x, mixture=None, alphabet=None):
    """log2 R(x) for the order mixture.

    With ``exact_tail`` and ``t - 1 <= max_order`` the value is the exact
    infinite mixture; otherwise the truncated mixture with the residual
    weight carried by order ``max_order``.
    """
    seq = _as_sequence(x, alphabet)
    mix = mixture or MixtureConfig()
    t = len(seq)
    if t == 0:
        return 0.0
    prof = order_profile(seq.symbols, seq.alphabet.size, mix.max_order)
    if not (mix.exact_tail and t - 1 <= mix.max_order):
        return r_log_from_profile(prof, mix)
    uniform = prof.uniform_log_k()
    terms = [math.log2(omega_weight(i + 1)) + (prof.log_k[i] if i < prof.n_orders else uniform)
             for i in range(t)]
    terms.append(math.log2(omega_tail(t)) + uniform)
    return log2_sum(terms)


def r_conditional(x, a, mixture=None, alphabet=None):
    """R(a | x) = R(x a) / R(x)."""
    seq = _as_sequence(x, alphabet)
    mix = mixture or MixtureConfig()
    size = seq.alphabet.size
    if not 0 <= int(a) < size:
        raise ValueError(f"symbol {a} outside alphabet of size {size}")
    return float(np.exp2(r_conditional_log(seq, [int(a)], mix)[0]))


def r_conditional_log(x, symbols, mixture=None, alphabet=None):
    """log2 R(a | x) for every symbol in ``symbols`` from a single pass over x."""
    seq = _as_sequence(x, alphabet)
    mix = mixture or MixtureConfig()
    prof = order_profile(seq.symbols, seq.alphabet.size, mix.max_order)
    return r_next_log_from_profile(prof, mix, symbols) - r_log_from_profile(prof, mix)


def empirical_log_loss(x, mixture=None, alphabet=None):
    """Per-symbol code length ``-log2 R(x) / t`` in bits."""
    seq = _as_sequence(x, alphabet)
    if len(seq) == 0:
        raise ValueError("log loss of an empty sequence is undefined")
    return -r_measure_log(seq, mixture) / len(seq)
