"""Exact and asymptotic redundancy of adaptive block codes.

All rates are in bits per symbol and all logarithms are base 2.  The
asymptotic expansions come from Stirling/Taylor series in natural units, so
their rational correction terms (``1/(12n)``, ``(1-4pq)/(24pq)`` and the
like) are scaled by ``LOG2E = log2(e)``; purely logarithmic terms use
``log2`` directly.

Exact quantities are finite sums over weight classes evaluated with mpmath
at ``DPS`` decimal digits (or as Fractions when every input is rational).
Code lengths enter only through per-class averages, since all words of a
class are equiprobable under every source considered here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

import mpmath
from mpmath import mp, mpf

from .codebook import CodeTable, ContextSet, sample_tables
from .densities import KIND_CONDITIONAL, KIND_UNIVERSAL, entropy, kt_cond_prob, kt_prob
from .errors import ContractViolation

DPS = 40
LOG2E = 1 / math.log(2)


def _check_p(p, name="p"):
    if not 0 < p < 1:
        raise ContractViolation(f"{name}={p} outside (0, 1)")


def _mpf(x):
    if isinstance(x, Fraction):
        return mpf(x.numerator) / x.denominator
    return mpf(x)


def _log2(x):
    return mpmath.log(_mpf(x), 2)


def _pmf(n: int, p) -> list:
    """Binomial(n, p) probabilities as mpf values (call inside ``workdps``)."""
    p = _mpf(p)
    q = 1 - p
    return [math.comb(n, k) * p ** k * q ** (n - k) for k in range(n + 1)]


@lru_cache(maxsize=None)
def _log2_kt(n: int, k: int):
    with mp.workdps(DPS):
        return _log2(kt_prob(n, k))


@lru_cache(maxsize=None)
def _log2_kt_cond(n: int, k: int, t: int, s: int):
    with mp.workdps(DPS):
        return _log2(kt_cond_prob(n, k, t, s))


def entropy_mp(p):
    with mp.workdps(DPS):
        p = _mpf(p)
        q = 1 - p
        return -(p * mpmath.log(p, 2) + q * mpmath.log(q, 2))


# -- code lengths ------------------------------------------------------------


def avg_code_length_exact(table: CodeTable, dist):
    """Expected codeword length in bits per block (a Fraction for exact inputs)."""
    return table.average_length(dist)


def redundancy_exact(table: CodeTable, dist, p) -> float:
    """``avg/n - H(p)`` in bits per symbol, for ``dist`` the Bernoulli(p) source."""
    return float(avg_code_length_exact(table, dist)) / table.n - entropy(p)


def class_average_lengths(n: int, t: int, tables) -> list:
    """``L[s][k]``: mean code length of a weight-``k`` block after a weight-``s`` sample.

    ``tables[s]`` covers ``s = 0..t//2``; heavier samples use the
    complemented block on table ``t - s``.
    """
    if len(tables) != t // 2 + 1:
        raise ContractViolation(f"need {t // 2 + 1} tables for t={t}, got {len(tables)}")
    for s, table in enumerate(tables):
        kind = KIND_UNIVERSAL if t == 0 else KIND_CONDITIONAL
        if table.n != n or table.kind != kind or (t and (table.t, table.s) != (t, s)):
            raise ContractViolation(
                f"table {s} is (n={table.n}, kind={table.kind}, t={table.t}, s={table.s}), "
                f"expected (n={n}, t={t}, s={s})"
            )
    per_table = [
        [Fraction(tab.class_length_sum(k), math.comb(n, k)) for k in range(n + 1)]
        for tab in tables
    ]
    rows = []
    for s in range(t + 1):
        if s <= t // 2:
            rows.append(per_table[s])
        else:
            rows.append(per_table[t - s][::-1])
    return rows


def adaptive_redundancy_exact(n: int, t: int, p, tables) -> float:
    """Exact average redundancy rate of the adaptive code for sample length ``t``."""
    _check_p(p)
    lengths = class_average_lengths(n, t, tables)
    with mp.workdps(DPS):
        ps, pk = _pmf(t, p), _pmf(n, p)
        avg = mpf(0)
        for s in range(t + 1):
            row = lengths[s]
            avg += ps[s] * sum(pk[k] * _mpf(row[k]) for k in range(n + 1))
        return float(avg / n - entropy_mp(p))


def delta_exact(n: int, t: int, p, tables) -> float:
    """Mean gap (bits/block) between code lengths and ``-log2 P_KT(w|u)``."""
    _check_p(p)
    lengths = class_average_lengths(n, t, tables)
    with mp.workdps(DPS):
        ps, pk = _pmf(t, p), _pmf(n, p)
        total = mpf(0)
        for s in range(t + 1):
            row = lengths[s]
            inner = mpf(0)
            for k in range(n + 1):
                inner += pk[k] * (_mpf(row[k]) + _log2_kt_cond(n, k, t, s))
            total += ps[s] * inner
        return float(total)


def cross_entropy_exact(n: int, t: int, p) -> float:
    """``-E log2 P_KT(w|u)`` in bits per block, summed directly."""
    _check_p(p)
    with mp.workdps(DPS):
        ps, pk = _pmf(t, p), _pmf(n, p)
        total = mpf(0)
        for s in range(t + 1):
            total -= ps[s] * sum(pk[k] * _log2_kt_cond(n, k, t, s) for k in range(n + 1))
        return float(total)


# -- KT rate ------------------------------------------------------------------


def _ckt_mp(n: int, p):
    pk = _pmf(n, p)
    return -sum(pk[k] * _log2_kt(n, k) for k in range(n + 1)) / n


def C_KT_exact(n: int, p) -> float:
    """Average rate ``-(1/n) E log2 P_KT(w)`` of the KT estimator on n symbols."""
    _check_p(p)
    if n < 1:
        raise ContractViolation(f"n={n} must be positive")
    with mp.workdps(DPS):
        return float(_ckt_mp(n, p))


def C_KT_asymptotic(n: int, p) -> float:
    _check_p(p)
    pq = p * (1 - p)
    brace = (
        math.log2(n)
        + math.log2(math.pi / 2)
        - LOG2E
        - LOG2E * (1 - 4 * pq) / (12 * pq * n)
        + LOG2E * (1 - 3 * pq) / (12 * pq * pq * n * n)
    )
    return entropy(p) + brace / (2 * n)


def kt_telescoped(n: int, t: int, p) -> float:
    """``(t+n) C_KT(t+n, p) - t C_KT(t, p)`` in bits per block."""
    _check_p(p)
    with mp.workdps(DPS):
        head = (t + n) * _ckt_mp(t + n, p)
        tail = t * _ckt_mp(t, p) if t else 0
        return float(head - tail)


# -- asymptotic expansion of the adaptive rate ----------------------------------


def asymmetry_factor(p) -> float:
    """``(1 - 4pq) / (24pq)``, the source-dependent factor of the 1/t term."""
    _check_p(p)
    pq = p * (1 - p)
    return (1 - 4 * pq) / (24 * pq)


def second_factor(p) -> float:
    """``(1 - 3pq) / (24 p^2 q^2)``."""
    _check_p(p)
    pq = p * (1 - p)
    return (1 - 3 * pq) / (24 * pq * pq)


class ExpansionTerms(NamedTuple):
    total: float
    leading: float
    delta: float
    second: float
    third: float


def theorem1_eval(n: int, t: int, p, delta: float) -> ExpansionTerms:
    """Asymptotic redundancy rate for block size ``n`` and sample length ``t``.

    Every term is reported already divided by ``n`` (bits per symbol);
    ``delta`` is given in bits per block.
    """
    if n < 1 or t < 1:
        raise ContractViolation(f"need n, t >= 1 (got n={n}, t={t})")
    leading = 0.5 * math.log2((t + n) / t) / n
    second = LOG2E * asymmetry_factor(p) * n / (t * (t + n)) / n
    third = -LOG2E * second_factor(p) * (n + 2 * t) * n / (t * t * (t + n) ** 2) / n
    per_symbol_delta = delta / n
    return ExpansionTerms(leading + per_symbol_delta + second + third,
                         leading, per_symbol_delta, second, third)


@dataclass(frozen=True)
class RedundancyReport:
    n: int
    t: int
    p: float
    exact_rate: float
    asymptotic_rate: float
    delta_exact: float
    leading_term: float
    second_term: float
    third_term: float

    @property
    def residual(self) -> float:
        return self.exact_rate - self.asymptotic_rate


@lru_cache(maxsize=None)
def analysis_tables(n: int, t: int) -> tuple:
    """Uncapped tables for sample length ``t`` (cached; tables are immutable)."""
    return tuple(sample_tables(n, t, max_len=None))


def redundancy_report(n: int, t: int, p, tables=None) -> RedundancyReport:
    if tables is None:
        tables = analysis_tables(n, t)
    exact = adaptive_redundancy_exact(n, t, p, tables)
    delta = delta_exact(n, t, p, tables)
    terms = theorem1_eval(n, t, p, delta)
    return RedundancyReport(n, t, float(p), exact, terms.total, delta,
                            terms.leading, terms.second, terms.third)


# -- empirical entropy and binomial sums ---------------------------------------


def _empirical_entropy_bits(n: int, k: int):
    if k in (0, n):
        return mpf(0)
    x = mpf(k) / n
    return -(x * mpmath.log(x, 2) + (1 - x) * mpmath.log(1 - x, 2))


def empirical_entropy_avg_exact(n: int, p) -> float:
    """``E F(w)`` over n-bit words from Bernoulli(p), in bits."""
    _check_p(p)
    if n < 1:
        raise ContractViolation(f"n={n} must be positive")
    with mp.workdps(DPS):
        pk = _pmf(n, p)
        return float(sum(pk[k] * _empirical_entropy_bits(n, k) for k in range(1, n)))


def empirical_entropy_avg_via_f(n: int, p) -> float:
    """Same quantity as ``log2 n - p f(n-1, p) - q f(n-1, q)``."""
    _check_p(p)
    with mp.workdps(DPS):
        p_ = _mpf(p)
        q_ = 1 - p_
        value = mpmath.log(n, 2) - p_ * _f_sum_mp(n - 1, p_) - q_ * _f_sum_mp(n - 1, q_)
        return float(value)


def empirical_entropy_avg_asymptotic(n: int, p) -> float:
    _check_p(p)
    pq = p * (1 - p)
    return entropy(p) - LOG2E / (2 * n) + LOG2E * (pq - 1) / (12 * pq * n * n)


def _binomial_terms(n: int, theta):
    """``C(n,k) theta^k (1-theta)^(n-k)`` exactly for Fractions, else as mpf."""
    if isinstance(theta, Fraction):
        return [math.comb(n, k) * theta ** k * (1 - theta) ** (n - k) for k in range(n + 1)]
    return _pmf(n, theta)


def S1_exact(n: int, theta):
    """``sum_{k=1..n} C(n,k) theta^k (1-theta)^(n-k) / (k+1)``."""
    _check_p(theta, "theta")
    with mp.workdps(DPS):
        terms = _binomial_terms(n, theta)
        value = sum(terms[k] * Fraction(1, k + 1) if isinstance(theta, Fraction)
                    else terms[k] / (k + 1) for k in range(1, n + 1))
        return value if isinstance(theta, Fraction) else float(value)


def S2_exact(n: int, theta):
    """``sum_{k=1..n} C(n,k) theta^k (1-theta)^(n-k) / ((k+1)(k+2))``."""
    _check_p(theta, "theta")
    with mp.workdps(DPS):
        terms = _binomial_terms(n, theta)
        value = sum(terms[k] * Fraction(1, (k + 1) * (k + 2)) if isinstance(theta, Fraction)
                    else terms[k] / ((k + 1) * (k + 2)) for k in range(1, n + 1))
        return value if isinstance(theta, Fraction) else float(value)


def _s1_closed(n, theta):
    q = 1 - theta
    return (1 - q ** n - theta * n * q ** n) / (theta * (n + 1))


def _s2_closed(n, theta):
    q = 1 - theta
    bracket = 1 - q ** n - theta * n * q ** n - theta * theta * n * (n + 1) * q ** n / 2
    return bracket / (theta * theta * (n + 1) * (n + 2))


def S1_closed(n: int, theta):
    _check_p(theta, "theta")
    return _s1_closed(n, theta)


def S2_closed(n: int, theta):
    _check_p(theta, "theta")
    return _s2_closed(n, theta)


def S1_asymptotic(n: int, theta) -> float:
    _check_p(theta, "theta")
    return 1 / (theta * n) - 1 / (theta * n * n)


def S2_asymptotic(n: int, theta) -> float:
    _check_p(theta, "theta")
    return 1 / (theta * theta * n * n)


def _f_sum_mp(n: int, theta):
    pk = _pmf(n, theta)
    return sum(pk[k] * mpmath.log(k + 1, 2) for k in range(1, n + 1))


def f_sum_exact(n: int, theta) -> float:
    """``E log2(1 + K)`` for ``K ~ Binomial(n, theta)``."""
    _check_p(theta, "theta")
    with mp.workdps(DPS):
        return float(_f_sum_mp(n, theta))


def f_sum_asymptotic(n: int, theta) -> float:
    _check_p(theta, "theta")
    correction = (1 + theta) / (2 * theta * n) - (theta ** 2 + 6 * theta - 1) / (12 * theta ** 2 * n ** 2)
    return math.log2(theta * n) + LOG2E * correction


def log_kt_expansion_check(n: int, k: int) -> float:
    """Exact ``-log2 P_KT`` minus its Stirling expansion, for ``0 < k < n``."""
    if not 0 < k < n:
        raise ContractViolation(f"expansion excludes k in {{0, n}} (k={k}, n={n})")
    with mp.workdps(DPS):
        exact = -_log2_kt(n, k)
        approx = (
            n * _empirical_entropy_bits(n, k)
            + mpmath.log(n, 2) / 2
            + mpmath.log(mp.pi / 2, 2) / 2
            + (mpf(1) / (12 * n) + mpf(1) / (24 * k) + mpf(1) / (24 * (n - k))) / mpmath.log(2)
        )
        return float(exact - approx)


# -- adaptive coder expectations ---------------------------------------------


def expected_block_lengths(context_set: ContextSet, p) -> tuple:
    """Expected bits for block 0, block 1 and any later block of the coder."""
    _check_p(p)
    n = context_set.n
    tabs = context_set.tables
    one = list(tabs[context_set.one_block_offset:context_set.two_block_offset])
    two = list(tabs[context_set.two_block_offset:])
    out = []
    with mp.workdps(DPS):
        pk = _pmf(n, p)
        for t, group in ((0, [tabs[0]]), (n, one), (2 * n, two)):
            lengths = class_average_lengths(n, t, group)
            ps = _pmf(t, p)
            value = sum(ps[s] * sum(pk[k] * _mpf(lengths[s][k]) for k in range(n + 1))
                        for s in range(t + 1))
            out.append(float(value))
    return tuple(out)


def expected_total_bits(context_set: ContextSet, p, m: int) -> float:
    if m < 1:
        raise ContractViolation(f"m={m} must be positive")
    first, second, rest = expected_block_lengths(context_set, p)
    return first + (second if m > 1 else 0.0) + rest * max(m - 2, 0)


def expected_rate(context_set: ContextSet, p, m: int) -> float:
    """Relative redundancy ``(bits/(m n) - H) / H`` the benchmark should measure."""
    h = entropy(p)
    return (expected_total_bits(context_set, p, m) / (m * context_set.n) - h) / h
