"""Per-weight probability models for n-bit words.

Every density used by the coder gives the same probability to all words of
one weight, so a model over n-bit words is fully described by ``n + 1``
numbers.  KT estimates are kept as exact :class:`fractions.Fraction` values.
The half-integer Gamma values cancel into factorials:

    Gamma(m + 1/2) = (2m)! * sqrt(pi) / (4**m * m!)

so ``P_KT(w) = (2k)! (2(n-k))! / (4**n k! (n-k)! n!)`` for a word of weight k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

from .enumeration import binomial
from .errors import ContractViolation

KIND_BERNOULLI = "bernoulli"
KIND_UNIVERSAL = "universal"
KIND_CONDITIONAL = "cond"


def _check_p(p) -> None:
    if not 0 < p < 1:
        raise ContractViolation(f"probability {p} outside (0, 1)")


def bernoulli_word_prob(n: int, k: int, p):
    """``p**k * (1-p)**(n-k)``; exact when ``p`` is a Fraction."""
    _check_p(p)
    if not 0 <= k <= n:
        raise ContractViolation(f"weight {k} outside 0..{n}")
    return p ** k * (1 - p) ** (n - k)


@lru_cache(maxsize=None)
def kt_prob(n: int, k: int) -> Fraction:
    """KT estimate of any single n-bit word of weight ``k``."""
    if not 0 <= k <= n:
        raise ContractViolation(f"weight {k} outside 0..{n}")
    f = math.factorial
    return Fraction(f(2 * k) * f(2 * (n - k)), 4 ** n * f(k) * f(n - k) * f(n))


def kt_cond_prob(n: int, k: int, t: int, s: int) -> Fraction:
    """KT estimate of a weight-``k`` block given a sample of length t, weight s.

    Defined as ``P_KT(u w) / P_KT(u)``; the joint weight is ``k + s``.
    """
    if not 0 <= k <= n:
        raise ContractViolation(f"weight {k} outside 0..{n}")
    if not 0 <= s <= t:
        raise ContractViolation(f"sample weight {s} outside 0..{t}")
    return kt_prob(n + t, k + s) / kt_prob(t, s)


def entropy(p: float) -> float:
    """Binary entropy in bits."""
    _check_p(p)
    q = 1 - p
    return -(p * math.log2(p) + q * math.log2(q))


@dataclass(frozen=True)
class WeightDistribution:
    """Probability of one word of each weight ``k = 0..n``.

    ``kind`` is one of ``"bernoulli"`` (with ``p``), ``"universal"`` or
    ``"cond"`` (with sample length ``t`` and sample weight ``s``).
    """

    n: int
    probs: tuple
    kind: str
    p: object = None
    t: int = 0
    s: int = 0

    @property
    def exact(self) -> bool:
        return all(isinstance(x, Rational) for x in self.probs)

    def total(self):
        return sum(binomial(self.n, k) * x for k, x in enumerate(self.probs))

    def class_prob(self, k: int):
        """Probability mass of the whole weight-``k`` class."""
        return binomial(self.n, k) * self.probs[k]

    def check(self, rel_tol: float = 1e-12) -> None:
        if len(self.probs) != self.n + 1:
            raise ContractViolation(f"{len(self.probs)} weights given for n={self.n}")
        if any(x <= 0 for x in self.probs):
            raise ContractViolation("every weight class needs positive probability")
        total = self.total()
        if self.exact:
            if total != 1:
                raise ContractViolation(f"distribution sums to {total}, not 1")
        elif abs(total - 1) > rel_tol:
            raise ContractViolation(f"distribution sums to {total!r}, not 1")


def weight_distribution(kind: str, n: int, p=None, t: int = 0, s: int = 0) -> WeightDistribution:
    if n < 1:
        raise ContractViolation(f"block size {n} must be positive")
    if kind == KIND_BERNOULLI:
        if p is None:
            raise ContractViolation("bernoulli distribution needs p")
        probs = tuple(bernoulli_word_prob(n, k, p) for k in range(n + 1))
        return WeightDistribution(n, probs, kind, p=p)
    if kind == KIND_UNIVERSAL:
        return WeightDistribution(n, tuple(kt_prob(n, k) for k in range(n + 1)), kind)
    if kind == KIND_CONDITIONAL:
        probs = tuple(kt_cond_prob(n, k, t, s) for k in range(n + 1))
        return WeightDistribution(n, probs, kind, t=t, s=s)
    raise ContractViolation(f"unknown distribution kind {kind!r}")
