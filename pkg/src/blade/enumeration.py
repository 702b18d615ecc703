"""Weights, ranks and unranking of n-bit words within fixed-weight classes.

Words are plain ``int`` values holding ``n`` bits.  The first bit of a block
(the one read first from a stream) is the most significant bit, so the rank
of a word inside its weight class equals its position in increasing numeric
order: ``0011 -> 0``, ``0101 -> 1``, ..., ``1100 -> 5`` for ``n=4, k=2``.

Two interchangeable paths compute ranks.  One walks a precomputed Pascal
triangle; the other keeps a single running binomial coefficient and updates
it with the step identities

    C(m-1, r-1) = r/m * C(m, r)        C(m-1, r) = (m-r)/m * C(m, r)

which needs only a few registers.  For ``n <= 16`` a direct lookup table
(word -> (k, i) and (k, i) -> word) is built once per block size.
"""

from __future__ import annotations

from functools import lru_cache

from .errors import ContractViolation

#: Largest row kept in the Pascal table; every entry fits in 64 bits.
BINOMIAL_MAX_ROW = 64
#: Largest block size supported by ranking/unranking.
N_MAX = 24
#: Block sizes up to this use full lookup tables.
LOOKUP_MAX_N = 16


class BinomialTable:
    """Rows ``0..n_max`` of Pascal's triangle as exact integers."""

    def __init__(self, n_max: int):
        rows = [[1]]
        for r in range(1, n_max + 1):
            prev = rows[-1]
            rows.append([1] + [prev[c - 1] + prev[c] for c in range(1, r)] + [1])
        self.n_max = n_max
        self.rows = rows

    def __call__(self, r: int, c: int) -> int:
        if c > r:
            return 0
        return self.rows[r][c]


PASCAL = BinomialTable(BINOMIAL_MAX_ROW)


def binomial(r: int, c: int) -> int:
    """Exact ``C(r, c)``, zero when ``c > r``."""
    if r < 0 or c < 0:
        raise ContractViolation(f"binomial({r}, {c}) needs non-negative arguments")
    if r > BINOMIAL_MAX_ROW:
        raise ContractViolation(f"binomial row {r} exceeds {BINOMIAL_MAX_ROW}")
    return PASCAL(r, c)


def binomial_dynamic(r: int, c: int) -> int:
    """``C(r, c)`` by the multiplicative recurrence, without any table."""
    if r < 0 or c < 0:
        raise ContractViolation(f"binomial({r}, {c}) needs non-negative arguments")
    if c > r:
        return 0
    c = min(c, r - c)
    value = 1
    for i in range(1, c + 1):
        value = value * (r - c + i) // i
    return value


def _check_word(w: int, n: int) -> None:
    if not 1 <= n <= N_MAX:
        raise ContractViolation(f"block size {n} outside 1..{N_MAX}")
    if w < 0 or w >> n:
        raise ContractViolation(f"word {w:#x} does not fit in {n} bits")


def weight(w: int) -> int:
    """Number of 1-bits in ``w``."""
    return w.bit_count()


def index_pascal(w: int, n: int) -> int:
    """Lexicographic rank of ``w`` among n-bit words of equal weight.

    Direct evaluation of ``sum_j w_j * C(n - j, w_j + ... + w_n)`` with the
    bit positions ``j = 1..n`` counted from the most significant end.
    """
    _check_word(w, n)
    rank = 0
    ones = w.bit_count()
    for j in range(1, n + 1):
        if (w >> (n - j)) & 1:
            rank += PASCAL(n - j, ones)
            ones -= 1
    return rank


def index_dynamic(w: int, n: int) -> int:
    """Same rank as :func:`index_pascal`, using the step identities only."""
    _check_word(w, n)
    r = w.bit_count()
    m = n
    b = binomial_dynamic(n, r)  # C(m, r): words on the remaining m positions
    rank = 0
    for j in range(n - 1, -1, -1):
        if r == 0:
            break
        if (w >> j) & 1:
            rank += (m - r) * b // m   # C(m-1, r)
            b = r * b // m             # C(m-1, r-1)
            r -= 1
        else:
            b = (m - r) * b // m       # C(m-1, r)
        m -= 1
    return rank


def word_pascal(n: int, k: int, i: int) -> int:
    """Inverse of :func:`index_pascal`: the ``i``-th n-bit word of weight ``k``."""
    _check_rank(n, k, i)
    w = 0
    for j in range(1, n + 1):
        if k == 0:
            break
        below = PASCAL(n - j, k)  # words with a 0 at this position
        if i >= below:
            w |= 1 << (n - j)
            i -= below
            k -= 1
    return w


def word_dynamic(n: int, k: int, i: int) -> int:
    _check_rank(n, k, i)
    m, r = n, k
    b = binomial_dynamic(n, k)
    w = 0
    for j in range(n - 1, -1, -1):
        if r == 0:
            break
        below = (m - r) * b // m
        if i >= below:
            w |= 1 << j
            i -= below
            b = r * b // m
            r -= 1
        else:
            b = below
        m -= 1
    return w


def _check_rank(n: int, k: int, i: int) -> None:
    if not 1 <= n <= N_MAX:
        raise ContractViolation(f"block size {n} outside 1..{N_MAX}")
    if not 0 <= k <= n:
        raise ContractViolation(f"weight {k} outside 0..{n}")
    if not 0 <= i < PASCAL(n, k):
        raise ContractViolation(f"rank {i} outside 0..C({n},{k})-1")


class WordTables:
    """Full lookup tables for one block size (``n <= 16``).

    ``ki[w]`` holds ``(k, i)`` and ``words[k][i]`` holds ``w``.  Building them
    by scanning words in increasing numeric order yields the lexicographic
    ranks directly.
    """

    def __init__(self, n: int):
        if not 1 <= n <= LOOKUP_MAX_N:
            raise ContractViolation(f"lookup tables only for 1 <= n <= {LOOKUP_MAX_N}")
        self.n = n
        words = [[] for _ in range(n + 1)]
        ki = []
        for w in range(1 << n):
            k = w.bit_count()
            ki.append((k, len(words[k])))
            words[k].append(w)
        self.ki = ki
        self.words = words


@lru_cache(maxsize=None)
def word_tables(n: int) -> WordTables:
    return WordTables(n)


def weight_index(w: int, n: int) -> tuple[int, int]:
    """``(weight, rank)`` of ``w``; a single lookup for small ``n``."""
    if n <= LOOKUP_MAX_N:
        _check_word(w, n)
        return word_tables(n).ki[w]
    return w.bit_count(), index_pascal(w, n)


def index(w: int, n: int) -> int:
    return weight_index(w, n)[1]


def word(n: int, k: int, i: int) -> int:
    """The ``i``-th word (lexicographic order) of length ``n`` and weight ``k``."""
    if n <= LOOKUP_MAX_N:
        _check_rank(n, k, i)
        return word_tables(n).words[k][i]
    return word_pascal(n, k, i)
