"""Block-code construction over weight classes.

A code for n-bit blocks is built from ``n + 1`` numbers: the probability of
a single word of each weight.  Huffman's algorithm runs on the expanded
multiset (``C(n, k)`` copies of class ``k``) but merges runs of identical
queue nodes in bulk, so the work is polynomial in ``n``.  Because all words
of a weight class are equiprobable, each class ends up on at most two
adjacent code lengths.  Words of a class are then split by rank: the first
``nk[k]`` words get the shorter length (subgroup ``j=0``), the rest the
longer one (``j=1``).  Each subgroup is a run of consecutive codewords
starting at its *base*, so a table needs O(n) entries instead of 2**n.

Canonical bases are assigned from the longest length upwards with a running
counter; inside one length, subgroups with ``j=0`` take the smaller codes,
and among those larger weights come first.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from .bitio import WINDOW_BITS
from .densities import (
    KIND_BERNOULLI,
    KIND_CONDITIONAL,
    KIND_UNIVERSAL,
    WeightDistribution,
    weight_distribution,
)
from .enumeration import binomial, weight_index
from .errors import (
    ContractViolation,
    TableFormatError,
    TableValidationError,
    UnsupportedConfiguration,
)

TABLE_MAGIC = "blade-table v1"
SET_MAGIC = "blade-set v1"
CONTEXT_N_MIN = 4
CONTEXT_N_MAX = 20


@dataclass(frozen=True)
class Subgroup:
    """Words of weight ``k`` sharing one code length."""

    k: int
    j: int
    length: int
    base: int
    count: int

    def lj_base(self, width: int = WINDOW_BITS) -> int:
        return self.base << (width - self.length)


@dataclass(frozen=True)
class CodeTable:
    """Encoder-side table.

    ``subgroups`` are listed in decreasing codeword order, which is also the
    scan order of the decoder; a subgroup's position in that list is its
    ordinal.
    """

    n: int
    nk: tuple
    subgroups: tuple
    kind: str = KIND_UNIVERSAL
    t: int = 0
    s: int = 0
    p: object = None

    @property
    def S(self) -> int:
        return len(self.subgroups)

    @property
    def max_length(self) -> int:
        return max(g.length for g in self.subgroups)

    @cached_property
    def sg(self) -> dict:
        """``(k, j) -> ordinal``."""
        return {(g.k, g.j): pos for pos, g in enumerate(self.subgroups)}

    @cached_property
    def _enc(self):
        n = self.n
        base0, len0 = [0] * (n + 1), [0] * (n + 1)
        base1, len1 = [0] * (n + 1), [0] * (n + 1)
        for g in self.subgroups:
            if g.j:
                base1[g.k], len1[g.k] = g.base, g.length
            else:
                base0[g.k], len0[g.k] = g.base, g.length
        return self.nk, base0, len0, base1, len1

    def lengths(self, k: int) -> tuple:
        """``(len0, len1)``; ``len1`` is None when the class is not split."""
        _, _, len0, _, len1 = self._enc
        return len0[k], (len1[k] or None)

    def codeword(self, w: int) -> tuple:
        """``(code, length)`` for block ``w``."""
        k, i = weight_index(w, self.n)
        nk, base0, len0, base1, len1 = self._enc
        if i >= nk[k]:
            return base1[k] + i - nk[k], len1[k]
        return base0[k] + i, len0[k]

    def class_length_sum(self, k: int) -> int:
        """Total code length over all ``C(n, k)`` words of weight ``k``."""
        len0, len1 = self.lengths(k)
        nk = self.nk[k]
        return nk * len0 + (binomial(self.n, k) - nk) * (len1 or 0)

    def average_length(self, dist: WeightDistribution):
        if dist.n != self.n:
            raise ContractViolation(f"table is for n={self.n}, distribution for n={dist.n}")
        return sum(dist.probs[k] * self.class_length_sum(k) for k in range(self.n + 1))


@dataclass(frozen=True)
class DecoderTable:
    """Decoder-side table: left-justified bases in strictly decreasing order."""

    n: int
    nk: tuple
    lj_base: tuple
    lengths: tuple
    ks: tuple
    js: tuple

    @property
    def S(self) -> int:
        return len(self.lj_base)

    def bases(self) -> list:
        return [lj >> (WINDOW_BITS - ln) for lj, ln in zip(self.lj_base, self.lengths)]


@dataclass(frozen=True)
class ContextSet:
    """All tables of the adaptive coder for block size ``n``.

    Layout: ``[universal | t=n, s=0..n/2 | t=2n, s=0..n]``, i.e. ``1.5n + 3``
    tables.  Contexts with ``s > t/2`` reuse table ``t - s`` on complemented
    blocks.
    """

    n: int
    tables: tuple
    decoders: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "decoders", tuple(to_decoder_table(t) for t in self.tables))

    @property
    def one_block_offset(self) -> int:
        return 1

    @property
    def two_block_offset(self) -> int:
        return 1 + self.n // 2 + 1

    def table_index(self, t: int, s: int) -> int:
        """Position of the table for sample length ``t`` and weight ``s <= t/2``."""
        if t == 0:
            return 0
        if t == self.n and 0 <= s <= self.n // 2:
            return self.one_block_offset + s
        if t == 2 * self.n and 0 <= s <= self.n:
            return self.two_block_offset + s
        raise ContractViolation(f"no table for t={t}, s={s} with n={self.n}")


def context_table_count(n: int) -> int:
    return 1 + (n // 2 + 1) + (n + 1)


# -- construction -------------------------------------------------------------


def _integer_weights(dist: WeightDistribution) -> list:
    if dist.exact:
        probs = [Fraction(x) for x in dist.probs]
        scale = math.lcm(*(x.denominator for x in probs))
        return [x.numerator * (scale // x.denominator) for x in probs]
    return [float(x) for x in dist.probs]


def _tie_rank(k: int, n: int) -> tuple:
    # merged first (ends up deeper): classes near the edges, then larger k
    return (min(k, n - k), -k)


def huffman_class_depths(n: int, weights) -> list:
    """Huffman code lengths for ``C(n, k)`` copies of weight ``weights[k]``.

    Returns one ``{length: count}`` dict per class.  Queue entries stand for
    ``count`` identical nodes; equal-weight entries are ordered by the
    smallest ``min(k, n-k)`` they contain, then by the largest ``k``, then
    by creation order.
    """
    children = []  # per node type: None for a leaf, else (a, b)
    seq = itertools.count()
    heap = []
    for k in range(n + 1):
        children.append(None)
        heap.append((weights[k], *_tie_rank(k, n), next(seq), k, binomial(n, k)))
    heapq.heapify(heap)

    def merge(a, b):
        children.append((a, b))
        return len(children) - 1

    while True:
        w1, f1, m1, _, a, c1 = heapq.heappop(heap)
        if c1 == 1 and not heap:
            break
        if c1 >= 2:
            pair = merge(a, a)
            heapq.heappush(heap, (w1 + w1, f1, m1, next(seq), pair, c1 // 2))
            if c1 % 2 == 0:
                continue
        # one node of type ``a`` is left; pair it with the next smallest
        w2, f2, m2, s2, b, c2 = heapq.heappop(heap)
        mixed = merge(a, b)
        heapq.heappush(heap, (w1 + w2, min(f1, f2), min(m1, m2), next(seq), mixed, 1))
        if c2 > 1:
            heapq.heappush(heap, (w2, f2, m2, s2, b, c2 - 1))

    # instances of one node type may sit at several depths; push the depth
    # histogram of every type down to its children, parents first
    depth = [dict() for _ in children]
    depth[a] = {0: 1}
    for node in range(len(children) - 1, n, -1):
        left, right = children[node]
        for d, c in depth[node].items():
            for child in (left, right):
                hist = depth[child]
                hist[d + 1] = hist.get(d + 1, 0) + c
    return depth[: n + 1]


def _assign_bases(groups: list) -> list:
    """Canonical bases for ``(k, j, length, count)`` subgroups.

    Longest codes first with a running counter that starts at 0 and is
    scaled down (rounding up) whenever the length drops.
    """
    order = sorted(groups, key=lambda g: (-g[2], g[1], -g[0]))
    value = 0
    prev = order[0][2]
    out = []
    for k, j, length, count in order:
        if length < prev:
            shift = prev - length
            value = (value + (1 << shift) - 1) >> shift
            prev = length
        out.append(Subgroup(k, j, length, value, count))
        value += count
    if value != 1 << prev:
        raise TableValidationError("code lengths do not form a complete prefix code")
    return out


def build_code(dist: WeightDistribution, max_len: int | None = WINDOW_BITS) -> CodeTable:
    """Minimum-redundancy block code for ``dist`` with per-class subgroups.

    ``max_len=None`` lifts the 64-bit length cap; such tables can be
    analysed but not turned into decoder tables.
    """
    dist.check()
    n = dist.n
    depths = huffman_class_depths(n, _integer_weights(dist))
    nk = []
    groups = []
    for k, hist in enumerate(depths):
        lens = sorted(hist)
        if sum(hist.values()) != binomial(n, k):
            raise TableValidationError(f"class {k} lost words during construction")
        if len(lens) > 2 or (len(lens) == 2 and lens[1] != lens[0] + 1):
            raise TableValidationError(f"class {k} spans lengths {lens}")
        nk.append(hist[lens[0]])
        for j, length in enumerate(lens):
            groups.append((k, j, length, hist[length]))
    longest = max(g[2] for g in groups)
    if max_len is not None and longest > max_len:
        raise UnsupportedConfiguration(
            f"code length {longest} exceeds the {max_len}-bit window"
        )
    subgroups = _assign_bases(groups)
    width = max(WINDOW_BITS, longest)
    subgroups.sort(key=lambda g: g.lj_base(width), reverse=True)
    return CodeTable(n, tuple(nk), tuple(subgroups), dist.kind, dist.t, dist.s, dist.p)


def to_decoder_table(code: CodeTable) -> DecoderTable:
    if code.max_length > WINDOW_BITS:
        raise UnsupportedConfiguration(
            f"code length {code.max_length} exceeds the {WINDOW_BITS}-bit window"
        )
    entries = sorted(code.subgroups, key=lambda g: g.lj_base(), reverse=True)
    lj = tuple(g.lj_base() for g in entries)
    if any(a <= b for a, b in zip(lj, lj[1:])):
        raise TableValidationError("duplicate left-justified base")
    return DecoderTable(
        code.n,
        code.nk,
        lj,
        tuple(g.length for g in entries),
        tuple(g.k for g in entries),
        tuple(g.j for g in entries),
    )


def from_decoder_table(dec: DecoderTable, width: int = WINDOW_BITS, **meta) -> CodeTable:
    """Rebuild the encoder table from decoder arrays (``base = lj >> (T - len)``).

    ``width`` is the word size the ``lj_base`` values were justified to.
    """
    subgroups = []
    for lj, length, k, j in zip(dec.lj_base, dec.lengths, dec.ks, dec.js):
        size = binomial(dec.n, k)
        count = dec.nk[k] if j == 0 else size - dec.nk[k]
        subgroups.append(Subgroup(k, j, length, lj >> (width - length), count))
    table = CodeTable(dec.n, tuple(dec.nk), tuple(subgroups), **meta)
    validate_table(table)
    return table


def build_context_set(n: int) -> ContextSet:
    if n % 2 or not CONTEXT_N_MIN <= n <= CONTEXT_N_MAX:
        raise UnsupportedConfiguration(
            f"adaptive coder needs even n in {CONTEXT_N_MIN}..{CONTEXT_N_MAX}, got {n}"
        )
    tables = [build_code(weight_distribution(KIND_UNIVERSAL, n))]
    for t in (n, 2 * n):
        for s in range(t // 2 + 1):
            tables.append(build_code(weight_distribution(KIND_CONDITIONAL, n, t=t, s=s)))
    return ContextSet(n, tuple(tables))


def sample_tables(n: int, t: int, max_len: int | None = WINDOW_BITS) -> list:
    """Tables for sample length ``t`` and weights ``s = 0..t//2``."""
    if t == 0:
        return [build_code(weight_distribution(KIND_UNIVERSAL, n), max_len)]
    return [
        build_code(weight_distribution(KIND_CONDITIONAL, n, t=t, s=s), max_len)
        for s in range(t // 2 + 1)
    ]


# -- validation ---------------------------------------------------------------


def validate_table(table: CodeTable) -> None:
    """Check every structural invariant; raise :class:`TableValidationError`."""
    n = table.n
    if n < 1 or len(table.nk) != n + 1:
        raise TableValidationError(f"nk has {len(table.nk)} entries for n={n}")
    seen = {}
    for g in table.subgroups:
        if (g.k, g.j) in seen:
            raise TableValidationError(f"subgroup (k={g.k}, j={g.j}) listed twice")
        if not 0 <= g.k <= n or g.j not in (0, 1):
            raise TableValidationError(f"bad subgroup key (k={g.k}, j={g.j})")
        if g.length < 1:
            raise TableValidationError(f"subgroup (k={g.k}, j={g.j}) has length {g.length}")
        if g.count < 1 or g.base < 0 or g.base + g.count > 1 << g.length:
            raise TableValidationError(
                f"subgroup (k={g.k}, j={g.j}) codewords do not fit in {g.length} bits"
            )
        seen[g.k, g.j] = g
    for k in range(n + 1):
        size = binomial(n, k)
        nk = table.nk[k]
        if not 1 <= nk <= size:
            raise TableValidationError(f"nk[{k}]={nk} outside 1..{size}")
        first = seen.get((k, 0))
        second = seen.get((k, 1))
        if first is None or first.count != nk:
            raise TableValidationError(f"subgroup (k={k}, j=0) missing or not nk[{k}] long")
        if (second is None) != (nk == size):
            raise TableValidationError(f"subgroup (k={k}, j=1) inconsistent with nk[{k}]")
        if second is not None and (
            second.count != size - nk or second.length != first.length + 1
        ):
            raise TableValidationError(f"subgroup (k={k}, j=1) breaks the two-length rule")
    if len(seen) != table.S:
        raise TableValidationError("stray subgroups")
    if not n + 1 <= table.S <= 2 * n:
        raise TableValidationError(f"S={table.S} outside {n + 1}..{2 * n}")

    width = max(WINDOW_BITS, table.max_length)
    kraft = sum(g.count << (width - g.length) for g in table.subgroups)
    if kraft != 1 << width:
        raise TableValidationError(
            f"Kraft sum is {Fraction(kraft, 1 << width)}, not 1"
        )
    # equal Kraft sum still allows overlapping codeword ranges (e.g. a
    # corrupted base); the ranges must tile the code space exactly
    cursor = 0
    for g in sorted(table.subgroups, key=lambda g: g.lj_base(width)):
        if g.lj_base(width) != cursor:
            raise TableValidationError(
                f"Kraft violation: subgroup (k={g.k}, j={g.j}) base {g.base:#x} "
                "overlaps or leaves a gap in the code space"
            )
        cursor += g.count << (width - g.length)
    lj = [g.lj_base(width) for g in table.subgroups]
    if any(a <= b for a, b in zip(lj, lj[1:])):
        raise TableValidationError("subgroups not listed in decreasing codeword order")


def kraft_sum(table: CodeTable) -> Fraction:
    return sum(Fraction(g.count, 1 << g.length) for g in table.subgroups)


# -- serialization ------------------------------------------------------------


def _format_p(p) -> str:
    if isinstance(p, Fraction):
        return f"{p.numerator}/{p.denominator}"
    return repr(float(p))


def _table_lines(table: CodeTable) -> list:
    head = f"n={table.n} kind={table.kind} t={table.t} s={table.s}"
    if table.kind == KIND_BERNOULLI:
        head += f" p={_format_p(table.p)}"
    lines = [TABLE_MAGIC, head, f"S={table.S}", "nk: " + " ".join(map(str, table.nk))]
    for g in table.subgroups:
        lines.append(f"sg: k={g.k} j={g.j} len={g.length} base={g.base:x}")
    return lines


def serialize(obj) -> str:
    """Line-oriented text artifact for a :class:`CodeTable` or :class:`ContextSet`."""
    if isinstance(obj, CodeTable):
        lines = _table_lines(obj)
    elif isinstance(obj, ContextSet):
        lines = [f"{SET_MAGIC} n={obj.n} count={len(obj.tables)}"]
        for table in obj.tables:
            lines += _table_lines(table)
    else:
        raise ContractViolation(f"cannot serialize {type(obj).__name__}")
    return "\n".join(lines) + "\n"


def _fields(text: str, lineno: int, expected: list) -> dict:
    parts = text.split()
    keys = [p.split("=", 1)[0] for p in parts]
    if keys[: len(expected)] != expected or any("=" not in p for p in parts):
        raise TableFormatError(f"expected fields {' '.join(expected)}, got {text!r}", lineno)
    return dict(p.split("=", 1) for p in parts)


def _int(value: str, lineno: int, base: int = 10) -> int:
    try:
        out = int(value, base)
    except ValueError:
        raise TableFormatError(f"not an integer: {value!r}", lineno) from None
    if out < 0:
        raise TableFormatError(f"negative value {value!r}", lineno)
    return out


def _parse_p(value: str, lineno: int):
    try:
        return Fraction(value) if "/" in value else float(value)
    except ValueError:
        raise TableFormatError(f"bad probability {value!r}", lineno) from None


class _Lines:
    def __init__(self, text: str):
        self.items = [(i + 1, line) for i, line in enumerate(text.split("\n"))]
        while self.items and self.items[-1][1] == "":
            self.items.pop()
        self.pos = 0

    def next(self):
        if self.pos >= len(self.items):
            last = self.items[-1][0] if self.items else 0
            raise TableFormatError("unexpected end of artifact", last + 1)
        item = self.items[self.pos]
        self.pos += 1
        return item

    def done(self) -> bool:
        return self.pos >= len(self.items)


def _parse_table(lines: _Lines) -> CodeTable:
    lineno, text = lines.next()
    if text != TABLE_MAGIC:
        raise TableFormatError(f"expected {TABLE_MAGIC!r}", lineno)
    lineno, text = lines.next()
    head = _fields(text, lineno, ["n", "kind", "t", "s"])
    n = _int(head["n"], lineno)
    kind = head["kind"]
    if kind not in (KIND_UNIVERSAL, KIND_CONDITIONAL, KIND_BERNOULLI):
        raise TableFormatError(f"unknown table kind {kind!r}", lineno)
    p = _parse_p(head["p"], lineno) if kind == KIND_BERNOULLI and "p" in head else None
    t, s = _int(head["t"], lineno), _int(head["s"], lineno)
    lineno, text = lines.next()
    if not text.startswith("S="):
        raise TableFormatError("expected S=<int>", lineno)
    count = _int(text[2:], lineno)
    lineno, text = lines.next()
    if not text.startswith("nk: "):
        raise TableFormatError("expected nk: line", lineno)
    nk = tuple(_int(x, lineno) for x in text[4:].split())
    if len(nk) != n + 1:
        raise TableFormatError(f"nk has {len(nk)} entries, expected {n + 1}", lineno)
    subgroups = []
    for _ in range(count):
        lineno, text = lines.next()
        if not text.startswith("sg: "):
            raise TableFormatError("expected sg: line", lineno)
        f = _fields(text[4:], lineno, ["k", "j", "len", "base"])
        k, j = _int(f["k"], lineno), _int(f["j"], lineno)
        length = _int(f["len"], lineno)
        base = _int(f["base"], lineno, 16)
        if k > n or j > 1:
            raise TableFormatError(f"subgroup key (k={k}, j={j}) out of range", lineno)
        if length > WINDOW_BITS:
            raise TableFormatError(f"length {length} exceeds {WINDOW_BITS}", lineno)
        size = binomial(n, k)
        sub_count = nk[k] if j == 0 else size - nk[k]
        subgroups.append(Subgroup(k, j, length, base, sub_count))
    table = CodeTable(n, nk, tuple(subgroups), kind, t, s, p)
    validate_table(table)
    return table


def deserialize(text: str):
    """Parse and validate an artifact produced by :func:`serialize`."""
    lines = _Lines(text)
    lineno, first = lines.next()
    if first.startswith(SET_MAGIC):
        f = _fields(first[len(SET_MAGIC):], lineno, ["n", "count"])
        n, count = _int(f["n"], lineno), _int(f["count"], lineno)
        if n % 2 or not CONTEXT_N_MIN <= n <= CONTEXT_N_MAX:
            raise TableFormatError(f"unsupported context-set block size {n}", lineno)
        if count != context_table_count(n):
            raise TableValidationError(
                f"context set for n={n} needs {context_table_count(n)} tables, got {count}"
            )
        tables = tuple(_parse_table(lines) for _ in range(count))
        expected = [(KIND_UNIVERSAL, 0, 0)]
        expected += [(KIND_CONDITIONAL, t, s) for t in (n, 2 * n) for s in range(t // 2 + 1)]
        for table, (kind, t, s) in zip(tables, expected):
            if table.n != n or (table.kind, table.t, table.s) != (kind, t, s):
                raise TableValidationError(
                    f"table (n={table.n}, kind={table.kind}, t={table.t}, s={table.s}) "
                    f"where (n={n}, kind={kind}, t={t}, s={s}) was expected"
                )
        result = ContextSet(n, tables)
    else:
        lines.pos = 0
        result = _parse_table(lines)
    if not lines.done():
        lineno, _ = lines.next()
        raise TableFormatError("trailing content after artifact", lineno)
    return result
