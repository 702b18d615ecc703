"""Table-driven block encoder/decoder and the three-context adaptive coder.

The adaptive coder codes block 0 with the universal table, block 1 with the
table for a one-block sample (``t = n``) keyed by the weight of block 0, and
every later block with the table for a two-block sample (``t = 2n``) keyed by
the summed weight of the two previous blocks.  Only tables for sample
weights ``s <= t/2`` exist; for heavier samples the block is complemented,
coded with table ``t - s``, and the returned weight is mapped back.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bitio import WINDOW_BITS, BitStream
from .codebook import CodeTable, ContextSet, DecoderTable
from .enumeration import weight_index, word
from .errors import ContractViolation, CorruptStreamError


def encode_block(w: int, table: CodeTable, out: BitStream) -> int:
    """Append the codeword of ``w`` to ``out`` and return its weight."""
    k, i = weight_index(w, table.n)
    nk, base0, len0, base1, len1 = table._enc
    if i >= nk[k]:
        out.write_bits(base1[k] + i - nk[k], len1[k])
    else:
        out.write_bits(base0[k] + i, len0[k])
    return k


def decode_block(table: DecoderTable, inp: BitStream) -> tuple:
    """Decode one block; returns ``(w, k)``."""
    val = inp.peek_window()
    lj_base = table.lj_base
    j = 0
    # last lj_base is 0, so the scan always stops
    while lj_base[j] > val:
        j += 1
    length = table.lengths[j]
    inp.consume(length)
    i = (val - lj_base[j]) >> (WINDOW_BITS - length)
    k = table.ks[j]
    if table.js[j]:
        i += table.nk[k]
    return word(table.n, k, i), k


@dataclass
class AdaptiveCoderState:
    """Context of the adaptive coder; encoder and decoder keep identical copies.

    ``cx1`` and ``cx2`` hold the weights of the two most recent blocks once
    they exist.
    """

    context_set: ContextSet
    cx1: int | None = None
    cx2: int | None = None
    block_counter: int = 0

    @property
    def n(self) -> int:
        return self.context_set.n

    def select(self) -> tuple:
        """``(table position, complement?)`` for the next block."""
        n = self.n
        if self.block_counter == 0:
            return 0, False
        if self.block_counter == 1:
            cx = self.cx1
            if cx > n // 2:
                return self.context_set.one_block_offset + n - cx, True
            return self.context_set.one_block_offset + cx, False
        cx = self.cx1 + self.cx2
        if cx > n:
            return self.context_set.two_block_offset + 2 * n - cx, True
        return self.context_set.two_block_offset + cx, False

    def update(self, k: int) -> None:
        if self.block_counter == 0:
            self.cx1 = k
        elif self.block_counter == 1:
            self.cx2 = k
        else:
            self.cx1, self.cx2 = self.cx2, k
        self.block_counter += 1

    def reset(self) -> None:
        self.cx1 = self.cx2 = None
        self.block_counter = 0


def encode_adaptive(blocks, state: AdaptiveCoderState, out: BitStream) -> None:
    n = state.n
    mask = (1 << n) - 1
    tables = state.context_set.tables
    for w in blocks:
        if w < 0 or w > mask:
            raise ContractViolation(f"block {w:#x} does not fit in {n} bits")
        pos, flip = state.select()
        if flip:
            k = n - encode_block(w ^ mask, tables[pos], out)
        else:
            k = encode_block(w, tables[pos], out)
        state.update(k)


def decode_adaptive(inp: BitStream, state: AdaptiveCoderState, count: int) -> list:
    n = state.n
    mask = (1 << n) - 1
    decoders = state.context_set.decoders
    blocks = []
    for _ in range(count):
        if inp.remaining <= 0:
            raise CorruptStreamError(
                f"stream exhausted after {len(blocks)} of {count} blocks"
            )
        pos, flip = state.select()
        w, k = decode_block(decoders[pos], inp)
        if flip:
            w ^= mask
            k = n - k
        blocks.append(w)
        state.update(k)
    return blocks


def encode_sequence(blocks, context_set: ContextSet) -> BitStream:
    """Encode a whole sequence from a fresh state."""
    out = BitStream()
    encode_adaptive(blocks, AdaptiveCoderState(context_set), out)
    return out


def decode_sequence(inp: BitStream, context_set: ContextSet, count: int) -> list:
    return decode_adaptive(inp, AdaptiveCoderState(context_set), count)
