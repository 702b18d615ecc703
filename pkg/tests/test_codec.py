import itertools
import random

import pytest

from blade.bitio import BitStream
from blade.codebook import build_code, to_decoder_table
from blade.codec import (
    AdaptiveCoderState, decode_adaptive, decode_block, decode_sequence, encode_adaptive,
    encode_block, encode_sequence,
)
from blade.densities import weight_distribution
from blade.errors import ContractViolation, CorruptStreamError

from conftest import EXAMPLE_ROWS


def test_encode_examples(example_code):
    out = BitStream()
    assert encode_block(0b0110, example_code, out) == 2
    assert out.to_bitstring() == "0000010"
    out = BitStream()
    assert encode_block(0, example_code, out) == 0
    assert out.to_bitstring() == "1"
    u = build_code(weight_distribution("universal", 12))
    out = BitStream()
    assert encode_block(0, u, out) == 0
    assert out.to_bitstring() == "111"


def test_decode_examples(example_code):
    dec = to_decoder_table(example_code)
    assert decode_block(dec, BitStream.from_bitstring("0000010" + "1")) == (0b0110, 2)
    s = BitStream.from_bitstring("1")
    assert decode_block(dec, s) == (0, 0)
    assert s.remaining == 0


def test_example_stream(example_code):
    out = BitStream()
    for w, *_ in EXAMPLE_ROWS:
        encode_block(int(w, 2), example_code, out)
    assert out.to_bitstring() == "".join(r[5] for r in EXAMPLE_ROWS)
    dec = to_decoder_table(example_code)
    got = [decode_block(dec, out)[0] for _ in EXAMPLE_ROWS]
    assert got == [int(r[0], 2) for r in EXAMPLE_ROWS]


@pytest.mark.parametrize("n", [4, 8])
def test_every_table_roundtrip(context_sets, n):
    cs = context_sets(n)
    for table, dec in zip(cs.tables, cs.decoders):
        out = BitStream()
        for w in range(1 << n):
            encode_block(w, table, out)
        written = out.bit_length
        inp = BitStream(out.getvalue(), written)
        assert [decode_block(dec, inp)[0] for _ in range(1 << n)] == list(range(1 << n))
        assert inp.read_cursor == written


def test_truncated_block(example_code):
    dec = to_decoder_table(example_code)
    with pytest.raises(CorruptStreamError):
        decode_block(dec, BitStream.from_bitstring("00000"))


def test_adaptive_exhaustive_pairs(context_sets):
    cs = context_sets(4)
    for a, b in itertools.product(range(16), repeat=2):
        s = encode_sequence([a, b], cs)
        inp = BitStream(s.getvalue(), s.bit_length)
        assert decode_sequence(inp, cs, 2) == [a, b]
        assert inp.remaining == 0


def test_adaptive_exhaustive_triples_n4(context_sets):
    cs = context_sets(4)
    for seq in itertools.product(range(16), repeat=3):
        s = encode_sequence(list(seq), cs)
        assert decode_sequence(BitStream(s.getvalue(), s.bit_length), cs, 3) == list(seq)


@pytest.mark.parametrize("n", [8, 12, 16, 20])
def test_adaptive_random(context_sets, n):
    cs = context_sets(n)
    rng = random.Random(n)
    for _ in range(200):
        p = rng.random()
        m = rng.randint(1, 40)
        seq = [sum((rng.random() < p) << j for j in range(n)) for _ in range(m)]
        s = encode_sequence(seq, cs)
        inp = BitStream(s.getvalue(), s.bit_length)
        assert decode_sequence(inp, cs, m) == seq
        assert inp.remaining == 0


def test_context_selection(context_sets):
    cs = context_sets(8)
    st = AdaptiveCoderState(cs)
    assert st.select() == (0, False)
    st.update(6)
    # one-block context above n/2 folds onto table n - cx
    assert st.select() == (cs.table_index(8, 2), True)
    st.update(3)
    # two-block context 6 + 3 = 9 > n folds onto 2n - 9
    assert st.select() == (cs.table_index(16, 7), True)
    st.update(1)
    assert (st.cx1, st.cx2) == (3, 1)
    assert st.select() == (cs.table_index(16, 4), False)
    st.reset()
    assert st.select() == (0, False) and st.cx1 is None


def test_first_block_uses_universal_table(context_sets):
    cs = context_sets(8)
    for w in (0, 0xFF, 0x5A):
        direct = BitStream()
        encode_block(w, cs.tables[0], direct)
        assert encode_sequence([w, 1, 2], cs).to_bitstring().startswith(direct.to_bitstring())


def test_states_stay_in_sync(context_sets):
    cs = context_sets(12)
    rng = random.Random(5)
    seq = [rng.getrandbits(12) & rng.getrandbits(12) for _ in range(30)]
    enc, dec = AdaptiveCoderState(cs), AdaptiveCoderState(cs)
    out = BitStream()
    for w in seq:
        encode_adaptive([w], enc, out)
        assert decode_adaptive(out, dec, 1) == [w]
        assert (enc.cx1, enc.cx2, enc.block_counter) == (dec.cx1, dec.cx2, dec.block_counter)


def _block_lengths(seq, cs):
    st = AdaptiveCoderState(cs)
    out = BitStream()
    lengths, selfsym = [], []
    for w in seq:
        pos, _ = st.select()
        table = cs.tables[pos]
        selfsym.append(table.kind == "universal" or 2 * table.s == table.t)
        before = out.bit_length
        encode_adaptive([w], st, out)
        lengths.append(out.bit_length - before)
    return lengths, selfsym


def test_complement_symmetry(context_sets):
    # complementing every block mirrors every context; lengths agree exactly
    # except under self-symmetric tables, where equal-probability classes
    # k and n-k may sit one level apart
    cs = context_sets(8)
    rng = random.Random(11)
    mask = 0xFF
    for _ in range(300):
        p = rng.random()
        seq = [sum((rng.random() < p) << j for j in range(8)) for _ in range(12)]
        a, sym = _block_lengths(seq, cs)
        b, _ = _block_lengths([w ^ mask for w in seq], cs)
        for la, lb, s in zip(a, b, sym):
            if s:
                assert abs(la - lb) <= 1
            else:
                assert la == lb


def test_adaptive_errors(context_sets):
    cs = context_sets(4)
    with pytest.raises(ContractViolation):
        encode_sequence([16], cs)
    with pytest.raises(ContractViolation):
        encode_sequence([-1], cs)
    s = encode_sequence([1, 2, 3], cs)
    with pytest.raises(CorruptStreamError):
        decode_sequence(BitStream(s.getvalue(), s.bit_length), cs, 4)
    with pytest.raises(CorruptStreamError):
        decode_sequence(BitStream(s.getvalue(), s.bit_length - 1), cs, 3)
