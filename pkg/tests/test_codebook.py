import math
from fractions import Fraction

import pytest

from blade.codebook import (
    CodeTable, ContextSet, Subgroup, build_code, build_context_set, context_table_count,
    deserialize, from_decoder_table, huffman_class_depths, kraft_sum, sample_tables,
    serialize, to_decoder_table, validate_table,
)
from blade.densities import WeightDistribution, weight_distribution
from blade.errors import (
    ContractViolation, TableFormatError, TableValidationError, UnsupportedConfiguration,
)

from conftest import EXAMPLE_P, EXAMPLE_ROWS
from oracles import expanded_huffman_average, expanded_huffman_lengths


def _word_length(table, w):
    return table.codeword(w)[1]


def test_example_codewords(example_code):
    t = example_code
    assert t.S == 8
    for w, k, i, _, length, code, sg in EXAMPLE_ROWS:
        c, n = t.codeword(int(w, 2))
        assert format(c, f"0{n}b") == code
        # subgroups are listed by decreasing codeword value
        g = t.subgroups[sg]
        assert g.k == k and g.length == length


def test_example_average(example_code):
    dist = weight_distribution("bernoulli", 4, p=EXAMPLE_P)
    avg = example_code.average_length(dist)
    assert avg == Fraction(9851, 5000)
    dot = sum(Fraction(pr) * length for _, _, _, pr, length, _, _ in EXAMPLE_ROWS)
    assert avg == dot


def test_literal_p_gives_mirror_code():
    # p = 9/10 read as P(1) is the complemented source: same multiset and S
    t = build_code(weight_distribution("bernoulli", 4, p=Fraction(9, 10)))
    lens = sorted(_word_length(t, w) for w in range(16))
    assert lens == sorted(r[4] for r in EXAMPLE_ROWS)
    assert t.S == 8
    assert t.average_length(weight_distribution("bernoulli", 4, p=Fraction(9, 10))) == Fraction(9851, 5000)


def test_uniform_one_bit():
    t = build_code(weight_distribution("bernoulli", 1, p=Fraction(1, 2)))
    assert t.S == 2
    assert t.lengths(0) == (1, None) and t.lengths(1) == (1, None)


def test_n12_universal_pattern():
    t = build_code(weight_distribution("universal", 12))
    assert kraft_sum(t) == 1
    expect = {0: {3}, 1: {7}, 2: {10}, 3: {11, 12}, 4: {13}, 5: {14}, 6: {14}, 7: {14}}
    for k, lens in expect.items():
        got = {x for x in t.lengths(k) if x is not None}
        assert got == lens, k


def _optimality_cases():
    cases = [("bernoulli", 4, dict(p=EXAMPLE_P)), ("bernoulli", 6, dict(p=Fraction(1, 3))),
             ("universal", 4, {}), ("universal", 8, {}), ("universal", 12, {})]
    for n in (4, 8):
        for t in (n, 2 * n):
            for s in range(0, t // 2 + 1):
                cases.append(("cond", n, dict(t=t, s=s)))
    cases += [("cond", 12, dict(t=12, s=2)), ("cond", 12, dict(t=24, s=9))]
    return cases


@pytest.mark.parametrize("kind,n,kw", _optimality_cases())
def test_optimal_against_expanded_huffman(kind, n, kw):
    dist = weight_distribution(kind, n, **kw)
    t = build_code(dist)
    assert t.average_length(dist) == expanded_huffman_average(n, dist.probs)
    validate_table(t)


def test_class_depths_cover_all_words():
    dist = weight_distribution("universal", 10)
    depths = huffman_class_depths(10, dist.probs)
    assert [sum(h.values()) for h in depths] == [math.comb(10, k) for k in range(11)]


def test_expanded_lengths_match_for_example():
    dist = weight_distribution("bernoulli", 4, p=EXAMPLE_P)
    assert expanded_huffman_lengths(4, dist.probs) == sorted(r[4] for r in EXAMPLE_ROWS)


def test_canonical_rank_order(context_sets):
    # within a subgroup codewords are consecutive and follow word rank
    for table in context_sets(8).tables:
        for k in range(9):
            words = [w for w in range(256) if bin(w).count("1") == k]
            codes = [table.codeword(w) for w in words]
            nk = table.nk[k]
            first, second = codes[:nk], codes[nk:]
            for part in (first, second):
                for (c0, l0), (c1, l1) in zip(part, part[1:]):
                    assert l0 == l1 and c1 == c0 + 1


def test_prefix_free(context_sets):
    for n in (4, 8):
        for table in context_sets(n).tables:
            words = sorted(format(c, f"0{length}b") for c, length in
                           (table.codeword(w) for w in range(1 << n)))
            for a, b in zip(words, words[1:]):
                assert not b.startswith(a)


def test_decoder_table(example_code):
    dec = to_decoder_table(example_code)
    assert dec.lj_base[0] == 1 << 63
    assert dec.lj_base[-1] == 0
    assert all(a > b for a, b in zip(dec.lj_base, dec.lj_base[1:]))
    assert dec.bases() == [g.base for g in example_code.subgroups]
    u = to_decoder_table(build_code(weight_distribution("universal", 12)))
    assert u.lj_base[0] >> 61 == 0b111 and u.lj_base[-1] == 0
    back = from_decoder_table(u, kind="universal")
    assert back.subgroups == build_code(weight_distribution("universal", 12)).subgroups


@pytest.mark.parametrize("n,count", [(4, 9), (8, 15), (12, 21), (16, 27), (20, 33)])
def test_context_set_shape(context_sets, n, count):
    cs = context_sets(n)
    assert len(cs.tables) == count == context_table_count(n) == 3 * n // 2 + 3
    for table in cs.tables:
        assert n + 1 <= table.S <= 2 * n
        assert kraft_sum(table) == 1
        assert table.max_length <= 64
        for k in range(n + 1):
            a, b = table.lengths(k)
            assert b is None or b == a + 1
    assert [(t.t, t.s) for t in cs.tables] == (
        [(0, 0)] + [(n, s) for s in range(n // 2 + 1)] + [(2 * n, s) for s in range(n + 1)])


def _lengths_by_class(table):
    n = table.n
    return [(table.nk[k],) + table.lengths(k) for k in range(n + 1)]


@pytest.mark.parametrize("n", [4, 8, 12, 16])
def test_flip_closure(n):
    for s in range(n):
        a = build_code(weight_distribution("cond", n, t=2 * n, s=s))
        b = build_code(weight_distribution("cond", n, t=2 * n, s=2 * n - s))
        la, lb = _lengths_by_class(a), _lengths_by_class(b)
        assert [x[1:] for x in la] == [x[1:] for x in lb[::-1]]
        assert [x[0] for x in la] == [x[0] for x in lb[::-1]]


def test_flip_closure_average_n20():
    # composite-weight ties at n=20 may split classes differently, the
    # average length under the matching density is still identical
    n = 20
    for s in range(0, 2 * n + 1, 3):
        da = weight_distribution("cond", n, t=2 * n, s=s)
        db = weight_distribution("cond", n, t=2 * n, s=2 * n - s)
        assert build_code(da).average_length(da) == build_code(db).average_length(db)


def test_max_subgroups_n12(context_sets):
    assert max(t.S for t in context_sets(12).tables) == 19


def test_build_errors():
    bad = WeightDistribution(2, (Fraction(1, 4), Fraction(1, 4), Fraction(1, 2)), "universal")
    with pytest.raises(ContractViolation):
        build_code(bad)
    with pytest.raises(UnsupportedConfiguration):
        build_code(weight_distribution("bernoulli", 20, p=Fraction(1, 10 ** 4)))
    for n in (3, 2, 22):
        with pytest.raises(UnsupportedConfiguration):
            build_context_set(n)
    uncapped = build_code(weight_distribution("bernoulli", 20, p=Fraction(1, 10 ** 4)), max_len=None)
    assert uncapped.max_length > 64
    with pytest.raises(UnsupportedConfiguration):
        to_decoder_table(uncapped)


def test_sample_tables():
    tabs = sample_tables(6, 7)
    assert [(t.t, t.s) for t in tabs] == [(7, s) for s in range(4)]
    assert sample_tables(6, 0)[0].kind == "universal"


def test_serialize_example(example_code):
    text = serialize(example_code)
    lines = text.splitlines()
    assert lines[0] == "blade-table v1"
    assert lines[1] == "n=4 kind=bernoulli t=0 s=0 p=1/10"
    assert "S=8" in lines
    back = deserialize(text)
    assert back.subgroups == example_code.subgroups and back.p == EXAMPLE_P
    assert serialize(back) == text


def test_serialize_float_p():
    t = build_code(weight_distribution("bernoulli", 6, p=0.3))
    back = deserialize(serialize(t))
    assert back.p == 0.3 and serialize(back) == serialize(t)


@pytest.mark.parametrize("n", [4, 12])
def test_serialize_set_roundtrip(context_sets, n):
    text = serialize(context_sets(n))
    back = deserialize(text)
    assert isinstance(back, ContextSet)
    assert serialize(back) == text
    assert back.tables == context_sets(n).tables


def _corrupt(text, old, new):
    assert old in text
    return text.replace(old, new, 1)


def test_deserialize_rejects(example_code):
    text = serialize(example_code)
    with pytest.raises(TableValidationError, match="Kraft"):
        deserialize(_corrupt(text, "len=4 base=1", "len=4 base=2"))
    with pytest.raises(TableValidationError):
        deserialize(_corrupt(text, "nk: 1 3 1 3 1", "nk: 1 3 1 2 1"))
    with pytest.raises(TableFormatError, match="line 3"):
        deserialize(_corrupt(text, "S=8", "S=eight"))
    with pytest.raises(TableFormatError):
        deserialize(text + "junk\n")
    with pytest.raises(TableFormatError):
        deserialize("")
    with pytest.raises(ContractViolation):
        serialize("not a table")


def test_validate_detects_order():
    t = build_code(weight_distribution("universal", 4))
    shuffled = CodeTable(t.n, t.nk, tuple(reversed(t.subgroups)), t.kind)
    with pytest.raises(TableValidationError):
        validate_table(shuffled)
    broken = CodeTable(t.n, t.nk, t.subgroups[:-1] + (Subgroup(0, 1, 3, 0, 1),), t.kind)
    with pytest.raises(TableValidationError):
        validate_table(broken)
