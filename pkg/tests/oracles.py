"""Independent reference computations used as test oracles."""

import heapq
import itertools
import json
import math
from pathlib import Path

from blade.codebook import DecoderTable

FIXTURES = Path(__file__).parent / "fixtures"


def expanded_huffman_average(n, probs):
    """Average length of a plain Huffman code over all 2**n words.

    Every word is its own leaf; the average equals the sum of the weights of
    all internal nodes.  No class structure is used.
    """
    counter = itertools.count()
    heap = []
    for k, pr in enumerate(probs):
        for _ in range(math.comb(n, k)):
            heap.append((pr, next(counter)))
    heapq.heapify(heap)
    total = 0
    while len(heap) > 1:
        a, _ = heapq.heappop(heap)
        b, _ = heapq.heappop(heap)
        total += a + b
        heapq.heappush(heap, (a + b, next(counter)))
    return total


def expanded_huffman_lengths(n, probs):
    """Sorted multiset of codeword lengths from a plain word-level Huffman run."""
    counter = itertools.count()
    heap = []
    for k, pr in enumerate(probs):
        for _ in range(math.comb(n, k)):
            heap.append((pr, next(counter), [0]))
    heapq.heapify(heap)
    while len(heap) > 1:
        a, _, la = heapq.heappop(heap)
        b, _, lb = heapq.heappop(heap)
        heapq.heappush(heap, (a + b, next(counter), [x + 1 for x in la + lb]))
    return sorted(heap[0][2])


def load_reference_tables():
    """The published n=12 decoder arrays (32-bit left-justified bases)."""
    doc = json.loads((FIXTURES / "reference_tables_n12.json").read_text())
    out = []
    for d in doc["tables"]:
        dec = DecoderTable(
            doc["n"],
            tuple(d["nk"]),
            tuple(int(x, 16) for x in d["lj_base"]),
            tuple(d["len"]),
            tuple(d["k"]),
            tuple(d["j"]),
        )
        out.append((d, dec))
    return doc["word_bits"], out


def bits_of(w, n):
    return format(w, f"0{n}b")
