import numpy as np
import pytest

from tests.helpers import A, B, N, naive_lcp
from wcindex.services.errors import ContractViolation, IndexRangeError, RejectedInputError
from wcindex.services.suffix_core import (
    RangeMinQuery,
    build_text_index,
    preprocess_pattern,
)


def test_banana_arrays(banana_text):
    assert banana_text.n == 7
    assert banana_text.sigma == 3
    assert banana_text.suffix_array().tolist() == [6, 5, 3, 1, 0, 4, 2]
    assert [banana_text.isa_lookup(p) for p in range(7)] == [4, 3, 6, 2, 5, 1, 0]
    assert banana_text.lcp_array.tolist() == [0, 0, 1, 3, 0, 0, 2]


def test_single_symbol_text():
    idx = build_text_index("a")
    assert idx.suffix_array().tolist() == [1, 0]


def test_rejects_empty_text_and_foreign_bytes():
    with pytest.raises(RejectedInputError):
        build_text_index("")
    with pytest.raises(RejectedInputError) as info:
        build_text_index("abcx", alphabet_spec=b"abc")
    assert info.value.offset == 3


def test_lookups_and_psi(banana_text):
    assert banana_text.sa_lookup(4) == 0
    for t in range(7):
        assert banana_text.psi(t, 0) == t
    assert banana_text.psi(3, 2) == 2
    with pytest.raises(IndexRangeError):
        banana_text.psi(0, 1)          # the sentinel suffix has nothing after it
    with pytest.raises(IndexRangeError):
        banana_text.sa_lookup(7)


def test_lcp_suffixes(banana_text):
    assert banana_text.lcp_suffixes(2, 3) == 3
    assert banana_text.lcp_suffixes(3, 2) == 3
    assert banana_text.lcp_suffixes(0, 6) == 0
    for a in range(7):
        assert banana_text.lcp_suffixes(a, a) == 7 - banana_text.sa_lookup(a)


def test_preprocess_nana(banana_text):
    handle = preprocess_pattern(banana_text, (N, A, N, A))
    assert handle.rank(0) == 6
    assert handle.lcp_right[0] == 4       # "nana$"
    assert handle.lcp_left[0] == 2        # "na$"


def test_preprocess_existing_suffix(banana_text):
    handle = preprocess_pattern(banana_text, (A, N, A, 0))
    assert handle.rank(0) == 2
    assert handle.lcp_right[0] == 4


def test_preprocess_past_the_end():
    idx = build_text_index("banana", alphabet_spec=b"abnz")
    handle = preprocess_pattern(idx, (4,))
    assert handle.rank(0) == idx.n
    assert handle.lcp_right[0] == 0


def test_preprocess_rejects_wildcards_and_empty(banana_text):
    with pytest.raises(ContractViolation):
        preprocess_pattern(banana_text, (A, -1))
    with pytest.raises(ContractViolation):
        preprocess_pattern(banana_text, ())


def test_lcp_with_suffix_matches_naive(banana_text):
    text = banana_text.text.tolist()
    sa = banana_text.suffix_array().tolist()
    handle = preprocess_pattern(banana_text, (B, A, N, A, N, A))
    for j in range(len(handle)):
        for q in range(7):
            assert handle.lcp_with_suffix(j, q) == naive_lcp(handle.pattern[j:], text[sa[q]:])
    assert handle.lcp_with_suffix(len(handle), 0) == 0
    with pytest.raises(IndexRangeError):
        handle.lcp_with_suffix(len(handle) + 1, 0)


def test_locus_attached_with_tree(banana_text, banana_tree):
    handle = preprocess_pattern(banana_text, (A, N, A), tree=banana_tree)
    assert banana_tree.path_label(handle.loci[0]) == (A, N, A)


@pytest.mark.parametrize("rate", [2, 3, 5])
def test_sampled_lookups_are_identical(rate):
    rng = np.random.default_rng(7)
    raw = bytes(rng.choice(list(b"acgt"), size=200).tolist())
    plain = build_text_index(raw)
    sampled = build_text_index(raw, sampling=rate)
    assert sampled.suffix_array().tolist() == plain.suffix_array().tolist()
    for p in range(plain.n):
        assert sampled.isa_lookup(p) == plain.isa_lookup(p)


def test_random_texts_against_brute_force():
    rng = np.random.default_rng(11)
    for sigma in (2, 3, 4, 26):
        for _ in range(5):
            n = int(rng.integers(1, 80))
            raw = bytes((97 + rng.integers(0, sigma, size=n)).tolist())
            idx = build_text_index(raw)
            codes = idx.text.tolist()
            sa = sorted(range(idx.n), key=lambda i: codes[i:])
            assert idx.suffix_array().tolist() == sa
            for r in range(1, idx.n):
                assert idx.lcp_array[r] == naive_lcp(codes[sa[r - 1]:], codes[sa[r]:])


def test_range_min_query():
    rmq = RangeMinQuery([5, 2, 7, 1, 9, 3])
    assert rmq(0, 6) == 1
    assert rmq(0, 3) == 2
    assert rmq(4, 6) == 3
    assert rmq(2, 2) is None


def test_text_alphabet_matches_text_encoding():
    idx = build_text_index("héllo", alphabet_spec="hélo")
    assert idx.alphabet.symbols == tuple(sorted(set("hélo".encode("utf-8"))))
    assert idx.alphabet.decode(idx.text[:-1]) == "héllo".encode("utf-8")
