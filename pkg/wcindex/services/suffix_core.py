# wcindex/services/suffix_core.py

from __future__ import annotations

import logging
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from functools import cached_property
from typing import TYPE_CHECKING, Iterable, Optional, Sequence, Union

import numpy as np

from wcindex.services.errors import ContractViolation, IndexRangeError, ParameterError, RejectedInputError
from wcindex.services.stats import QueryCounters

if TYPE_CHECKING:
    from wcindex.services.suffix_tree import Location, SuffixTree

logger = logging.getLogger(__name__)

SENTINEL = 0
WILDCARD = -1

AlphabetSpec = Union[str, bytes, Iterable[int]]


def _ilog2(value: int) -> int:
    return value.bit_length() - 1


class RangeMinQuery:
    """
    Sparse table over an integer array; O(1) minimum of any half-open range.
    Rows are numpy arrays, row d holds minima of windows of width 2**d.
    """

    def __init__(self, data: Sequence[int]):
        arr = np.asarray(data, dtype=np.int64)
        levels = _ilog2(len(arr)) + 1 if len(arr) else 1
        self.sparse_table: list[np.ndarray] = [arr]
        for depth in range(1, levels):
            prev = self.sparse_table[-1]
            half = 1 << (depth - 1)
            self.sparse_table.append(np.minimum(prev[:-half], prev[half:]))

    def __call__(self, start: int, stop: int) -> Optional[int]:
        if start >= stop:
            return None
        depth = _ilog2(stop - start)
        row = self.sparse_table[depth]
        left = row[start]
        right = row[stop - (1 << depth)]
        return int(left if left < right else right)


@dataclass(frozen=True)
class Alphabet:
    """Sorted byte values; byte symbols[i] is text symbol i + 1 (0 is the sentinel)."""

    symbols: tuple[int, ...]

    @classmethod
    def infer(cls, raw: bytes) -> "Alphabet":
        return cls(tuple(sorted(set(raw))))

    @classmethod
    def from_spec(cls, spec: AlphabetSpec, raw: bytes) -> "Alphabet":
        if isinstance(spec, str):
            if spec == "infer":
                return cls.infer(raw)
            spec = spec.encode("utf-8")
        values = sorted(set(int(b) for b in spec))
        if not values:
            raise RejectedInputError("alphabet is empty")
        if values[0] < 0 or values[-1] > 255:
            raise RejectedInputError("alphabet symbols must be byte values")
        return cls(tuple(values))

    @property
    def sigma(self) -> int:
        return len(self.symbols)

    @cached_property
    def _table(self) -> np.ndarray:
        table = np.full(256, -1, dtype=np.int64)
        for code, byte in enumerate(self.symbols, start=1):
            table[byte] = code
        return table

    def encode(self, data: np.ndarray) -> np.ndarray:
        return self._table[data]

    def encode_literal(self, raw: bytes) -> Optional[tuple[int, ...]]:
        """Map a literal to symbols, None when some byte never occurs in the alphabet."""
        codes = self._table[np.frombuffer(raw, dtype=np.uint8)] if raw else np.empty(0, np.int64)
        if (codes < 0).any():
            return None
        return tuple(int(c) for c in codes)

    def decode(self, codes: Iterable[int]) -> bytes:
        return bytes(self.symbols[c - 1] for c in codes if c > 0)


def build_suffix_array(text: np.ndarray) -> np.ndarray:
    """Prefix doubling with numpy lexsort; text must end with a unique smallest sentinel."""
    n = len(text)
    rank = text.astype(np.int64)
    sa = np.argsort(rank, kind="stable")
    k = 1
    while True:
        second = np.full(n, -1, dtype=np.int64)
        if k < n:
            second[: n - k] = rank[k:]
        sa = np.lexsort((second, rank))
        first_sorted = rank[sa]
        second_sorted = second[sa]
        diff = np.empty(n, dtype=bool)
        diff[0] = True
        diff[1:] = (first_sorted[1:] != first_sorted[:-1]) | (second_sorted[1:] != second_sorted[:-1])
        new_rank = np.empty(n, dtype=np.int64)
        new_rank[sa] = np.cumsum(diff) - 1
        rank = new_rank
        if rank.max() == n - 1:
            return sa.astype(np.int64)
        k *= 2


def build_lcp_array(text: Sequence[int], sa: Sequence[int], isa: Sequence[int]) -> np.ndarray:
    """Kasai et al.: lcp[r] = LCP(suffix sa[r-1], suffix sa[r]), lcp[0] = 0."""
    n = len(text)
    lcp = [0] * n
    h = 0
    for i in range(n):
        r = isa[i]
        if r == 0:
            h = 0
            continue
        j = sa[r - 1]
        while i + h < n and j + h < n and text[i + h] == text[j + h]:
            h += 1
        lcp[r] = h
        if h > 0:
            h -= 1
    return np.asarray(lcp, dtype=np.int64)


class TextIndex:
    """
    Text plus suffix array, inverse suffix array, LCP array and range minima.

    Every rank, position and LCP consumed elsewhere goes through this class.
    With sa_sample_rate s > 1 only every s-th text position keeps its suffix
    array / inverse entry; the rest are recovered by walking psi.
    """

    def __init__(
        self,
        text: np.ndarray,
        sa: np.ndarray,
        lcp_array: np.ndarray,
        alphabet: Alphabet,
        *,
        sa_sample_rate: int = 1,
    ):
        if sa_sample_rate < 1:
            raise ParameterError("sa_sample_rate must be >= 1")
        self.text = np.asarray(text, dtype=np.int64)
        self.n = int(len(self.text))
        self.alphabet = alphabet
        self.sigma = alphabet.sigma
        self.sa_sample_rate = int(sa_sample_rate)
        self.lcp_array = np.asarray(lcp_array, dtype=np.int64)
        self.rmq = RangeMinQuery(self.lcp_array)

        sa = np.asarray(sa, dtype=np.int64)
        isa = np.empty(self.n, dtype=np.int64)
        isa[sa] = np.arange(self.n, dtype=np.int64)

        self._text = self.text.tolist()
        self._lcp = self.lcp_array.tolist()
        nxt = np.full(self.n, -1, dtype=np.int64)
        inner = sa < self.n - 1
        nxt[inner] = isa[sa[inner] + 1]
        self._psi1 = nxt.tolist()

        s = self.sa_sample_rate
        if s == 1:
            self._sa: Optional[list[int]] = sa.tolist()
            self._isa: Optional[list[int]] = isa.tolist()
            self._sa_samples: dict[int, int] = {}
            self._isa_samples: list[int] = []
        else:
            self._sa = None
            self._isa = None
            keep = (sa % s == 0) | (sa == self.n - 1)
            ranks = np.flatnonzero(keep)
            self._sa_samples = dict(zip(ranks.tolist(), sa[ranks].tolist()))
            self._isa_samples = isa[::s].tolist()
        logger.debug("text index n=%d sigma=%d sample_rate=%d", self.n, self.sigma, s)

    # ----------------------------
    # Suffix array functionality
    # ----------------------------
    def sa_lookup(self, rank: int, counters: QueryCounters | None = None) -> int:
        if not 0 <= rank < self.n:
            raise IndexRangeError(f"rank {rank} outside 0..{self.n - 1}")
        if counters is not None:
            counters.sa_accesses += 1
        if self._sa is not None:
            return self._sa[rank]
        steps = 0
        samples = self._sa_samples
        while rank not in samples:
            rank = self._psi1[rank]
            steps += 1
        return samples[rank] - steps

    def isa_lookup(self, position: int, counters: QueryCounters | None = None) -> int:
        if not 0 <= position < self.n:
            raise IndexRangeError(f"position {position} outside 0..{self.n - 1}")
        if counters is not None:
            counters.sa_accesses += 1
        if self._isa is not None:
            return self._isa[position]
        s = self.sa_sample_rate
        rank = self._isa_samples[position // s]
        for _ in range(position % s):
            rank = self._psi1[rank]
        return rank

    def psi(self, rank: int, shift: int, counters: QueryCounters | None = None) -> int:
        """Rank of the suffix starting `shift` symbols after suffix sa[rank]."""
        if shift < 0:
            raise IndexRangeError("shift must be non-negative")
        position = self.sa_lookup(rank, counters)
        if position + shift > self.n - 1:
            raise IndexRangeError(f"shift {shift} runs past the text end")
        return self.isa_lookup(position + shift, counters)

    def lcp_suffixes(self, rank_a: int, rank_b: int, counters: QueryCounters | None = None) -> int:
        if not (0 <= rank_a < self.n and 0 <= rank_b < self.n):
            raise IndexRangeError(f"ranks ({rank_a}, {rank_b}) outside 0..{self.n - 1}")
        if rank_a == rank_b:
            return self.n - self.sa_lookup(rank_a, counters)
        lo, hi = (rank_a, rank_b) if rank_a < rank_b else (rank_b, rank_a)
        return self.rmq(lo + 1, hi + 1)

    def symbol_at(self, position: int) -> int:
        """Text symbol at `position`, -1 past the sentinel."""
        return self._text[position] if position < self.n else -1

    def suffix_array(self) -> np.ndarray:
        if self._sa is not None:
            return np.asarray(self._sa, dtype=np.int64)
        return np.asarray([self.sa_lookup(r) for r in range(self.n)], dtype=np.int64)

    def suffix(self, position: int) -> tuple[int, ...]:
        return tuple(self._text[position:])

    def segment(self, start: int, stop: int) -> tuple[int, ...]:
        return tuple(self._text[start:stop])

    # ----------------------------
    # Interval helpers (suffix-link emulation)
    # ----------------------------
    def narrow(self, lo: int, hi: int, depth: int, symbol: int,
               counters: QueryCounters | None = None) -> tuple[int, int]:
        """Sub-interval of [lo, hi) whose suffixes carry `symbol` at offset `depth`."""

        def key(q: int) -> int:
            return self.symbol_at(self.sa_lookup(q, counters) + depth)

        span = range(lo, hi)
        start = lo + bisect_left(span, symbol, key=key)
        stop = lo + bisect_right(span, symbol, key=key)
        return start, stop

    def widen(self, rank: int, depth: int) -> tuple[int, int]:
        """Maximal interval around `rank` whose suffixes share `depth` leading symbols."""
        if depth == 0:
            return 0, self.n
        lo, hi = 0, rank
        while lo < hi:
            mid = (lo + hi) // 2
            if self.rmq(mid + 1, rank + 1) >= depth:
                hi = mid
            else:
                lo = mid + 1
        start = lo
        lo, hi = rank, self.n - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if self.rmq(rank + 1, mid + 1) >= depth:
                lo = mid
            else:
                hi = mid - 1
        return start, lo + 1

    @property
    def nbytes(self) -> int:
        return int(self.text.nbytes + self.lcp_array.nbytes)


def build_text_index(
    raw_text: Union[bytes, str],
    alphabet_spec: AlphabetSpec = "infer",
    sampling: int = 1,
) -> TextIndex:
    raw = raw_text.encode("utf-8") if isinstance(raw_text, str) else bytes(raw_text)
    if not raw:
        raise RejectedInputError("text is empty", 0)
    alphabet = Alphabet.from_spec(alphabet_spec, raw)
    codes = alphabet.encode(np.frombuffer(raw, dtype=np.uint8))
    bad = np.flatnonzero(codes < 0)
    if bad.size:
        offset = int(bad[0])
        raise RejectedInputError(f"byte {raw[offset]!r} is outside the alphabet", offset)

    text = np.append(codes, SENTINEL).astype(np.int64)
    sa = build_suffix_array(text)
    isa = np.empty_like(sa)
    isa[sa] = np.arange(len(sa), dtype=np.int64)
    lcp = build_lcp_array(text.tolist(), sa.tolist(), isa.tolist())
    logger.info("built suffix array n=%d sigma=%d", len(text), alphabet.sigma)
    return TextIndex(text, sa, lcp, alphabet, sa_sample_rate=sampling)


@dataclass(frozen=True)
class PatternHandle:
    """
    A literal pattern preprocessed against one TextIndex.

    For each suffix P[j..]: ranks[j] counts the text suffixes strictly smaller
    than P[j..]; lcp_left/lcp_right are its LCPs with the text suffixes of
    rank ranks[j]-1 and ranks[j]; match_lengths[j] and intervals[j] describe
    its longest prefix occurring in the text; loci[j] is that prefix's tree
    Location when a tree was supplied.
    """

    pattern: tuple[int, ...]
    ranks: tuple[int, ...]
    lcp_left: tuple[int, ...]
    lcp_right: tuple[int, ...]
    match_lengths: tuple[int, ...]
    intervals: tuple[tuple[int, int], ...]
    loci: Optional[tuple["Location", ...]] = None
    index: TextIndex = field(default=None, repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.pattern)

    def symbol(self, j: int) -> int:
        return self.pattern[j]

    def rank(self, j: int) -> int:
        return self.ranks[j]

    def lcp_with_suffix(self, j: int, q: int, counters: QueryCounters | None = None) -> int:
        """LCP of P[j..] with the text suffix of rank q."""
        m = len(self.pattern)
        if not 0 <= j <= m:
            raise IndexRangeError(f"pattern suffix {j} outside 0..{m}")
        if j == m:
            return 0
        r = self.ranks[j]
        if q >= r:
            base = self.lcp_right[j]
            if q == r:
                return base
            return min(base, self.index.lcp_suffixes(r, q, counters))
        base = self.lcp_left[j]
        if q == r - 1:
            return base
        return min(base, self.index.lcp_suffixes(q, r - 1, counters))


def preprocess_pattern(
    idx: TextIndex,
    P: Sequence[int],
    *,
    tree: Optional["SuffixTree"] = None,
    counters: QueryCounters | None = None,
) -> PatternHandle:
    """
    Rank every suffix of P by walking suffix links over suffix-array intervals:
    drop the first symbol with psi plus an LCP widening, then extend by
    narrowing; total extensions are bounded by |P|.
    """
    pattern = tuple(int(c) for c in P)
    if not pattern:
        raise ContractViolation("pattern is empty")
    if any(c < 0 for c in pattern):
        raise ContractViolation("literal pattern contains a wildcard")

    n = idx.n
    m = len(pattern)
    ranks: list[int] = []
    lefts: list[int] = []
    rights: list[int] = []
    lengths: list[int] = []
    intervals: list[tuple[int, int]] = []

    lo, hi, length = 0, n, 0
    for j in range(m):
        if j > 0:
            if length > 1:
                rank = idx.psi(lo, 1, counters)
                lo, hi = idx.widen(rank, length - 1)
            else:
                lo, hi = 0, n
            length = max(0, length - 1)

        insertion = None
        while j + length < m:
            nlo, nhi = idx.narrow(lo, hi, length, pattern[j + length], counters)
            if nlo == nhi:
                insertion = nlo
                break
            lo, hi = nlo, nhi
            length += 1
        r = lo if insertion is None else insertion

        if r == 0:
            left = 0
        elif r - 1 >= lo:
            left = length
        else:
            left = idx.lcp_suffixes(r - 1, r, counters)
        if r == n:
            right = 0
        elif r < hi:
            right = length
        else:
            right = idx.lcp_suffixes(hi - 1, hi, counters)

        ranks.append(r)
        lefts.append(left)
        rights.append(right)
        lengths.append(length)
        intervals.append((lo, hi))

    loci = None
    if tree is not None:
        loci = tuple(tree.locate_interval(a, b, d) for (a, b), d in zip(intervals, lengths))

    return PatternHandle(
        pattern=pattern,
        ranks=tuple(ranks),
        lcp_left=tuple(lefts),
        lcp_right=tuple(rights),
        match_lengths=tuple(lengths),
        intervals=tuple(intervals),
        loci=loci,
        index=idx,
    )
