# wcindex/services/oracles.py

from __future__ import annotations

import itertools
import logging
from typing import Optional, Union

import numpy as np

from wcindex.config import ENUMERATE_BUDGET
from wcindex.services.errors import BudgetExceededError
from wcindex.services.suffix_core import TextIndex
from wcindex.services.wildcard_pattern import WildcardPattern, as_pattern

logger = logging.getLogger(__name__)


def oracle_scan(text: Union[bytes, str], pattern: Union[WildcardPattern, str, bytes]) -> list[int]:
    """Reference semantics: slide the flat pattern over the raw text."""
    raw = text.encode("utf-8") if isinstance(text, str) else bytes(text)
    flat = as_pattern(pattern).flat()
    n, L = len(raw), len(flat)
    if L > n:
        return []
    span = n - L + 1 if L else n
    arr = np.frombuffer(raw, dtype=np.uint8)
    mask = np.ones(span, dtype=bool)
    for i, byte in enumerate(flat):
        if byte is not None:
            mask &= arr[i:i + span] == byte
    return np.flatnonzero(mask).tolist()


def exact_interval(idx: TextIndex, symbols: tuple[int, ...]) -> tuple[int, int]:
    """Half-open suffix-array interval of the suffixes starting with `symbols`."""
    lo, hi = 0, idx.n
    for depth, symbol in enumerate(symbols):
        lo, hi = idx.narrow(lo, hi, depth, symbol)
        if lo == hi:
            break
    return lo, hi


def oracle_enumerate(
    idx: TextIndex,
    pattern: Union[WildcardPattern, str, bytes],
    budget: Optional[int] = None,
) -> list[int]:
    """Expand every wildcard over the alphabet and search each concrete pattern exactly."""
    pattern = as_pattern(pattern)
    budget = ENUMERATE_BUDGET if budget is None else budget
    if pattern.length > idx.n - 1:
        return []
    pieces = pattern.encode(idx.alphabet)
    if pieces is None:
        return []
    required = idx.sigma ** pattern.g
    if required > budget:
        raise BudgetExceededError(required, budget)

    template: list[Optional[int]] = []
    for k, literal in pieces:
        template.extend([None] * k)
        template.extend(literal)
    holes = [i for i, s in enumerate(template) if s is None]
    last = min(idx.n - 2, idx.n - 1 - len(template))

    positions: set[int] = set()
    for fill in itertools.product(range(1, idx.sigma + 1), repeat=len(holes)):
        concrete = list(template)
        for i, symbol in zip(holes, fill):
            concrete[i] = symbol
        lo, hi = exact_interval(idx, tuple(concrete))
        for rank in range(lo, hi):
            p = idx.sa_lookup(rank)
            if p <= last:
                positions.add(p)
    logger.debug("enumerated %d concrete patterns for %s", required, pattern)
    return sorted(positions)
