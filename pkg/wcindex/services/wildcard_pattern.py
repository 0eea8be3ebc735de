# wcindex/services/wildcard_pattern.py

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Union

from wcindex.services.errors import RejectedInputError
from wcindex.services.suffix_core import Alphabet

WILDCARD_CHAR = "?"
ESCAPE_CHAR = "\\"

Piece = tuple[int, bytes]


@dataclass(frozen=True)
class WildcardPattern:
    """
    A run of pieces (k_i wildcards, then literal P_i).

    Normal form: only the first piece may have k = 0, only the last may have
    an empty literal, and no piece is (0, b"").
    """

    pieces: tuple[Piece, ...]

    @classmethod
    def from_pieces(cls, pieces: Iterable[Piece]) -> "WildcardPattern":
        out: list[list] = []
        pending = 0
        for k, literal in pieces:
            if k < 0:
                raise RejectedInputError(f"negative wildcard run {k}")
            pending += int(k)
            if not literal:
                continue
            if out and pending == 0:
                out[-1][1] += bytes(literal)
            else:
                out.append([pending, bytes(literal)])
            pending = 0
        if pending:
            out.append([pending, b""])
        return cls(tuple((k, lit) for k, lit in out))

    @property
    def m(self) -> int:
        """Literal symbol count."""
        return sum(len(lit) for _, lit in self.pieces)

    @property
    def g(self) -> int:
        """Wildcard count."""
        return sum(k for k, _ in self.pieces)

    @property
    def d(self) -> int:
        return len(self.pieces)

    @property
    def length(self) -> int:
        return self.m + self.g

    def prefix_wildcards(self) -> list[int]:
        """Wildcards up to and including each piece's own run."""
        totals = []
        running = 0
        for k, _ in self.pieces:
            running += k
            totals.append(running)
        return totals

    def encode(self, alphabet: Alphabet) -> Optional[list[tuple[int, tuple[int, ...]]]]:
        """Pieces over text symbols; None when a literal byte is not in the alphabet."""
        out = []
        for k, literal in self.pieces:
            codes = alphabet.encode_literal(literal)
            if codes is None:
                return None
            out.append((k, codes))
        return out

    def flat(self) -> list[Optional[int]]:
        """Flat byte view, None for each wildcard."""
        flat: list[Optional[int]] = []
        for k, literal in self.pieces:
            flat.extend([None] * k)
            flat.extend(literal)
        return flat

    def to_text(self) -> str:
        parts = []
        for k, literal in self.pieces:
            if k == 1:
                parts.append(WILDCARD_CHAR)
            elif k > 1:
                parts.append(f"{WILDCARD_CHAR}{{{k}}}")
            text = literal.decode("utf-8", errors="replace")
            text = text.replace(ESCAPE_CHAR, ESCAPE_CHAR * 2).replace(WILDCARD_CHAR, ESCAPE_CHAR + WILDCARD_CHAR)
            if k and text.startswith("{"):
                text = ESCAPE_CHAR + text
            parts.append(text)
        return "".join(parts)

    def __str__(self) -> str:
        return self.to_text()


def parse_pattern(text: Union[str, bytes]) -> WildcardPattern:
    """
    `?` is one wildcard, `?{k}` a run of k, a backslash makes the next
    character literal; everything else is literal.
    """
    raw = text.encode("utf-8") if isinstance(text, str) else bytes(text)
    pieces: list[Piece] = []
    literal = bytearray()
    pending = 0
    i = 0
    while i < len(raw):
        ch = raw[i]
        if ch == ord(ESCAPE_CHAR):
            if i + 1 >= len(raw):
                raise RejectedInputError("dangling escape at end of pattern", i)
            literal.append(raw[i + 1])
            i += 2
            continue
        if ch != ord(WILDCARD_CHAR):
            literal.append(ch)
            i += 1
            continue
        if literal:
            pieces.append((pending, bytes(literal)))
            literal.clear()
            pending = 0
        run = 1
        i += 1
        if i < len(raw) and raw[i] == ord("{"):
            close = raw.find(b"}", i)
            digits = raw[i + 1:close] if close >= 0 else b""
            if close < 0 or not digits.isdigit():
                raise RejectedInputError("malformed wildcard run, expected ?{k}", i)
            run = int(digits)
            i = close + 1
        pending += run
    pieces.append((pending, bytes(literal)))
    return WildcardPattern.from_pieces(pieces)


def as_pattern(pattern: Union[WildcardPattern, str, bytes]) -> WildcardPattern:
    if isinstance(pattern, WildcardPattern):
        return pattern
    return parse_pattern(pattern)
