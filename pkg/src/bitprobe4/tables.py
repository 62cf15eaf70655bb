"""Packed bit tables A, B, C and their canonical layouts.

Table A holds one bit per block and steers the second probe: 0 sends the
query to table B, 1 to table C.  Table B reserves one block of b bits for
every cover line of every superblock.  Table C reserves one block of b bits
for every grid coordinate, shared by all superblocks.  Exact sizes:

    |A| = b**5
    |B| = sum over superblocks s of num_lines(s) * b
        = b * ((b**2 - 1) * b * (b + 3) // 2 + b)
    |C| = b**4 * b = b**5

Bit positions:

    A(s, x, y)    = (s - 1) * b**4 + y * b**2 + x
    B(line, i)    = offset(s) + line_ordinal(line) * b + i
    C(x, y, i)    = (y * b**2 + x) * b + i

where offset(s) accumulates num_lines(j) * b over superblocks j < s.

Bits pack least-significant-bit first: bit k lives in byte k // 8 at bit
position k % 8.  The serialized file is magic "BP42", a version byte, b as
8-byte little-endian, then tables A, B, C, each as an 8-byte little-endian
bit length followed by ceil(len/8) payload bytes.  No padding between
sections; trailing bytes are an error.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

from .geometry import BlockAddr, LineRef, Params, line_ordinal, num_lines, validate_block

MAGIC = b"BP42"
FORMAT_VERSION = 1


class ParseError(ValueError):
    """Base class for serialization format violations."""


class BadMagicError(ParseError):
    pass


class UnsupportedVersionError(ParseError):
    pass


class LengthMismatchError(ParseError):
    pass


class TrailingDataError(ParseError):
    pass


class BitTable:
    """A fixed-length sequence of bits packed LSB-first into a bytearray."""

    __slots__ = ("nbits", "data")

    def __init__(self, nbits: int, data: bytearray | None = None):
        if nbits < 0:
            raise ValueError(f"bit count must be >= 0, got {nbits}")
        nbytes = (nbits + 7) // 8
        if data is None:
            data = bytearray(nbytes)
        elif len(data) != nbytes:
            raise ValueError(f"need {nbytes} bytes for {nbits} bits, got {len(data)}")
        self.nbits = nbits
        self.data = data

    def __len__(self) -> int:
        return self.nbits

    def _check(self, pos: int) -> None:
        if not 0 <= pos < self.nbits:
            raise IndexError(f"bit {pos} out of range [0, {self.nbits})")

    def __getitem__(self, pos: int) -> int:
        self._check(pos)
        return (self.data[pos >> 3] >> (pos & 7)) & 1

    def __setitem__(self, pos: int, value: int) -> None:
        self._check(pos)
        if value:
            self.data[pos >> 3] |= 1 << (pos & 7)
        else:
            self.data[pos >> 3] &= ~(1 << (pos & 7))

    def flip(self, pos: int) -> None:
        self._check(pos)
        self.data[pos >> 3] ^= 1 << (pos & 7)

    def ones(self) -> Iterator[int]:
        """Positions of set bits, ascending."""
        for pos in range(self.nbits):
            if (self.data[pos >> 3] >> (pos & 7)) & 1:
                yield pos

    def copy(self) -> "BitTable":
        return BitTable(self.nbits, bytearray(self.data))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitTable):
            return NotImplemented
        return self.nbits == other.nbits and self.data == other.data

    def __repr__(self) -> str:
        return f"BitTable(nbits={self.nbits}, ones={list(self.ones())!r})"


@lru_cache(maxsize=None)
def line_offsets(b: int) -> tuple[int, ...]:
    """Per-superblock bit offsets into table B, plus the total as last entry.

    offsets[s - 1] is where superblock s's line blocks start; offsets[b]
    equals |B|.
    """
    p = Params(b)
    offsets = [0]
    for s in range(1, b + 1):
        offsets.append(offsets[-1] + num_lines(p, s) * b)
    return tuple(offsets)


def size_a(p: Params) -> int:
    return p.num_blocks


def size_b(p: Params) -> int:
    return line_offsets(p.b)[-1]


def size_c(p: Params) -> int:
    return p.blocks_per_superblock * p.b


def a_index(p: Params, blk: BlockAddr) -> int:
    """Bit position of blk's steering bit in table A."""
    validate_block(p, blk)
    return (blk.s - 1) * p.blocks_per_superblock + blk.y * p.grid_side + blk.x


def b_index(p: Params, l: LineRef, i: int) -> int:
    """Bit position of index i of line l's block in table B."""
    if not 0 <= i < p.b:
        raise ValueError(f"block index {i} out of range [0, {p.b})")
    return line_offsets(p.b)[l.s - 1] + line_ordinal(p, l) * p.b + i


def c_index(p: Params, x: int, y: int, i: int) -> int:
    """Bit position of index i of the grid-point (x, y) block in table C.

    Independent of the superblock: all superblocks share the coordinate's
    slot.
    """
    g = p.grid_side
    if not (0 <= x < g and 0 <= y < g):
        raise ValueError(f"grid point ({x}, {y}) out of range [0, {g})^2")
    if not 0 <= i < p.b:
        raise ValueError(f"block index {i} out of range [0, {p.b})")
    return (y * g + x) * p.b + i


@dataclass
class Structure:
    """The built data structure: parameters plus the three bit tables."""

    params: Params
    table_a: BitTable
    table_b: BitTable
    table_c: BitTable

    @classmethod
    def empty(cls, p: Params) -> "Structure":
        """All-zero structure, the encoding of the empty set."""
        return cls(p, BitTable(size_a(p)), BitTable(size_b(p)), BitTable(size_c(p)))

    def total_bits(self) -> int:
        return self.table_a.nbits + self.table_b.nbits + self.table_c.nbits

    def copy(self) -> "Structure":
        return Structure(
            self.params, self.table_a.copy(), self.table_b.copy(), self.table_c.copy()
        )


def serialize(st: Structure) -> bytes:
    """Encode st in the canonical byte format; deterministic per structure."""
    out = bytearray(MAGIC)
    out.append(FORMAT_VERSION)
    out += st.params.b.to_bytes(8, "little")
    for table in (st.table_a, st.table_b, st.table_c):
        out += table.nbits.to_bytes(8, "little")
        out += table.data
    return bytes(out)


def _take(blob: bytes, pos: int, count: int, what: str) -> tuple[bytes, int]:
    if pos + count > len(blob):
        raise LengthMismatchError(
            f"truncated stream: need {count} bytes for {what} at offset {pos}, "
            f"have {len(blob) - pos}"
        )
    return blob[pos : pos + count], pos + count


def deserialize(blob: bytes) -> Structure:
    """Decode the canonical byte format, validating every length exactly."""
    magic, pos = _take(blob, 0, 4, "magic")
    if magic != MAGIC:
        raise BadMagicError(f"bad magic {magic!r}, expected {MAGIC!r}")
    version, pos = _take(blob, pos, 1, "version")
    if version[0] != FORMAT_VERSION:
        raise UnsupportedVersionError(
            f"unsupported format version {version[0]}, expected {FORMAT_VERSION}"
        )
    raw_b, pos = _take(blob, pos, 8, "parameter b")
    b = int.from_bytes(raw_b, "little")
    if b < 2:
        raise ParseError(f"parameter b must be >= 2, got {b}")
    p = Params(b)
    tables = []
    for name, expect in (("A", size_a(p)), ("B", size_b(p)), ("C", size_c(p))):
        raw_len, pos = _take(blob, pos, 8, f"table {name} bit length")
        nbits = int.from_bytes(raw_len, "little")
        if nbits != expect:
            raise LengthMismatchError(
                f"table {name} declares {nbits} bits, expected {expect} for b={b}"
            )
        payload, pos = _take(blob, pos, (nbits + 7) // 8, f"table {name} payload")
        if nbits % 8 and payload[-1] >> (nbits % 8):
            raise LengthMismatchError(
                f"table {name} has nonzero padding bits beyond bit {nbits}"
            )
        tables.append(BitTable(nbits, bytearray(payload)))
    if pos != len(blob):
        raise TrailingDataError(f"{len(blob) - pos} trailing bytes after table C")
    return Structure(p, tables[0], tables[1], tables[2])
