"""Storage and query schemes for subsets of size at most four.

Storing a subset means routing every block either to table B (its line's
slot) or to table C (its coordinate's slot) and recording the routing in
table A.  A routing of the non-empty blocks is valid when

  1. every non-empty block goes to exactly one of B and C,
  2. no two B-routed blocks share a line (their line slots would collide),
  3. no two C-routed blocks share grid coordinates (their coordinate slots
     would collide),
  4. no empty block is blocked out of both tables: an empty block sharing a
     line with a B-routed block cannot use B, and one sharing coordinates
     with a C-routed block cannot use C, so it must have the other table
     free.

With at most four non-empty blocks a valid routing always exists (the case
analysis behind `classify` is the existence argument); `assign_blocks` finds
the first one in a fixed candidate order, so builds are deterministic.
Empty blocks default to table B and are re-routed to C only when rule 4's
line conflict forces them out.

A query for (s, x, y, i) reads the block's A bit, then either B(line, i) or
C(x, y, i); the second bit read is the answer.  Every query reads exactly
two bits, the first always from table A.
"""

from __future__ import annotations

from enum import Enum
from typing import Iterable, Mapping, NamedTuple

from .geometry import (
    BlockAddr,
    ElementAddr,
    Params,
    line_of,
    points_on_line,
    validate_element,
)
from .tables import Structure, a_index, b_index, c_index, line_offsets

MAX_MEMBERS = 4

# A probe trace is a pair of (table name, bit position, bit value) triples;
# the first entry is always ("A", pos, bit).
ProbeRecord = tuple[str, int, int]
ProbeTrace = tuple[ProbeRecord, ProbeRecord]


class CapacityError(ValueError):
    """Raised when a subset has more than MAX_MEMBERS distinct elements."""


class AssignmentError(RuntimeError):
    """No valid block routing exists; unreachable for <= 4 blocks."""


class Assignment(NamedTuple):
    """A routing of the non-empty blocks: which table stores each."""

    placed_b: frozenset[BlockAddr]
    placed_c: frozenset[BlockAddr]


class CaseLabel(Enum):
    """Diagnostic label for a four-block configuration.

    Labels follow the number of distinct lines through the non-empty blocks
    (4, 1, 2, 3 for I, II, III, IV) and, within a line count, the pattern of
    coinciding grid coordinates.
    """

    I = "I"
    II = "II"
    IIIA = "IIIA"
    IIIB = "IIIB"
    IVA = "IVA"
    IVB = "IVB"
    IVC_i = "IVC_i"
    IVC_ii = "IVC_ii"
    IVD = "IVD"
    FEWER_THAN_4_BLOCKS = "FEWER_THAN_4_BLOCKS"


class BlockedStatus(NamedTuple):
    b_blocked: bool
    c_blocked: bool


def group_members(p: Params, members: Iterable[ElementAddr]) -> dict[BlockAddr, set[int]]:
    """Group members by block, deduplicating elements.

    Raises CapacityError when more than MAX_MEMBERS distinct elements remain
    after deduplication.
    """
    grouped: dict[BlockAddr, set[int]] = {}
    total = 0
    seen: set[ElementAddr] = set()
    for e in members:
        validate_element(p, e)
        if e in seen:
            continue
        seen.add(e)
        total += 1
        if total > MAX_MEMBERS:
            raise CapacityError(
                f"subset has more than {MAX_MEMBERS} distinct elements"
            )
        grouped.setdefault(e.block, set()).add(e.i)
    return grouped


def blocked_status(p: Params, blk: BlockAddr, asg: Assignment) -> BlockedStatus:
    """Whether an empty block is shut out of table B and/or table C.

    B-blocked: some B-routed block lies on blk's line, so blk's line slot is
    taken.  C-blocked: some C-routed block has blk's coordinates, so blk's
    coordinate slot is taken.
    """
    line = line_of(blk)
    b_blocked = any(line_of(other) == line for other in asg.placed_b)
    c_blocked = any(
        other.x == blk.x and other.y == blk.y for other in asg.placed_c
    )
    return BlockedStatus(b_blocked, c_blocked)


def _routing_valid(
    p: Params,
    non_empty: frozenset[BlockAddr],
    to_b: list[BlockAddr],
    to_c: list[BlockAddr],
) -> bool:
    """Check rules 2 to 4 for a candidate routing (rule 1 holds by shape)."""
    lines_b = [(blk.s, blk.x - blk.s * blk.y) for blk in to_b]
    if len(set(lines_b)) != len(lines_b):
        return False
    coords_c = [(blk.x, blk.y) for blk in to_c]
    if len(set(coords_c)) != len(coords_c):
        return False
    # Rule 4: a doubly blocked empty block would sit at a C-routed block's
    # coordinates, inside a B-routed block's superblock, on that block's
    # line.  Enumerate those (few) candidates instead of all empty blocks.
    for s, anchor in lines_b:
        for x, y in coords_c:
            if x - s * y == anchor and BlockAddr(s, x, y) not in non_empty:
                return False
    return True


def assign_blocks(p: Params, non_empty: Iterable[BlockAddr]) -> Assignment:
    """Route each non-empty block to table B or C, deterministically.

    Blocks are sorted by (s, x, y); candidate bitmasks k = 0, 1, 2, ... are
    tried in order, bit j of k sending block j to table C.  The first valid
    routing wins, so equal block sets always produce equal assignments
    regardless of member counts inside the blocks.
    """
    blocks = sorted(non_empty)
    n = len(blocks)
    if len(set(blocks)) != n:
        raise ValueError("non-empty blocks must be distinct")
    if n > MAX_MEMBERS:
        raise CapacityError(f"more than {MAX_MEMBERS} non-empty blocks")
    block_set = frozenset(blocks)
    for k in range(1 << n):
        to_b = [blocks[j] for j in range(n) if not k >> j & 1]
        to_c = [blocks[j] for j in range(n) if k >> j & 1]
        if _routing_valid(p, block_set, to_b, to_c):
            return Assignment(frozenset(to_b), frozenset(to_c))
    raise AssignmentError(
        f"no valid routing for blocks {blocks}; this contradicts the scheme's "
        f"correctness guarantee for at most {MAX_MEMBERS} blocks"
    )


def _fill_tables(
    p: Params, grouped: Mapping[BlockAddr, set[int]], asg: Assignment
) -> Structure:
    """Set every bit implied by a routing of the grouped members."""
    st = Structure.empty(p)
    a = st.table_a
    # Empty blocks default to A=0 (table B); blocks on a B-routed block's
    # line are B-blocked and flip to A=1 (table C).  The sweep also marks
    # the B-routed block itself; its own bit is corrected below.
    for blk in asg.placed_b:
        line = line_of(blk)
        s = blk.s
        for x, y in points_on_line(p, line):
            a[a_index(p, BlockAddr(s, x, y))] = 1
    for blk in asg.placed_b:
        a[a_index(p, blk)] = 0
        line = line_of(blk)
        for i in grouped[blk]:
            st.table_b[b_index(p, line, i)] = 1
    for blk in asg.placed_c:
        a[a_index(p, blk)] = 1
        for i in grouped[blk]:
            st.table_c[c_index(p, blk.x, blk.y, i)] = 1
    return st


def build(p: Params, members: Iterable[ElementAddr]) -> Structure:
    """Build the structure storing the given subset (at most 4 elements).

    Pure in (p, set of members): equal subsets give bit-identical tables.
    """
    grouped = group_members(p, members)
    asg = assign_blocks(p, grouped.keys())
    return _fill_tables(p, grouped, asg)


def build_from_ordinals(p: Params, ordinals: Iterable[int]) -> Structure:
    """Build from flat element ordinals instead of addresses."""
    from .geometry import element_from_ordinal

    return build(p, [element_from_ordinal(p, n) for n in ordinals])


def query(st: Structure, e: ElementAddr) -> tuple[bool, ProbeTrace]:
    """Answer membership for e with exactly two bit probes.

    Returns the answer and the trace of both probes; the first probe is
    always in table A, the second in B (A bit 0) or C (A bit 1).
    """
    p = st.params
    b = p.b
    g = b * b
    (s, x, y), i = e
    if not (1 <= s <= b and 0 <= x < g and 0 <= y < g and 0 <= i < b):
        validate_element(p, e)  # raises with the precise bound
    a_pos = (s - 1) * g * g + y * g + x
    a_bit = st.table_a.data[a_pos >> 3] >> (a_pos & 7) & 1
    if a_bit:
        pos = (y * g + x) * b + i
        bit = st.table_c.data[pos >> 3] >> (pos & 7) & 1
        return bool(bit), (("A", a_pos, 1), ("C", pos, bit))
    pos = line_offsets(b)[s - 1] + (x - s * y + s * (g - 1)) * b + i
    bit = st.table_b.data[pos >> 3] >> (pos & 7) & 1
    return bool(bit), (("A", a_pos, 0), ("B", pos, bit))


def classify(p: Params, non_empty: Iterable[BlockAddr]) -> CaseLabel:
    """Diagnostic case label of a non-empty block configuration.

    A function of the blocks' lines and coordinates only; configurations
    with fewer than four blocks all share one label.
    """
    blocks = sorted(non_empty)
    if len(set(blocks)) != len(blocks):
        raise ValueError("non-empty blocks must be distinct")
    if len(blocks) > MAX_MEMBERS:
        raise CapacityError(f"more than {MAX_MEMBERS} non-empty blocks")
    if len(blocks) < 4:
        return CaseLabel.FEWER_THAN_4_BLOCKS

    lines = [line_of(blk) for blk in blocks]
    line_count: dict[tuple[int, int], int] = {}
    for ln in lines:
        line_count[ln] = line_count.get(ln, 0) + 1
    distinct = len(line_count)
    if distinct == 4:
        return CaseLabel.I
    if distinct == 1:
        return CaseLabel.II
    if distinct == 2:
        split = sorted(line_count.values())
        return CaseLabel.IIIA if split == [1, 3] else CaseLabel.IIIB

    # Three distinct lines: one line holds two blocks, the others one each.
    coord_count: dict[tuple[int, int], int] = {}
    for blk in blocks:
        xy = (blk.x, blk.y)
        coord_count[xy] = coord_count.get(xy, 0) + 1
    mults = sorted(coord_count.values(), reverse=True)
    if mults[0] == 3:
        return CaseLabel.IVA
    if mults[:2] == [2, 2]:
        return CaseLabel.IVB
    if mults[0] == 2:
        double_line = next(ln for ln, c in line_count.items() if c == 2)
        pair_xy = next(xy for xy, c in coord_count.items() if c == 2)
        # Singleton-line blocks outside the coincident pair decide the
        # subcase: all on the doubly occupied line's geometry -> IVC_i.
        ds, da = double_line
        for blk in blocks:
            if line_count[line_of(blk)] == 1 and (blk.x, blk.y) != pair_xy:
                if blk.x - ds * blk.y != da:
                    return CaseLabel.IVC_ii
        return CaseLabel.IVC_i
    return CaseLabel.IVD
