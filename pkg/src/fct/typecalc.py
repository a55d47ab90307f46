"""Sequence-level machinery: symbol-wise evaluation, types, substitutions,
consistent list sets, representative reconstruction, and recovering the type
of function values from marginal types.

Everything here is exact integer/rational arithmetic.  Position indices in
public signatures are 1-based (reports quote positions the way people count
them); internal loops are 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import comb
from typing import Iterator, Mapping, Sequence

from .model import (
    BudgetError,
    FunctionTable,
    InstanceError,
    Partition,
    SequencePair,
    TypeVector,
)

__all__ = [
    "AmbiguityError",
    "InfeasibleError",
    "ListOfTypes",
    "JointType",
    "LoopMove",
    "ConsistentListSet",
    "eval_symbolwise",
    "type_of",
    "type_function",
    "modsum_function",
    "substitute",
    "consistent_lists",
    "reconstruct_representative",
    "iter_types",
    "count_types",
    "enumerate_joint_types",
    "type_from_marginals",
    "loop_cancellation_transport",
    "apply_loop_move",
    "decode_type_from_quantization",
]

# Guard rails for exhaustive enumeration (documented, fail loudly).
LIST_ENUM_BUDGET = 10**6
JOINT_MAX_N = 12
JOINT_MAX_CELLS = 36


class InfeasibleError(Exception):
    """No joint type matches the requested marginals."""


class AmbiguityError(Exception):
    """Two joint types share the marginals but induce different value types.

    Carries both witnesses; re-applying the marginal checks to them
    reproduces the violation constructively.
    """

    def __init__(
        self,
        joint_a: "JointType",
        joint_b: "JointType",
        type_a: TypeVector,
        type_b: TypeVector,
    ) -> None:
        super().__init__(
            "marginal types do not determine the value type: "
            f"{type_a.counts} vs {type_b.counts}"
        )
        self.joint_a = joint_a
        self.joint_b = joint_b
        self.type_a = type_a
        self.type_b = type_b


# ---------------------------------------------------------------------------
# basic sequence operations


def eval_symbolwise(table: FunctionTable, pair: SequencePair) -> tuple[int, ...]:
    """Componentwise application (f(x_1,y_1), ..., f(x_n,y_n))."""
    out = []
    for k, (x, y) in enumerate(zip(pair.x_seq, pair.y_seq)):
        if not (0 <= x < table.x_size and 0 <= y < table.y_size) or not table.defined(x, y):
            raise InstanceError(f"pair ({x},{y}) at position {k + 1} is outside the support")
        out.append(table.value(x, y))
    return tuple(out)


def type_of(seq: Sequence[int], size: int) -> TypeVector:
    """Empirical count vector of a nonempty sequence over {0..size-1}."""
    if len(seq) == 0:
        raise InstanceError("type of an empty sequence is undefined (n >= 1 required)")
    return TypeVector.from_sequence(seq, size)


def type_function(table: FunctionTable, pair: SequencePair) -> TypeVector:
    """Type of the symbol-wise function values."""
    return type_of(eval_symbolwise(table, pair), table.v_size)


def _require_modular_labels(table: FunctionTable) -> int:
    m = table.v_size
    if tuple(table.v_labels) != tuple(str(v) for v in range(m)):
        raise InstanceError("modulo-sum requires codomain labels 0..m-1")
    return m


def modsum_function(table: FunctionTable, pair: SequencePair) -> int:
    """Sum of the symbol-wise function values mod m = |V|."""
    if not table.full_support:
        raise InstanceError("modulo-sum family requires a fully defined table")
    m = _require_modular_labels(table)
    return sum(eval_symbolwise(table, pair)) % m


def substitute(seq: Sequence[int], i: int, a: int) -> tuple[int, ...]:
    """Copy of seq with the 1-based position i replaced by a."""
    if not 1 <= i <= len(seq):
        raise InstanceError(f"position {i} outside [1:{len(seq)}]")
    out = list(seq)
    out[i - 1] = a
    return tuple(out)


# ---------------------------------------------------------------------------
# type enumeration


def count_types(n: int, size: int) -> int:
    """Number of count vectors of length-n sequences over an alphabet of `size`."""
    return comb(n + size - 1, size - 1)


def iter_types(n: int, size: int) -> Iterator[TypeVector]:
    """All count vectors summing to n, in lexicographic order."""

    def rec(prefix: list[int], rem: int, slots: int) -> Iterator[tuple[int, ...]]:
        if slots == 1:
            yield tuple(prefix + [rem])
            return
        for c in range(rem + 1):
            yield from rec(prefix + [c], rem - c, slots - 1)

    for counts in rec([], n, size):
        yield TypeVector(n, counts)


# ---------------------------------------------------------------------------
# lists of types and the consistent set


@dataclass(frozen=True)
class ListOfTypes:
    """One type vector per decoder symbol b, all with the same blocklength."""

    entries: tuple[TypeVector, ...]

    def __post_init__(self) -> None:
        if not self.entries:
            raise InstanceError("list of types must be nonempty")
        n = self.entries[0].n
        if any(t.n != n for t in self.entries):
            raise InstanceError("all entries of a list of types must share n")

    @property
    def n(self) -> int:
        return self.entries[0].n


@dataclass(frozen=True)
class ConsistentListSet:
    """The set of lists consistent with (x, y) at position i.

    Entry b is pinned to the value type obtained by substituting b at
    position i when (x_i, b) lies in the support; entries at symbols b with
    (x_i, b) outside the support are free.
    """

    n: int
    v_size: int
    pinned: tuple[TypeVector | None, ...]

    @property
    def free_indices(self) -> tuple[int, ...]:
        return tuple(b for b, t in enumerate(self.pinned) if t is None)

    @property
    def pinned_indices(self) -> tuple[int, ...]:
        return tuple(b for b, t in enumerate(self.pinned) if t is not None)

    def contains(self, lists: ListOfTypes) -> bool:
        if len(lists.entries) != len(self.pinned) or lists.n != self.n:
            return False
        return all(
            t is None or lists.entries[b] == t for b, t in enumerate(self.pinned)
        )

    def size(self) -> int:
        return count_types(self.n, self.v_size) ** len(self.free_indices)

    def iterate(self, budget: int = LIST_ENUM_BUDGET) -> Iterator[ListOfTypes]:
        """All members, free entries ranging over every type vector."""
        if self.size() > budget:
            raise BudgetError(
                f"consistent list set has {self.size()} members, budget {budget}"
            )
        free = self.free_indices
        all_types = list(iter_types(self.n, self.v_size))

        def rec(filled: dict[int, TypeVector], idx: int) -> Iterator[ListOfTypes]:
            if idx == len(free):
                yield ListOfTypes(
                    tuple(
                        t if t is not None else filled[b]
                        for b, t in enumerate(self.pinned)
                    )
                )
                return
            for t in all_types:
                filled[free[idx]] = t
                yield from rec(filled, idx + 1)

        yield from rec({}, 0)


def consistent_lists(table: FunctionTable, pair: SequencePair, i: int) -> ConsistentListSet:
    """Pinned/free structure of the lists consistent with (x, y) at position i."""
    if not pair.within_support(table):
        raise InstanceError("sequence pair leaves the support")
    if not 1 <= i <= pair.n:
        raise InstanceError(f"position {i} outside [1:{pair.n}]")
    xi = pair.x_seq[i - 1]
    pinned: list[TypeVector | None] = []
    for b in range(table.y_size):
        if table.defined(xi, b):
            sub = SequencePair(pair.x_seq, substitute(pair.y_seq, i, b))
            pinned.append(type_function(table, sub))
        else:
            pinned.append(None)
    return ConsistentListSet(pair.n, table.v_size, tuple(pinned))


# ---------------------------------------------------------------------------
# representative reconstruction


def reconstruct_representative(
    partition: Partition, block_seq: Sequence[int], marg: TypeVector
) -> tuple[int, ...]:
    """Build a sequence with the given block sequence and marginal type.

    Positions of each block are filled with the block's symbols in
    increasing symbol order, earlier positions getting smaller symbols.  The
    result is a permutation of any sequence realising (block_seq, marg).
    """
    if marg.size != partition.x_size:
        raise InstanceError("marginal type does not match the partition alphabet")
    if len(block_seq) != marg.n:
        raise InstanceError("block sequence length does not match the marginal type")
    out: list[int | None] = [None] * marg.n
    for b, members in enumerate(partition.blocks):
        positions = [k for k, blk in enumerate(block_seq) if blk == b]
        needed = sum(marg.counts[a] for a in members)
        if needed != len(positions):
            raise InstanceError(
                f"block {b} occupies {len(positions)} positions but the marginal "
                f"type provides {needed} symbols"
            )
        fill: list[int] = []
        for a in members:
            fill.extend([a] * marg.counts[a])
        for pos, a in zip(positions, fill):
            out[pos] = a
    if any(v is None for v in out):
        raise InstanceError("block sequence uses an unknown block id")
    return tuple(out)  # type: ignore[arg-type]


# ---------------------------------------------------------------------------
# joint types


@dataclass(frozen=True)
class JointType:
    """Integer count grid over X x Y with total n."""

    n: int
    counts: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if not self.counts or not self.counts[0]:
            raise InstanceError("joint type grid must be nonempty")
        width = len(self.counts[0])
        total = 0
        for x, row in enumerate(self.counts):
            if len(row) != width:
                raise InstanceError(f"joint type row {x} has inconsistent length")
            for c in row:
                if isinstance(c, bool) or not isinstance(c, int) or c < 0:
                    raise InstanceError("joint counts must be nonnegative integers")
                total += c
        if total != self.n:
            raise InstanceError(f"joint counts sum to {total}, expected n={self.n}")

    @property
    def x_size(self) -> int:
        return len(self.counts)

    @property
    def y_size(self) -> int:
        return len(self.counts[0])

    @cached_property
    def support(self) -> frozenset[tuple[int, int]]:
        return frozenset(
            (x, y)
            for x, row in enumerate(self.counts)
            for y, c in enumerate(row)
            if c > 0
        )

    def marginal_x(self) -> TypeVector:
        return TypeVector(self.n, tuple(sum(row) for row in self.counts))

    def marginal_y(self) -> TypeVector:
        return TypeVector(
            self.n,
            tuple(sum(row[y] for row in self.counts) for y in range(self.y_size)),
        )

    def value_type(self, table: FunctionTable) -> TypeVector:
        """Type of the function values induced by this joint type."""
        counts = [0] * table.v_size
        for x, y in self.support:
            if not table.defined(x, y):
                raise InstanceError(f"joint type places mass outside the support at ({x},{y})")
            counts[table.value(x, y)] += self.counts[x][y]
        return TypeVector(self.n, tuple(counts))


def _check_joint_budget(n: int, num_cells: int) -> None:
    if n > JOINT_MAX_N:
        raise BudgetError(f"joint-type enumeration limited to n <= {JOINT_MAX_N}, got {n}")
    if num_cells > JOINT_MAX_CELLS:
        raise BudgetError(
            f"joint-type enumeration limited to {JOINT_MAX_CELLS} cells, got {num_cells}"
        )


def enumerate_joint_types(
    table: FunctionTable, rows: Sequence[int], cols: Sequence[int], n: int
) -> Iterator[JointType]:
    """All joint types of total n supported on (rows x cols) within the support."""
    rows = sorted(set(rows))
    cols = sorted(set(cols))
    _check_joint_budget(n, len(rows) * len(cols))
    cells = [(a, b) for a in rows for b in cols if table.defined(a, b)]
    grid_shape = (table.x_size, table.y_size)

    def rec(idx: int, rem: int, acc: list[tuple[int, int, int]]) -> Iterator[JointType]:
        if idx == len(cells):
            if rem == 0:
                grid = [[0] * grid_shape[1] for _ in range(grid_shape[0])]
                for a, b, c in acc:
                    grid[a][b] = c
                yield JointType(n, tuple(tuple(r) for r in grid))
            return
        a, b = cells[idx]
        for c in range(rem + 1):
            yield from rec(idx + 1, rem - c, acc + [(a, b, c)])

    yield from rec(0, n, [])


def type_from_marginals(
    table: FunctionTable,
    rows: Sequence[int],
    cols: Sequence[int],
    px: TypeVector,
    py: TypeVector,
) -> TypeVector:
    """Value type determined by the marginal types, if it is determined.

    Enumerates, by depth-first search with remaining-marginal pruning, every
    joint type supported on (rows x cols) within the support whose marginals
    are px and py.  Returns the common induced value type; raises
    InfeasibleError when no joint type fits and AmbiguityError (carrying two
    witnesses) when different joint types induce different value types.
    """
    rows = sorted(set(rows))
    cols = sorted(set(cols))
    if px.n != py.n:
        raise InstanceError("marginal types must share the blocklength")
    n = px.n
    if px.size != table.x_size or py.size != table.y_size:
        raise InstanceError("marginal types must be dense over the full alphabets")
    if any(px.counts[a] > 0 and a not in rows for a in range(px.size)):
        raise InstanceError("x-marginal has mass outside the requested rows")
    if any(py.counts[b] > 0 and b not in cols for b in range(py.size)):
        raise InstanceError("y-marginal has mass outside the requested columns")
    _check_joint_budget(n, len(rows) * len(cols))

    col_rem = list(py.counts)
    found: list[tuple[JointType, TypeVector]] = []

    def rec(r_idx: int, c_idx: int, row_rem: int, acc: list[list[int]]) -> None:
        if found and len(found) == 2:
            return
        if r_idx == len(rows):
            if all(c == 0 for c in col_rem):
                grid = [[0] * table.y_size for _ in range(table.x_size)]
                for i, a in enumerate(rows):
                    for j, b in enumerate(cols):
                        grid[a][b] = acc[i][j]
                joint = JointType(n, tuple(tuple(r) for r in grid))
                vt = joint.value_type(table)
                if not found:
                    found.append((joint, vt))
                elif found[0][1] != vt:
                    found.append((joint, vt))
            return
        a = rows[r_idx]
        if c_idx == len(cols):
            if row_rem == 0:
                rec(r_idx + 1, 0, px.counts[rows[r_idx + 1]] if r_idx + 1 < len(rows) else 0, acc)
            return
        b = cols[c_idx]
        if not table.defined(a, b):
            acc[r_idx].append(0)
            rec(r_idx, c_idx + 1, row_rem, acc)
            acc[r_idx].pop()
            return
        for c in range(min(row_rem, col_rem[b]) + 1):
            acc[r_idx].append(c)
            col_rem[b] -= c
            rec(r_idx, c_idx + 1, row_rem - c, acc)
            col_rem[b] += c
            acc[r_idx].pop()

    acc: list[list[int]] = [[] for _ in rows]
    rec(0, 0, px.counts[rows[0]] if rows else 0, acc)

    if not found:
        raise InfeasibleError(
            f"no joint type on {rows} x {cols} matches the given marginals"
        )
    if len(found) == 2:
        raise AmbiguityError(found[0][0], found[1][0], found[0][1], found[1][1])
    return found[0][1]


# ---------------------------------------------------------------------------
# loop-cancellation transport between joint types


@dataclass(frozen=True)
class LoopMove:
    """One +-1/n adjustment along a simple loop of the support.

    ``cells`` is the loop in alternating order (a_0,b_0), (a_0,b_1),
    (a_1,b_1), ..., (a_{m-1},b_0); even positions are decremented on the
    transported grid and odd positions incremented.
    """

    cells: tuple[tuple[int, int], ...]

    @property
    def decrement_cells(self) -> tuple[tuple[int, int], ...]:
        return self.cells[0::2]

    @property
    def increment_cells(self) -> tuple[tuple[int, int], ...]:
        return self.cells[1::2]


def apply_loop_move(joint: JointType, move: LoopMove) -> JointType:
    grid = [list(row) for row in joint.counts]
    for a, b in move.decrement_cells:
        grid[a][b] -= 1
        if grid[a][b] < 0:
            raise InstanceError("loop move would drive a count negative")
    for a, b in move.increment_cells:
        grid[a][b] += 1
    return JointType(joint.n, tuple(tuple(r) for r in grid))


def loop_cancellation_transport(
    table: FunctionTable, p1: JointType, p2: JointType
) -> list[LoopMove]:
    """Finite sequence of simple-loop moves transforming p1 into p2.

    Both joint types must share n, marginals, and a support inside the
    table's support.  Each returned move is a simple loop whose even cells
    carry a surplus (+delta) and odd cells a deficit; applying the moves in
    order to p1 reaches p2 exactly, and the total absolute difference
    strictly decreases with every move.

    The loop search walks surplus/deficit cells first-eligible in row-major
    order, preferring fresh rows/columns and closing at the first repeated
    row or column (whichever endpoint the walk returns to).
    """
    if p1.n != p2.n:
        raise InstanceError("joint types must share the blocklength")
    if p1.marginal_x() != p2.marginal_x() or p1.marginal_y() != p2.marginal_y():
        raise InstanceError("joint types must share both marginal types")
    for jt in (p1, p2):
        for x, y in jt.support:
            if not table.defined(x, y):
                raise InstanceError(f"joint type has mass outside the support at ({x},{y})")

    nx, ny = p1.x_size, p1.y_size
    delta = [
        [p1.counts[x][y] - p2.counts[x][y] for y in range(ny)] for x in range(nx)
    ]
    moves: list[LoopMove] = []

    def first_positive() -> tuple[int, int] | None:
        for x in range(nx):
            for y in range(ny):
                if delta[x][y] > 0:
                    return (x, y)
        return None

    while (start := first_positive()) is not None:
        a0, b0 = start
        rows = [a0]
        cols = [b0]
        loop: tuple[tuple[int, int], ...] | None = None
        while loop is None:
            a_last = rows[-1]
            # pick the next column: deficit in the current row, fresh first,
            # then the starting column, then any other repeat
            fresh = [b for b in range(ny) if delta[a_last][b] < 0 and b not in cols]
            if fresh:
                b_next = fresh[0]
            else:
                repeats = [b for b in cols if delta[a_last][b] < 0]
                if not repeats:
                    raise AssertionError("zero row sums guarantee a deficit cell")
                b_next = b0 if delta[a_last][b0] < 0 else repeats[0]
                j = cols.index(b_next)
                loop = _assemble_loop(rows[j:], cols[j:])
                break
            cols.append(b_next)
            # pick the next row: surplus in the current column
            fresh_rows = [a for a in range(nx) if delta[a][b_next] > 0 and a not in rows]
            if fresh_rows:
                rows.append(fresh_rows[0])
                continue
            repeats = [a for a in rows if delta[a][b_next] > 0]
            if not repeats:
                raise AssertionError("zero column sums guarantee a surplus cell")
            a_back = a0 if delta[a0][b_next] > 0 else repeats[0]
            j = rows.index(a_back)
            # the closing surplus cell is (a_back, b_next); rotate so it
            # leads (cols[j+1:] already ends with b_next)
            loop = _assemble_loop([a_back] + rows[j + 1 :], cols[j + 1 :], rotate=True)
        for a, b in loop[0::2]:
            delta[a][b] -= 1
        for a, b in loop[1::2]:
            delta[a][b] += 1
        moves.append(LoopMove(loop))
    return moves


def _assemble_loop(
    rows: list[int], cols: list[int], rotate: bool = False
) -> tuple[tuple[int, int], ...]:
    """Interleave row/column picks into the alternating cell order.

    With ``rotate`` the walk closed at a repeated row: rows[0] is the closing
    row and cols[-1] the closing column, so the standard orientation starts
    at (rows[0], cols[-1]) and the remaining columns shift by one.
    """
    m = len(rows)
    if rotate:
        cols = [cols[-1]] + cols[:-1]
    cells = []
    for i in range(m):
        cells.append((rows[i], cols[i]))
        cells.append((rows[i], cols[(i + 1) % m]))
    return tuple(cells)


# ---------------------------------------------------------------------------
# quantize-and-reconstruct decoding


def decode_type_from_quantization(
    table: FunctionTable,
    edges: Sequence[frozenset[int]],
    qw: TypeVector,
    qx_given_w: Mapping[int, TypeVector],
    qy_given_w: Mapping[int, TypeVector],
) -> TypeVector:
    """Value type reconstructed from a quantised edge sequence plus
    per-edge conditional marginal types.

    For every edge w with positive weight the value type is recovered from
    the conditional marginals via :func:`type_from_marginals` (which demands
    that the marginals determine it; a non-solvable edge surfaces as an
    AmbiguityError) and the per-edge results are mixed by the edge weights.
    """
    if qw.size != len(edges):
        raise InstanceError("edge-type vector does not match the edge family")
    counts = [0] * table.v_size
    for w, n_w in enumerate(qw.counts):
        if n_w == 0:
            continue
        if w not in qx_given_w or w not in qy_given_w:
            raise InstanceError(f"missing conditional types for edge index {w}")
        qx = qx_given_w[w]
        qy = qy_given_w[w]
        if qx.n != n_w or qy.n != n_w:
            raise InstanceError(
                f"conditional types for edge index {w} must have blocklength {n_w}"
            )
        edge = sorted(edges[w])
        if any(qx.counts[a] > 0 and a not in edge for a in range(qx.size)):
            raise InstanceError(
                f"conditional x-type for edge index {w} leaves the edge"
            )
        vt = type_from_marginals(table, edge, range(table.y_size), qx, qy)
        for v, c in enumerate(vt.counts):
            counts[v] += c
    return TypeVector(qw.n, tuple(counts))
