"""Simple loops, the balanced condition, solvable and compatible hyperedges.

A *simple loop* of a rectangle is a closed alternating row/column path of
support cells

    (a_0,b_0), (a_0,b_1), (a_1,b_1), (a_1,b_2), ..., (a_{m-1},b_{m-1}), (a_{m-1},b_0)

with pairwise distinct rows and pairwise distinct columns.  Walking the loop,
the cells (a_i, b_i) are *incremental* and the cells (a_i, b_{i+1}) are
*decremental*; the loop is balanced when for every value v the two cell sets
hit v equally often.  A rectangle is solvable when all of its simple loops
are balanced (trivially so when it has at most one row or column), and a
subset e of X is a solvable hyperedge when e x Y is solvable.  Balance is
orientation-dependent only up to swapping the incremental and decremental
roles, which leaves the balanced condition untouched, so loops are stored as
one canonical representative per rotation/reflection class: the
lexicographically smallest cell first, the smaller of its two neighbours
second.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .model import BudgetError, FunctionTable, Hypergraph, InstanceError
from .typecalc import ListOfTypes, consistent_lists

__all__ = [
    "SimpleLoop",
    "BalanceProfile",
    "enumerate_simple_loops",
    "iter_simple_loops",
    "balance_profile",
    "is_solvable",
    "maximal_solvable_hyperedges",
    "compatible_hyperedge",
    "verify_compatible_membership",
    "verify_compatible_solvable",
]

# guard on |A| * |B| for loop enumeration
LOOP_GRID_BUDGET = 36
# guard on |X| for the maximal-hyperedge lattice walk
MAX_VERTICES = 20


@dataclass(frozen=True)
class SimpleLoop:
    """Canonical representative of a simple loop (see module docstring)."""

    cells: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        cells = self.cells
        if len(cells) < 4 or len(cells) % 2 != 0:
            raise InstanceError("a simple loop has 2m >= 4 cells")
        m = len(cells) // 2
        rows = {a for a, _ in cells}
        cols = {b for _, b in cells}
        if len(rows) != m or len(cols) != m:
            raise InstanceError("a simple loop visits m distinct rows and columns")
        share_row_first = cells[0][0] == cells[1][0]
        for k in range(len(cells)):
            c, d = cells[k], cells[(k + 1) % len(cells)]
            share_row = c[0] == d[0]
            share_col = c[1] == d[1]
            if share_row == share_col:
                raise InstanceError("consecutive loop cells must share exactly one coordinate")
            if share_row != (share_row_first == (k % 2 == 0)):
                raise InstanceError("loop cells must alternate row and column moves")

    @classmethod
    def from_cycle(cls, cells: Sequence[tuple[int, int]]) -> "SimpleLoop":
        """Canonicalise a cyclic alternating cell sequence."""
        length = len(cells)
        p = min(range(length), key=lambda k: cells[k])
        fwd = tuple(cells[(p + k) % length] for k in range(length))
        bwd = tuple(cells[(p - k) % length] for k in range(length))
        return cls(fwd if fwd[1] <= bwd[1] else bwd)

    @property
    def m(self) -> int:
        return len(self.cells) // 2

    @property
    def cell_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.cells)

    def _row_first_order(self) -> tuple[tuple[int, int], ...]:
        # reading direction with a row move first: then even cells are the
        # incremental positions (a_i, b_i), odd ones the decremental
        if self.cells[0][0] == self.cells[1][0]:
            return self.cells
        return (self.cells[0],) + tuple(reversed(self.cells[1:]))

    @property
    def incremental_cells(self) -> tuple[tuple[int, int], ...]:
        return self._row_first_order()[0::2]

    @property
    def decremental_cells(self) -> tuple[tuple[int, int], ...]:
        return self._row_first_order()[1::2]


@dataclass(frozen=True)
class BalanceProfile:
    """Per-value hit counts of the incremental and decremental cells."""

    plus_counts: tuple[int, ...]
    minus_counts: tuple[int, ...]

    def __post_init__(self) -> None:
        if sum(self.plus_counts) != sum(self.minus_counts):
            raise InstanceError("profile sides must both have m entries")

    @property
    def balanced(self) -> bool:
        return self.plus_counts == self.minus_counts

    @property
    def unbalanced_values(self) -> tuple[int, ...]:
        return tuple(
            v for v, (p, q) in enumerate(zip(self.plus_counts, self.minus_counts)) if p != q
        )


def _resolve_rect(
    table: FunctionTable, rows: Iterable[int] | None, cols: Iterable[int] | None
) -> tuple[list[int], list[int]]:
    a = sorted(set(rows)) if rows is not None else list(range(table.x_size))
    b = sorted(set(cols)) if cols is not None else list(range(table.y_size))
    if any(not 0 <= x < table.x_size for x in a):
        raise InstanceError("row subset leaves the X alphabet")
    if any(not 0 <= y < table.y_size for y in b):
        raise InstanceError("column subset leaves the Y alphabet")
    return a, b


def iter_simple_loops(
    table: FunctionTable,
    rows: Iterable[int] | None = None,
    cols: Iterable[int] | None = None,
) -> Iterator[SimpleLoop]:
    """Lazily yield one canonical representative per simple loop of the
    rectangle (rows x cols) within the support."""
    a_list, b_list = _resolve_rect(table, rows, cols)
    if len(a_list) * len(b_list) > LOOP_GRID_BUDGET:
        raise BudgetError(
            f"loop enumeration limited to {LOOP_GRID_BUDGET} cells, "
            f"got {len(a_list) * len(b_list)}"
        )
    cells = {(a, b) for a in a_list for b in b_list if table.defined(a, b)}
    cols_of_row = {a: [b for b in b_list if (a, b) in cells] for a in a_list}
    rows_of_col = {b: [a for a in a_list if (a, b) in cells] for b in b_list}
    seen: set[frozenset[tuple[int, int]]] = set()

    def walk(walk_rows: list[int], walk_cols: list[int]) -> Iterator[SimpleLoop]:
        a_last, b_first = walk_rows[-1], walk_cols[0]
        if len(walk_rows) >= 2 and (a_last, b_first) in cells:
            seq = []
            m = len(walk_rows)
            for i in range(m):
                seq.append((walk_rows[i], walk_cols[i]))
                seq.append((walk_rows[i], walk_cols[(i + 1) % m]))
            key = frozenset(seq)
            if key not in seen:
                seen.add(key)
                yield SimpleLoop.from_cycle(seq)
        for b in cols_of_row[a_last]:
            if b in walk_cols:
                continue
            for a in rows_of_col[b]:
                if a in walk_rows:
                    continue
                yield from walk(walk_rows + [a], walk_cols + [b])

    for a0 in a_list:
        for b0 in cols_of_row[a0]:
            yield from walk([a0], [b0])


def enumerate_simple_loops(
    table: FunctionTable,
    rows: Iterable[int] | None = None,
    cols: Iterable[int] | None = None,
) -> list[SimpleLoop]:
    """All simple loops of the rectangle, canonical and sorted."""
    return sorted(iter_simple_loops(table, rows, cols), key=lambda lp: lp.cells)


def balance_profile(loop: SimpleLoop, table: FunctionTable) -> BalanceProfile:
    """Count, per value, how often the loop's two cell roles hit it."""
    plus = [0] * table.v_size
    minus = [0] * table.v_size
    for a, b in loop.incremental_cells:
        plus[table.value(a, b)] += 1
    for a, b in loop.decremental_cells:
        minus[table.value(a, b)] += 1
    return BalanceProfile(tuple(plus), tuple(minus))


def is_solvable(
    table: FunctionTable,
    rows: Iterable[int] | None = None,
    cols: Iterable[int] | None = None,
) -> bool:
    """True iff every simple loop of the rectangle is balanced.

    Rectangles with at most one row or one column have no simple loop and
    are trivially solvable.
    """
    a_list, b_list = _resolve_rect(table, rows, cols)
    if len(a_list) <= 1 or len(b_list) <= 1:
        return True
    return all(
        balance_profile(loop, table).balanced
        for loop in iter_simple_loops(table, a_list, b_list)
    )


def maximal_solvable_hyperedges(table: FunctionTable) -> Hypergraph:
    """The family of containment-maximal e with e x Y solvable.

    Solvability is closed downward (a loop of a subset is a loop of the
    superset), so the walk descends the subset lattice from X, pruning
    subsets of already-accepted edges, and never expands below a solvable
    set.  Every symbol has a nonempty support row, hence every singleton is
    solvable and the family covers X.
    """
    if table.x_size > MAX_VERTICES:
        raise BudgetError(
            f"maximal-hyperedge search limited to {MAX_VERTICES} vertices, "
            f"got {table.x_size}"
        )
    maximal: list[frozenset[int]] = []
    frontier = {frozenset(range(table.x_size))}
    solvable_cache: dict[frozenset[int], bool] = {}

    def solvable(e: frozenset[int]) -> bool:
        if e not in solvable_cache:
            solvable_cache[e] = is_solvable(table, e, None)
        return solvable_cache[e]

    while frontier:
        next_frontier: set[frozenset[int]] = set()
        for e in sorted(frontier, key=lambda s: tuple(sorted(s))):
            if any(e <= kept for kept in maximal):
                continue
            if solvable(e):
                maximal.append(e)
            elif len(e) > 1:
                for x in sorted(e):
                    next_frontier.add(e - {x})
        frontier = next_frontier
    return Hypergraph.of(table.x_size, maximal)


# ---------------------------------------------------------------------------
# compatible hyperedges


def compatible_hyperedge(table: FunctionTable, lists: ListOfTypes) -> frozenset[int]:
    """Symbols whose substitution is consistent with the given list of types.

    a is compatible when for every pair of its support columns b1, b2 the
    count difference n Q_{b1}(v) - n Q_{b2}(v) equals the indicator
    difference of f(a, b1) and f(a, b2) hitting v, for every value v.  The
    result may be empty.
    """
    if len(lists.entries) != table.y_size:
        raise InstanceError("list of types must have one entry per decoder symbol")
    if any(t.size != table.v_size for t in lists.entries):
        raise InstanceError("list entries must be types over the codomain")
    compatible = []
    for a in range(table.x_size):
        sup = table.row_support(a)
        ok = True
        for p in range(len(sup)):
            for q in range(p + 1, len(sup)):
                b1, b2 = sup[p], sup[q]
                v1, v2 = table.value(a, b1), table.value(a, b2)
                c1, c2 = lists.entries[b1].counts, lists.entries[b2].counts
                for v in range(table.v_size):
                    if c1[v] - c2[v] != int(v1 == v) - int(v2 == v):
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                break
        if ok:
            compatible.append(a)
    return frozenset(compatible)


def verify_compatible_membership(table: FunctionTable, pair, i: int) -> bool:
    """Check that every list consistent with (x, y) at position i has a
    compatible hyperedge containing x_i (exhaustive over the free entries)."""
    xi = pair.x_seq[i - 1]
    for lists in consistent_lists(table, pair, i).iterate():
        if xi not in compatible_hyperedge(table, lists):
            return False
    return True


def verify_compatible_solvable(
    table: FunctionTable, lists: ListOfTypes, edges: Hypergraph | None = None
) -> bool:
    """Check that the compatible hyperedge is solvable and lies inside some
    maximal solvable hyperedge (the empty hyperedge passes vacuously)."""
    e = compatible_hyperedge(table, lists)
    if not is_solvable(table, e, None):
        return False
    family = edges if edges is not None else maximal_solvable_hyperedges(table)
    return any(e <= t for t in family.edges)
