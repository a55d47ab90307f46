"""Partitions induced by function families and informativeness checking.

A *family* is one of the built-in sequence functions derived from a single
table f : X x Y -> V:

* ``symbolwise`` - componentwise application,
* ``type``       - the empirical type of the componentwise values,
* ``modsum``     - their sum mod m = |V|,
* ``ring_xor``   - the fixed binary demo family on |X| = |Y| = 2 whose i-th
  output says whether x_i + y_i and x_{i+1} + y_{i+1} agree mod 2
  (cyclically); it admits no informative partition and exists to exercise
  the failure modes.

For the first three modes the family comes with an induced partition of X:
group symbols whose rows agree, either of f itself, of the row-constancy
collapse used by the type family, or of the cyclic row differences used by
the modulo-sum family.

Informativeness of a family w.r.t. a partition is checked exhaustively at a
given blocklength n:

* Condition 1: the list of values obtained by substituting each decoder
  symbol at one position determines the block of the source symbol at that
  position, uniformly over all sequences.  The witness map (list -> block)
  is materialised during the scan.
* Condition 2: the value is unchanged under block-preserving permutations
  of the source sequence.  It suffices to check transpositions of two
  positions holding same-block symbols: those transpositions generate every
  block-preserving permutation, and the per-step equalities telescope
  because the scan covers every sequence.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterator

from .model import BudgetError, FunctionTable, InstanceError, Partition, TypeVector
from .typecalc import type_of

__all__ = [
    "FunctionFamily",
    "ConditionCheck",
    "Condition1Witness",
    "Condition2Witness",
    "InformativenessReport",
    "induced_partition_symbolwise",
    "hat_type_function",
    "hat_modsum_function",
    "induced_partition",
    "check_informative",
    "finest_condition1_partition",
    "family_value",
    "replay_condition1_witness",
    "replay_condition2_witness",
]

MODES = ("symbolwise", "type", "modsum", "ring_xor")

# guard on |X|^n * |Y|^n for the exhaustive scans
INFORMATIVE_BUDGET = 10**7

_RESTRICTED_MSG = (
    "function table has restricted support; induced partitions require a fully "
    "defined table - use the solvable-hyperedge rate pipeline for restricted "
    "supports"
)


@dataclass(frozen=True)
class FunctionFamily:
    """A built-in sequence-function family derived from a base table."""

    mode: str
    base: FunctionTable | None = None

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise InstanceError(f"unknown family mode {self.mode!r}")
        if self.mode == "ring_xor":
            return  # fixed binary alphabets; base is ignored
        if self.base is None:
            raise InstanceError(f"mode {self.mode!r} requires a base table")
        if not self.base.full_support:
            raise InstanceError(_RESTRICTED_MSG)
        if self.mode == "modsum":
            m = self.base.v_size
            if tuple(self.base.v_labels) != tuple(str(v) for v in range(m)):
                raise InstanceError("modsum mode requires codomain labels 0..m-1")

    @property
    def x_size(self) -> int:
        return 2 if self.mode == "ring_xor" else self.base.x_size  # type: ignore[union-attr]

    @property
    def y_size(self) -> int:
        return 2 if self.mode == "ring_xor" else self.base.y_size  # type: ignore[union-attr]


# ---------------------------------------------------------------------------
# induced partitions


def induced_partition_symbolwise(table: FunctionTable) -> Partition:
    """Group x with x' iff f(x, y) = f(x', y) for every y."""
    if not table.full_support:
        raise InstanceError(_RESTRICTED_MSG)
    return Partition.from_labels([table.entries[x] for x in range(table.x_size)])


def hat_type_function(table: FunctionTable) -> FunctionTable:
    """Collapse of f used by the type family: rows with constant f map to a
    fresh symbol m, all other rows are copied unchanged."""
    if not table.full_support:
        raise InstanceError(_RESTRICTED_MSG)
    m = table.v_size
    entries = []
    for x in range(table.x_size):
        row = table.entries[x]
        if all(cell == row[0] for cell in row):
            entries.append((m,) * table.y_size)
        else:
            entries.append(row)
    return FunctionTable(
        table.x_size,
        table.y_size,
        table.v_labels + (str(m),),
        tuple(entries),
    )


def hat_modsum_function(table: FunctionTable) -> FunctionTable:
    """Cyclic row differences used by the modulo-sum family:
    (x, y) -> f(x, y+1) - f(x, y) mod m, wrapping the last column to the
    first."""
    if not table.full_support:
        raise InstanceError(_RESTRICTED_MSG)
    m = table.v_size
    if tuple(table.v_labels) != tuple(str(v) for v in range(m)):
        raise InstanceError("modsum mode requires codomain labels 0..m-1")
    entries = []
    for x in range(table.x_size):
        row = table.entries[x]
        entries.append(
            tuple((row[(y + 1) % table.y_size] - row[y]) % m for y in range(table.y_size))
        )
    return FunctionTable(table.x_size, table.y_size, table.v_labels, tuple(entries))


def induced_partition(family: FunctionFamily) -> Partition:
    """The partition of X attached to the family's mode."""
    if family.mode == "ring_xor":
        raise InstanceError(
            "the ring_xor family has no informative partition; only the trivial "
            "partition satisfies the list condition and it fails the "
            "permutation condition"
        )
    base = family.base
    assert base is not None
    if family.mode == "symbolwise":
        return induced_partition_symbolwise(base)
    if family.mode == "type":
        return induced_partition_symbolwise(hat_type_function(base))
    return induced_partition_symbolwise(hat_modsum_function(base))


# ---------------------------------------------------------------------------
# family evaluation


def family_value(family: FunctionFamily, x_seq: tuple[int, ...], y_seq: tuple[int, ...]):
    """Evaluate the family's sequence function; result is hashable."""
    if family.mode == "ring_xor":
        n = len(x_seq)
        z = tuple((x_seq[k] + y_seq[k]) % 2 for k in range(n))
        return tuple(int(z[k] == z[(k + 1) % n]) for k in range(n))
    base = family.base
    assert base is not None
    vals = tuple(base.value(x, y) for x, y in zip(x_seq, y_seq))
    if family.mode == "symbolwise":
        return vals
    if family.mode == "type":
        return type_of(vals, base.v_size)
    return sum(vals) % base.v_size


def _value_with_y_sub(
    family: FunctionFamily,
    x_seq: tuple[int, ...],
    y_seq: tuple[int, ...],
    base_vals: tuple[int, ...] | None,
    k: int,
    b: int,
):
    """family value of (x, y with position k replaced by b); 0-based k.

    For the table-backed modes the substituted value is derived from the
    unsubstituted componentwise values in O(1); ring_xor just recomputes.
    """
    if family.mode == "ring_xor":
        y_sub = y_seq[:k] + (b,) + y_seq[k + 1 :]
        return family_value(family, x_seq, y_sub)
    base = family.base
    assert base is not None and base_vals is not None
    new_v = base.value(x_seq[k], b)
    if family.mode == "symbolwise":
        return base_vals[:k] + (new_v,) + base_vals[k + 1 :]
    if family.mode == "type":
        counts = [0] * base.v_size
        for v in base_vals:
            counts[v] += 1
        counts[base_vals[k]] -= 1
        counts[new_v] += 1
        return TypeVector(len(base_vals), tuple(counts))
    return (sum(base_vals) - base_vals[k] + new_v) % base.v_size


def _base_values(family: FunctionFamily, x_seq, y_seq) -> tuple[int, ...] | None:
    if family.mode == "ring_xor":
        return None
    base = family.base
    assert base is not None
    return tuple(base.value(x, y) for x, y in zip(x_seq, y_seq))


def _swapped_equal(
    family: FunctionFamily,
    x_seq: tuple[int, ...],
    y_seq: tuple[int, ...],
    base_vals: tuple[int, ...] | None,
    i: int,
    j: int,
) -> bool:
    """Does swapping x_i and x_j (0-based) leave the family value unchanged?"""
    if family.mode == "ring_xor":
        x_swapped = list(x_seq)
        x_swapped[i], x_swapped[j] = x_swapped[j], x_swapped[i]
        return family_value(family, tuple(x_swapped), y_seq) == family_value(
            family, x_seq, y_seq
        )
    base = family.base
    assert base is not None and base_vals is not None
    vi = base.value(x_seq[j], y_seq[i])
    vj = base.value(x_seq[i], y_seq[j])
    if family.mode == "symbolwise":
        return vi == base_vals[i] and vj == base_vals[j]
    if family.mode == "type":
        # the multiset of values keeps its two changed members
        return sorted((vi, vj)) == sorted((base_vals[i], base_vals[j]))
    return (vi + vj - base_vals[i] - base_vals[j]) % base.v_size == 0


# ---------------------------------------------------------------------------
# informativeness


@dataclass(frozen=True)
class Condition1Witness:
    """Two substituted sequences with identical value lists but different
    blocks (positions are 1-based)."""

    i: int
    a: int
    x_seq: tuple[int, ...]
    y_seq: tuple[int, ...]
    a_other: int
    x_other: tuple[int, ...]
    y_other: tuple[int, ...]


@dataclass(frozen=True)
class Condition2Witness:
    """A block-preserving transposition that changes the value.  ``sigma``
    maps positions: the permuted sequence is x[sigma[k]] at position k."""

    x_seq: tuple[int, ...]
    y_seq: tuple[int, ...]
    sigma: tuple[int, ...]


@dataclass(frozen=True)
class ConditionCheck:
    passed: bool
    witness: Condition1Witness | Condition2Witness | None = None


@dataclass(frozen=True)
class InformativenessReport:
    n: int
    condition1: ConditionCheck
    condition2: ConditionCheck

    @property
    def passed(self) -> bool:
        return self.condition1.passed and self.condition2.passed


def _check_budget(family: FunctionFamily, n: int) -> None:
    cost = (family.x_size**n) * (family.y_size**n)
    if cost > INFORMATIVE_BUDGET:
        raise BudgetError(
            f"informativeness scan would enumerate {cost} sequence pairs, "
            f"budget {INFORMATIVE_BUDGET}"
        )


def _sequence_pairs(family: FunctionFamily, n: int) -> Iterator[tuple[tuple, tuple]]:
    xs = range(family.x_size)
    ys = range(family.y_size)
    for x_seq in product(xs, repeat=n):
        for y_seq in product(ys, repeat=n):
            yield x_seq, y_seq


def check_informative(
    family: FunctionFamily, part: Partition, n: int
) -> InformativenessReport:
    """Exhaustively check both informativeness conditions at blocklength n."""
    if part.x_size != family.x_size:
        raise InstanceError("partition does not match the family's X alphabet")
    if n < 1:
        raise InstanceError("blocklength must be >= 1")
    _check_budget(family, n)
    cond1 = _check_condition1(family, part, n)
    cond2 = _check_condition2(family, part, n)
    return InformativenessReport(n=n, condition1=cond1, condition2=cond2)


def _check_condition1(family: FunctionFamily, part: Partition, n: int) -> ConditionCheck:
    ys = range(family.y_size)
    # per position, the materialised witness map: value list -> block
    for k in range(n):
        seen: dict[tuple, tuple[int, tuple, tuple]] = {}
        for x_seq, y_seq in _sequence_pairs(family, n):
            base_vals = _base_values(family, x_seq, y_seq)
            key = tuple(
                _value_with_y_sub(family, x_seq, y_seq, base_vals, k, b) for b in ys
            )
            a = x_seq[k]
            block = part.block_of[a]
            prev = seen.get(key)
            if prev is None:
                seen[key] = (a, x_seq, y_seq)
            elif part.block_of[prev[0]] != block:
                witness = Condition1Witness(
                    i=k + 1,
                    a=a,
                    x_seq=x_seq,
                    y_seq=y_seq,
                    a_other=prev[0],
                    x_other=prev[1],
                    y_other=prev[2],
                )
                return ConditionCheck(False, witness)
    return ConditionCheck(True)


def _check_condition2(family: FunctionFamily, part: Partition, n: int) -> ConditionCheck:
    position_pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    for x_seq, y_seq in _sequence_pairs(family, n):
        base_vals = _base_values(family, x_seq, y_seq)
        for i, j in position_pairs:
            if part.block_of[x_seq[i]] != part.block_of[x_seq[j]]:
                continue
            if not _swapped_equal(family, x_seq, y_seq, base_vals, i, j):
                sigma = list(range(n))
                sigma[i], sigma[j] = sigma[j], sigma[i]
                return ConditionCheck(
                    False, Condition2Witness(x_seq, y_seq, tuple(sigma))
                )
    return ConditionCheck(True)


def finest_condition1_partition(family: FunctionFamily, n: int) -> Partition:
    """Finest partition satisfying the list condition at blocklength n.

    Symbols are merged whenever two substituted sequences produce identical
    value lists at the same position; the result is the transitive closure
    of the forced merges (union-find, order independent).
    """
    if n < 1:
        raise InstanceError("blocklength must be >= 1")
    _check_budget(family, n)
    parent = list(range(family.x_size))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a: int, b: int) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    ys = range(family.y_size)
    for k in range(n):
        seen: dict[tuple, int] = {}
        for x_seq, y_seq in _sequence_pairs(family, n):
            base_vals = _base_values(family, x_seq, y_seq)
            key = tuple(
                _value_with_y_sub(family, x_seq, y_seq, base_vals, k, b) for b in ys
            )
            a = x_seq[k]
            if key in seen:
                union(seen[key], a)
            else:
                seen[key] = a
    return Partition.from_labels([find(x) for x in range(family.x_size)])


# ---------------------------------------------------------------------------
# witness replay (used by reports and the regression suite)


def replay_condition1_witness(
    family: FunctionFamily, part: Partition, w: Condition1Witness
) -> bool:
    """True iff the witness still exhibits a violation of the list condition."""
    k = w.i - 1
    ys = range(family.y_size)
    lists_a = tuple(
        _value_with_y_sub(family, w.x_seq, w.y_seq, _base_values(family, w.x_seq, w.y_seq), k, b)
        for b in ys
    )
    lists_o = tuple(
        _value_with_y_sub(
            family, w.x_other, w.y_other, _base_values(family, w.x_other, w.y_other), k, b
        )
        for b in ys
    )
    return (
        lists_a == lists_o
        and w.x_seq[k] == w.a
        and w.x_other[k] == w.a_other
        and part.block_of[w.a] != part.block_of[w.a_other]
    )


def replay_condition2_witness(
    family: FunctionFamily, part: Partition, w: Condition2Witness
) -> bool:
    """True iff the witness permutation preserves blocks yet changes the value."""
    permuted = tuple(w.x_seq[p] for p in w.sigma)
    blocks_kept = all(
        part.block_of[permuted[k]] == part.block_of[w.x_seq[k]]
        for k in range(len(w.x_seq))
    )
    return blocks_kept and family_value(family, permuted, w.y_seq) != family_value(
        family, w.x_seq, w.y_seq
    )
