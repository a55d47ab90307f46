"""Shared domain types, the instance document format, and validation.

An *instance* couples a possibly partial function table f : X x Y -> V with
a joint source distribution P_XY whose support must lie inside the table's
defined cells.  Alphabets are dense integer ranges X = {0..|X|-1} and
Y = {0..|Y|-1}; codomain symbols carry user-facing string labels that are
used only when rendering reports.  Probabilities are exact
``fractions.Fraction`` values end to end: the combinatorial machinery rests
on integer identities (single-coordinate substitutions change a count by at
most one), so only the numeric entropy solver converts to floats, at its own
boundary.

Instance documents are canonical JSON with keys ``x_size``, ``y_size``,
``v_labels``, ``function`` (grid of label indices, ``null`` marking cells
outside the support), ``distribution`` (grid of rationals written as
strings such as ``"1/6"``), and an optional leading ``name``.  Parsing then
re-serialising a document is idempotent and yields the canonical byte form.

All types are immutable after construction and safe to share across
threads.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any, Iterable, Sequence

__all__ = [
    "InstanceError",
    "BudgetError",
    "FunctionTable",
    "JointDistribution",
    "Partition",
    "TypeVector",
    "Hypergraph",
    "SequencePair",
    "TestChannel",
    "Instance",
    "parse_rational",
    "format_rational",
    "parse_instance",
    "serialize_instance",
    "instance_digest",
    "load_instance",
    "validate_full_support",
]


class InstanceError(ValueError):
    """An instance document, domain object, or precondition failed validation."""


class BudgetError(RuntimeError):
    """An exhaustive enumeration would exceed its documented guard rail."""


# ---------------------------------------------------------------------------
# function table


@dataclass(frozen=True)
class FunctionTable:
    """Partial map f on X x Y with codomain labels and derived support S.

    ``entries[x][y]`` is an index into ``v_labels`` or ``None`` for cells
    outside the support.  Every row and every column must contain at least
    one defined cell, so each source symbol can actually occur.
    """

    x_size: int
    y_size: int
    v_labels: tuple[str, ...]
    entries: tuple[tuple[int | None, ...], ...]

    def __post_init__(self) -> None:
        if self.x_size < 1 or self.y_size < 1:
            raise InstanceError("alphabet sizes must be positive")
        if not self.v_labels:
            raise InstanceError("v_labels must be nonempty")
        if any(not isinstance(lbl, str) for lbl in self.v_labels):
            raise InstanceError("v_labels must be strings")
        if len(set(self.v_labels)) != len(self.v_labels):
            raise InstanceError("v_labels must be distinct")
        if len(self.entries) != self.x_size:
            raise InstanceError(
                f"function grid has {len(self.entries)} rows, expected {self.x_size}"
            )
        for x, row in enumerate(self.entries):
            if len(row) != self.y_size:
                raise InstanceError(
                    f"function row {x} has {len(row)} cells, expected {self.y_size}"
                )
            for y, cell in enumerate(row):
                if cell is None:
                    continue
                if isinstance(cell, bool) or not isinstance(cell, int):
                    raise InstanceError(f"cell ({x},{y}) must be an index or null")
                if not 0 <= cell < len(self.v_labels):
                    raise InstanceError(
                        f"cell ({x},{y}) value {cell} outside codomain of size {len(self.v_labels)}"
                    )
        for x, row in enumerate(self.entries):
            if all(cell is None for cell in row):
                raise InstanceError(f"row {x} of the support is empty")
        for y in range(self.y_size):
            if all(row[y] is None for row in self.entries):
                raise InstanceError(f"column {y} of the support is empty")

    @property
    def v_size(self) -> int:
        return len(self.v_labels)

    @cached_property
    def support(self) -> frozenset[tuple[int, int]]:
        return frozenset(
            (x, y)
            for x, row in enumerate(self.entries)
            for y, cell in enumerate(row)
            if cell is not None
        )

    @cached_property
    def full_support(self) -> bool:
        return len(self.support) == self.x_size * self.y_size

    def defined(self, x: int, y: int) -> bool:
        return self.entries[x][y] is not None

    def value(self, x: int, y: int) -> int:
        cell = self.entries[x][y]
        if cell is None:
            raise InstanceError(f"function undefined at cell ({x},{y})")
        return cell

    def row_support(self, x: int) -> tuple[int, ...]:
        """Columns y with (x, y) in the support, ascending."""
        return tuple(y for y, cell in enumerate(self.entries[x]) if cell is not None)

    def col_support(self, y: int) -> tuple[int, ...]:
        return tuple(x for x in range(self.x_size) if self.entries[x][y] is not None)


# ---------------------------------------------------------------------------
# joint distribution


@dataclass(frozen=True)
class JointDistribution:
    """Exact joint distribution P_XY on X x Y with strictly positive marginals."""

    probs: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        if not self.probs or not self.probs[0]:
            raise InstanceError("distribution grid must be nonempty")
        width = len(self.probs[0])
        for x, row in enumerate(self.probs):
            if len(row) != width:
                raise InstanceError(f"distribution row {x} has inconsistent length")
            for y, p in enumerate(row):
                if not isinstance(p, Fraction):
                    raise InstanceError(f"probability at ({x},{y}) must be a Fraction")
                if p < 0:
                    raise InstanceError(f"negative probability at cell ({x},{y})")
        total = sum(p for row in self.probs for p in row)
        if total != 1:
            raise InstanceError(f"probabilities sum to {total}, expected exactly 1")
        for x, p in enumerate(self.marginal_x):
            if p == 0:
                raise InstanceError(f"marginal P_X({x}) is zero")
        for y, p in enumerate(self.marginal_y):
            if p == 0:
                raise InstanceError(f"marginal P_Y({y}) is zero")

    @property
    def x_size(self) -> int:
        return len(self.probs)

    @property
    def y_size(self) -> int:
        return len(self.probs[0])

    @cached_property
    def marginal_x(self) -> tuple[Fraction, ...]:
        return tuple(sum(row, Fraction(0)) for row in self.probs)

    @cached_property
    def marginal_y(self) -> tuple[Fraction, ...]:
        return tuple(
            sum((row[y] for row in self.probs), Fraction(0)) for y in range(self.y_size)
        )

    @cached_property
    def support(self) -> frozenset[tuple[int, int]]:
        return frozenset(
            (x, y)
            for x, row in enumerate(self.probs)
            for y, p in enumerate(row)
            if p > 0
        )

    @cached_property
    def full_support(self) -> bool:
        return len(self.support) == self.x_size * self.y_size

    def prob(self, x: int, y: int) -> Fraction:
        return self.probs[x][y]

    def collapse(self, partition: "Partition") -> "JointDistribution":
        """Joint distribution of (block of X, Y) under the given partition of X."""
        if len(partition.block_of) != self.x_size:
            raise InstanceError("partition does not match the X alphabet")
        grid = [[Fraction(0)] * self.y_size for _ in range(partition.num_blocks)]
        for x, row in enumerate(self.probs):
            b = partition.block_of[x]
            for y, p in enumerate(row):
                grid[b][y] += p
        return JointDistribution(tuple(tuple(row) for row in grid))


def validate_full_support(dist: JointDistribution) -> bool:
    """True iff every cell of the joint distribution is strictly positive."""
    return dist.full_support


# ---------------------------------------------------------------------------
# partitions of X


@dataclass(frozen=True)
class Partition:
    """Partition of X into blocks, canonically labelled.

    ``block_of[x]`` is the block id of symbol x.  Ids are 0..t-1 ordered by
    the smallest member of each block, i.e. scanning x = 0, 1, ... the first
    occurrences of ids appear in increasing order.
    """

    block_of: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.block_of:
            raise InstanceError("partition of an empty alphabet")
        next_id = 0
        for x, b in enumerate(self.block_of):
            if not isinstance(b, int) or b < 0:
                raise InstanceError(f"invalid block id {b!r} at symbol {x}")
            if b == next_id:
                next_id += 1
            elif b > next_id:
                raise InstanceError(
                    "block ids must be canonical (0..t-1 ordered by smallest member)"
                )

    @classmethod
    def from_labels(cls, labels: Sequence[Any]) -> "Partition":
        """Canonicalise an arbitrary labelling of X into a Partition."""
        ids: dict[Any, int] = {}
        block_of = []
        for lbl in labels:
            if lbl not in ids:
                ids[lbl] = len(ids)
            block_of.append(ids[lbl])
        return cls(tuple(block_of))

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[int]], x_size: int) -> "Partition":
        assign: dict[int, int] = {}
        for tag, block in enumerate(blocks):
            members = list(block)
            if not members:
                raise InstanceError("empty block")
            for x in members:
                if not 0 <= x < x_size:
                    raise InstanceError(f"symbol {x} outside alphabet of size {x_size}")
                if x in assign:
                    raise InstanceError(f"symbol {x} appears in two blocks")
                assign[x] = tag
        if len(assign) != x_size:
            raise InstanceError("blocks do not cover the alphabet")
        return cls.from_labels([assign[x] for x in range(x_size)])

    @property
    def x_size(self) -> int:
        return len(self.block_of)

    @cached_property
    def blocks(self) -> tuple[tuple[int, ...], ...]:
        t = self.num_blocks
        out: list[list[int]] = [[] for _ in range(t)]
        for x, b in enumerate(self.block_of):
            out[b].append(x)
        return tuple(tuple(block) for block in out)

    @property
    def num_blocks(self) -> int:
        return max(self.block_of) + 1

    def block(self, x: int) -> int:
        return self.block_of[x]

    def refines(self, other: "Partition") -> bool:
        """True iff every block of self lies inside a block of other."""
        if other.x_size != self.x_size:
            raise InstanceError("partitions over different alphabets")
        return all(
            len({other.block_of[x] for x in block}) == 1 for block in self.blocks
        )


# ---------------------------------------------------------------------------
# types (empirical distributions with integer counts)


@dataclass(frozen=True)
class TypeVector:
    """Integer count vector of a length-n sequence over a fixed alphabet."""

    n: int
    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.counts:
            raise InstanceError("type vector over an empty alphabet")
        if any(isinstance(c, bool) or not isinstance(c, int) or c < 0 for c in self.counts):
            raise InstanceError("type counts must be nonnegative integers")
        if sum(self.counts) != self.n:
            raise InstanceError(
                f"type counts sum to {sum(self.counts)}, expected n={self.n}"
            )

    @classmethod
    def from_sequence(cls, seq: Sequence[int], size: int) -> "TypeVector":
        counts = [0] * size
        for s in seq:
            if not 0 <= s < size:
                raise InstanceError(f"symbol {s} outside alphabet of size {size}")
            counts[s] += 1
        return cls(len(seq), tuple(counts))

    @property
    def size(self) -> int:
        return len(self.counts)

    def freq(self, v: int) -> Fraction:
        return Fraction(self.counts[v], self.n)

    def freqs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(c, self.n) for c in self.counts)


# ---------------------------------------------------------------------------
# hypergraphs


@dataclass(frozen=True)
class Hypergraph:
    """Vertex set X = {0..x_size-1} plus a family of nonempty hyperedges."""

    x_size: int
    edges: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        if self.x_size < 1:
            raise InstanceError("hypergraph needs a nonempty vertex set")
        if not self.edges:
            raise InstanceError("hypergraph needs at least one edge")
        seen = set()
        for e in self.edges:
            if not isinstance(e, frozenset) or not e:
                raise InstanceError("edges must be nonempty frozensets")
            if any(not 0 <= x < self.x_size for x in e):
                raise InstanceError(f"edge {sorted(e)} leaves the vertex set")
            if e in seen:
                raise InstanceError(f"duplicate edge {sorted(e)}")
            seen.add(e)

    @classmethod
    def of(cls, x_size: int, edges: Iterable[Iterable[int]]) -> "Hypergraph":
        canon = sorted({frozenset(e) for e in edges}, key=lambda e: tuple(sorted(e)))
        return cls(x_size, tuple(canon))

    @property
    def covers_all(self) -> bool:
        covered = set().union(*self.edges)
        return covered == set(range(self.x_size))

    @property
    def is_antichain(self) -> bool:
        return not any(
            a < b for a in self.edges for b in self.edges if a != b
        )

    def maximal_edges(self) -> "Hypergraph":
        """Restriction to containment-maximal edges."""
        keep = [e for e in self.edges if not any(e < other for other in self.edges)]
        return Hypergraph.of(self.x_size, keep)


# ---------------------------------------------------------------------------
# sequence pairs and test channels


@dataclass(frozen=True)
class SequencePair:
    """A pair of aligned source sequences of common blocklength n >= 1."""

    x_seq: tuple[int, ...]
    y_seq: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.x_seq) != len(self.y_seq):
            raise InstanceError("x and y sequences must share a length")
        if not self.x_seq:
            raise InstanceError("sequences must have blocklength n >= 1")

    @classmethod
    def of(cls, x_seq: Iterable[int], y_seq: Iterable[int]) -> "SequencePair":
        return cls(tuple(x_seq), tuple(y_seq))

    @property
    def n(self) -> int:
        return len(self.x_seq)

    def within_support(self, table: FunctionTable) -> bool:
        return all(
            0 <= x < table.x_size and 0 <= y < table.y_size and table.defined(x, y)
            for x, y in zip(self.x_seq, self.y_seq)
        )


_ROW_SUM_TOL = 1e-9


@dataclass(frozen=True)
class TestChannel:
    """Per-symbol probability vectors over a hyperedge family (float stage)."""

    __test__ = False  # not a pytest collection target despite the name

    edges: tuple[frozenset[int], ...]
    rows: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        if not self.rows:
            raise InstanceError("test channel needs at least one row")
        for x, row in enumerate(self.rows):
            if len(row) != len(self.edges):
                raise InstanceError(f"row {x} length does not match the edge family")
            if any(p < -_ROW_SUM_TOL for p in row):
                raise InstanceError(f"negative probability in row {x}")
            if abs(sum(row) - 1.0) > _ROW_SUM_TOL:
                raise InstanceError(f"row {x} sums to {sum(row)}, expected 1")

    def strictly_covering(self) -> bool:
        """True iff each row places mass only on edges containing its symbol."""
        return all(
            all(p <= _ROW_SUM_TOL or x in e for p, e in zip(row, self.edges))
            for x, row in enumerate(self.rows)
        )


# ---------------------------------------------------------------------------
# instance documents


@dataclass(frozen=True)
class Instance:
    table: FunctionTable
    dist: JointDistribution
    name: str | None = None


def parse_rational(token: Any) -> Fraction:
    """Parse a rational written as ``"p/q"``, ``"p"``, or a JSON integer."""
    if isinstance(token, bool):
        raise InstanceError(f"invalid rational {token!r}")
    if isinstance(token, int):
        return Fraction(token)
    if isinstance(token, str):
        try:
            return Fraction(token)
        except (ValueError, ZeroDivisionError) as exc:
            raise InstanceError(f"invalid rational {token!r}") from exc
    raise InstanceError(f"invalid rational {token!r} (floats are not exact)")


def format_rational(q: Fraction) -> str:
    return str(q)


_REQUIRED_KEYS = ("x_size", "y_size", "v_labels", "function", "distribution")


def parse_instance(text: str) -> Instance:
    """Parse and validate an instance document; rationals are exact."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"instance document is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise InstanceError("instance document must be a JSON object")
    allowed = set(_REQUIRED_KEYS) | {"name"}
    unknown = sorted(set(doc) - allowed)
    if unknown:
        raise InstanceError(f"unknown keys in instance document: {unknown}")
    missing = sorted(k for k in _REQUIRED_KEYS if k not in doc)
    if missing:
        raise InstanceError(f"missing keys in instance document: {missing}")

    x_size = _require_positive_int(doc["x_size"], "x_size")
    y_size = _require_positive_int(doc["y_size"], "y_size")
    labels = doc["v_labels"]
    if not isinstance(labels, list) or not all(isinstance(s, str) for s in labels):
        raise InstanceError("v_labels must be a list of strings")

    function = doc["function"]
    if not isinstance(function, list) or len(function) != x_size:
        raise InstanceError(f"function grid must have {x_size} rows")
    entries = []
    for x, row in enumerate(function):
        if not isinstance(row, list) or len(row) != y_size:
            raise InstanceError(f"function row {x} must have {y_size} cells")
        entries.append(tuple(row))
    table = FunctionTable(x_size, y_size, tuple(labels), tuple(entries))

    grid = doc["distribution"]
    if not isinstance(grid, list) or len(grid) != x_size:
        raise InstanceError(f"distribution grid must have {x_size} rows")
    probs = []
    for x, row in enumerate(grid):
        if not isinstance(row, list) or len(row) != y_size:
            raise InstanceError(f"distribution row {x} must have {y_size} cells")
        probs.append(tuple(parse_rational(tok) for tok in row))
    for x in range(x_size):
        for y in range(y_size):
            if probs[x][y] > 0 and not table.defined(x, y):
                raise InstanceError(
                    f"probability mass outside support at cell ({x},{y})"
                )
    dist = JointDistribution(tuple(probs))

    name = doc.get("name")
    if name is not None and not isinstance(name, str):
        raise InstanceError("name must be a string")
    return Instance(table, dist, name)


def _require_positive_int(value: Any, key: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise InstanceError(f"{key} must be a positive integer")
    return value


def serialize_instance(inst: Instance) -> str:
    """Canonical byte form of an instance document (stable across runs)."""
    body = []
    if inst.name is not None:
        body.append(f'  "name": {json.dumps(inst.name)}')
    body.append(f'  "x_size": {inst.table.x_size}')
    body.append(f'  "y_size": {inst.table.y_size}')
    body.append(f'  "v_labels": {json.dumps(list(inst.table.v_labels))}')
    frows = ",\n".join("    " + json.dumps(list(row)) for row in inst.table.entries)
    body.append('  "function": [\n' + frows + "\n  ]")
    drows = ",\n".join(
        "    " + json.dumps([format_rational(q) for q in row]) for row in inst.dist.probs
    )
    body.append('  "distribution": [\n' + drows + "\n  ]")
    return "{\n" + ",\n".join(body) + "\n}\n"


def instance_digest(inst: Instance) -> str:
    return hashlib.sha256(serialize_instance(inst).encode("utf-8")).hexdigest()


def load_instance(path: str) -> Instance:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_instance(fh.read())
