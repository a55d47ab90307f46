"""Numeric core: conditional entropy, hypergraph entropy, and rate reports.

The hypergraph entropy of (X, G) is the minimum of I(W; X) over random
hyperedges W containing X; the conditional variant minimises I(W; X | Y)
over test channels P(w|x) supported on edges containing x, with W generated
from X alone so that W, X, Y always form a Markov chain.  By data
processing the minimisation may be restricted to containment-maximal edges.

The solver is an alternating minimisation in the Blahut-Arimoto family.
Writing Q(w|y) for the decoder-side edge marginal, the objective equals

    I(W; X | Y) = sum_{x,y,w} P(y) P(x|y) P(w|x) log2 [ P(w|x) / Q(w|y) ]

minimised over Q at Q(w|y) = sum_x P(x|y) P(w|x); for fixed Q the row-wise
minimiser is P(w|x) proportional to exp2( sum_y P(y|x) log2 Q(w|y) ) on the
covering edges.  Both half-steps decrease the (convex) objective, so the
iteration is monotone.  Runs are seeded and deterministic: a uniform start
plus seeded random restarts, best value wins, ties broken by the earliest
run.

Everything here is in bits (base-2 logarithms).  Exact rationals are
converted to 64-bit floats at this module's boundary and nowhere earlier.

A brute-force grid oracle over test channels doubles as an independent
check of the solver on tiny instances, and a relaxed variant allows
Pr(X in W) >= 1 - gamma instead of certain coverage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .model import (
    BudgetError,
    FunctionTable,
    Hypergraph,
    InstanceError,
    JointDistribution,
    Partition,
    TestChannel,
    validate_full_support,
)
from .partitions import FunctionFamily, induced_partition
from .solvability import maximal_solvable_hyperedges

__all__ = [
    "EntropyResult",
    "RateReport",
    "conditional_entropy",
    "channel_objective",
    "hypergraph_entropy",
    "conditional_hypergraph_entropy",
    "relaxed_hypergraph_entropy",
    "grid_oracle_conditional",
    "optimal_rate_full_support",
    "optimal_rate_restricted_support",
]

DEFAULT_TOL = 1e-12
MAX_ITERATIONS = 100_000
RESTARTS = 8
# combined per-row grid choices allowed in the exhaustive oracles
GRID_COMBO_BUDGET = 20_000_000
_ORACLE_MAX_X = 3
_ORACLE_MAX_EDGES = 3


@dataclass(frozen=True)
class EntropyResult:
    """Solved minimisation: value in bits, argmin channel, iteration count,
    and the final objective decrement."""

    value: float
    channel: TestChannel
    iterations: int
    residual: float

    def __post_init__(self) -> None:
        if self.value < 0:
            raise InstanceError("entropy values are nonnegative")


@dataclass(frozen=True)
class RateReport:
    """Optimal-rate computation with its ingredients and the plain
    conditional entropy H(X|Y) for comparison."""

    method: str  # "induced-partition" or "hypergraph-entropy"
    rate: float
    sw_rate: float
    partition: Partition | None = None
    hypergraph: Hypergraph | None = None
    solver: EntropyResult | None = None


# ---------------------------------------------------------------------------
# exact conditional entropy


def conditional_entropy(dist: JointDistribution) -> float:
    """H(X|Y) in bits, computed from the exact joint distribution."""
    total = 0.0
    for x in range(dist.x_size):
        for y in range(dist.y_size):
            p = dist.probs[x][y]
            if p > 0:
                total += float(p) * math.log2(float(dist.marginal_y[y] / p))
    return total


# ---------------------------------------------------------------------------
# solver plumbing


def _as_float_joint(dist: JointDistribution) -> np.ndarray:
    return np.array([[float(p) for p in row] for row in dist.probs], dtype=np.float64)


def _cover_mask(graph: Hypergraph, x_size: int) -> tuple[tuple[frozenset[int], ...], np.ndarray]:
    edges = graph.maximal_edges().edges
    mask = np.zeros((x_size, len(edges)), dtype=bool)
    for j, e in enumerate(edges):
        for x in e:
            mask[x, j] = True
    uncovered = [x for x in range(x_size) if not mask[x].any()]
    if uncovered:
        raise InstanceError(f"vertices {uncovered} are covered by no hyperedge")
    return edges, mask


def _xlog2x(a: np.ndarray) -> np.ndarray:
    return np.where(a > 0, a * np.log2(np.where(a > 0, a, 1.0)), 0.0)


def channel_objective(pxy: np.ndarray, rows: np.ndarray) -> float:
    """I(W; X | Y) = H(W|Y) - H(W|X) for a channel generated from X alone."""
    px = pxy.sum(axis=1)
    py = pxy.sum(axis=0)
    keep = py > 0
    q = (pxy[:, keep] / py[keep]).T @ rows  # (ny, ne): Q(w|y)
    hwy = -float((py[keep] * _xlog2x(q).sum(axis=1)).sum())
    hwx = -float((px * _xlog2x(rows).sum(axis=1)).sum())
    return hwy - hwx


def _ba_solve(
    pxy: np.ndarray, mask: np.ndarray, tol: float, max_iter: int, rows0: np.ndarray
) -> tuple[float, np.ndarray, int, float]:
    px = pxy.sum(axis=1)
    py = pxy.sum(axis=0)
    keep = py > 0  # zero-probability decoder symbols contribute nothing
    pxy_k = pxy[:, keep]
    py_k = py[keep]
    p_x_given_y = pxy_k / py_k
    p_y_given_x = pxy_k / px[:, None]

    rows = rows0.copy()
    prev = math.inf
    value = math.inf
    residual = math.inf
    iterations = 0
    converged = False
    for iterations in range(1, max_iter + 1):
        q = p_x_given_y.T @ rows  # (ny, ne): Q(w|y)
        hwy = -float((py_k * _xlog2x(q).sum(axis=1)).sum())
        hwx = -float((px * _xlog2x(rows).sum(axis=1)).sum())
        value = hwy - hwx
        residual = prev - value
        if residual < tol:
            converged = True
            break
        prev = value
        logq = np.where(q > 0, np.log2(np.where(q > 0, q, 1.0)), -1e30)
        scores = p_y_given_x @ logq  # (nx, ne)
        scores = np.where(mask, scores, -np.inf)
        weights = np.exp2(scores - scores.max(axis=1, keepdims=True))
        weights = np.where(mask, weights, 0.0)
        rows = weights / weights.sum(axis=1, keepdims=True)
    if not converged:
        raise BudgetError(
            f"solver did not converge within {max_iter} iterations "
            f"(last decrement {residual:.3e}, tol {tol:.3e})"
        )
    return max(value, 0.0), rows, iterations, residual


def _solve_with_restarts(
    pxy: np.ndarray,
    graph: Hypergraph,
    tol: float,
    seed: int,
    restarts: int,
    max_iter: int,
) -> EntropyResult:
    edges, mask = _cover_mask(graph, pxy.shape[0])
    uniform = mask.astype(np.float64)
    uniform /= uniform.sum(axis=1, keepdims=True)
    starts = [uniform]
    for k in range(1, restarts + 1):
        rng = np.random.default_rng([seed, k])
        rnd = rng.random(mask.shape) * mask
        starts.append(rnd / rnd.sum(axis=1, keepdims=True))

    best: tuple[float, int, np.ndarray, int, float] | None = None
    for run, rows0 in enumerate(starts):
        value, rows, iters, residual = _ba_solve(pxy, mask, tol, max_iter, rows0)
        if best is None or (value, run) < (best[0], best[1]):
            best = (value, run, rows, iters, residual)
    assert best is not None
    value, _, rows, iters, residual = best
    channel = TestChannel(edges, tuple(tuple(float(v) for v in r) for r in rows))
    return EntropyResult(value=value, channel=channel, iterations=iters, residual=residual)


def conditional_hypergraph_entropy(
    dist: JointDistribution,
    graph: Hypergraph,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
    restarts: int = RESTARTS,
    max_iter: int = MAX_ITERATIONS,
) -> EntropyResult:
    """Minimum of I(W; X | Y) over test channels supported on covering
    maximal edges (bits)."""
    if graph.x_size != dist.x_size:
        raise InstanceError("hypergraph and distribution disagree on |X|")
    return _solve_with_restarts(_as_float_joint(dist), graph, tol, seed, restarts, max_iter)


def hypergraph_entropy(
    px: Sequence[Fraction | float],
    graph: Hypergraph,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
    restarts: int = RESTARTS,
    max_iter: int = MAX_ITERATIONS,
) -> EntropyResult:
    """Minimum of I(W; X) over test channels on covering maximal edges (bits).

    Requires supp(P_X) = X and every symbol covered by some edge.  This is
    the conditional quantity with a blank decoder observation.
    """
    if len(px) != graph.x_size:
        raise InstanceError("distribution and hypergraph disagree on |X|")
    weights = np.array([float(p) for p in px], dtype=np.float64)
    if (weights <= 0).any():
        raise InstanceError("hypergraph entropy requires supp(P_X) = X")
    if abs(weights.sum() - 1.0) > 1e-9:
        raise InstanceError("P_X must sum to 1")
    pxy = weights[:, None]  # blank decoder observation
    return _solve_with_restarts(pxy, graph, tol, seed, restarts, max_iter)


# ---------------------------------------------------------------------------
# exhaustive grid oracles


def _grid_distributions(step_units: int, ne: int, allowed: Sequence[int]) -> np.ndarray:
    """All probability vectors over ne slots with mass only on `allowed`,
    entries being multiples of 1/step_units."""
    out = []

    def rec(idx: int, rem: int, acc: list[int]) -> None:
        if idx == len(allowed) - 1:
            row = [0] * ne
            for j, units in zip(allowed, acc + [rem]):
                row[j] = units
            out.append(row)
            return
        for units in range(rem + 1):
            rec(idx + 1, rem - units, acc + [units])

    rec(0, step_units, [])
    return np.array(out, dtype=np.float64) / step_units


def _grid_scan(
    pxy: np.ndarray,
    choices: list[np.ndarray],
    feasible_fn=None,
    chunk: int = 4096,
) -> float:
    """Minimum objective over the cartesian product of per-row choices."""
    nx = len(choices)
    sizes = [len(c) for c in choices]
    total = math.prod(sizes)
    if total > GRID_COMBO_BUDGET:
        raise BudgetError(
            f"grid scan would evaluate {total} channels, budget {GRID_COMBO_BUDGET}"
        )
    px = pxy.sum(axis=1)
    py = pxy.sum(axis=0)
    keep = py > 0
    p_x_given_y = (pxy[:, keep] / py[keep]).T  # (ny, nx)
    py_k = py[keep]

    best = math.inf
    for base in range(0, total, chunk):
        idx = np.arange(base, min(base + chunk, total))
        multi = np.array(np.unravel_index(idx, sizes)).T  # (c, nx)
        rows = np.stack(
            [choices[x][multi[:, x]] for x in range(nx)], axis=1
        )  # (c, nx, ne)
        if feasible_fn is not None:
            ok = feasible_fn(rows)
            if not ok.any():
                continue
            rows = rows[ok]
        q = np.einsum("yx,cxe->cye", p_x_given_y, rows)
        hwy = -(py_k[None, :] * _xlog2x(q).sum(axis=2)).sum(axis=1)
        hwx = -(px[None, :] * _xlog2x(rows).sum(axis=2)).sum(axis=1)
        vals = hwy - hwx
        best = min(best, float(vals.min()))
    if math.isinf(best):
        raise InstanceError("no feasible channel on the grid")
    return max(best, 0.0)


def _check_oracle_budget(x_size: int, num_edges: int) -> None:
    if x_size > _ORACLE_MAX_X or num_edges > _ORACLE_MAX_EDGES:
        raise BudgetError(
            f"grid oracles are limited to |X| <= {_ORACLE_MAX_X} and "
            f"|E| <= {_ORACLE_MAX_EDGES}"
        )


def grid_oracle_conditional(
    dist: JointDistribution, graph: Hypergraph, grid_step: float
) -> float:
    """Exhaustive minimum of I(W; X | Y) over covering channels whose entries
    are multiples of grid_step; independent check of the solver."""
    edges, mask = _cover_mask(graph, dist.x_size)
    _check_oracle_budget(dist.x_size, len(edges))
    units = round(1 / grid_step)
    if units < 1:
        raise InstanceError("grid_step must be at most 1")
    pxy = _as_float_joint(dist)
    choices = [
        _grid_distributions(units, len(edges), [j for j in range(len(edges)) if mask[x, j]])
        for x in range(dist.x_size)
    ]
    return _grid_scan(pxy, choices)


def relaxed_hypergraph_entropy(
    dist: JointDistribution,
    graph: Hypergraph,
    gamma: float,
    grid_step: float,
) -> float:
    """Grid minimum of I(W; X | Y) over channels with Pr(X in W) >= 1 - gamma.

    Rows may now place mass on any edge; at gamma = 0 the feasible set
    coincides with the covering channels and the value matches the strict
    quantity within grid resolution.  Coarse grids only: the joint grid over
    unrestricted rows grows too fast for fine steps.
    """
    if not 0 <= gamma <= 1:
        raise InstanceError("gamma must lie in [0, 1]")
    edges, mask = _cover_mask(graph, dist.x_size)
    _check_oracle_budget(dist.x_size, len(edges))
    units = round(1 / grid_step)
    if units < 1:
        raise InstanceError("grid_step must be at most 1")
    pxy = _as_float_joint(dist)
    px = pxy.sum(axis=1)
    ne = len(edges)
    all_slots = list(range(ne))
    choices = [_grid_distributions(units, ne, all_slots) for _ in range(dist.x_size)]
    maskf = mask.astype(np.float64)

    def feasible(rows: np.ndarray) -> np.ndarray:
        cover = ((rows * maskf[None, :, :]).sum(axis=2) * px[None, :]).sum(axis=1)
        return cover >= 1 - gamma - 1e-12

    return _grid_scan(pxy, choices, feasible_fn=feasible)


# ---------------------------------------------------------------------------
# end-to-end rates


def optimal_rate_full_support(
    family: FunctionFamily, dist: JointDistribution
) -> RateReport:
    """Optimal message rate for a full-support i.i.d. source: the
    conditional entropy of the induced block sequence given Y."""
    if family.mode == "ring_xor":
        raise InstanceError("the ring_xor family has no induced partition")
    if not validate_full_support(dist):
        raise InstanceError(
            "the induced-partition rate requires a full-support distribution; "
            "use the restricted-support pipeline instead"
        )
    base = family.base
    assert base is not None
    if base.x_size != dist.x_size or base.y_size != dist.y_size:
        raise InstanceError("table and distribution disagree on the alphabets")
    part = induced_partition(family)
    rate = conditional_entropy(dist.collapse(part))
    return RateReport(
        method="induced-partition",
        rate=rate,
        sw_rate=conditional_entropy(dist),
        partition=part,
    )


def optimal_rate_restricted_support(
    table: FunctionTable,
    dist: JointDistribution,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
) -> RateReport:
    """Optimal rate for computing the type of the symbol-wise values when the
    support may be restricted: the conditional hypergraph entropy over the
    maximal solvable hyperedges."""
    if table.x_size != dist.x_size or table.y_size != dist.y_size:
        raise InstanceError("table and distribution disagree on the alphabets")
    if dist.support != table.support:
        raise InstanceError(
            "the restricted-support rate requires supp(P_XY) to equal the "
            "table's support"
        )
    graph = maximal_solvable_hyperedges(table)
    solved = conditional_hypergraph_entropy(dist, graph, tol=tol, seed=seed)
    return RateReport(
        method="hypergraph-entropy",
        rate=solved.value,
        sw_rate=conditional_entropy(dist),
        hypergraph=graph,
        solver=solved,
    )
