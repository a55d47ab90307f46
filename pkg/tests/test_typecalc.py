"""Sequence machinery: evaluation, types, consistent lists, reconstruction,
marginal-type recovery, and loop-cancellation transport.

Independent oracles used here:

* sequence-level brute force: enumerate raw sequence pairs over the support
  and read joint types / value types off them, instead of the grid DFS;
* re-application: every transport move list is replayed cell by cell and the
  endpoint compared exactly.
"""

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fct.model import (
    BudgetError,
    InstanceError,
    Partition,
    SequencePair,
    TypeVector,
)
from fct.typecalc import (
    AmbiguityError,
    InfeasibleError,
    JointType,
    ListOfTypes,
    apply_loop_move,
    consistent_lists,
    count_types,
    decode_type_from_quantization,
    enumerate_joint_types,
    eval_symbolwise,
    iter_types,
    loop_cancellation_transport,
    modsum_function,
    reconstruct_representative,
    substitute,
    type_from_marginals,
    type_function,
    type_of,
)

F = Fraction


# ---------------------------------------------------------------------------
# oracles


def joint_types_by_sequences(table, rows, cols, n):
    """Brute-force joint types: scan raw sequence pairs over the support."""
    cells = [(a, b) for a in rows for b in cols if table.defined(a, b)]
    seen = set()
    for combo in itertools.product(cells, repeat=n):
        grid = [[0] * table.y_size for _ in range(table.x_size)]
        for a, b in combo:
            grid[a][b] += 1
        seen.add(tuple(tuple(r) for r in grid))
    return {JointType(n, g) for g in seen}


# ---------------------------------------------------------------------------
# symbol-wise evaluation and types


def test_eval_symbolwise_card_example(card):
    pair = SequencePair((0, 1, 2, 1, 2, 0), (1, 0, 0, 2, 1, 2))
    assert eval_symbolwise(card.table, pair) == (1, 0, 0, 1, 0, 1)
    assert type_function(card.table, pair).counts == (3, 3)


def test_eval_symbolwise_trivia(card, identity2):
    one = SequencePair((1,), (0,))
    assert eval_symbolwise(card.table, one) == (0,)
    pair = SequencePair((0, 1, 1), (1, 0, 1))
    assert eval_symbolwise(identity2.table, pair) == (1, 2, 3)
    with pytest.raises(InstanceError, match="outside the support"):
        eval_symbolwise(card.table, SequencePair((0, 1), (0, 0)))


def test_type_of():
    assert type_of((1, 0, 0, 1, 0, 1), 2).counts == (3, 3)
    assert type_of((0, 0, 0), 2).counts == (3, 0)
    with pytest.raises(InstanceError, match="n >= 1"):
        type_of((), 2)


def test_modsum(and2, xor2, card):
    assert modsum_function(and2.table, SequencePair((1, 1, 0), (1, 0, 1))) == 1
    for x in itertools.product(range(2), repeat=3):
        assert modsum_function(xor2.table, SequencePair(x, x)) == 0
    assert modsum_function(and2.table, SequencePair((1, 0), (1, 1))) == 1
    with pytest.raises(InstanceError, match="fully defined"):
        modsum_function(card.table, SequencePair((0, 1), (1, 0)))


def test_modsum_substitution_identity(and2):
    # recovering x_1 from the two single-coordinate substitutions at i=1
    for x in itertools.product(range(2), repeat=2):
        for y in itertools.product(range(2), repeat=2):
            v0 = modsum_function(and2.table, SequencePair(x, substitute(y, 1, 0)))
            v1 = modsum_function(and2.table, SequencePair(x, substitute(y, 1, 1)))
            assert (v0 + v1) % 2 == x[0]


def test_substitute():
    assert substitute((0, 1, 2), 2, 0) == (0, 0, 2)
    assert substitute((0,), 1, 1) == (1,)
    seq = (2, 1, 0)
    assert substitute(seq, 2, seq[1]) == seq
    with pytest.raises(InstanceError):
        substitute((0, 1), 3, 0)
    with pytest.raises(InstanceError):
        substitute((0, 1), 0, 0)


# ---------------------------------------------------------------------------
# consistent lists


def test_consistent_lists_card_position4(card):
    pair = SequencePair((0, 1, 2, 1, 2, 0), (1, 0, 0, 2, 1, 2))
    cl = consistent_lists(card.table, pair, 4)
    assert cl.pinned[0] == TypeVector(6, (4, 2))
    assert cl.pinned[1] is None  # (x_4, 1) = (1, 1) is outside the support
    assert cl.pinned[2] == TypeVector(6, (3, 3))
    assert cl.free_indices == (1,)
    members = list(cl.iterate())
    assert len(members) == count_types(6, 2) == 7
    assert all(cl.contains(m) for m in members)
    outside = ListOfTypes(
        (TypeVector(6, (5, 1)), TypeVector(6, (3, 3)), TypeVector(6, (3, 3)))
    )
    assert not cl.contains(outside)


def test_consistent_lists_full_support_all_pinned(identity2):
    pair = SequencePair((0, 1, 0), (1, 0, 0))
    for i in (1, 2, 3):
        cl = consistent_lists(identity2.table, pair, i)
        assert cl.free_indices == ()
        assert len(list(cl.iterate())) == 1


def test_consistent_lists_single_support_column():
    import json

    from fct.model import parse_instance

    inst = parse_instance(
        json.dumps(
            {
                "x_size": 2,
                "y_size": 3,
                "v_labels": ["0", "1"],
                "function": [[0, None, None], [1, 0, 1]],
                "distribution": [
                    ["1/4", "0", "0"],
                    ["1/4", "1/4", "1/4"],
                ],
            }
        )
    )
    pair = SequencePair((0, 1), (0, 1))
    cl = consistent_lists(inst.table, pair, 1)
    assert cl.free_indices == (1, 2)  # |Y| - 1 free entries
    assert len(cl.free_indices) == inst.table.y_size - 1


# ---------------------------------------------------------------------------
# representative reconstruction


def test_reconstruct_representative_examples():
    part = Partition((0, 1, 1))
    marg = TypeVector(3, (1, 1, 1))
    assert reconstruct_representative(part, (0, 1, 1), marg) == (0, 1, 2)

    whole = Partition((0, 0))
    assert reconstruct_representative(whole, (0, 0, 0), TypeVector(3, (2, 1))) == (0, 0, 1)

    singles = Partition((0, 1, 2))
    blocks = (2, 0, 1)
    marg = TypeVector(3, (1, 1, 1))
    assert reconstruct_representative(singles, blocks, marg) == (2, 0, 1)

    with pytest.raises(InstanceError, match="block 0"):
        reconstruct_representative(part, (0, 0, 1), TypeVector(3, (1, 1, 1)))


def test_reconstruct_preserves_blocks_and_type(table_one):
    from fct.partitions import FunctionFamily, induced_partition

    fam = FunctionFamily("type", table_one.table)
    part = induced_partition(fam)
    rng_pairs = [
        ((0, 4, 1, 2), (0, 1, 2, 0)),
        ((3, 3, 0, 4), (2, 2, 1, 0)),
        ((1, 2, 2, 1), (0, 0, 1, 2)),
    ]
    for x_seq, y_seq in rng_pairs:
        blocks = tuple(part.block_of[x] for x in x_seq)
        marg = TypeVector.from_sequence(x_seq, table_one.table.x_size)
        rebuilt = reconstruct_representative(part, blocks, marg)
        assert tuple(part.block_of[x] for x in rebuilt) == blocks
        assert TypeVector.from_sequence(rebuilt, table_one.table.x_size) == marg
        # permutation-invariance of the type family then gives equal values
        pair, rebuilt_pair = SequencePair(x_seq, y_seq), SequencePair(rebuilt, y_seq)
        assert type_function(table_one.table, rebuilt_pair) == type_function(
            table_one.table, pair
        )


# ---------------------------------------------------------------------------
# marginal-type reconstruction


def test_unique_joint_type_without_loops(table_two):
    t = table_two.table
    # column 1 meets only row 0, so its count is pinned by the y-marginal
    for x_counts, y_counts in [
        ((3, 3), (2, 2, 2)),
        ((2, 4), (3, 1, 2)),
        ((4, 2), (1, 3, 2)),
    ]:
        n = sum(x_counts)
        px = TypeVector(n, x_counts)
        py = TypeVector(n, y_counts)
        joints = [
            j
            for j in joint_types_by_sequences(t, range(2), range(3), n)
            if j.marginal_x() == px and j.marginal_y() == py
        ]
        if not joints:
            with pytest.raises(InfeasibleError):
                type_from_marginals(t, range(2), range(3), px, py)
            continue
        assert len(joints) == 1  # no simple loop, so the joint type is pinned
        assert joints[0].counts[0][1] == y_counts[1]
        assert type_from_marginals(t, range(2), range(3), px, py) == joints[0].value_type(t)


def test_infeasible_marginals(table_two):
    px = TypeVector(6, (1, 5))
    py = TypeVector(6, (0, 3, 3))  # column 1 needs 3 from row 0, which has 1
    with pytest.raises(InfeasibleError):
        type_from_marginals(table_two.table, range(2), range(3), px, py)


def test_balanced_loop_still_determines_value_type(table_three):
    t = table_three.table
    px = TypeVector(6, (2, 2, 2))
    joints = [
        j
        for j in joint_types_by_sequences(t, range(3), range(3), 6)
        if j.marginal_x() == px and j.marginal_y() == px
    ]
    assert len(joints) == 3  # one unknown loop offset, three feasible grids
    value_types = {j.value_type(t).counts for j in joints}
    assert value_types == {(2, 2, 2)}  # labels "1","2","3" two wins each
    assert type_from_marginals(t, range(3), range(3), px, px).counts == (2, 2, 2)


def test_card_triple_is_ambiguous(card):
    px = TypeVector(6, (2, 2, 2))
    with pytest.raises(AmbiguityError) as exc:
        type_from_marginals(card.table, range(3), range(3), px, px)
    err = exc.value
    assert err.type_a != err.type_b
    for joint, vt in ((err.joint_a, err.type_a), (err.joint_b, err.type_b)):
        assert joint.marginal_x() == px and joint.marginal_y() == px
        assert joint.value_type(card.table) == vt


def test_joint_enumeration_matches_sequence_oracle(card, table_three):
    for inst, n in ((card, 3), (table_three, 4)):
        t = inst.table
        mine = set(enumerate_joint_types(t, range(t.x_size), range(t.y_size), n))
        oracle = joint_types_by_sequences(t, range(t.x_size), range(t.y_size), n)
        assert mine == oracle


def test_joint_budget_guards(card):
    px = TypeVector(13, (5, 4, 4))
    with pytest.raises(BudgetError):
        type_from_marginals(card.table, range(3), range(3), px, px)


# ---------------------------------------------------------------------------
# loop-cancellation transport


def test_transport_identity_is_empty(table_three):
    joints = list(enumerate_joint_types(table_three.table, range(3), range(3), 4))
    assert loop_cancellation_transport(table_three.table, joints[0], joints[0]) == []


def test_transport_between_loop_offsets(table_three):
    t = table_three.table
    px = TypeVector(6, (2, 2, 2))
    joints = sorted(
        (
            j
            for j in enumerate_joint_types(t, range(3), range(3), 6)
            if j.marginal_x() == px and j.marginal_y() == px
        ),
        key=lambda j: j.counts,
    )
    assert len(joints) == 3
    moves = loop_cancellation_transport(t, joints[0], joints[1])
    assert len(moves) == 1
    assert len(moves[0].cells) == 6  # the single length-6 loop
    current = joints[0]
    for mv in moves:
        current = apply_loop_move(current, mv)
    assert current == joints[1]


def test_transport_card_ambiguous_pair(card):
    px = TypeVector(6, (2, 2, 2))
    with pytest.raises(AmbiguityError) as exc:
        type_from_marginals(card.table, range(3), range(3), px, px)
    j1, j2 = exc.value.joint_a, exc.value.joint_b
    moves = loop_cancellation_transport(card.table, j1, j2)
    current = j1
    for mv in moves:
        current = apply_loop_move(current, mv)
    assert current == j2
    assert all(len(mv.cells) == 6 for mv in moves)


def test_transport_random_pairs_preserve_marginals(card, table_three, table_four):
    for inst, n in ((card, 4), (table_three, 5), (table_four, 4)):
        t = inst.table
        joints = list(enumerate_joint_types(t, range(t.x_size), range(t.y_size), n))
        by_marg = {}
        for j in joints:
            by_marg.setdefault((j.marginal_x(), j.marginal_y()), []).append(j)
        solvable_support = inst.name != "card"
        checked = 0
        for group in by_marg.values():
            if len(group) < 2:
                continue
            p1, p2 = group[0], group[-1]
            moves = loop_cancellation_transport(t, p1, p2)
            current = p1
            for mv in moves:
                from fct.solvability import SimpleLoop

                SimpleLoop.from_cycle(mv.cells)  # structurally a simple loop
                assert all(t.defined(a, b) for a, b in mv.cells)
                nxt = apply_loop_move(current, mv)
                assert nxt.marginal_x() == current.marginal_x()
                assert nxt.marginal_y() == current.marginal_y()
                if solvable_support:
                    assert nxt.value_type(t) == current.value_type(t)
                current = nxt
            assert current == p2
            checked += 1
        assert checked > 0


def make_pair_from_delta(delta, base=2):
    """Two joint grids over a full-support table whose difference is delta."""
    x, y = len(delta), len(delta[0])
    table = full_support_table(x, y)
    n = base * x * y
    p2 = [[base] * y for _ in range(x)]
    p1 = [[base + delta[i][j] for j in range(y)] for i in range(x)]
    assert sum(map(sum, p1)) == n
    return (
        table,
        JointType(n, tuple(tuple(r) for r in p1)),
        JointType(n, tuple(tuple(r) for r in p2)),
    )


def full_support_table(x, y):
    from fct.model import FunctionTable

    return FunctionTable(
        x, y, tuple(str(v) for v in range(x * y)),
        tuple(tuple(i * y + j for j in range(y)) for i in range(x)),
    )


def test_transport_closes_at_repeated_column():
    # the walk reaches a row whose only deficits sit at a visited non-start
    # column, forcing the subloop extraction branch
    delta = [[1, -1, 0], [-1, 2, -1], [0, -1, 1]]
    table, p1, p2 = make_pair_from_delta(delta)
    moves = loop_cancellation_transport(table, p1, p2)
    assert len(moves) == 2
    assert set(moves[0].cells) == {(1, 1), (1, 2), (2, 2), (2, 1)}
    current = p1
    for mv in moves:
        current = apply_loop_move(current, mv)
    assert current == p2


def test_transport_closes_at_repeated_row():
    # the freshly picked column has its only surplus at a visited non-start
    # row, forcing the rotated subloop branch
    delta = [[1, -1, 0, 0], [0, 1, -2, 1], [-1, 0, 2, -1]]
    table, p1, p2 = make_pair_from_delta(delta)
    moves = loop_cancellation_transport(table, p1, p2)
    assert set(moves[0].cells) == {(1, 3), (1, 2), (2, 2), (2, 3)}
    current = p1
    for mv in moves:
        current = apply_loop_move(current, mv)
    assert current == p2


def test_transport_rejects_marginal_mismatch(table_three):
    joints = list(enumerate_joint_types(table_three.table, range(3), range(3), 3))
    j1 = joints[0]
    j2 = next(j for j in joints if j.marginal_x() != j1.marginal_x())
    with pytest.raises(InstanceError, match="marginal"):
        loop_cancellation_transport(table_three.table, j1, j2)


# ---------------------------------------------------------------------------
# quantised decoding


def test_decode_single_edge_reduces_to_marginal_reconstruction(table_three):
    t = table_three.table
    px = TypeVector(6, (2, 2, 2))
    edges = (frozenset({0, 1, 2}),)
    decoded = decode_type_from_quantization(
        t, edges, TypeVector(6, (6,)), {0: px}, {0: px}
    )
    assert decoded == type_from_marginals(t, range(3), range(3), px, px)


def test_decode_card_hand_built_sequence(card):
    t = card.table
    x_seq = (0, 1, 2, 1, 2, 0)
    y_seq = (1, 0, 0, 2, 1, 2)
    edges = (frozenset({0, 1}), frozenset({0, 2}), frozenset({1, 2}))
    w_seq = (0, 0, 2, 0, 1, 1)  # w_i contains x_i throughout
    n_w = [0, 0, 0]
    for w in w_seq:
        n_w[w] += 1
    qw = TypeVector(6, tuple(n_w))
    qx, qy = {}, {}
    for w in range(3):
        xs = [x_seq[k] for k in range(6) if w_seq[k] == w]
        ys = [y_seq[k] for k in range(6) if w_seq[k] == w]
        qx[w] = TypeVector.from_sequence(xs, t.x_size)
        qy[w] = TypeVector.from_sequence(ys, t.y_size)
    decoded = decode_type_from_quantization(t, edges, qw, qx, qy)
    assert decoded == type_function(t, SequencePair(x_seq, y_seq))


def test_decode_propagates_ambiguity(card):
    edges = (frozenset({0, 1, 2}),)
    px = TypeVector(6, (2, 2, 2))
    with pytest.raises(AmbiguityError):
        decode_type_from_quantization(
            card.table, edges, TypeVector(6, (6,)), {0: px}, {0: px}
        )


def test_decode_validates_conditionals(card):
    edges = (frozenset({0, 1}),)
    qx = TypeVector(2, (0, 1, 1))  # mass on 2, which is outside the edge
    qy = TypeVector(2, (1, 1, 0))
    with pytest.raises(InstanceError, match="leaves the edge"):
        decode_type_from_quantization(card.table, edges, TypeVector(2, (2,)), {0: qx}, {0: qy})


# ---------------------------------------------------------------------------
# properties


@settings(max_examples=30, deadline=None)
@given(data=st.data())
def test_type_function_permutation_invariant(card, data):
    n = data.draw(st.integers(1, 5))
    cells = sorted(card.table.support)
    combo = data.draw(st.lists(st.sampled_from(cells), min_size=n, max_size=n))
    perm = data.draw(st.permutations(range(n)))
    x_seq = tuple(c[0] for c in combo)
    y_seq = tuple(c[1] for c in combo)
    px_seq = tuple(x_seq[p] for p in perm)
    py_seq = tuple(y_seq[p] for p in perm)
    assert type_function(card.table, SequencePair(x_seq, y_seq)) == type_function(
        card.table, SequencePair(px_seq, py_seq)
    )


def test_iter_types_exhaustive():
    types = list(iter_types(4, 3))
    assert len(types) == count_types(4, 3) == 15
    assert len(set(types)) == 15
    assert all(t.n == 4 for t in types)
