import pytest
from hypothesis import given, settings, strategies as st

from mpcsp.genealogy import (GenealogyError, ObjectPool, ObjectState, Origin, PURCHASABLE, RIGHT, TOP, UsageTracker,
                             children_dims, dump_genealogy, first_order_keys, initial_pool, leftover_generator_indices,
                             log2_bits, object_counts, purchasable_pool, record_item_usage, slot_layout, spawn_pool,
                             utilization_fractions)
from mpcsp.instance import OrderedItem
from mpcsp.plan import ObjectCut, PeriodDecision, Placement


def simulated_counts(m, xi):
    """Independent count: replay expirations slot by slot, nothing is cut."""
    pool = [xi] * m[0]
    hats, bars = [], [len(pool)]
    for s in range(len(m)):
        gens = [e for e in pool if e > 0]
        hats.append(len(gens))
        nxt = m[s + 1] if s + 1 < len(m) else 0
        pool = [xi] * nxt + [e - 1 for e in gens for _ in range(2)]
        bars.append(len(pool))
    return hats, bars


@pytest.mark.parametrize("m, xi, hat, bar", [
    ([2, 2, 2], 3, [2, 6, 14], [2, 6, 14, 28]),
    ([3, 1, 1, 2], 1, [3, 1, 1, 2], [3, 7, 3, 4, 4]),
    ([3, 2, 2, 1], 1, [3, 2, 2, 1], [3, 8, 6, 5, 2]),
    ([4, 1, 3], 0, [0, 0, 0], [4, 1, 3, 0]),
    ([1, 1, 1, 1], 2, [1, 3, 3, 3], [1, 3, 7, 7, 6]),
])
def test_object_counts_frozen(m, xi, hat, bar):
    assert simulated_counts(m, xi) == (hat, bar)
    assert object_counts(m, 0, len(m), xi) == (hat, bar)


@given(st.lists(st.integers(0, 4), min_size=1, max_size=5), st.data())
@settings(max_examples=200, deadline=None)
def test_object_counts_match_simulation(m, data):
    xi = data.draw(st.integers(0, len(m)))
    assert object_counts(m, 2, 2 + len(m), xi) == simulated_counts(m, xi)


def test_object_counts_errors():
    with pytest.raises(ValueError, match="xi out of range"):
        object_counts([1, 1], 0, 2, 3)
    with pytest.raises(ValueError):
        object_counts([1], 0, 2, 1)


def test_layout_lengths_match_counts(inst1, toy1):
    for inst in (inst1, toy1):
        _, bar = object_counts(inst.m, inst.p, inst.P, inst.xi)
        assert [len(pool) for pool in slot_layout(inst)] == bar


def _pool(exps):
    return ObjectPool(0, tuple(ObjectState(5, 5, 1, e, Origin(PURCHASABLE)) for e in exps), len(exps))


def test_generator_indices_simple():
    assert leftover_generator_indices(_pool([2, 2, 2, 2])) == [0, 1, 2, 3]
    assert leftover_generator_indices(_pool([0, 0, 0])) == []
    assert leftover_generator_indices(_pool([0, 1, 0, 3])) == [1, 3]


def test_toy1_generators_at_instant_1(toy1):
    pool = slot_layout(toy1)[1]
    assert [o.expiration for o in pool.objects] == [3, 3, 2, 2, 2, 2]
    assert leftover_generator_indices(pool) == list(range(6))


@pytest.mark.parametrize("eta, top, right", [(1, (19, 6), (2, 17)), (0, (21, 6), (2, 11))])
def test_children_dims(eta, top, right):
    assert children_dims(21, 17, ObjectCut(eta, 6, 2)) == (top, right)


def _toy2_chain(toy2):
    """O_02 (19x19) cut at instant 0 leaving 19x8 on top; a 7x6 item is cut
    from that leftover at instant 1 and two 6x5 items from its right child
    at instant 2."""
    pools = [initial_pool(toy2)]
    tr = UsageTracker()
    d0 = PeriodDecision(0, {1: ObjectCut(1, 8, 0)}, [Placement(0, 1, 9.5, 5.5)])
    d1 = PeriodDecision(1, {3: ObjectCut(1, 2, 12)}, [Placement(0, 3, 3.5, 3.0)])
    d2 = PeriodDecision(2, {8: ObjectCut(1, 0, 0)}, [Placement(0, 8, 3.0, 2.5), Placement(1, 8, 9.0, 2.5)])
    for dec in (d0, d1, d2):
        pool = pools[-1]
        s = pool.instant
        nxt = spawn_pool(pool, dec, purchasable_pool(toy2, s + 1) if s + 1 < toy2.P else [])
        tr.register_children(nxt, toy2.catalogue)
        for pl in dec.placements:
            record_item_usage(tr, pool, toy2.items_at(s)[pl.item], pl.obj)
        pools.append(nxt)
    return pools, tr


def test_spawn_after_cut(toy2):
    pools, _ = _toy2_chain(toy2)
    p1 = pools[1]
    assert p1.m == 1 and len(p1) == 7
    # unused purchasables leave zero-size children; r = 0 leaves a 0-wide strip
    assert [(o.width, o.height) for o in p1.objects[1:]] == [(0, 0), (0, 0), (19, 8), (0, 19), (0, 0), (0, 0)]
    assert p1[4].is_empty
    top = p1[3]
    assert top.origin == Origin(TOP, (0, 1)) and top.expiration == 2 and top.ancestor == (1, 3)
    assert p1[4].origin.kind == RIGHT


def test_unused_leftover_survives(toy2):
    pool1 = spawn_pool(initial_pool(toy2), PeriodDecision(0, {1: ObjectCut(1, 8, 0)}, [Placement(0, 1, 9.5, 5.5)]),
                       purchasable_pool(toy2, 1))
    pool2 = spawn_pool(pool1, PeriodDecision(1), purchasable_pool(toy2, 2))
    # slot 3 is the 4th generator at instant 1 -> children at 1 + 2*3 and 1 + 2*3 + 1
    survivor, empty = pool2[7], pool2[8]
    assert (survivor.width, survivor.height, survivor.expiration) == (19, 8, 1)
    assert (empty.width, empty.height) == (0, 0)
    assert survivor.ancestor == (1, 3)


def test_usage_credited_to_first_order_ancestor(toy2):
    pools, tr = _toy2_chain(toy2)
    assert pools[2][8].ancestor == (1, 3)
    assert tr.used[(1, 3)] == 42 + 2 * 30 == 102
    assert tr.realized[(1, 3)] == 152
    f = utilization_fractions(tr)
    assert f[(1, 3)] == pytest.approx(0.6710526, abs=1e-7)
    # zero-area first-order leftovers carry no information
    assert (1, 4) not in f
    for key, a in tr.used.items():
        assert a <= tr.realized[key] or tr.realized[key] == 0


def test_usage_from_purchasable_is_ignored(toy2):
    tr = UsageTracker()
    pool = initial_pool(toy2)
    record_item_usage(tr, pool, OrderedItem(19, 11), 1)
    assert tr.used == {}


def test_usage_desync_raises(toy2):
    pools, _ = _toy2_chain(toy2)
    with pytest.raises(GenealogyError):
        record_item_usage(UsageTracker(), pools[1], OrderedItem(1, 1), 3)


def test_fractions_examples():
    tr = UsageTracker(used={(1, 1): 0, (1, 2): 314, (1, 3): 0}, realized={(1, 1): 126, (1, 2): 357, (1, 3): 0})
    f = utilization_fractions(tr)
    assert f == {(1, 1): 0.0, (1, 2): pytest.approx(0.8796, abs=1e-4)}


def test_first_order_keys(toy2):
    layout = slot_layout(toy2)
    assert first_order_keys(layout[1]) == [(1, k) for k in range(1, 7)]
    # instant-2 leftovers of instant-1 leftovers are not first order
    assert first_order_keys(layout[2]) == [(2, 1), (2, 2)]


def test_expiration_monotone_along_edges(inst1):
    for pool in slot_layout(inst1)[1:]:
        for o in pool.objects:
            if not o.is_purchasable:
                parent = slot_layout(inst1)[o.origin.parent[0] - inst1.p][o.origin.parent[1]]
                assert o.expiration == parent.expiration - 1 >= 0


def test_dump_genealogy(toy2):
    pools, _ = _toy2_chain(toy2)
    text = dump_genealogy(pools, toy2.catalogue)
    assert "instant 1: 7 slots (1 purchasable)" in text
    assert "[3] 19x8 c=1 e=2 top of (0, 1) ancestor=(1, 3) value=152" in text


def test_spawn_rejects_unknown_index(toy2):
    with pytest.raises(IndexError):
        spawn_pool(initial_pool(toy2), PeriodDecision(0, {9: ObjectCut(1, 0, 0)}, [Placement(0, 9, 1, 1)]), [])


@pytest.mark.parametrize("w, bits", [(1, 1), (2, 2), (3, 2), (24, 5), (31, 5), (32, 6)])
def test_log2_bits(w, bits):
    assert log2_bits(w) == bits
