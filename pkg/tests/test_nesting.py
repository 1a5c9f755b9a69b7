import random

import pytest

from lhf.core import BINARY_KINDS, LatticeHashForest, OpKind, ValidationError
from lhf.nesting import NestedLHF, NestingRules, construction, logical_size
from oracles import nested_op, random_nested, scalar_op


def put(lhf: NestedLHF, mapping: dict) -> int:
    """Register {key: (frozenset, ...)} through the child LHFs."""
    elems = {}
    for k, vals in mapping.items():
        elems[k] = tuple(c.register(sorted(v)) for c, v in zip(lhf.children, vals))
    return lhf.register_map(elems)


def get(lhf: NestedLHF, idx: int) -> dict:
    return {
        k: tuple(frozenset(c.access_or_recompute(v)) for c, v in zip(lhf.children, vals))
        for k, vals in lhf.access_or_recompute(idx)
    }


@pytest.fixture
def pointsto():
    pointees = LatticeHashForest()
    assert pointees.register([3, 4, 5]) == 1
    assert pointees.register([4, 5, 6]) == 2
    return pointees, NestedLHF([pointees])


def test_natural_nesting_union_example(pointsto):
    pointees, pts = pointsto
    a = pts.register([(2, 1), (3, 1), (4, 2)])
    b = pts.register([(4, 1), (5, 1)])
    c = pts.set_union(a, b)
    assert pts.resolve(c) == ((2, (1,)), (3, (1,)), (4, (3,)), (5, (1,)))
    assert pointees.resolve(3) == (3, 4, 5, 6)
    assert pointees.set_union(1, 2) == 3
    assert pts.value_of(c, 4) == (3,)


def test_keys_of(pointsto):
    _, pts = pointsto
    a = pts.register([(2, 1), (3, 1), (4, 2)])
    assert pts.keys_of(a) == (2, 3, 4)
    assert pts.keys_of(0) == ()
    assert pts.value_of(0, 2) is None


def test_both_empty(pointsto):
    _, pts = pointsto
    for kind in BINARY_KINDS:
        assert pts.operate(kind, 0, 0) == 0


def test_strong_update_example():
    pointees = LatticeHashForest()
    q1, q23, q4 = (pointees.register(s) for s in (["q1"], ["q2", "q3"], ["q4"]))
    pts = NestedLHF([pointees])
    before = pts.register([("a", q1), ("b", q23)])
    after = pts.set_key_value(before, "b", q4)
    assert pts.resolve(after) == (("a", (q1,)), ("b", (q4,)))
    assert pts.set_key_value(0, "z", q1) == pts.register([("z", q1)])
    # writing the value already there is a no-op
    assert pts.set_key_value(after, "b", q4) == after
    # the empty pointee set kills the pointer
    assert pts.set_key_value(after, "b", 0) == pts.register([("a", q1)])


def test_remove_key(pointsto):
    _, pts = pointsto
    a = pts.register([(2, 1), (3, 2)])
    assert pts.remove_key(0, 2) == 0
    r = pts.remove_key(a, 2)
    assert pts.value_of(r, 2) is None
    assert pts.remove_key(a, 9) == a
    assert pts.is_subset(r, a)


def test_register_validation(pointsto):
    _, pts = pointsto
    with pytest.raises(ValidationError):
        pts.register([(3, 1), (2, 1)])
    with pytest.raises(ValidationError):
        pts.register([(2, 1), (2, 2)])
    with pytest.raises(ValidationError):
        pts.register([(2, (1, 2))])
    with pytest.raises(ValidationError):
        pts.register([(2, 0)])
    literal = NestedLHF([LatticeHashForest()], drop_all_empty=False)
    assert literal.register([(2, 0)]) == 1


def test_insert_element_not_available(pointsto):
    _, pts = pointsto
    with pytest.raises(TypeError):
        pts.insert_element(0, (1, (1,)))


@pytest.mark.parametrize("arity", [1, 2])
@pytest.mark.parametrize("drop", [True, False])
def test_matches_flattening_oracle(arity, drop):
    rng = random.Random(arity * 10 + drop)
    children = [LatticeHashForest() for _ in range(arity)]
    lhf = NestedLHF(children, drop_all_empty=drop)
    pool = [put(lhf, random_nested(rng, arity)) for _ in range(40)]
    for _ in range(300):
        kind = rng.choice(BINARY_KINDS)
        a, b = rng.choice(pool), rng.choice(pool)
        c = lhf.operate(kind, a, b)
        assert get(lhf, c) == nested_op(kind, get(lhf, a), get(lhf, b), arity, drop)
        pool.append(c)


def test_key_level_consistency():
    rng = random.Random(4)
    child = LatticeHashForest()
    lhf = NestedLHF([child])
    pool = [put(lhf, random_nested(rng, max_keys=20, max_elems=6, key_space=30, value_space=12)) for _ in range(40)]
    for _ in range(500):
        kind = rng.choice(BINARY_KINDS)
        a, b = rng.choice(pool), rng.choice(pool)
        c = lhf.operate(kind, a, b)
        keys = set(scalar_op(kind, lhf.keys_of(a), lhf.keys_of(b)))
        if kind is OpKind.DIFFERENCE:
            dropped = {k for k in set(lhf.keys_of(a)) & set(lhf.keys_of(b))
                       if child.set_difference(lhf.value_of(a, k)[0], lhf.value_of(b, k)[0]) == 0}
            keys |= set(lhf.keys_of(a)) & set(lhf.keys_of(b))
            keys -= dropped
        elif kind is OpKind.INTERSECTION:
            keys = {k for k in keys
                    if child.set_intersection(lhf.value_of(a, k)[0], lhf.value_of(b, k)[0]) != 0}
        assert set(lhf.keys_of(c)) == keys


def test_repeat_does_no_child_work():
    rng = random.Random(8)
    child = LatticeHashForest()
    lhf = NestedLHF([child])
    a = put(lhf, random_nested(rng))
    b = put(lhf, random_nested(rng))
    c = lhf.set_union(a, b)
    before = child.stats()
    assert lhf.set_union(a, b) == c
    assert lhf.set_union(b, a) == c
    assert child.stats() == before
    assert lhf.stats()[OpKind.UNION].hits == 2


def test_shared_child_stored_once():
    child = LatticeHashForest()
    lhf = NestedLHF([child])
    c = child.register([3, 4, 5])
    x = lhf.register([(2, c), (3, c)])
    assert child.count() == 2
    (_, v2), (_, v3) = lhf.resolve(x)
    assert v2 == v3 == (c,)
    assert child.stored_elements() == 3


def test_three_levels():
    leaf = LatticeHashForest()
    mid = NestedLHF([leaf])
    top = NestedLHF([mid])
    m1 = mid.register([(1, leaf.register([1]))])
    m2 = mid.register([(1, leaf.register([2])), (2, leaf.register([3]))])
    t1 = top.register([(7, m1)])
    t2 = top.register([(7, m2)])
    u = top.set_union(t1, t2)
    (k, (m,)), = top.resolve(u)
    assert k == 7
    assert [(kk, leaf.resolve(v[0])) for kk, v in mid.resolve(m)] == [(1, (1, 2)), (2, (3,))]
    assert construction(top) == [leaf, mid, top]
    assert logical_size(top) > 0


def test_subset_map_and_memo_sound():
    rng = random.Random(15)
    child = LatticeHashForest()
    lhf = NestedLHF([child])
    pool = [put(lhf, random_nested(rng, max_keys=8, max_elems=5, key_space=10, value_space=8)) for _ in range(30)]
    for _ in range(1000):
        kind = rng.choice(BINARY_KINDS)
        pool.append(lhf.operate(kind, rng.choice(pool), rng.choice(pool)))
    for s, t in lhf.subset_pairs():
        gs, gt = get(lhf, s), get(lhf, t)
        assert set(gs) <= set(gt)
        assert all(gs[k][0] <= gt[k][0] for k in gs)
    for kind, (a, b), r in lhf.memo_edges():
        assert get(lhf, r) == nested_op(kind, get(lhf, a), get(lhf, b), 1)
    assert lhf.stats()[OpKind.UNION].subset_hits + lhf.stats()[OpKind.INTERSECTION].subset_hits > 0


def test_nested_eviction_recompute(pointsto):
    _, pts = pointsto
    a = pts.register([(2, 1), (3, 1), (4, 2)])
    b = pts.register([(4, 1), (5, 1)])
    c = pts.set_union(a, b)
    d = pts.set_key_value(c, 9, 2)
    snapshot = pts.resolve(d)
    pts.evict(c)
    pts.evict(d)
    assert pts.access_or_recompute(d) == snapshot


def test_custom_rules_override_on_union():
    # "right wins": common keys take the right operand's children
    rules = NestingRules(
        left_survives=frozenset({OpKind.UNION}),
        right_survives=frozenset({OpKind.UNION}),
        commutative=frozenset(),
        combine=lambda lhf, kind, va, vb: vb,
    )
    child = LatticeHashForest()
    lhf = NestedLHF([child], rules=rules)
    one, two = child.register([1]), child.register([2])
    a = lhf.register([(1, one), (2, one)])
    b = lhf.register([(2, two), (3, two)])
    assert lhf.resolve(lhf.set_union(a, b)) == ((1, (one,)), (2, (two,)), (3, (two,)))
    assert lhf.resolve(lhf.set_union(b, a)) == ((1, (one,)), (2, (one,)), (3, (two,)))
    assert lhf.set_union(a, b) != lhf.set_union(b, a)
    assert lhf.stats()[OpKind.UNION].hits == 2
    assert child.stats()[OpKind.UNION].invocations == 0
