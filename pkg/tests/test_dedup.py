import random

import pytest
from hypothesis import given, strategies as st

from lhf.dedup import Interner, UnknownIdentifier


def test_first_value_gets_zero():
    it = Interner()
    assert it.intern((1, 2, 3)) == 0


def test_intern_is_idempotent():
    it = Interner()
    a = it.intern(("x",))
    it.intern(("y",))
    assert it.intern(("x",)) == a
    assert it.count() == 2


def test_dense_ids_in_insertion_order():
    rng = random.Random(7)
    values = set()
    while len(values) < 1000:
        values.add(tuple(sorted(rng.sample(range(500), rng.randint(0, 8)))))
    values = list(values)
    it = Interner()
    ids = [it.intern(v) for v in values]
    assert ids == list(range(1000))


def test_resolve_round_trip_and_range_check():
    it = Interner()
    k = it.intern((1, 2, 3))
    assert it.resolve(k) == (1, 2, 3)
    with pytest.raises(UnknownIdentifier):
        it.resolve(7)
    with pytest.raises(UnknownIdentifier):
        it.resolve(-1)


def test_interleaved_round_trip():
    rng = random.Random(3)
    it = Interner()
    seen = {}
    for _ in range(10_000):
        v = tuple(sorted(rng.sample(range(200), rng.randint(0, 5))))
        seen[it.intern(v)] = v
        probe = rng.choice(list(seen)) if rng.random() < 0.3 else None
        if probe is not None:
            assert it.resolve(probe) == seen[probe]
    for k, v in seen.items():
        assert it.resolve(k) == v


def test_lookup():
    it = Interner()
    assert it.lookup((4,)) is None
    k = it.intern((4,))
    assert it.lookup((4,)) == k


def test_lookup_agrees_with_linear_scan():
    rng = random.Random(11)
    it = Interner()
    for _ in range(1000):
        it.intern(tuple(sorted(rng.sample(range(50), rng.randint(0, 3)))))
    storage = list(it)
    for _ in range(1000):
        v = tuple(sorted(rng.sample(range(50), rng.randint(0, 3))))
        expected = storage.index(v) if v in storage else None
        assert it.lookup(v) == expected


def test_stored_object_is_stable_and_keyed_by_reference():
    it = Interner()
    v = tuple(range(100))
    k = it.intern(v)
    view = it.resolve(k)
    for n in range(100_000):
        it.intern((n, -1))
    assert it.resolve(k) is view
    assert view == tuple(range(100))
    # the reverse map holds the stored object itself, not a second copy
    assert next(key for key in it._reverse if key == v) is view


def test_drop_and_restore():
    it = Interner()
    it.intern(())
    k = it.intern((1,))
    assert it.drop(k) == (1,)
    assert not it.is_present(k)
    assert it.lookup((1,)) is None
    with pytest.raises(UnknownIdentifier):
        it.resolve(k)
    it.restore(k, (1,))
    assert it.lookup((1,)) == k


@given(st.lists(st.frozensets(st.integers(0, 20), max_size=4)))
def test_distinct_values_distinct_ids(values):
    it = Interner()
    ids = {}
    for v in values:
        ids.setdefault(v, it.intern(v))
        assert it.intern(v) == ids[v]
    assert len(set(ids.values())) == len(ids) == it.count()
