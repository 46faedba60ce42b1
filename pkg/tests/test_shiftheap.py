import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rowlegal.shiftheap import NodePool, ShiftHeap


def pop_all(h):
    out = []
    while h:
        out.append(h.pop_max()[0])
    return out


def test_new_is_empty():
    h = ShiftHeap()
    assert len(h) == 0
    with pytest.raises(IndexError):
        h.peek_max()
    with pytest.raises(IndexError):
        h.pop_max()


def test_offset_applies_only_to_prior_content():
    h = ShiftHeap().add_offset(5).push(1)
    assert h.peek_max()[0] == 1


def test_push_peek():
    h = ShiftHeap()
    for k in (3, 1, 4):
        h.push(k)
    assert h.peek_max()[0] == 4


def test_equal_keys():
    h = ShiftHeap().push(2, 0).push(2, 1)
    a, b = h.pop_max(), h.pop_max()
    assert (a[0], b[0]) == (2, 2)
    assert {a[1], b[1]} == {0, 1}


def test_pop_order():
    h = ShiftHeap().push(3).push(1).push(4)
    assert pop_all(h) == [4, 3, 1]


def test_offset_then_pop():
    h = ShiftHeap().push(3).push(1).add_offset(-2)
    assert pop_all(h) == [1, -1]


def test_offset_zero_identity():
    h = ShiftHeap().push(3).push(1).add_offset(0)
    assert sorted(k for k, _ in h.items()) == [1, 3]


def test_merge_two():
    pool = NodePool()
    a, b = ShiftHeap(pool).push(5), ShiftHeap(pool).push(7)
    a.merge(b)
    assert a.peek_max()[0] == 7 and len(a) == 2 and len(b) == 0


def test_merge_with_empty():
    h = ShiftHeap().push(3).push(1)
    h.merge(ShiftHeap())
    assert pop_all(h) == [3, 1]


def test_merge_across_pools():
    a, b = ShiftHeap().push(1), ShiftHeap().push(2).push(0).add_offset(1)
    a.merge(b)
    a.check_invariants()
    assert pop_all(a) == [3, 1, 1]


def test_payloads_survive_merges():
    pool = NodePool()
    a, b = ShiftHeap(pool), ShiftHeap(pool)
    for i in range(10):
        a.push(i, i)
        b.push(i + 0.5, 100 + i)
    b.add_offset(-0.5)
    a.merge(b)
    assert sorted(p for _, p in a.items()) == sorted(list(range(10)) + list(range(100, 110)))


def test_pool_growth():
    h = ShiftHeap(NodePool(1))
    for i in range(1000):
        h.push(float(i))
    h.check_invariants()
    assert h.peek_max()[0] == 999


def test_random_pushes_sorted():
    # dyadic keys: every key difference is exact, so the pops are too
    rng = random.Random(0)
    keys = [rng.randint(-8000, 8000) / 8 for _ in range(10_000)]
    h = ShiftHeap()
    for k in keys:
        h.push(k)
    h.check_invariants()
    assert pop_all(h) == sorted(keys, reverse=True)


def test_random_float_keys_within_rounding():
    rng = random.Random(2)
    keys = [rng.uniform(-1e3, 1e3) for _ in range(10_000)]
    h = ShiftHeap()
    for k in keys:
        h.push(k)
    assert pop_all(h) == pytest.approx(sorted(keys, reverse=True), rel=0, abs=1e-9)


def test_merge_large_random():
    rng = random.Random(1)
    pool = NodePool()
    a, b = ShiftHeap(pool), ShiftHeap(pool)
    ka = [rng.randint(-50, 50) for _ in range(1000)]
    kb = [rng.randint(-50, 50) for _ in range(1000)]
    for k in ka:
        a.push(k)
    for k in kb:
        b.push(k)
    a.merge(b)
    a.check_invariants()
    assert pop_all(a) == sorted(ka + kb, reverse=True)


ops = st.lists(st.tuples(st.sampled_from("push pop offset merge swap".split()),
                         st.integers(-100, 100)), max_size=200)


@given(ops)
def test_matches_naive_reference(trace):
    pool = NodePool(2)
    heaps = [ShiftHeap(pool), ShiftHeap(pool)]
    refs = [[], []]
    cur = 0
    for op, v in trace:
        h, ref = heaps[cur], refs[cur]
        if op == "push":
            h.push(v / 4)
            ref.append(v / 4)
        elif op == "pop" and ref:
            key, _ = h.pop_max()
            ref.remove(max(ref))
            assert key == pytest.approx(max([key] + ref), abs=1e-9)
        elif op == "offset":
            h.add_offset(v / 8)
            ref[:] = [k + v / 8 for k in ref]
        elif op == "merge":
            h.merge(heaps[1 - cur])
            ref.extend(refs[1 - cur])
            refs[1 - cur].clear()
        elif op == "swap":
            cur = 1 - cur
    for h, ref in zip(heaps, refs):
        h.check_invariants()
        assert pop_all(h) == pytest.approx(sorted(ref, reverse=True), abs=1e-9)
