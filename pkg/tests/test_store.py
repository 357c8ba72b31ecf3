import threading

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from termsweep.store import CapacityExceeded, DanglingReference, TermStore, extract, load
from termsweep.sweep import collect_free_indices
from termsweep.terms import format_term, peano, term_equal

from termsweep.parser import load_system

from conftest import PLUS_TRS

PLUS = load_system(PLUS_TRS)


def test_load_constant(plus):
    sig = plus.signature
    s = load(sig, sig.app("Zero"))
    assert s.n == 2 and s.root == 1
    assert sig.symbols[s.hss[1]].name == "Zero"
    assert s.refcounts[1] == 1


def test_load_shared_child(plus):
    sig = plus.signature
    z = sig.app("Zero")
    s = load(sig, sig.app("Plus", z, z))
    assert s.n == 3
    assert s.slot_args(1) == [2, 2]
    assert s.refcounts[2] == 2 and s.refcounts[1] == 1
    np.testing.assert_array_equal(s.expected_refcounts()[:3], s.refcounts[:3])


def test_unshared_children_get_own_slots(plus):
    sig = plus.signature
    s = load(sig, sig.app("Plus", sig.app("Zero"), sig.app("Zero")))
    assert s.n == 4 and s.slot_args(1) == [2, 3]


def nat_terms(sig):
    leaves = st.just(sig.app("Zero"))
    return st.recursive(
        leaves,
        lambda kids: st.one_of(st.builds(lambda a: sig.app("S", a), kids),
                               st.builds(lambda a, b: sig.app("Plus", a, b), kids, kids)),
        max_leaves=30)


@settings(max_examples=150, deadline=None)
@given(st.data())
def test_load_extract_round_trip(data):
    sig = PLUS.signature
    t = data.draw(nat_terms(sig))
    s = load(sig, t)
    assert term_equal(extract(s), t)
    np.testing.assert_array_equal(s.expected_refcounts()[:s.n], s.refcounts[:s.n])


def window_store(plus, free, begin, end, n=20):
    s = TermStore(plus.signature, 64)
    s.n = n
    s.free.free_indices[begin:end] = free
    s.free.next_free_begin.value = begin
    s.free.next_free_end.value = end
    return s


def test_claims_recycled_then_fresh(plus):
    s = window_store(plus, [9, 4], 5, 7)
    assert [s.get_new_index() for _ in range(3)] == [9, 4, 20]
    assert s.free.next_fresh.value == 1


def test_empty_window_claims_fresh(plus):
    s = window_store(plus, [], 0, 0, n=7)
    assert s.get_new_index() == 7
    assert s.get_new_index() == 8
    assert s.free.next_fresh.value == 2
    s.fold_fresh()
    assert s.n == 9 and s.free.next_fresh.value == 0


def test_begin_clamped_after_overrun(plus):
    s = window_store(plus, [3], 0, 1)
    s.get_new_index()
    s.get_new_index()
    s.fold_fresh()
    assert s.free.next_free_begin.value == s.free.next_free_end.value == 1


@pytest.mark.parametrize("threads,window", [(2, 1), (8, 5000)])
def test_concurrent_claims_unique(plus, threads, window):
    claims = 100_000
    s = TermStore(plus.signature, 2 * claims + 16)
    s.n = window + 1
    s.free.free_indices[:window] = np.arange(1, window + 1)
    s.free.next_free_end.value = window
    got = [[] for _ in range(threads)]
    barrier = threading.Barrier(threads)

    def worker(k):
        barrier.wait()
        out = got[k]
        for _ in range(claims // threads):
            out.append(s.get_new_index())

    ts = [threading.Thread(target=worker, args=(k,)) for k in range(threads)]
    for t in ts:
        t.start()
    for t in ts:
        t.join()
    flat = [i for g in got for i in g]
    assert len(flat) == claims
    assert len(set(flat)) == claims
    assert set(range(1, window + 1)) <= set(flat)


def test_gc_cascade(plus):
    sig = plus.signature
    s = load(sig, sig.app("S", sig.app("Plus", sig.app("Zero"), sig.app("Zero"))))
    # slot 1 = S, 2 = Plus, 3 = Zero, 4 = Zero; drop S's reference to Plus
    s.args[0, 1] = 3
    s.refcounts[3] += 1
    s.refcounts[2] -= 1
    assert collect_free_indices(s) == 1
    assert s.collected[2] and not s.collected[3]
    assert s.refcounts[4] == 0 and s.refcounts[3] == 1
    assert collect_free_indices(s) == 1
    assert s.collected[4]
    assert sorted(s.free.window().tolist()) == [2, 4]
    assert collect_free_indices(s) == 0


def test_gc_no_garbage(plus):
    s = load(plus.signature, plus.input_term)
    before = s.refcounts.copy()
    assert collect_free_indices(s) == 0
    assert len(s.free) == 0
    np.testing.assert_array_equal(before, s.refcounts)


def test_root_pin_survives_gc(plus):
    sig = plus.signature
    s = load(sig, sig.app("Zero"))
    collect_free_indices(s)
    assert not s.collected[1]


def test_fixed_capacity(plus):
    sig = plus.signature
    t = peano(sig, 5)
    with pytest.raises(CapacityExceeded):
        load(sig, t, capacity=4, fixed_capacity=True)
    s = load(sig, t, capacity=7, fixed_capacity=True)
    with pytest.raises(CapacityExceeded):
        s.get_new_index()
    with pytest.raises(CapacityExceeded):
        s.ensure_capacity(100)


def test_growth_preserves_content(plus):
    s = load(plus.signature, plus.input_term)
    before = s.dump()
    s.ensure_capacity(5000)
    assert s.capacity >= 5000 and len(s.free.free_indices) >= 5000
    assert s.dump() == before
    assert term_equal(extract(s), plus.input_term)


def test_dump_format(plus):
    sig = plus.signature
    s = load(sig, sig.app("Plus", sig.app("Zero"), peano(sig, 1)))
    assert s.dump() == ("1  Plus  2 3  1  0\n"
                        "2  Zero  -  1  0\n"
                        "3  S  4  1  0\n"
                        "4  Zero  -  1  0\n")


def test_dangling_reference(plus):
    sig = plus.signature
    s = load(sig, sig.app("S", sig.app("Zero")))
    s.args[0, 1] = 9
    with pytest.raises(DanglingReference):
        extract(s)
    s.args[0, 1] = 1
    with pytest.raises(DanglingReference):
        extract(s)
