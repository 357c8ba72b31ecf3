"""Flat structure-of-arrays term store.

Slot ``i`` holds one term: its head symbol ``hss[i]`` and the slot indices of
its arguments ``args[j, i]``.  Index 0 is never used, so an argument entry of
0 means "absent"; the head symbol's declared arity is authoritative.
"""
from __future__ import annotations

import threading
from typing import Dict, List, Optional

import numpy as np

from .terms import App, Signature, Term, Var

INDEX = np.int64


class CapacityExceeded(RuntimeError):
    pass


class DanglingReference(RuntimeError):
    pass


class AtomicCounter:
    """Integer with an atomic fetch-and-add."""

    __slots__ = ("value", "_lock")

    def __init__(self, value: int = 0):
        self.value = value
        self._lock = threading.Lock()

    def fetch_add(self, k: int = 1) -> int:
        with self._lock:
            old = self.value
            self.value = old + k
        return old


class FreeList:
    """Recyclable slot indices; claimed at the front, appended at the end."""

    def __init__(self, capacity: int):
        self.free_indices = np.zeros(capacity, dtype=INDEX)
        self.next_free_begin = AtomicCounter(0)
        self.next_free_end = AtomicCounter(0)
        self.next_fresh = AtomicCounter(0)

    def __len__(self):
        return max(0, self.next_free_end.value - self.next_free_begin.value)

    def window(self) -> np.ndarray:
        b, e = self.next_free_begin.value, self.next_free_end.value
        return self.free_indices[b:e] if b < e else self.free_indices[:0]

    def compact(self):
        """Move the live window to the front.  Quiescent points only."""
        w = self.window().copy()
        self.free_indices[:len(w)] = w
        self.next_free_begin.value = 0
        self.next_free_end.value = len(w)

    def grow(self, capacity: int):
        if capacity > len(self.free_indices):
            new = np.zeros(capacity, dtype=INDEX)
            new[:len(self.free_indices)] = self.free_indices
            self.free_indices = new


class TermStore:
    def __init__(self, signature: Signature, capacity: int = 1024, fixed_capacity: bool = False):
        self.signature = signature
        self.arity = np.array([s.arity for s in signature.symbols] or [0], dtype=INDEX)
        self.max_arity = signature.max_arity
        self.capacity = max(int(capacity), 2)
        self.fixed_capacity = fixed_capacity
        cap = self.capacity
        self.hss = np.zeros(cap, dtype=np.int32)
        self.args = np.zeros((max(self.max_arity, 1), cap), dtype=INDEX)
        self.nf = np.zeros(cap, dtype=bool)
        self.nf_read = np.zeros(cap, dtype=bool)
        self.refcounts = np.zeros(cap, dtype=INDEX)
        self.refcounts_read = np.zeros(cap, dtype=INDEX)
        self.collected = np.zeros(cap, dtype=bool)
        self.cursor = np.zeros(cap, dtype=np.int16)
        self.n = 1
        self.root = 0
        self.free = FreeList(cap)

    # -- capacity -----------------------------------------------------------

    def ensure_capacity(self, needed: int):
        """Grow to hold ``needed`` slots.  Only call between sweeps."""
        if needed <= self.capacity:
            return
        if self.fixed_capacity:
            raise CapacityExceeded(f"store needs {needed} slots but capacity is fixed at {self.capacity}")
        cap = max(needed, 2 * self.capacity)
        for name in ("hss", "nf", "nf_read", "refcounts", "refcounts_read", "collected", "cursor"):
            old = getattr(self, name)
            new = np.zeros(cap, dtype=old.dtype)
            new[:self.capacity] = old
            setattr(self, name, new)
        args = np.zeros((self.args.shape[0], cap), dtype=INDEX)
        args[:, :self.capacity] = self.args
        self.args = args
        self.free.grow(cap)
        self.capacity = cap

    # -- slot allocation ----------------------------------------------------

    def get_new_index(self) -> int:
        """Claim a slot: recycled from the free window if possible, else fresh."""
        free = self.free
        n_begin = free.next_free_begin.value
        n_end = free.next_free_end.value
        new_id = 0
        if n_begin < n_end:
            n_begin = free.next_free_begin.fetch_add(1)
            if n_begin < n_end:
                new_id = int(free.free_indices[n_begin])
        if new_id == 0:
            new_id = free.next_fresh.fetch_add(1) + self.n
            if new_id >= self.capacity:
                raise CapacityExceeded(f"no free slot: capacity {self.capacity} exhausted")
        self.collected[new_id] = False
        self.cursor[new_id] = 0
        return new_id

    def fold_fresh(self):
        fresh = self.free.next_fresh.value
        if fresh > 0:
            self.n += fresh
            self.free.next_fresh.value = 0
        # claims that raced past the end leave begin > end
        if self.free.next_free_begin.value > self.free.next_free_end.value:
            self.free.next_free_begin.value = self.free.next_free_end.value

    # -- queries ------------------------------------------------------------

    def slot_args(self, i: int) -> List[int]:
        return [int(self.args[j, i]) for j in range(self.arity[self.hss[i]])]

    def live_slots(self) -> np.ndarray:
        """Allocated, not yet collected slots."""
        idx = np.arange(1, self.n)
        return idx[~self.collected[1:self.n]]

    def expected_refcounts(self) -> np.ndarray:
        """Reference counts recomputed from scratch: in-degree from uncollected slots plus the root pin."""
        live = self.live_slots()
        counts = np.zeros(self.capacity, dtype=INDEX)
        ar = self.arity[self.hss[live]]
        for j in range(self.max_arity):
            kids = self.args[j, live[ar > j]]
            np.add.at(counts, kids, 1)
        if self.root:
            counts[self.root] += 1
        return counts

    def dump(self) -> str:
        names = [s.name for s in self.signature.symbols]
        lines = []
        for i in self.live_slots():
            i = int(i)
            args = " ".join(map(str, self.slot_args(i))) or "-"
            lines.append(f"{i}  {names[self.hss[i]]}  {args}  {int(self.refcounts[i])}  {int(self.nf[i])}")
        return "\n".join(lines) + "\n"


def load(signature: Signature, t: Term, capacity: Optional[int] = None,
         fixed_capacity: bool = False) -> TermStore:
    """Flatten a ground term into a fresh store.  Shared nodes get one slot."""
    order: List[Term] = []
    slot_of: Dict[int, int] = {}
    stack = [t]
    while stack:
        u = stack.pop()
        if id(u) in slot_of:
            continue
        if isinstance(u, Var):
            raise ValueError("only ground terms can be loaded")
        slot_of[id(u)] = len(order) + 1
        order.append(u)
        stack.extend(reversed(u.args))
    n = len(order) + 1
    if capacity is None:
        capacity = 2 * n
    elif capacity < n:
        if fixed_capacity:
            raise CapacityExceeded(f"term needs {n} slots but capacity is fixed at {capacity}")
        capacity = n
    store = TermStore(signature, capacity, fixed_capacity)
    for i, u in enumerate(order, start=1):
        store.hss[i] = u.sym
        for j, a in enumerate(u.args):
            c = slot_of[id(a)]
            store.args[j, i] = c
            store.refcounts[c] += 1
    store.n = n
    store.root = 1
    store.refcounts[1] += 1
    return store


def extract(store: TermStore) -> Term:
    """Read the term rooted at ``store.root`` back; shared slots stay shared."""
    built: Dict[int, App] = {}
    open_slots = set()
    stack = [(store.root, False)]
    while stack:
        i, visited = stack.pop()
        if i in built:
            continue
        if i <= 0 or i >= store.n or store.collected[i]:
            raise DanglingReference(f"reference to slot {i}, which holds no term")
        kids = store.slot_args(i)
        if not visited:
            if i in open_slots:
                raise DanglingReference(f"slot {i} is reachable from itself")
            open_slots.add(i)
            stack.append((i, True))
            stack.extend((c, False) for c in kids if c not in built)
            continue
        open_slots.discard(i)
        built[i] = App(int(store.hss[i]), tuple(built[c] for c in kids))
    return built[store.root]
