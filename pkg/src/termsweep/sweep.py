"""Topology-driven bulk-synchronous rewriting over a :class:`TermStore`.

Every iteration snapshots ``nf``/``refcounts`` into their ``*_read`` twins,
then examines every slot below ``n`` in parallel chunks.  A live slot that is
not in normal form and whose arguments all were in normal form at snapshot
time gets one inner-most rewrite step, in place.  Between sweeps freshly
claimed slots are folded into ``n`` and, if any slot was seen with a zero
reference count, a collection pass recycles garbage slots.

Concurrency contract inside a sweep: a worker writes term content only to
slots in its own chunk or to slots it claimed with ``get_new_index``.
Reference counts are never read during a sweep (decisions use the snapshot),
so their atomic increments and decrements are logged per worker and reduced
at the barrier.
"""
from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .compiler import DispatchTable, NewNode
from .seq import DEFAULT_STEP_BUDGET, StepBudgetExceeded
from .store import INDEX, TermStore

TRACE_HEADER = "sweep,rewrites,live_terms,n,free_len,micros"


@dataclass
class SweepRecord:
    sweep: int
    rewrites: int
    live_terms: int
    n: int
    free_len: int
    micros: int

    def csv(self) -> str:
        return f"{self.sweep},{self.rewrites},{self.live_terms},{self.n},{self.free_len},{self.micros}"


@dataclass
class SweepTrace:
    records: List[SweepRecord] = field(default_factory=list)
    violations: List[str] = field(default_factory=list)

    @property
    def total_rewrites(self) -> int:
        return sum(r.rewrites for r in self.records)

    @property
    def sweeps(self) -> int:
        return len(self.records)

    @property
    def widths(self) -> np.ndarray:
        return np.array([r.rewrites for r in self.records], dtype=INDEX)

    def to_csv(self) -> str:
        return "\n".join([TRACE_HEADER] + [r.csv() for r in self.records]) + "\n"

    def write_csv(self, path):
        with open(path, "w") as f:
            f.write(self.to_csv())


class SweepFlags:
    def __init__(self):
        self.done = True
        self.garbage_collecting = False


class _ChunkResult:
    __slots__ = ("rewrites", "inc", "dec", "clear_done", "saw_garbage", "rewritten", "violations")

    def __init__(self):
        self.rewrites = 0
        self.inc: List[int] = []
        self.dec: List[int] = []
        self.clear_done = False
        self.saw_garbage = False
        self.rewritten: List[int] = []
        self.violations: List[str] = []


def _match(store: TermStore, compiled, slot: int):
    """First matching rule at ``slot``: ``(template, bindings)`` or None."""
    hss = store.hss
    args = store.args
    for c in compiled:
        refs = []
        bindings = [0] * c.program.n_vars
        for is_check, parent, pos, value in c.program._ops:
            r = int(args[pos, slot if parent < 0 else refs[parent]])
            if is_check:
                if hss[r] != value:
                    break
            else:
                bindings[value] = r
            refs.append(r)
        else:
            return c.template, bindings
    return None


def apply_rule_at(store: TermStore, table: DispatchTable, slot: int, out: _ChunkResult) -> bool:
    """Apply the first matching rule at ``slot`` in place; False if none matches."""
    compiled = table.entries[store.hss[slot]]
    m = _match(store, compiled, slot) if compiled else None
    if m is None:
        store.nf[slot] = True
        return False
    template, bindings = m
    args = store.args
    arity = store.arity
    old = [int(args[j, slot]) for j in range(arity[store.hss[slot]])]
    if template.root_ref.is_var:
        # collapse: copy the bound term into this slot; it is already normal
        x = bindings[template.root_ref.index]
        h = store.hss[x]
        k = arity[h]
        store.hss[slot] = h
        for j in range(k):
            c = int(args[j, x])
            args[j, slot] = c
            out.inc.append(c)
        for j in range(k, store.max_arity):
            args[j, slot] = 0
        store.nf[slot] = True
    else:
        built = []
        ins = [i for i in template.instructions if type(i) is NewNode]
        root = ins[-1]
        for node in ins:
            target = slot if node is root else store.get_new_index()
            store.hss[target] = node.symbol
            k = len(node.children)
            for j, ref in enumerate(node.children):
                c = bindings[ref.index] if ref.is_var else built[ref.index]
                args[j, target] = c
                out.inc.append(c)
            for j in range(k, store.max_arity):
                args[j, target] = 0
            store.nf[target] = False
            store.cursor[target] = 0
            built.append(target)
    out.dec.extend(old)
    out.rewrites += 1
    return True


def sweep_derive(store: TermStore, table: DispatchTable, slot: int, flags: SweepFlags,
                 out: _ChunkResult, use_cursor: bool = True):
    """One slot's share of a sweep, reading only the snapshot arrays."""
    if store.refcounts_read[slot] == 0:
        flags.garbage_collecting = True
        out.saw_garbage = True
        return
    if store.nf_read[slot]:
        return
    k = store.arity[store.hss[slot]]
    j = int(store.cursor[slot]) if use_cursor else 0
    while j < k and store.nf_read[store.args[j, slot]]:
        j += 1
    if j == k:
        if apply_rule_at(store, table, slot, out):
            out.rewritten.append(slot)
    elif use_cursor:
        store.cursor[slot] = j
    flags.done = False
    out.clear_done = True


class SweepEngine:
    """Runs the sweep loop.

    ``workers`` threads each take chunks of ``chunk_size`` slots.  With
    ``debug=True`` the store invariants are checked at every quiescent point
    and violations are recorded on the trace.
    """

    def __init__(self, table: DispatchTable, *, workers: int = 1, chunk_size: int = 1024,
                 step_budget: int = DEFAULT_STEP_BUDGET, use_cursor: bool = True,
                 vectorized: bool = True, debug: bool = False):
        if workers in (None, 0, "max"):
            workers = os.cpu_count() or 1
        self.table = table
        self.workers = int(workers)
        self.chunk_size = max(1, int(chunk_size))
        self.step_budget = step_budget
        self.use_cursor = use_cursor
        self.vectorized = vectorized
        self.debug = debug
        self.has_rules = np.array(table.has_rules or [False], dtype=bool)
        self.max_new_slots = max((len([i for i in c.template.instructions if type(i) is NewNode]) - 1
                                  for e in table.entries for c in e), default=0)
        self.max_new_slots = max(self.max_new_slots, 0)

    # -- one chunk ----------------------------------------------------------

    def _chunk(self, store: TermStore, flags: SweepFlags, lo: int, hi: int) -> _ChunkResult:
        out = _ChunkResult()
        if not self.vectorized:
            for slot in range(lo, hi):
                sweep_derive(store, self.table, slot, flags, out, self.use_cursor)
            return out
        rc = store.refcounts_read[lo:hi]
        nfr = store.nf_read[lo:hi]
        live = rc > 0
        if not live.all():
            flags.garbage_collecting = True
            out.saw_garbage = True
        active = live & ~nfr
        if not active.any():
            return out
        flags.done = False
        out.clear_done = True
        idx = np.nonzero(active)[0] + lo
        k = store.arity[store.hss[idx]]
        ready = np.ones(len(idx), dtype=bool)
        first_bad = np.full(len(idx), -1, dtype=INDEX)
        start = store.cursor[idx] if self.use_cursor else None
        for j in range(store.max_arity):
            has = k > j
            if start is not None:
                has &= start <= j
            if not has.any():
                continue
            bad = has & ~store.nf_read[store.args[j, idx]]
            newly = bad & ready
            first_bad[newly] = j
            ready &= ~bad
        if self.use_cursor:
            waiting = ~ready
            store.cursor[idx[waiting]] = first_bad[waiting]
        cand = idx[ready]
        if not len(cand):
            return out
        rules = self.has_rules[store.hss[cand]]
        store.nf[cand[~rules]] = True
        table = self.table
        for slot in cand[rules].tolist():
            if self.debug:
                self._check_innermost(store, slot, out)
            if apply_rule_at(store, table, slot, out):
                out.rewritten.append(slot)
        return out

    def _check_innermost(self, store: TermStore, slot: int, out: _ChunkResult):
        for c in store.slot_args(slot):
            if not store.nf_read[c]:
                out.violations.append(f"inner-most: slot {slot} rewritten while argument {c} was not normal")
        if store.nf_read[slot] or store.refcounts_read[slot] == 0:
            out.violations.append(f"snapshot: slot {slot} was not eligible at snapshot time")

    # -- the loop -----------------------------------------------------------

    def step(self, store: TermStore, trace: SweepTrace, pool=None) -> bool:
        """One iteration of the main loop; returns True once nothing was left to do."""
        t0 = time.perf_counter()
        flags = SweepFlags()
        n = store.n
        np.copyto(store.refcounts_read[:n], store.refcounts[:n])
        np.copyto(store.nf_read[:n], store.nf[:n])
        if not store.fixed_capacity:
            pending = int(np.count_nonzero((store.refcounts_read[1:n] > 0) & ~store.nf_read[1:n]))
            store.ensure_capacity(n + pending * self.max_new_slots + 1)
        if self.debug:
            snap = (store.refcounts_read[:n].copy(), store.nf_read[:n].copy(), store.nf[:n].copy())
        chunks = [(lo, min(lo + self.chunk_size, n)) for lo in range(1, n, self.chunk_size)]
        if pool is None:
            results = [self._chunk(store, flags, lo, hi) for lo, hi in chunks]
        else:
            results = list(pool.map(lambda c: self._chunk(store, flags, *c), chunks))
        # barrier: reduce the logged atomic refcount updates
        inc = [i for r in results for i in r.inc]
        dec = [i for r in results for i in r.dec]
        if inc:
            np.add.at(store.refcounts, np.array(inc, dtype=INDEX), 1)
        if dec:
            np.subtract.at(store.refcounts, np.array(dec, dtype=INDEX), 1)
        store.fold_fresh()
        if self.debug:
            self._check_sweep(store, snap, results, trace)
        if flags.garbage_collecting:
            collect_free_indices(store)
        store.free.compact()
        if self.debug:
            self._check_quiescent(store, trace)
        live = int(np.count_nonzero(store.refcounts[1:store.n] > 0))
        trace.records.append(SweepRecord(len(trace.records) + 1, sum(r.rewrites for r in results),
                                         live, store.n, len(store.free),
                                         int((time.perf_counter() - t0) * 1e6)))
        return flags.done

    def run(self, store: TermStore, trace: Optional[SweepTrace] = None) -> Tuple[TermStore, SweepTrace]:
        trace = trace if trace is not None else SweepTrace()
        pool = ThreadPoolExecutor(self.workers) if self.workers > 1 else None
        total = 0
        try:
            while not self.step(store, trace, pool):
                total += trace.records[-1].rewrites
                if total > self.step_budget:
                    raise StepBudgetExceeded(self.step_budget)
        finally:
            if pool is not None:
                pool.shutdown()
        return store, trace

    # -- debug checks -------------------------------------------------------

    def _check_sweep(self, store, snap, results, trace):
        rc_read, nf_read, nf_before = snap
        n0 = len(rc_read)
        v = trace.violations
        for r in results:
            v.extend(r.violations)
        if not (np.array_equal(rc_read, store.refcounts_read[:n0])
                and np.array_equal(nf_read, store.nf_read[:n0])):
            v.append("snapshot: read arrays were modified during the sweep")
        # nf never goes true -> false for a slot that was not recycled this sweep
        lost = nf_before & ~store.nf[:n0]
        if lost.any():
            # only slots with refcount 0 at snapshot time can be recycled
            bad = np.nonzero(lost & (rc_read > 0))[0]
            for i in bad[:10]:
                v.append(f"nf monotonicity: slot {i} lost its normal-form flag")

    def _check_quiescent(self, store, trace):
        v = trace.violations
        expected = store.expected_refcounts()
        live = store.live_slots()
        diff = live[expected[live] != store.refcounts[live]]
        for i in diff[:10]:
            v.append(f"refcount: slot {i} has {store.refcounts[i]} but {expected[i]} references")
        w = store.free.window()
        if len(np.unique(w)) != len(w):
            v.append("free list: duplicate index in the free window")
        if len(w) and (not store.collected[w].all() or (store.refcounts[w] != 0).any()
                       or (expected[w] != 0).any()):
            v.append("free list: an index in the free window is still referenced")
        if store.root and store.collected[store.root]:
            v.append("root slot was collected")


def collect_free_indices(store: TermStore) -> int:
    """Recycle every uncollected slot whose reference count is zero.

    Children are released once; if that drops them to zero they are picked up
    by a later pass.  Returns the number of slots collected.
    """
    n = store.n
    cand = np.nonzero((store.refcounts[1:n] == 0) & ~store.collected[1:n])[0] + 1
    if not len(cand):
        return 0
    k = store.arity[store.hss[cand]]
    for j in range(store.max_arity):
        kids = store.args[j, cand[k > j]]
        np.subtract.at(store.refcounts, kids, 1)
    free = store.free
    end = free.next_free_end.fetch_add(len(cand))
    if end + len(cand) > len(free.free_indices):
        raise OverflowError("free list overflow")
    free.free_indices[end:end + len(cand)] = cand
    store.collected[cand] = True
    return len(cand)


def run(store: TermStore, table: DispatchTable, **kw) -> Tuple[TermStore, SweepTrace]:
    return SweepEngine(table, **kw).run(store)


def normalize(system, table=None, t=None, *, capacity=None, fixed_capacity=False, **kw):
    """Load, run and extract in one call; returns ``(normal form, trace)``."""
    from .compiler import compile_system
    from .store import extract, load
    table = table if table is not None else compile_system(system)
    t = t if t is not None else system.input_term
    store = load(system.signature, t, capacity, fixed_capacity)
    store, trace = run(store, table, **kw)
    return extract(store), trace
