"""Sequential left-most inner-most rewriter.

This is the baseline engine and the semantic oracle for the sweep engine.
The recursive derivation is run on an explicit stack with the same visit
order, so long lists and deep trees do not exhaust the interpreter stack.

Inside the engine every immutable :class:`App` is a normal form.  Work still
to be done is held in mutable ``_Pending`` nodes; a pending node that is
reachable twice (input sharing) is normalized once and its result reused.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import List, Optional, Tuple

from .compiler import TREE, DispatchTable, compile_system, instantiate, try_rules
from .terms import App, RewriteSystem, Term, Var

DEFAULT_STEP_BUDGET = 10 ** 9


class StepBudgetExceeded(RuntimeError):
    def __init__(self, budget: int):
        super().__init__(f"step budget of {budget} rewrites exceeded; "
                         "the derivation may not terminate")
        self.budget = budget


class InnermostViolation(AssertionError):
    pass


@dataclass
class SeqStats:
    rewritten_terms: int = 0
    peak_depth: int = 0
    wall_time: float = 0.0


class _Pending:
    __slots__ = ("sym", "children", "result")

    def __init__(self, sym, children):
        self.sym = sym
        self.children = children
        self.result = None


def _pending_copy(t: Term) -> _Pending:
    memo = {}
    stack = [(t, False)]
    while stack:
        u, visited = stack.pop()
        if id(u) in memo:
            continue
        if isinstance(u, Var):
            raise ValueError("cannot normalize a term with variables")
        if not visited:
            stack.append((u, True))
            stack.extend((a, False) for a in u.args if id(a) not in memo)
            continue
        memo[id(u)] = _Pending(u.sym, [memo[id(a)] for a in u.args])
    return memo[id(t)]


def normalize(system: RewriteSystem, table: Optional[DispatchTable] = None,
              t: Optional[Term] = None, *, step_budget: int = DEFAULT_STEP_BUDGET,
              check_innermost: bool = False) -> Tuple[Term, SeqStats]:
    """Normal form of ``t`` (default: the system's input term) and run statistics."""
    if table is None:
        table = compile_system(system)
    if t is None:
        t = system.input_term
    stats = SeqStats()
    start = time.perf_counter()
    root = _pending_copy(t)
    entries = table.entries
    has_rules = table.has_rules
    # frames: [pending node, next child index]
    stack: List[list] = [[root, 0]]
    count = 0
    peak = 1
    while stack:
        frame = stack[-1]
        node = frame[0]
        children = node.children
        i = frame[1]
        descended = False
        while i < len(children):
            c = children[i]
            if type(c) is _Pending:
                if c.result is None:
                    frame[1] = i
                    stack.append([c, 0])
                    descended = True
                    break
                children[i] = c.result
            i += 1
        if descended:
            if len(stack) > peak:
                peak = len(stack)
            continue
        subject = App(node.sym, tuple(children))
        match = try_rules(table, TREE, subject) if has_rules[node.sym] else None
        if match is None:
            node.result = subject
            stack.pop()
            continue
        if check_innermost:
            for a in subject.args:
                if try_rules(table, TREE, a) is not None:
                    raise InnermostViolation(
                        f"rule applied at {table.signature.symbols[node.sym].name} "
                        "while an argument is still reducible")
        count += 1
        if count > step_budget:
            raise StepBudgetExceeded(step_budget)
        _, bindings, template = match
        built = instantiate(template, bindings, lambda s, cs: _Pending(s, list(cs)))
        if type(built) is App:
            # collapse rule: the bound subterm is already a normal form
            node.result = built
            stack.pop()
        else:
            # resume at this position with the freshly built subterms
            node.sym = built.sym
            node.children = built.children
            frame[1] = 0
    stats.rewritten_terms = count
    stats.peak_depth = peak
    stats.wall_time = time.perf_counter() - start
    return root.result, stats


def count_oracle(system: RewriteSystem, t: Optional[Term] = None, **kw) -> int:
    """Number of rule applications the inner-most derivation of ``t`` performs."""
    return normalize(system, None, t, **kw)[1].rewritten_terms


def is_normal_form(table: DispatchTable, t: Term) -> bool:
    """True when no rule matches ``t`` or any of its subterms."""
    stack = [t]
    seen = set()
    while stack:
        u = stack.pop()
        if id(u) in seen:
            continue
        seen.add(id(u))
        if try_rules(table, TREE, u) is not None:
            return False
        stack.extend(u.args)
    return True
