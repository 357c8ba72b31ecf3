"""Compile rule lists into match programs and right-hand-side build templates.

Each rewritable head symbol gets an ordered list of ``(MatchProgram,
RhsTemplate)`` pairs, tried first to last.  Programs are interpreted over an
*accessor* so that the same table drives both the tree-based and the
array-based engine.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

from .terms import App, RewriteSystem, Rule, Signature, Term, Var, format_term

Path = Tuple[int, ...]


class CheckHead(NamedTuple):
    path: Path
    symbol: int


class BindVar(NamedTuple):
    path: Path
    var_slot: int


MatchStep = Union[CheckHead, BindVar]


class Ref(NamedTuple):
    """Child reference inside a template: a bound variable or an earlier node."""
    is_var: bool
    index: int


class NewNode(NamedTuple):
    slot: int
    symbol: int
    children: Tuple[Ref, ...]


class Reuse(NamedTuple):
    var_slot: int


@dataclass(frozen=True)
class MatchProgram:
    head: int
    steps: Tuple[MatchStep, ...]
    n_vars: int
    var_ids: Tuple[int, ...]   # var_slot -> variable id, for reporting

    def __post_init__(self):
        # flat form used by the interpreter: (is_check, parent step or -1, arg position, value)
        index = {(): -1}
        ops = []
        for k, step in enumerate(self.steps):
            ops.append((isinstance(step, CheckHead), index[step.path[:-1]],
                        step.path[-1], step[1]))
            index[step.path] = k
        object.__setattr__(self, "_ops", tuple(ops))


@dataclass(frozen=True)
class RhsTemplate:
    instructions: Tuple[Union[NewNode, Reuse], ...]
    root_ref: Ref

    @property
    def is_collapse(self) -> bool:
        return self.root_ref.is_var

    @property
    def new_nodes(self) -> int:
        return sum(1 for i in self.instructions if isinstance(i, NewNode))


@dataclass(frozen=True)
class CompiledRule:
    index: int          # position among the rules of this head symbol
    rule: Rule
    program: MatchProgram
    template: RhsTemplate


class DispatchTable:
    def __init__(self, signature: Signature, entries: Dict[int, List[CompiledRule]]):
        self.signature = signature
        self.entries = [entries.get(s, []) for s in range(len(signature.symbols))]
        self.has_rules = [bool(e) for e in self.entries]
        self.max_new_nodes = max((c.template.new_nodes for e in self.entries for c in e), default=0)

    def __getitem__(self, sym: int) -> List[CompiledRule]:
        return self.entries[sym]

    def __iter__(self):
        return iter(self.entries)


class Accessor:
    """How match programs look at a subject.  ``ref`` is engine-specific."""

    def head(self, ref) -> int:
        raise NotImplementedError

    def child(self, ref, j: int):
        raise NotImplementedError


class TreeAccessor(Accessor):
    def head(self, ref: App) -> int:
        return ref.sym

    def child(self, ref: App, j: int):
        return ref.args[j]


TREE = TreeAccessor()


def compile_rule(rule: Rule, index: int = 0) -> CompiledRule:
    lhs = rule.lhs
    steps: List[MatchStep] = []
    var_slots: Dict[int, int] = {}
    # pre-order; the root head is checked by dispatch
    stack = [((i,), a) for i, a in reversed(list(enumerate(lhs.args)))]
    while stack:
        path, p = stack.pop()
        if isinstance(p, Var):
            var_slots[p.var] = len(var_slots)
            steps.append(BindVar(path, var_slots[p.var]))
        else:
            steps.append(CheckHead(path, p.sym))
            for i in range(len(p.args) - 1, -1, -1):
                stack.append((path + (i,), p.args[i]))
    var_ids = tuple(sorted(var_slots, key=var_slots.get))
    program = MatchProgram(lhs.sym, tuple(steps), len(var_slots), var_ids)
    return CompiledRule(index, rule, program, _compile_rhs(rule.rhs, var_slots))


def _compile_rhs(rhs: Term, var_slots: Dict[int, int]) -> RhsTemplate:
    if isinstance(rhs, Var):
        slot = var_slots[rhs.var]
        return RhsTemplate((Reuse(slot),), Ref(True, slot))
    instructions: List[Union[NewNode, Reuse]] = []
    reused = set()
    n_nodes = 0
    # post-order so children precede parents
    out: Dict[int, Ref] = {}
    stack = [(rhs, False)]
    while stack:
        t, visited = stack.pop()
        if isinstance(t, Var):
            slot = var_slots[t.var]
            if slot not in reused:
                reused.add(slot)
                instructions.append(Reuse(slot))
            out[id(t)] = Ref(True, slot)
            continue
        if not visited:
            stack.append((t, True))
            stack.extend((a, False) for a in reversed(t.args))
            continue
        instructions.append(NewNode(n_nodes, t.sym, tuple(out[id(a)] for a in t.args)))
        out[id(t)] = Ref(False, n_nodes)
        n_nodes += 1
    return RhsTemplate(tuple(instructions), out[id(rhs)])


def compile_system(system: RewriteSystem) -> DispatchTable:
    entries: Dict[int, List[CompiledRule]] = {}
    for sym, rules in system.rules_by_head.items():
        entries[sym] = [compile_rule(r, i) for i, r in enumerate(rules)]
    return DispatchTable(system.signature, entries)


def run_program(program: MatchProgram, acc: Accessor, ref) -> Optional[List]:
    """Run one match program; returns the bindings (indexed by var slot) or None."""
    refs = []
    bindings = [None] * program.n_vars
    for is_check, parent, pos, value in program._ops:
        r = acc.child(ref if parent < 0 else refs[parent], pos)
        if is_check and acc.head(r) != value:
            return None
        if not is_check:
            bindings[value] = r
        refs.append(r)
    return bindings


def try_rules(table: DispatchTable, acc: Accessor, ref) -> Optional[Tuple[int, List, RhsTemplate]]:
    """First rule (in source order) matching ``ref``, with its bindings."""
    for c in table.entries[acc.head(ref)]:
        b = run_program(c.program, acc, ref)
        if b is not None:
            return c.index, b, c.template
    return None


def instantiate(template: RhsTemplate, bindings: Sequence, make_node: Callable):
    """Build a right-hand side; ``make_node(symbol, children)`` creates one node.

    Bound references are passed through unchanged, so a variable used k times
    is the same object k times.
    """
    built = []
    for ins in template.instructions:
        if isinstance(ins, NewNode):
            built.append(make_node(ins.symbol, tuple(
                bindings[c.index] if c.is_var else built[c.index] for c in ins.children)))
    root = template.root_ref
    return bindings[root.index] if root.is_var else built[root.index]


def instantiate_tree(template: RhsTemplate, bindings: Sequence) -> Term:
    return instantiate(template, bindings, App)


def dump_dispatch(table: DispatchTable) -> str:
    sig = table.signature
    names = [s.name for s in sig.symbols]
    out = []

    def ref(r: Ref, c: CompiledRule):
        return f"${r.index}" if r.is_var else f"#{r.index}"

    def path(p: Path):
        return "[" + ".".join(map(str, p)) + "]"

    for sym, compiled in enumerate(table.entries):
        if not compiled:
            continue
        out.append(f"{names[sym]}:")
        for c in compiled:
            out.append(f"  rule {c.index}: {format_term(sig, c.rule.lhs)} = {format_term(sig, c.rule.rhs)}")
            for step in c.program.steps:
                if isinstance(step, CheckHead):
                    out.append(f"    check {path(step.path)} {names[step.symbol]}")
                else:
                    var = sig.variables[c.program.var_ids[step.var_slot]][0]
                    out.append(f"    bind  {path(step.path)} ${step.var_slot} ({var})")
            for ins in c.template.instructions:
                if isinstance(ins, Reuse):
                    out.append(f"    reuse ${ins.var_slot}")
                else:
                    kids = ", ".join(ref(r, c) for r in ins.children)
                    out.append(f"    new   #{ins.slot} = {names[ins.symbol]}({kids})")
            out.append(f"    root  {ref(c.template.root_ref, c)}")
    return "\n".join(out) + "\n"
