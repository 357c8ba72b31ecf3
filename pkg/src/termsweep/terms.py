"""Signatures, terms, rules and the matching/instantiation algebra.

Symbols and variables are interned to dense integer ids; names are kept on
the :class:`Signature` for printing only.  Terms are immutable and may share
subterms (a DAG); equality is always structural.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple


class TermError(Exception):
    pass


class UndefinedHeadSymbol(TermError):
    pass


class UnboundVariable(TermError):
    pass


@dataclass(frozen=True)
class SymbolInfo:
    name: str
    arity: int
    sort: str
    argument_sorts: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.arity != len(self.argument_sorts):
            raise ValueError(f"symbol {self.name}: arity {self.arity} does not match "
                             f"{len(self.argument_sorts)} argument sorts")


@dataclass
class Signature:
    sorts: List[str] = field(default_factory=list)
    symbols: List[SymbolInfo] = field(default_factory=list)
    variables: List[Tuple[str, str]] = field(default_factory=list)

    def __post_init__(self):
        self._symbol_ids: Dict[str, int] = {}
        self._var_ids: Dict[str, int] = {}
        for i, s in enumerate(self.symbols):
            if s.name in self._symbol_ids:
                raise ValueError(f"duplicate symbol {s.name}")
            self._symbol_ids[s.name] = i
        for i, (name, _) in enumerate(self.variables):
            if name in self._var_ids or name in self._symbol_ids:
                raise ValueError(f"duplicate name {name}")
            self._var_ids[name] = i

    @property
    def max_arity(self) -> int:
        return max((s.arity for s in self.symbols), default=0)

    def symbol_id(self, name: str) -> int:
        return self._symbol_ids[name]

    def var_id(self, name: str) -> int:
        return self._var_ids[name]

    def has_symbol(self, name: str) -> bool:
        return name in self._symbol_ids

    def has_variable(self, name: str) -> bool:
        return name in self._var_ids

    def arity(self, sym: int) -> int:
        return self.symbols[sym].arity

    def sort_of(self, t: "Term") -> str:
        if isinstance(t, Var):
            return self.variables[t.var][1]
        return self.symbols[t.sym].sort

    # convenience constructor, mostly for tests and demos
    def app(self, name: str, *args: "Term") -> "App":
        sym = self._symbol_ids[name]
        if len(args) != self.symbols[sym].arity:
            raise TermError(f"{name} expects {self.symbols[sym].arity} arguments, got {len(args)}")
        return App(sym, tuple(args))

    def var(self, name: str) -> "Var":
        return Var(self._var_ids[name])

    def format(self, t: "Term") -> str:
        return format_term(self, t)


class Term:
    __slots__ = ()


class Var(Term):
    __slots__ = ("var",)

    def __init__(self, var: int):
        self.var = var

    def __eq__(self, other):
        return isinstance(other, Term) and term_equal(self, other)

    __hash__ = None

    def __repr__(self):
        return f"Var({self.var})"


class App(Term):
    __slots__ = ("sym", "args")

    def __init__(self, sym: int, args: Tuple[Term, ...] = ()):
        self.sym = sym
        self.args = args

    def __eq__(self, other):
        return isinstance(other, Term) and term_equal(self, other)

    __hash__ = None

    def __repr__(self):
        if not self.args:
            return f"App({self.sym})"
        return f"App({self.sym}, {self.args!r})"


Substitution = Dict[int, Term]


@dataclass
class Rule:
    lhs: App
    rhs: Term
    source_order: int = 0


@dataclass
class RuleViolation:
    kind: str        # "variable-lhs" | "unbound-rhs-variable" | "non-left-linear"
    message: str
    position: Tuple[int, ...] = ()


class RuleError(TermError):
    def __init__(self, violations: List[RuleViolation]):
        super().__init__("; ".join(v.message for v in violations))
        self.violations = violations


@dataclass
class RewriteSystem:
    signature: Signature
    rules: List[Rule]
    input_term: Optional[Term] = None

    def __post_init__(self):
        self.rules_by_head: Dict[int, List[Rule]] = {}
        for r in sorted(self.rules, key=lambda r: r.source_order):
            self.rules_by_head.setdefault(r.lhs.sym, []).append(r)

    def rules_for(self, sym: int) -> List[Rule]:
        return self.rules_by_head.get(sym, [])


def head_symbol(t: Term) -> int:
    if isinstance(t, Var):
        raise UndefinedHeadSymbol("the head symbol of a variable is undefined")
    return t.sym


def subterms(t: Term) -> Iterator[Tuple[Tuple[int, ...], Term]]:
    """Pre-order walk yielding ``(position, subterm)`` pairs."""
    stack = [((), t)]
    while stack:
        pos, u = stack.pop()
        yield pos, u
        if isinstance(u, App):
            for i in range(len(u.args) - 1, -1, -1):
                stack.append((pos + (i,), u.args[i]))


def variables_of(t: Term) -> set:
    return {u.var for _, u in subterms(t) if isinstance(u, Var)}


def is_ground(t: Term) -> bool:
    return not any(isinstance(u, Var) for _, u in subterms(t))


def term_equal(a: Term, b: Term) -> bool:
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        if x is y:
            continue
        if isinstance(x, Var):
            if not isinstance(y, Var) or x.var != y.var:
                return False
            continue
        if not isinstance(y, App) or x.sym != y.sym or len(x.args) != len(y.args):
            return False
        stack.extend(zip(x.args, y.args))
    return True


def term_size(t: Term) -> int:
    """Number of nodes of the tree unfolding."""
    return sum(1 for _ in subterms(t))


def match_pattern(pattern: Term, subject: Term) -> Optional[Substitution]:
    """One-sided match of a left-linear pattern against a ground subject.

    Returns the substitution, or None when there is no match.
    """
    sigma: Substitution = {}
    stack = [(pattern, subject)]
    while stack:
        p, s = stack.pop()
        if isinstance(p, Var):
            sigma[p.var] = s
            continue
        if not isinstance(s, App) or s.sym != p.sym:
            return None
        stack.extend(zip(p.args, s.args))
    return sigma


def apply_substitution(t: Term, sigma: Substitution) -> Term:
    if isinstance(t, Var):
        try:
            return sigma[t.var]
        except KeyError:
            raise UnboundVariable(f"variable {t.var} is not bound") from None
    if not t.args:
        return t
    args = tuple(apply_substitution(a, sigma) for a in t.args)
    if all(x is y for x, y in zip(args, t.args)):
        return t
    return App(t.sym, args)


def validate_rule(lhs: Term, rhs: Term, source_order: int = 0,
                  signature: Optional[Signature] = None) -> Rule:
    """Build a :class:`Rule`, raising :class:`RuleError` listing every violation."""
    name = _var_namer(signature)
    violations = []
    if isinstance(lhs, Var):
        violations.append(RuleViolation(
            "variable-lhs", f"left-hand side is the variable {name(lhs.var)}"))
        lhs_vars = {lhs.var}
    else:
        seen: Dict[int, Tuple[int, ...]] = {}
        for pos, u in subterms(lhs):
            if isinstance(u, Var):
                if u.var in seen:
                    violations.append(RuleViolation(
                        "non-left-linear",
                        f"variable {name(u.var)} occurs more than once in the left-hand side",
                        pos))
                else:
                    seen[u.var] = pos
        lhs_vars = set(seen)
    for pos, u in subterms(rhs):
        if isinstance(u, Var) and u.var not in lhs_vars:
            violations.append(RuleViolation(
                "unbound-rhs-variable",
                f"variable {name(u.var)} of the right-hand side does not occur in the left-hand side",
                pos))
    if violations:
        raise RuleError(violations)
    return Rule(lhs, rhs, source_order)


def _var_namer(signature):
    if signature is None:
        return lambda v: f"#{v}"
    return lambda v: signature.variables[v][0]


def format_term(sig: Signature, t: Term) -> str:
    out: List[str] = []
    # explicit stack: deep Peano numerals and long lists exceed the recursion limit
    stack: List[object] = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, str):
            out.append(u)
        elif isinstance(u, Var):
            out.append(sig.variables[u.var][0])
        else:
            out.append(sig.symbols[u.sym].name + "(")
            stack.append(")")
            for i in range(len(u.args) - 1, -1, -1):
                stack.append(u.args[i])
                if i:
                    stack.append(", ")
    return "".join(out)


def unshare(t: Term) -> Term:
    """Copy of ``t`` in which no two positions share a node."""
    if isinstance(t, Var):
        return Var(t.var)
    return App(t.sym, tuple(unshare(a) for a in t.args))


def peano(sig: Signature, k: int, zero: str = "Zero", succ: str = "S") -> App:
    t = sig.app(zero)
    for _ in range(k):
        t = sig.app(succ, t)
    return t


def cons_list(sig: Signature, items: Sequence[Term]) -> App:
    t = sig.app("Nil")
    for x in reversed(items):
        t = sig.app("Cons", x, t)
    return t
