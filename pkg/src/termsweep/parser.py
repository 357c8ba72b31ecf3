"""Recursive-descent parser and resolver for ``.trs`` rewrite-system files.

A file has up to four sections, in this order::

    sort  Nat  = struct Zero() | S(Nat);
          List = Nil() | Cons(Nat, List);
    var   X : Nat; L : List;
    eqn   Len(Nil()) = Zero();
          Len(Cons(X, L)) = S(Len(L));
    input Len(Cons(Zero(), Nil()));

``sort`` and ``input`` (or ``Input``) are required.  Constants are always
written with ``()``; a bare identifier is a variable reference.  ``%``
starts a comment that runs to the end of the line.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .terms import (App, RewriteSystem, Rule, RuleError, Signature,
                    SymbolInfo, Term, Var, format_term, is_ground,
                    validate_rule)

KEYWORDS = frozenset(["sort", "var", "eqn", "input", "Input", "struct"])
SECTION_KEYWORDS = ("sort", "var", "eqn", "input")
ERROR_KINDS = frozenset(["lex", "syntax", "unknown-name", "arity-mismatch",
                         "sort-mismatch", "rule-violation", "duplicate-name"])


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    length: int = 1

    def __post_init__(self):
        if self.line < 1 or self.column < 1 or self.length < 1:
            raise ValueError(f"invalid span {self}")


@dataclass
class ParseError:
    span: SourceSpan
    kind: str
    message: str

    def format(self, filename: str = "<input>") -> str:
        return f"{filename}:{self.span.line}:{self.span.column}: {self.kind}: {self.message}"


class TRSError(Exception):
    """Raised by :func:`parse`, :func:`resolve` and :func:`load_system`."""

    def __init__(self, errors: List[ParseError]):
        self.errors = sorted(errors, key=lambda e: (e.span.line, e.span.column))
        super().__init__("\n".join(e.format() for e in self.errors))

    def format(self, filename: str = "<input>") -> str:
        return "\n".join(e.format(filename) for e in self.errors)


# -- raw syntax tree ---------------------------------------------------------

@dataclass
class RawTerm:
    name: str
    args: Optional[List["RawTerm"]]   # None for a bare identifier
    span: SourceSpan


@dataclass
class RawCtor:
    name: str
    arg_sorts: List[Tuple[str, SourceSpan]]
    span: SourceSpan


@dataclass
class RawSort:
    name: str
    ctors: List[RawCtor]
    span: SourceSpan


@dataclass
class RawVar:
    name: str
    sort: str
    span: SourceSpan
    sort_span: SourceSpan


@dataclass
class RawEqn:
    lhs: RawTerm
    rhs: RawTerm
    span: SourceSpan


@dataclass
class RawSpec:
    sort_decls: List[RawSort] = field(default_factory=list)
    var_decls: List[RawVar] = field(default_factory=list)
    eqn_decls: List[RawEqn] = field(default_factory=list)
    input_decl: Optional[RawTerm] = None


# -- lexer -------------------------------------------------------------------

@dataclass
class Token:
    kind: str       # IDENT, KEYWORD, a punctuation character, or EOF
    value: str
    span: SourceSpan


_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<nl>\n)
  | (?P<comment>%[^\n]*)
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
  | (?P<punct>[()=,;|:])
""", re.VERBOSE)


def tokenize(text: str) -> Tuple[List[Token], List[ParseError]]:
    tokens: List[Token] = []
    errors: List[ParseError] = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            # group runs of junk (e.g. "...") into a single diagnostic
            end = pos + 1
            while end < len(text) and _TOKEN_RE.match(text, end) is None:
                end += 1
            errors.append(ParseError(SourceSpan(line, col, end - pos), "lex",
                                     f"unexpected character(s) {text[pos:end]!r}"))
            pos = end
            continue
        kind = m.lastgroup
        value = m.group()
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "ident":
            tokens.append(Token("KEYWORD" if value in KEYWORDS else "IDENT", value,
                                SourceSpan(line, col, len(value))))
        elif kind == "punct":
            tokens.append(Token(value, value, SourceSpan(line, col, 1)))
        pos = m.end()
    if tokens:
        last = tokens[-1].span
    else:
        last = SourceSpan(1, 1, 1)
    tokens.append(Token("EOF", "", last))
    return tokens, errors


# -- parser ------------------------------------------------------------------

class _Bail(Exception):
    pass


class _Parser:
    def __init__(self, tokens: List[Token], errors: List[ParseError]):
        self.tokens = tokens
        self.pos = 0
        self.errors = errors

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def at_section(self) -> bool:
        return self.tok.kind == "KEYWORD" and self.tok.value in ("sort", "var", "eqn", "input", "Input")

    def advance(self) -> Token:
        t = self.tok
        if t.kind != "EOF":
            self.pos += 1
        return t

    def error(self, msg: str, tok: Optional[Token] = None):
        tok = tok or self.tok
        self.errors.append(ParseError(tok.span, "syntax", msg))
        raise _Bail()

    def describe(self, tok: Token) -> str:
        if tok.kind == "EOF":
            return "end of input"
        return repr(tok.value)

    def expect(self, kind: str, what: str) -> Token:
        if self.tok.kind != kind:
            self.error(f"expected {what}, found {self.describe(self.tok)}")
        return self.advance()

    def recover(self):
        """Skip to just past the next ';' or up to the next section keyword."""
        while self.tok.kind != "EOF" and not self.at_section():
            if self.advance().kind == ";":
                return

    def declarations(self, parse_one):
        while self.tok.kind not in ("EOF", "KEYWORD"):
            try:
                parse_one()
            except _Bail:
                self.recover()
        if self.tok.kind == "KEYWORD" and self.tok.value == "struct":
            try:
                self.error("'struct' is only allowed after '=' in a sort declaration")
            except _Bail:
                self.advance()
                self.recover()
                self.declarations(parse_one)

    def parse(self) -> RawSpec:
        spec = RawSpec()
        seen = []
        order = {k: i for i, k in enumerate(SECTION_KEYWORDS)}
        while self.tok.kind != "EOF":
            tok = self.tok
            if not self.at_section():
                try:
                    self.error(f"expected a section keyword (sort, var, eqn, input), "
                               f"found {self.describe(tok)}")
                except _Bail:
                    self.advance()
                    while self.tok.kind != "EOF" and not self.at_section():
                        self.advance()
                continue
            name = "input" if tok.value == "Input" else tok.value
            self.advance()
            if name in seen:
                self.errors.append(ParseError(tok.span, "syntax", f"duplicate '{name}' section"))
            elif seen and order[name] < order[seen[-1]]:
                self.errors.append(ParseError(
                    tok.span, "syntax",
                    f"section '{name}' must come before '{seen[-1]}'"))
            seen.append(name)
            if name == "sort":
                self.declarations(lambda: spec.sort_decls.append(self.sort_decl()))
            elif name == "var":
                self.declarations(lambda: spec.var_decls.extend(self.var_decl()))
            elif name == "eqn":
                self.declarations(lambda: spec.eqn_decls.append(self.eqn_decl()))
            else:
                try:
                    spec.input_decl = self.term()
                    self.expect(";", "';' after the input term")
                except _Bail:
                    self.recover()
                if self.tok.kind != "EOF" and not self.at_section():
                    self.errors.append(ParseError(self.tok.span, "syntax",
                                                  "unexpected text after the input term"))
                    while self.tok.kind != "EOF" and not self.at_section():
                        self.advance()
        for required in ("sort", "input"):
            if required not in seen:
                self.errors.append(ParseError(self.tok.span, "syntax",
                                              f"missing required '{required}' section"))
        return spec

    def sort_decl(self) -> RawSort:
        name = self.expect("IDENT", "a sort name")
        self.expect("=", "'=' after the sort name")
        if self.tok.kind == "KEYWORD" and self.tok.value == "struct":
            self.advance()
        ctors = [self.ctor()]
        while self.tok.kind == "|":
            self.advance()
            ctors.append(self.ctor())
        self.expect(";", "'|' or ';' after a constructor")
        return RawSort(name.value, ctors, name.span)

    def ctor(self) -> RawCtor:
        name = self.expect("IDENT", "a function symbol")
        self.expect("(", f"'(' after {name.value} (constants are written {name.value}())")
        sorts = []
        if self.tok.kind != ")":
            t = self.expect("IDENT", "an argument sort")
            sorts.append((t.value, t.span))
            while self.tok.kind == ",":
                self.advance()
                t = self.expect("IDENT", "an argument sort")
                sorts.append((t.value, t.span))
        self.expect(")", f"',' or ')' to close the argument list of {name.value}")
        return RawCtor(name.value, sorts, name.span)

    def var_decl(self) -> List[RawVar]:
        names = [self.expect("IDENT", "a variable name")]
        while self.tok.kind == ",":
            self.advance()
            names.append(self.expect("IDENT", "a variable name"))
        self.expect(":", "':' after the variable name")
        sort = self.expect("IDENT", "a sort name")
        self.expect(";", "';' after the variable declaration")
        return [RawVar(n.value, sort.value, n.span, sort.span) for n in names]

    def eqn_decl(self) -> RawEqn:
        start = self.tok
        lhs = self.term()
        self.expect("=", "'=' between the two sides of the equation")
        rhs = self.term()
        self.expect(";", "';' after the equation")
        return RawEqn(lhs, rhs, start.span)

    def term(self) -> RawTerm:
        # iterative so that deeply nested input terms do not hit the recursion limit
        head = self.expect("IDENT", "a term")
        if self.tok.kind != "(":
            return RawTerm(head.value, None, head.span)
        root = RawTerm(head.value, [], head.span)
        self.advance()
        stack = [root]
        while stack:
            top = stack[-1]
            if self.tok.kind == ")" and not top.args:
                self.advance()
                stack.pop()
            else:
                head = self.expect("IDENT", "a term")
                child = RawTerm(head.value, None, head.span)
                top.args.append(child)
                if self.tok.kind == "(":
                    self.advance()
                    child.args = []
                    stack.append(child)
                    continue
            # a term is complete: close as many argument lists as possible
            while stack:
                if self.tok.kind == ",":
                    self.advance()
                    break
                if self.tok.kind == ")":
                    self.advance()
                    stack.pop()
                    continue
                self.error(f"expected ',' or ')' to close the argument list of {stack[-1].name}, "
                           f"found {self.describe(self.tok)}")
        return root


def parse(text: str) -> RawSpec:
    """Parse ``text`` into a :class:`RawSpec`; raises :class:`TRSError`."""
    tokens, errors = tokenize(text)
    parser = _Parser(tokens, errors)
    spec = parser.parse()
    if errors:
        raise TRSError(errors)
    return spec


# -- resolution --------------------------------------------------------------

def resolve(spec: RawSpec) -> RewriteSystem:
    """Intern names, check arities and sorts, validate rules."""
    errors: List[ParseError] = []

    def err(span, kind, msg):
        errors.append(ParseError(span, kind, msg))

    sorts: List[str] = []
    for s in spec.sort_decls:
        if s.name in sorts:
            err(s.span, "duplicate-name", f"sort {s.name} is declared twice")
        else:
            sorts.append(s.name)
    symbols: List[SymbolInfo] = []
    names: Dict[str, SourceSpan] = {}
    for s in spec.sort_decls:
        for c in s.ctors:
            for sort_name, span in c.arg_sorts:
                if sort_name not in sorts:
                    err(span, "unknown-name", f"unknown sort {sort_name}")
            if c.name in names:
                err(c.span, "duplicate-name", f"function symbol {c.name} is declared twice")
                continue
            if c.name in sorts:
                err(c.span, "duplicate-name", f"{c.name} is already a sort name")
                continue
            names[c.name] = c.span
            symbols.append(SymbolInfo(c.name, len(c.arg_sorts), s.name,
                                      tuple(n for n, _ in c.arg_sorts)))
    variables: List[Tuple[str, str]] = []
    for v in spec.var_decls:
        if v.sort not in sorts:
            err(v.sort_span, "unknown-name", f"unknown sort {v.sort}")
        if v.name in names:
            err(v.span, "duplicate-name", f"{v.name} is already declared")
            continue
        names[v.name] = v.span
        variables.append((v.name, v.sort))

    sig = Signature(sorts, symbols, variables)

    def build(raw: RawTerm) -> Optional[Term]:
        # returns None after recording an error
        ok = True
        out: Dict[int, Term] = {}
        # post-order over the raw tree
        stack = [(raw, False)]
        while stack:
            node, visited = stack.pop()
            if node.args is None:
                if sig.has_variable(node.name):
                    out[id(node)] = sig.var(node.name)
                elif sig.has_symbol(node.name):
                    err(node.span, "unknown-name",
                        f"{node.name} is a function symbol, not a variable; "
                        f"constants are written {node.name}()")
                    ok = False
                else:
                    err(node.span, "unknown-name", f"unknown variable {node.name}")
                    ok = False
                continue
            if not visited:
                stack.append((node, True))
                stack.extend((a, False) for a in reversed(node.args))
                continue
            if not sig.has_symbol(node.name):
                kind_hint = " (variables take no arguments)" if sig.has_variable(node.name) else ""
                err(node.span, "unknown-name", f"unknown function symbol {node.name}{kind_hint}")
                ok = False
                continue
            sym = sig.symbol_id(node.name)
            info = sig.symbols[sym]
            if len(node.args) != info.arity:
                err(node.span, "arity-mismatch",
                    f"{node.name} expects {info.arity} argument(s), got {len(node.args)}")
                ok = False
                continue
            children = [out.get(id(a)) for a in node.args]
            if any(c is None for c in children):
                ok = False
                continue
            for j, (a, c) in enumerate(zip(node.args, children)):
                got = sig.sort_of(c)
                if got != info.argument_sorts[j]:
                    err(a.span, "sort-mismatch",
                        f"argument {j + 1} of {node.name} must have sort "
                        f"{info.argument_sorts[j]}, but {a.name} has sort {got}")
                    ok = False
            out[id(node)] = App(sym, tuple(children))
        return out.get(id(raw)) if ok else None

    rules: List[Rule] = []
    for order, eq in enumerate(spec.eqn_decls):
        lhs, rhs = build(eq.lhs), build(eq.rhs)
        if lhs is None or rhs is None:
            continue
        if sig.sort_of(lhs) != sig.sort_of(rhs):
            err(eq.span, "sort-mismatch",
                f"left-hand side has sort {sig.sort_of(lhs)} but right-hand side "
                f"has sort {sig.sort_of(rhs)}")
            continue
        try:
            rules.append(validate_rule(lhs, rhs, order, sig))
        except RuleError as e:
            for v in e.violations:
                err(eq.span, "rule-violation", v.message)

    input_term = None
    if spec.input_decl is not None:
        input_term = build(spec.input_decl)
        if input_term is not None and isinstance(input_term, Var):
            err(spec.input_decl.span, "rule-violation",
                "the input term must be ground, but it contains variables")
            input_term = None
        elif input_term is not None:
            if not is_ground(input_term):
                err(spec.input_decl.span, "rule-violation",
                    "the input term must be ground, but it contains variables")
                input_term = None

    if errors:
        raise TRSError(errors)
    return RewriteSystem(sig, rules, input_term)


def load_system(text: str) -> RewriteSystem:
    return resolve(parse(text))


def load_file(path) -> RewriteSystem:
    with open(path, encoding="utf-8") as f:
        return load_system(f.read())


# -- printing ----------------------------------------------------------------

def print_system(system: RewriteSystem) -> str:
    sig = system.signature
    lines = []
    by_sort: Dict[str, List[SymbolInfo]] = {s: [] for s in sig.sorts}
    for info in sig.symbols:
        by_sort[info.sort].append(info)
    first = True
    for s in sig.sorts:
        if not by_sort[s]:
            continue
        ctors = " | ".join(f"{i.name}({', '.join(i.argument_sorts)})" for i in by_sort[s])
        lines.append(f"{'sort ' if first else '     '}{s} = {ctors};")
        first = False
    if sig.variables:
        lines.append("var  " + " ".join(f"{n} : {s};" for n, s in sig.variables))
    if system.rules:
        lines.append("eqn")
        for r in system.rules:
            lines.append(f"    {format_term(sig, r.lhs)} = {format_term(sig, r.rhs)};")
    if system.input_term is not None:
        lines.append(f"input {format_term(sig, system.input_term)};")
    return "\n".join(lines) + "\n"
