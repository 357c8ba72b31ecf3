"""Independent oracles shared by the test modules."""
import random

from termsweep.compiler import TREE, compile_system, instantiate_tree, try_rules
from termsweep.terms import App, Var, apply_substitution, match_pattern, term_equal


def random_ground(sig, sort, rng, depth):
    """Random well-sorted ground term; shallow so that patterns often match."""
    syms = [i for i, s in enumerate(sig.symbols) if s.sort == sort]
    if depth <= 0:
        syms = [i for i in syms if sig.symbols[i].arity == 0] or syms
    f = rng.choice(syms)
    info = sig.symbols[f]
    return sig.app(info.name, *(random_ground(sig, s, rng, depth - 1) for s in info.argument_sorts))


def differential(system, n, seed=0):
    """Compare try_rules with a naive first match over match_pattern.

    Returns ``(disagreements, matches)``.
    """
    sig = system.signature
    table = compile_system(system)
    rng = random.Random(seed)
    heads = sorted(system.rules_by_head)
    bad = matched = 0
    for _ in range(n):
        f = rng.choice(heads)
        info = sig.symbols[f]
        subject = sig.app(info.name, *(random_ground(sig, s, rng, rng.randrange(4))
                                       for s in info.argument_sorts))
        expected = None
        for i, r in enumerate(system.rules_for(f)):
            sigma = match_pattern(r.lhs, subject)
            if sigma is not None:
                expected = (i, r, sigma)
                break
        got = try_rules(table, TREE, subject)
        if (got is None) != (expected is None):
            bad += 1
            continue
        if got is None:
            continue
        matched += 1
        i, r, sigma = expected
        idx, bindings, template = got
        prog = table[f][idx].program
        same_bindings = (len(sigma) == prog.n_vars and
                         all(bindings[slot] is sigma[v] for slot, v in enumerate(prog.var_ids)))
        same_build = term_equal(instantiate_tree(template, bindings), apply_substitution(r.rhs, sigma))
        if idx != i or not same_bindings or not same_build:
            bad += 1
    return bad, matched


def peano_value(sig, t):
    k = 0
    while sig.symbols[t.sym].name in ("S", "Suc"):
        k += 1
        t = t.args[0]
    assert sig.symbols[t.sym].name == "Zero"
    return k


def list_values(sig, t):
    out = []
    while sig.symbols[t.sym].name == "Cons":
        out.append(peano_value(sig, t.args[0]))
        t = t.args[1]
    assert sig.symbols[t.sym].name == "Nil"
    return out


def naive_normalize(system, t, budget=10 ** 6):
    """Unoptimised inner-most rewriting straight from the rule definitions.

    Rewrites the left-most inner-most redex found by a fresh search each step.
    Returns ``(normal form, number of steps)``.
    """
    steps = 0
    while True:
        pos = _innermost_redex(system, t)
        if pos is None:
            return t, steps
        steps += 1
        assert steps <= budget
        t = _rewrite_at(system, t, pos)


def _innermost_redex(system, t, pos=()):
    for i, a in enumerate(t.args):
        p = _innermost_redex(system, a, pos + (i,))
        if p is not None:
            return p
    for r in system.rules_for(t.sym):
        if match_pattern(r.lhs, t) is not None:
            return pos
    return None


def _rewrite_at(system, t, pos):
    if not pos:
        for r in system.rules_for(t.sym):
            sigma = match_pattern(r.lhs, t)
            if sigma is not None:
                return apply_substitution(r.rhs, sigma)
    i = pos[0]
    args = list(t.args)
    args[i] = _rewrite_at(system, args[i], pos[1:])
    return App(t.sym, tuple(args))


# (source, first error kind, line, column)
INVALID_INPUTS = [
    ("sort Nat = Zero();", "syntax", 1, 18),
    ("sort Nat = Zero();\neqn F(X = Y;\ninput Zero();", "syntax", 2, 9),
    ("sort Nat = Zero() | Len(List);\ninput Zero();", "unknown-name", 1, 25),
    ("sort List = Nil() | Cons(List, List) | Len(List);\n     Nat = Zero();\n"
     "eqn Len(Nil) = Zero();\ninput Nil();", "unknown-name", 3, 9),
    ("sort Nat = Zero() | S(Nat);\nvar X : Nat;\ninput S(X);", "rule-violation", 3, 7),
    ("sort Nat = Zero() | S(Nat);\ninput S(Zero(), Zero());", "arity-mismatch", 2, 7),
    ("sort Nat = Zero() | S(Nat);\n     B = T() | F(Nat);\ninput S(T());", "sort-mismatch", 3, 9),
    ("sort Nat = Zero() | S(Nat);\nvar X : Nat;\neqn X = Zero();\ninput Zero();", "rule-violation", 3, 5),
    ("sort Nat = Zero() | S(Nat) | G(Nat, Nat);\nvar X : Nat;\neqn G(X, X) = X;\ninput Zero();",
     "rule-violation", 3, 5),
    ("sort Nat = Zero() | S(Nat);\nvar X : Nat; Y : Nat;\neqn S(X) = Y;\ninput Zero();",
     "rule-violation", 3, 5),
    ("sort Nat = Zero() | Zero();\ninput Zero();", "duplicate-name", 1, 21),
    ("sort Nat = Zero() | S(Nat);\nvar S : Nat;\ninput Zero();", "duplicate-name", 2, 5),
    ("sort Nat = Zero() | S(Nat);\neqn S(Zero()) = Zero();\nsort B = T();\ninput Zero();", "syntax", 3, 1),
]


def assert_same_system(a, b):
    sa, sb = a.signature, b.signature
    assert sa.sorts == sb.sorts
    assert sa.symbols == sb.symbols
    assert sa.variables == sb.variables
    assert len(a.rules) == len(b.rules)
    for ra, rb in zip(a.rules, b.rules):
        assert term_equal(ra.lhs, rb.lhs) and term_equal(ra.rhs, rb.rhs)
        assert ra.source_order == rb.source_order
    assert term_equal(a.input_term, b.input_term)
