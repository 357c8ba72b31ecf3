import itertools

import pytest
from hypothesis import given, settings, strategies as st

from termsweep.terms import (App, RuleError, Signature, SymbolInfo, UnboundVariable,
                             UndefinedHeadSymbol, Var, apply_substitution, head_symbol,
                             match_pattern, term_equal, unshare, validate_rule, variables_of)


def test_head_symbol(msort):
    sig = msort.signature
    t = sig.app("Merge", sig.app("Nil"), sig.app("Nil"))
    assert head_symbol(t) == sig.symbol_id("Merge")
    assert head_symbol(sig.app("Zero")) == sig.symbol_id("Zero")
    with pytest.raises(UndefinedHeadSymbol):
        head_symbol(sig.var("L"))


def test_variables_of(msort):
    sig = msort.signature
    X, L = sig.var("X"), sig.var("L")
    assert variables_of(sig.app("Cons", X, L)) == {X.var, L.var}
    assert variables_of(sig.app("Zero")) == set()
    assert variables_of(X) == {X.var}


def test_match_pattern(plus):
    sig = plus.signature
    Z, X = sig.app("Zero"), sig.var("X")
    one = sig.app("S", Z)
    sigma = match_pattern(sig.app("Plus", Z, X), sig.app("Plus", Z, one))
    assert sigma is not None and list(sigma) == [X.var] and term_equal(sigma[X.var], one)
    anything = sig.app("Plus", one, one)
    assert match_pattern(X, anything)[X.var] is anything


def test_match_pattern_fails_on_head(msort):
    sig = msort.signature
    nil, zero = sig.app("Nil"), sig.app("Zero")
    pat = sig.app("Merge", nil, sig.var("M"))
    subj = sig.app("Merge", sig.app("Cons", zero, nil), nil)
    assert match_pattern(pat, subj) is None


def test_apply_substitution(msort):
    sig = msort.signature
    X, L, Y, M = (sig.var(v) for v in "XLYM")
    t = sig.app("Cons", X, sig.app("Merge", L, sig.app("Cons", Y, M)))
    zero, nil = sig.app("Zero"), sig.app("Nil")
    one = sig.app("S", zero)
    out = apply_substitution(t, {X.var: zero, L.var: nil, Y.var: one, M.var: nil})
    expected = sig.app("Cons", zero, sig.app("Merge", nil, sig.app("Cons", one, nil)))
    assert term_equal(out, expected)
    ground = sig.app("Cons", zero, nil)
    assert apply_substitution(ground, {X.var: one}) is ground
    with pytest.raises(UnboundVariable):
        apply_substitution(t, {X.var: zero})


def test_validate_rule(msort):
    sig = msort.signature
    M = sig.var("M")
    rule = validate_rule(sig.app("Merge", sig.app("Nil"), M), M)
    assert rule.lhs.sym == sig.symbol_id("Merge")

    with pytest.raises(RuleError) as e:
        validate_rule(sig.var("X"), sig.app("Zero"))
    assert [v.kind for v in e.value.violations] == ["variable-lhs"]


def test_validate_rule_free_rhs_variable():
    sig = Signature(["N"], [SymbolInfo("Z", 0, "N"), SymbolInfo("F", 1, "N", ("N",)),
                            SymbolInfo("G", 2, "N", ("N", "N"))],
                    [("X", "N"), ("Y", "N")])
    X, Y = sig.var("X"), sig.var("Y")
    with pytest.raises(RuleError) as e:
        validate_rule(sig.app("F", X), sig.app("G", X, Y), signature=sig)
    (v,) = e.value.violations
    assert v.kind == "unbound-rhs-variable" and "Y" in v.message and v.position == (1,)


def test_validate_rule_reports_all_violations():
    sig = Signature(["N"], [SymbolInfo("G", 2, "N", ("N", "N"))], [("X", "N"), ("Y", "N")])
    X, Y = sig.var("X"), sig.var("Y")
    with pytest.raises(RuleError) as e:
        validate_rule(sig.app("G", X, X), Y, signature=sig)
    assert sorted(v.kind for v in e.value.violations) == ["non-left-linear", "unbound-rhs-variable"]


def test_term_equal(plus):
    sig = plus.signature
    zero = sig.app("Zero")
    assert term_equal(zero, sig.app("Zero"))
    assert not term_equal(sig.app("S", zero), zero)
    shared = sig.app("Plus", zero, zero)
    assert term_equal(shared, unshare(shared))
    assert shared == unshare(shared)


# -- properties over a small signature ---------------------------------------

SIG = Signature(["T"], [SymbolInfo("a", 0, "T"), SymbolInfo("b", 0, "T"),
                        SymbolInfo("f", 1, "T", ("T",)), SymbolInfo("g", 2, "T", ("T", "T"))],
                [(f"V{i}", "T") for i in range(8)])


def ground_terms(max_leaves=12):
    leaf = st.sampled_from([0, 1]).map(lambda s: App(s))
    return st.recursive(leaf, lambda c: st.one_of(
        c.map(lambda x: App(2, (x,))),
        st.tuples(c, c).map(lambda p: App(3, p))), max_leaves=max_leaves)


@st.composite
def linear_pattern(draw):
    """A pattern obtained by cutting a ground term at random positions; variables are fresh."""
    t = draw(ground_terms())
    counter = [0]

    def cut(u):
        if counter[0] < 8 and draw(st.booleans()) and draw(st.booleans()):
            counter[0] += 1
            return Var(counter[0] - 1)
        return App(u.sym, tuple(cut(a) for a in u.args))
    return cut(t)


@settings(max_examples=300, deadline=None)
@given(linear_pattern(), ground_terms())
def test_match_then_apply_round_trips(p, u):
    sigma = match_pattern(p, u)
    if sigma is not None:
        assert term_equal(apply_substitution(p, sigma), u)
    assert (match_pattern(p, u) is None) == (sigma is None)


def cut_at_depth(t, depth, fresh):
    if depth == 0:
        return Var(next(fresh))
    return App(t.sym, tuple(cut_at_depth(a, depth - 1, fresh) for a in t.args))


@settings(max_examples=300, deadline=None)
@given(ground_terms(), st.integers(0, 3))
def test_pattern_cut_from_subject_always_matches(u, depth):
    p = cut_at_depth(u, depth, itertools.count())
    sigma = match_pattern(p, u)
    assert sigma is not None and term_equal(apply_substitution(p, sigma), u)


@settings(max_examples=200, deadline=None)
@given(linear_pattern(), st.lists(ground_terms(4), min_size=8, max_size=8))
def test_variables_of_after_substitution(t, images):
    # images with variables: wrap some in g(V, ...) so the identity is non-trivial
    sigma = {i: (App(3, (Var(i), img)) if i % 2 else img) for i, img in enumerate(images)}
    lhs = variables_of(apply_substitution(t, sigma))
    rhs = set().union(*(variables_of(sigma[v]) for v in variables_of(t)))
    assert lhs == rhs
