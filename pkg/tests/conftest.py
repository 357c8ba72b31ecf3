import pytest

from termsweep.corpora import MERGESORT_RULES, SMALL_MERGESORT_RULES
from termsweep.parser import load_system

PLUS_TRS = """\
sort Nat = Zero() | S(Nat) | Plus(Nat, Nat);
var X : Nat; Y : Nat;
eqn Plus(Zero(), X) = X;
    Plus(S(X), Y) = S(Plus(X, Y));
input Plus(S(S(Zero())), S(Zero()));
"""

DUP_TRS = """\
sort Nat = Zero() | S(Nat);
     Pair = F(Nat) | G(Nat, Nat);
var X : Nat;
eqn F(X) = G(X, X);
input F(S(Zero()));
"""


def with_input(rules: str, term: str):
    return load_system(rules + f"\ninput {term};\n")


@pytest.fixture
def plus():
    return load_system(PLUS_TRS)


@pytest.fixture
def dup():
    return load_system(DUP_TRS)


@pytest.fixture
def msort():
    """The full merge-sort system with a trivial input."""
    return with_input(MERGESORT_RULES, "Nil()")


@pytest.fixture
def small_msort():
    return with_input(SMALL_MERGESORT_RULES, "Node(Leaf(Sort(Nil())),Leaf(Sort(Nil())))")


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
