"""Benchmark rewrite systems and generators for their input terms."""
from __future__ import annotations

import random
import string
from dataclasses import dataclass, field
from typing import List, Tuple

MERGESORT_RULES = """\
sort  Nat  = struct Zero() | S(Nat) | Len(List);
      Bool = struct True() | False() | Lt(Nat, Nat) | Gt(Nat, Nat);
      List = struct Nil() | Cons(Nat, List) | Merge(List, List) |
                    Merge2(Bool, Nat, List, Nat, List) | Even(List) |
                    Odd(List) | Sort(List) | Sort2(Bool, List);
      Tree = struct Leaf(List) | Node(Tree,Tree);

var X : Nat; Y : Nat; B : Bool; L : List; M : List;

eqn
  Len(Nil()) = Zero();
  Len(Cons(X, L)) = S(Len(L));

  Merge(Nil(), M) = M;
  Merge(L, Nil()) = L;
  Merge(Cons(X, L), Cons(Y, M)) = Merge2(Lt(X,Y), X, L, Y, M);

  Merge2(True(), X, L, Y, M) = Cons(X, Merge(L, Cons(Y, M)));
  Merge2(False(), X, L, Y, M) = Cons(Y, Merge(Cons(X, L), M));

  Sort(L) = Sort2(Gt(Len(L), S(Zero())), L);
  Sort2(False(), L) = L;
  Sort2(True(), L) = Merge(Sort(Even(L)), Sort(Odd(L)));

  Even(Nil()) = Nil();
  Even(Cons(X, L)) = Cons(X, Odd(L));
  Odd(Nil()) = Nil();
  Odd(Cons(X, L)) = Even(L);

  Gt(Zero(), Zero()) = False();
  Gt(Zero(), S(Y)) = False();
  Gt(S(X), Zero()) = True();
  Gt(S(X), S(Y)) = Gt(X, Y);

  Lt(Zero(), Zero()) = False();
  Lt(Zero(), S(Y)) = True();
  Lt(S(X), Zero()) = False();
  Lt(S(X), S(Y)) = Lt(X, Y);
"""

# the small merge-sort example without Peano/boolean/parity rules
SMALL_MERGESORT_RULES = """\
sort  List = Nil() | Cons(Nat, List) | Sort(List) | Merge(List, List) |
             Merge2(Bool, Nat, List, Nat, List) | Sort2(Bool, List) |
             Even(List) | Odd(List);
      Tree = Leaf(List) | Node(Tree,Tree);
      Nat = Zero() | S(Nat) | Len(List);
      Bool = True() | False() | Lt(Nat, Nat) | Gt(Nat, Nat);

var X : Nat; Y : Nat; L : List; M : List;

eqn   Merge(Nil(), M) = M;
      Merge(L, Nil()) = L;
      Merge(Cons(X, L), Cons(Y, M)) = Merge2(Lt(X,Y), X, L, Y, M);

      Merge2(True(), X, L, Y, M) = Cons(X, Merge(L, Cons(Y, M)));
      Merge2(False(), X, L, Y, M) = Cons(Y, Merge(Cons(X, L), M));

      Sort(L) = Sort2(Gt(Len(L), S(Zero())), L);
      Sort2(False(), L) = L;
      Sort2(True(), L) = Merge(Sort(Even(L)), Sort(Odd(L)));
"""

LETTERS = string.ascii_uppercase


def _transform_rules() -> str:
    # single capital letters are leaf symbols, so the variable needs a longer name
    leaves = " | ".join(f"{c}()" for c in LETTERS)
    chain = "\n".join(f"    {a}() = {b}();" for a, b in
                      zip(LETTERS, list(LETTERS[1:]) + ["End"]))
    return f"""\
sort Nat = struct Zero() | Suc(Nat);
     Tree = struct {leaves} | End() |
              Node(Tree,Tree) | Expand(Nat) | Expand2(Nat);

var Xn : Nat;

eqn Expand(Zero()) = A();
    Expand(Suc(Xn)) = Node(Expand(Xn),Expand2(Xn));

    Expand2(Zero()) = A();
    Expand2(Suc(Xn)) = Node(Expand(Xn), Expand2(Xn));

{chain}
"""


TRANSFORM_RULES = _transform_rules()

NUMERAL_BOUND = 32
FAMILIES = ("mergesort", "treemergesort", "transform")


@dataclass(frozen=True)
class GenSpec:
    family: str
    params: Tuple[int, ...] = ()
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        wanted = {"mergesort": 1, "treemergesort": 2, "transform": 1}[self.family]
        if len(self.params) != wanted:
            raise ValueError(f"{self.family} takes {wanted} parameter(s), got {len(self.params)}")
        if any(p < 0 for p in self.params):
            raise ValueError("parameters must be non-negative")


def peano_text(k: int, succ: str = "S") -> str:
    return f"{succ}(" * k + "Zero()" + ")" * k


def list_text(values: List[int]) -> str:
    return "".join(f"Cons({peano_text(v)}, " for v in values) + "Nil()" + ")" * len(values)


def random_numerals(rng: random.Random, k: int) -> List[int]:
    return [rng.randrange(NUMERAL_BOUND) for _ in range(k)]


def mergesort_values(n: int, seed: int = 0) -> List[int]:
    return random_numerals(random.Random(seed), n)


def treemergesort_values(depth: int, k: int, seed: int = 0) -> List[List[int]]:
    """Per-leaf numeral lists, in left-to-right leaf order."""
    rng = random.Random(seed)
    return [random_numerals(rng, k) for _ in range(2 ** depth)]


def _tree_text(leaves: List[str]) -> str:
    level = leaves
    while len(level) > 1:
        level = [f"Node({a}, {b})" for a, b in zip(level[0::2], level[1::2])]
    return level[0]


def generate(spec: GenSpec) -> str:
    """Complete ``.trs`` text for a benchmark instance; deterministic in ``spec``."""
    header = f"% {spec.family} {' '.join(map(str, spec.params))} seed={spec.seed}\n"
    if spec.family == "mergesort":
        (n,) = spec.params
        term = f"Sort({list_text(mergesort_values(n, spec.seed))})"
        return header + MERGESORT_RULES + f"\ninput {term};\n"
    if spec.family == "treemergesort":
        depth, k = spec.params
        leaves = [f"Leaf(Sort({list_text(v)}))" for v in treemergesort_values(depth, k, spec.seed)]
        return header + MERGESORT_RULES + f"\ninput {_tree_text(leaves)};\n"
    (depth,) = spec.params
    return header + TRANSFORM_RULES + f"\ninput Expand({peano_text(depth, 'Suc')});\n"


def generate_system(spec: GenSpec):
    from .parser import load_system
    return load_system(generate(spec))
