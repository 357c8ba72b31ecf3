"""
Rewriting a merge sort to normal form
=====================================

Load a rewrite system written in the .trs syntax, normalize its input term
with both engines and check they agree.
"""

from termsweep import compile_system, load_system, seq, sweep
from termsweep.corpora import MERGESORT_RULES
from termsweep.terms import format_term, term_equal

# a rewrite system is a signature, rules and one ground input term
system = load_system(MERGESORT_RULES + """
input Sort(Cons(S(S(Zero())), Cons(Zero(), Cons(S(Zero()), Nil()))));
""")
sig = system.signature
print(len(sig.symbols), "symbols,", len(system.rules), "rules")
print("input:", format_term(sig, system.input_term))

# rules are compiled once into per-symbol match programs
table = compile_system(system)

# the sequential engine: left-most inner-most, one rewrite at a time
nf, stats = seq.normalize(system, table)
print("seq:  ", format_term(sig, nf), f"({stats.rewritten_terms} rewrites)")

# the sweep engine rewrites every eligible slot of a flat store per sweep
nf2, trace = sweep.normalize(system, table)
print("sweep:", format_term(sig, nf2), f"({trace.total_rewrites} rewrites in {trace.sweeps} sweeps)")

# same normal form, same number of rewrites
assert term_equal(nf, nf2)
assert stats.rewritten_terms == trace.total_rewrites
