"""
Inside the term store
=====================

Terms live in parallel numpy arrays indexed by slot.  This walk-through
steps the sweep engine by hand and prints the store after each sweep.
"""

from termsweep import compile_system, load_system
from termsweep.store import extract, load
from termsweep.sweep import SweepEngine, SweepTrace
from termsweep.terms import format_term

system = load_system("""
sort Nat = Zero() | S(Nat) | Plus(Nat, Nat);
var X : Nat; Y : Nat;
eqn Plus(Zero(), X) = X;
    Plus(S(X), Y) = S(Plus(X, Y));
input Plus(S(S(Zero())), S(Zero()));
""")
sig = system.signature

# slot 0 is never used; the root sits in slot 1 with one extra reference
store = load(sig, system.input_term)
print("slot  symbol  args  refcount  nf")
print(store.dump())

# the raw arrays behind the dump
print("hss      ", store.hss[:store.n])
print("args[0]  ", store.args[0, :store.n])
print("refcounts", store.refcounts[:store.n])

engine = SweepEngine(compile_system(system), debug=True)
trace = SweepTrace()
done = False
while not done:
    done = engine.step(store, trace)
    rec = trace.records[-1]
    print(f"-- sweep {rec.sweep}: {rec.rewrites} rewrites, n={rec.n}, free list {rec.free_len}")
    print(format_term(sig, extract(store)))

# dead slots were recycled through the free list; debug mode found nothing wrong
print(store.dump())
print("violations:", trace.violations)
