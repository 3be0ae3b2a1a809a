"""One contract, two equilibria, very different payoffs for the principal.

Both singletons are stable under the same contract. Which one the agents
land in decides whether the principal earns almost nothing or almost half.
"""

from fractions import Fraction

from anoncontract import best_response_dynamics, enumerate_pne
from anoncontract.generators import gen_unbounded_gap

eps = Fraction(1, 100)
inst, w = gen_unbounded_gap(eps)
print("agents (q, c):", [(str(a.q), str(a.c)) for a in inst.agents])
print("contract w:", [str(x) for x in w.payments])

print("\nequilibria:")
for rep in enumerate_pne(inst, w):
    print(f"  {sorted(i + 1 for i in rep.set)!s:8} principal earns {rep.principal_utility}")

# only strict gains trigger a move: from the empty set agent 1 would gain
# exactly zero, so the empty set is stable too
for start in (set(), {0, 1}, {0}):
    trace = best_response_dynamics(inst, w, start)
    path = " -> ".join(str(sorted(i + 1 for i in s)) for s in trace)
    print(f"\ndynamics from {sorted(i + 1 for i in start)}: {path}")
