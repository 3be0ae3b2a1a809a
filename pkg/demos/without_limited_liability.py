"""Dropping limited liability: negative payments let the principal punish crowds.

The top-k contract pays the k* highest-surplus agents and blocks more
successes. Full extraction solves a linear system so that every
welfare-positive agent is exactly indifferent, and the principal keeps
the whole welfare.
"""

from anoncontract import gap_report
from anoncontract.generators import gen_random
from anoncontract.noll import SingularMatrixError, full_extraction, log_contract

inst = gen_random(5, seed=7, distinct_q=True)
for i, a in enumerate(inst.agents, start=1):
    print(f"agent {i}: q={a.q}  c={a.c}")

top = log_contract(inst)
print(f"\ntop-k contract: k*={top.k_star}, earns {top.utility}, welfare {top.sw}")
print("  payments:", [str(x) for x in top.w.payments])

full = full_extraction(inst)
print(f"full extraction earns {full.utility} (welfare {top.sw})")
print("  payments:", [str(x) for x in full.w.payments])

rep = gap_report(inst)
print(f"\nuniform {rep.ua}, limited liability {rep.opt_ll}; failed checks: {rep.failed_checks() or 'none'}")

twin = gen_random(4, seed=3)
twin = type(twin)((twin.agents[0], twin.agents[0]) + twin.agents[2:])
try:
    full_extraction(twin)
except SingularMatrixError as exc:
    print(f"\nrepeated success probability: {exc}")
