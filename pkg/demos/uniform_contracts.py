"""Uniform contracts pay the same amount to every successful agent.

A uniform payment w recruits exactly the agents whose cost-to-success
ratio is at most w, so the best uniform contract only has to compare
prefixes in that order. Equal-probability families with harmonic costs
show how far this falls short of the welfare.
"""

from fractions import Fraction

from anoncontract import Agent, Instance, enumerate_pne, social_welfare, solve_uniform
from anoncontract.generators import gen_equal_q_harmonic
from anoncontract.noll import harmonic

inst = Instance((Agent(Fraction(9, 10), Fraction(3, 10)), Agent(Fraction(1, 2), Fraction(1, 4)), Agent(Fraction(3, 5), Fraction(9, 20))))
sol = solve_uniform(inst)
print("density order:", [i + 1 for i in inst.density_order])
print(f"best uniform payment {sol.w}, recruits {sorted(i + 1 for i in sol.prefix)}, principal earns {sol.utility}")

# away from density ties the equilibrium is unique and is the prefix
w = Fraction(11, 20)
eqs = enumerate_pne(inst, (w,) * inst.n)
print(f"equilibria under w = {w}:", [sorted(i + 1 for i in r.set) for r in eqs])

print("\nharmonic costs, q = 1/2 for everyone:")
for n in (2, 4, 8, 12):
    fam = gen_equal_q_harmonic("0.5", "0.1", n)
    ratio = social_welfare(fam) / solve_uniform(fam).utility
    print(f"  n={n:2}  SW/UA = {float(ratio):.4f}  (H_n = {float(harmonic(n)):.4f})")
