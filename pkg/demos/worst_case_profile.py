"""How large can the uniform gap get when probabilities lie in [a, b]?

Costs tuned so that every prefix leaves the principal the same amount
turn the welfare-to-uniform ratio into a function h of the probabilities
alone. A geometric-style profile gets close to the largest h, which lies
between the two logarithmic envelopes printed here. When the range b/a is
small next to 2^(n-2) the profile stops being increasing and is reported
as such instead of being turned into an instance.
"""

from anoncontract import social_welfare, solve_uniform
from anoncontract.generators import gen_tight_costs, h_bounds, h_function, worst_case_q

a, b = 1e-4, 0.5
for n in (3, 6, 10, 20):
    prof = worst_case_q(a, b, n)
    if not prof.monotone:
        print(f"n={n:2}  profile not increasing for b/a={b / a:g}; skipped")
        continue
    inst = gen_tight_costs(list(prof.q), prof.q[0])
    lo, hi = h_bounds(b / a, n)
    ratio = social_welfare(inst) / solve_uniform(inst).utility
    print(f"n={n:2}  rho={prof.rho:8.3f}  envelope [{lo:.3f}, {hi:.3f}]  h={h_function(prof.q):.3f}  SW/UA={ratio:.3f}")
