"""Best anonymous contract with nonnegative payments, by exact LP per target set.

On the spread family the success probabilities span a factor Q and every
agent's surplus is the same tiny epsilon; even the best anonymous contract
keeps only a constant number of epsilons while the welfare grows with log Q.
"""

from anoncontract import optimal_ll_anonymous, optimal_ll_for_set, social_welfare
from anoncontract.generators import gen_infeasible, gen_spread, spread_info

for ell in (2, 3, 4):
    Q = 2**ell
    inst = gen_spread(Q, ell)
    eps = spread_info(Q, ell).eps
    sol = optimal_ll_anonymous(inst)
    sw = social_welfare(inst)
    feasible = sum(r.status == "optimal" for r in sol.per_set)
    print(f"Q={Q:2}: SW = {sw / eps} eps, best = {sol.utility / eps} eps on {sorted(i + 1 for i in sol.set)}, "
          f"{feasible}/{len(sol.per_set)} target sets feasible")

inst, S = gen_infeasible("1/10")
res = optimal_ll_for_set(inst, S)
print(f"\ntarget {sorted(i + 1 for i in S)} on the blocking instance: {res.status}")
