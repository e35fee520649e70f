"""
HyP-ABC on the mixed sphere
===========================

The 120-point ``sphere3`` space has a known minimum of 0, which makes it
easy to watch the colony converge.
"""

from collections import Counter

from hypabc import ColonyParams, builtin_mixed_sphere, bundled_space, exhaustive_min, run

space = bundled_space("sphere3")
obj = builtin_mixed_sphere(space)
best_config, best_value = exhaustive_min(space, obj)
print("oracle:", best_config, best_value)

res = run(space, ColonyParams(population_number=10, max_evaluations=100, seed=0), obj)
print(res.best_config, res.best_objective, res.stop_reason)
print("evaluations", res.evaluations_used, "cache hits", res.cache_hits, "cycles", res.cycles)

###############################################################################
# Where did the evaluations go?

print(Counter(r.phase for r in res.records if not r.cache_hit))

###############################################################################
# Best-so-far trace, one value per ten evaluations.

trace = [r.best_so_far for r in res.records if not r.cache_hit]
print(trace[::10])
