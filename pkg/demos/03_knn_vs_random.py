"""
k-NN surrogate: colony against random search
============================================

Both methods get 100 evaluations of ``1 - CV accuracy`` on the synthetic
two-blob dataset.
"""

import statistics

from hypabc import ColonyParams, builtin_knn_cv, bundled_space, random_search, run

space = bundled_space("knn")
obj = builtin_knn_cv(space)

abc, rs = [], []
for seed in range(10):
    abc.append(run(space, ColonyParams(max_evaluations=100, seed=seed), obj).best_objective)
    rs.append(random_search(space, 100, obj, seed=seed).best_objective)

print("HyP-ABC median", statistics.median(abc), "best", min(abc))
print("random  median", statistics.median(rs), "best", min(rs))

###############################################################################
# Accuracy is the complement of the objective.

res = run(space, ColonyParams(max_evaluations=100, seed=0), obj)
print(res.best_config, f"accuracy {res.best_accuracy:.4f}")
