"""
Population size sweep through the CLI
=====================================

The same harness the command line uses, called in-process. Results land
in ``np-sweep/``; the summary ends with a note on how the median moves
with NP.
"""

from hypabc.cli import run_cli

run_cli([
    "run", "--method", "hypabc,random", "--space", "knn", "--objective", "knn_cv",
    "--budget", "200", "--np", "20,50,100", "--repeats", "5", "--out-dir", "np-sweep",
])

###############################################################################
# Re-aggregate the stored results, one row per method.

run_cli(["summarize", "np-sweep/results", "--group-by", "method"])
