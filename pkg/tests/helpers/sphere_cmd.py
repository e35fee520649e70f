"""Standalone mixed-sphere objective for external-command tests.

Reads the JSON assignment named on the command line and prints the value
for the bundled sphere3 space: |n - 6| + index(level) + index(flag).
"""

import json
import sys

LEVELS = ["a", "b", "c", "d", "e", "f"]
FLAGS = ["off", "on"]

with open(sys.argv[1]) as fh:
    cfg = json.load(fh)
value = abs(cfg["n"] - 6) + LEVELS.index(cfg["level"]) + FLAGS.index(cfg["flag"])
print(repr(float(value)))
