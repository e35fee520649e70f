"""
Mixed-type search spaces
========================

A search space lists integer, continuous and categorical parameters.
Configurations are stored as float tuples; categoricals hold an index.
"""

import numpy as np

from hypabc import bundled_space, decode, neighbor, repair, sample_uniform

rf = bundled_space("rf")
for p in rf:
    print(f"{p.name:18s} {p.kind:12s} {p.choices or (p.lower, p.upper)}")

###############################################################################
# Draw a configuration and look at it both ways.

rng = np.random.default_rng(0)
c = sample_uniform(rf, rng)
print(c)
print(decode(rf, c))

###############################################################################
# Repair clamps and rounds. 6.5 rounds away from zero.

print(repair(rf, [520, 0.4, 6.5, 0, 2, 15]))

###############################################################################
# A neighbour move changes one coordinate relative to another source.
# The binary ``criterion`` dimension flips instead.

other = sample_uniform(rf, rng)
print(decode(rf, neighbor(rf, c, other, 0, 0.5)))
print(decode(rf, neighbor(rf, c, other, 1, 0.5, binary_flip=True))["criterion"])
