"""
A tour of the lattice hierarchy
===============================

Builds the dual lattices for m = 2, looks at one cell and checks the
encoded dimension at every level.
"""

import numpy as np

from colordecoder import f2
from colordecoder.lattice import CheckId, build_hierarchy

h = build_hierarchy(2)
print(h.info())

# every level is a torus of side 3 * 2**level with 2 L^2 qubits and L^2 checks
for lv in h.levels:
    k = lv.n - 2 * f2.rank(lv.check_matrix)
    print(f"level {lv.level}: L={lv.L} n={lv.n} checks={lv.num_checks} k={k}")

# the finest level splits into 2x2 blocks, each holding a lower and an upper cell
top = h.top
c = top.cells[0]
print("cell 0 qubits   ", [top.qubit_id(q) for q in c.qubits])
print("mid-edge checks ", [top.check_id(s) for s in c.mid_edge_checks])
print("corner checks   ", [top.check_id(s) for s in c.corner_checks])

# a corner check touches six qubits, one from each of six cells
print("corner (2,2) qubits", [(q, d.index) for q, d, _ in top.corner_neighborhood(CheckId(2, 2))])

# the check colours: each check sees its six qubits, each qubit three colours
colors = np.bincount(top.check_colors, minlength=3)
print("checks per colour", dict(zip("RBG", colors.tolist())))
