"""Ring geometries: contiguous windows and tensor-product construction.

When the candidate trajectories are the n contiguous windows of width m
around a ring, a sensing state for the whole ring factors into m copies
of a small one-per-group state.  The onset angle depends only on the
number of windows per group, kappa = n/m — more windows demand a larger
angle, saturating at a half turn.
"""
import math

import numpy as np

from trajsense import qcore, solver, trajset

print("onset angle vs windows-per-group:")
for kappa in (2, 3, 4, 6, 8):
    th = solver.threshold_cyc(kappa)
    print(f"  kappa={kappa}: arccos(-1 + 1/ceil(kappa/2)) = {th:.4f} rad "
          f"= {th/math.pi:.4f} pi")

# build the 4-qubit window state from two 2-qubit blocks
theta = math.pi / 2
cert = solver.build_cyclic(4, 2, theta)
print(f"\n4-qubit window state at pi/2 (feasible = {cert.feasible}):")
for j, a in enumerate(cert.witness_state.amps):
    if abs(a) > 1e-12:
        print(f"  |{qcore.bitstring(4, j)}>  {a.real:+.4f}{a.imag:+.4f}j")

ts = trajset.gen_cyclic(4, 2)
res = solver.max_gram_residual(cert.witness_state, ts, theta)
print(f"output Gram residual: {res:.2e}")

# the same construction scales: 9 qubits, windows of width 3
big = solver.build_cyclic(9, 3, 2 * math.pi / 3)
ts9 = trajset.gen_cyclic(9, 3)
print(f"\n9-qubit window family at 2pi/3: feasible = {big.feasible}, "
      f"residual = {solver.max_gram_residual(big.witness_state, ts9, 2*math.pi/3):.2e}")
print(f"support size: {np.count_nonzero(np.abs(big.witness_state.amps) > 1e-12)} "
      f"of {2**9} amplitudes")

# the LP route, which knows nothing about the tensor construction, agrees
lp = solver.solve_lp(solver.TSProblem(ts9, 2 * math.pi / 3))
print(f"independent LP verdict: {lp.feasible} (method: {lp.method})")

# below the onset both routes report impossibility
low = solver.build_cyclic(4, 2, 1.2)
lp_low = solver.solve_lp(solver.TSProblem(ts, 1.2))
print(f"\nat theta = 1.2 < pi/2 threshold: construction {low.feasible}, "
      f"LP {lp_low.feasible}")
