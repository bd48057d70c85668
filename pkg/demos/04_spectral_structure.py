import numpy as np

from autoqec import build_corrupted_structure, builtin_code, decompose, synthesize
from autoqec.analysis import (
    collecting_residuals,
    intertwiner,
    noiseless_subsystem_check,
    perturbation_bounds,
)

np.set_printoptions(precision=3, suppress=True)

code, errors = builtin_code("binomial_04_2_loss")
cs = build_corrupted_structure(code, errors)
eng = synthesize(cs)

# Each S_mu is invariant under the noiseless dynamics and exchanges no
# population with the rest.
print("collecting residuals:", collecting_residuals(cs, eng))

# U_1 swaps S_0 and S_1 block by block.
print(intertwiner(cs, 1).real)

# Any logical density matrix dressed by the block steady state is stationary.
omega = np.array([[0.7, 0.2 - 0.1j], [0.2 + 0.1j, 0.3]])
print("stationarity residual:", noiseless_subsystem_check(cs, eng, omega=omega))

# Perturbative quantities: the projector shift and the leakage term shrink
# like 1/M while the resolvent norm tau stays put.
for M in (100, 200, 400, 1000):
    r = perturbation_bounds(decompose(code, errors, eng, M))
    print(
        f"M = {M:5d}  |Pe - PC| <= {r.P_diff[1]:.2e}  |Pe L2 Pe| <= {r.PeL2Pe[1]:.2e}"
        f"  tau in [{r.tau[0]:.2f}, {r.tau[1]:.2f}]  |PC L2 PC| = {r.PCL2PC:.1e}"
    )
