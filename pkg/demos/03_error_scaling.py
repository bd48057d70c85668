import numpy as np

from autoqec import autoqec_lindbladian, build_corrupted_structure, builtin_code, synthesize
from autoqec.analysis import scaling_fit, worst_cardinal_epsilon

# The worst-case deviation from the initial logical state after time T
# falls like 1/M once M is large.
for name in ("binomial_04_2_loss", "repetition3_bitflip"):
    code, errors = builtin_code(name)
    eng = synthesize(build_corrupted_structure(code, errors))
    rep = scaling_fit(code, errors, eng, T=1.0, M_list=[50, 100, 200, 400, 800])
    print(f"{name}: slope {rep.slope:.3f}")
    for M, e in zip(rep.M, rep.epsilon):
        print(f"   M = {M:5.0f}  eps = {e:.3e}  M * eps = {M * e:.3f}")

# At fixed M the error grows with the waiting time.
code, errors = builtin_code("binomial_04_2_loss")
eng = synthesize(build_corrupted_structure(code, errors))
lind = autoqec_lindbladian(errors, eng, 100.0)
for T in np.linspace(0.5, 4, 8):
    print(f"T = {T:.1f}: eps = {worst_cardinal_epsilon(lind, code, T):.3e}")
