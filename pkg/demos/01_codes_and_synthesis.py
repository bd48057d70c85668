import numpy as np

from autoqec import build_corrupted_structure, builtin_code, check_knill_laflamme, synthesize
from autoqec.synthesis import validate_preventive

np.set_printoptions(precision=3, suppress=True)

# A code is a set of orthonormal codewords; errors are jump operators.
code, errors = builtin_code("binomial_04_2_loss")
print(code.codewords.real)

# The Knill-Laflamme matrix c is the logical action of E_l'^dag E_l.
rep = check_knill_laflamme(code, errors)
print("KL satisfied:", rep.satisfied, "residual", rep.residual)
print(rep.c.real)

# An unprotected qubit fails: the loss operator acts nontrivially on it.
print("bare qubit:", check_knill_laflamme(*builtin_code("physical_qubit_loss")).residual)

# Each codeword spreads into a corrupted subspace S_mu; what is left over is
# the residual space that preventive jumps must drain.
cs = build_corrupted_structure(code, errors)
print("m =", cs.m, " residual vectors:", cs.residual_basis.shape[0])
print(cs.residual_basis.real)

# Corrective jumps pump S_mu back onto |W_mu>; preventive jumps push the
# residual space into the corrupted code space.
eng = synthesize(cs)
print("corrective:\n", eng.corrective[0].real)
print("preventive:\n", eng.preventive[0].real)
print(validate_preventive(cs, eng.preventive))

# Repetition code: three corrective jumps and nothing to prevent.
rep_eng = synthesize(build_corrupted_structure(*builtin_code("repetition3_bitflip")))
print("repetition jumps:", len(rep_eng.corrective), len(rep_eng.preventive))
