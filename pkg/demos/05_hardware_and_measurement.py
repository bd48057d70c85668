import numpy as np

from autoqec import builtin_code
from autoqec.analysis import measurement_based_recovery
from autoqec.codes import annihilation, ErrorSet
from autoqec.numerics import unvec, vec
from autoqec.physical import (
    AncillaRealization,
    M_estimate,
    adiabatic_comparison,
    binomial_engineered,
    binomial_hardware_terms,
)

# Each engineered jump is driven through a strongly damped ancilla. At fixed
# effective rate 4 lambda^2 / kappa, a weaker ratio lambda / kappa tracks the
# ideal dynamics more closely.
eng = binomial_engineered()
w0 = (np.eye(5)[0] + np.eye(5)[4]) / np.sqrt(2)
rho0 = np.outer(w0, w0)
for r in (0.2, 0.1, 0.05, 0.025):
    kappa = 10.0 / (4 * r * r)
    real = AncillaRealization.from_engineered(eng, kappa, r * kappa, ErrorSet((annihilation(5),)))
    cmp = adiabatic_comparison(real, rho0, np.linspace(0, 1, 21))
    print(f"lambda/kappa = {r:5.3f}: max distance {cmp.max_distance:.4f}, "
          f"excited ancilla {cmp.max_excited:.2e}")

# Interaction terms a hardware designer would need, with photon numbers moved.
for name, terms in binomial_hardware_terms().items():
    for t in terms:
        print(f"{name}: {t.coefficient:+.3f} {t.label}  ({t.quanta} quanta)")

# Rough engineered strength of two published cat-stabilization setups (MHz).
print("M estimates:", M_estimate(0.7, 40.0, 0.05), M_estimate(0.9, 3.0, 0.01))

# The discrete alternative: loss for gamma dt, parity measurement, then a
# conditional unitary. One cycle leaves a second-order error.
code, _ = builtin_code("binomial_04_2_loss")
for g in (0.001, 0.01, 0.1):
    *_, channel = measurement_based_recovery(code, g)
    out = unvec(channel @ vec(rho0.astype(complex)), 5)
    print(f"gamma dt = {g}: infidelity {1 - (w0 @ out @ w0).real:.2e}")
