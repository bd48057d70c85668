import numpy as np
import pytest

from autoqec.codes import ErrorSet, annihilation, fock
from autoqec.lindblad import evolve
from autoqec.physical import (
    AncillaRealization,
    M_estimate,
    adiabatic_comparison,
    assemble_terms,
    binomial_engineered,
    binomial_hardware_terms,
    build_full_model,
    coupling_hamiltonian,
    effective_model,
    effective_rate,
    ground_embedding,
    trace_distance,
    trace_out_ancillas,
)

LOWER = np.array([[0, 1], [0, 0]], dtype=complex)


def test_effective_rate():
    assert effective_rate(0.9, 3.0) == pytest.approx(1.08)
    assert effective_rate(0.0, 1.0) == 0.0
    with pytest.raises(ValueError):
        effective_rate(1.0, 0.0)


def test_M_estimate_orders_of_magnitude():
    # two published cat-stabilization parameter sets, rates in MHz
    assert M_estimate(0.7, 40.0, 0.05) == pytest.approx(0.98)
    assert M_estimate(0.9, 3.0, 0.01) == pytest.approx(108.0)
    assert M_estimate(1.0, 1.0, 0.0) == float("inf")


def test_trace_helpers():
    rho = np.diag([0.25, 0.75]).astype(complex)
    full = ground_embedding(rho, 2)
    assert full.shape == (8, 8)
    assert np.allclose(trace_out_ancillas(full, 2, 2), rho)
    assert trace_distance(np.diag([1.0, 0.0]), np.diag([0.0, 1.0])) == pytest.approx(1.0)
    assert trace_distance(rho, rho) == 0.0


def test_realization_validation():
    with pytest.raises(ValueError, match="one kappa"):
        AncillaRealization((LOWER,), (1.0, 2.0), (0.1,))
    with pytest.raises(ValueError, match="kappa"):
        AncillaRealization((LOWER,), (0.0,), (0.1,))
    big = np.eye(40)
    with pytest.raises(ValueError, match="cap"):
        AncillaRealization((big, big), (1.0, 1.0), (0.1, 0.1))


def test_coupling_hamiltonian_ordering():
    h = coupling_hamiltonian([LOWER], [0.5])
    # system |1>, ancilla |g>  <->  system |0>, ancilla |e>; index = 2*sys + anc
    expected = np.zeros((4, 4))
    expected[1, 2] = expected[2, 1] = 0.5
    assert np.allclose(h, expected)


def test_zero_coupling_decouples():
    real = AncillaRealization((LOWER,), (1.0,), (0.0,))
    rho = np.full((2, 2), 0.5, dtype=complex)
    res = evolve(build_full_model(real), ground_embedding(rho, 1), [0.0, 1.0, 5.0])
    for s in res.states:
        assert np.allclose(trace_out_ancillas(s, 2, 1), rho, atol=1e-13)


def test_recovered_rate_matches_elimination():
    lam, kappa = 0.05, 2.0
    real = AncillaRealization((LOWER,), (kappa,), (lam,))
    t = np.linspace(5, 400, 40)
    res = evolve(build_full_model(real), ground_embedding(np.diag([0.0, 1.0]), 1), t)
    p1 = np.array([trace_out_ancillas(s, 2, 1)[1, 1].real for s in res.states])
    rate = -np.polyfit(t, np.log(p1), 1)[0]
    assert rate == pytest.approx(effective_rate(lam, kappa), rel=0.01)


def test_effective_model_rates():
    eng = binomial_engineered()
    real = AncillaRealization.from_engineered(eng, 4.0, 0.2, ErrorSet((annihilation(5),)), 0.5)
    lind = effective_model(real)
    assert [r for _, r in lind.jump_terms] == pytest.approx([0.04, 0.04, 0.5])
    assert build_full_model(real).dim == 20
    only = AncillaRealization.from_engineered(eng, 4.0, 0.2, corrective_only=True)
    assert only.n_ancillas == 1


def test_adiabatic_distance_shrinks():
    eng = binomial_engineered()
    w0 = (fock(5, 0) + fock(5, 4)) / np.sqrt(2)
    rho0 = np.outer(w0, w0)
    dists = []
    for ratio in (0.2, 0.05):
        kappa = 10 / (4 * ratio**2)
        real = AncillaRealization.from_engineered(
            eng, kappa, ratio * kappa, ErrorSet((annihilation(5),)), 1.0
        )
        cmp = adiabatic_comparison(real, rho0, np.linspace(0, 1, 11))
        assert cmp.max_excited <= 4 * ratio**2
        dists.append(cmp.max_distance)
    assert dists[1] < dists[0] and dists[1] <= 0.05


def test_hardware_terms():
    terms = binomial_hardware_terms(0.3, 0.7)
    assert len(terms["H1"]) == 3 and len(terms["H2"]) == 2
    assert [t.quanta for t in terms["H1"] + terms["H2"]] == [2, 2, 4, 3, 3]
    assert terms["H1"][0].label == "|4><3| x |e1><g1|"
    s = 1 / np.sqrt(2)
    f1 = np.outer((fock(5, 0) + fock(5, 4)) * s, fock(5, 3)) + np.outer(fock(5, 2), fock(5, 1))
    f2 = np.outer(fock(5, 2), fock(5, 0) - fock(5, 4))
    h = coupling_hamiltonian([f1, f2], [0.3, 0.7])
    assert np.allclose(assemble_terms(terms["H1"] + terms["H2"]), h, atol=1e-14)


def test_binomial_engineered_targets():
    eng = binomial_engineered()
    r = (fock(5, 0) - fock(5, 4)) / np.sqrt(2)
    assert np.allclose(np.abs(eng.preventive[0]), np.abs(np.outer(fock(5, 2), r)))
    with pytest.raises(ValueError):
        binomial_engineered(fock(5, 0))
