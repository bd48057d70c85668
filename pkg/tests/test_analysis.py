import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from autoqec.analysis import (
    NothingToFit,
    average_fidelity,
    baseline_fidelity,
    block_steady_state,
    code_projector_by_propagation,
    collecting_residuals,
    effective_lindbladian,
    epsilon_error,
    intertwiner,
    measurement_based_recovery,
    noiseless_state,
    noiseless_subsystem_check,
    perturbation_bounds,
    scaling_fit,
    worst_cardinal_epsilon,
)
from autoqec.codes import builtin_code, fock
from autoqec.lindblad import Lindbladian, autoqec_lindbladian, decompose
from autoqec.numerics import spectral_norm, spectral_projector, unvec, vec, zero_cluster

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def ket_dm(psi):
    return np.outer(psi, np.conj(psi))


def random_omega(rng, d=2):
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    w = z @ z.conj().T
    return w / np.trace(w)


# --- fidelity and error metric -------------------------------------------------


def test_baseline_closed_form():
    t = np.linspace(0, 3, 13)
    e = np.exp(-t)
    # average over cardinal states of the amplitude-damped qubit
    assert np.allclose(baseline_fidelity(t), (3 + e + 2 * np.sqrt(e)) / 6, atol=1e-12)
    f = baseline_fidelity([0.0, 1.0], gamma=2.0)
    assert f[0] == pytest.approx(1.0)
    assert f[1] == pytest.approx((3 + math.exp(-2) + 2 * math.exp(-1)) / 6)
    assert np.all(np.diff(baseline_fidelity(t)) <= 0)


def test_average_fidelity_needs_qubit():
    code, errors = builtin_code("repetition3_bitflip")
    from autoqec.codes import CodeSpace

    lind = Lindbladian.from_jumps(3, [np.eye(3)], 1.0)
    with pytest.raises(ValueError, match="logical qubit"):
        average_fidelity(lind, CodeSpace(np.eye(3, dtype=complex)), [0.0])


def test_protected_beats_baseline(binomial):
    code, errors, _, eng = binomial
    t = np.linspace(0.2, 5, 25)
    prot = average_fidelity(autoqec_lindbladian(errors, eng, 1000.0), code, t)
    assert np.all(prot > baseline_fidelity(t))


def test_epsilon_basic(binomial):
    code, errors, _, eng = binomial
    lind = autoqec_lindbladian(errors, eng, 100.0)
    rho = ket_dm(code.codewords[0])
    assert epsilon_error(lind, rho, 0.0) == 0.0
    with pytest.raises(ValueError, match="code space"):
        epsilon_error(lind, ket_dm(fock(5, 3)), 1.0, code=code)


def test_epsilon_halves_with_M(binomial):
    code, errors, _, eng = binomial
    rho = ket_dm(code.codewords[0])
    e100 = epsilon_error(autoqec_lindbladian(errors, eng, 100.0), rho, 0.5, code)
    e200 = epsilon_error(autoqec_lindbladian(errors, eng, 200.0), rho, 0.5, code)
    assert 1.6 <= e100 / e200 <= 2.4


def test_epsilon_nondecreasing_in_T(binomial, repetition):
    for code, errors, _, eng in (binomial, repetition):
        lind = autoqec_lindbladian(errors, eng, 50.0)
        eps = [worst_cardinal_epsilon(lind, code, t) for t in np.linspace(0, 2, 11)]
        assert all(b >= a - 1e-9 for a, b in zip(eps, eps[1:]))


# --- scaling fit ----------------------------------------------------------------


def test_scaling_fit_validation(binomial):
    code, errors, _, eng = binomial
    with pytest.raises(ValueError, match="four"):
        scaling_fit(code, errors, eng, 1.0, [1, 2, 3])
    with pytest.raises(ValueError, match="decade"):
        scaling_fit(code, errors, eng, 1.0, [1, 2, 3, 4])
    with pytest.raises(ValueError, match="increasing"):
        scaling_fit(code, errors, eng, 1.0, [1, 20, 10, 40])
    with pytest.raises(NothingToFit):
        scaling_fit(code, errors, eng, 1.0, [50, 100, 200, 800], gamma=0.0)


def test_scaling_fit_tail_rule(binomial):
    code, errors, _, eng = binomial
    rep = scaling_fit(code, errors, eng, 1.0, [1, 10, 100, 1000])
    assert rep.used == [e <= 0.1 for e in rep.epsilon]
    assert rep.used[0] is False and rep.used[-1] is True
    assert rep.to_dict()["tail_rule"].startswith("drop")


# --- noiseless-subsystem structure ------------------------------------------------


def test_intertwiner_binomial(binomial):
    code, _, cs, _ = binomial
    u0, u1 = intertwiner(cs, 0), intertwiner(cs, 1)
    assert np.allclose(u0, np.eye(5)) and np.allclose(u0 @ u0, np.eye(5))
    w0, w1 = code.codewords
    res = (fock(5, 0) - fock(5, 4)) / np.sqrt(2)
    assert np.allclose(u1 @ w0, w1) and np.allclose(u1 @ w1, w0)
    assert np.allclose(u1 @ fock(5, 3), fock(5, 1)) and np.allclose(u1 @ fock(5, 1), fock(5, 3))
    assert np.allclose(u1 @ res, res)
    assert np.allclose(u1.conj().T @ u1, np.eye(5), atol=1e-12)
    with pytest.raises(IndexError):
        intertwiner(cs, 2)


def test_intertwiner_commutation(binomial, repetition):
    for code, errors, cs, eng in (binomial, repetition):
        p = cs.ccs_projector
        fs = [f @ code.projector for f in errors.jumps]
        for mu in range(cs.d):
            u = intertwiner(cs, mu)
            assert np.allclose(u.conj().T @ u, np.eye(cs.n), atol=1e-12)
            for f in fs + list(eng.corrective):
                assert spectral_norm(u @ f - f @ u) <= 1e-9
            # preventive jumps commute on the corrupted code space, where both sides vanish
            for f in eng.preventive:
                assert spectral_norm((u @ f - f @ u) @ p) <= 1e-9


def test_intertwiner_repetition_completion(repetition):
    # with d = 2 there are no other S_nu, so U_1 is a pure swap
    _, _, cs, _ = repetition
    u = intertwiner(cs, 1)
    assert np.allclose(u @ u, np.eye(8))
    assert np.allclose(np.abs(u) ** 2, np.abs(u))


def test_collecting_residuals(binomial, repetition):
    for *_, cs, eng in (binomial, repetition):
        a, b = collecting_residuals(cs, eng)
        assert a <= 1e-10 and b <= 1e-10


def test_block_steady_state_oracle(binomial):
    code, errors, cs, eng = binomial
    M = 20.0
    rho = block_steady_state(effective_lindbladian(cs, eng, M), cs)
    # population balance on {W0, |3>}: loss 2 gamma out of W0, M gamma back
    p3 = 2 / (2 + M)
    assert rho[3, 3].real == pytest.approx(p3, abs=1e-10)
    assert np.vdot(code.codewords[0], rho @ code.codewords[0]).real == pytest.approx(1 - p3)
    assert abs(np.trace(rho) - 1) <= 1e-12


def test_noiseless_state_basic(binomial):
    _, _, cs, eng = binomial
    assert noiseless_subsystem_check(cs, eng, omega=np.diag([1.0, 0.0])) <= 1e-9
    with pytest.raises(ValueError):
        noiseless_state(cs, eng, np.eye(3) / 3)


@given(seeds)
@settings(max_examples=10, deadline=None)
def test_noiseless_random_omega(seed):
    code, errors = builtin_code("binomial_04_2_loss")
    from autoqec.codes import build_corrupted_structure
    from autoqec.synthesis import synthesize

    cs = build_corrupted_structure(code, errors)
    eng = synthesize(cs)
    omega = random_omega(np.random.default_rng(seed))
    big, lind_e = noiseless_state(cs, eng, omega)
    # oracle: superoperator applied to vec(Omega)
    assert spectral_norm(unvec(lind_e.superop @ vec(big), 5)) <= 1e-8
    assert abs(np.trace(big) - 1) <= 1e-12


def test_noiseless_check_discriminates(binomial):
    _, _, cs, eng = binomial
    big, lind_e = noiseless_state(cs, eng, np.eye(2) / 2)
    off = np.outer(fock(5, 3), fock(5, 1))
    bad = big + 0.01 * (off + off.T)
    assert spectral_norm(lind_e.apply(bad)) > 1e-4


def test_effective_kernel_dimension(binomial, repetition):
    for *_, cs, eng in (binomial, repetition):
        sop = effective_lindbladian(cs, eng, 100.0).superop
        assert sum(1 for x in np.linalg.eigvals(sop) if zero_cluster(sop)(x)) == 4


# --- perturbation quantities ------------------------------------------------------


def test_perturbation_bounds(binomial):
    code, errors, _, eng = binomial
    dec = decompose(code, errors, eng, 200.0)
    rep = perturbation_bounds(dec)
    assert rep.PCL2PC <= 1e-10
    assert rep.kernel_dim == 4
    for lo, hi in (rep.P_diff, rep.PeL2Pe, rep.tau):
        assert 0 <= lo <= hi
    assert rep.gap > 0
    assert rep.to_dict()["M"] == 200.0
    with pytest.raises(ValueError):
        perturbation_bounds(decompose(code, errors, eng, 0.0))


def test_code_projector_two_ways(binomial, repetition):
    for code, errors, _, eng in (binomial, repetition):
        dec = decompose(code, errors, eng, 50.0)
        p = spectral_projector(dec.L0, zero_cluster(dec.L0))
        assert spectral_norm(p - code_projector_by_propagation(dec)) <= 1e-6


# --- measurement-based comparison --------------------------------------------------


def loss_kraus(n, eta):
    """Kraus operators of truncated amplitude damping with survival ``eta``."""
    ks = []
    for l in range(n):
        k = np.zeros((n, n))
        for m in range(l, n):
            k[m - l, m] = math.sqrt(math.comb(m, l) * eta ** (m - l) * (1 - eta) ** l)
        ks.append(k)
    return ks


def test_measurement_channel_matches_kraus(binomial):
    code = binomial[0]
    g = 0.05
    u1, u2, channel = measurement_based_recovery(code, g)
    even = np.diag([1.0, 0, 1.0, 0, 1.0])
    rho = ket_dm((code.codewords[0] + 1j * code.codewords[1]) / np.sqrt(2))
    lost = sum(k @ rho @ k.T for k in loss_kraus(5, math.exp(-g)))
    odd = np.eye(5) - even
    oracle = u2 @ even @ lost @ even @ u2.conj().T + u1 @ odd @ lost @ odd @ u1.conj().T
    assert np.allclose(unvec(channel @ vec(rho), 5), oracle, atol=1e-12)


def test_measurement_unitaries_and_fidelity(binomial):
    code = binomial[0]
    u1, u2, channel = measurement_based_recovery(code, 0.01)
    for u in (u1, u2):
        assert spectral_norm(u.conj().T @ u - np.eye(5)) <= 1e-10
    for k in (1, 3):
        assert np.allclose(u2 @ fock(5, k), fock(5, k))
    w0 = code.codewords[0]
    out = unvec(channel @ vec(ket_dm(w0)), 5)
    assert 1 - np.vdot(w0, out @ w0).real <= 5e-4


def test_measurement_zero_time_is_identity_on_code(binomial):
    code = binomial[0]
    *_, channel = measurement_based_recovery(code, 0.0)
    for psi in (code.codewords[0], code.codewords[1], code.codewords.sum(0) / np.sqrt(2)):
        rho = ket_dm(psi)
        assert np.allclose(unvec(channel @ vec(rho), 5), rho, atol=1e-14)


def test_measurement_rejects_other_codes():
    with pytest.raises(ValueError):
        measurement_based_recovery(builtin_code("repetition3_bitflip")[0], 0.01)
    with pytest.raises(ValueError):
        measurement_based_recovery(builtin_code("binomial_04_2_loss")[0], -0.1)
