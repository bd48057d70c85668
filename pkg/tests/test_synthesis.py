import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from autoqec.codes import CodeSpace, ErrorSet, build_corrupted_structure, builtin_code, fock
from autoqec.numerics import _random_unitary, spectral_norm
from autoqec.synthesis import synthesize, validate_preventive

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def ket(i, n=8):
    return np.eye(n)[i]


def test_repetition_jumps_entrywise(repetition):
    *_, eng = repetition
    assert eng.L == 3 and not eng.preventive
    for i, f in enumerate(eng.corrective):
        flip = 1 << (2 - i)
        expected = np.outer(ket(0), ket(flip)) + np.outer(ket(7), ket(7 - flip))
        assert np.array_equal(f, expected)


def test_binomial_jumps(binomial):
    code, _, cs, eng = binomial
    w0, w1 = code.codewords
    assert eng.L == 2 and eng.dim == 5
    expected = np.outer(w0, fock(5, 3)) + np.outer(w1, fock(5, 1))
    assert np.allclose(eng.corrective[0], expected, atol=1e-14)
    r = cs.residual_basis[0]
    assert np.allclose(eng.preventive[0], np.outer(w0, r.conj()))


def test_engineered_dark_on_code(binomial, repetition):
    for code, _, _, eng in (binomial, repetition):
        for f in eng.jumps:
            assert spectral_norm(f @ code.projector) <= 1e-12


def test_corrective_partial_isometry(binomial, repetition):
    for code, _, cs, eng in (binomial, repetition):
        for i, f in enumerate(eng.corrective):
            assert np.allclose(f @ f.conj().T, code.projector, atol=1e-12)
            b = cs.error_basis[:, i].T
            assert np.allclose(f.conj().T @ f, b @ b.conj().T, atol=1e-12)


def test_policies(binomial):
    _, _, cs, _ = binomial
    zero = synthesize(cs, "zero")
    # the nominal count m - 1 + (n - m d) does not depend on the policy
    assert zero.preventive == () and zero.L == 2 and len(zero.jumps) == 1
    ex = synthesize(cs, "explicit", [fock(5, 2)])
    assert np.allclose(ex.preventive[0], np.outer(fock(5, 2), cs.residual_basis[0].conj()))
    with pytest.raises(ValueError, match="needs 1"):
        synthesize(cs, "explicit", [])
    with pytest.raises(ValueError, match="not inside"):
        synthesize(cs, "explicit", [fock(5, 0)])
    with pytest.raises(ValueError, match="unit norm"):
        synthesize(cs, "explicit", [np.zeros(5)])
    with pytest.raises(ValueError, match="unknown"):
        synthesize(cs, "bogus")


def test_jumps_are_read_only(binomial):
    with pytest.raises(ValueError):
        binomial[3].corrective[0][0, 0] = 1.0


def test_validate_preventive_accepts_synthesized(binomial):
    _, _, cs, eng = binomial
    rep = validate_preventive(cs, eng.preventive)
    assert rep.ok and rep.kernel_dim == 4 and rep.kernel_residual <= 1e-10


def test_validate_preventive_flags_bad_image(binomial):
    _, _, cs, _ = binomial
    r = cs.residual_basis[0]
    bad = np.outer(r, r.conj())
    rep = validate_preventive(cs, [bad])
    assert not rep.image_ok and rep.image_residuals[0] == pytest.approx(1.0)


def test_validate_preventive_flags_bad_kernel(binomial):
    _, _, cs, eng = binomial
    rep = validate_preventive(cs, [])
    assert rep.image_ok and not rep.kernel_ok and rep.kernel_residual == float("inf")
    # a jump that also acts on the code space shrinks the kernel
    w0 = cs.code.codewords[0]
    leak = eng.preventive[0] + np.outer(w0, fock(5, 2))
    assert not validate_preventive(cs, [leak]).kernel_ok


@given(seeds)
@settings(max_examples=15, deadline=None)
def test_synthesis_properties_rotated(seed):
    code, errors = builtin_code("binomial_04_2_loss")
    u = _random_unitary(5, np.random.default_rng(seed))
    code = CodeSpace(code.codewords @ u.T)
    errors = ErrorSet(tuple(u @ f @ u.conj().T for f in errors.jumps))
    cs = build_corrupted_structure(code, errors)
    eng = synthesize(cs)
    p = code.projector
    total = sum(f.conj().T @ f for f in eng.jumps)
    # every jump kills the code and together they kill nothing else
    assert spectral_norm(total @ p) <= 1e-10
    assert np.linalg.eigvalsh(total + p).min() >= 1 - 1e-8
    assert validate_preventive(cs, eng.preventive).ok
