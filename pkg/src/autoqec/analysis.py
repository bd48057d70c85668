"""Error metric, fidelity curves, scaling fits and spectral diagnostics."""
from __future__ import annotations

from dataclasses import asdict, dataclass, replace
from typing import Sequence

import numpy as np

from .codes import (
    CodeSpace,
    CorruptedStructure,
    ErrorSet,
    annihilation,
    builtin_code,
    cardinal_states,
    fock,
)
from .lindblad import (
    DecomposedLindbladian,
    Lindbladian,
    autoqec_lindbladian,
    code_restricted_jumps,
    dissipator_superop,
    evolve,
)
from .numerics import (
    expm,
    null_space,
    reduced_resolvent,
    spectral_norm,
    spectral_projector,
    superop_norm_bound,
    unvec,
    vec,
    zero_cluster,
)
from .synthesis import EngineeredDissipation


class NothingToFit(ValueError):
    """Every error value is below the fitting floor."""


def epsilon_error(lind: Lindbladian, rho_C, T: float, code: CodeSpace | None = None) -> float:
    """``|| exp(T L) rho_C - rho_C ||`` in spectral norm."""
    rho_C = np.asarray(rho_C, dtype=complex)
    if code is not None and not code.contains(rho_C):
        raise ValueError("initial state is not supported on the code space")
    if T == 0:
        return 0.0
    rho_T = unvec(expm(T * lind.superop) @ vec(rho_C), lind.dim)
    return spectral_norm(rho_T - rho_C)


def worst_cardinal_epsilon(lind: Lindbladian, code: CodeSpace, T: float) -> float:
    prop = expm(T * lind.superop)
    worst = 0.0
    for psi in cardinal_states(code):
        rho = np.outer(psi, psi.conj())
        worst = max(worst, spectral_norm(unvec(prop @ vec(rho), lind.dim) - rho))
    return worst


def average_fidelity(lind: Lindbladian, code: CodeSpace, times) -> np.ndarray:
    """Mean of ``<psi| rho_psi(t) |psi>`` over the six cardinal states."""
    curves = []
    for psi in cardinal_states(code):
        res = evolve(lind, np.outer(psi, psi.conj()), times, check_input=False)
        curves.append(res.fidelity(psi))
    return np.mean(curves, axis=0)


def baseline_fidelity(times, gamma: float = 1.0) -> np.ndarray:
    """Average fidelity of the bare ``|0>, |1>`` qubit under loss at rate ``gamma``."""
    code, errors = builtin_code("physical_qubit_loss")
    lind = Lindbladian.from_jumps(2, errors.jumps, gamma)
    return average_fidelity(lind, code, times)


# ---------------------------------------------------------------------------
# scaling of the error with engineered strength


@dataclass
class ScalingReport:
    M: list
    epsilon: list
    slope: float
    intercept: float
    fit_residual: float
    used: list
    T: float
    gamma: float
    tail_rule: str = "drop points with epsilon > 0.1"

    def to_dict(self) -> dict:
        return asdict(self)


def scaling_fit(
    code: CodeSpace,
    errors: ErrorSet,
    eng: EngineeredDissipation,
    T: float,
    M_list: Sequence[float],
    gamma: float = 1.0,
    tail_cut: float = 0.1,
    floor: float = 1e-12,
) -> ScalingReport:
    """Fit ``log eps`` against ``log M`` using the worst cardinal state at time ``T``."""
    ms = [float(m) for m in M_list]
    if len(ms) < 4:
        raise ValueError("need at least four M values")
    if any(b <= a for a, b in zip(ms, ms[1:])) or ms[0] <= 0:
        raise ValueError("M values must be positive and strictly increasing")
    if ms[-1] / ms[0] < 10:
        raise ValueError("M values must span at least one decade")
    eps = [
        worst_cardinal_epsilon(autoqec_lindbladian(errors, eng, m, gamma), code, T)
        for m in ms
    ]
    if max(eps) < floor:
        raise NothingToFit("nothing to fit: every error is below 1e-12")
    used = [floor <= e <= tail_cut for e in eps]
    if sum(used) < 2:
        raise NothingToFit("fewer than two points in the asymptotic tail")
    x = np.log([m for m, u in zip(ms, used) if u])
    y = np.log([e for e, u in zip(eps, used) if u])
    (slope, intercept), res, *_ = np.polyfit(x, y, 1, full=True)
    return ScalingReport(
        M=ms,
        epsilon=[float(e) for e in eps],
        slope=float(slope),
        intercept=float(intercept),
        fit_residual=float(res[0]) if len(res) else 0.0,
        used=used,
        T=float(T),
        gamma=float(gamma),
    )


# ---------------------------------------------------------------------------
# noiseless-subsystem structure


def intertwiner(cs: CorruptedStructure, mu: int) -> np.ndarray:
    """Unitary swapping ``S_0`` and ``S_mu`` blockwise, identity elsewhere.

    ``U_0`` is the identity.
    """
    if not 0 <= mu < cs.d:
        raise IndexError(f"codeword index {mu} out of range for d = {cs.d}")
    n = cs.n
    if mu == 0:
        return np.eye(n, dtype=complex)
    b0 = cs.subspace_basis(0)
    bm = cs.subspace_basis(mu)
    x = bm.T @ b0.conj()
    u = x + x.conj().T + cs.residual_projector
    for nu in range(1, cs.d):
        if nu != mu:
            u = u + cs.subspace_projector(nu)
    return u


def effective_jumps(cs: CorruptedStructure, eng: EngineeredDissipation) -> list[np.ndarray]:
    """The jumps ``f_k`` and ``F_eng,i`` that respect the noiseless-subsystem structure."""
    return code_restricted_jumps(cs.code, cs.errors) + list(eng.jumps)


def collecting_residuals(cs: CorruptedStructure, eng: EngineeredDissipation) -> tuple[float, float]:
    """Worst violations of the collecting-subspace conditions over all ``S_mu``.

    Returns the maxima of ``||F P_mu - P_mu F P_mu||`` over jumps and of
    ``||P_mu (sum F^dag F) (1 - P_mu)||``.
    """
    jumps = effective_jumps(cs, eng)
    total = sum((f.conj().T @ f for f in jumps), np.zeros((cs.n, cs.n), dtype=complex))
    eye = np.eye(cs.n)
    a = b = 0.0
    for mu in range(cs.d):
        p = cs.subspace_projector(mu)
        for f in jumps:
            a = max(a, spectral_norm(f @ p - p @ f @ p))
        b = max(b, spectral_norm(p @ total @ (eye - p)))
    return a, b


def effective_lindbladian(
    cs: CorruptedStructure, eng: EngineeredDissipation, M: float, gamma: float = 1.0
) -> Lindbladian:
    """``M gamma sum D(F_eng,i) + gamma sum D(f_k)``, the noiseless part of the dynamics."""
    fs = code_restricted_jumps(cs.code, cs.errors)
    terms = [(f, M * gamma) for f in eng.jumps] + [(f, gamma) for f in fs]
    return Lindbladian(np.zeros((cs.n, cs.n), dtype=complex), tuple(terms))


def block_steady_state(lind_e: Lindbladian, cs: CorruptedStructure, tol: float = 1e-9) -> np.ndarray:
    """Unique steady state of ``lind_e`` restricted to operators on ``S_0``."""
    b = cs.subspace_basis(0).T
    m = b.shape[1]
    gen = np.empty((m * m, m * m), dtype=complex)
    for j in range(m * m):
        e = unvec(np.eye(m * m)[:, j], m)
        gen[:, j] = vec(b.conj().T @ lind_e.apply(b @ e @ b.conj().T) @ b)
    k = null_space(gen, tol=tol * max(1.0, spectral_norm(gen)))
    if k.shape[1] != 1:
        raise ValueError(
            f"steady state on S_0 is not unique (kernel dimension {k.shape[1]})"
        )
    rho = unvec(k[:, 0], m)
    rho = rho / np.trace(rho)
    rho = 0.5 * (rho + rho.conj().T)
    return b @ rho @ b.conj().T


def noiseless_state(
    cs: CorruptedStructure,
    eng: EngineeredDissipation,
    omega,
    M: float = 100.0,
    gamma: float = 1.0,
) -> tuple[np.ndarray, Lindbladian]:
    """``Omega = sum omega_{mu nu} U_mu rho_0 U_nu^dag`` and the generator it should solve."""
    omega = np.asarray(omega, dtype=complex)
    if omega.shape != (cs.d, cs.d):
        raise ValueError(f"omega must be {cs.d} x {cs.d}")
    lind_e = effective_lindbladian(cs, eng, M, gamma)
    rho0 = block_steady_state(lind_e, cs)
    us = [intertwiner(cs, mu) for mu in range(cs.d)]
    big = sum(
        omega[mu, nu] * us[mu] @ rho0 @ us[nu].conj().T
        for mu in range(cs.d)
        for nu in range(cs.d)
    )
    return big, lind_e


def noiseless_subsystem_check(
    cs: CorruptedStructure,
    eng: EngineeredDissipation,
    errors: ErrorSet | None = None,
    omega=None,
    M: float = 100.0,
    gamma: float = 1.0,
) -> float:
    """``|| L_e[Omega_st] ||`` for the logical density matrix ``omega``."""
    if errors is not None and errors is not cs.errors:
        cs = replace(cs, errors=errors)
    if omega is None:
        omega = np.eye(cs.d) / cs.d
    big, lind_e = noiseless_state(cs, eng, omega, M, gamma)
    return spectral_norm(lind_e.apply(big))


# ---------------------------------------------------------------------------
# perturbation-theory quantities


@dataclass
class BoundReport:
    M: float
    P_diff: tuple
    PeL2Pe: tuple
    PCL2PC: float
    gap: float
    tau: tuple
    kernel_dim: int
    seed: int = 0

    def to_dict(self) -> dict:
        return asdict(self)


def code_projector_by_propagation(decomp: DecomposedLindbladian, factor: float = 50.0) -> np.ndarray:
    """``exp(t L0)`` at ``t = factor / gap(L0)``."""
    lam = np.linalg.eigvals(decomp.L0)
    zc = zero_cluster(decomp.L0)
    nonzero = [-x.real for x in lam if not zc(x)]
    return expm((factor / min(nonzero)) * decomp.L0)


def perturbation_bounds(decomp: DecomposedLindbladian, seed: int = 0) -> BoundReport:
    """Norms entering the long-time error chain, as intervals.

    ``P_C`` is the zero-eigenvalue projector of ``L0`` and ``P_e`` that of the
    rescaled ``(L0 + L1) / M``; ``tau`` is the norm of the reduced resolvent of
    the rescaled generator. Superoperator norms are ``(lower, upper)`` pairs.
    """
    if decomp.M <= 0:
        raise ValueError("M must be positive")
    n = decomp.dim
    l0 = decomp.L0
    le = decomp.Le / decomp.M
    p_c = spectral_projector(l0, zero_cluster(l0))
    p_e = spectral_projector(le, zero_cluster(le))

    lam = np.linalg.eigvals(le)
    zc = zero_cluster(le)
    outside = [abs(x.real) for x in lam if not zc(x)]
    gap = float(min(outside)) if outside else float("inf")
    s = reduced_resolvent(le, p_e)
    return BoundReport(
        M=decomp.M,
        P_diff=superop_norm_bound(p_e - p_c, n, seed=seed),
        PeL2Pe=superop_norm_bound(p_e @ decomp.L2 @ p_e, n, seed=seed),
        PCL2PC=superop_norm_bound(p_c @ decomp.L2 @ p_c, n, seed=seed)[1],
        gap=gap,
        tau=superop_norm_bound(s, n, seed=seed),
        kernel_dim=int(sum(1 for x in lam if zc(x))),
        seed=seed,
    )


# ---------------------------------------------------------------------------
# measurement-based comparison for the binomial code


def _is_binomial(code: CodeSpace) -> bool:
    ref, _ = builtin_code("binomial_04_2_loss")
    return code.codewords.shape == ref.codewords.shape and np.allclose(
        code.codewords, ref.codewords, atol=1e-12
    )


def measurement_based_recovery(code: CodeSpace, gamma_dt: float):
    """Parity-conditioned recovery unitaries and the one-cycle channel.

    Returns
    -------
    U1 : ndarray
        Applied after odd parity (a photon was lost).
    U2 : ndarray
        Applied after even parity; rotates the no-jump deformation of
        ``|W_0>`` back by the angle ``gamma_dt``. Identity on ``|1>, |2>, |3>``.
    channel : ndarray
        Superoperator of loss for ``gamma_dt`` followed by parity measurement
        and the conditional unitary.
    """
    if not _is_binomial(code):
        raise ValueError("measurement-based recovery is defined for the builtin binomial code")
    if gamma_dt < 0:
        raise ValueError("gamma_dt must be nonnegative")
    n = 5
    w0, w1 = code.codewords
    phi = (fock(n, 0) - fock(n, 4)) / np.sqrt(2)
    f1 = np.outer(w0, fock(n, 3)) + np.outer(w1, fock(n, 1))
    u1 = f1 + f1.conj().T + np.outer(phi, phi.conj())

    c, s = np.cos(gamma_dt), np.sin(gamma_dt)
    u2 = (
        c * (np.outer(w0, w0.conj()) + np.outer(phi, phi.conj()))
        + s * (np.outer(w0, phi.conj()) - np.outer(phi, w0.conj()))
        + np.outer(w1, w1.conj())
        + np.outer(fock(n, 1), fock(n, 1)) + np.outer(fock(n, 3), fock(n, 3))
    )
    even = np.diag([1, 0, 1, 0, 1]).astype(complex)
    odd = np.eye(n) - even
    loss = expm(gamma_dt * dissipator_superop(annihilation(n)))
    k_even, k_odd = u2 @ even, u1 @ odd
    recover = np.kron(k_even.conj(), k_even) + np.kron(k_odd.conj(), k_odd)
    return u1, u2, recover @ loss
