"""Master-equation assembly, propagation and the engineered/intrinsic split.

Vectorization is column stacking: ``vec(A rho B) = (B.T kron A) vec(rho)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .codes import CodeSpace, ErrorSet
from .formats import csv_text
from .numerics import as_cmatrix, check_dim, expm, null_space, spectral_norm, unvec, vec
from .synthesis import EngineeredDissipation


def dissipator_apply(a, rho) -> np.ndarray:
    """``A rho A^dag - (A^dag A rho + rho A^dag A) / 2``."""
    a = np.asarray(a, dtype=complex)
    rho = np.asarray(rho, dtype=complex)
    if a.shape != rho.shape or a.shape[0] != a.shape[1]:
        raise ValueError(f"shape mismatch: operator {a.shape}, state {rho.shape}")
    ada = a.conj().T @ a
    return a @ rho @ a.conj().T - 0.5 * (ada @ rho + rho @ ada)


def dissipator_superop(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    n = a.shape[0]
    eye = np.eye(n)
    ada = a.conj().T @ a
    return np.kron(a.conj(), a) - 0.5 * np.kron(eye, ada) - 0.5 * np.kron(ada.T, eye)


def hamiltonian_superop(h) -> np.ndarray:
    """Superoperator of ``-i [H, .]``."""
    h = np.asarray(h, dtype=complex)
    eye = np.eye(h.shape[0])
    return -1j * (np.kron(eye, h) - np.kron(h.T, eye))


@dataclass(frozen=True)
class Lindbladian:
    """Hamiltonian plus rated jump operators; the superoperator is built on demand."""

    hamiltonian: np.ndarray
    jump_terms: tuple = ()

    def __post_init__(self):
        h = as_cmatrix(self.hamiltonian, "hamiltonian")
        if h.shape[0] != h.shape[1]:
            raise ValueError("hamiltonian must be square")
        if spectral_norm(h - h.conj().T) > 1e-10 * max(1.0, spectral_norm(h)):
            raise ValueError("hamiltonian is not Hermitian")
        check_dim(h.shape[0])
        terms = []
        for op, rate in self.jump_terms:
            op = as_cmatrix(op, "jump")
            if op.shape != h.shape:
                raise ValueError(f"jump shape {op.shape} does not match {h.shape}")
            rate = float(rate)
            if rate < 0 or not np.isfinite(rate):
                raise ValueError(f"jump rates must be finite and >= 0, got {rate}")
            terms.append((op, rate))
        object.__setattr__(self, "hamiltonian", h)
        object.__setattr__(self, "jump_terms", tuple(terms))

    @classmethod
    def from_jumps(cls, n: int, jumps: Sequence, rates, hamiltonian=None) -> "Lindbladian":
        if np.isscalar(rates):
            rates = [rates] * len(jumps)
        h = np.zeros((n, n), dtype=complex) if hamiltonian is None else hamiltonian
        return cls(h, tuple(zip(jumps, rates)))

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]

    @cached_property
    def superop(self) -> np.ndarray:
        return build_superop(self)

    def apply(self, rho) -> np.ndarray:
        """Direct action on an operator, without the superoperator."""
        h = self.hamiltonian
        out = -1j * (h @ rho - rho @ h)
        for op, rate in self.jump_terms:
            out = out + rate * dissipator_apply(op, rho)
        return out

    def __add__(self, other: "Lindbladian") -> "Lindbladian":
        return Lindbladian(self.hamiltonian + other.hamiltonian, self.jump_terms + other.jump_terms)


def build_superop(lind: Lindbladian) -> np.ndarray:
    s = hamiltonian_superop(lind.hamiltonian)
    for op, rate in lind.jump_terms:
        if rate:
            s = s + rate * dissipator_superop(op)
    return s


# ---------------------------------------------------------------------------
# propagation


def validate_density(rho, tol: float = 1e-10) -> np.ndarray:
    rho = as_cmatrix(rho, "density matrix")
    if rho.shape[0] != rho.shape[1]:
        raise ValueError("density matrix must be square")
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > tol:
        raise ValueError(f"density matrix trace {np.trace(rho).real:.3e} != 1")
    if np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min() < -tol:
        raise ValueError("density matrix is not positive semidefinite")
    return rho


@dataclass
class EvolutionResult:
    """Density matrices on a time grid plus integrator diagnostics."""

    times: np.ndarray
    states: np.ndarray
    diagnostics: dict = field(default_factory=dict)

    def fidelity(self, psi) -> np.ndarray:
        psi = np.asarray(psi, dtype=complex)
        return np.real(np.einsum("i,tij,j->t", psi.conj(), self.states, psi))

    def traces(self) -> np.ndarray:
        return np.real(np.trace(self.states, axis1=1, axis2=2))

    def min_eigenvalues(self) -> np.ndarray:
        herm = 0.5 * (self.states + np.conj(np.transpose(self.states, (0, 2, 1))))
        return np.linalg.eigvalsh(herm)[:, 0]

    def to_csv(self, path, columns: dict | None = None) -> None:
        """Write ``t`` plus the requested scalar series.

        ``columns`` maps header names to arrays aligned with ``times``; the
        default writes trace and minimum eigenvalue.
        """
        if columns is None:
            columns = {"trace": self.traces(), "min_eig": self.min_eigenvalues()}
        names = list(columns)
        rows = np.column_stack([self.times] + [np.asarray(columns[c], dtype=float) for c in names])
        with open(path, "w", newline="", encoding="utf-8") as fh:
            fh.write(csv_text(["t", *names], rows))


def _uniform_step(times: np.ndarray) -> float | None:
    if times.size < 3:
        return None
    steps = np.diff(times)
    if np.all(np.abs(steps - steps[0]) <= 1e-12 * max(1.0, abs(times[-1]))) and steps[0] > 0:
        return float(steps[0])
    return None


def propagate(lind: Lindbladian, rho0, t: float) -> np.ndarray:
    """``exp(t L) rho0`` for a single time."""
    n = lind.dim
    return unvec(expm(t * lind.superop) @ vec(np.asarray(rho0, dtype=complex)), n)


def evolve(lind: Lindbladian, rho0, times, check_input: bool = True) -> EvolutionResult:
    """Propagate ``rho0`` with the dense matrix exponential of the superoperator.

    A uniform grid reuses one step propagator; otherwise one exponential is
    taken per time point.
    """
    rho0 = validate_density(rho0) if check_input else np.asarray(rho0, dtype=complex)
    n = lind.dim
    if rho0.shape != (n, n):
        raise ValueError(f"state shape {rho0.shape} does not match dimension {n}")
    times = np.asarray(times, dtype=float).ravel()
    if np.any(times < 0):
        raise ValueError("times must be nonnegative")
    sop = lind.superop
    v0 = vec(rho0)
    out = np.empty((times.size, n * n), dtype=complex)
    dt = _uniform_step(times)
    if dt is not None:
        step = expm(dt * sop)
        v = v0 if times[0] == 0 else expm(times[0] * sop) @ v0
        for i in range(times.size):
            out[i] = v
            v = step @ v
    else:
        for i, t in enumerate(times):
            out[i] = v0 if t == 0 else expm(t * sop) @ v0
    states = out.reshape(times.size, n, n).transpose(0, 2, 1).copy()
    res = EvolutionResult(times=times, states=states)
    res.diagnostics = {
        "max_trace_drift": float(np.max(np.abs(res.traces() - 1.0), initial=0.0)),
        "max_hermiticity_error": float(
            np.max(np.abs(states - np.conj(np.transpose(states, (0, 2, 1)))), initial=0.0)
        ),
        "min_eigenvalue": float(np.min(res.min_eigenvalues(), initial=np.inf)),
    }
    return res


def steady_states(lind: Lindbladian, tol: float = 1e-9) -> list[np.ndarray]:
    """Orthonormal (Frobenius) basis of the kernel, as operators."""
    sop = lind.superop
    k = null_space(sop, tol=tol * max(1.0, spectral_norm(sop)))
    return [unvec(k[:, j], lind.dim) for j in range(k.shape[1])]


# ---------------------------------------------------------------------------
# the autonomous-QEC master equation


def autoqec_lindbladian(
    errors: ErrorSet,
    eng: EngineeredDissipation,
    M: float,
    gamma: float = 1.0,
    eng_rate: float | None = None,
    hamiltonian=None,
    cancel_hamiltonian: bool = True,
) -> Lindbladian:
    """``M gamma sum_i D(F_eng,i) + gamma sum_k D(F_k)``.

    Parameters
    ----------
    M : float
        Dimensionless engineered strength.
    gamma : float
        Intrinsic rate multiplying every ``D(F_k)``.
    eng_rate : float, optional
        Rate of each engineered jump; defaults to ``M * gamma``. Set it
        explicitly to switch off intrinsic noise (``gamma = 0``) while keeping
        the engineered part.
    hamiltonian : array_like, optional
        System Hamiltonian. By default it is cancelled by an engineered
        ``H_eng = -H_sys``; pass ``cancel_hamiltonian=False`` to keep it.
    """
    if M < 0 or gamma < 0:
        raise ValueError("M and gamma must be nonnegative")
    n = errors.jumps[0].shape[0] if len(errors) else eng.dim
    if eng_rate is None:
        eng_rate = M * gamma
    h = np.zeros((n, n), dtype=complex)
    if hamiltonian is not None and not cancel_hamiltonian:
        h = np.asarray(hamiltonian, dtype=complex)
    terms = [(f, eng_rate) for f in eng.jumps] + [(f, gamma) for f in errors.jumps]
    return Lindbladian(h, tuple(terms))


@dataclass(frozen=True)
class DecomposedLindbladian:
    """Superoperators ``L0`` (engineered), ``L1`` (noise on the code), ``L2`` (rest)."""

    L0: np.ndarray
    L1: np.ndarray
    L2: np.ndarray
    M: float
    gamma: float
    dim: int

    @property
    def full(self) -> np.ndarray:
        return self.L0 + self.L1 + self.L2

    @property
    def Le(self) -> np.ndarray:
        return self.L0 + self.L1


def code_restricted_jumps(code: CodeSpace, errors: ErrorSet) -> list[np.ndarray]:
    """``f_k = F_k P_C``."""
    p = code.projector
    return [f @ p for f in errors.jumps]


def decompose(
    code: CodeSpace,
    errors: ErrorSet,
    eng: EngineeredDissipation,
    M: float,
    gamma: float = 1.0,
) -> DecomposedLindbladian:
    """Split the master equation into engineered, code-restricted and remainder parts.

    ``L2`` is assembled term by term as ``gamma * sum_k (D(F_k) - D(f_k))``; it
    is a difference of dissipators, not a dissipator.
    """
    n = code.ambient_dim
    check_dim(n)
    for f in (*errors.jumps, *eng.jumps):
        if f.shape != (n, n):
            raise ValueError(f"operator shape {f.shape} does not match dimension {n}")
    zero = np.zeros((n * n, n * n), dtype=complex)
    l0 = zero + sum((M * gamma * dissipator_superop(f) for f in eng.jumps), zero)
    fs = code_restricted_jumps(code, errors)
    l1 = zero + sum((gamma * dissipator_superop(f) for f in fs), zero)
    l2 = zero + sum(
        (gamma * (dissipator_superop(F) - dissipator_superop(f)) for F, f in zip(errors.jumps, fs)),
        zero,
    )
    return DecomposedLindbladian(L0=l0, L1=l1, L2=l2, M=float(M), gamma=float(gamma), dim=n)
