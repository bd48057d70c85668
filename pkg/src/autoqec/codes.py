"""Code spaces, intrinsic error sets and the corrupted-code-space construction."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .numerics import as_cmatrix, gram_schmidt, spectral_norm

BUILTIN_CODES = ("repetition3_bitflip", "binomial_04_2_loss", "physical_qubit_loss")


class KnillLaflammeError(ValueError):
    """The corrupted-subspace construction found data inconsistent with the KL condition."""


@dataclass(frozen=True)
class CodeSpace:
    """Orthonormal codewords, stored as the rows of ``codewords`` (shape ``(d, n)``)."""

    codewords: np.ndarray
    name: str = "custom"

    def __post_init__(self):
        w = np.asarray(self.codewords, dtype=complex)
        if w.ndim != 2:
            raise ValueError("codewords must be a (d, n) array")
        if not np.all(np.isfinite(w)):
            raise ValueError("codewords contain non-finite entries")
        gram = w.conj() @ w.T
        if np.max(np.abs(gram - np.eye(w.shape[0])), initial=0.0) > 1e-10:
            raise ValueError("codewords are not orthonormal to 1e-10")
        w.setflags(write=False)
        object.__setattr__(self, "codewords", w)

    @property
    def d(self) -> int:
        return self.codewords.shape[0]

    @property
    def ambient_dim(self) -> int:
        return self.codewords.shape[1]

    @property
    def isometry(self) -> np.ndarray:
        """``n x d`` matrix with the codewords as columns."""
        return self.codewords.T

    @cached_property
    def projector(self) -> np.ndarray:
        b = self.isometry
        return b @ b.conj().T

    def contains(self, rho, tol: float = 1e-10) -> bool:
        p = self.projector
        return float(np.max(np.abs(p @ rho @ p - rho), initial=0.0)) <= tol


@dataclass(frozen=True)
class ErrorSet:
    """Intrinsic jump operators ``F_k``; the identity error is implicit."""

    jumps: tuple = ()

    def __post_init__(self):
        jumps = tuple(as_cmatrix(f, "jump") for f in self.jumps)
        for f in jumps:
            if f.shape[0] != f.shape[1]:
                raise ValueError("jump operators must be square")
            if f.shape != jumps[0].shape:
                raise ValueError("jump operators must share one dimension")
            f.setflags(write=False)
        object.__setattr__(self, "jumps", jumps)

    def __len__(self) -> int:
        return len(self.jumps)

    @property
    def strength(self) -> float:
        """Sum of squared spectral norms of the jumps."""
        return float(sum(spectral_norm(f) ** 2 for f in self.jumps))


@dataclass(frozen=True)
class KLReport:
    satisfied: bool
    c: np.ndarray
    residual: float
    tol: float

    def to_dict(self) -> dict:
        return {
            "satisfied": bool(self.satisfied),
            "residual": float(self.residual),
            "tol": float(self.tol),
            "c": [[[float(z.real), float(z.imag)] for z in row] for row in self.c],
        }


def _check_dims(code: CodeSpace, errors: ErrorSet) -> None:
    n = code.ambient_dim
    for f in errors.jumps:
        if f.shape != (n, n):
            raise ValueError(
                f"error operator shape {f.shape} does not match code dimension {n}"
            )


def check_knill_laflamme(code: CodeSpace, errors: ErrorSet, tol: float = 1e-8) -> KLReport:
    """Test ``P E_l'^dag E_l P = c_{l'l} P`` over ``E = {1, F_1, ..., F_N}``.

    ``c_{l'l}`` is the mean diagonal of the reduced ``d x d`` block and the
    residual is the largest spectral-norm deviation from ``c_{l'l} * 1``.
    """
    _check_dims(code, errors)
    n, d = code.ambient_dim, code.d
    ops = [np.eye(n, dtype=complex), *errors.jumps]
    b = code.isometry
    images = [e @ b for e in ops]
    size = len(ops)
    c = np.zeros((size, size), dtype=complex)
    residual = 0.0
    for lp in range(size):
        for l in range(size):
            block = images[lp].conj().T @ images[l]
            c[lp, l] = np.trace(block) / d
            residual = max(residual, spectral_norm(block - c[lp, l] * np.eye(d)))
    return KLReport(satisfied=residual <= tol, c=c, residual=residual, tol=tol)


@dataclass(frozen=True)
class CorruptedStructure:
    """Orthonormal bases of the subspaces ``S_mu`` and of their complement.

    Attributes
    ----------
    error_basis : ndarray, shape (d, m - 1, n)
        ``error_basis[mu, i]`` is the corrupted state ``|W_mu; i+1>``.
    residual_basis : ndarray, shape (n - m d, n)
        Orthonormal basis of the complement of the corrupted code space.
    overlap_table : ndarray, shape (m - 1, N)
        ``<W; i|F_k|W>``, identical for every codeword.
    kept : tuple of int
        Error indices ``k`` whose images contributed a basis vector.
    """

    code: CodeSpace
    errors: ErrorSet
    error_basis: np.ndarray
    residual_basis: np.ndarray
    overlap_table: np.ndarray
    kept: tuple

    @property
    def m(self) -> int:
        return self.error_basis.shape[1] + 1

    @property
    def d(self) -> int:
        return self.code.d

    @property
    def n(self) -> int:
        return self.code.ambient_dim

    def subspace_basis(self, mu: int) -> np.ndarray:
        """Rows ``|W_mu>, |W_mu;1>, ..., |W_mu;m-1>``."""
        return np.vstack([self.code.codewords[mu][None, :], self.error_basis[mu]])

    def subspace_projector(self, mu: int) -> np.ndarray:
        b = self.subspace_basis(mu).T
        return b @ b.conj().T

    @property
    def ccs_projector(self) -> np.ndarray:
        return sum(self.subspace_projector(mu) for mu in range(self.d))

    @property
    def residual_projector(self) -> np.ndarray:
        r = self.residual_basis.T
        return r @ r.conj().T


def build_corrupted_structure(
    code: CodeSpace,
    errors: ErrorSet,
    drop_tol: float = 1e-8,
    overlap_tol: float = 1e-8,
) -> CorruptedStructure:
    """Orthonormalize ``F_k |W_mu>`` against ``|W_mu>`` with one ordering for all ``mu``.

    Raises
    ------
    KnillLaflammeError
        If the kept-index pattern differs between codewords, the subspaces are
        not mutually orthogonal, the overlaps ``<W_mu;i|F_k|W_mu>`` depend on
        ``mu``, or some ``F_k`` acts on the code as more than a scalar.
    """
    _check_dims(code, errors)
    n, d = code.ambient_dim, code.d
    bases = []
    pattern = None
    for mu in range(d):
        w = code.codewords[mu]
        vecs = [w] + [f @ w for f in errors.jumps]
        basis, kept = gram_schmidt(vecs, drop_tol=drop_tol)
        if not kept or kept[0] != 0:
            raise KnillLaflammeError(f"codeword {mu} was dropped by Gram-Schmidt")
        if pattern is None:
            pattern = kept
        elif kept != pattern:
            raise KnillLaflammeError(
                f"kept-index pattern {kept} for codeword {mu} differs from {pattern}"
            )
        bases.append(np.array(basis[1:], dtype=complex).reshape(len(basis) - 1, n))
    error_basis = np.stack(bases) if d else np.zeros((0, 0, n), dtype=complex)

    all_rows = np.vstack(
        [np.vstack([code.codewords[mu][None, :], error_basis[mu]]) for mu in range(d)]
    ) if d else np.zeros((0, n), dtype=complex)
    gram = all_rows.conj() @ all_rows.T
    if np.max(np.abs(gram - np.eye(all_rows.shape[0])), initial=0.0) > 1e-8:
        raise KnillLaflammeError("corrupted subspaces are not mutually orthogonal")

    overlaps = np.array(
        [
            [[error_basis[mu, i].conj() @ f @ code.codewords[mu] for f in errors.jumps]
             for i in range(error_basis.shape[1])]
            for mu in range(d)
        ],
        dtype=complex,
    ).reshape(d, error_basis.shape[1], len(errors))
    spread = np.max(np.abs(overlaps - overlaps[:1]), initial=0.0) if d else 0.0
    if spread > overlap_tol:
        raise KnillLaflammeError(
            f"overlaps <W_mu;i|F_k|W_mu> vary with mu by {spread:.3e}"
        )
    # logical action of each error must be a multiple of the identity
    for f in errors.jumps:
        block = code.codewords.conj() @ f @ code.codewords.T
        dev = np.max(np.abs(block - np.trace(block) / d * np.eye(d)), initial=0.0) if d else 0.0
        if dev > overlap_tol:
            raise KnillLaflammeError(
                f"overlaps <W_nu|F_k|W_mu> are not proportional to the identity (by {dev:.3e})"
            )

    completion, _ = gram_schmidt(
        list(all_rows) + list(np.eye(n, dtype=complex)), drop_tol=1e-8
    )
    residual = np.array(completion[all_rows.shape[0]:], dtype=complex).reshape(-1, n)
    m = error_basis.shape[1] + 1
    if residual.shape[0] != n - m * d:
        raise KnillLaflammeError(
            f"residual basis has {residual.shape[0]} vectors, expected {n - m * d}"
        )
    return CorruptedStructure(
        code=code,
        errors=errors,
        error_basis=error_basis,
        residual_basis=residual,
        overlap_table=overlaps[0] if d else np.zeros((0, len(errors)), dtype=complex),
        kept=tuple(k for k in pattern[1:]) if pattern else (),
    )


# ---------------------------------------------------------------------------
# builtin codes


def annihilation(n: int) -> np.ndarray:
    """Bosonic annihilation operator truncated to ``n`` levels."""
    return np.diag(np.sqrt(np.arange(1, n)), k=1).astype(complex)


def fock(n: int, k: int) -> np.ndarray:
    v = np.zeros(n, dtype=complex)
    v[k] = 1.0
    return v


def pauli_on(op: np.ndarray, site: int, n_qubits: int) -> np.ndarray:
    """Embed a single-qubit operator at ``site`` (0 = leftmost tensor factor)."""
    out = np.ones((1, 1), dtype=complex)
    for q in range(n_qubits):
        out = np.kron(out, op if q == site else np.eye(2))
    return out


PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)


def builtin_code(name: str) -> tuple[CodeSpace, ErrorSet]:
    """Return one of the named example codes and its error set.

    ``repetition3_bitflip``
        ``|000>, |111>`` against ``X_1, X_2, X_3``.
    ``binomial_04_2_loss``
        ``(|0> + |4>)/sqrt(2), |2>`` in five Fock levels against ``a``.
    ``physical_qubit_loss``
        Uncorrected ``|0>, |1>`` against ``a``; the fidelity baseline.
    """
    if name == "repetition3_bitflip":
        w = np.zeros((2, 8), dtype=complex)
        w[0, 0b000] = 1.0
        w[1, 0b111] = 1.0
        errs = [pauli_on(PAULI_X, k, 3) for k in range(3)]
        return CodeSpace(w, name), ErrorSet(tuple(errs))
    if name == "binomial_04_2_loss":
        w = np.array([(fock(5, 0) + fock(5, 4)) / np.sqrt(2), fock(5, 2)])
        return CodeSpace(w, name), ErrorSet((annihilation(5),))
    if name == "physical_qubit_loss":
        return CodeSpace(np.eye(2, dtype=complex), name), ErrorSet((annihilation(2),))
    raise KeyError(f"unknown builtin code {name!r}; choose from {BUILTIN_CODES}")


def cardinal_states(code: CodeSpace) -> list[np.ndarray]:
    """Six logical cardinal states of a two-dimensional code."""
    if code.d != 2:
        raise ValueError(f"cardinal states need a logical qubit, got d = {code.d}")
    w0, w1 = code.codewords
    s = 1 / np.sqrt(2)
    return [w0, w1, s * (w0 + w1), s * (w0 - w1), s * (w0 + 1j * w1), s * (w0 - 1j * w1)]


def code_from_vectors(vectors: Sequence, name: str = "custom") -> CodeSpace:
    return CodeSpace(np.asarray(vectors, dtype=complex), name)
