"""Engineered jump operators: corrective pumps and preventive resets."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .codes import CorruptedStructure
from .numerics import null_space, spectral_norm

PHI_POLICIES = ("first_codeword", "explicit", "zero")


@dataclass(frozen=True)
class EngineeredDissipation:
    """Corrective and preventive jumps plus the targets ``|Phi_p>`` used."""

    corrective: tuple
    preventive: tuple
    phi_targets: tuple
    phi_policy: str = "first_codeword"

    @property
    def jumps(self) -> tuple:
        return self.corrective + self.preventive

    @property
    def L(self) -> int:
        """Nominal jump count ``m - 1 + (n - m d)``, independent of the policy."""
        return len(self.corrective) + len(self.phi_targets)

    @property
    def dim(self) -> int:
        ops = self.jumps
        return ops[0].shape[0] if ops else 0


def synthesize(
    cs: CorruptedStructure,
    phi_policy: str = "first_codeword",
    phi: Sequence | None = None,
) -> EngineeredDissipation:
    """Build ``sum_mu |W_mu><W_mu;i|`` and ``|Phi_p><phi_p|``.

    Parameters
    ----------
    cs : CorruptedStructure
    phi_policy : {"first_codeword", "explicit", "zero"}
        ``first_codeword`` sets every ``|Phi_p> = |W_0>``; ``explicit`` takes the
        states from ``phi``; ``zero`` drops the preventive jumps entirely.
    phi : sequence of vectors, optional
        One target per residual vector, each inside the corrupted code space.
    """
    n, d, m = cs.n, cs.d, cs.m
    corrective = []
    for i in range(m - 1):
        f = np.zeros((n, n), dtype=complex)
        for mu in range(d):
            f += np.outer(cs.code.codewords[mu], cs.error_basis[mu, i].conj())
        corrective.append(f)

    n_res = cs.residual_basis.shape[0]
    if phi_policy == "first_codeword":
        targets = [cs.code.codewords[0].copy() for _ in range(n_res)]
    elif phi_policy == "explicit":
        if phi is None or len(phi) != n_res:
            got = 0 if phi is None else len(phi)
            raise ValueError(f"explicit policy needs {n_res} target states, got {got}")
        targets = [np.asarray(t, dtype=complex).ravel() for t in phi]
        proj = cs.ccs_projector
        for t in targets:
            if t.shape != (n,):
                raise ValueError(f"target state has shape {t.shape}, expected ({n},)")
            if abs(np.linalg.norm(t) - 1) > 1e-8:
                raise ValueError("target state must have unit norm")
            if np.linalg.norm(t - proj @ t) > 1e-8:
                raise ValueError("target state is not inside the corrupted code space")
    elif phi_policy == "zero":
        targets = [np.zeros(n, dtype=complex) for _ in range(n_res)]
    else:
        raise ValueError(f"unknown phi_policy {phi_policy!r}")

    preventive = []
    if phi_policy != "zero":
        for t, r in zip(targets, cs.residual_basis):
            preventive.append(np.outer(t, r.conj()))

    for f in corrective + preventive:
        f.setflags(write=False)
    return EngineeredDissipation(
        corrective=tuple(corrective),
        preventive=tuple(preventive),
        phi_targets=tuple(targets),
        phi_policy=phi_policy,
    )


@dataclass(frozen=True)
class PreventiveReport:
    image_ok: bool
    image_residuals: tuple
    kernel_ok: bool
    kernel_residual: float
    kernel_dim: int

    @property
    def ok(self) -> bool:
        return self.image_ok and self.kernel_ok


def validate_preventive(
    cs: CorruptedStructure, jumps: Sequence, tol: float = 1e-8
) -> PreventiveReport:
    """Check admissibility of a set of preventive jumps.

    Two conditions: the image of every jump lies inside the corrupted code
    space, and the kernel of ``sum F^dag F`` over ``jumps`` equals it.

    The kernel residual is the spectral norm of the difference between the
    orthogonal projector onto the kernel and the corrupted-code-space
    projector (infinite when dimensions differ).
    """
    n = cs.n
    proj = cs.ccs_projector
    comp = np.eye(n) - proj
    image_res = tuple(spectral_norm(comp @ np.asarray(f)) for f in jumps)
    image_ok = all(r <= tol for r in image_res)

    total = np.zeros((n, n), dtype=complex)
    for f in jumps:
        f = np.asarray(f, dtype=complex)
        total += f.conj().T @ f
    kern = null_space(total, tol=1e-6 * max(1.0, spectral_norm(total)))
    kdim = kern.shape[1]
    if kdim == round(np.real(np.trace(proj))):
        kernel_res = spectral_norm(kern @ kern.conj().T - proj)
    else:
        kernel_res = float("inf")
    return PreventiveReport(
        image_ok=image_ok,
        image_residuals=image_res,
        kernel_ok=kernel_res <= max(tol, 1e-8),
        kernel_residual=kernel_res,
        kernel_dim=kdim,
    )
