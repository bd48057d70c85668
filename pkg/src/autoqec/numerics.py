"""Dense complex linear algebra used throughout the package.

Operators are plain 2-D ``numpy`` arrays of dtype ``complex128``. Superoperators
act on column-stacked operators, ``vec(A X B) = (B.T kron A) vec(X)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.linalg as sla

#: Largest Hilbert-space dimension accepted by superoperator construction.
MAX_HILBERT_DIM = 64


class SpectralError(ValueError):
    """Raised when a spectral construction is ill-posed (no gap, singular complement)."""


def as_cmatrix(a, name: str = "matrix") -> np.ndarray:
    """Return ``a`` as a finite 2-D complex array, raising on NaN/Inf or bad rank."""
    arr = np.asarray(a, dtype=complex)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def _require_square(a: np.ndarray, name: str = "matrix") -> None:
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square, got shape {a.shape}")


def check_dim(n: int) -> None:
    if n > MAX_HILBERT_DIM:
        raise ValueError(
            f"Hilbert dimension {n} exceeds the dense cap of {MAX_HILBERT_DIM}"
        )


def vec(x: np.ndarray) -> np.ndarray:
    """Column-stack an operator into a vector."""
    return np.asarray(x).reshape(-1, order="F")


def unvec(v: np.ndarray, n: int | None = None) -> np.ndarray:
    """Inverse of :func:`vec`."""
    v = np.asarray(v)
    if n is None:
        n = int(round(np.sqrt(v.size)))
    return v.reshape((n, n), order="F")


def spectral_norm(a) -> float:
    """Largest singular value; 0 for empty input."""
    a = np.asarray(a, dtype=complex)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def _random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def superop_norm_bound(
    y, base_dim: int, n_random: int = 8, seed: int = 0
) -> tuple[float, float]:
    """Bracket the induced norm ``sup_{||X||=1} ||Y(X)||`` (spectral norms).

    The lower bound evaluates ``Y`` on unit-norm probes: all matrix units, the
    identity, ``n_random`` Haar-random unitaries and the top right singular
    vector of ``Y`` rescaled to unit operator norm. The upper bound is
    ``sqrt(base_dim) * ||Y||_2``, from ``||X|| <= ||X||_F <= sqrt(n) ||X||``.

    Parameters
    ----------
    y : array_like, shape (n**2, n**2)
        Superoperator matrix in the column-stacking convention.
    base_dim : int
        Hilbert-space dimension ``n``.
    n_random : int
        Number of random unitary probes.
    seed : int
        Seed for the probe generator.

    Returns
    -------
    (lower, upper) : tuple of float
    """
    y = np.asarray(y, dtype=complex)
    n = int(base_dim)
    if y.shape != (n * n, n * n):
        raise ValueError(
            f"superoperator shape {y.shape} is not ({n * n}, {n * n})"
        )
    if n == 0:
        return 0.0, 0.0
    upper = np.sqrt(n) * spectral_norm(y)
    if upper == 0.0:
        return 0.0, 0.0

    def probe(x):
        x = x / spectral_norm(x)
        return spectral_norm(unvec(y @ vec(x), n))

    lower = 0.0
    for i in range(n):
        for j in range(n):
            e = np.zeros((n, n), dtype=complex)
            e[i, j] = 1.0
            lower = max(lower, probe(e))
    lower = max(lower, probe(np.eye(n, dtype=complex)))
    rng = np.random.default_rng(seed)
    for _ in range(n_random):
        lower = max(lower, probe(_random_unitary(n, rng)))
    _, _, vh = np.linalg.svd(y)
    top = unvec(vh[0].conj(), n)
    if spectral_norm(top) > 0:
        lower = max(lower, probe(top))
    return float(lower), float(max(upper, lower))


def expm(a) -> np.ndarray:
    """Matrix exponential by scaling and squaring with a Padé approximant."""
    a = as_cmatrix(a)
    _require_square(a)
    if a.shape[0] == 0:
        return a.copy()
    return sla.expm(a)


def null_space(a, tol: float) -> np.ndarray:
    """Orthonormal basis (as columns) of right singular vectors with ``s < tol``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    a = as_cmatrix(a)
    _require_square(a)
    n = a.shape[1]
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    _, s, vh = np.linalg.svd(a)
    mask = np.ones(n, dtype=bool)
    mask[: s.size] = s < tol
    return vh[mask].conj().T


def gram_schmidt(
    vectors: Sequence[np.ndarray], drop_tol: float = 1e-10
) -> tuple[list[np.ndarray], list[int]]:
    """Classical Gram-Schmidt in the given order.

    Vectors whose residual norm falls below ``drop_tol`` are dropped. A second
    projection pass is applied to every kept vector to hold orthonormality at
    round-off level.

    Returns
    -------
    basis : list of ndarray
    kept : list of int
        Indices (into ``vectors``) of the vectors that produced basis elements.
    """
    basis: list[np.ndarray] = []
    kept: list[int] = []
    for idx, v in enumerate(vectors):
        r = np.asarray(v, dtype=complex).ravel().copy()
        for _ in range(2):
            for b in basis:
                r -= (b.conj() @ r) * b
        norm = np.linalg.norm(r)
        if norm < drop_tol:
            continue
        basis.append(r / norm)
        kept.append(idx)
    return basis, kept


@dataclass(frozen=True)
class SpectralDecomposition:
    eigenvalues: np.ndarray
    right: np.ndarray
    left: np.ndarray

    def reconstruction_error(self, a) -> float:
        v = self.right
        return spectral_norm(a - v @ np.diag(self.eigenvalues) @ np.linalg.inv(v))


def eigendecompose(a) -> SpectralDecomposition:
    """Eigenvalues with right and left eigenvectors (``w^H A = lambda w^H``)."""
    a = as_cmatrix(a)
    _require_square(a)
    w, vl, vr = sla.eig(a, left=True, right=True)
    return SpectralDecomposition(eigenvalues=w, right=vr, left=vl)


def zero_cluster(a, rtol: float = 1e-7) -> Callable[[complex], bool]:
    """Predicate selecting eigenvalues of ``a`` that vanish to ``rtol * ||a||``."""
    thresh = rtol * max(1.0, spectral_norm(a))
    return lambda lam: abs(lam) <= thresh


def spectral_projector(
    a,
    cluster: Callable[[complex], bool],
    gap_tol: float | None = None,
    defect_tol: float = 1e-8,
) -> np.ndarray:
    """Spectral (Riesz) projector of ``a`` onto an eigenvalue cluster.

    Built as ``V_c (W_c^H V_c)^{-1} W_c^H`` from the right and left eigenvectors
    of the cluster, which reduces to ``sum v w^H`` with ``w^H v = 1`` when the
    cluster eigenvalues are simple. If the cluster is defective to working
    precision, the projector is taken as ``lim_{t->inf} exp(t a)``; that route
    requires every eigenvalue outside the cluster to have negative real part.

    Raises
    ------
    SpectralError
        If the cluster is closer than ``gap_tol`` to the rest of the spectrum,
        or it is defective and the long-time limit does not exist.
    """
    a = as_cmatrix(a)
    _require_square(a)
    n = a.shape[0]
    scale = spectral_norm(a)
    if gap_tol is None:
        gap_tol = 1e-8 * scale
    dec = eigendecompose(a)
    lam = dec.eigenvalues
    inside = np.array([bool(cluster(x)) for x in lam], dtype=bool)
    if not inside.any():
        return np.zeros((n, n), dtype=complex)
    if inside.all():
        return np.eye(n, dtype=complex)

    dist = np.abs(lam[inside][:, None] - lam[~inside][None, :])
    if dist.min() < gap_tol:
        i, j = np.unravel_index(np.argmin(dist), dist.shape)
        raise SpectralError(
            "eigenvalue cluster not separated: "
            f"{lam[inside][i]:.3e} (inside) vs {lam[~inside][j]:.3e} (outside)"
        )

    vc = dec.right[:, inside]
    wc = dec.left[:, inside]
    gram = wc.conj().T @ vc
    sv = np.linalg.svd(vc, compute_uv=False)
    if np.linalg.cond(gram) * defect_tol < 1 and sv[-1] / sv[0] > defect_tol:
        p = vc @ np.linalg.solve(gram, wc.conj().T)
        if spectral_norm(a @ p - p @ a) <= 1e-6 * max(1.0, scale):
            return p
    return _projector_by_propagation(a, inside, lam)


def _projector_by_propagation(a, inside, lam) -> np.ndarray:
    outside = lam[~inside]
    if np.any(outside.real >= 0):
        raise SpectralError(
            "defective cluster and complement not strictly decaying; "
            "long-time projector undefined"
        )
    rate = float(np.min(-outside.real))
    p = expm((60.0 / rate) * a)
    if spectral_norm(p @ p - p) > 1e-6:
        raise SpectralError("long-time propagator is not idempotent (Jordan block at 0?)")
    return p


def reduced_resolvent(a, p, cond_max: float = 1e12) -> np.ndarray:
    """Inverse of ``a`` on the complement of the invariant subspace ``range(p)``.

    Returns ``S`` with ``S a = a S = 1 - p`` and ``p S = S p = 0``; computed as
    ``(a (1 - p) + p)^{-1} (1 - p)``. This is not the Moore-Penrose inverse
    when ``a`` is non-normal.
    """
    a = as_cmatrix(a)
    p = as_cmatrix(p, "projector")
    _require_square(a)
    if p.shape != a.shape:
        raise ValueError("projector shape does not match operator")
    n = a.shape[0]
    q = np.eye(n) - p
    b = a @ q + p
    if np.linalg.cond(b) > cond_max:
        raise SpectralError("operator is singular on the complement of the projector")
    return np.linalg.solve(b, q)
