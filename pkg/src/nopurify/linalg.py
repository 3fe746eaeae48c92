"""Small dense complex linear algebra for two-qubit and four-qubit states.

Matrices are plain ``numpy`` arrays of dtype ``complex128``; the largest
dimension used anywhere in the package is 16, so everything is dense.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

EPS_HERM = 1e-10
EPS_RECON = 1e-9
JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100


@dataclass(frozen=True)
class EigenResult:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None = None


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {a.shape}")
    return a


def kron(a, b) -> np.ndarray:
    """Kronecker product; entry ``(i*db + k, j*db + l)`` is ``a[i, j] * b[k, l]``."""
    a = as_matrix(a)
    b = as_matrix(b)
    da, db = a.shape[0], b.shape[0]
    out = a[:, None, :, None] * b[None, :, None, :]
    return out.reshape(da * db, da * db)


def _check_dims(rho: np.ndarray, dims: Sequence[int]) -> None:
    if int(np.prod(dims)) != rho.shape[0]:
        raise ValueError(f"subsystem dims {tuple(dims)} do not multiply to {rho.shape[0]}")


def partial_trace(rho, keep: Sequence[int], dims: Sequence[int]) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``."""
    rho = as_matrix(rho)
    dims = [int(d) for d in dims]
    _check_dims(rho, dims)
    keep = sorted(set(keep))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise ValueError(f"subsystem index out of range in {keep}")
    n = len(dims)
    t = rho.reshape(dims + dims)
    # trace from the highest index down so earlier axis numbers stay valid
    for s in reversed(range(n)):
        if s in keep:
            continue
        cur = t.ndim // 2
        t = np.trace(t, axis1=s, axis2=s + cur)
    d = int(np.prod([dims[k] for k in keep])) if keep else 1
    return t.reshape(d, d)


def partial_transpose(rho, sys: int, dims: Sequence[int]) -> np.ndarray:
    """Transpose subsystem ``sys`` of ``rho``."""
    rho = as_matrix(rho)
    dims = [int(d) for d in dims]
    _check_dims(rho, dims)
    n = len(dims)
    t = rho.reshape(dims + dims)
    axes = list(range(2 * n))
    axes[sys], axes[sys + n] = axes[sys + n], axes[sys]
    return t.transpose(axes).reshape(rho.shape)


def is_hermitian(h, tol: float = EPS_HERM) -> bool:
    h = as_matrix(h)
    return bool(np.max(np.abs(h - h.conj().T)) <= tol)


def _off_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.linalg.norm(off))


def hermitian_eig(h, vectors: bool = True) -> EigenResult:
    """Eigen-decompose a Hermitian matrix with cyclic complex Jacobi rotations.

    The input is symmetrized first. Eigenvalues come back sorted ascending and
    exactly real; eigenvectors are the columns of ``EigenResult.eigenvectors``.

    Raises
    ------
    ValueError
        If ``h`` departs from Hermitian by more than ``EPS_HERM`` entrywise.
    """
    h = as_matrix(h)
    if not is_hermitian(h):
        raise ValueError("matrix is not Hermitian within EPS_HERM")
    a = 0.5 * (h + h.conj().T)
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    scale = max(1.0, float(np.linalg.norm(a)))

    for _ in range(JACOBI_MAX_SWEEPS):
        if _off_norm(a) < JACOBI_TOL * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag < 1e-300:
                    continue
                phase = apq / mag
                app, aqq = a[p, p].real, a[q, q].real
                tau = (aqq - app) / (2.0 * mag)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # rotation = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                g = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = g.conj().T @ a[idx, :]
                a[q, p] = a[p, q] = 0.0
                v[:, idx] = v[:, idx] @ g
    else:
        if _off_norm(a) >= JACOBI_TOL * scale:
            raise RuntimeError("Jacobi iteration did not converge")

    lam = np.diag(a).real.copy()
    order = np.argsort(lam, kind="stable")
    lam = lam[order]
    return EigenResult(lam, v[:, order] if vectors else None)


def eigvalsh(h) -> np.ndarray:
    return hermitian_eig(h, vectors=False).eigenvalues
