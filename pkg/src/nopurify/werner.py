"""Werner states, their twirl, the PPT test, and recurrence purification.

Qubit order is (Alice, Bob) and the singlet is ``(|01> - |10>)/sqrt(2)``.
For the two-copy protocol the 16-dimensional register is ordered
``(A1, B1, A2, B2)``: pair 1 is the source pair, pair 2 the target pair.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .linalg import (
    EPS_HERM,
    as_matrix,
    eigvalsh,
    kron,
    partial_trace,
    partial_transpose,
)

WERNER_PS = 0.5
BRANCH_EPS = 1e-14

I2 = np.eye(2, dtype=np.complex128)
X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)
S = np.array([[1, 0], [0, 1j]], dtype=np.complex128)

PSI_MINUS = np.array([0, 1, -1, 0], dtype=np.complex128) / np.sqrt(2)
SINGLET = np.outer(PSI_MINUS, PSI_MINUS.conj())
NOISE = (np.eye(4) - SINGLET) / 3.0

# Y on Alice maps |psi-> to i|phi+>, the Bell state the bilateral CNOT step
# purifies towards. Y is self-inverse, so the same gate maps back.
PRE_ROTATION = kron(Y, I2)


@dataclass(frozen=True)
class ProtocolOutcome:
    """Result of one post-selected two-copy step on Werner inputs.

    ``out_purity_deterministic`` is what a three-copy protocol delivers when a
    failed step falls back on an untouched third copy.
    """

    success_prob: float
    out_purity_success: float
    out_purity_deterministic: float


def _check_p(p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"Werner parameter must lie in [0, 1], got {p}")
    return p


def werner_state(p: float) -> np.ndarray:
    """Return ``p * singlet + (1 - p) * (1 - singlet) / 3``."""
    p = _check_p(p)
    return p * SINGLET + (1.0 - p) * NOISE


def validate_state(rho, tol: float = EPS_HERM) -> np.ndarray:
    rho = as_matrix(rho)
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > tol:
        raise ValueError("density matrix does not have unit trace")
    if eigvalsh(rho)[0] < -tol:
        raise ValueError("density matrix is not positive semidefinite")
    return rho


def singlet_fidelity(rho) -> float:
    """Overlap ``<psi-| rho |psi->``, i.e. the Werner parameter of the twirled state."""
    rho = as_matrix(rho)
    return float(np.real(PSI_MINUS.conj() @ rho @ PSI_MINUS))


@lru_cache(maxsize=None)
def clifford_group() -> tuple[np.ndarray, ...]:
    """The 24 single-qubit Clifford unitaries, generated from H and S.

    Elements equal up to a global phase are identified.
    """

    def key(u):
        flat = u.ravel()
        k = int(np.flatnonzero(np.abs(flat) > 1e-9)[0])
        v = flat * (abs(flat[k]) / flat[k])
        return tuple(np.round(v.real, 9)) + tuple(np.round(v.imag, 9))

    group = {key(I2): I2}
    frontier = [I2]
    while frontier:
        nxt = []
        for u in frontier:
            for g in (H, S):
                w = g @ u
                k = key(w)
                if k not in group:
                    group[k] = w
                    nxt.append(w)
        frontier = nxt
    return tuple(group.values())


def twirl_quantum(rho, method: str = "closed_form") -> np.ndarray:
    """Project a two-qubit state onto the Werner family.

    ``closed_form`` uses the fact that the ``U (x) U`` average keeps only the
    singlet weight; ``two_design`` averages ``(U (x) U) rho (U (x) U)^dag`` over
    the single-qubit Clifford group.
    """
    rho = as_matrix(rho)
    if method == "closed_form":
        f = singlet_fidelity(rho)
        return f * SINGLET + (1.0 - f) * NOISE
    if method == "two_design":
        group = clifford_group()
        acc = np.zeros((4, 4), dtype=np.complex128)
        for u in group:
            uu = kron(u, u)
            acc += uu @ rho @ uu.conj().T
        return acc / len(group)
    raise ValueError(f"unknown twirl method {method!r}")


def ppt_min_eigenvalue(rho) -> float:
    """Smallest eigenvalue of the partial transpose on Bob's qubit.

    For two qubits the state is separable iff this is non-negative.
    """
    return float(eigvalsh(partial_transpose(rho, 1, (2, 2)))[0])


def werner_threshold_bisect(tol: float = 1e-9) -> float:
    """Locate the separable/entangled boundary of the Werner family by bisection."""
    lo, hi = 0.25, 1.0  # PPT at the maximally mixed point, NPT at the singlet
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if ppt_min_eigenvalue(werner_state(mid)) >= 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _embed(u: np.ndarray, qubit: int, n: int = 4) -> np.ndarray:
    out = np.eye(1, dtype=np.complex128)
    for k in range(n):
        out = kron(out, u if k == qubit else I2)
    return out


def _cnot(control: int, target: int, n: int = 4) -> np.ndarray:
    dim = 2**n
    perm = np.zeros((dim, dim), dtype=np.complex128)
    for i in range(dim):
        bits = [(i >> (n - 1 - k)) & 1 for k in range(n)]
        if bits[control]:
            bits[target] ^= 1
        j = sum(b << (n - 1 - k) for k, b in enumerate(bits))
        perm[j, i] = 1.0
    return perm


@lru_cache(maxsize=None)
def _bbpssw_operators() -> tuple[np.ndarray, list[np.ndarray]]:
    # register (A1, B1, A2, B2)
    pre = _embed(Y, 0) @ _embed(Y, 2)
    bcnot = _cnot(0, 2) @ _cnot(1, 3)
    circuit = bcnot @ pre
    keep = []
    for outcome in (0, 1):
        ket = np.zeros(2)
        ket[outcome] = 1.0
        proj = np.outer(ket, ket).astype(np.complex128)
        keep.append(kron(kron(I2, I2), kron(proj, proj)))
    return circuit, keep


def bbpssw_step(p: float) -> ProtocolOutcome:
    """Simulate one round of the bilateral-CNOT recurrence protocol on two Werner pairs.

    The step succeeds when both target qubits read the same value; the
    surviving source pair is rotated back and twirled into the Werner family.
    """
    p = _check_p(p)
    w = werner_state(p)
    circuit, keep = _bbpssw_operators()
    rho = circuit @ kron(w, w) @ circuit.conj().T

    branch = np.zeros((16, 16), dtype=np.complex128)
    for proj in keep:
        branch += proj @ rho @ proj
    prob = float(np.real(np.trace(branch)))
    if prob < BRANCH_EPS:
        # success impossible: the step hands back the input untouched
        return ProtocolOutcome(0.0, p, p)

    source = partial_trace(branch, keep=[0, 1], dims=[2, 2, 2, 2]) / prob
    source = PRE_ROTATION @ source @ PRE_ROTATION.conj().T
    out = singlet_fidelity(twirl_quantum(source))
    det = prob * out + (1.0 - prob) * p
    return ProtocolOutcome(prob, out, det)


def three_copy_protocol(p: float) -> float:
    """Deterministic three-copy purification: try two copies, else keep the third."""
    return bbpssw_step(p).out_purity_deterministic


def three_copy_formula(p: float) -> float:
    return (-8.0 * p**3 + 14.0 * p**2 + 2.0 * p + 1.0) / 9.0


def random_state(rng: np.random.Generator, dim: int = 4) -> np.ndarray:
    """Random full-rank density matrix from a complex Ginibre matrix."""
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


def p_grid(points: int = 101, lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
    if points < 2:
        raise ValueError("a grid needs at least two points")
    return np.linspace(lo, hi, points)


__all__ = [
    "ProtocolOutcome",
    "SINGLET",
    "NOISE",
    "PSI_MINUS",
    "WERNER_PS",
    "bbpssw_step",
    "clifford_group",
    "p_grid",
    "ppt_min_eigenvalue",
    "random_state",
    "singlet_fidelity",
    "three_copy_formula",
    "three_copy_protocol",
    "twirl_quantum",
    "validate_state",
    "werner_state",
    "werner_threshold_bisect",
]
