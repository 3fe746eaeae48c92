"""Phase-one simplex for ``A x = b, x >= 0`` feasibility.

Works over any ordered field the arithmetic operators support: with
``fractions.Fraction`` entries the answer is exact, with floats pivots and the
final residual are compared against tolerances.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


@dataclass
class PhaseOneResult:
    feasible: bool
    x: list | None
    residual: object  # optimal sum of artificial variables
    pivots: int


def _is_exact(values) -> bool:
    return all(isinstance(v, (int, Fraction)) for v in values)


def phase_one(
    A: Sequence[Sequence],
    b: Sequence,
    pivot_eps: float = 1e-12,
    margin: float = 1e-9,
    max_pivots: int = 10_000,
) -> PhaseOneResult:
    """Decide whether ``A x = b`` has a non-negative solution.

    Bland's rule is used for both the entering and leaving variable, so the
    method terminates on degenerate problems. Redundant equality rows are
    harmless: their artificial variables stay basic at level zero.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    flat = [v for row in A for v in row] + list(b)
    exact = _is_exact(flat)
    if exact:
        zero, eps, tol = Fraction(0), Fraction(0), Fraction(0)
        conv = Fraction
    else:
        zero, eps, tol = 0.0, pivot_eps, margin
        conv = float

    # tableau columns: n structural, m artificial, rhs
    T = []
    for i in range(m):
        sign = -1 if b[i] < 0 else 1
        row = [conv(sign * A[i][j]) for j in range(n)]
        row += [conv(1) if k == i else zero for k in range(m)]
        row.append(conv(sign * b[i]))
        T.append(row)
    basis = [n + i for i in range(m)]
    # reduced costs of  min sum(artificials)
    cost = [zero] * (n + m + 1)
    for i in range(m):
        for j in range(n):
            cost[j] -= T[i][j]
        cost[-1] -= T[i][-1]

    pivots = 0
    while True:
        enter = next((j for j in range(n + m) if cost[j] < -eps), None)
        if enter is None:
            break
        best = None
        for i in range(m):
            a = T[i][enter]
            if a > eps:
                ratio = T[i][-1] / a
                cand = (ratio, basis[i], i)
                if best is None or cand[:2] < best[:2]:
                    best = cand
        if best is None:  # cannot happen: phase one is bounded below by 0
            raise RuntimeError("phase-one objective unbounded")
        r = best[2]
        piv = T[r][enter]
        T[r] = [v / piv for v in T[r]]
        for i in range(m):
            f = T[i][enter]
            if i != r and f != 0:
                T[i] = [vi - f * vr for vi, vr in zip(T[i], T[r])]
        f = cost[enter]
        cost = [vc - f * vr for vc, vr in zip(cost, T[r])]
        basis[r] = enter
        pivots += 1
        if pivots > max_pivots:
            raise RuntimeError("simplex pivot limit exceeded")

    residual = -cost[-1]
    feasible = residual <= tol
    x = None
    if feasible:
        x = [zero] * n
        for i, j in enumerate(basis):
            if j < n:
                x[j] = T[i][-1]
    return PhaseOneResult(feasible, x, residual, pivots)
