"""Two-party binary-input binary-output boxes.

A box is a ``(2, 2, 2, 2)`` array indexed ``[x, y, a, b]`` holding
``P(ab|xy)``. Float arrays are the default; passing a ``Fraction`` weight to
:func:`noisy_pr` yields an object array of Fractions so the local-polytope
test can be run in exact arithmetic.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .simplex import phase_one

BOX_PS = 0.75
EPS_NORM = 1e-10
EPS_NEG = 1e-12
EPS_NS = 1e-10
LHV_MARGIN = 1e-9
TSIRELSON = 2.0 * np.sqrt(2.0)

BITS = (0, 1)
XYAB = tuple(itertools.product(BITS, repeat=4))

# deterministic local responses: f(x) = (code >> x) & 1, codes 0..3
LOCAL_FUNCTIONS = tuple(tuple((code >> x) & 1 for x in BITS) for code in range(4))


@dataclass
class LhvResult:
    """Outcome of the local-polytope membership test.

    ``weights[4 * f + g]`` multiplies the deterministic box
    ``[a = f(x)][b = g(y)]``; ``violation_margin`` is the optimal phase-one
    residual (zero when a local model exists).
    """

    feasible: bool
    weights: np.ndarray | None
    violation_margin: float


def _table(values, exact: bool) -> np.ndarray:
    if exact:
        out = np.empty((2, 2, 2, 2), dtype=object)
        for idx in XYAB:
            out[idx] = Fraction(values[idx])
        return out
    return np.asarray(values, dtype=float)


def pr_box(exact: bool = False) -> np.ndarray:
    """``P(ab|xy) = 1/2`` when ``a xor b == x*y``, else 0."""
    t = np.zeros((2, 2, 2, 2))
    for x, y, a, b in XYAB:
        if a ^ b == x * y:
            t[x, y, a, b] = 0.5
    return _table(t, exact)


def anti_pr_box(exact: bool = False) -> np.ndarray:
    t = np.zeros((2, 2, 2, 2))
    for x, y, a, b in XYAB:
        if a ^ b != x * y:
            t[x, y, a, b] = 0.5
    return _table(t, exact)


def noisy_pr(p) -> np.ndarray:
    """Mixture ``p * PR + (1 - p) * anti-PR``; exact if ``p`` is a Fraction."""
    exact = isinstance(p, Fraction)
    if not 0 <= p <= 1:
        raise ValueError(f"PR weight must lie in [0, 1], got {p}")
    return p * pr_box(exact) + (1 - p) * anti_pr_box(exact)


def uniform_box() -> np.ndarray:
    return np.full((2, 2, 2, 2), 0.25)


def deterministic_box(f, g) -> np.ndarray:
    """Box with ``a = f(x)`` and ``b = g(y)``; ``f``, ``g`` are callables or 2-tuples."""
    f = f if callable(f) else f.__getitem__
    g = g if callable(g) else g.__getitem__
    t = np.zeros((2, 2, 2, 2))
    for x, y in itertools.product(BITS, BITS):
        t[x, y, f(x), g(y)] = 1.0
    return t


def product_box(pa, pb) -> np.ndarray:
    """``P_A(a|x) * P_B(b|y)`` from ``(2, 2)`` arrays indexed ``[x, a]`` and ``[y, b]``."""
    pa = np.asarray(pa, dtype=float)
    pb = np.asarray(pb, dtype=float)
    return np.einsum("xa,yb->xyab", pa, pb)


def random_box(rng: np.random.Generator) -> np.ndarray:
    """Arbitrary (generally signalling) box: each input row normalized independently."""
    t = rng.random((2, 2, 4))
    t /= t.sum(axis=2, keepdims=True)
    return t.reshape(2, 2, 2, 2)


def validate_box(d) -> np.ndarray:
    t = np.asarray(d)
    if t.shape != (2, 2, 2, 2):
        raise ValueError(f"box must have shape (2, 2, 2, 2), got {t.shape}")
    if t.dtype == object:
        if any(v < 0 for v in t.ravel()):
            raise ValueError("box has negative entries")
        if any(sum(t[x, y].ravel()) != 1 for x in BITS for y in BITS):
            raise ValueError("box rows are not normalized")
        return t
    t = t.astype(float)
    if t.min() < -EPS_NEG:
        raise ValueError("box has negative entries")
    if np.max(np.abs(t.sum(axis=(2, 3)) - 1.0)) > EPS_NORM:
        raise ValueError("box rows are not normalized")
    return t


def is_nonsignalling(d, tol: float = EPS_NS) -> bool:
    t = np.asarray(d, dtype=float)
    alice = t.sum(axis=3)  # [x, y, a]
    bob = t.sum(axis=2)  # [x, y, b]
    return bool(
        np.max(np.abs(alice[:, 0] - alice[:, 1])) <= tol
        and np.max(np.abs(bob[0] - bob[1])) <= tol
    )


def correlators(d) -> np.ndarray:
    """``E[x, y] = P(a = b | xy) - P(a != b | xy)``."""
    t = np.asarray(d)
    return t[:, :, 0, 0] + t[:, :, 1, 1] - t[:, :, 0, 1] - t[:, :, 1, 0]


def chsh_value(d):
    e = correlators(d)
    return e[0, 0] + e[0, 1] + e[1, 0] - e[1, 1]


def pr_weight(d):
    """Average probability of the PR rule ``a xor b == x*y``; equals ``p`` on ``noisy_pr(p)``."""
    t = np.asarray(d)
    total = 0
    for x, y, a, b in XYAB:
        if a ^ b == x * y:
            total = total + t[x, y, a, b]
    return total / 4


def box_twirl(d) -> np.ndarray:
    """Average ``d`` over the eight local relabelings fixed by shared bits.

    For shared bits ``(al, be, ga)`` the relabeled box reads
    ``d[x^al, y^be, a ^ be*x ^ al*be ^ ga, b ^ al*y ^ ga]`` at ``[x, y, a, b]``.
    Each relabeling is a bijection on outputs for every input pair, so
    normalization is kept for signalling boxes too.
    """
    t = np.asarray(d)
    out = np.zeros((2, 2, 2, 2), dtype=t.dtype)
    if t.dtype == object:
        out[...] = Fraction(0)
    for al, be, ga in itertools.product(BITS, repeat=3):
        for x, y, a, b in XYAB:
            out[x, y, a, b] = out[x, y, a, b] + t[
                x ^ al, y ^ be, a ^ (be & x) ^ (al & be) ^ ga, b ^ (al & y) ^ ga
            ]
    return out / 8


def lhv_membership(d, margin: float = LHV_MARGIN) -> LhvResult:
    """Test whether ``d`` is a mixture of the 16 deterministic local boxes.

    Object arrays of Fractions are decided exactly; float tables use a
    double-precision simplex with feasibility margin ``margin``.
    """
    t = np.asarray(d)
    exact = t.dtype == object
    A = []
    b = []
    for x, y, a, bb in XYAB:
        row = []
        for f in LOCAL_FUNCTIONS:
            for g in LOCAL_FUNCTIONS:
                row.append(1 if (f[x] == a and g[y] == bb) else 0)
        A.append(row)
        b.append(t[x, y, a, bb] if exact else float(t[x, y, a, bb]))
    res = phase_one(A, b, margin=margin)
    resid = max(0.0, float(res.residual))
    if not res.feasible:
        return LhvResult(False, None, resid)
    if exact:
        w = np.empty(16, dtype=object)
        w[:] = res.x
    else:
        w = np.clip(np.array(res.x, dtype=float), 0.0, None)
    return LhvResult(True, w, resid)


def local_box(weights) -> np.ndarray:
    """Rebuild the box a vector of deterministic-strategy weights describes."""
    w = np.asarray(weights)
    out = np.zeros((2, 2, 2, 2), dtype=w.dtype)
    if w.dtype == object:
        out[...] = Fraction(0)
    k = 0
    for f in LOCAL_FUNCTIONS:
        for g in LOCAL_FUNCTIONS:
            for x, y in itertools.product(BITS, BITS):
                out[x, y, f[x], g[y]] = out[x, y, f[x], g[y]] + w[k]
            k += 1
    return out


def to_json(d) -> str:
    """16-element array in ``(x, y, a, b)`` lexicographic order."""
    return json.dumps([float(v) for v in np.asarray(d).ravel()])


def from_json(text: str) -> np.ndarray:
    values = json.loads(text)
    if len(values) != 16:
        raise ValueError(f"expected 16 entries, got {len(values)}")
    return validate_box(np.array(values, dtype=float).reshape(2, 2, 2, 2))


def max_abs_diff(d1, d2) -> float:
    return float(np.max(np.abs(np.asarray(d1, dtype=float) - np.asarray(d2, dtype=float))))
