"""Quadratic output-purity curves of two-copy protocols and why none purifies.

A twirled two-copy protocol is fixed by the purities ``q_ij`` it assigns to
the four product inputs ``s_i (x) s_j``; its output purity on two copies of
``s(p)`` is then the quadratic

    Q(p) = p^2 q00 + p (1 - p) (q01 + q10) + (1 - p)^2 q11.

Purification needs Q to stay inside [0, 1] (universal), not lift the
separable boundary point (separability preserving) and yet beat the identity
somewhere above the boundary (useful). The functions here check those
conditions in closed form, with exact arithmetic when handed Fractions.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Sequence

import numpy as np

FLOAT_MARGIN = 1e-12


@dataclass(frozen=True)
class QuadCoeffs:
    q00: object
    q01: object
    q10: object
    q11: object

    def as_tuple(self) -> tuple:
        return (self.q00, self.q01, self.q10, self.q11)

    def mix(self, other: "QuadCoeffs", lam) -> "QuadCoeffs":
        """Coefficients of the protocol running ``self`` w.p. ``lam``, else ``other``."""
        return QuadCoeffs(*(lam * u + (1 - lam) * v for u, v in zip(self.as_tuple(), other.as_tuple())))


@dataclass(frozen=True)
class QFunction:
    coeffs: QuadCoeffs
    p_s: object

    def __post_init__(self):
        if not 0 < self.p_s < 1:
            raise ValueError(f"separable threshold must lie in (0, 1), got {self.p_s}")

    @classmethod
    def from_polynomial(cls, monomial: Sequence, p_s) -> "QFunction":
        """Build from ``[c0, c1, c2]`` with ``Q(p) = c0 + c1 p + c2 p^2``.

        Anything of higher degree is rejected: two copies only ever give a
        quadratic.
        """
        monomial = list(monomial)
        while len(monomial) > 3 and monomial[-1] == 0:
            monomial.pop()
        if len(monomial) > 3:
            raise ValueError(f"degree {len(monomial) - 1} curve is not a two-copy quadratic")
        c0, c1, c2 = (list(monomial) + [0, 0, 0])[:3]
        # c0 = q11, c1 = s - 2 q11, c2 = q00 - s + q11 with s = q01 + q10
        q11 = c0
        s = c1 + 2 * q11
        q00 = c2 + s - q11
        return cls(QuadCoeffs(q00, s / 2, s / 2, q11), p_s)

    def monomial(self) -> tuple:
        """``(c0, c1, c2)`` with ``Q(p) = c0 + c1 p + c2 p^2``."""
        q00, q01, q10, q11 = self.coeffs.as_tuple()
        s = q01 + q10
        return (q11, s - 2 * q11, q00 - s + q11)

    def __call__(self, p):
        return q_of_p(self, p)


@dataclass
class ConditionReport:
    universal: bool
    separability_preserving: bool
    useful: bool
    quadratic: bool
    p_e: object | None
    relations: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["p_e"] = None if self.p_e is None else float(self.p_e)
        d["relations"] = {k: float(v) for k, v in self.relations.items()}
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def q_of_p(f: QFunction, p):
    q00, q01, q10, q11 = f.coeffs.as_tuple()
    return p * p * q00 + p * (1 - p) * (q01 + q10) + (1 - p) * (1 - p) * q11


def _exact(f: QFunction) -> bool:
    return all(isinstance(v, Rational) for v in f.coeffs.as_tuple() + (f.p_s,))


def _range(c0, c1, c2, lo, hi):
    """Min and max of ``c0 + c1 p + c2 p^2`` over ``[lo, hi]``."""
    pts = [lo, hi]
    if c2 != 0:
        v = -c1 / (2 * c2)
        if lo < v < hi:
            pts.append(v)
    vals = [c0 + c1 * p + c2 * p * p for p in pts]
    return min(vals), max(vals)


def _best_gap(c0, c1, c2, p_s, margin):
    """Sup of ``Q(p) - p`` over ``(p_s, 1]`` and a point ``p_e`` that beats ``margin``.

    The sup is the largest of the vertex (when inside), ``p = 1`` and the limit
    at ``p_s``. If only the limit is positive, points just above ``p_s`` are,
    by continuity; one is found by halving the distance to ``p_s``.
    """
    h1 = c1 - 1

    def h(p):
        return c0 + h1 * p + c2 * p * p

    cands = [(h(1), 1)]
    if c2 != 0:
        v = -h1 / (2 * c2)
        if p_s < v < 1:
            cands.append((h(v), v))
    best, where = max(cands, key=lambda t: t[0])
    limit = h(p_s)
    sup = max(best, limit)
    if best > margin or limit <= margin:
        return sup, (where if best > margin else None)
    step = (1 - p_s) / 2
    while h(p_s + step) <= margin:
        step /= 2
    return sup, p_s + step


def check_conditions(f: QFunction) -> ConditionReport:
    """Evaluate the universal, separability-preserving, useful and quadratic conditions.

    Universality is range containment of the quadratic over ``[0, 1]``;
    usefulness asks for an attained point ``p_e > p_s`` with ``Q(p_e) > p_e``,
    found from the vertex and right endpoint of ``Q(p) - p``. Rational input
    is compared with zero margin, floats with ``FLOAT_MARGIN``.
    """
    exact = _exact(f)
    if exact:
        f = QFunction(QuadCoeffs(*(Fraction(v) for v in f.coeffs.as_tuple())), Fraction(f.p_s))
    margin = 0 if exact else FLOAT_MARGIN
    c0, c1, c2 = f.monomial()
    p_s = f.p_s

    lo, hi = _range(c0, c1, c2, 0, 1)
    universal = lo >= -margin and hi <= 1 + margin
    q_ps = q_of_p(f, p_s)
    sep = q_ps <= p_s + margin
    sup, where = _best_gap(c0, c1, c2, p_s, margin)
    useful = where is not None
    relations = {
        "q_at_0": q_of_p(f, 0),
        "ps_minus_q_at_ps": p_s - q_ps,
        "sup_gap_above_ps": sup,
        "one_minus_q_at_1": 1 - q_of_p(f, 1),
    }
    return ConditionReport(
        universal=bool(universal),
        separability_preserving=bool(sep),
        useful=bool(useful),
        quadratic=True,
        p_e=where,
        relations=relations,
    )


def _violations(q: np.ndarray, p_s: float, margin: float = FLOAT_MARGIN) -> tuple[int, int]:
    """Vectorized check over rows of ``q = [q00, q01, q10, q11]``.

    Returns ``(kept, violations)``: rows meeting the universal and
    separability-preserving conditions, and those among them that are useful.
    """
    q00, q01, q10, q11 = q.T
    s = q01 + q10
    c0, c1, c2 = q11, s - 2 * q11, q00 - s + q11

    # range of Q over [0, 1]: endpoints q11 and q00 plus an interior vertex
    lo = np.minimum(q00, q11)
    hi = np.maximum(q00, q11)
    with np.errstate(divide="ignore", invalid="ignore"):
        v = np.where(c2 != 0, -c1 / (2 * c2), -1.0)
    inside = (v > 0) & (v < 1)
    qv = c0 + c1 * v + c2 * v * v
    lo = np.where(inside, np.minimum(lo, qv), lo)
    hi = np.where(inside, np.maximum(hi, qv), hi)
    universal = (lo >= -margin) & (hi <= 1 + margin)

    sep = c0 + c1 * p_s + c2 * p_s * p_s <= p_s + margin
    ok = universal & sep

    h1 = c1 - 1
    best = c0 + h1 + c2
    with np.errstate(divide="ignore", invalid="ignore"):
        w = np.where(c2 != 0, -h1 / (2 * c2), -1.0)
    winside = (w > p_s) & (w < 1)
    best = np.where(winside, np.maximum(best, c0 + h1 * w + c2 * w * w), best)
    # a positive limit at p_s is approached by attained points just above it
    useful = np.maximum(best, c0 + h1 * p_s + c2 * p_s * p_s) > margin
    return int(ok.sum()), int((ok & useful).sum())


def theorem_scan(p_s: float, samples: int, seed: int, chunk: int = 250_000) -> int:
    """Sample coefficient quadruples uniformly from the unit cube; count how many
    meet the universal and separability-preserving conditions and are still
    useful. The count is zero unless something is wrong."""
    if not 0 < p_s < 1:
        raise ValueError("p_s must lie in (0, 1)")
    if samples < 1:
        raise ValueError("need at least one sample")
    rng = np.random.default_rng(seed)
    bad = 0
    left = samples
    while left:
        n = min(chunk, left)
        _, v = _violations(rng.random((n, 4)), p_s)
        bad += v
        left -= n
    return bad


def scan_kept(p_s: float, samples: int, seed: int, chunk: int = 250_000) -> tuple[int, int]:
    """Like :func:`theorem_scan` but also reports how many samples were tested."""
    rng = np.random.default_rng(seed)
    kept = bad = 0
    left = samples
    while left:
        n = min(chunk, left)
        k, v = _violations(rng.random((n, 4)), p_s)
        kept += k
        bad += v
        left -= n
    return kept, bad


def corner_sweep(p_s) -> int:
    """Exact check of all 81 quadruples with entries in ``{0, 1/2, 1}``."""
    levels = (Fraction(0), Fraction(1, 2), Fraction(1))
    p_s = Fraction(p_s)
    bad = 0
    for q in itertools.product(levels, repeat=4):
        r = check_conditions(QFunction(QuadCoeffs(*q), p_s))
        if r.universal and r.separability_preserving and r.useful:
            bad += 1
    return bad


@dataclass
class RegionData:
    regions: list[dict]
    curves: list[dict]

    def regions_csv(self) -> str:
        return _csv(["region_id", "p", "q_min", "q_max"], self.regions)

    def curves_csv(self) -> str:
        return _csv(["curve_id", "p", "q"], self.curves)


def _fmt(v) -> str:
    return v if isinstance(v, str) else format(float(v), ".17g")


def _csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in columns])
    return buf.getvalue()


def figure1_regions(p_s: float, p_e: float, points: int = 101) -> RegionData:
    """Constraint windows a purifying quadratic would have to pass through, plus
    sample curves: the identity and a quadratic that threads the last three
    windows but leaves the first.

    The window at ``p_e`` is open at its lower end.
    """
    if not 0 < p_s < p_e < 1:
        raise ValueError("need 0 < p_s < p_e < 1")
    regions = [
        {"region_id": "Q0_nonneg", "p": 0.0, "q_min": 0.0, "q_max": 1.0},
        {"region_id": "Qps_le_ps", "p": p_s, "q_min": 0.0, "q_max": p_s},
        {"region_id": "Qpe_gt_pe", "p": p_e, "q_min": p_e, "q_max": 1.0},
        {"region_id": "Q1_le_1", "p": 1.0, "q_min": 0.0, "q_max": 1.0},
    ]
    # quadratic through (p_s, p_s), (p_e, p_e + lift), (1, 1)
    lift = 0.5 * (1.0 - p_e)
    xs = np.array([p_s, p_e, 1.0])
    ys = np.array([p_s, p_e + lift, 1.0])
    coef = np.polyfit(xs, ys, 2)
    curves = []
    for p in np.linspace(0.0, 1.0, points):
        curves.append({"curve_id": "identity", "p": p, "q": p})
    for p in np.linspace(0.0, 1.0, points):
        curves.append({"curve_id": "failed_attempt", "p": p, "q": float(np.polyval(coef, p))})
    return RegionData(regions, curves)
