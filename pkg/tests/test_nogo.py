import csv
import io
import json
from fractions import Fraction as F

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from nopurify.nogo import (
    QFunction,
    QuadCoeffs,
    check_conditions,
    corner_sweep,
    figure1_regions,
    q_of_p,
    scan_kept,
    theorem_scan,
)
from nopurify.werner import three_copy_formula

unit = st.fractions(0, 1, max_denominator=64)
thresholds = st.fractions(F(1, 64), F(63, 64), max_denominator=64)


def test_identity_quadratic():
    f = QFunction(QuadCoeffs(1, F(1, 2), F(1, 2), 0), F(3, 4))
    for p in (F(k, 10) for k in range(11)):
        assert q_of_p(f, p) == p


@given(unit, unit, unit, unit)
def test_endpoint_identities(a, b, c, d):
    f = QFunction(QuadCoeffs(a, b, c, d), F(1, 2))
    assert q_of_p(f, 0) == d
    assert q_of_p(f, 1) == a


def test_identity_is_not_useful():
    r = check_conditions(QFunction(QuadCoeffs(1, F(1, 2), F(1, 2), 0), F(3, 4)))
    assert r.universal and r.separability_preserving and r.quadratic
    assert r.relations["ps_minus_q_at_ps"] == 0
    assert not r.useful and r.p_e is None


def test_cubic_is_rejected():
    cubic = [F(1, 9), F(2, 9), F(14, 9), F(-8, 9)]
    with pytest.raises(ValueError):
        QFunction.from_polynomial(cubic, F(1, 2))


def test_from_polynomial_round_trip():
    f = QFunction(QuadCoeffs(F(3, 4), F(1, 8), F(3, 8), F(1, 16)), F(3, 4))
    g = QFunction.from_polynomial(f.monomial(), F(3, 4))
    for p in (F(k, 7) for k in range(8)):
        assert q_of_p(f, p) == q_of_p(g, p)


def test_frozen_report_for_one_zero_zero_one():
    # Q(p) = p^2 + (1 - p)^2; Q(p) - p = (2p - 1)(p - 1) < 0 on (1/2, 1)
    r = check_conditions(QFunction(QuadCoeffs(1, 0, 0, 1), F(1, 2)))
    assert (r.universal, r.separability_preserving, r.useful, r.quadratic) == (True, True, False, True)
    assert r.relations == {
        "q_at_0": 1,
        "ps_minus_q_at_ps": 0,
        "sup_gap_above_ps": 0,
        "one_minus_q_at_1": 0,
    }
    assert json.loads(r.to_json())["useful"] is False


def test_useful_curve_is_detected():
    # lifts every point but violates separability preservation
    f = QFunction(QuadCoeffs(1, 1, 1, F(1, 2)), F(1, 2))
    r = check_conditions(f)
    assert r.useful and F(1, 2) < r.p_e <= 1
    assert q_of_p(f, r.p_e) > r.p_e
    assert not r.separability_preserving


def test_useful_only_near_the_threshold():
    # Q(p) - p = 1/4 - p/2: positive on (1/3, 1/2) only
    f = QFunction.from_polynomial([F(1, 4), F(1, 2), F(0)], F(1, 3))
    r = check_conditions(f)
    assert r.useful
    assert F(1, 3) < r.p_e < F(1, 2)
    assert q_of_p(f, r.p_e) > r.p_e


def test_universality_uses_range_not_coefficients():
    # coefficients outside [0, 1] with Q(0) < 0
    r = check_conditions(QFunction(QuadCoeffs(1, 2, 2, F(-1, 10)), F(1, 2)))
    assert not r.universal
    # a vertex above 1 inside the interval
    r = check_conditions(QFunction(QuadCoeffs(1, F(3, 2), F(3, 2), 1), F(1, 2)))
    assert not r.universal


def test_float_and_exact_agree():
    a = check_conditions(QFunction(QuadCoeffs(0.9, 0.3, 0.4, 0.1), 0.75))
    b = check_conditions(QFunction(QuadCoeffs(F(9, 10), F(3, 10), F(4, 10), F(1, 10)), F(3, 4)))
    assert (a.universal, a.separability_preserving, a.useful) == (
        b.universal, b.separability_preserving, b.useful)


@settings(max_examples=300, deadline=None)
@given(unit, unit, unit, unit, thresholds)
def test_theorem_property_exact(a, b, c, d, p_s):
    r = check_conditions(QFunction(QuadCoeffs(a, b, c, d), p_s))
    assert r.quadratic
    if r.universal and r.separability_preserving:
        assert not r.useful


def test_theorem_scan_zero_counterexamples():
    assert theorem_scan(0.75, 200_000, seed=1) == 0
    assert theorem_scan(0.5, 200_000, seed=2) == 0
    kept, bad = scan_kept(0.75, 100_000, seed=3)
    assert kept > 50_000 and bad == 0


def test_theorem_scan_argument_checks():
    with pytest.raises(ValueError):
        theorem_scan(1.0, 10, 0)
    with pytest.raises(ValueError):
        theorem_scan(0.5, 0, 0)


def test_corner_sweep():
    assert corner_sweep(F(3, 4)) == 0
    assert corner_sweep(F(1, 2)) == 0


def test_scan_would_catch_a_cubic():
    # the three-copy cubic is universal, keeps p_s = 1/2 fixed, and is useful;
    # evaluated as a curve it is exactly what a quadratic cannot be
    ps = 0.5
    ps_val = three_copy_formula(ps)
    assert ps_val <= ps + 1e-15
    assert max(three_copy_formula(p) - p for p in np.linspace(0.5, 1, 101)[1:-1]) > 0


def test_three_fixed_points_force_identity():
    q00, q01, q10, q11, p = sp.symbols("q00 q01 q10 q11 p")
    Q = p**2 * q00 + p * (1 - p) * (q01 + q10) + (1 - p) ** 2 * q11
    r1, r2, r3 = sp.symbols("r1 r2 r3")
    eqs = [sp.Eq(Q.subs(p, r), r) for r in (r1, r2, r3)]
    sol = sp.solve(eqs, [q00, q11, q01], dict=True)
    assert len(sol) == 1
    s = sol[0]
    assert sp.simplify(s[q00] - 1) == 0
    assert sp.simplify(s[q11]) == 0
    assert sp.simplify(s[q01] + q10 - 1) == 0


@pytest.mark.parametrize("ps,pe", [(0.75, 0.875), (0.5, 0.75)])
def test_figure1_regions(ps, pe):
    data = figure1_regions(ps, pe)
    assert len(data.regions) == 4
    rows = list(csv.DictReader(io.StringIO(data.regions_csv())))
    assert list(rows[0]) == ["region_id", "p", "q_min", "q_max"]
    by_p = {float(r["p"]): (float(r["q_min"]), float(r["q_max"])) for r in rows}
    assert by_p == {0.0: (0.0, 1.0), ps: (0.0, ps), pe: (pe, 1.0), 1.0: (0.0, 1.0)}
    curves = list(csv.DictReader(io.StringIO(data.curves_csv())))
    failed = [(float(r["p"]), float(r["q"])) for r in curves if r["curve_id"] == "failed_attempt"]
    # the sample attempt threads the last three windows but leaves the first
    assert failed[0][1] < 0
    q = dict(failed)
    assert q[1.0] == pytest.approx(1.0)


def test_figure1_rejects_bad_order():
    with pytest.raises(ValueError):
        figure1_regions(0.8, 0.7)


def test_mixing_coefficients_is_linear():
    u = QuadCoeffs(F(1), F(1, 2), F(1, 4), F(0))
    v = QuadCoeffs(F(1, 3), F(1, 3), F(1, 3), F(1, 3))
    lam = F(2, 7)
    w = u.mix(v, lam)
    for p in (F(k, 5) for k in range(6)):
        fu, fv, fw = (q_of_p(QFunction(c, F(1, 2)), p) for c in (u, v, w))
        assert fw == lam * fu + (1 - lam) * fv
