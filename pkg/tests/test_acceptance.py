"""Exit criteria, one test each. A summary line per criterion is printed at
the end of the pytest run."""

import time
from fractions import Fraction

import numpy as np
import pytest

from nopurify import boxworld as bw
from nopurify import nogo
from nopurify import werner as qw
from nopurify import wirings as wr

from .conftest import ACCEPTANCE_LINES, random_nonsignalling_box


def verdict(tag, ok, detail):
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {tag}: {detail}")
    print(ACCEPTANCE_LINES[-1])
    assert ok, detail


@pytest.fixture(scope="module")
def full_search():
    t0 = time.perf_counter()
    rep = wr.search_all_wirings()
    return rep, time.perf_counter() - t0


def test_ac1_werner_threshold():
    t0 = time.perf_counter()
    ps = qw.werner_threshold_bisect()
    dt = time.perf_counter() - t0
    ok = abs(ps - 0.5) <= 1e-8 and dt < 1.0
    verdict("AC1 Werner threshold", ok, f"p_s={ps!r} (|err|<=1e-8), {dt:.3f}s (<1s)")


def test_ac2_quantum_twirl():
    rng = np.random.default_rng(2)
    t0 = time.perf_counter()
    worst = family = 0.0
    for _ in range(100):
        rho = qw.random_state(rng)
        closed = qw.twirl_quantum(rho, "closed_form")
        design = qw.twirl_quantum(rho, "two_design")
        worst = max(worst, np.max(np.abs(closed - design)))
        family = max(family, np.max(np.abs(design - qw.werner_state(qw.singlet_fidelity(design)))))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-10 and family <= 1e-10 and dt < 5.0
    verdict("AC2 quantum twirl", ok,
            f"2-design vs closed form {worst:.2e} (<=1e-10), off-family {family:.2e}, {dt:.2f}s (<5s)")


def test_ac3_three_copy_cubic():
    t0 = time.perf_counter()
    grid = np.linspace(0, 1, 101)
    resid = max(abs(qw.three_copy_protocol(p) - qw.three_copy_formula(p)) for p in grid)
    improves = all(qw.three_copy_protocol(p) > p for p in grid if 0.5 < p < 1)
    dt = time.perf_counter() - t0
    ok = resid <= 1e-9 and improves and dt < 10.0
    verdict("AC3 three-copy cubic", ok,
            f"max residual {resid:.2e} (<=1e-9), p'>p on (0.5,1): {improves}, {dt:.2f}s (<10s)")


def test_ac4_box_facts():
    t0 = time.perf_counter()
    chsh_pr = bw.chsh_value(bw.pr_box(exact=True))
    grid = [Fraction(k, 100) for k in range(101)]
    linear = all(bw.chsh_value(bw.noisy_pr(p)) == 8 * p - 4 for p in grid)
    eps = Fraction(1, 10**12)
    at = bw.lhv_membership(bw.noisy_pr(Fraction(3, 4))).feasible
    below = bw.lhv_membership(bw.noisy_pr(Fraction(3, 4) - eps)).feasible
    above = bw.lhv_membership(bw.noisy_pr(Fraction(3, 4) + eps)).feasible
    family = [bw.lhv_membership(bw.noisy_pr(p)).feasible for p in grid if p >= Fraction(1, 2)]
    flip_once = family == [p <= Fraction(3, 4) for p in grid if p >= Fraction(1, 2)]
    dt = time.perf_counter() - t0
    ok = chsh_pr == 4 and linear and at and below and not above and flip_once and dt < 5.0
    verdict("AC4 box facts", ok,
            f"CHSH(PR)={chsh_pr}, CHSH=8p-4 exact: {linear}, LHV feasible at 3/4: {at}, "
            f"at 3/4+1e-12: {above}, {dt:.2f}s (<5s)")


def test_ac5_box_twirl():
    rng = np.random.default_rng(5)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(1000):
        d = bw.random_box(rng)
        worst = max(worst, bw.max_abs_diff(bw.box_twirl(d), bw.noisy_pr(bw.pr_weight(d))))
    inv = max(bw.max_abs_diff(bw.box_twirl(bw.noisy_pr(p)), bw.noisy_pr(p)) for p in np.linspace(0, 1, 101))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-12 and inv <= 1e-12 and dt < 5.0
    verdict("AC5 box twirl", ok,
            f"into-family residual {worst:.2e} (<=1e-12), invariance {inv:.2e}, {dt:.2f}s (<5s)")


def test_ac6_quadraticity():
    rng = np.random.default_rng(6)
    samples = np.linspace(0, 1, 11)
    worst = 0.0
    for _ in range(100):
        wa, wb = (int(c) for c in rng.integers(0, 1 << 16, size=2))
        worst = max(worst, wr.q_curve_check(wa, wb, samples))
    verdict("AC6 quadraticity", worst <= 1e-10, f"max |sim - Q(p)| {worst:.2e} over 100 pairs (<=1e-10)")


@pytest.mark.slow
def test_ac7_no_purifying_wiring(full_search):
    rep, dt = full_search
    ok = rep.complete and rep.max_gap <= 1e-12 and rep.searched_pairs == rep.deduped_pairs and dt < 3600
    verdict("AC7 exhaustive wiring search", ok,
            f"max_gap={rep.max_gap!r} (<=1e-12) over {rep.searched_pairs} deduped pairs "
            f"({rep.deduped_party_count} classes/party, {rep.total_pairs} raw), "
            f"witness {rep.witness_hex}, {dt:.0f}s (<3600s)")


def test_ac8_abstract_theorem():
    t0 = time.perf_counter()
    bad_75 = nogo.theorem_scan(0.75, 10**6, seed=75)
    bad_50 = nogo.theorem_scan(0.5, 10**6, seed=50)
    corners = nogo.corner_sweep(Fraction(3, 4)) + nogo.corner_sweep(Fraction(1, 2))
    dt = time.perf_counter() - t0
    ok = bad_75 == 0 and bad_50 == 0 and corners == 0 and dt < 30
    verdict("AC8 abstract theorem", ok,
            f"counterexamples p_s=0.75: {bad_75}, p_s=0.5: {bad_50}, corners: {corners}, {dt:.2f}s (<30s)")


@pytest.mark.slow
def test_ac9_assumption_audits(full_search):
    rng = np.random.default_rng(9)
    lin_q = lin_b = lin_w = 0.0
    for _ in range(100):
        r, s = qw.random_state(rng), qw.random_state(rng)
        lam = rng.random()
        lin_q = max(lin_q, np.max(np.abs(
            qw.twirl_quantum(lam * r + (1 - lam) * s)
            - lam * qw.twirl_quantum(r) - (1 - lam) * qw.twirl_quantum(s))))
        d, e = bw.random_box(rng), bw.random_box(rng)
        lin_b = max(lin_b, bw.max_abs_diff(bw.box_twirl(lam * d + (1 - lam) * e),
                                           lam * bw.box_twirl(d) + (1 - lam) * bw.box_twirl(e)))
        wa, wb = (int(c) for c in rng.integers(0, 1 << 16, size=2))
        n1, n2, m = (random_nonsignalling_box(rng) for _ in range(3))
        lin_w = max(lin_w, bw.max_abs_diff(
            wr.effective_box(wa, wb, lam * n1 + (1 - lam) * n2, m),
            lam * wr.effective_box(wa, wb, n1, m) + (1 - lam) * wr.effective_box(wa, wb, n2, m)))
    rep, _ = full_search
    ok = max(lin_q, lin_b, lin_w) <= 1e-12 and rep.boundary_gap <= 0.0 and rep.complete
    verdict("AC9 assumption audits", ok,
            f"linearity quantum {lin_q:.1e}, box {lin_b:.1e}, wiring {lin_w:.1e} (<=1e-12); "
            f"max Q(3/4)-3/4 over all searched wirings {rep.boundary_gap!r} (<=0)")
