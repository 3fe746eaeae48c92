"""Command-line entry point.

Every subcommand prints a JSON report on stdout and, with ``--output``,
writes its dataset as CSV or JSON. Exit status is 0 when every checked
invariant holds, 1 when one fails (the report then carries ``failures``) and
2 for usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import boxworld as bw
from . import nogo
from . import werner as qw
from . import wirings as wr

SCHEMA_VERSION = 1


def _num(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating, Fraction)):
        return float(v)
    return v


def _fmt(v) -> str:
    v = _num(v)
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


class Result:
    def __init__(self, name: str):
        self.report: dict = {"schema_version": SCHEMA_VERSION, "subcommand": name}
        self.columns: list[str] = []
        self.rows: list[dict] = []
        self.failures: list[dict] = []

    def check(self, name: str, ok, **detail) -> bool:
        ok = bool(ok)
        self.report.setdefault("checks", {})[name] = ok
        if not ok:
            self.failures.append({"check": name, **{k: _num(v) for k, v in detail.items()}})
        return ok

    def set(self, **values):
        for k, v in values.items():
            self.report[k] = _num(v)


def _grid(points: int) -> np.ndarray:
    return qw.p_grid(points)


def cmd_werner(args, res: Result):
    ps = qw.werner_threshold_bisect()
    res.set(threshold=ps)
    res.check("threshold", abs(ps - qw.WERNER_PS) <= args.tol_threshold, threshold=ps)
    res.columns = ["p", "ppt_min_eigenvalue", "separable"]
    # the smallest PT eigenvalue is min((1 - 2p)/2, (1 + 2p)/6): rising up to
    # the maximally mixed point p = 1/4, falling after it
    prev = np.inf
    monotone = True
    for p in _grid(args.grid_points):
        lam = qw.ppt_min_eigenvalue(qw.werner_state(p))
        if p >= 0.25:
            monotone &= lam <= prev + 1e-12
            prev = lam
        res.rows.append({"p": p, "ppt_min_eigenvalue": lam, "separable": lam >= -1e-12})
    res.check("ppt_monotone_decreasing", monotone)


def cmd_bbpssw(args, res: Result):
    res.columns = ["p", "success_prob", "p_success"]
    improves = True
    for p in _grid(args.grid_points):
        o = qw.bbpssw_step(p)
        res.rows.append({"p": p, "success_prob": o.success_prob, "p_success": o.out_purity_success})
        if 0.5 + 1e-6 < p < 1 - 1e-6:
            improves &= o.out_purity_success > p
    res.check("post_selected_improvement_above_half", improves)


def cmd_three_copy(args, res: Result):
    res.columns = ["p", "simulated", "formula", "residual"]
    worst = 0.0
    improves = True
    for p in _grid(args.grid_points):
        sim = qw.three_copy_protocol(p)
        ref = qw.three_copy_formula(p)
        worst = max(worst, abs(sim - ref))
        if 0.5 + 1e-6 < p < 1 - 1e-6:
            improves &= sim > p
        res.rows.append({"p": p, "simulated": sim, "formula": ref, "residual": abs(sim - ref)})
    res.set(max_residual=worst)
    res.check("cubic_match", worst <= args.tol, max_residual=worst)
    res.check("strict_improvement", improves)


def cmd_boxes(args, res: Result):
    res.check("chsh_pr_is_4", bw.chsh_value(bw.pr_box(exact=True)) == 4)
    res.columns = ["p", "chsh", "lhv_feasible"]
    worst = 0.0
    agree = True
    for p in _grid(args.grid_points):
        d = bw.noisy_pr(p)
        c = bw.chsh_value(d)
        worst = max(worst, abs(c - (8 * p - 4)))
        feas = bw.lhv_membership(d).feasible
        agree &= feas == (abs(c) <= 2 + 1e-9)
        res.rows.append({"p": p, "chsh": c, "lhv_feasible": feas})
    res.check("chsh_linear", worst <= args.tol, max_residual=worst)
    res.check("lhv_matches_chsh", agree)
    ps = Fraction(3, 4)
    eps = Fraction(1, 2**30)
    at = bw.lhv_membership(bw.noisy_pr(ps)).feasible
    below = bw.lhv_membership(bw.noisy_pr(ps - eps)).feasible
    above = bw.lhv_membership(bw.noisy_pr(ps + eps)).feasible
    res.set(lhv_threshold="3/4", feasible_at=at, feasible_below=below, feasible_above=above)
    res.check("lhv_flip_at_three_quarters", at and below and not above)


def cmd_twirl_check(args, res: Result):
    rng = np.random.default_rng(args.seed)
    agree = idem = fid = lin = 0.0
    for _ in range(100):
        r = qw.random_state(rng)
        s = qw.random_state(rng)
        lam = rng.random()
        t = qw.twirl_quantum(r)
        agree = max(agree, np.max(np.abs(t - qw.twirl_quantum(r, "two_design"))))
        idem = max(idem, np.max(np.abs(qw.twirl_quantum(t) - t)))
        fid = max(fid, abs(qw.singlet_fidelity(t) - qw.singlet_fidelity(r)))
        mixed = qw.twirl_quantum(lam * r + (1 - lam) * s)
        lin = max(lin, np.max(np.abs(mixed - lam * t - (1 - lam) * qw.twirl_quantum(s))))
    res.set(quantum_method_agreement=agree, quantum_idempotence=idem,
            quantum_fidelity_preservation=fid, quantum_linearity=lin)
    res.check("quantum_methods_agree", agree <= 1e-10, residual=agree)
    res.check("quantum_idempotent", idem <= 1e-10, residual=idem)
    res.check("quantum_fidelity_preserved", fid <= 1e-12, residual=fid)
    res.check("quantum_linear", lin <= 1e-12, residual=lin)

    family = bidem = blin = 0.0
    for _ in range(1000):
        d = bw.random_box(rng)
        e = bw.random_box(rng)
        lam = rng.random()
        t = bw.box_twirl(d)
        family = max(family, bw.max_abs_diff(t, bw.noisy_pr(bw.pr_weight(d))))
        bidem = max(bidem, bw.max_abs_diff(bw.box_twirl(t), t))
        blin = max(blin, bw.max_abs_diff(bw.box_twirl(lam * d + (1 - lam) * e),
                                         lam * t + (1 - lam) * bw.box_twirl(e)))
    inv = max(bw.max_abs_diff(bw.box_twirl(bw.noisy_pr(p)), bw.noisy_pr(p)) for p in _grid(args.grid_points))
    res.set(box_family_residual=family, box_idempotence=bidem, box_linearity=blin, box_invariance=inv)
    res.check("box_maps_into_family", family <= 1e-12, residual=family)
    res.check("box_idempotent", bidem <= 1e-12, residual=bidem)
    res.check("box_linear", blin <= 1e-12, residual=blin)
    res.check("box_family_invariant", inv <= 1e-12, residual=inv)


def cmd_wiring_search(args, res: Result):
    grid = wr.default_grid(args.grid_points)
    rep = wr.search_all_wirings(grid, workers=args.workers, checkpoint_path=args.checkpoint,
                                limit=args.limit)
    logging.getLogger(__name__).info("wiring search took %.1f s", rep.elapsed)
    res.report["search"] = rep.to_dict()
    res.check("search_complete", rep.complete)
    res.check("no_purifying_wiring", rep.max_gap <= args.tol, max_gap=rep.max_gap,
              witness=rep.witness_hex)
    res.check("separability_preserved", rep.boundary_gap <= args.tol, boundary_gap=rep.boundary_gap)


def cmd_nogo(args, res: Result):
    kept, bad = nogo.scan_kept(args.ps, args.samples, args.seed)
    corners = nogo.corner_sweep(Fraction(args.ps).limit_denominator(10**6))
    res.set(p_s=args.ps, samples=args.samples, kept=kept, counterexamples=bad,
            corner_counterexamples=corners)
    res.check("no_counterexamples", bad == 0, counterexamples=bad)
    res.check("no_corner_counterexamples", corners == 0, counterexamples=corners)


def cmd_fig1(args, res: Result):
    pe = args.pe if args.pe is not None else 0.5 * (args.ps + 1.0)
    data = nogo.figure1_regions(args.ps, pe, args.grid_points)
    res.set(p_s=args.ps, p_e=pe, regions=len(data.regions))
    res.columns = ["kind", "id", "p", "lo", "hi"]
    for r in data.regions:
        res.rows.append({"kind": "region", "id": r["region_id"], "p": r["p"],
                         "lo": r["q_min"], "hi": r["q_max"]})
    for c in data.curves:
        res.rows.append({"kind": "curve", "id": c["curve_id"], "p": c["p"], "lo": c["q"], "hi": c["q"]})
    res.check("four_regions", len(data.regions) == 4)


def cmd_fig2(args, res: Result):
    wa, wb = wr.figure2_wiring()
    c = wr.extract_quad_coeffs(wa, wb)
    f = nogo.QFunction(c, bw.BOX_PS)
    resid = wr.q_curve_check(wa, wb, _grid(11))
    res.set(alice=f"0x{wa.encode():04x}", bob=f"0x{wb.encode():04x}", q00=c.q00, q01=c.q01,
            q10=c.q10, q11=c.q11, curve_residual=resid)
    res.columns = ["p", "Q", "gap"]
    worst = -np.inf
    for p in _grid(args.grid_points):
        q = nogo.q_of_p(f, p)
        if p > bw.BOX_PS:
            worst = max(worst, q - p)
        res.rows.append({"p": p, "Q": q, "gap": q - p})
    res.check("quadratic_curve", resid <= 1e-10, residual=resid)
    res.check("no_gain_above_threshold", worst <= 0.0, max_gap=worst)
    res.check("not_useful", not nogo.check_conditions(f).useful)


COMMANDS = {
    "werner": cmd_werner,
    "bbpssw": cmd_bbpssw,
    "three-copy": cmd_three_copy,
    "boxes": cmd_boxes,
    "twirl-check": cmd_twirl_check,
    "wiring-search": cmd_wiring_search,
    "nogo": cmd_nogo,
    "fig1": cmd_fig1,
    "fig2": cmd_fig2,
}


def _positive(kind, minimum):
    def parse(text):
        v = kind(text)
        if v < minimum:
            raise argparse.ArgumentTypeError(f"must be >= {minimum}")
        return v
    return parse


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nopurify", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--grid-points", type=_positive(int, 2), default=101)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--workers", type=_positive(int, 1), default=1)
        p.add_argument("--output", type=Path)
        p.add_argument("--format", choices=("json", "csv"), default="csv")
        p.add_argument("--tol", type=float, default=1e-9 if name != "wiring-search" else 1e-12)
        if name == "werner":
            p.add_argument("--tol-threshold", type=float, default=1e-8)
        if name == "nogo":
            p.add_argument("--samples", type=_positive(int, 1), default=1_000_000)
            p.add_argument("--ps", type=float, default=0.75)
        if name == "fig1":
            p.add_argument("--ps", type=float, default=0.75)
            p.add_argument("--pe", type=float)
        if name == "wiring-search":
            p.add_argument("--checkpoint", type=Path)
            p.add_argument("--limit", type=_positive(int, 1))
    return parser


def _flatten(d: dict, prefix: str = ""):
    for k in sorted(d):
        v = d[k]
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            yield from _flatten(v, key + ".")
        elif isinstance(v, list):
            if all(not isinstance(x, (dict, list)) for x in v):
                yield key, " ".join(_fmt(x) for x in v)
        else:
            yield key, v


def _write(res: Result, path: Path, fmt: str) -> None:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if res.columns:
            w.writerow(res.columns)
            for row in res.rows:
                w.writerow([_fmt(row[c]) for c in res.columns])
        else:
            # no natural table: flatten the report's scalar entries
            w.writerow(["key", "value"])
            for k, v in _flatten(res.report):
                w.writerow([k, _fmt(v)])
        path.write_text(buf.getvalue())
    else:
        rows = [{k: _num(v) for k, v in r.items()} for r in res.rows]
        path.write_text(json.dumps({"report": res.report, "rows": rows}, sort_keys=True, indent=2) + "\n")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "ps", None) is not None and not 0 < args.ps < 1:
        build_parser().error("--ps must lie in (0, 1)")
    res = Result(args.command)
    COMMANDS[args.command](args, res)
    res.report["status"] = "fail" if res.failures else "pass"
    if res.failures:
        res.report["failures"] = res.failures
    if args.output is not None:
        _write(res, args.output, args.format)
    sys.stdout.write(json.dumps(res.report, sort_keys=True, indent=2) + "\n")
    return 1 if res.failures else 0


if __name__ == "__main__":
    sys.exit(main())
