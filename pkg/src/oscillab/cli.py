"""Command-line entry point: config ingestion, experiment dispatch, result
persistence and SVG plot emission.

Exit codes: 0 when every checked assertion passes, 1 when an inequality or
slope band is violated (the diagnostic carries the failing provenance),
2 on usage or config errors. Identical config and seed produce
byte-identical CSV/JSON outputs; files are written atomically.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import verify
from .errors import OscillabError
from .kernels import admissible_step, build_kernel, check_decay, decay_reports_csv
from .lpaley import (DyadicFamily, SpacedFamily, dominating_weights,
                     dyadic_pieces, spaced_pieces, square_function)
from .maximal import ApproachRegionParams, approach_maximal, operator_by_name
from .numerics import (Grid, SampledFunction, Weight, convolve,
                       load_weight_csv, lp_norm, weighted_l2)
from .phases import Phase, finite_type_spec, validate_finite_type
from .verify import (Provenance, RatioSample, envelope_check, fit_power_law,
                     two_weight_ratio, maximal_norm_sweep,
                     operator_norm_sweep, random_test_function, random_weight,
                     square_function_ratios, uncertainty_bounds_check)

__all__ = ["run", "main"]


# ---------------------------------------------------------------------------
# plumbing


def _atomic_write(path: str, writer) -> None:
    tmp = f"{path}.tmp{os.getpid()}"
    writer(tmp)
    os.replace(tmp, path)


def _write_summary(out_dir: str, payload: dict) -> None:
    _atomic_write(os.path.join(out_dir, "summary.json"),
                  lambda p: verify.summary_json(p, payload))


def _loglog_svg(path: str, points, slope: float, intercept: float, title: str) -> None:
    """Self-contained log-log plot: axes, data polyline, fitted line."""
    W, H, m = 640, 480, 60
    xs = [math.log10(p[0]) for p in points]
    ys = [math.log10(p[1]) for p in points if p[1] > 0]
    if not ys:
        xs, ys = [0.0, 1.0], [0.0, 1.0]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    x1 += (x1 - x0) * 0.05 + 1e-9
    x0 -= (x1 - x0) * 0.05
    y1 += (y1 - y0) * 0.05 + 1e-9
    y0 -= (y1 - y0) * 0.05

    def px(x):
        return m + (x - x0) / (x1 - x0) * (W - 2 * m)

    def py(y):
        return H - m - (y - y0) / (y1 - y0) * (H - 2 * m)

    pts = " ".join(f"{px(math.log10(a)):.1f},{py(math.log10(b)):.1f}"
                   for a, b in points if b > 0)
    if math.isfinite(slope):
        fy0 = (slope * x0 * math.log(10) + intercept) / math.log(10)
        fy1 = (slope * x1 * math.log(10) + intercept) / math.log(10)
        fit = (f'<line x1="{px(x0):.1f}" y1="{py(fy0):.1f}" x2="{px(x1):.1f}" '
               f'y2="{py(fy1):.1f}" stroke="#c33" stroke-dasharray="6,3"/>')
    else:
        fit = ""
    svg = f"""<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}">
<rect width="{W}" height="{H}" fill="white"/>
<line x1="{m}" y1="{H - m}" x2="{W - m}" y2="{H - m}" stroke="black"/>
<line x1="{m}" y1="{m}" x2="{m}" y2="{H - m}" stroke="black"/>
<text x="{W // 2}" y="24" text-anchor="middle" font-size="14">{title}</text>
<text x="{W // 2}" y="{H - 16}" text-anchor="middle" font-size="12">log10 lambda</text>
<polyline points="{pts}" fill="none" stroke="#36c" stroke-width="1.5"/>
{"".join(f'<circle cx="{px(math.log10(a)):.1f}" cy="{py(math.log10(b)):.1f}" r="3" fill="#36c"/>' for a, b in points if b > 0)}
{fit}
</svg>
"""
    with open(path, "w") as fh:
        fh.write(svg)


def _emit_sweep(out_dir: str, name: str, ell: int, report, emit_plots: bool) -> None:
    _atomic_write(os.path.join(out_dir, "sweep.csv"),
                  lambda p: verify.sweep_csv(p, name, ell, report))
    if emit_plots and report.points:
        _atomic_write(os.path.join(out_dir, f"plot-{name}.svg"),
                      lambda p: _loglog_svg(p, report.points, report.slope,
                                            report.intercept, name))


def phase_from_config(cfg: dict) -> tuple[Phase, float]:
    kind = cfg.get("kind", "monomial")
    if kind == "monomial":
        return Phase.monomial(int(cfg.get("ell", 2))), float(cfg.get("x0", 0.0))
    if kind == "cosine":
        return Phase.cosine(), float(cfg.get("x0", 0.0))
    raise ValueError(f"unknown phase kind {kind!r}")


def _parse_lambdas(text: str) -> list[float]:
    """"64..4096" doubles from 64 to 4096; "16,64,256" is a literal list."""
    if ".." in text:
        a, b = text.split("..")
        lo, hi = float(a), float(b)
        out = []
        lam = lo
        while lam <= hi * (1 + 1e-9):
            out.append(lam)
            lam *= 2.0
        return out
    return [float(t) for t in text.split(",")]


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    with open(path) as fh:
        return json.load(fh)


def _weight_from_arg(arg: str, grid: Grid) -> Weight:
    if arg == "const":
        return Weight(grid, np.ones(grid.n))
    if arg.startswith("csv:"):
        return load_weight_csv(arg[4:])
    raise ValueError(f"unknown weight source {arg!r} (use 'const' or 'csv:PATH')")


# ---------------------------------------------------------------------------
# subcommands


def _phase_spec(args, cfg, default_u=None):
    """Phase plus its hypothesis record; epsilon defaults to the unit bound."""
    phase, x0 = phase_from_config(_phase_cfg(args, cfg))
    eps = args.epsilon if args.epsilon is not None else 1.0
    u = args.u if args.u is not None else default_u
    spec = finite_type_spec(phase, x0, args.ell, epsilon=eps, support_halfwidth=u)
    return phase, spec


def _cmd_validate_phase(args, cfg) -> int:
    phase, spec = _phase_spec(args, cfg)
    report = validate_finite_type(phase, spec, tol=args.tol)
    for k, v in zip(range(2, spec.ell), report.lower_orders):
        print(f"|phi^({k})(x0)| = {v!r}")
    print(f"phi^({spec.ell})(x0) = {report.ell_value!r}")
    print("PASS" if report.passed else f"FAIL: {report.failures[0]}")
    return 0 if report.passed else 1


def _cmd_kernel_decay(args, cfg) -> int:
    phase, spec = _phase_spec(args, cfg, default_u=0.5)
    reports = []
    for lam in args.lambdas:
        grid = Grid.from_step(0.0, 2.0 * spec.support_halfwidth,
                              admissible_step(phase, spec, lam) * 0.999)
        reports.append(check_decay(build_kernel(phase, spec, lam, grid), N=args.N))
    _atomic_write(os.path.join(args.out, "results.csv"),
                  lambda p: decay_reports_csv(reports, p))
    sup_points = [(r.lam, r.sup_low * r.lam ** (1.0 / args.ell)) for r in reports]
    rep = verify._sweep_report([(r.lam, r.sup_low) for r in reports])
    _emit_sweep(args.out, "kernel-decay", args.ell, rep, args.emit_plots)
    sups = [v for _, v in sup_points]
    factor = max(sups) / min(sups) if min(sups) > 0 else math.inf
    tail0 = reports[0].tail_max
    tail_ok = all(r.tail_max <= 1.25 * tail0 for r in reports)
    passed = factor < 3.0 and tail_ok
    _write_summary(args.out, {
        "experiment": "kernel-decay", "ell": args.ell,
        "sup_low_normalized_factor": factor, "tail_bound_at_lambda_min": tail0,
        "tail_bounded": tail_ok,
        "slope": rep.slope, "intercept": rep.intercept,
        "max_residual": rep.max_residual, "pass": passed})
    print(f"sup_low variation factor {factor:.3f}, tail bounded: {tail_ok}")
    return 0 if passed else 1


def _cmd_maximal(args, cfg) -> int:
    lam = args.lam
    grid = Grid.from_step(0.0, 2.0, 1.0 / (16.0 * lam))
    w = _weight_from_arg(args.weight, grid)
    if args.op:
        out = operator_by_name(args.op)(w)
    else:
        out = approach_maximal(w, ApproachRegionParams(args.ell, lam))
    mid = grid.n // 2
    value = float(out.values[mid])
    print(f"value at center: {value!r}")
    if args.weight == "const":
        target = 2.0 * lam ** (-2.0 / args.ell)
        rel = abs(value / target - 1.0)
        print(f"constant-weight closed form {target!r}, relative deviation {rel:.5f}")
        return 0 if rel <= 0.03 else 1
    return 0


def _cmd_sweep_maximal(args, cfg) -> int:
    rep = maximal_norm_sweep(args.ell, args.lambdas, seed=args.seed)
    _emit_sweep(args.out, "sweep-maximal", args.ell, rep, args.emit_plots)
    target = -2.0 / args.ell
    passed = (not rep.insufficient) and abs(rep.slope - target) <= 0.1
    _write_summary(args.out, {
        "experiment": "sweep-maximal", "ell": args.ell, "slope": rep.slope,
        "intercept": rep.intercept, "max_residual": rep.max_residual,
        "target_slope": target, "pass": passed,
        "insufficient_points": rep.insufficient})
    print(f"slope {rep.slope:.4f} (target {target:.4f})")
    if rep.insufficient:
        print("insufficient points for a fit")
    return 0 if passed else 1


def _cmd_sweep_operator(args, cfg) -> int:
    phase, spec = _phase_spec(args, cfg)
    rep = operator_norm_sweep(phase, spec, args.lambdas, seed=args.seed)
    _emit_sweep(args.out, "sweep-operator", args.ell, rep, args.emit_plots)
    target = -1.0 / args.ell
    passed = (not rep.insufficient) and abs(rep.slope - target) <= 0.15
    _write_summary(args.out, {
        "experiment": "sweep-operator", "ell": args.ell, "slope": rep.slope,
        "intercept": rep.intercept, "max_residual": rep.max_residual,
        "target_slope": target, "pass": passed,
        "insufficient_points": rep.insufficient})
    print(f"slope {rep.slope:.4f} (target {target:.4f})")
    return 0 if passed else 1


def _fail_ratio(name: str, rs: RatioSample) -> int:
    pv = rs.provenance
    print(f"FAIL {name}: lhs={rs.lhs!r} rhs={rs.rhs!r} "
          f"(f={pv.f_id} w={pv.w_id} ell={pv.ell} lambda={pv.lam} seed={pv.seed})",
          file=sys.stderr)
    return 1


def _cmd_check_main(args, cfg) -> int:
    phase, spec = _phase_spec(args, cfg, default_u=0.5)
    rows = []
    per_lambda_max = []
    for lam in args.lambdas:
        rng = np.random.default_rng(args.seed)
        step = min(1.0 / (4.0 * lam), admissible_step(phase, spec, lam))
        grid = Grid.from_step(0.0, 4.0, step)
        best = 0.0
        for i in range(args.pairs):
            f = random_test_function(grid, rng, max_freq=2.0 * lam ** (1.0 / args.ell),
                                     support_halfwidth=1.5)
            w = random_weight(grid, rng)
            rs = two_weight_ratio(f, w, phase, spec, lam,
                                    Provenance(f"f{i}", f"w{i}", args.ell, lam, args.seed))
            rows.append(("check-main", rs))
            if rs.vacuous and rs.lhs > 1e-10:
                _atomic_write(os.path.join(args.out, "results.csv"),
                              lambda p: verify.ratio_rows_csv(p, rows))
                return _fail_ratio("two-weight inequality (rhs = 0, lhs > 0)", rs)
            best = max(best, rs.ratio)
        per_lambda_max.append((lam, best))
    _atomic_write(os.path.join(args.out, "results.csv"),
                  lambda p: verify.ratio_rows_csv(p, rows))
    vals = [v for _, v in per_lambda_max]
    factor = max(vals) / min(vals) if min(vals) > 0 else math.inf
    passed = factor < 2.0
    _write_summary(args.out, {
        "experiment": "check-main", "ell": args.ell,
        "per_lambda_max_ratio": {repr(l): v for l, v in per_lambda_max},
        "stability_factor": factor, "pass": passed})
    print(f"max-ratio stability factor across lambda: {factor:.3f}")
    return 0 if passed else 1


def _cmd_check_lp(args, cfg) -> int:
    rng = np.random.default_rng(args.seed)
    grid = Grid(0.0, 16.0, 4096)
    dy_cfg = cfg.get("dyadic", {"kmin": -2, "kmax": 8})
    fam = DyadicFamily(int(dy_cfg["kmin"]), int(dy_cfg["kmax"]))
    spacings = ([float(cfg["spaced"]["L"])] if "spaced" in cfg
                else [0.125, 0.5, 2.0, 8.0])
    fg = grid.freq_grid()
    dev = float(np.max(np.abs(fam.band_sum(fg.xs[fam.covered(fg.xs)]) - 1.0)))
    rows = []
    ok = dev <= 1e-12
    sf_ratios = []
    band_lo = 2.0**fam.kmin * 1.01
    band_hi = min(2.0**fam.kmax, 0.9 * fg.half_width)
    for i in range(args.pairs):
        f = verify.random_band_function(grid, rng, band_lo, band_hi)
        w = random_weight(grid, rng)
        fw, bw = square_function_ratios(
            f, w, fam, Provenance(f"f{i}", f"w{i}", 0, 0.0, args.seed))
        rows.append(("dyadic-forward", fw))
        rows.append(("dyadic-backward", bw))
        pieces = dyadic_pieces(f, fam)
        recon = sum(p.values for p in pieces)
        ok &= float(np.max(np.abs(recon - f.values))) <= 1e-8 * float(np.max(np.abs(f.values)))
        sf = square_function(pieces)
        sf_ratios.append((lp_norm(sf, 2) / lp_norm(f, 2)) ** 2)
    ok &= all(0.28 <= r <= 1.05 for r in sf_ratios)
    spaced_consts = {}
    for L in spacings:
        sfam = SpacedFamily(L)
        f = verify.random_band_function(grid, rng, 0.0, 2.0**7)
        w = random_weight(grid, rng)
        pieces = spaced_pieces(f, sfam)
        lhs = sum(weighted_l2(p, w) for p in pieces)
        wl = sfam.spatial_window(grid)
        conv = convolve(SampledFunction(
            grid, np.abs(wl.values).astype(np.complex128)), w.as_sampled())
        rhs = float(grid.h * np.sum(np.abs(f.values) ** 2
                                    * np.maximum(conv.values.real, 0.0)))
        rs = RatioSample.of(lhs, rhs, Provenance("band", "w", 0, 0.0, args.seed))
        rows.append((f"spaced-L={L}", rs))
        spaced_consts[repr(L)] = rs.ratio
    _atomic_write(os.path.join(args.out, "results.csv"),
                  lambda p: verify.ratio_rows_csv(p, rows))
    _write_summary(args.out, {
        "experiment": "check-lp", "telescoping_deviation": dev,
        "square_ratio_range": [min(sf_ratios), max(sf_ratios)],
        "spaced_constants": spaced_consts, "pass": bool(ok)})
    print(f"telescoping deviation {dev:.2e}; square ratios "
          f"[{min(sf_ratios):.3f}, {max(sf_ratios):.3f}]")
    return 0 if ok else 1


def _cmd_check_lemmas(args, cfg) -> int:
    phase, spec = _phase_spec(args, cfg, default_u=0.5)
    lam = args.lambdas[0]
    rng = np.random.default_rng(args.seed)
    rows = []
    ok = True
    grid = Grid.from_step(0.0, 4.0, 1.0 / (8.0 * lam))
    p_band = args.p
    for i in range(args.pairs):
        w = random_weight(grid, rng)
        chain = dominating_weights(w, p_band, lam, args.ell, A1=1.0)
        inner = slice(chain.margin_cells, grid.n - chain.margin_cells)
        ok &= bool(np.all(chain.w1.values <= chain.w2.values))
        ok &= bool(np.all(chain.w2.values[inner]
                          <= chain.constant * chain.w3.values[inner] * (1 + 1e-9)))
    step = admissible_step(phase, spec, lam) * 0.999
    kgrid = Grid.from_step(0.0, 8.0, step)
    kernel = build_kernel(phase, spec, lam, kgrid)
    for i in range(max(1, args.pairs // 4)):
        f = verify.random_band_function(kgrid, rng, 0.0, 8.0)
        w = random_weight(kgrid, rng)
        mol, mol2 = uncertainty_bounds_check(
            f, kernel, w, (-10.0, 10.0),
            Provenance(f"f{i}", f"w{i}", args.ell, lam, args.seed))
        rows.append(("mol", mol))
        rows.append(("mol2", mol2))
        ok &= mol.ratio <= 1 + 1e-6 and mol2.ratio <= 1 + 1e-6
    consts = []
    for lam_e in args.lambdas:
        k0 = 2.0 ** (p_band * args.ell / (args.ell - 1.0))
        rs = envelope_check(phase, spec, lam_e, p_band, k=int(round(k0)), N=2)
        rows.append((f"envelope-lam={lam_e}", rs))
        consts.append(rs.ratio)
    if len(consts) > 1 and min(consts) > 0:
        ok &= max(consts) / min(consts) < 4.0
    _atomic_write(os.path.join(args.out, "results.csv"),
                  lambda p: verify.ratio_rows_csv(p, rows))
    _write_summary(args.out, {
        "experiment": "check-lemmas", "ell": args.ell,
        "envelope_constants": consts, "pass": bool(ok)})
    print(f"lemma checks {'pass' if ok else 'FAIL'}; envelope constants {consts}")
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# argument wiring


def _phase_cfg(args, cfg) -> dict:
    base = dict(cfg.get("phase", {}))
    if getattr(args, "kind", None):
        base["kind"] = args.kind
    if getattr(args, "x0", None) is not None:
        base["x0"] = args.x0
    base.setdefault("ell", getattr(args, "ell", 2))
    return base


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="oscillab",
                                 description="oscillatory-integral numerical laboratory")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, lambdas_default=None):
        p.add_argument("--config", default=None)
        p.add_argument("--kind", default=None, choices=["monomial", "cosine"])
        p.add_argument("--ell", type=int, default=None)
        p.add_argument("--x0", type=float, default=None)
        p.add_argument("--epsilon", type=float, default=None)
        p.add_argument("--u", type=float, default=None)
        p.add_argument("--out", default="results")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--emit-plots", action="store_true")
        if lambdas_default is not None:
            p.add_argument("--lambdas", type=str, default=lambdas_default)

    p = sub.add_parser("validate-phase")
    common(p)
    p.add_argument("--tol", type=float, default=1e-10)

    p = sub.add_parser("kernel-decay")
    common(p, "64..16384")
    p.add_argument("--N", type=int, default=4)

    p = sub.add_parser("maximal")
    common(p)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--weight", default="const")
    p.add_argument("--op", default=None)

    p = sub.add_parser("sweep-maximal")
    common(p, "16..4096")

    p = sub.add_parser("sweep-operator")
    common(p, "64..4096")

    p = sub.add_parser("check-main")
    common(p, "64..1024")
    p.add_argument("--pairs", type=int, default=50)

    p = sub.add_parser("check-lp")
    common(p)
    p.add_argument("--pairs", type=int, default=8)

    p = sub.add_parser("check-lemmas")
    common(p, "256..4096")
    p.add_argument("--pairs", type=int, default=20)
    p.add_argument("--p", type=int, default=3)

    return ap


_HANDLERS = {
    "validate-phase": _cmd_validate_phase,
    "kernel-decay": _cmd_kernel_decay,
    "maximal": _cmd_maximal,
    "sweep-maximal": _cmd_sweep_maximal,
    "sweep-operator": _cmd_sweep_operator,
    "check-main": _cmd_check_main,
    "check-lp": _cmd_check_lp,
    "check-lemmas": _cmd_check_lemmas,
}


def run(argv=None) -> int:
    ap = _build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        cfg = _load_config(args.config)
        for key in ("ell", "seed"):
            if getattr(args, key, None) is None and key in cfg:
                setattr(args, key, cfg[key])
        if getattr(args, "ell", None) is None:
            args.ell = 2
        if hasattr(args, "lambdas"):
            if isinstance(args.lambdas, str):
                args.lambdas = _parse_lambdas(args.lambdas)
        elif "lambdas" in cfg:
            args.lambdas = [float(v) for v in cfg["lambdas"]]
        args.out = cfg.get("out_dir", args.out)
        if cfg.get("emit_plots"):
            args.emit_plots = True
        os.makedirs(args.out, exist_ok=True)
        return _HANDLERS[args.command](args, cfg)
    except (OscillabError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
