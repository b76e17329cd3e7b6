"""Experiment harness: both sides of every inequality under test, empirical
constants, operator-norm sweeps, and log-log exponent fits.

Inequalities with unspecified constants are measured as lhs/rhs ratios
over seeded corpora; scaling laws are measured as fitted log-log slopes
over powers-of-two oscillation parameters. Operator norms for p other
than 2 are estimated from below by corpus maximization; the focusing
inputs (phase-conjugated bumps) realize the known exponent, which is the
claim under test, rather than the constant.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from ._util import map_ordered, smooth_plateau, standard_bump
from .errors import (BadBand, CoverageGap, InsufficientPoints,
                     NonpositiveValue, SupportViolation)
from .kernels import Kernel, admissible_step, apply_T, build_kernel, kernel_spectrum
from .lpaley import DyadicFamily, dyadic_pieces, square_function
from .maximal import ApproachRegionParams, approach_maximal, hardy_littlewood
from .numerics import (Grid, SampledFunction, SpectralFunction, Weight,
                       convolve, forward_transform, inverse_transform,
                       lp_norm, weighted_l2)
from .phases import FiniteTypeSpec, Phase, normalize_phase

__all__ = [
    "Provenance",
    "RatioSample",
    "SweepReport",
    "fit_power_law",
    "two_weight_ratio",
    "frequency_restricted_ratio",
    "square_function_ratios",
    "uncertainty_bounds_check",
    "envelope_check",
    "maximal_norm_sweep",
    "operator_norm_sweep",
    "random_weight",
    "random_band_function",
    "random_test_function",
    "focusing_input",
    "h1_atom",
    "weight_corpus",
    "ratio_rows_csv",
    "sweep_csv",
    "summary_json",
]


# ---------------------------------------------------------------------------
# result records


@dataclass(frozen=True)
class Provenance:
    f_id: str = ""
    w_id: str = ""
    ell: int = 0
    lam: float = 0.0
    seed: int = 0
    p: int | None = None


@dataclass(frozen=True)
class RatioSample:
    """lhs/rhs of one inequality instance; ratio is 0 with the vacuous flag
    when the right side vanishes."""

    lhs: float
    rhs: float
    ratio: float
    provenance: Provenance = field(default_factory=Provenance)
    vacuous: bool = False

    @staticmethod
    def of(lhs: float, rhs: float, provenance: Provenance = Provenance()) -> "RatioSample":
        if rhs > 0.0:
            return RatioSample(lhs, rhs, lhs / rhs, provenance)
        return RatioSample(lhs, rhs, 0.0, provenance, vacuous=True)


@dataclass(frozen=True)
class SweepReport:
    """Per-lambda measured values with a log-log least-squares fit."""

    points: tuple  # ((lam, value), ...)
    slope: float
    intercept: float
    max_residual: float
    insufficient: bool = False


def fit_power_law(points) -> tuple[float, float, float]:
    """Least squares of log(value) against log(lam); residual in log units."""
    pts = sorted(points)
    if len({p[0] for p in pts}) < 3:
        raise InsufficientPoints(f"need >= 3 distinct lambda values, got {len(pts)}")
    for lam, v in pts:
        if v <= 0.0:
            raise NonpositiveValue(f"value {v} at lambda {lam} not positive")
        if lam <= 1.0:
            raise NonpositiveValue(f"lambda {lam} must exceed 1")
    lx = np.log([p[0] for p in pts])
    ly = np.log([p[1] for p in pts])
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = float(np.max(np.abs(ly - (slope * lx + intercept))))
    return float(slope), float(intercept), resid


def _sweep_report(points) -> SweepReport:
    try:
        slope, intercept, resid = fit_power_law(points)
        return SweepReport(tuple(points), slope, intercept, resid)
    except (InsufficientPoints, NonpositiveValue):
        return SweepReport(tuple(points), float("nan"), float("nan"), float("nan"),
                           insufficient=True)


# ---------------------------------------------------------------------------
# corpora


def random_weight(grid: Grid, rng: np.random.Generator, quantize: bool = True) -> Weight:
    """Sum of randomly placed smooth bumps, spikes and indicator blocks.

    ``quantize`` rounds values to multiples of 2^-12 so window sums are
    exact in floating point regardless of summation order (the oracle
    comparisons rely on this).
    """
    xs = grid.xs
    span = 0.6 * grid.half_width
    vals = np.zeros(grid.n)
    for _ in range(rng.integers(1, 4)):
        c = rng.uniform(-span, span)
        wdt = rng.uniform(0.05, 0.5) * span
        vals += rng.uniform(0.2, 2.0) * standard_bump((xs - c) / wdt)
    for _ in range(rng.integers(0, 3)):
        j = rng.integers(grid.n // 5, 4 * grid.n // 5)
        vals[j] += rng.uniform(1.0, 8.0)
    for _ in range(rng.integers(0, 3)):
        a = rng.uniform(-span, span)
        b = a + rng.uniform(0.02, 0.4) * span
        vals += rng.uniform(0.1, 1.0) * ((xs >= a) & (xs <= b))
    if rng.random() < 0.3:
        vals += rng.uniform(0.01, 0.2)
    if quantize:
        vals = np.round(vals * 4096.0) / 4096.0
    return Weight(grid, vals)


def weight_corpus(grid: Grid, rng: np.random.Generator, n_random: int = 8) -> list[Weight]:
    """Constants, a centered bump, a spike, a block, plus random mixtures."""
    xs = grid.xs
    span = 0.5 * grid.half_width
    out = [Weight(grid, np.ones(grid.n))]
    out.append(Weight(grid, standard_bump(xs / span)))
    spike = np.zeros(grid.n)
    spike[grid.n // 2] = 1.0
    out.append(Weight(grid, spike))
    out.append(Weight(grid, ((xs >= -span / 4) & (xs <= span / 4)).astype(float)))
    out.extend(random_weight(grid, rng) for _ in range(n_random))
    return out


def random_band_function(grid: Grid, rng: np.random.Generator, lo: float,
                         hi: float) -> SampledFunction:
    """Random function with spectrum supported in lo <= |xi| <= hi."""
    fg = grid.freq_grid()
    sel = (np.abs(fg.xs) >= lo) & (np.abs(fg.xs) <= hi)
    vals = np.zeros(grid.n, dtype=np.complex128)
    vals[sel] = rng.normal(size=int(sel.sum())) + 1j * rng.normal(size=int(sel.sum()))
    vals[sel] *= np.exp(-np.abs(fg.xs[sel]) / max(hi, 1.0))
    return inverse_transform(SpectralFunction(fg, vals, grid))


def random_test_function(grid: Grid, rng: np.random.Generator, max_freq: float,
                         support_halfwidth: float, terms: int = 6) -> SampledFunction:
    """Smooth random trigonometric polynomial under a compact envelope."""
    xs = grid.xs
    env = standard_bump(xs / support_halfwidth)
    acc = np.zeros(grid.n, dtype=np.complex128)
    for _ in range(terms):
        freq = rng.uniform(-max_freq, max_freq)
        amp = rng.normal() + 1j * rng.normal()
        acc += amp * np.exp(1j * freq * xs)
    return SampledFunction(grid, acc * env)


def focusing_input(kernel: Kernel, support_halfwidth: float | None = None) -> SampledFunction:
    """Phase-conjugated bump: maximizes |T f(0)| and realizes the norm
    lower bound at the known exponent."""
    grid = kernel.grid
    u = support_halfwidth or kernel.spec.support_halfwidth
    xs = grid.xs
    phase_vals = np.asarray(kernel.phase.eval(0, -xs))
    return SampledFunction(
        grid, np.exp(-1j * kernel.lam * phase_vals) * standard_bump(xs / u))


def h1_atom(grid: Grid, width: float) -> SampledFunction:
    """Mean-zero atom on [-width/2, width/2] with |a| <= 1/width.

    The width snaps to an even cell count so the grid mean vanishes
    exactly.
    """
    half_cells = max(1, int(round(width / (2 * grid.h))))
    mid = grid.n // 2
    vals = np.zeros(grid.n)
    actual = 2 * half_cells * grid.h
    vals[mid - half_cells: mid] = 1.0 / actual
    vals[mid: mid + half_cells] = -1.0 / actual
    return SampledFunction(grid, vals.astype(np.complex128))


# ---------------------------------------------------------------------------
# inequality instances


def _mod_input(f: SampledFunction, lam: float, norm) -> SampledFunction:
    """Transfer the input to the normalized frame: modulate away the
    affine phase part, conjugating when the leading derivative was negative."""
    vals = f.values * np.exp(-1j * lam * norm.linear_coeff * f.grid.xs)
    if norm.conjugate:
        vals = np.conj(vals)
    return SampledFunction(f.grid, vals)


def two_weight_ratio(f: SampledFunction, w: Weight, phase: Phase, spec: FiniteTypeSpec,
                       lam: float, provenance: Provenance = Provenance()) -> RatioSample:
    """The two-weight inequality: lhs = integral |T f|^2 w, rhs =
    integral |f|^2 * (M^2 M_approach M^4 w).

    Both sides are evaluated in the normalized frame (base point zero,
    affine part modulated away), which leaves the ratio unchanged.
    """
    norm = normalize_phase(phase, spec)
    lam_eff = lam * norm.lambda_scale
    kernel = build_kernel(norm.phase, norm.spec, lam_eff, f.grid)
    lhs = weighted_l2(apply_T(kernel, _mod_input(f, lam, norm)), w)
    inner = hardy_littlewood(w, 4)
    mid = approach_maximal(inner, ApproachRegionParams(spec.ell, lam_eff))
    outer = hardy_littlewood(mid, 2)
    rhs = float(f.grid.h * np.sum(np.abs(f.values) ** 2 * outer.values))
    return RatioSample.of(lhs, rhs, provenance)


def frequency_restricted_ratio(f: SampledFunction, w: Weight, phase: Phase,
                               spec: FiniteTypeSpec, lam: float,
                               provenance: Provenance = Provenance()) -> RatioSample:
    """Single-annulus form: rhs uses M M_approach M instead of M^2 ... M^4."""
    norm = normalize_phase(phase, spec)
    lam_eff = lam * norm.lambda_scale
    kernel = build_kernel(norm.phase, norm.spec, lam_eff, f.grid)
    lhs = weighted_l2(apply_T(kernel, _mod_input(f, lam, norm)), w)
    inner = hardy_littlewood(w, 1)
    mid = approach_maximal(inner, ApproachRegionParams(spec.ell, lam_eff))
    outer = hardy_littlewood(mid, 1)
    rhs = float(f.grid.h * np.sum(np.abs(f.values) ** 2 * outer.values))
    return RatioSample.of(lhs, rhs, provenance)


def square_function_ratios(f: SampledFunction, w: Weight, fam: DyadicFamily,
                           provenance: Provenance = Provenance()):
    """Forward and reverse square-function inequalities.

    forward: integral (Sf)^2 w over integral |f|^2 Mw
    backward: integral |f|^2 w over integral (Sf)^2 M^3 w
    """
    pieces = dyadic_pieces(f, fam)
    sf = square_function(pieces)
    forward = RatioSample.of(weighted_l2(sf, w),
                             weighted_l2(f, hardy_littlewood(w, 1)), provenance)
    backward = RatioSample.of(weighted_l2(f, w),
                              weighted_l2(sf, hardy_littlewood(w, 3)), provenance)
    return forward, backward


def _flat_window(grid: Grid, lo: float, hi: float) -> SampledFunction:
    """Function whose transform is 1 on [lo, hi], supported on the doubled
    interval."""
    fg = grid.freq_grid()
    c, rho = (lo + hi) / 2.0, (hi - lo) / 2.0
    hat = smooth_plateau((fg.xs - c) / rho, 1.0, 2.0).astype(np.complex128)
    return inverse_transform(SpectralFunction(fg, hat, grid))


def _abs_convolve(a: SampledFunction, w: Weight) -> np.ndarray:
    conv = convolve(SampledFunction(a.grid, np.abs(a.values).astype(np.complex128)),
                    w.as_sampled())
    return np.maximum(conv.values.real, 0.0)


def uncertainty_bounds_check(f: SampledFunction, kernel: Kernel, w: Weight,
                             psi_hat_support: tuple[float, float],
                             provenance: Provenance = Provenance()):
    """The two mollification bounds from the uncertainty principle.

    mol:  integral |Tf|^2 w   <= ||Psi||_1 integral |Tf|^2 (|Psi| * w)
    mol2: integral |Tf|^2 w   <= ||T Psi||_1 integral |f|^2 (|T Psi| * w)

    with Psi^ equal to one on the declared spectral support of f. Both
    are exact inequalities; the returned ratios must not exceed one
    beyond discretization error.
    """
    lo, hi = psi_hat_support
    fhat = forward_transform(f)
    energy = np.abs(fhat.values) ** 2
    total = float(np.sum(energy))
    inside = (fhat.freq_grid.xs >= lo) & (fhat.freq_grid.xs <= hi)
    if total > 0 and float(np.sum(energy[~inside])) > 1e-8 * total:
        raise SupportViolation("input spectrum leaks outside the declared interval")
    grid = f.grid
    psi = _flat_window(grid, lo, hi)
    tf = apply_T(kernel, f)
    lhs = weighted_l2(tf, w)
    mol_rhs = lp_norm(psi, 1) * float(
        grid.h * np.sum(np.abs(tf.values) ** 2 * _abs_convolve(psi, w)))
    tpsi = apply_T(kernel, psi)
    mol2_rhs = lp_norm(tpsi, 1) * float(
        grid.h * np.sum(np.abs(f.values) ** 2 * _abs_convolve(tpsi, w)))
    return RatioSample.of(lhs, mol_rhs, provenance), RatioSample.of(lhs, mol2_rhs, provenance)


def envelope_check(phase: Phase, spec: FiniteTypeSpec, lam: float, p: int, k: int,
                   N: int, grid: Grid | None = None,
                   provenance: Provenance = Provenance()) -> RatioSample:
    """Envelope constant for one spaced-band piece pushed through T.

    With L = 2^(-p/(ell-1)) lam^(1/ell) and |k| comparable to
    2^p lam^(1/ell) / L, measures

        sup_x |T Psi_{L,k}(x)| (1 + L|x|)^N
        -----------------------------------------------
        lam^(-1/ell) 2^(-p(ell-2)/(2(ell-1))) L

    whose stability across (lam, p) is the stationary-phase envelope
    claim.
    """
    norm = normalize_phase(phase, spec)
    lam_eff = lam * norm.lambda_scale
    ell = spec.ell
    a1 = max(norm.spec.derivative_bound(1), 0.25)
    if p < 0 or 2.0**p >= 4.0 * a1 * lam_eff ** ((ell - 1.0) / ell):
        raise BadBand(f"band p={p} outside range")
    L = 2.0 ** (-p / (ell - 1.0)) * lam_eff ** (1.0 / ell)
    k0 = 2.0**p * lam_eff ** (1.0 / ell) / L
    if not (0.5 * k0 <= abs(k) <= 2.0 * k0):
        raise BadBand(f"|k|={abs(k)} not comparable to 2^p lam^(1/ell)/L = {k0:.1f}")
    if grid is None:
        grid = Grid.from_step(0.0, 8.0, admissible_step(norm.phase, norm.spec, lam_eff) * 0.999)
    kernel = build_kernel(norm.phase, norm.spec, lam_eff, grid)
    khat = kernel_spectrum(kernel)
    xs = khat.freq_grid.xs
    psi_hat = smooth_plateau((xs - k * L) / L, 2.0, 4.0)
    tpsi = inverse_transform(SpectralFunction(khat.freq_grid, khat.values * psi_hat, grid))
    half = grid.n // 4  # inner window: spectral wrap pollutes the outer edge
    mid = grid.n // 2
    window = slice(mid - half, mid + half)
    weighted = np.abs(tpsi.values[window]) * (1.0 + L * np.abs(grid.xs[window])) ** N
    lhs = float(np.max(weighted))
    rhs = lam_eff ** (-1.0 / ell) * 2.0 ** (-p * (ell - 2.0) / (2.0 * (ell - 1.0))) * L
    return RatioSample.of(lhs, rhs, provenance)


# ---------------------------------------------------------------------------
# sweeps


def dual_exponent(ell: int) -> float:
    """(ell/2)' = ell/(ell-2); infinity at ell = 2."""
    if ell == 2:
        return math.inf
    return ell / (ell - 2.0)


def maximal_norm_sweep(ell: int, lambdas, q: float | None = None, seed: int = 0,
                       half_width: float = 2.0, n_random: int = 8,
                       step_factor: float = 16.0, corpus: str = "full") -> SweepReport:
    """Per lambda, the largest ||M_approach w||_q / ||w||_q over the corpus.

    ``corpus="const"`` restricts to the constant weight, for which the
    measured value has the closed form 2*lam^(-2/ell) up to window
    quantization.
    """
    if q is None:
        q = dual_exponent(ell)

    def one(lam: float) -> tuple[float, float]:
        rng = np.random.default_rng(seed)
        grid = Grid.from_step(0.0, half_width, 1.0 / (step_factor * lam))
        if corpus == "const":
            ws = [Weight(grid, np.ones(grid.n))]
        else:
            ws = weight_corpus(grid, rng, n_random)
        best = 0.0
        for w in ws:
            denom = lp_norm(w, q)
            if denom == 0.0:
                continue
            mw = approach_maximal(w, ApproachRegionParams(ell, lam))
            best = max(best, lp_norm(mw, q) / denom)
        return float(lam), best

    return _sweep_report(map_ordered(one, [float(l) for l in lambdas]))


def operator_norm_sweep(phase: Phase, spec: FiniteTypeSpec, lambdas, seed: int = 0,
                        n_random: int = 8, half_width: float = 4.0) -> SweepReport:
    """Per lambda, the largest ||T f||_ell / ||f||_ell over the corpus.

    The corpus holds the focusing input, modulated wide bumps at
    frequencies spread through the low band, and seeded random
    band-limited functions; the measured value is a certified lower
    bound on the discretized operator norm.
    """
    norm = normalize_phase(phase, spec)
    ell = spec.ell

    def one(lam: float) -> tuple[float, float]:
        rng = np.random.default_rng(seed)
        lam_eff = lam * norm.lambda_scale
        grid = Grid.from_step(0.0, half_width,
                              admissible_step(norm.phase, norm.spec, lam_eff) * 0.999)
        kernel = build_kernel(norm.phase, norm.spec, lam_eff, grid)
        corpus = [focusing_input(kernel)]
        base = lam_eff ** (1.0 / ell)
        for frac in (0.0, 0.35, 0.7):
            mod = np.exp(1j * frac * base * grid.xs)
            corpus.append(SampledFunction(grid, mod * standard_bump(grid.xs / 2.0)))
        for _ in range(n_random):
            corpus.append(random_test_function(grid, rng, max_freq=2.0 * base,
                                               support_halfwidth=2.0))
        best = 0.0
        for f in corpus:
            denom = lp_norm(f, ell)
            if denom > 0.0:
                best = max(best, lp_norm(apply_T(kernel, f), ell) / denom)
        return float(lam), best

    return _sweep_report(map_ordered(one, [float(l) for l in lambdas]))


# ---------------------------------------------------------------------------
# persistence


def ratio_rows_csv(path: str, rows) -> None:
    """rows: iterable of (experiment, RatioSample)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["experiment", "ell", "lambda", "p", "seed", "lhs", "rhs", "ratio"])
        for name, rs in rows:
            pv = rs.provenance
            writer.writerow([name, pv.ell, repr(pv.lam),
                             "" if pv.p is None else pv.p, pv.seed,
                             repr(rs.lhs), repr(rs.rhs), repr(rs.ratio)])


def sweep_csv(path: str, experiment: str, ell: int, report: SweepReport) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["experiment", "ell", "lambda", "value"])
        for lam, v in report.points:
            writer.writerow([experiment, ell, repr(lam), repr(v)])


def summary_json(path: str, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
