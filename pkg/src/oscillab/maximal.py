"""Geometric maximal functions on the grid, with brute-force oracles.

Operators provided:

* ``hardy_littlewood``: centered averages, dyadic-with-eighth-octave radius
  ladder, iterated composition.
* ``fractional_maximal``: integrals normalized by r^(1-alpha).
* ``approach_maximal``: the approach-region operator with radii in
  (1/lam, lam^(-1/ell)], aperture (lam*r)^(-1/(ell-1)), and the matching
  normalization.
* ``global_maximal``: the global variant with radii in (0, 1] and
  aperture/normalization r^(-1/(ell-1)).
* ``regular_maximal``: the bump-regularized family, either the
  lam-form r*(lam*r)^(-1/(ell-1)) |P_r * w| or the analytic-family
  beta-form r^(ell*beta/(ell-1)) |P_r * w|.

Every fast path has a ``*_brute`` oracle that evaluates the same
discretization by direct summation and naive window maxima. Windows are
whole-cell: a radius r covers cells within ``cells(r, h)`` of the center
(strictly inside r for the fractional operator, matching its single-cell
smallest window). Windows clamp at the grid edge; results carry a
``boundary`` mask marking cells any clamped window could have reached.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._util import (boundary_mask, cells, sliding_max, sliding_max_naive,
                    snap_cells, snap_radius, window_sums, window_sums_naive)
from .errors import UnderResolved
from .numerics import Grid, SampledFunction, Weight, convolve

__all__ = [
    "ApproachRegionParams",
    "BumpProfile",
    "hardy_littlewood",
    "hardy_littlewood_brute",
    "fractional_maximal",
    "fractional_maximal_brute",
    "approach_maximal",
    "approach_maximal_brute",
    "global_maximal",
    "global_maximal_brute",
    "regular_maximal",
    "regular_maximal_brute",
    "default_bump",
    "approach_radii",
    "regular_radii",
    "global_radii",
    "operator_by_name",
]


# ---------------------------------------------------------------------------
# radius ladders


def _eighth_octave_cells(n: int) -> list[int]:
    """Cell half-widths {0} + ceil(2^(t/8)) up to the grid length."""
    out = [0]
    t = 0
    while True:
        s = math.ceil(2.0 ** (t / 8.0))
        if s > n:
            break
        if s != out[-1]:
            out.append(s)
        t += 1
    return out


def approach_radii(ell: int, lam: float, h: float) -> list[float]:
    """Half-octave rungs lam^-1 * 2^(j/2) above the open bottom, plus the top.

    Every rung is snapped to the half-cell radius of its window (see
    :func:`oscillab._util.snap_radius`), which realizes the open
    endpoint r > 1/lam as the smallest window radius exceeding 1/lam. A
    degenerate range (lam = 1) collapses to the single top radius.
    """
    top = lam ** (-1.0 / ell)
    raw = [top]
    j = 1
    while True:
        r = (2.0 ** (j / 2.0)) / lam
        if r >= top * (1.0 - 1e-12):
            break
        raw.append(r)
        j += 1
    snapped = {snap_radius(r, h) for r in raw}
    return sorted(r for r in snapped if r > 1.0 / lam)


def regular_radii(ell: int, lam: float, h: float) -> list[float]:
    """The approach ladder extended below 1/lam down to the single cell."""
    top = lam ** (-1.0 / ell)
    raw = []
    j = 0
    while True:
        r = (2.0 ** (-j / 2.0)) / lam
        if r < h / 2.0:
            break
        if r < top * (1.0 - 1e-12):
            raw.append(r)
        j += 1
    snapped = {snap_radius(r, h) for r in raw}
    return sorted(snapped | set(approach_radii(ell, lam, h)))


def global_radii(h: float) -> list[float]:
    """Top-anchored half-octave rungs 2^(-j/2) covering (0, 1], snapped,
    down to the single-cell window."""
    raw = []
    j = 0
    while True:
        r = 2.0 ** (-j / 2.0)
        if r < h / 2.0:
            break
        raw.append(r)
        j += 1
    raw.append(h / 2.0)
    return sorted({snap_radius(r, h) for r in raw})


# ---------------------------------------------------------------------------
# Hardy-Littlewood and fractional


def hardy_littlewood(w: Weight, iterations: int = 1) -> Weight:
    """Centered maximal function, iterated ``iterations`` times.

    Averages (1/2r) * integral over |x-y| < r with r running over the
    eighth-octave cell ladder; the single-cell window makes Mw >= w
    pointwise and constants exact fixed points.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    vals = w.values
    n = w.grid.n
    ladder = _eighth_octave_cells(n)
    for _ in range(iterations):
        best = vals.copy()
        for s in ladder[1:]:
            np.maximum(best, window_sums(vals, s) / (2 * s + 1), out=best)
        vals = best
    return Weight(w.grid, vals)


def hardy_littlewood_brute(w: Weight, iterations: int = 1) -> Weight:
    vals = w.values
    n = w.grid.n
    ladder = _eighth_octave_cells(n)
    for _ in range(iterations):
        candidates = [vals] + [window_sums_naive(vals, s) / (2 * s + 1) for s in ladder[1:]]
        vals = np.max(np.stack(candidates), axis=0)
    return Weight(w.grid, vals)


def _fractional_halfwidths(n: int) -> list[int]:
    # radius h*2^t with the strict window |x-y| < r: half-width 2^t - 1 cells
    out = []
    t = 0
    while 2**t - 1 <= n:
        out.append(2**t - 1)
        t += 1
    return out


def fractional_maximal(w: Weight, alpha: float) -> Weight:
    """M_alpha w(x) = sup_r r^(alpha-1) * integral_{|x-y|<r} w, dyadic radii."""
    if not (0.0 < alpha < 1.0):
        raise ValueError("alpha must lie in (0, 1)")
    h = w.grid.h
    best = np.full(w.grid.n, -np.inf)
    for t, s in enumerate(_fractional_halfwidths(w.grid.n)):
        r = h * (2.0**t)
        np.maximum(best, r ** (alpha - 1.0) * h * window_sums(w.values, s), out=best)
    return Weight(w.grid, best)


def fractional_maximal_brute(w: Weight, alpha: float) -> Weight:
    h = w.grid.h
    rows = []
    for t, s in enumerate(_fractional_halfwidths(w.grid.n)):
        r = h * (2.0**t)
        rows.append(r ** (alpha - 1.0) * h * window_sums_naive(w.values, s))
    return Weight(w.grid, np.max(np.stack(rows), axis=0))


# ---------------------------------------------------------------------------
# approach-region and global operators


@dataclass(frozen=True)
class ApproachRegionParams:
    """Region parameters: radii in (1/lam, lam^(-1/ell)], aperture (lam*r)^(-1/(ell-1))."""

    ell: int
    lam: float

    def __post_init__(self):
        if self.ell < 2:
            raise ValueError("ell must be >= 2")
        if self.lam < 1:
            raise ValueError("lam must be >= 1")

    @property
    def r_min(self) -> float:
        return 1.0 / self.lam

    @property
    def r_max(self) -> float:
        return self.lam ** (-1.0 / self.ell)

    @property
    def aperture_exponent(self) -> float:
        return 1.0 / (self.ell - 1)

    @property
    def degenerate(self) -> bool:
        return self.lam <= 1.0


def _region_sup(vals: np.ndarray, h: float, radii: Sequence[float],
                factor_fn, aperture_fn, naive: bool = False):
    """sup over (y, r): factor(r) * h * window_sum_r(y), |y - x| <= aperture(r)."""
    n = len(vals)
    wsum = window_sums_naive if naive else window_sums
    wmax = sliding_max_naive if naive else sliding_max
    best = np.full(n, -np.inf)
    reach = 0
    for r in radii:
        s = cells(r, h)
        t = cells(aperture_fn(r), h)
        obj = factor_fn(r) * h * wsum(vals, s)
        np.maximum(best, wmax(obj, t), out=best)
        reach = max(reach, s + t)
    return best, boundary_mask(n, reach)


def approach_maximal(w: Weight, params: ApproachRegionParams,
                     radii: Sequence[float] | None = None) -> Weight:
    """The approach-region maximal function on the grid.

    Fast path: per radius, clamped window sums by prefix differences and
    the aperture supremum by a sliding-window maximum; O(n) per rung.
    """
    h = w.grid.h
    max_h = params.r_min / 4.0
    if h > max_h:
        raise UnderResolved("grid too coarse for the smallest radius", max_h)
    if radii is None:
        radii = approach_radii(params.ell, params.lam, h)
    else:
        radii = [snap_radius(r, h) for r in radii]
    e = params.aperture_exponent
    best, mask = _region_sup(
        w.values, h, radii,
        lambda r: (params.lam * r) ** (-e),
        lambda r: (params.lam * r) ** (-e))
    return Weight(w.grid, best, boundary=mask)


def approach_maximal_brute(w: Weight, params: ApproachRegionParams,
                           radii: Sequence[float] | None = None) -> Weight:
    h = w.grid.h
    if radii is None:
        radii = approach_radii(params.ell, params.lam, h)
    else:
        radii = [snap_radius(r, h) for r in radii]
    e = params.aperture_exponent
    best, mask = _region_sup(
        w.values, h, radii,
        lambda r: (params.lam * r) ** (-e),
        lambda r: (params.lam * r) ** (-e),
        naive=True)
    return Weight(w.grid, best, boundary=mask)


def global_maximal(w: Weight, ell: int, radii: Sequence[float] | None = None) -> Weight:
    """Global variant: radii in (0, 1], aperture and normalization r^(-1/(ell-1))."""
    if ell < 2:
        raise ValueError("ell must be >= 2")
    h = w.grid.h
    if radii is None:
        radii = global_radii(h)
    else:
        radii = [snap_radius(r, h) for r in radii]
    e = 1.0 / (ell - 1)
    best, mask = _region_sup(w.values, h, radii,
                             lambda r: r ** (-e), lambda r: r ** (-e))
    return Weight(w.grid, best, boundary=mask)


def global_maximal_brute(w: Weight, ell: int, radii: Sequence[float] | None = None) -> Weight:
    h = w.grid.h
    if radii is None:
        radii = global_radii(h)
    else:
        radii = [snap_radius(r, h) for r in radii]
    e = 1.0 / (ell - 1)
    best, mask = _region_sup(w.values, h, radii,
                             lambda r: r ** (-e), lambda r: r ** (-e), naive=True)
    return Weight(w.grid, best, boundary=mask)


# ---------------------------------------------------------------------------
# regularized family


class BumpProfile:
    """Fixed smooth bump on [-2, 2], positive on [-1, 1].

    ``c_p`` records min over [-1, 1] (attained at the endpoints since the
    profile decreases away from zero); ``mass`` is the continuum integral,
    evaluated once by fine trapezoidal quadrature.
    """

    def __init__(self):
        ts = np.linspace(-2.0, 2.0, 1 << 14)
        vals = self(ts)
        self.c_p = float(self(np.asarray([1.0]))[0])
        self.mass = float(np.trapezoid(vals, ts))

    def __call__(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        inside = np.abs(t) < 2.0
        u = t[inside] / 2.0
        out[inside] = np.exp(-1.0 / (1.0 - u * u))
        return out

    def scaled_samples(self, h: float, r: float) -> np.ndarray:
        """Samples of P_r(x) = (1/r) P(x/r) at grid offsets, support |x| <= 2r."""
        k = cells(2.0 * r, h)
        offs = np.arange(-k, k + 1) * h
        return self(offs / r) / r


_DEFAULT_BUMP: BumpProfile | None = None


def default_bump() -> BumpProfile:
    global _DEFAULT_BUMP
    if _DEFAULT_BUMP is None:
        _DEFAULT_BUMP = BumpProfile()
    return _DEFAULT_BUMP


def _bump_convolutions(values: np.ndarray, grid: Grid, radii: Sequence[float],
                       profile: BumpProfile, conv: str):
    """|P_r * f| per rung. 'direct' uses np.convolve; 'fft' the padded FFT path."""
    h = grid.h
    out = []
    for r in radii:
        pr = profile.scaled_samples(h, r)
        k = len(pr) // 2
        mid = grid.n // 2
        if conv == "fft" and k < mid:  # bump must fit inside the grid window
            kern = np.zeros(grid.n, dtype=np.complex128)
            kern[mid - k: mid + k + 1] = pr
            kgrid = Grid(0.0, grid.half_width, grid.n)
            res = convolve(SampledFunction(kgrid, kern),
                           SampledFunction(kgrid, values.astype(np.complex128)))
            out.append(np.abs(res.values))
        else:
            full = np.convolve(values, pr)
            out.append(h * np.abs(full[k: k + grid.n]))
    return out


def regular_maximal(w: Weight | SampledFunction, ell: int, *, lam: float | None = None,
                    beta: float | None = None, profile: BumpProfile | None = None,
                    radii: Sequence[float] | None = None, conv: str = "auto") -> Weight:
    """Bump-regularized maximal family.

    Exactly one of ``lam`` (the lam-form, radii in (0, lam^(-1/ell)],
    objective r*(lam*r)^(-1/(ell-1)) |P_r * w|) and ``beta`` (the
    analytic family at lam = 1, objective r^(ell*beta/(ell-1)) |P_r * w|)
    must be given. Signed input is allowed: the objective takes absolute
    values, as the analytic family is tested on mean-zero atoms.
    """
    if (lam is None) == (beta is None):
        raise ValueError("exactly one of lam and beta must be given")
    if beta is not None and not (0.0 <= beta <= 1.0):
        raise ValueError("beta must lie in [0, 1]")
    if lam is not None and lam < 1:
        raise ValueError("lam must be >= 1")
    if ell < 2:
        raise ValueError("ell must be >= 2")
    profile = profile or default_bump()
    grid = w.grid
    h = grid.h
    if radii is None:
        radii = regular_radii(ell, lam if lam is not None else 1.0, h)
    else:
        radii = [snap_radius(r, h) for r in radii]
    if conv == "auto":
        conv = "direct" if grid.n <= 4096 else "fft"
    e = 1.0 / (ell - 1)
    if lam is not None:
        factor = lambda r: r * (lam * r) ** (-e)
        aperture = lambda r: (lam * r) ** (-e)
    else:
        factor = lambda r: r ** (ell * beta * e)
        aperture = lambda r: r ** (-e)
    vals = np.asarray(w.values)
    convs = _bump_convolutions(vals, grid, radii, profile, conv)
    best = np.full(grid.n, -np.inf)
    reach = 0
    for r, cv in zip(radii, convs):
        t = cells(aperture(r), h)
        np.maximum(best, sliding_max(factor(r) * cv, t), out=best)
        reach = max(reach, t + cells(2.0 * r, h))
    return Weight(grid, best, boundary=boundary_mask(grid.n, reach))


def regular_maximal_brute(w: Weight | SampledFunction, ell: int, *, lam: float | None = None,
                          beta: float | None = None, profile: BumpProfile | None = None,
                          radii: Sequence[float] | None = None) -> Weight:
    """Oracle: shares the per-rung convolution primitive (validated separately
    against direct quadrature) but evaluates region suprema naively."""
    profile = profile or default_bump()
    grid = w.grid
    h = grid.h
    if radii is None:
        radii = regular_radii(ell, lam if lam is not None else 1.0, h)
    else:
        radii = [snap_radius(r, h) for r in radii]
    e = 1.0 / (ell - 1)
    if lam is not None:
        factor = lambda r: r * (lam * r) ** (-e)
        aperture = lambda r: (lam * r) ** (-e)
    else:
        factor = lambda r: r ** (ell * beta * e)
        aperture = lambda r: r ** (-e)
    vals = np.asarray(w.values)
    convs = _bump_convolutions(vals, grid, radii, profile, "direct")
    best = np.full(grid.n, -np.inf)
    reach = 0
    for r, cv in zip(radii, convs):
        t = cells(aperture(r), h)
        np.maximum(best, sliding_max_naive(factor(r) * cv, t), out=best)
        reach = max(reach, t + cells(2.0 * r, h))
    return Weight(grid, best, boundary=boundary_mask(grid.n, reach))


# ---------------------------------------------------------------------------
# config-string dispatch


def operator_by_name(name: str):
    """Operator factory for config strings.

    Formats: "M", "Mk:4", "Malpha:0.5", "Mll:3:256", "Mtilde:3",
    "Mreg:3:256", "Mbeta:3:1.0".
    """
    parts = name.split(":")
    head = parts[0]
    if head == "M" and len(parts) == 1:
        return lambda w: hardy_littlewood(w, 1)
    if head == "Mk":
        k = int(parts[1])
        return lambda w: hardy_littlewood(w, k)
    if head == "Malpha":
        alpha = float(parts[1])
        return lambda w: fractional_maximal(w, alpha)
    if head == "Mll":
        ell, lam = int(parts[1]), float(parts[2])
        return lambda w: approach_maximal(w, ApproachRegionParams(ell, lam))
    if head == "Mtilde":
        ell = int(parts[1])
        return lambda w: global_maximal(w, ell)
    if head == "Mreg":
        ell, lam = int(parts[1]), float(parts[2])
        return lambda w: regular_maximal(w, ell, lam=lam)
    if head == "Mbeta":
        ell, beta = int(parts[1]), float(parts[2])
        return lambda w: regular_maximal(w, ell, beta=beta)
    raise ValueError(f"unknown maximal operator name: {name!r}")
