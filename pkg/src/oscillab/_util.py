"""Small shared helpers: sliding-window maxima, window arithmetic, thread map."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np
from scipy.ndimage import maximum_filter1d

T = TypeVar("T")
R = TypeVar("R")


def cells(radius: float, h: float) -> int:
    """Window half-width in whole cells: largest s with s*h <= radius.

    A tiny relative allowance keeps near-integer ratios stable; both the
    fast paths and the brute-force oracles must quantize through here so
    that they describe the same discretization.
    """
    return int(np.floor(radius / h + 1e-9))


def snap_radius(r: float, h: float) -> float:
    """Quantize a radius to the half-cell point (2s+1)*h/2 of its window.

    A window of 2s+1 whole cells has measure exactly (2s+1)*h, so the
    snapped radius makes ``h * window_sum`` the geometrically exact
    integral over |y - y'| <= r of the cell-step weight.
    """
    return (2 * cells(r, h) + 1) * h / 2.0


def snap_cells(r: float, h: float) -> int:
    """Window half-width of a snapped radius: inverse of :func:`snap_radius`."""
    return int(round(r / h - 0.5))


def sliding_max(values: np.ndarray, halfwidth: int) -> np.ndarray:
    """Centered sliding maximum over windows of 2*halfwidth+1 cells.

    Windows overflowing the array are clamped to it. Max is exact, so the
    production path (a C maximum filter) agrees bitwise with any naive
    evaluation of the same windows.
    """
    if halfwidth <= 0:
        return values.copy()
    size = 2 * halfwidth + 1
    if size >= 2 * len(values):
        return np.full_like(values, np.max(values))
    return maximum_filter1d(values, size=size, mode="constant", cval=-np.inf)


def sliding_max_naive(values: np.ndarray, halfwidth: int) -> np.ndarray:
    """Oracle counterpart of :func:`sliding_max` via stride tricks."""
    if halfwidth <= 0:
        return values.copy()
    padded = np.pad(values, halfwidth, constant_values=-np.inf)
    return np.lib.stride_tricks.sliding_window_view(padded, 2 * halfwidth + 1).max(axis=1)


def window_sums(values: np.ndarray, halfwidth: int) -> np.ndarray:
    """Clamped sums over centered windows of 2*halfwidth+1 cells, via prefix sums."""
    n = len(values)
    prefix = np.concatenate([[0.0], np.cumsum(values)])
    idx = np.arange(n)
    lo = np.maximum(idx - halfwidth, 0)
    hi = np.minimum(idx + halfwidth, n - 1)
    return prefix[hi + 1] - prefix[lo]


def window_sums_naive(values: np.ndarray, halfwidth: int) -> np.ndarray:
    """Direct-summation counterpart of :func:`window_sums` (oracle path)."""
    n = len(values)
    kernel = np.ones(2 * halfwidth + 1)
    full = np.convolve(values, kernel)
    return full[halfwidth:halfwidth + n]


def boundary_mask(n: int, halfwidth: int) -> np.ndarray:
    """Cells whose window of the given half-width overflows the grid."""
    mask = np.zeros(n, dtype=bool)
    m = min(halfwidth, n)
    if m > 0:
        mask[:m] = True
        mask[n - m:] = True
    return mask


def smooth_plateau(t: np.ndarray, inner: float, outer: float) -> np.ndarray:
    """C-infinity even cutoff: 1 for |t| <= inner, 0 for |t| >= outer.

    The transition is the standard exp(-1/s) glue, so all derivatives
    vanish at both junctions.
    """
    a = np.abs(np.asarray(t, dtype=float))
    out = np.zeros_like(a)
    out[a <= inner] = 1.0
    mid = (a > inner) & (a < outer)
    s = (a[mid] - inner) / (outer - inner)
    with np.errstate(divide="ignore", over="ignore"):
        ea = np.exp(-1.0 / s)
        eb = np.exp(-1.0 / (1.0 - s))
    out[mid] = eb / (ea + eb)
    return out


def standard_bump(t: np.ndarray) -> np.ndarray:
    """exp(-1/(1-t^2)) on (-1, 1), zero outside."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = np.abs(t) < 1.0
    with np.errstate(divide="ignore"):
        out[inside] = np.exp(-1.0 / (1.0 - t[inside] ** 2))
    return out


def thread_count() -> int:
    raw = os.environ.get("OSCILLAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def map_ordered(fn: Callable[[T], R], items: Sequence[T] | Iterable[T]) -> list[R]:
    """Apply ``fn`` over ``items``, preserving order.

    Runs on a thread pool when OSCILLAB_THREADS > 1; results are collected
    in input order either way, so aggregation stays deterministic.
    """
    items = list(items)
    workers = thread_count()
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
