"""Piecewise-linear growth segmentation of an annual count series.

An exact dynamic program places k-1 breakpoints to minimize the total sum
of squared residuals of per-segment ordinary least-squares lines, honoring
a minimum segment length. Fitting on the log1p scale makes slopes read as
growth rates; the linear scale is kept for diagnostics. BIC picks the
segment count when it is not fixed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .cluster import Partition
from .errors import InvalidK, SeriesTooShort
from .spectrum import cluster_ncr


class Scale(str, Enum):
    LINEAR = "linear"
    LOG1P = "log1p"


@dataclass(frozen=True)
class Segment:
    start_rpy: int
    end_rpy: int
    slope: float
    intercept: float  # fitted value at start_rpy, on the fitted scale
    sse: float


@dataclass(frozen=True)
class SegmentFit:
    segments: tuple[Segment, ...]
    k: int
    total_sse: float
    bic: float
    scale: Scale


def _transform(values: np.ndarray, scale: Scale) -> np.ndarray:
    if scale is Scale.LOG1P:
        if np.any(values < 0):
            raise ValueError("log1p scale requires non-negative values")
        return np.log1p(values)
    return values.astype(float)


def _cost_matrix(y: np.ndarray) -> np.ndarray:
    """D[i, j] = SSE of the OLS line through points i..j inclusive.

    Sums restart at every i with a segment-local x origin, which keeps the
    cancellation error at the scale of the segment itself.
    """
    n = len(y)
    D = np.zeros((n, n))
    for i in range(n):
        seg = y[i:]
        m = len(seg)
        x = np.arange(m, dtype=float)
        L = x + 1.0
        Sy = np.cumsum(seg)
        Sx = np.cumsum(x)
        Sxx = np.cumsum(x * x)
        Sxy = np.cumsum(x * seg)
        Syy = np.cumsum(seg * seg)
        vx = Sxx - Sx * Sx / L
        cxy = Sxy - Sx * Sy / L
        vy = Syy - Sy * Sy / L
        with np.errstate(divide="ignore", invalid="ignore"):
            explained = np.where(vx > 0, cxy * cxy / vx, 0.0)
        D[i, i:] = np.maximum(vy - explained, 0.0)
    return D


def _ols(y: np.ndarray, i: int, j: int) -> tuple[float, float, float]:
    """Slope, fitted value at the segment start, and SSE for points i..j."""
    seg = y[i:j + 1]
    x = np.arange(len(seg), dtype=float)
    xm = x.mean()
    ym = seg.mean()
    vx = float(np.sum((x - xm) ** 2))
    if vx == 0.0:
        return 0.0, float(ym), 0.0
    slope = float(np.sum((x - xm) * (seg - ym)) / vx)
    intercept = float(ym - slope * xm)
    resid = seg - (intercept + slope * x)
    return slope, intercept, float(np.sum(resid * resid))


def _bic(total_sse: float, n: int, k: int) -> float:
    p = 2 * k + (k - 1)
    if total_sse <= 0.0:
        return float("-inf")
    return n * math.log(total_sse / n) + p * math.log(n)


def _validate_series(series) -> tuple[list[int], np.ndarray]:
    pairs = list(series)
    if not pairs:
        raise SeriesTooShort("empty series")
    years = [int(y) for y, _ in pairs]
    values = np.asarray([v for _, v in pairs], dtype=float)
    if years != list(range(years[0], years[0] + len(years))):
        raise ValueError("series years must be consecutive")
    return years, values


def fit_fixed_k(series, k: int, min_len: int = 5,
                scale: Scale = Scale.LOG1P) -> SegmentFit:
    """Optimal k-segment fit of a dense (year, value) series.

    Exact over all breakpoint placements with segments of at least min_len
    points; ties resolve toward the earliest breakpoints.
    """
    if k < 1:
        raise InvalidK(f"k must be >= 1, got {k}")
    if min_len < 1:
        raise ValueError(f"min_len must be >= 1, got {min_len}")
    years, values = _validate_series(series)
    n = len(years)
    if n < k * min_len:
        raise SeriesTooShort(
            f"series of length {n} cannot hold {k} segments of >= {min_len} points")

    y = _transform(values, scale)
    D = _cost_matrix(y)

    # C[m][i]: best SSE covering points i..n-1 with m segments.
    # Scanning segment ends in increasing order and taking the first argmin
    # yields the lexicographically earliest breakpoints on ties.
    INF = float("inf")
    C = np.full((k + 1, n + 1), INF)
    E = np.zeros((k + 1, n), dtype=int)
    for i in range(n):
        if n - i >= min_len:
            C[1][i] = D[i][n - 1]
    for m in range(2, k + 1):
        for i in range(n):
            lo = i + min_len - 1
            hi = n - 1 - (m - 1) * min_len
            if lo > hi:
                continue
            cand = D[i, lo:hi + 1] + C[m - 1, lo + 1:hi + 2]
            best = int(np.argmin(cand))
            C[m][i] = cand[best]
            E[m][i] = lo + best

    bounds = []
    i = 0
    for m in range(k, 1, -1):
        e = E[m][i]
        bounds.append((i, e))
        i = e + 1
    bounds.append((i, n - 1))

    segments = []
    total = 0.0
    for i, j in bounds:
        slope, intercept, sse = _ols(y, i, j)
        total += sse
        segments.append(Segment(start_rpy=years[i], end_rpy=years[j],
                                slope=slope, intercept=intercept, sse=sse))
    return SegmentFit(segments=tuple(segments), k=k, total_sse=total,
                      bic=_bic(total, n, k), scale=scale)


def select_k(series, k_max: int, min_len: int = 5,
             scale: Scale = Scale.LOG1P) -> SegmentFit:
    """Fit k = 1..k_max and keep the BIC-minimal fit (ties to smaller k)."""
    if k_max < 1:
        raise InvalidK(f"k_max must be >= 1, got {k_max}")
    pairs = list(series)
    best: SegmentFit | None = None
    for k in range(1, k_max + 1):
        try:
            fit = fit_fixed_k(pairs, k, min_len=min_len, scale=scale)
        except SeriesTooShort:
            continue
        if best is None or fit.bic < best.bic:
            best = fit
    if best is None:
        raise SeriesTooShort(
            f"series of length {len(pairs)} infeasible for any k <= {k_max} "
            f"with min_len {min_len}")
    return best


def segment_landmarks(fit: SegmentFit, clusters: Partition,
                      k_per_segment: int,
                      pair_dedup: bool = True) -> tuple[tuple[tuple[str, int], ...], ...]:
    """Most-referenced clusters inside each segment's year range."""
    if k_per_segment < 1:
        raise ValueError(f"k_per_segment must be >= 1, got {k_per_segment}")
    out = []
    for seg in fit.segments:
        eligible = [c for c in clusters
                    if c.rpy is not None and seg.start_rpy <= c.rpy <= seg.end_rpy]
        ranked = sorted(
            eligible,
            key=lambda c: (-cluster_ncr(c, pair_dedup), c.canonical.raw))
        out.append(tuple((c.cluster_id, cluster_ncr(c, pair_dedup))
                         for c in ranked[:k_per_segment]))
    return tuple(out)
