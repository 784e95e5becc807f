"""Spectrum computation, peak detection, and per-cluster indicators.

The counting unit is the (citing publication, cluster) pair: a reference
list that repeats an entry still counts its citing work once. The deviation
of a year is its count minus the median count of the centered window
(default five years), truncated at the spectrum ends.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from statistics import median

import numpy as np

from .cluster import Partition, RefCluster
from .corpus import Corpus
from .errors import EmptyCorpus, EmptyPartition


@dataclass(frozen=True)
class SpectrumPoint:
    rpy: int
    ncr: int
    deviation: float


@dataclass(frozen=True)
class Peak:
    rpy: int
    deviation: float
    ncr: int
    top_clusters: tuple[tuple[str, int], ...] = ()


@dataclass(frozen=True)
class ClusterIndicators:
    cluster_id: str
    n_cr: int
    perc_yr: float
    perc_all: float
    n_top10: int
    n_top25: int
    n_top50: int
    citing_year_profile: tuple[tuple[int, int], ...]

    def n_topk(self, k: int) -> int:
        return {10: self.n_top10, 25: self.n_top25, 50: self.n_top50}[k]


def cluster_ncr(cluster: RefCluster, pair_dedup: bool = True) -> int:
    """Citing works referencing the cluster (or raw reference count)."""
    citing = [m.raw_id[0] for m in cluster.members]
    return len(set(citing)) if pair_dedup else len(citing)


def citing_year_profile(cluster: RefCluster, year_of: dict,
                        pair_dedup: bool = True) -> tuple[tuple[int, int], ...]:
    """Count the cluster's citing works per citing year."""
    if pair_dedup:
        years = [year_of[pid] for pid in {m.raw_id[0] for m in cluster.members}]
    else:
        years = [year_of[m.raw_id[0]] for m in cluster.members]
    return tuple(sorted(Counter(years).items()))


def median_deviations(counts, window: int = 5) -> list[float]:
    """Per-position deviation from the centered-window median.

    The window is truncated at the sequence ends; an even-length truncated
    window takes the mean of its two middle values.
    """
    if window < 1 or window % 2 == 0:
        raise ValueError(f"window must be a positive odd integer, got {window}")
    half = window // 2
    n = len(counts)
    out = []
    for i in range(n):
        win = counts[max(0, i - half):min(n, i + half + 1)]
        out.append(float(counts[i] - median(win)))
    return out


def compute_spectrum(clusters: Partition, window: int = 5,
                     pair_dedup: bool = True) -> tuple[SpectrumPoint, ...]:
    """Count (citing publication, cluster) pairs per referenced year.

    Returns a dense year-sorted spectrum over [min rpy, max rpy]; years with
    no references carry a zero count.
    """
    yeared = [c for c in clusters if c.rpy is not None]
    if not yeared:
        raise EmptyCorpus("no cluster has a known referenced publication year")
    by_year: Counter = Counter()
    for cluster in yeared:
        by_year[cluster.rpy] += cluster_ncr(cluster, pair_dedup)
    years = range(min(by_year), max(by_year) + 1)
    counts = [by_year.get(y, 0) for y in years]
    deviations = median_deviations(counts, window)
    return tuple(SpectrumPoint(y, c, d)
                 for y, c, d in zip(years, counts, deviations))


def detect_peaks(spectrum, min_deviation: float = 0.0,
                 max_rpy: int | None = None) -> tuple[Peak, ...]:
    """Positive-deviation years that are strict local count maxima.

    Years at the spectrum edge compare only to their existing neighbor.
    Years above max_rpy (when given) are excluded. Sorted by deviation,
    largest first.
    """
    points = list(spectrum)
    peaks = []
    for i, p in enumerate(points):
        if p.deviation <= 0.0 or p.deviation < min_deviation:
            continue
        if i > 0 and p.ncr <= points[i - 1].ncr:
            continue
        if i < len(points) - 1 and p.ncr <= points[i + 1].ncr:
            continue
        if max_rpy is not None and p.rpy > max_rpy:
            continue
        peaks.append(Peak(rpy=p.rpy, deviation=p.deviation, ncr=p.ncr))
    peaks.sort(key=lambda pk: (-pk.deviation, pk.rpy))
    return tuple(peaks)


def top_clusters_for_year(rpy: int, k: int, clusters: Partition,
                          pair_dedup: bool = True) -> tuple[tuple[str, int], ...]:
    """Rank the year's clusters by citing-work count, ties by canonical raw."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    eligible = [c for c in clusters if c.rpy == rpy]
    ranked = sorted(
        eligible,
        key=lambda c: (-cluster_ncr(c, pair_dedup), c.canonical.raw))
    return tuple((c.cluster_id, cluster_ncr(c, pair_dedup))
                 for c in ranked[:k])


def attach_top_clusters(peaks, clusters: Partition, k: int = 5,
                        pair_dedup: bool = True) -> tuple[Peak, ...]:
    """Fill each peak's top-cluster list for drill-down display."""
    return tuple(
        Peak(rpy=p.rpy, deviation=p.deviation, ncr=p.ncr,
             top_clusters=top_clusters_for_year(p.rpy, k, clusters, pair_dedup))
        for p in peaks)


def _percentile_rank(value: int, values: list[int]) -> float:
    if len(values) == 1:
        return 100.0
    smaller = sum(1 for v in values if v < value)
    return 100.0 * smaller / (len(values) - 1)


def compute_indicators(clusters: Partition, corpus: Corpus,
                       pair_dedup: bool = True) -> tuple[ClusterIndicators, ...]:
    """Per-cluster reach indicators.

    perc_yr / perc_all are percentile ranks of the citing-work count among
    the clusters of the same referenced year and among all clusters. n_topK
    counts the citing years in which the cluster's per-year count reaches
    the (100-K)th percentile of that year's nonzero counts.
    """
    if not clusters:
        raise EmptyPartition("no clusters to compute indicators for")
    year_of = {p.id: p.pub_year for p in corpus.publications}

    ncr = {c.cluster_id: cluster_ncr(c, pair_dedup) for c in clusters}
    all_counts = list(ncr.values())
    by_rpy: dict = defaultdict(list)
    for c in clusters:
        by_rpy[c.rpy].append(ncr[c.cluster_id])

    profiles = {c.cluster_id: citing_year_profile(c, year_of, pair_dedup)
                for c in clusters}
    per_year_counts: dict[int, dict[str, int]] = defaultdict(dict)
    for cid, profile in profiles.items():
        for year, count in profile:
            per_year_counts[year][cid] = count
    thresholds = {
        year: {k: float(np.percentile(list(counts.values()), 100 - k))
               for k in (10, 25, 50)}
        for year, counts in per_year_counts.items()
    }

    out = []
    for c in clusters:
        topk = {10: 0, 25: 0, 50: 0}
        for year, count in profiles[c.cluster_id]:
            for k in (10, 25, 50):
                if count >= thresholds[year][k]:
                    topk[k] += 1
        out.append(ClusterIndicators(
            cluster_id=c.cluster_id,
            n_cr=ncr[c.cluster_id],
            perc_yr=_percentile_rank(ncr[c.cluster_id], by_rpy[c.rpy]),
            perc_all=_percentile_rank(ncr[c.cluster_id], all_counts),
            n_top10=topk[10],
            n_top25=topk[25],
            n_top50=topk[50],
            citing_year_profile=profiles[c.cluster_id],
        ))
    return tuple(out)
