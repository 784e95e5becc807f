"""Variant-string clustering and analyst merge/split decisions.

References are blocked by (year, author initial) and union-found within each
block over pairs scoring at or above the threshold, so the resulting
partition is the transitive closure of the similarity relation inside each
block. References without a parsed year never auto-merge; they stay
singletons until an analyst says otherwise.
"""

from __future__ import annotations

import hashlib
import json
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum

from .errors import InvalidSplitSubset, InvalidThreshold, UnknownCluster
from .refparse import ParsedCitedRef, RawRefId, ref_similarity

Partition = tuple["RefCluster", ...]


@dataclass(frozen=True)
class RefCluster:
    """A disambiguated group of variant strings treated as one work."""

    cluster_id: str
    members: tuple[ParsedCitedRef, ...]
    canonical: ParsedCitedRef
    rpy: int | None


class DecisionKind(str, Enum):
    MERGE = "merge"
    SPLIT = "split"


def _now_iso() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass(frozen=True)
class MergeDecision:
    """One analyst curation step: merge clusters, or split members out."""

    kind: DecisionKind
    targets: tuple[str, ...]
    split_members: tuple[RawRefId, ...] = ()
    timestamp: str = field(default_factory=_now_iso)
    note: str | None = None

    @classmethod
    def merge(cls, cluster_ids, note=None, timestamp=None):
        return cls(kind=DecisionKind.MERGE, targets=tuple(cluster_ids),
                   timestamp=timestamp or _now_iso(), note=note)

    @classmethod
    def split(cls, cluster_id, members, note=None, timestamp=None):
        return cls(kind=DecisionKind.SPLIT, targets=(cluster_id,),
                   split_members=tuple((cid, pos) for cid, pos in members),
                   timestamp=timestamp or _now_iso(), note=note)


def _cluster_id(raw_ids) -> str:
    canon = json.dumps(sorted([cid, pos] for cid, pos in raw_ids),
                       separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:16]


def build_cluster(members) -> RefCluster:
    """Assemble a cluster: id from member identities, canonical by raw-string
    frequency (ties to the smallest raw), year by member majority (ties to
    the earliest year)."""
    members = tuple(sorted(members, key=lambda m: m.raw_id))
    raw_counts = Counter(m.raw for m in members)
    best_raw = min(raw_counts, key=lambda r: (-raw_counts[r], r))
    canonical = next(m for m in members if m.raw == best_raw)
    year_counts = Counter(m.rpy for m in members if m.rpy is not None)
    rpy = (min(year_counts, key=lambda y: (-year_counts[y], y))
           if year_counts else None)
    return RefCluster(
        cluster_id=_cluster_id(m.raw_id for m in members),
        members=members,
        canonical=canonical,
        rpy=rpy,
    )


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, i):
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:
            self.parent[i], i = root, self.parent[i]
        return root

    def union(self, i, j):
        ri, rj = self.find(i), self.find(j)
        if ri != rj:
            self.parent[rj] = ri


def cluster_refs(refs, threshold: float) -> Partition:
    """Partition parsed references into variant clusters.

    Refs with a known year are blocked by (year, author initial); the
    clusters within a block are the connected components of the
    similarity >= threshold graph. Unyeared refs become singletons.
    """
    if not 0.0 < threshold <= 1.0:
        raise InvalidThreshold(f"threshold must be in (0, 1], got {threshold}")

    blocks: dict[tuple[int, str], list[ParsedCitedRef]] = defaultdict(list)
    singletons: list[ParsedCitedRef] = []
    for ref in refs:
        if ref.rpy is None:
            singletons.append(ref)
        else:
            blocks[(ref.rpy, ref.first_author[:1])].append(ref)

    clusters: list[RefCluster] = [build_cluster([ref]) for ref in singletons]
    for block in blocks.values():
        uf = _UnionFind(len(block))
        for i in range(len(block)):
            for j in range(i + 1, len(block)):
                if ref_similarity(block[i], block[j]) >= threshold:
                    uf.union(i, j)
        groups: dict[int, list[ParsedCitedRef]] = defaultdict(list)
        for i, ref in enumerate(block):
            groups[uf.find(i)].append(ref)
        clusters.extend(build_cluster(group) for group in groups.values())

    return tuple(sorted(clusters, key=lambda c: c.cluster_id))


def apply_decision(clusters: Partition, decision: MergeDecision) -> Partition:
    """Apply one merge/split decision, returning a new partition.

    The input partition is never mutated. Merging a cluster with itself is
    the identity; a split must carve out a proper non-empty member subset.
    """
    by_id = {c.cluster_id: c for c in clusters}

    if decision.kind is DecisionKind.MERGE:
        for cid in decision.targets:
            if cid not in by_id:
                raise UnknownCluster(cid)
        target_ids = set(decision.targets)
        if len(target_ids) <= 1:
            return tuple(clusters)
        members = [m for cid in sorted(target_ids)
                   for m in by_id[cid].members]
        merged = build_cluster(members)
        rest = [c for c in clusters if c.cluster_id not in target_ids]
        return tuple(sorted(rest + [merged], key=lambda c: c.cluster_id))

    cid = decision.targets[0]
    if cid not in by_id:
        raise UnknownCluster(cid)
    cluster = by_id[cid]
    subset = set(decision.split_members)
    member_ids = {m.raw_id for m in cluster.members}
    if not subset or not subset < member_ids:
        raise InvalidSplitSubset(
            "split subset must be a proper non-empty subset of the cluster")
    keep = [m for m in cluster.members if m.raw_id not in subset]
    moved = [m for m in cluster.members if m.raw_id in subset]
    rest = [c for c in clusters if c.cluster_id != cid]
    return tuple(sorted(rest + [build_cluster(keep), build_cluster(moved)],
                        key=lambda c: c.cluster_id))
