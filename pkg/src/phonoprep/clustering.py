"""Seeded random clustering and the K-Means baseline.

Random clustering partitions a vocabulary into clusters whose size multiset
is copied from a baseline encoding (how many units share each code), or
into near-equal clusters at a chosen fraction of the vocabulary size.
Units are sorted before sampling so the result depends only on the unit
set and the seed, not on input order.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import (
    EmptyUnitList,
    InvalidFraction,
    NonAlphabeticToken,
    SizeMismatch,
    TooFewPoints,
)

__all__ = [
    "SizeDistribution",
    "ClusterModel",
    "KMeansModel",
    "UNKNOWN_CLUSTER",
    "encode_or_passthrough",
    "derive_size_distribution",
    "random_cluster",
    "random_cluster_uniform",
    "kmeans_fit",
    "encode_with_clusters",
    "save_cluster_model",
    "load_cluster_model",
    "save_kmeans_model",
    "load_kmeans_model",
]

UNKNOWN_CLUSTER = "G_UNK"


@dataclass(frozen=True)
class SizeDistribution:
    """Multiset of group sizes, one per unique baseline code."""

    multiplicities: tuple[int, ...]

    def __post_init__(self):
        if any(m <= 0 for m in self.multiplicities):
            raise ValueError("multiplicities must be positive")
        object.__setattr__(
            self, "multiplicities", tuple(sorted(self.multiplicities, reverse=True))
        )

    @property
    def total(self) -> int:
        return sum(self.multiplicities)

    def __len__(self) -> int:
        return len(self.multiplicities)


@dataclass(frozen=True)
class ClusterModel:
    """Seeded unit -> cluster-id mapping ("G1", "G2", ...)."""

    assignment: dict[str, str]
    seed: int
    source: str  # "baseline-derived" or "uniform-k"

    @property
    def num_clusters(self) -> int:
        return len(set(self.assignment.values()))

    def cluster_sizes(self) -> list[int]:
        return sorted(Counter(self.assignment.values()).values(), reverse=True)


@dataclass(frozen=True)
class KMeansModel:
    centroids: np.ndarray  # (K, d)
    assignment: np.ndarray  # (n,) cluster index per point
    cost_history: tuple[float, ...]  # within-cluster cost after each update

    @property
    def k(self) -> int:
        return len(self.centroids)

    @property
    def cost(self) -> float:
        return self.cost_history[-1]


def encode_or_passthrough(unit: str, encoder: Callable[[str], str]) -> str:
    """Apply ``encoder``; tokens it rejects keep their surface form."""
    try:
        return encoder(unit)
    except NonAlphabeticToken:
        return unit


def derive_size_distribution(
    units: Sequence[str], encoder: Callable[[str], str]
) -> SizeDistribution:
    """Group ``units`` by their baseline code and return the group sizes."""
    if not units:
        raise EmptyUnitList("no units to encode")
    if len(set(units)) != len(units):
        raise ValueError("units must be distinct")
    groups = Counter(encode_or_passthrough(u, encoder) for u in units)
    return SizeDistribution(tuple(groups.values()))


def _partition(units: Sequence[str], sizes: Sequence[int], seed: int, source: str) -> ClusterModel:
    ordered = sorted(units)
    rng = np.random.default_rng(seed)
    perm = rng.permutation(len(ordered))
    assignment: dict[str, str] = {}
    pos = 0
    for k, size in enumerate(sizes, start=1):
        for idx in perm[pos:pos + size]:
            assignment[ordered[idx]] = f"G{k}"
        pos += size
    return ClusterModel(assignment=assignment, seed=seed, source=source)


def random_cluster(units: Sequence[str], dist: SizeDistribution, seed: int) -> ClusterModel:
    """Uniformly sample units without replacement into clusters sized by ``dist``."""
    if not units:
        raise EmptyUnitList("no units to cluster")
    if len(set(units)) != len(units):
        raise ValueError("units must be distinct")
    if dist.total != len(units):
        raise SizeMismatch(
            f"distribution covers {dist.total} units, got {len(units)}"
        )
    return _partition(units, dist.multiplicities, seed, "baseline-derived")


def random_cluster_uniform(units: Sequence[str], fraction: float, seed: int) -> ClusterModel:
    """Partition into ``round(fraction * |units|)`` near-equal clusters."""
    if not units:
        raise EmptyUnitList("no units to cluster")
    if len(set(units)) != len(units):
        raise ValueError("units must be distinct")
    if not 0.0 < fraction <= 1.0:
        raise InvalidFraction(f"fraction {fraction} outside (0, 1]")
    n = len(units)
    k = int(np.floor(fraction * n + 0.5))
    if k < 1:
        raise InvalidFraction(f"fraction {fraction} yields no clusters for {n} units")
    base, extra = divmod(n, k)
    sizes = [base + 1] * extra + [base] * (k - extra)
    return _partition(units, sizes, seed, "uniform-k")


def _lloyd_once(pts: np.ndarray, k: int, rng: np.random.Generator, max_iter: int):
    # k-means++ seeding
    centroids = np.empty((k, pts.shape[1]))
    centroids[0] = pts[rng.integers(len(pts))]
    closest_sq = np.sum((pts - centroids[0]) ** 2, axis=1)
    for j in range(1, k):
        total = closest_sq.sum()
        if total <= 0.0:
            centroids[j] = pts[rng.integers(len(pts))]
        else:
            r = rng.random() * total
            centroids[j] = pts[np.searchsorted(np.cumsum(closest_sq), r)]
        closest_sq = np.minimum(closest_sq, np.sum((pts - centroids[j]) ** 2, axis=1))

    assignment = np.full(len(pts), -1)
    costs: list[float] = []
    for _ in range(max_iter):
        d2 = np.sum((pts[:, None, :] - centroids[None, :, :]) ** 2, axis=2)
        new_assignment = np.argmin(d2, axis=1)
        costs.append(float(d2[np.arange(len(pts)), new_assignment].sum()))
        if np.array_equal(new_assignment, assignment):
            break
        assignment = new_assignment
        for j in range(k):
            members = pts[assignment == j]
            if len(members):
                centroids[j] = members.mean(axis=0)
            else:
                dist_own = np.sum((pts - centroids[assignment]) ** 2, axis=1)
                centroids[j] = pts[np.argmax(dist_own)]
    return centroids, assignment, costs


def kmeans_fit(
    points: Sequence[Sequence[float]] | np.ndarray,
    k: int,
    seed: int,
    max_iter: int = 100,
    n_init: int = 10,
) -> KMeansModel:
    """Lloyd's algorithm from k-means++ style seeding, best of ``n_init`` restarts.

    Empty clusters are re-seeded from the point farthest from its centroid.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or len(pts) == 0:
        raise ValueError("points must be a non-empty (n, d) array")
    if k < 1 or k > len(pts):
        raise TooFewPoints(f"need k in [1, {len(pts)}], got {k}")
    rng = np.random.default_rng(seed)

    best: tuple[np.ndarray, np.ndarray, list[float]] | None = None
    for _ in range(max(1, n_init)):
        centroids, assignment, costs = _lloyd_once(pts, k, rng, max_iter)
        if best is None or costs[-1] < best[2][-1]:
            best = (centroids, assignment, costs)

    return KMeansModel(
        centroids=best[0],
        assignment=best[1],
        cost_history=tuple(best[2]),
    )


def encode_with_clusters(sentence: Iterable[str], model: ClusterModel) -> list[str]:
    """Replace each token by its cluster id; unknown tokens get G_UNK."""
    return [model.assignment.get(tok, UNKNOWN_CLUSTER) for tok in sentence]


def save_kmeans_model(
    model: KMeansModel,
    centroids_path: str | Path,
    assignment_path: str | Path,
) -> None:
    """Write centroids as TSV rows and point assignments one index per line."""
    with open(centroids_path, "w", encoding="utf-8", newline="\n") as f:
        for row in model.centroids:
            f.write("\t".join(repr(float(x)) for x in row) + "\n")
    with open(assignment_path, "w", encoding="utf-8", newline="\n") as f:
        for j in model.assignment:
            f.write(f"{int(j)}\n")


def load_kmeans_model(
    centroids_path: str | Path,
    assignment_path: str | Path,
) -> KMeansModel:
    centroids = np.array([
        [float(x) for x in line.split("\t")]
        for line in Path(centroids_path).read_text(encoding="utf-8").splitlines()
        if line
    ])
    assignment = np.array([
        int(line)
        for line in Path(assignment_path).read_text(encoding="utf-8").splitlines()
        if line
    ])
    return KMeansModel(centroids=centroids, assignment=assignment,
                       cost_history=(float("nan"),))


def save_cluster_model(model: ClusterModel, path: str | Path) -> None:
    lines = [f"# seed: {model.seed}", f"# source: {model.source}"]
    lines += [f"{unit}\t{cid}" for unit, cid in sorted(model.assignment.items())]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_cluster_model(path: str | Path) -> ClusterModel:
    seed = 0
    source = "baseline-derived"
    assignment: dict[str, str] = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("# seed:"):
            seed = int(line.split(":", 1)[1])
        elif line.startswith("# source:"):
            source = line.split(":", 1)[1].strip()
        elif line and not line.startswith("#"):
            unit, cid = line.split("\t")
            assignment[unit] = cid
    return ClusterModel(assignment=assignment, seed=seed, source=source)
