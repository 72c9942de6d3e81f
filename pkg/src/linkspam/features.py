"""Link-based features per domain: degrees, ranks, supporters, reciprocity,
intra-domain path length and degree-distribution shape."""

from __future__ import annotations

import csv
import math
from collections import Counter, deque
from dataclasses import astuple, dataclass, fields
from typing import Iterable, Mapping, NamedTuple, TextIO

import numpy as np

from .errors import InvalidInputError, NotFoundError
from .linkrank import HitsScores, PageRankScores
from .webgraph import DomainClustering, WebGraph

DEFAULT_DEPTH = 3

# returned by powerlaw_deviation when there are fewer than two usable bins
DEGENERATE_DEVIATION = math.inf


@dataclass(frozen=True)
class FeatureVector:
    in_degree: int
    out_degree: int
    pagerank: float
    authority: float
    hub: float
    supporters: int
    reciprocity: float
    avg_path_length: float | None
    powerlaw_deviation: float

    @classmethod
    def names(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def as_tuple(self) -> tuple:
        return astuple(self)


FEATURE_NAMES = FeatureVector.names()


@dataclass(frozen=True)
class DegreeDistribution:
    histogram: Mapping[int, float]
    sample_size: int

    def mean(self) -> float:
        return sum(k * p for k, p in self.histogram.items())


class PowerLawFit(NamedTuple):
    deviation: float
    exponent: float
    degenerate: bool


def _scope_set(graph: WebGraph, scope: Iterable[str] | None) -> set[str]:
    if scope is None:
        return set(graph.nodes)
    pages = set(scope)
    missing = [p for p in pages if p not in graph]
    if missing:
        raise NotFoundError(f"unknown page {sorted(missing)[0]!r}")
    return pages


def supporters(graph: WebGraph, page: str, depth: int = DEFAULT_DEPTH) -> int:
    """Count distinct pages with a directed path of length <= depth into ``page``."""
    if depth < 1:
        raise InvalidInputError(f"depth must be >= 1, got {depth}")
    if page not in graph:
        raise NotFoundError(f"unknown page {page!r}")
    seen = {page}
    frontier = [page]
    for _ in range(depth):
        nxt = []
        for v in frontier:
            for u in graph.reverse[v]:
                if u not in seen:
                    seen.add(u)
                    nxt.append(u)
        if not nxt:
            break
        frontier = nxt
    return len(seen) - 1


def avg_path_length(graph: WebGraph, clustering: DomainClustering, domain: str) -> float | None:
    """Mean shortest intra-domain path length over connected ordered pairs.

    Only edges with both ends inside the domain are walked. Returns None
    when no ordered pair of distinct pages is connected.
    """
    clustering.require(domain)
    pages = clustering.members[domain]
    total = 0
    pairs = 0
    for source in sorted(pages):
        dist = {source: 0}
        queue = deque([source])
        while queue:
            u = queue.popleft()
            for v in graph.forward[u]:
                if v in pages and v not in dist:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        total += sum(dist.values())
        pairs += len(dist) - 1
    if pairs == 0:
        return None
    return total / pairs


def reciprocity(graph: WebGraph, scope: Iterable[str] | None = None) -> float:
    """Fraction of edges inside ``scope`` whose reverse edge also exists."""
    pages = _scope_set(graph, scope)
    edges = [(u, v) for u in pages for v in graph.forward[u] if v in pages]
    if not edges:
        return 0.0
    mutual = sum(1 for u, v in edges if u in graph.forward[v])
    return mutual / len(edges)


def degree_distribution(
    graph: WebGraph, scope: Iterable[str] | None = None, kind: str = "total"
) -> DegreeDistribution:
    """Empirical P(K) over ``scope``, counting only edges inside the scope."""
    if kind not in ("in", "out", "total"):
        raise InvalidInputError(f"kind must be in|out|total, got {kind!r}")
    pages = _scope_set(graph, scope)
    if not pages:
        raise InvalidInputError("degree_distribution needs a non-empty scope")
    counts: Counter[int] = Counter()
    for p in pages:
        k = 0
        if kind in ("out", "total"):
            k += sum(1 for v in graph.forward[p] if v in pages)
        if kind in ("in", "total"):
            k += sum(1 for u in graph.reverse[p] if u in pages)
        counts[k] += 1
    n = len(pages)
    return DegreeDistribution({k: c / n for k, c in sorted(counts.items())}, n)


def powerlaw_fit(dist: DegreeDistribution) -> PowerLawFit:
    """Least-squares line through (log K, log P(K)) for K >= 1.

    ``deviation`` is the RMS residual in log space, ``exponent`` is gamma
    in P(K) ~ K^-gamma. Fewer than two positive-degree bins gives the
    degenerate sentinel.
    """
    ks = [k for k, p in dist.histogram.items() if k >= 1 and p > 0]
    if len(ks) < 2:
        return PowerLawFit(DEGENERATE_DEVIATION, math.nan, True)
    x = np.log(np.asarray(ks, dtype=float))
    y = np.log(np.asarray([dist.histogram[k] for k in ks], dtype=float))
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (intercept + slope * x)
    return PowerLawFit(float(np.sqrt(np.mean(resid**2))), float(-slope), False)


def powerlaw_deviation(dist: DegreeDistribution) -> float:
    return powerlaw_fit(dist).deviation


def ccdf_exponent(dist: DegreeDistribution) -> float:
    """Tail exponent gamma from a least-squares fit of log P(K >= k) on log k.

    The cumulative form is far less sensitive to sparse tail bins than the
    raw histogram, so it is the better estimate of how heavy a tail is.
    P(K >= k) ~ k^-(gamma - 1). Returns nan with fewer than two positive degrees.
    """
    ks = sorted(k for k, p in dist.histogram.items() if k >= 1 and p > 0)
    if len(ks) < 2:
        return math.nan
    tail = np.cumsum([dist.histogram[k] for k in reversed(ks)])[::-1]
    slope, _ = np.polyfit(np.log(np.asarray(ks, dtype=float)), np.log(tail), 1)
    return float(1.0 - slope)


def extract_features(
    graph: WebGraph,
    clustering: DomainClustering,
    ranks: PageRankScores,
    hits_scores: HitsScores,
    depth: int = DEFAULT_DEPTH,
) -> dict[str, FeatureVector]:
    """Aggregate page-level quantities into one FeatureVector per domain.

    Degrees, supporters and the three rank scores are summed over member
    pages; reciprocity, path length and power-law deviation are computed on
    the member set itself. Keys come back sorted by domain.
    """
    for name, table in (("pagerank", ranks.scores), ("hub", hits_scores.hub),
                        ("authority", hits_scores.authority)):
        missing = [p for p in graph.nodes if p not in table]
        if missing:
            raise InvalidInputError(f"{name} scores missing page {missing[0]!r}")

    out = {}
    for dom in clustering.domains:
        pages = sorted(clustering.members[dom])
        dist = degree_distribution(graph, pages, "total")
        out[dom] = FeatureVector(
            in_degree=sum(graph.in_degree(p) for p in pages),
            out_degree=sum(graph.out_degree(p) for p in pages),
            pagerank=math.fsum(ranks.scores[p] for p in pages),
            authority=math.fsum(hits_scores.authority[p] for p in pages),
            hub=math.fsum(hits_scores.hub[p] for p in pages),
            supporters=sum(supporters(graph, p, depth) for p in pages),
            reciprocity=reciprocity(graph, pages),
            avg_path_length=avg_path_length(graph, clustering, dom),
            powerlaw_deviation=powerlaw_deviation(dist),
        )
    return out


def feature_matrix(vectors: Mapping[str, FeatureVector]) -> tuple[list[str], np.ndarray]:
    """Stack vectors into a finite float matrix (rows sorted by domain).

    An undefined path length becomes 0. A degenerate power-law deviation
    becomes the largest finite deviation in the column (0 if none).
    """
    domains = sorted(vectors)
    rows = [[math.nan if v is None else float(v) for v in vectors[d].as_tuple()]
            for d in domains]
    X = np.asarray(rows, dtype=float).reshape(len(domains), len(FEATURE_NAMES))
    path_col = FEATURE_NAMES.index("avg_path_length")
    dev_col = FEATURE_NAMES.index("powerlaw_deviation")
    X[np.isnan(X[:, path_col]), path_col] = 0.0
    dev = X[:, dev_col]
    finite = np.isfinite(dev)
    fill = dev[finite].max() if finite.any() else 0.0
    dev[~finite] = fill
    return domains, X


def write_features_csv(vectors: Mapping[str, FeatureVector], stream: TextIO) -> None:
    """Header ``domain,<feature names>``; undefined path length is an empty cell."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["domain", *FEATURE_NAMES])
    for dom in sorted(vectors):
        writer.writerow([dom, *("" if v is None else repr(v) for v in vectors[dom].as_tuple())])
