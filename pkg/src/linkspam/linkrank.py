"""PageRank and HITS by fixed-point iteration over a :class:`WebGraph`."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Mapping, TextIO

import numpy as np

from .errors import InvalidInputError
from .webgraph import WebGraph

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RankConfig:
    """Iteration settings shared by PageRank and HITS.

    ``alpha`` is the random-jump probability, ``epsilon`` the L1 change at
    which iteration stops.
    """

    alpha: float = 0.15
    epsilon: float = 1e-8
    max_iterations: int = 100

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise InvalidInputError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.epsilon < 0:
            raise InvalidInputError(f"epsilon must be >= 0, got {self.epsilon}")
        if self.max_iterations < 1:
            raise InvalidInputError(f"max_iterations must be >= 1, got {self.max_iterations}")


@dataclass(frozen=True)
class PageRankScores:
    scores: Mapping[str, float]
    iterations: int
    converged: bool

    def __getitem__(self, page):
        return self.scores[page]


@dataclass(frozen=True)
class HitsScores:
    hub: Mapping[str, float]
    authority: Mapping[str, float]
    iterations: int
    converged: bool
    # set when the graph has no edges and every score is zero
    degenerate: bool = False


def _edge_arrays(graph: WebGraph) -> tuple[np.ndarray, np.ndarray]:
    idx = graph.index
    pairs = graph.sorted_edges()
    src = np.fromiter((idx[u] for u, _ in pairs), dtype=np.intp, count=len(pairs))
    dst = np.fromiter((idx[v] for _, v in pairs), dtype=np.intp, count=len(pairs))
    return src, dst


def pagerank(graph: WebGraph, config: RankConfig = RankConfig()) -> PageRankScores:
    """Power iteration of PR(u) = (1-a) * sum_{v->u} PR(v)/O(v) + a/N.

    Rank held by dangling pages (O(v) = 0) is spread uniformly over all
    pages on every step, so the vector always sums to one.
    """
    n = len(graph)
    if n == 0:
        raise InvalidInputError("pagerank needs a non-empty graph")
    src, dst = _edge_arrays(graph)
    out_deg = np.bincount(src, minlength=n).astype(float)
    dangling = out_deg == 0
    share = np.zeros(n)
    np.divide(1.0, out_deg, out=share, where=~dangling)

    alpha = config.alpha
    pr = np.full(n, 1.0 / n)
    converged = False
    it = 0
    for it in range(1, config.max_iterations + 1):
        flow = np.bincount(dst, weights=pr[src] * share[src], minlength=n).astype(float)
        flow += pr[dangling].sum() / n
        new = (1.0 - alpha) * flow + alpha / n
        new /= new.sum()
        delta = np.abs(new - pr).sum()
        pr = new
        if delta <= config.epsilon:
            converged = True
            break
    if not converged:
        log.info("pagerank stopped at max_iterations=%d", config.max_iterations)
    return PageRankScores(dict(zip(graph.nodes, pr.tolist())), it, converged)


def hits(graph: WebGraph, config: RankConfig = RankConfig()) -> HitsScores:
    """Alternate authority and hub sums, normalizing both after each sweep.

    Authority of u sums the hub scores of pages linking to u; hub of v then
    sums the fresh authority scores of the pages v links to. An edgeless
    graph has no direction information, so all scores are zero and the
    result is flagged ``degenerate``.
    """
    n = len(graph)
    if n == 0:
        raise InvalidInputError("hits needs a non-empty graph")
    if not graph.edges:
        zeros = dict.fromkeys(graph.nodes, 0.0)
        log.warning("hits on an edgeless graph: all scores are zero")
        return HitsScores(zeros, dict(zeros), 0, True, degenerate=True)

    src, dst = _edge_arrays(graph)
    hub = np.ones(n)
    auth = np.ones(n)
    converged = False
    it = 0
    for it in range(1, config.max_iterations + 1):
        new_auth = np.bincount(dst, weights=hub[src], minlength=n)
        new_auth /= np.linalg.norm(new_auth)
        new_hub = np.bincount(src, weights=new_auth[dst], minlength=n)
        new_hub /= np.linalg.norm(new_hub)
        delta = np.abs(new_auth - auth).sum() + np.abs(new_hub - hub).sum()
        hub, auth = new_hub, new_auth
        if delta <= config.epsilon:
            converged = True
            break
    return HitsScores(
        hub=dict(zip(graph.nodes, hub.tolist())),
        authority=dict(zip(graph.nodes, auth.tolist())),
        iterations=it,
        converged=converged,
    )


def write_scores(scores: Mapping[str, float], stream: TextIO) -> None:
    """TSV ``page<TAB>score``, highest first, ties by page identifier."""
    for page, value in sorted(scores.items(), key=lambda kv: (-kv[1], kv[0])):
        stream.write(f"{page}\t{value!r}\n")
