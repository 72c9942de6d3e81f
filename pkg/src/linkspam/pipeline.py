"""Glue that chains ranking, features, clustering and detection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .detector import DetectorConfig, SpamVerdict, group_smooth, run_all
from .fcmclust import FcmConfig, FcmResult, fcm_fit, standardize
from .features import DEFAULT_DEPTH, FeatureVector, extract_features, feature_matrix
from .linkrank import HitsScores, PageRankScores, RankConfig, hits, pagerank
from .webgraph import DomainClustering, WebGraph


@dataclass(frozen=True)
class Analysis:
    ranks: PageRankScores
    hits: HitsScores
    features: dict[str, FeatureVector]
    domains: list[str]
    matrix: np.ndarray


def analyze(
    graph: WebGraph,
    clustering: DomainClustering,
    rank_config: RankConfig = RankConfig(),
    depth: int = DEFAULT_DEPTH,
) -> Analysis:
    ranks = pagerank(graph, rank_config)
    hubs = hits(graph, rank_config)
    vectors = extract_features(graph, clustering, ranks, hubs, depth)
    domains, X = feature_matrix(vectors)
    return Analysis(ranks, hubs, vectors, domains, X)


def cluster_domains(analysis: Analysis, config: FcmConfig = FcmConfig()) -> FcmResult:
    """FCM on z-scored feature columns; rows follow ``analysis.domains``."""
    return fcm_fit(standardize(analysis.matrix), config)


@dataclass(frozen=True)
class Detection:
    verdicts: dict[str, SpamVerdict]
    grouped: dict[str, str] | None = None
    analysis: Analysis | None = None
    fcm: FcmResult | None = None


def detect(
    graph: WebGraph,
    clustering: DomainClustering,
    config: DetectorConfig = DetectorConfig(),
    group: bool = False,
    rank_config: RankConfig = RankConfig(),
    fcm_config: FcmConfig = FcmConfig(),
    depth: int = DEFAULT_DEPTH,
    tau_hi: float = 0.5,
    tau_lo: float = 0.05,
) -> Detection:
    verdicts = run_all(clustering, config)
    if not group or not verdicts:
        return Detection(verdicts)
    analysis = analyze(graph, clustering, rank_config, depth)
    k = min(fcm_config.n_clusters, len(analysis.domains))
    if k != fcm_config.n_clusters:
        fcm_config = FcmConfig(k, fcm_config.m, fcm_config.epsilon, fcm_config.max_iterations, fcm_config.seed)
    fcm = cluster_domains(analysis, fcm_config)
    grouped = group_smooth(verdicts, fcm.memberships, tau_hi, tau_lo, domains=analysis.domains)
    return Detection(verdicts, grouped, analysis, fcm)
