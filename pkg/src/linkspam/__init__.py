"""Link-farm detection on web link graphs.

Ranking (PageRank, HITS), link features, fuzzy c-means, the DBSpamClust
domain traversal and a cost-sensitive decision tree.
"""

__version__ = "0.1.0"

from .errors import InvalidInputError, LinkSpamError, NotFoundError, ParseError
from .webgraph import (
    DomainClustering,
    WebGraph,
    build_domain_clustering,
    domain_of,
    in_domains,
    load_edge_list,
    out_domains,
    read_edge_file,
    save_edge_list,
    write_edge_file,
)
from .linkrank import RankConfig, hits, pagerank
from .detector import DetectorConfig, SpamVerdict, group_smooth, mark, run_all

__all__ = [
    "DetectorConfig",
    "DomainClustering",
    "InvalidInputError",
    "LinkSpamError",
    "NotFoundError",
    "ParseError",
    "RankConfig",
    "SpamVerdict",
    "WebGraph",
    "build_domain_clustering",
    "domain_of",
    "group_smooth",
    "hits",
    "in_domains",
    "load_edge_list",
    "mark",
    "out_domains",
    "pagerank",
    "read_edge_file",
    "run_all",
    "save_edge_list",
    "write_edge_file",
]
