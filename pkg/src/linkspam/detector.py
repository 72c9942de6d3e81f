"""DBSpamClust: flag domains whose in-linking domains are also reachable
through their out-links, plus optional fuzzy-cluster label smoothing."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence, TextIO

import numpy as np

from .errors import InvalidInputError
from .webgraph import DomainClustering, in_domains, out_domains

SPAM = "spam"
NONSPAM = "nonspam"


@dataclass(frozen=True)
class DetectorConfig:
    traversal_limit: int = 2
    threshold: int = 3

    def __post_init__(self):
        if self.traversal_limit < 0:
            raise InvalidInputError(f"traversal_limit must be >= 0, got {self.traversal_limit}")
        if self.threshold < 1:
            raise InvalidInputError(f"threshold must be >= 1, got {self.threshold}")


@dataclass
class TraversalState:
    """Cursor over the outgoing walk from one probe domain."""

    cursor: frozenset[str]
    current_level: int = 0
    visited: set[str] = field(default_factory=set)
    collected_out: set[str] = field(default_factory=set)


@dataclass(frozen=True)
class SpamVerdict:
    domain: str
    label: str
    intersection_size: int
    in_set: frozenset[str]
    out_set: frozenset[str]

    @property
    def is_spam(self) -> bool:
        return self.label == SPAM

    def to_json(self) -> dict:
        return {
            "domain": self.domain,
            "label": self.label,
            "intersection_size": self.intersection_size,
            "in_set": sorted(self.in_set),
            "out_set": sorted(self.out_set),
        }


def collect_in(clustering: DomainClustering, domain: str) -> frozenset[str]:
    return in_domains(clustering, domain)


def collect_out(clustering: DomainClustering, domain: str, traversal_limit: int) -> frozenset[str]:
    """Breadth-first walk over outgoing domain links from ``domain``.

    Level 0 collects direct successors; each further level, up to and
    including ``traversal_limit``, expands from the domains reached on the
    previous one. Every domain is visited at most once and the probe itself
    is never collected.
    """
    if traversal_limit < 0:
        raise InvalidInputError(f"traversal_limit must be >= 0, got {traversal_limit}")
    first = out_domains(clustering, domain)
    state = TraversalState(cursor=first, visited={domain, *first}, collected_out=set(first))
    succ = clustering.domain_graph.forward
    while state.current_level < traversal_limit and state.cursor:
        reached = {y for x in state.cursor for y in succ[x]} - state.visited
        state.visited |= reached
        state.collected_out |= reached
        state.cursor = frozenset(reached)
        state.current_level += 1
    return frozenset(state.collected_out)


def mark(clustering: DomainClustering, domain: str, config: DetectorConfig = DetectorConfig()) -> SpamVerdict:
    in_set = collect_in(clustering, domain)
    out_set = collect_out(clustering, domain, config.traversal_limit)
    size = len(in_set & out_set)
    return SpamVerdict(
        domain=domain,
        label=SPAM if size >= config.threshold else NONSPAM,
        intersection_size=size,
        in_set=in_set,
        out_set=out_set,
    )


def run_all(clustering: DomainClustering, config: DetectorConfig = DetectorConfig()) -> dict[str, SpamVerdict]:
    return {d: mark(clustering, d, config) for d in clustering.domains}


def cluster_spam_share(labels: Sequence[str], memberships) -> np.ndarray:
    """Membership-weighted spam fraction s_k of each fuzzy cluster."""
    U = np.asarray(memberships, dtype=float)
    spam = np.array([lab == SPAM for lab in labels], dtype=float)
    weight = U.sum(axis=0)
    share = np.zeros(U.shape[1])
    np.divide(spam @ U, weight, out=share, where=weight > 0)
    return share


def group_smooth(
    verdicts: Mapping[str, SpamVerdict | str],
    memberships,
    tau_hi: float = 0.5,
    tau_lo: float = 0.05,
    domains: Sequence[str] | None = None,
) -> dict[str, str]:
    """Relabel domains by the spam share of their dominant fuzzy cluster.

    Row i of ``memberships`` belongs to ``domains[i]`` (default: the
    verdicts' own order). A domain whose argmax cluster has share >= tau_hi
    becomes spam, <= tau_lo becomes non-spam, and keeps its verdict
    otherwise.
    """
    if not 0.0 <= tau_lo <= tau_hi <= 1.0:
        raise InvalidInputError(f"need 0 <= tau_lo <= tau_hi <= 1, got {tau_lo}, {tau_hi}")
    order = list(verdicts) if domains is None else list(domains)
    U = np.asarray(memberships, dtype=float)
    if U.ndim != 2 or U.shape[0] != len(order):
        raise InvalidInputError(f"membership shape {U.shape} does not match {len(order)} domains")
    missing = [d for d in order if d not in verdicts]
    if missing or len(order) != len(verdicts):
        raise InvalidInputError("membership rows do not correspond to the verdict domains")

    labels = [v.label if isinstance(v, SpamVerdict) else v for v in (verdicts[d] for d in order)]
    share = cluster_spam_share(labels, U)
    out = {}
    for dom, own, row in zip(order, labels, U):
        s = share[int(np.argmax(row))]
        if s >= tau_hi:
            out[dom] = SPAM
        elif s <= tau_lo:
            out[dom] = NONSPAM
        else:
            out[dom] = own
    return out


def write_verdicts_json(
    verdicts: Mapping[str, SpamVerdict],
    stream: TextIO,
    grouped: Mapping[str, str] | None = None,
    page_counts: Mapping[str, int] | None = None,
) -> None:
    rows = []
    for dom in sorted(verdicts):
        row = verdicts[dom].to_json()
        if grouped is not None:
            row["grouped_label"] = grouped[dom]
        if page_counts is not None:
            row["pages"] = page_counts[dom]
        rows.append(row)
    json.dump(rows, stream, indent=2)
    stream.write("\n")


def write_verdicts_tsv(labels: Mapping[str, SpamVerdict | str], stream: TextIO) -> None:
    for dom in sorted(labels):
        v = labels[dom]
        stream.write(f"{dom}\t{v.label if isinstance(v, SpamVerdict) else v}\n")


def read_verdicts_json(stream: TextIO) -> list[dict]:
    try:
        rows = json.load(stream)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"verdicts JSON is malformed: {exc}") from None
    if not isinstance(rows, list):
        raise InvalidInputError("verdicts JSON must be an array")
    for i, row in enumerate(rows):
        if not isinstance(row, dict) or not isinstance(row.get("domain"), str) \
                or row.get("label") not in (SPAM, NONSPAM):
            raise InvalidInputError(f"verdict row {i} needs a domain and a spam|nonspam label")
    return rows
