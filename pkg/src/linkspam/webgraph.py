"""Directed page-level web graph, edge-list I/O and domain collapse."""

from __future__ import annotations

import ipaddress
from collections.abc import Iterable
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, TextIO
from urllib.parse import urlsplit

from .errors import NotFoundError, ParseError


class WebGraph:
    """Immutable directed graph with forward and reverse adjacency.

    Nodes keep the order in which they were first seen, which makes every
    derived array (ranks, degrees) reproducible for a given input.
    """

    __slots__ = ("_nodes", "_index", "_forward", "_reverse", "_edges")

    def __init__(self, edges: Iterable[tuple[str, str]] = (), nodes: Iterable[str] = ()):
        order: dict[str, None] = {}
        for v in nodes:
            order.setdefault(v, None)
        edge_set: dict[tuple[str, str], None] = {}
        for u, v in edges:
            order.setdefault(u, None)
            order.setdefault(v, None)
            edge_set.setdefault((u, v), None)

        self._nodes = tuple(order)
        self._index = MappingProxyType({v: i for i, v in enumerate(self._nodes)})
        forward: dict[str, set[str]] = {v: set() for v in self._nodes}
        reverse: dict[str, set[str]] = {v: set() for v in self._nodes}
        for u, v in edge_set:
            forward[u].add(v)
            reverse[v].add(u)
        self._forward = MappingProxyType({v: frozenset(s) for v, s in forward.items()})
        self._reverse = MappingProxyType({v: frozenset(s) for v, s in reverse.items()})
        self._edges = frozenset(edge_set)

    @property
    def nodes(self) -> tuple[str, ...]:
        return self._nodes

    @property
    def edges(self) -> frozenset[tuple[str, str]]:
        return self._edges

    @property
    def forward(self) -> Mapping[str, frozenset[str]]:
        return self._forward

    @property
    def reverse(self) -> Mapping[str, frozenset[str]]:
        return self._reverse

    @property
    def index(self) -> Mapping[str, int]:
        return self._index

    def __len__(self) -> int:
        return len(self._nodes)

    def __contains__(self, page) -> bool:
        return page in self._index

    def __repr__(self) -> str:
        return f"WebGraph(nodes={len(self._nodes)}, edges={len(self._edges)})"

    def successors(self, page: str) -> frozenset[str]:
        try:
            return self._forward[page]
        except KeyError:
            raise NotFoundError(f"unknown page {page!r}") from None

    def predecessors(self, page: str) -> frozenset[str]:
        try:
            return self._reverse[page]
        except KeyError:
            raise NotFoundError(f"unknown page {page!r}") from None

    def out_degree(self, page: str) -> int:
        """O(v)."""
        return len(self.successors(page))

    def in_degree(self, page: str) -> int:
        """I(v)."""
        return len(self.predecessors(page))

    def sorted_edges(self) -> list[tuple[str, str]]:
        return sorted(self._edges)


def load_edge_list(stream: TextIO | Iterable[str]) -> WebGraph:
    """Parse ``source<TAB>target`` lines into a :class:`WebGraph`.

    Lines beginning with ``#`` and blank lines are skipped. Duplicate edges
    collapse to one. Raises :class:`ParseError` naming the offending line.
    """
    edges = []
    for lineno, raw in enumerate(stream, 1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 2 or not fields[0] or not fields[1]:
            raise ParseError(
                f"expected 'source<TAB>target', got {len(fields)} field(s): {line!r}",
                lineno=lineno,
            )
        edges.append((fields[0], fields[1]))
    return WebGraph(edges)


def save_edge_list(graph: WebGraph, stream: TextIO) -> None:
    """Write edges sorted lexicographically, one ``source<TAB>target`` per line."""
    for u, v in graph.sorted_edges():
        stream.write(f"{u}\t{v}\n")


def read_edge_file(path) -> WebGraph:
    with open(path, encoding="utf-8", newline="") as fh:
        return load_edge_list(fh)


def write_edge_file(graph: WebGraph, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        save_edge_list(graph, fh)


def _hostname(identifier: str) -> str | None:
    text = identifier.strip()
    if "://" not in text:
        text = "//" + text
    try:
        host = urlsplit(text).hostname
    except ValueError:
        return None
    return host.rstrip(".") if host else None


def domain_of(page: str) -> str:
    """Map a page identifier to its domain cluster.

    The rule: lowercase host, drop a leading ``www.``, keep the last two
    labels. Single-label hosts and IP literals stay whole; anything without
    a parseable host falls back to the lowercased identifier.

    >>> domain_of("http://www.fosteronlinemoney.com/x")
    'fosteronlinemoney.com'
    >>> domain_of("HTTP://A.B.EXAMPLE.ORG")
    'example.org'
    """
    host = _hostname(page)
    if not host:
        return page.strip().lower()
    try:
        ipaddress.ip_address(host)
        return host
    except ValueError:
        pass
    if host.startswith("www."):
        host = host[4:]
    labels = [p for p in host.split(".") if p]
    if not labels:
        return page.strip().lower()
    return ".".join(labels[-2:])


@dataclass(frozen=True)
class DomainClustering:
    """CLUS(.) for every page plus the collapsed domain-level graph."""

    cluster_of: Mapping[str, str]
    members: Mapping[str, frozenset[str]]
    domain_graph: WebGraph = field(repr=False)

    @property
    def domains(self) -> list[str]:
        return sorted(self.members)

    def __contains__(self, domain) -> bool:
        return domain in self.members

    def require(self, domain: str) -> None:
        if domain not in self.members:
            raise NotFoundError(f"unknown domain {domain!r}")


def build_domain_clustering(graph: WebGraph, domain_fn=domain_of) -> DomainClustering:
    """Group pages by ``domain_fn`` and collapse cross-domain links."""
    cluster_of = {page: domain_fn(page) for page in graph.nodes}
    members: dict[str, set[str]] = {}
    for page, dom in cluster_of.items():
        members.setdefault(dom, set()).add(page)
    domain_edges = {
        (cluster_of[u], cluster_of[v])
        for u, v in graph.edges
        if cluster_of[u] != cluster_of[v]
    }
    domain_graph = WebGraph(sorted(domain_edges), nodes=sorted(members))
    return DomainClustering(
        cluster_of=MappingProxyType(cluster_of),
        members=MappingProxyType({d: frozenset(p) for d, p in members.items()}),
        domain_graph=domain_graph,
    )


def in_domains(clustering: DomainClustering, domain: str) -> frozenset[str]:
    """External domains with at least one link into ``domain``."""
    clustering.require(domain)
    return clustering.domain_graph.predecessors(domain)


def out_domains(clustering: DomainClustering, domain: str) -> frozenset[str]:
    """External domains that ``domain`` links to."""
    clustering.require(domain)
    return clustering.domain_graph.successors(domain)


def _dot_id(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(clustering: DomainClustering, spam: Iterable[str] = (), domains: Iterable[str] | None = None) -> str:
    """Domain graph as Graphviz DOT; ``spam`` domains are filled red.

    ``domains`` restricts output to that subset and the edges among it.
    Nodes and edges are sorted so the text is stable across runs.
    """
    spam = set(spam)
    keep = set(clustering.members) if domains is None else set(domains) & set(clustering.members)
    lines = ["digraph domains {", "  node [shape=ellipse];"]
    for d in sorted(keep):
        if d in spam:
            lines.append(f'  {_dot_id(d)} [style=filled, fillcolor="#d62728", fontcolor="white"];')
        else:
            lines.append(f"  {_dot_id(d)};")
    for u, v in clustering.domain_graph.sorted_edges():
        if u in keep and v in keep:
            lines.append(f"  {_dot_id(u)} -> {_dot_id(v)};")
    lines.append("}")
    return "\n".join(lines) + "\n"
