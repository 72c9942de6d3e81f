"""Seeded corpora: a preferential-attachment honest web with planted link farms."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, TextIO

import numpy as np

from .detector import NONSPAM, SPAM
from .errors import InvalidInputError, ParseError
from .webgraph import DomainClustering, WebGraph, build_domain_clustering


@dataclass(frozen=True)
class FarmSpec:
    """A planted farm.

    ``kind`` is ``"clique"`` (every ordered domain pair linked, both ways)
    or ``"bipartite"`` (``hubs`` domains each link to every remaining
    domain). ``hubs`` defaults to half the domains.
    """

    kind: str
    domains: int
    pages_per_domain: int = 1
    hubs: int | None = None

    def __post_init__(self):
        if self.kind not in ("clique", "bipartite"):
            raise InvalidInputError(f"farm kind must be clique|bipartite, got {self.kind!r}")
        if self.domains < 2 or self.pages_per_domain < 1:
            raise InvalidInputError("a farm needs >= 2 domains and >= 1 page per domain")

    def split(self) -> tuple[int, int]:
        hubs = self.hubs if self.hubs is not None else max(1, self.domains // 2)
        if not 1 <= hubs < self.domains:
            raise InvalidInputError(f"hub count {hubs} leaves no authorities")
        return hubs, self.domains - hubs


@dataclass(frozen=True)
class CorpusSpec:
    honest_domains: int = 500
    pages_per_domain: tuple[int, int] = (1, 5)
    attachment: int = 2
    farms: tuple[FarmSpec, ...] = ()
    boost_edges: int = 0
    seed: int = 0

    def __post_init__(self):
        lo, hi = self.pages_per_domain
        if self.honest_domains < 1 or lo < 1 or hi < lo or self.attachment < 1:
            raise InvalidInputError("corpus counts must be >= 1 and page range ordered")
        if self.boost_edges < 0:
            raise InvalidInputError("boost_edges must be >= 0")


@dataclass(frozen=True)
class LabeledCorpus:
    graph: WebGraph
    clustering: DomainClustering
    truth: Mapping[str, str]
    farms: tuple[tuple[str, ...], ...] = field(default=())

    @property
    def spam_domains(self) -> list[str]:
        return sorted(d for d, lab in self.truth.items() if lab == SPAM)

    def farm_pages(self, index: int) -> list[str]:
        return sorted(p for d in self.farms[index] for p in self.clustering.members[d])


def _page(domain: str, i: int) -> str:
    return f"http://{domain}/p{i}"


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _assemble(edges, nodes, truth, farms) -> LabeledCorpus:
    graph = WebGraph(edges, nodes=nodes)
    clustering = build_domain_clustering(graph)
    return LabeledCorpus(graph, clustering, dict(truth), tuple(farms))


def gen_honest(spec: CorpusSpec, seed=None) -> LabeledCorpus:
    """Grow the honest background by domain-level preferential attachment.

    Each new domain links to ``spec.attachment`` distinct earlier domains
    picked with probability proportional to in-degree + 1, so every honest
    domain link points from a newer domain to an older one. Pages inside a
    domain are chained p0 -> p1 -> ...; each cross-domain link runs between
    random member pages.
    """
    rng = _rng(spec.seed if seed is None else seed)
    n = spec.honest_domains
    lo, hi = spec.pages_per_domain
    names = [f"h{i:05d}.com" for i in range(n)]
    in_deg = np.zeros(n)
    domain_edges = []
    for i in range(1, n):
        k = min(spec.attachment, i)
        p = in_deg[:i] + 1.0
        targets = rng.choice(i, size=k, replace=False, p=p / p.sum())
        for t in sorted(int(t) for t in targets):
            domain_edges.append((i, t))
            in_deg[t] += 1

    sizes = rng.integers(lo, hi + 1, size=n)
    nodes = []
    edges = []
    for i, name in enumerate(names):
        pages = [_page(name, j) for j in range(sizes[i])]
        nodes.extend(pages)
        edges.extend(zip(pages, pages[1:]))
    for s, t in domain_edges:
        edges.append((_page(names[s], int(rng.integers(sizes[s]))),
                      _page(names[t], int(rng.integers(sizes[t])))))
    return _assemble(edges, nodes, dict.fromkeys(names, NONSPAM), ())


def _farm_names(corpus: LabeledCorpus, count: int) -> list[str]:
    start = sum(1 for lab in corpus.truth.values() if lab == SPAM)
    return [f"s{start + i:05d}.net" for i in range(count)]


def _boost(corpus, farm_pages, boost_edges, rng):
    honest = sorted(d for d, lab in corpus.truth.items() if lab == NONSPAM)
    edges = []
    if not honest:
        return edges
    for _ in range(boost_edges):
        src = farm_pages[int(rng.integers(len(farm_pages)))]
        dom = honest[int(rng.integers(len(honest)))]
        members = sorted(corpus.clustering.members[dom])
        edges.append((src, members[int(rng.integers(len(members)))]))
    return edges


def plant_clique_farm(
    corpus: LabeledCorpus,
    domains: int,
    pages_per_domain: int = 1,
    boost_edges: int = 0,
    seed=0,
) -> LabeledCorpus:
    """Add a fully connected farm of ``domains`` new spam domains.

    Each unordered domain pair is joined by one page pair linked in both
    directions; pages inside a farm domain are also linked both ways, so
    every edge inside the farm is reciprocated.
    """
    if domains < 2:
        raise InvalidInputError("a clique farm needs at least 2 domains")
    rng = _rng(seed)
    names = _farm_names(corpus, domains)
    pages = {d: [_page(d, j) for j in range(pages_per_domain)] for d in names}
    edges = []
    for d in names:
        for a, b in zip(pages[d], pages[d][1:]):
            edges += [(a, b), (b, a)]
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            pa = pages[a][int(rng.integers(pages_per_domain))]
            pb = pages[b][int(rng.integers(pages_per_domain))]
            edges += [(pa, pb), (pb, pa)]
    flat = [p for d in names for p in pages[d]]
    edges += _boost(corpus, flat, boost_edges, rng)
    truth = {**corpus.truth, **dict.fromkeys(names, SPAM)}
    return _assemble(
        [*corpus.graph.sorted_edges(), *edges],
        [*corpus.graph.nodes, *flat],
        truth,
        (*corpus.farms, tuple(names)),
    )


def plant_bipartite_farm(
    corpus: LabeledCorpus,
    hubs: int,
    authorities: int,
    pages_per_domain: int = 1,
    boost_edges: int = 0,
    seed=0,
) -> LabeledCorpus:
    """Add ``hubs`` spam domains that each link to all ``authorities`` spam domains.

    No edge inside the farm is reciprocated: cross-domain links are one-way
    and member pages are chained in one direction only.
    """
    if hubs < 1 or authorities < 1:
        raise InvalidInputError("a bipartite farm needs >= 1 hub and >= 1 authority")
    rng = _rng(seed)
    names = _farm_names(corpus, hubs + authorities)
    hub_names, auth_names = names[:hubs], names[hubs:]
    pages = {d: [_page(d, j) for j in range(pages_per_domain)] for d in names}
    edges = []
    for d in names:
        edges.extend(zip(pages[d], pages[d][1:]))
    for h in hub_names:
        for a in auth_names:
            edges.append((pages[h][int(rng.integers(pages_per_domain))],
                          pages[a][int(rng.integers(pages_per_domain))]))
    flat = [p for d in names for p in pages[d]]
    hub_pages = [p for d in hub_names for p in pages[d]]
    edges += _boost(corpus, hub_pages, boost_edges, rng)
    truth = {**corpus.truth, **dict.fromkeys(names, SPAM)}
    return _assemble(
        [*corpus.graph.sorted_edges(), *edges],
        [*corpus.graph.nodes, *flat],
        truth,
        (*corpus.farms, tuple(names)),
    )


def generate(spec: CorpusSpec) -> LabeledCorpus:
    """Honest background plus every farm in ``spec.farms``, all from one seed."""
    rng = np.random.default_rng(spec.seed)
    corpus = gen_honest(spec, rng)
    for farm in spec.farms:
        if farm.kind == "clique":
            corpus = plant_clique_farm(corpus, farm.domains, farm.pages_per_domain,
                                       spec.boost_edges, rng)
        else:
            h, a = farm.split()
            corpus = plant_bipartite_farm(corpus, h, a, farm.pages_per_domain,
                                          spec.boost_edges, rng)
    return corpus


def write_labels(truth: Mapping[str, str], stream: TextIO) -> None:
    for dom in sorted(truth):
        stream.write(f"{dom}\t{truth[dom]}\n")


def read_labels(stream) -> dict[str, str]:
    """Parse ``domain<TAB>spam|nonspam`` lines (``#`` comments allowed)."""
    out = {}
    for lineno, raw in enumerate(stream, 1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2 or parts[1] not in (SPAM, NONSPAM):
            raise ParseError(f"expected 'domain<TAB>spam|nonspam': {line!r}", lineno=lineno)
        out[parts[0]] = parts[1]
    return out


def parse_farm(text: str) -> FarmSpec:
    """``kind:domains[:pages[:hubs]]`` as used on the command line."""
    parts = text.split(":")
    if len(parts) < 2 or len(parts) > 4:
        raise InvalidInputError(f"farm spec must be kind:domains[:pages[:hubs]], got {text!r}")
    try:
        nums = [int(p) for p in parts[1:]]
    except ValueError:
        raise InvalidInputError(f"non-integer count in farm spec {text!r}") from None
    return FarmSpec(parts[0], *nums)


def spec_to_dict(spec: CorpusSpec) -> dict:
    return {
        "honest_domains": spec.honest_domains,
        "pages_per_domain": list(spec.pages_per_domain),
        "attachment": spec.attachment,
        "farms": [
            {"kind": f.kind, "domains": f.domains, "pages_per_domain": f.pages_per_domain, "hubs": f.hubs}
            for f in spec.farms
        ],
        "boost_edges": spec.boost_edges,
        "seed": spec.seed,
    }

