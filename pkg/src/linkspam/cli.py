"""Command-line entry point: ``linkspam <subcommand> ...``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .classifier import (
    DEFAULT_COST_RATIOS,
    METRIC_NAMES,
    cost_sweep,
    evaluate,
    metrics,
    write_sweep_csv,
)
from .detector import SPAM, DetectorConfig, read_verdicts_json, write_verdicts_json, write_verdicts_tsv
from .errors import InvalidInputError, LinkSpamError
from .fcmclust import FcmConfig, write_memberships_csv
from .features import degree_distribution, write_features_csv
from .linkrank import RankConfig, write_scores
from .pipeline import analyze, detect
from .synthcorpus import CorpusSpec, generate, parse_farm, read_labels, spec_to_dict, write_labels
from .webgraph import build_domain_clustering, read_edge_file, save_edge_list, to_dot

log = logging.getLogger("linkspam")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # one line, machine-parseable
        sys.stderr.write(f"linkspam: error: usage: {message}\n")
        sys.exit(2)


def _ratios(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad cost ratio list {text!r}") from None


def _load(args):
    graph = read_edge_file(args.edges)
    return graph, build_domain_clustering(graph)


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_manifest(out: Path, args, **extra) -> None:
    config = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    doc = {"tool": "linkspam", "version": __version__, "command": args.command, "config": config, **extra}
    with open(out / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


def _rank_config(args) -> RankConfig:
    return RankConfig(args.alpha, args.epsilon, args.max_iter)


def cmd_ingest(args) -> int:
    graph, clustering = _load(args)
    print(f"nodes\t{len(graph)}")
    print(f"edges\t{len(graph.edges)}")
    print(f"domains\t{len(clustering.members)}")
    print(f"domain_edges\t{len(clustering.domain_graph.edges)}")
    return 0


def cmd_detect(args) -> int:
    graph, clustering = _load(args)
    out = _out_dir(args)
    result = detect(
        graph,
        clustering,
        DetectorConfig(args.tra_lvl, args.tv),
        group=args.group,
        rank_config=_rank_config(args),
        fcm_config=FcmConfig(args.clusters, args.fuzzifier, args.fcm_epsilon, args.fcm_max_iter, args.seed),
        depth=args.depth,
        tau_hi=args.tau_hi,
        tau_lo=args.tau_lo,
    )
    pages = {d: len(p) for d, p in clustering.members.items()}
    with open(out / "verdicts.json", "w", encoding="utf-8") as fh:
        write_verdicts_json(result.verdicts, fh, result.grouped, pages)
    with open(out / "verdicts.tsv", "w", encoding="utf-8") as fh:
        write_verdicts_tsv(result.verdicts, fh)
    if result.grouped is not None:
        with open(out / "grouped.tsv", "w", encoding="utf-8") as fh:
            write_verdicts_tsv(result.grouped, fh)
        an = result.analysis
        with open(out / "features.csv", "w", encoding="utf-8") as fh:
            write_features_csv(an.features, fh)
        with open(out / "memberships.csv", "w", encoding="utf-8") as fh:
            write_memberships_csv(an.domains, result.fcm.memberships, fh)
        with open(out / "pagerank.tsv", "w", encoding="utf-8") as fh:
            write_scores(an.ranks.scores, fh)
        with open(out / "authority.tsv", "w", encoding="utf-8") as fh:
            write_scores(an.hits.authority, fh)
        with open(out / "hub.tsv", "w", encoding="utf-8") as fh:
            write_scores(an.hits.hub, fh)

    if not args.no_figures and result.verdicts:
        from . import report

        report.plot_intersections(result.verdicts, args.tv, out / "intersections.png")
        groups = {}
        for name, want in (("flagged spam", True), ("not flagged", False)):
            scope = [p for d, v in result.verdicts.items() if v.is_spam == want for p in clustering.members[d]]
            if scope:
                groups[name] = degree_distribution(graph, scope, "total")
        report.plot_degree_distributions(groups, out / "degree_distribution.png")

    n_spam = sum(v.is_spam for v in result.verdicts.values())
    _write_manifest(out, args, domains=len(result.verdicts), flagged=n_spam)
    print(f"domains\t{len(result.verdicts)}")
    print(f"spam\t{n_spam}")
    if result.grouped is not None:
        print(f"spam_grouped\t{sum(lab == SPAM for lab in result.grouped.values())}")
    return 0


def _fmt(v) -> str:
    return "" if v is None else f"{v:.6f}"


def cmd_evaluate(args) -> int:
    with open(args.verdicts, encoding="utf-8") as fh:
        rows = read_verdicts_json(fh)
    with open(args.labels, encoding="utf-8") as fh:
        truth = read_labels(fh)
    known = [r for r in rows if r["domain"] in truth]
    skipped = len(rows) - len(known)
    if skipped:
        log.warning("skipped %d domain(s) without a label", skipped)
    has_group = any("grouped_label" in r for r in known)

    def confusion(key, weighted):
        preds, gold = [], []
        for r in known:
            n = int(r.get("pages", 1)) if weighted else 1
            preds += [r[key]] * n
            gold += [truth[r["domain"]]] * n
        return metrics(evaluate(preds, gold))

    table = {}
    for grouping, weighted in (("without", True), ("with", False)):
        table[grouping] = {
            "base": confusion("label", weighted),
            "cluster": confusion("grouped_label", weighted) if has_group else None,
        }
    out = _out_dir(args)
    with open(out / "metrics.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["grouping", "metric", "base", "cluster"])
        for grouping, cols in table.items():
            for name in METRIC_NAMES:
                base = getattr(cols["base"], name)
                cluster = getattr(cols["cluster"], name) if cols["cluster"] else None
                writer.writerow([grouping, name, _fmt(base), _fmt(cluster)])
    _write_manifest(out, args, evaluated=len(known), skipped=skipped)
    with open(out / "metrics.csv", encoding="utf-8") as fh:
        sys.stdout.write(fh.read())
    return 0


def cmd_sweep(args) -> int:
    graph, clustering = _load(args)
    with open(args.labels, encoding="utf-8") as fh:
        truth = read_labels(fh)
    an = analyze(graph, clustering, _rank_config(args), args.depth)
    keep = [i for i, d in enumerate(an.domains) if d in truth]
    if not keep:
        raise InvalidInputError("no labelled domains in the graph")
    X = an.matrix[keep]
    y = [truth[an.domains[i]] for i in keep]
    rows = cost_sweep(X, y, args.cost_ratios, args.folds, args.seed, args.max_depth, args.min_leaf)
    out = _out_dir(args)
    with open(out / "sweep.csv", "w", encoding="utf-8", newline="") as fh:
        write_sweep_csv(rows, fh)
    if not args.no_figures:
        from . import report

        report.plot_sweep(rows, out / "sweep.png")
    _write_manifest(out, args, instances=len(y))
    with open(out / "sweep.csv", encoding="utf-8") as fh:
        sys.stdout.write(fh.read())
    return 0


def cmd_export_dot(args) -> int:
    graph, clustering = _load(args)
    spam = set()
    if args.verdicts:
        with open(args.verdicts, encoding="utf-8") as fh:
            spam = {r["domain"] for r in read_verdicts_json(fh)
                    if r.get("grouped_label" if args.grouped else "label") == SPAM}
    elif args.labels:
        with open(args.labels, encoding="utf-8") as fh:
            spam = {d for d, lab in read_labels(fh).items() if lab == SPAM}
    if args.scope == "all":
        scope = None
    elif args.scope == "spam":
        scope = spam
    else:
        scope = [d.strip() for d in args.scope.split(",") if d.strip()]
    text = to_dot(clustering, spam, scope)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_synth(args) -> int:
    spec = CorpusSpec(
        honest_domains=args.honest,
        pages_per_domain=(args.pages_min, args.pages_max),
        attachment=args.attach,
        farms=tuple(parse_farm(f) for f in args.farm),
        boost_edges=args.boost,
        seed=args.seed,
    )
    corpus = generate(spec)
    out = _out_dir(args)
    with open(out / "edges.tsv", "w", encoding="utf-8", newline="\n") as fh:
        save_edge_list(corpus.graph, fh)
    with open(out / "labels.tsv", "w", encoding="utf-8", newline="\n") as fh:
        write_labels(corpus.truth, fh)
    _write_manifest(out, args, spec=spec_to_dict(spec))
    print(f"pages\t{len(corpus.graph)}")
    print(f"edges\t{len(corpus.graph.edges)}")
    print(f"domains\t{len(corpus.truth)}")
    print(f"spam_domains\t{len(corpus.spam_domains)}")
    return 0


def _rank_flags(p):
    p.add_argument("--alpha", type=float, default=0.15, help="random-jump probability")
    p.add_argument("--epsilon", type=float, default=1e-8, help="L1 stopping tolerance for PageRank/HITS")
    p.add_argument("--max-iter", type=int, default=100)
    p.add_argument("--depth", type=int, default=3, help="supporter search depth")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="linkspam", description="Link-farm detection on web link graphs.")
    parser.add_argument("--version", action="version", version=f"linkspam {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ingest", help="load an edge list and print counts")
    p.add_argument("--edges", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("detect", help="run DBSpamClust over every domain")
    p.add_argument("--edges", required=True)
    p.add_argument("--tra-lvl", type=int, default=2, help="outgoing traversal depth limit")
    p.add_argument("--tv", type=int, default=3, help="intersection threshold")
    p.add_argument("--group", action="store_true", help="smooth verdicts by fuzzy cluster")
    p.add_argument("--clusters", type=int, default=2)
    p.add_argument("--fuzzifier", type=float, default=2.0)
    p.add_argument("--fcm-epsilon", type=float, default=1e-6)
    p.add_argument("--fcm-max-iter", type=int, default=300)
    p.add_argument("--tau-hi", type=float, default=0.5)
    p.add_argument("--tau-lo", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-figures", action="store_true")
    p.add_argument("--out", required=True)
    _rank_flags(p)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("evaluate", help="score verdicts against labels")
    p.add_argument("--verdicts", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="cross-validated cost-sensitive tree per cost ratio")
    p.add_argument("--edges", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--cost-ratios", type=_ratios, default=list(DEFAULT_COST_RATIOS))
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--max-depth", type=int, default=8)
    p.add_argument("--min-leaf", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-figures", action="store_true")
    p.add_argument("--out", required=True)
    _rank_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("export-dot", help="domain graph as Graphviz DOT")
    p.add_argument("--edges", required=True)
    p.add_argument("--verdicts", help="verdicts.json from detect; spam domains are highlighted")
    p.add_argument("--grouped", action="store_true", help="use grouped_label from --verdicts")
    p.add_argument("--labels", help="labels TSV, used when --verdicts is absent")
    p.add_argument("--scope", default="all", help="all | spam | comma-separated domains")
    p.add_argument("--out", help="write here instead of stdout")
    p.set_defaults(func=cmd_export_dot)

    p = sub.add_parser("synth", help="generate a labelled corpus with planted farms")
    p.add_argument("--honest", type=int, default=500)
    p.add_argument("--pages-min", type=int, default=1)
    p.add_argument("--pages-max", type=int, default=5)
    p.add_argument("--attach", type=int, default=2)
    p.add_argument("--farm", action="append", default=[],
                   help="kind:domains[:pages[:hubs]], e.g. clique:10 or bipartite:20:1:10")
    p.add_argument("--boost", type=int, default=0, help="boost edges from each farm into honest pages")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="linkspam: %(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (LinkSpamError, OSError) as exc:
        sys.stderr.write(f"linkspam: error: {type(exc).__name__}: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
