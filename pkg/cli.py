#!/usr/bin/env python3
"""Command line surface: theta, decompose, verify, gen, bounds and batch.

Results are JSON on stdout (or a short text rendering with --format text);
logs go to stderr.
"""
import argparse
import asyncio
import json
import logging
import os
import random
import sys
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Tuple

import config
from core import GraphFormatError, Multigraph, ThetaKitError, named_graph, read_graph_file, write_graph
from decomposition import DecompositionPolicy, tight_cut_decomposition
from families import check_bounds, generate_family
from generators import GeneratorConfig, random_matching_covered
from matching import NotMatchingCoveredError
from monitoring import RunMetrics
from theta import FREE, DecisionContext, is_theta_free
from verifier import CertificateFormatError, verify_certificate

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT_ERROR = 2


@dataclass
class RunConfig:
    command: str
    named: Optional[str] = None
    input: Optional[str] = None
    output_format: str = config.OUTPUT_FORMAT
    search_cap: int = config.SEARCH_CAP
    seed: int = config.DEFAULT_SEED
    metrics_out: Optional[str] = None

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        return cls(
            command=args.command,
            named=getattr(args, "named", None),
            input=getattr(args, "input", None),
            output_format=args.format,
            search_cap=args.search_cap,
            seed=args.seed,
            metrics_out=args.metrics_out,
        )


def load_graph(run: RunConfig) -> Multigraph:
    if run.named and run.input:
        raise GraphFormatError("Give either --named or --input, not both")
    if run.named:
        return named_graph(run.named)
    if run.input:
        return read_graph_file(run.input)
    raise GraphFormatError("A graph is required: use --named NAME or --input PATH")


def cmd_theta(run: RunConfig, args: argparse.Namespace, metrics: RunMetrics) -> Tuple[int, Dict[str, Any]]:
    G = load_graph(run)
    certificate = is_theta_free(G, DecisionContext(search_cap=run.search_cap, metrics=metrics))
    payload = {"status": "success", "n": G.n, "m": G.m, "certificate": certificate.to_dict()}
    return (EXIT_OK if certificate.verdict == FREE else EXIT_NEGATIVE), payload


def cmd_decompose(run: RunConfig, args: argparse.Namespace, metrics: RunMetrics) -> Tuple[int, Dict[str, Any]]:
    G = load_graph(run)
    policy = DecompositionPolicy(strategy=args.policy, seed=run.seed)
    with metrics.measure_stage("decompose", {"n": G.n, "m": G.m, "policy": args.policy}):
        result = tight_cut_decomposition(G, policy)
    return EXIT_OK, {"status": "success", "n": G.n, "m": G.m, **result.to_dict()}


def _read_certificate(path: str) -> Dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise CertificateFormatError(f"Cannot read certificate {path}: {e}")
    # output of the theta command wraps the certificate
    return data.get("certificate", data) if isinstance(data, dict) else data


def cmd_verify(run: RunConfig, args: argparse.Namespace, metrics: RunMetrics) -> Tuple[int, Dict[str, Any]]:
    G = load_graph(run)
    certificate = _read_certificate(args.certificate)
    with metrics.measure_stage("verify", {"n": G.n, "m": G.m}):
        report = verify_certificate(G, certificate)
    return (EXIT_OK if report.valid else EXIT_NEGATIVE), {"status": "success", **report.to_dict()}


def _graph_entry(G: Multigraph, **extra: Any) -> Dict[str, Any]:
    return {"n": G.n, "m": G.m, "graph": write_graph(G), **extra}


def cmd_gen(run: RunConfig, args: argparse.Namespace, metrics: RunMetrics) -> Tuple[int, Dict[str, Any]]:
    entries: List[Dict[str, Any]] = []
    with metrics.measure_stage("generate"):
        if args.family:
            for G, tree in generate_family(args.family, args.max_n):
                entries.append(_graph_entry(G, tree=tree.to_dict()))
        elif args.random_mcg:
            rng = random.Random(run.seed)
            cfg = GeneratorConfig(n=args.n, extra_edges=args.extra_edges, min_degree=args.min_degree)
            for _ in range(args.count):
                entries.append(_graph_entry(random_matching_covered(cfg, rng)))
        else:
            G = load_graph(run)
            entries.append(_graph_entry(G, name=run.named))

    if args.out_dir:
        os.makedirs(args.out_dir, exist_ok=True)
        for i, entry in enumerate(entries):
            path = os.path.join(args.out_dir, f"graph_{i:04d}.txt")
            with open(path, "w", encoding="utf-8") as f:
                f.write(entry["graph"])
            entry["path"] = path
        logger.info(f"Wrote {len(entries)} graphs to {args.out_dir}")
    return EXIT_OK, {"status": "success", "count": len(entries), "graphs": entries}


def cmd_bounds(run: RunConfig, args: argparse.Namespace, metrics: RunMetrics) -> Tuple[int, Dict[str, Any]]:
    G = load_graph(run)
    report = check_bounds(G, DecisionContext(search_cap=run.search_cap, metrics=metrics))
    return EXIT_OK, {"status": "success", **report.to_dict()}


def _batch_item(path: str, command: str, search_cap: int) -> Dict[str, Any]:
    try:
        G = read_graph_file(path)
        if command == "theta":
            certificate = is_theta_free(G, DecisionContext(search_cap=search_cap))
            return {"path": path, "status": "success", "n": G.n, "m": G.m, "verdict": certificate.verdict}
        result = tight_cut_decomposition(G)
        return {"path": path, "status": "success", "n": G.n, "m": G.m, "b": result.b, "braces": len(result.braces)}
    except ThetaKitError as e:
        logger.warning(f"Batch item {path} failed: {e}")
        return {"path": path, "status": "error", "error_type": e.error_type, "error": str(e)}


async def run_batch(paths: List[str], command: str, search_cap: int, concurrency: int = config.BATCH_CONCURRENCY) -> List[Dict[str, Any]]:
    semaphore = asyncio.Semaphore(concurrency)

    async def one(path: str) -> Dict[str, Any]:
        async with semaphore:
            return await asyncio.to_thread(_batch_item, path, command, search_cap)

    return list(await asyncio.gather(*(one(p) for p in paths)))


def cmd_batch(run: RunConfig, args: argparse.Namespace, metrics: RunMetrics) -> Tuple[int, Dict[str, Any]]:
    with metrics.measure_stage("batch", {"files": len(args.paths), "command": args.batch_command}):
        results = asyncio.run(run_batch(args.paths, args.batch_command, run.search_cap, args.concurrency))
    failed = sum(1 for r in results if r["status"] != "success")
    logger.info(f"Batch finished: {len(results) - failed} succeeded, {failed} failed")
    return EXIT_OK, {"status": "success", "failed": failed, "results": results}


COMMANDS: Dict[str, Callable[[RunConfig, argparse.Namespace, RunMetrics], Tuple[int, Dict[str, Any]]]] = {
    "theta": cmd_theta,
    "decompose": cmd_decompose,
    "verify": cmd_verify,
    "gen": cmd_gen,
    "bounds": cmd_bounds,
    "batch": cmd_batch,
}


def error_payload(e: ThetaKitError) -> Dict[str, Any]:
    payload = {"status": "error", "error_type": e.error_type, "error": str(e)}
    if isinstance(e, NotMatchingCoveredError):
        if e.edge_id is not None:
            payload["edge_id"] = e.edge_id
        if e.tutte_set is not None:
            payload["tutte_set"] = sorted(e.tutte_set)
    return payload


def execute(run: RunConfig, args: argparse.Namespace, metrics: RunMetrics) -> Tuple[int, Dict[str, Any]]:
    try:
        with metrics.measure_run(run.command, {"named": run.named, "input": run.input}):
            return COMMANDS[run.command](run, args, metrics)
    except ThetaKitError as e:
        logger.error(f"{run.command} failed: {e}")
        return EXIT_INPUT_ERROR, error_payload(e)


def render(payload: Dict[str, Any], output_format: str) -> str:
    if output_format == "json":
        return json.dumps(payload, indent=2, sort_keys=True)
    lines = []
    for key in sorted(payload):
        value = payload[key]
        if isinstance(value, (dict, list)):
            value = json.dumps(value, sort_keys=True)
        lines.append(f"{key}: {value}")
    return "\n".join(lines)


def _add_graph_source(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--named", help="Named graph, e.g. K4, petersen, T6, C6")
    parser.add_argument("--input", help="Edge-list file ('n m' header, one 'u v' per line)")


def _add_run_flags(parser: argparse.ArgumentParser, top_level: bool) -> None:
    def default(value: Any) -> Any:
        # subcommand copies must not overwrite a value given before the command
        return value if top_level else argparse.SUPPRESS

    parser.add_argument("--format", choices=("json", "text"), default=default(config.OUTPUT_FORMAT))
    parser.add_argument("--seed", type=int, default=default(config.DEFAULT_SEED))
    parser.add_argument(
        "--search-cap", type=int, default=default(config.SEARCH_CAP), help="Largest brick order searched for a witness"
    )
    parser.add_argument("--log-level", default=default(config.LOG_LEVEL))
    parser.add_argument("--metrics-out", default=default(None), help="Write stage metrics in prometheus text format to this path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Decide θ-freeness of matching covered graphs")
    _add_run_flags(parser, top_level=True)
    shared = argparse.ArgumentParser(add_help=False)
    _add_run_flags(shared, top_level=False)
    sub = parser.add_subparsers(dest="command", required=True)

    theta = sub.add_parser("theta", parents=[shared], help="Decide θ-freeness and print a certificate")
    _add_graph_source(theta)

    decompose = sub.add_parser("decompose", parents=[shared], help="Tight cut decomposition into bricks and braces")
    _add_graph_source(decompose)
    decompose.add_argument("--policy", choices=("elp", "random"), default="elp")

    verify = sub.add_parser("verify", parents=[shared], help="Check a certificate against a graph")
    _add_graph_source(verify)
    verify.add_argument("--certificate", required=True, help="JSON certificate written by the theta command")

    gen = sub.add_parser("gen", parents=[shared], help="Named graphs, extremal families or random matching covered graphs")
    _add_graph_source(gen)
    gen.add_argument("--family", choices=("T", "T0"))
    gen.add_argument("--max-n", type=int, default=10)
    gen.add_argument("--random-mcg", action="store_true")
    gen.add_argument("--n", type=int, default=10)
    gen.add_argument("--count", type=int, default=1)
    gen.add_argument("--extra-edges", type=int, default=0)
    gen.add_argument("--min-degree", type=int)
    gen.add_argument("--out-dir")

    bounds = sub.add_parser("bounds", parents=[shared], help="Edge and brick bounds with family membership")
    _add_graph_source(bounds)

    batch = sub.add_parser("batch", parents=[shared], help="Run theta or decompose over several files concurrently")
    batch.add_argument("paths", nargs="+")
    batch.add_argument("--command", dest="batch_command", choices=("theta", "decompose"), default="theta")
    batch.add_argument("--concurrency", type=int, default=config.BATCH_CONCURRENCY)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=args.log_level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )
    run = RunConfig.from_args(args)
    metrics = RunMetrics()
    code, payload = execute(run, args, metrics)
    print(render(payload, run.output_format))
    metrics.log_run_metrics()
    if run.metrics_out:
        metrics.collector.write_textfile(run.metrics_out)
    return code


if __name__ == "__main__":
    sys.exit(main())
