"""Command-line front end: ``generate``, ``analyze`` and ``sample``.

Exit codes: 0 success (theorem failures are reported in ``violations``),
1 unreadable or unparseable input, 2 bad parameters, 3 disconnected graph,
4 metric-axiom violation.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from . import __version__
from .continuous import (
    TORUS_DIAMETER,
    flat_torus_histogram,
    padic_space,
    sphere_distance_histogram,
    statistical_bounds,
)
from .errors import (
    AntipodeError,
    Asymmetric,
    CoincidentPoints,
    Disconnected,
    FormatError,
    MetricError,
    NegativeDistance,
    NonzeroDiagonal,
    TriangleViolation,
)
from .fileio import content_hash, format_edge_list, format_matrix, read_edge_list, read_matrix, sniff
from .graphs import (
    AbelianCayley,
    PermutationCayley,
    cayley,
    complete,
    cycle,
    hypercube,
    path,
    petersen,
    star,
)
from .report import analyze_graph, analyze_space, distribution_csv
from .symmetry import DEFAULT_BUDGET

EXIT_PARSE, EXIT_PARAM, EXIT_DISCONNECTED, EXIT_METRIC = 1, 2, 3, 4

GRAPH_FAMILIES = ("hypercube", "cycle", "complete", "petersen", "cayley-abelian", "cayley-perm", "path", "star")
FAMILIES = GRAPH_FAMILIES + ("padic",)


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _int_list(text: str, sep: str = ",") -> list[int]:
    try:
        return [int(t) for t in text.replace(sep, " ").split()]
    except ValueError as exc:
        raise CliError(EXIT_PARAM, f"expected integers, got {text!r}") from exc


def _elements(text: str | None, sep: str) -> list[list[int]]:
    if not text:
        return []
    return [_int_list(part, sep) for part in text.split(";") if part.strip()]


def _need(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise CliError(EXIT_PARAM, f"{args.family} needs --{name}")


def _family_params(args) -> dict:
    """Parameters relevant to ``args.family``, as recorded in report descriptors."""
    keys = {"hypercube": ("d",), "cycle": ("n",), "complete": ("n",), "petersen": (),
            "cayley-abelian": ("moduli", "connection"), "cayley-perm": ("degree", "connection"),
            "padic": ("p", "k"), "path": ("n",), "star": ("n",)}[args.family]
    _need(args, *keys)
    return {k: getattr(args, k) for k in keys}


def build_family(family: str, params: dict):
    """Graph (or p-adic truncation) for a family name and its CLI parameters."""
    if family == "hypercube":
        return hypercube(params["d"])
    if family == "cycle":
        return cycle(params["n"])
    if family == "complete":
        return complete(params["n"])
    if family == "petersen":
        return petersen()
    if family == "path":
        return path(params["n"])
    if family == "star":
        return star(params["n"])
    if family == "cayley-abelian":
        spec = AbelianCayley(_int_list(params["moduli"]), _elements(params["connection"], ","))
        return cayley(spec)
    if family == "cayley-perm":
        return cayley(PermutationCayley(params["degree"], _elements(params["connection"], " ")))
    if family == "padic":
        return padic_space(params["p"], params["k"])
    raise CliError(EXIT_PARAM, f"unknown family {family!r}")


def _add_family_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--d", type=int, help="hypercube dimension")
    p.add_argument("--n", type=int, help="vertex count (cycle, complete, path) or leaves (star)")
    p.add_argument("--moduli", help="comma-separated moduli, e.g. 2,2,2")
    p.add_argument("--connection",
                   help="connection set: elements separated by ';' (abelian: '1,0,0;0,1,0', perm: '1 0 2;0 2 1')")
    p.add_argument("--degree", type=int, help="symmetric group degree")
    p.add_argument("--p", type=int, help="prime for padic")
    p.add_argument("--k", type=int, help="depth for padic")


def _default_threads() -> int:
    raw = os.environ.get("ANTIPODE_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="antipode", description="Distance statistics and antipodality of homogeneous metric spaces.",
                                     epilog="exit codes: 1 parse error, 2 bad parameters, 3 disconnected graph, 4 metric violation")
    parser.add_argument("--version", action="version", version=f"antipode {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a graph edge list or a p-adic distance matrix")
    gen.add_argument("family", choices=FAMILIES)
    _add_family_flags(gen)
    gen.add_argument("-o", "--output", help="output file (default: stdout)")

    ana = sub.add_parser("analyze", help="run the full analysis on a file or a generated family")
    ana.add_argument("input", nargs="?", help="edge-list or distance-matrix file")
    ana.add_argument("--family", choices=FAMILIES)
    _add_family_flags(ana)
    ana.add_argument("--fast-path", action="store_true", help="single-BFS distribution; needs a certificate")
    ana.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="refinement node budget for search")
    ana.add_argument("--no-aut", action="store_true", help="skip symmetry analysis")
    ana.add_argument("--format", choices=("json", "csv"), default="json")
    ana.add_argument("--threads", type=int, default=_default_threads())

    smp = sub.add_parser("sample", help="Monte Carlo distances on a sphere or the flat torus")
    smp.add_argument("space", choices=("sphere", "torus"))
    smp.add_argument("--d", type=int, default=2, help="sphere dimension")
    smp.add_argument("--n", type=int, default=10**6, help="number of sampled pairs")
    smp.add_argument("--seed", type=int, default=0)
    smp.add_argument("--bins", type=int, default=64)
    smp.add_argument("--csv", help="write the histogram CSV here")
    smp.add_argument("--format", choices=("json", "csv"), default="json")
    smp.add_argument("--threads", type=int, default=_default_threads())
    return parser


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_generate(args) -> int:
    params = _family_params(args)
    obj = build_family(args.family, params)
    if args.family == "padic":
        text = format_matrix(obj.space)
        summary = f"padic p={args.p} k={args.k}: {obj.space.n} points"
    else:
        text = format_edge_list(obj)
        summary = f"{obj.name}: {obj.n} vertices, {obj.num_edges} edges"
    _emit(text, args.output)
    print(summary + (f" -> {args.output}" if args.output else ""), file=sys.stderr if not args.output else sys.stdout)
    return 0


def _metric_witness(exc: MetricError) -> str:
    if isinstance(exc, TriangleViolation):
        return "({},{},{})".format(*exc.witness)
    if isinstance(exc, (Asymmetric, NegativeDistance, CoincidentPoints)):
        return f"({exc.i},{exc.j})"
    if isinstance(exc, NonzeroDiagonal):
        return f"({exc.i})"
    return ""


def _analyze_input(args):
    if args.input is not None and args.family is not None:
        raise CliError(EXIT_PARAM, "give either an input file or --family, not both")
    search = not args.no_aut
    if args.family is not None:
        params = _family_params(args)
        descriptor = {"kind": "family", "family": args.family, "params": params}
        obj = build_family(args.family, params)
        if args.family == "padic":
            if args.fast_path:
                raise CliError(EXIT_PARAM, "--fast-path applies to graphs only")
            evidence = obj.automorphisms if search else None
            return analyze_space(obj.space, descriptor, evidence, search=search, budget=args.budget)
        return analyze_graph(obj, descriptor, search=search, budget=args.budget, fast_path=args.fast_path)
    if args.input is None:
        raise CliError(EXIT_PARAM, "analyze needs an input file or --family")
    try:
        text = Path(args.input).read_text(encoding="utf-8")
        descriptor = {"kind": "file", "path": args.input, "sha256": content_hash(args.input)}
    except OSError as exc:
        raise CliError(EXIT_PARSE, f"cannot read {args.input}: {exc.strerror}") from exc
    if sniff(text) == "matrix":
        if args.fast_path:
            raise CliError(EXIT_PARAM, "--fast-path applies to graphs only")
        descriptor["format"] = "matrix"
        return analyze_space(read_matrix(text), descriptor, search=search, budget=args.budget)
    descriptor["format"] = "edges"
    g = read_edge_list(text, Path(args.input).stem)
    return analyze_graph(g, descriptor, search=search, budget=args.budget, fast_path=args.fast_path)


def cmd_analyze(args) -> int:
    report = _analyze_input(args).to_dict()
    if args.format == "csv":
        sys.stdout.write(distribution_csv(report))
    else:
        sys.stdout.write(json.dumps(report, indent=2) + "\n")
    return 0


def _test_block(t) -> dict | None:
    if t is None:
        return None
    return {"statistic": t.statistic, "dof": t.dof, "threshold": t.threshold, "passed": t.passed}


def sample_report(args) -> tuple[dict, str]:
    """JSON-ready sampling report and the histogram CSV text."""
    if args.n is None or args.n < 1:
        raise CliError(EXIT_PARAM, "--n must be positive")
    if args.threads < 1:
        raise CliError(EXIT_PARAM, "--threads must be positive")
    if args.space == "sphere":
        hist = sphere_distance_histogram(args.d, args.n, args.bins, args.seed, args.threads)
        D, exact_mean = math.pi, math.pi / 2
        space = {"space": "sphere", "d": args.d}
    else:
        hist = flat_torus_histogram(args.n, args.bins, args.seed, args.threads)
        D, exact_mean = TORUS_DIAMETER, None
        space = {"space": "torus", "d": 2}
    est = hist.estimate
    sb = statistical_bounds(est, D)
    csv = "bin_lo,bin_hi,mass\n" + "".join(",".join(row) + "\n" for row in hist.csv_rows())
    report = {
        "tool": {"name": "antipode", "version": __version__},
        "input": {"kind": "sample", **space, "n": args.n, "seed": args.seed, "bins": args.bins},
        "seed": args.seed,
        "diameter": D,
        "estimate": est.to_json(),
        "reference_mean": exact_mean,
        "degenerate_draws": est.degenerate,
        "bounds": {"lower_bound": D / 2, "upper_bound": D, "lower_margin_se": sb.lower_margin,
                   "upper_margin_se": sb.upper_margin, "sigmas": sb.sigmas,
                   "lower_ok": sb.lower_ok, "upper_ok": sb.upper_ok,
                   "strictly_inside": sb.strictly_inside, "lower_tight": sb.lower_tight},
        "symmetry": _test_block(hist.symmetry),
        "fit": _test_block(hist.fit),
        "histogram_csv": args.csv,
    }
    return report, csv


def cmd_sample(args) -> int:
    report, csv = sample_report(args)
    if args.csv:
        Path(args.csv).write_text(csv, encoding="utf-8")
    if args.format == "csv":
        sys.stdout.write(csv)
    else:
        sys.stdout.write(json.dumps(report, indent=2) + "\n")
    return 0


def main(argv: list[str] | None = None) -> int:
    try:
        sys.stdout.reconfigure(line_buffering=True, encoding="utf-8")
    except AttributeError:
        pass
    args = build_parser().parse_args(argv)
    handler = {"generate": cmd_generate, "analyze": cmd_analyze, "sample": cmd_sample}[args.command]
    try:
        return handler(args)
    except CliError as exc:
        code, msg = exc.code, str(exc)
    except FormatError as exc:
        code, msg = EXIT_PARSE, f"parse error: {exc}"
    except Disconnected as exc:
        code, msg = EXIT_DISCONNECTED, str(exc)
    except MetricError as exc:
        code, msg = EXIT_METRIC, f"metric violation {_metric_witness(exc)}: {exc}"
    except (AntipodeError, ValueError) as exc:
        code, msg = EXIT_PARAM, f"bad parameters: {exc}"
    print(f"antipode: {msg}", file=sys.stderr)
    return code
