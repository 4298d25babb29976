"""Command-line entry point.

Exit codes: 0 success, 1 invalid input, 2 size guard exceeded,
3 certificate infeasible or strict verification failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from pathlib import Path

from . import graph as graph_io
from .certificate import CertificateInfeasible, certify_instance, random_gamma
from .generators import (AdversaryParams, InfeasibleBudget, RandomModelParams,
                         gen_biclique_adversarial, gen_biclique_random,
                         gen_clique_adversarial, gen_clique_random)
from .oracle import SizeGuardError, max_clique_exact, max_edge_biclique_exact
from .rmt import (OmegaParams, check_furedi_komlos, check_geman, check_recentering_bound,
                  chernoff_bound, decompose_random_W, empirical_chernoff_tail)
from .solver import SolverConfig, solve_biclique_relaxation, solve_clique_relaxation
from .sweep import config_from_mapping, estimate_alpha, parse_config, rows_to_csv, run_sweep

EXIT_OK, EXIT_INVALID, EXIT_SIZE, EXIT_CERT = 0, 1, 2, 3


class CLIError(Exception):
    def __init__(self, message, code=EXIT_INVALID):
        super().__init__(message)
        self.code = code


def _emit(text: str, out):
    if out:
        Path(out).write_text(text, newline="\n")
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    def clean(x):
        if isinstance(x, float) and not math.isfinite(x):
            return None
        if isinstance(x, dict):
            return {k: clean(v) for k, v in x.items()}
        if isinstance(x, (list, tuple)):
            return [clean(v) for v in x]
        return x
    return json.dumps(clean(obj), indent=2, sort_keys=True) + "\n"


def _load(path):
    try:
        return graph_io.load(path)
    except (OSError, graph_io.GraphFormatError) as exc:
        raise CLIError(f"cannot read {path}: {exc}")


def cmd_generate(args) -> int:
    seed = args.seed
    try:
        if args.problem == "clique":
            if args.model == "random":
                inst = gen_clique_random(RandomModelParams(p=args.p, N=args.N, n=args.n, seed=seed))
            else:
                inst = gen_clique_adversarial(args.n, args.N, AdversaryParams(args.r, args.alpha, args.beta, seed))
        else:
            M = args.M if args.M is not None else math.ceil(args.y * args.N)
            m = args.m if args.m is not None else math.ceil(args.z * args.n)
            if args.model == "random":
                inst = gen_biclique_random(RandomModelParams(p=args.p, N=args.N, n=args.n, M=M, m=m, seed=seed))
            else:
                inst = gen_biclique_adversarial(m, args.n, M, args.N,
                                                AdversaryParams(args.r, args.alpha, args.beta, seed),
                                                require_screen=args.guaranteed)
    except InfeasibleBudget as exc:
        raise CLIError(str(exc))
    except ValueError as exc:
        raise CLIError(str(exc))
    _emit(graph_io.dumps(inst), args.out)
    return EXIT_OK


def cmd_solve(args) -> int:
    inst = _load(args.graph)
    cfg = SolverConfig(max_iterations=args.max_iterations, primal_tolerance=args.tolerance,
                       dual_tolerance=args.tolerance, rounding_threshold=args.threshold)
    try:
        if inst.is_biclique:
            res = solve_biclique_relaxation(inst.graph, cfg)
        else:
            res = solve_clique_relaxation(inst.graph, cfg)
    except ValueError as exc:
        raise CLIError(str(exc))
    rec = res.to_dict()
    keep = ("converged", "iterations", "objective", "rank_one_gap", "candidate", "runtime_ms")
    _emit(_json({k: rec[k] for k in keep}), args.out)
    return EXIT_OK


def cmd_certify(args) -> int:
    inst = _load(args.graph)
    if args.gamma is not None:
        gamma = args.gamma
    elif args.preset == "random":
        if args.p is None:
            raise CLIError("--preset random needs --p")
        gamma = random_gamma(args.p)
    else:
        gamma = 0.0
    try:
        _, report = certify_instance(inst, gamma=gamma, strict=True)
    except CertificateInfeasible as exc:
        _emit(_json({"overall": False, "error": str(exc),
                     "saturated_vertices": exc.saturated}), args.out)
        return EXIT_CERT
    except ValueError as exc:
        raise CLIError(str(exc))
    _emit(_json({"gamma": gamma, **report.to_dict()}), args.out)
    return EXIT_OK if report.overall else EXIT_CERT


def cmd_oracle(args) -> int:
    inst = _load(args.graph)
    try:
        if inst.is_biclique:
            res = max_edge_biclique_exact(inst.graph)
        else:
            res = max_clique_exact(inst.graph)
    except SizeGuardError as exc:
        raise CLIError(str(exc), EXIT_SIZE)
    _emit(_json(res.to_dict()), args.out)
    return EXIT_OK


def _trial_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["trial_index", "statistic", "bound", "violated"])
    for k, s, b, v in rows:
        w.writerow([k, repr(float(s)), repr(float(b)), int(v)])
    return buf.getvalue()


def cmd_rmt(args) -> int:
    mode, seed = args.mode, args.seed
    summary = {"mode": mode, "seed": seed}
    try:
        if mode == "furedi-komlos":
            rep = check_furedi_komlos(args.n, args.p, args.trials, seed)
            rows = list(rep.rows())
        elif mode == "geman":
            rep = check_geman(args.n, args.y, args.p, args.trials, seed)
            rows = list(rep.rows())
            summary["c4_estimate"] = rep.estimate
        elif mode == "recenter":
            rep = check_recentering_bound(args.n, args.N, args.p, args.trials, seed)
            rows = list(rep.rows())
            summary.update(rep.extra, c1_estimate=rep.estimate)
        elif mode == "chernoff":
            bound = chernoff_bound(args.k, args.p, args.delta)
            rows = []
            for t in range(args.trials):
                tail = empirical_chernoff_tail(args.k, args.p, args.delta, args.draws, seed + t)
                rows.append((t, tail, bound, tail > bound))
        else:  # w-decomp
            rows = []
            params = OmegaParams(args.p)
            bound = 3.0 * params.sigma * math.sqrt(args.N) / args.n
            norms = []
            for t in range(args.trials):
                inst = gen_clique_random(RandomModelParams(p=args.p, N=args.N, n=args.n, seed=seed + t))
                dec = decompose_random_W(inst, random_gamma(args.p), seed=seed + t)
                nrm = dec.norms()
                norms.append({k: v["spectral"] for k, v in nrm.items()})
                w1 = nrm["W1"]["spectral"]
                rows.append((t, w1, bound, w1 > bound))
            summary["spectral_norms"] = norms
    except CertificateInfeasible as exc:
        raise CLIError(str(exc), EXIT_CERT)
    except ValueError as exc:
        raise CLIError(str(exc))
    if args.format == "json":
        summary["trials"] = [{"trial_index": k, "statistic": s, "bound": b, "violated": bool(v)}
                             for k, s, b, v in rows]
        summary["violations"] = sum(1 for r in rows if r[3])
        _emit(_json(summary), args.out)
    else:
        _emit(_trial_csv(rows), args.out)
    return EXIT_OK


def _sweep_config(args):
    kv = {}
    if args.config:
        try:
            kv = parse_config(Path(args.config).read_text())
        except OSError as exc:
            raise CLIError(f"cannot read config: {exc}")
    for item in args.set or []:
        if "=" not in item:
            raise CLIError(f"--set expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        kv[k.strip()] = v.strip()
    if args.seed_given:
        kv["base_seed"] = str(args.seed)
    if args.workers is not None:
        kv["workers"] = str(args.workers)
    try:
        return config_from_mapping(kv)
    except (ValueError, TypeError) as exc:
        raise CLIError(f"invalid sweep config: {exc}")


def cmd_sweep(args) -> int:
    cfg = _sweep_config(args)
    rows = run_sweep(cfg)
    if args.format == "json":
        _emit(_json([r.as_record() for r in rows]), args.out)
    else:
        _emit(rows_to_csv(rows, timing=not args.no_timing), args.out)
    return EXIT_OK


def cmd_estimate_alpha(args) -> int:
    cfg = _sweep_config(args)
    try:
        est = estimate_alpha(cfg)
    except ValueError as exc:
        raise CLIError(str(exc))
    if args.format == "csv":
        _emit(rows_to_csv(est.rows, timing=not args.no_timing), args.out)
    else:
        _emit(_json(est.to_dict()), args.out)
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    # usage errors are invalid input (exit 1); argparse would use 2, the size-guard code
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--workers", type=int, default=None)
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("--config", default=None, help="flat key=value file")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = _Parser(prog="nnrecover", parents=[common],
                                 description="Planted clique/biclique recovery by nuclear-norm relaxation.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", parents=[common], help="write a planted-graph v1 instance")
    g.add_argument("--problem", choices=("clique", "biclique"), default="clique")
    g.add_argument("--model", choices=("random", "adversarial"), default="random")
    g.add_argument("--N", type=int, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--M", type=int)
    g.add_argument("--m", type=int)
    g.add_argument("--y", type=float, default=1.0)
    g.add_argument("--z", type=float, default=1.0)
    g.add_argument("--p", type=float, default=0.5)
    g.add_argument("--r", type=int, default=0)
    g.add_argument("--alpha", type=float, default=0.5)
    g.add_argument("--beta", type=float, default=0.5)
    g.add_argument("--guaranteed", action="store_true",
                   help="reject adversarial budgets failing the recoverability screen")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("solve", parents=[common], help="solve the relaxation for a graph file")
    s.add_argument("graph")
    s.add_argument("--max-iterations", type=int, default=5000)
    s.add_argument("--tolerance", type=float, default=1e-6)
    s.add_argument("--threshold", type=float, default=0.5)
    s.set_defaults(func=cmd_solve)

    c = sub.add_parser("certify", parents=[common], help="build and verify the dual witness")
    c.add_argument("graph")
    c.add_argument("--preset", choices=("adversarial", "random"), default="adversarial")
    c.add_argument("--p", type=float)
    c.add_argument("--gamma", type=float)
    c.set_defaults(func=cmd_certify)

    o = sub.add_parser("oracle", parents=[common], help="exact brute-force optimum")
    o.add_argument("graph")
    o.set_defaults(func=cmd_oracle)

    r = sub.add_parser("rmt", parents=[common], help="random-matrix Monte-Carlo checks")
    r.add_argument("mode", choices=("furedi-komlos", "geman", "chernoff", "recenter", "w-decomp"))
    r.add_argument("--n", type=int, default=200)
    r.add_argument("--N", type=int, default=400)
    r.add_argument("--p", type=float, default=0.5)
    r.add_argument("--y", type=float, default=1.0)
    r.add_argument("--k", type=int, default=100)
    r.add_argument("--delta", type=float, default=0.5)
    r.add_argument("--draws", type=int, default=100000)
    r.add_argument("--trials", type=int, default=10)
    r.set_defaults(func=cmd_rmt)

    for name, func, helptext in (("sweep", cmd_sweep, "phase-transition / adversarial sweep"),
                                 ("estimate-alpha", cmd_estimate_alpha, "smallest recovering c = n/sqrt(N)")):
        w = sub.add_parser(name, parents=[common], help=helptext)
        w.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override a config entry (repeatable)")
        w.add_argument("--no-timing", action="store_true",
                       help="write 0 runtimes so output is byte-reproducible")
        w.set_defaults(func=func)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    args.seed_given = args.seed is not None
    if args.seed is None:
        args.seed = 0
    if args.format is None:
        args.format = "json" if args.command == "estimate-alpha" else "csv"
    if args.config and args.command not in ("sweep", "estimate-alpha"):
        ap.error("--config applies to sweep and estimate-alpha")
    try:
        return args.func(args)
    except CLIError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
