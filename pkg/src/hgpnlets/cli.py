"""Command-line interface.

Exit codes: 0 when every assertion holds, 2 when a falsification is observed,
1 on operational errors (bad input, caps exceeded, I/O).
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from hgpnlets.classical import soundness_report
from hgpnlets.css import css_distance_exhaustive
from hgpnlets.errors import CssViolationError, HgpError
from hgpnlets.hgp import hypergraph_product
from hgpnlets.io import (
    format_css,
    read_circuit,
    read_css,
    read_edges,
    read_state_spec,
    to_jsonable,
    write_css,
    write_distribution,
    write_json,
)
from hgpnlets.pipeline import (
    ExperimentConfig,
    build_graph,
    run_expansion_trials,
    run_nlets,
    run_structural_audit,
    run_warmup,
)

EXIT_OK, EXIT_OPERATIONAL, EXIT_FALSIFIED = 0, 1, 2

log = logging.getLogger("hgpnlets")


def _load_config(path) -> dict:
    return json.loads(Path(path).read_text()) if path else {}


def _graph_from_args(args, cfg: dict):
    if getattr(args, "graph", None):
        return read_edges(args.graph)
    spec = dict(cfg.get("graph", {"kind": "cycle", "n": 3}))
    if spec.get("kind") == "file" and args.config:
        spec["path"] = str(Path(args.config).parent / spec["path"])
    if args.seed is not None:
        spec["seed"] = args.seed
    return build_graph(spec)


def _emit(report: dict, args, command: str) -> None:
    if args.out:
        write_json(args.out, report)
    else:
        json.dump(to_jsonable(report), sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")
    if getattr(args, "figures", None):
        from hgpnlets.plotting import render

        for p in render(command, to_jsonable(report), args.figures):
            log.info("wrote %s", p)


def cmd_build(args) -> int:
    cfg = _load_config(args.config)
    g = _graph_from_args(args, cfg)
    h = hypergraph_product(g)
    c = h.code
    report = {
        "N": c.N,
        "n": g.n,
        "m": g.m,
        "d": g.max_degree(),
        "k_rank": c.k,
        "k_formula": h.k_formula(),
        "max_check_weight": c.max_check_weight(),
    }
    if c.N - c.rank_x - c.rank_z <= 26 and max(c.N - c.rank_x, c.N - c.rank_z) <= 26:
        report["distance"] = css_distance_exhaustive(c)
    if args.code_out:
        write_css(args.code_out, c)
    _emit(report, args, "build")
    return EXIT_OK


def cmd_audit(args) -> int:
    cfg = _load_config(args.config)
    report = run_structural_audit(_graph_from_args(args, cfg), coset_dim_cap=cfg.get("coset_dim_cap", 24))
    _emit(report, args, "audit")
    return EXIT_OK if all(report["assertions"].values()) else EXIT_FALSIFIED


def cmd_warmup(args) -> int:
    cfg = _load_config(args.config)
    if "code_file" in cfg:
        spec = read_state_spec(args.config)
        code = read_css(spec["code_file"])
        alpha, beta, i = spec["alpha"], spec["beta"], spec["logical_index"]
    else:
        code = hypergraph_product(_graph_from_args(args, cfg)).code
        amp = ExperimentConfig.from_dict({k: cfg[k] for k in ("alpha", "beta") if k in cfg})
        alpha, beta, i = amp.alpha, amp.beta, int(cfg.get("logical_index", 0))
    report = run_warmup(code, alpha, beta, i)
    _emit(report, args, "warmup")
    return EXIT_OK if all(report["assertions"].values()) else EXIT_FALSIFIED


def cmd_nlets(args) -> int:
    obj = _load_config(args.config)
    if args.seed is not None:
        obj["seed"] = args.seed
    if args.runs is not None:
        obj["runs"] = args.runs
    graph = obj.get("graph", {})
    if graph.get("kind") == "file" and args.config:
        graph["path"] = str(Path(args.config).parent / graph["path"])
    report = run_nlets(ExperimentConfig.from_dict(obj))
    _emit(report, args, "nlets")
    return EXIT_FALSIFIED if report["falsifications"] else EXIT_OK


def cmd_expansion(args) -> int:
    cfg = _load_config(args.config)
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
    report = run_expansion_trials(
        int(cfg.get("trials", 10)),
        int(cfg.get("n", 8)),
        int(cfg.get("depth", 2)),
        tuple(cfg.get("gammas", (0.0, 0.25, 0.5))),
        seed,
    )
    report["seed"] = seed
    _emit(report, args, "expansion-trials")
    return EXIT_FALSIFIED if report["violations"] else EXIT_OK


def cmd_css(args) -> int:
    try:
        c = read_css(args.file)
    except CssViolationError as exc:
        print(json.dumps({"valid": False, "error": str(exc)}))
        return EXIT_FALSIFIED
    if args.action == "verify":
        out = {"valid": True, "N": c.N}
    elif args.action == "params":
        out = {"N": c.N, "k": c.k, "rank_x": c.rank_x, "rank_z": c.rank_z, "max_check_weight": c.max_check_weight()}
    else:
        dim = max(c.N - c.rank_x, c.N - c.rank_z)
        if dim > args.max_dim:
            raise ValueError(f"coset dimension {dim} exceeds --max-dim {args.max_dim}")
        d = css_distance_exhaustive(c)
        out = {"N": c.N, "k": c.k, "distance": d if math.isfinite(d) else "inf"}
    print(json.dumps(out))
    return EXIT_OK


def cmd_hgp_build(args) -> int:
    c = hypergraph_product(read_edges(args.graph)).code
    if args.out:
        write_css(args.out, c)
    else:
        sys.stdout.write(format_css(c))
    return EXIT_OK


def cmd_soundness(args) -> int:
    report = soundness_report(read_edges(args.graph))
    _emit(report, args, "soundness")
    holds = report["rho_exhaustive"] >= report["rho_bound"] - 1e-9
    return EXIT_OK if holds else EXIT_FALSIFIED


def cmd_simulate(args) -> int:
    from hgpnlets.circuits import simulate

    p = simulate(read_circuit(args.circuit), args.keep)
    if args.out:
        write_distribution(args.out, p)
    else:
        for k, v in p.to_dict().items():
            print(f"{k} {v:.17g}")
    return EXIT_OK


def cmd_schema(args) -> int:
    from hgpnlets.schemas import SCHEMAS, validate

    if args.action == "show":
        print(json.dumps(SCHEMAS[args.name], indent=2, sort_keys=True))
        return EXIT_OK
    if not args.file:
        raise ValueError("schema validate needs a FILE")
    validate(args.name, json.loads(Path(args.file).read_text()))
    print(json.dumps({"valid": True, "schema": args.name}))
    return EXIT_OK


def _common(p: argparse.ArgumentParser, figures: bool = True) -> None:
    p.add_argument("--config", help="experiment config JSON")
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.add_argument("--seed", type=int, help="override the config seed")
    if figures:
        p.add_argument("--figures", help="directory for PNG figures")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hgpnlets", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build a product code and report its parameters")
    _common(p, figures=False)
    p.add_argument("--graph", help="edge-list file (overrides the config graph)")
    p.add_argument("--code-out", help="also write the CSS code file")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("audit", help="structural audit of a product code")
    _common(p)
    p.add_argument("--graph", help="edge-list file (overrides the config graph)")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("warmup", help="distance partition of an unerrored code state")
    _common(p)
    p.add_argument("--graph", help="edge-list file (overrides the config graph)")
    p.set_defaults(func=cmd_warmup)

    p = sub.add_parser("nlets", help="seeded impostor pipeline")
    _common(p)
    p.add_argument("--runs", type=int, help="override the number of seeded runs")
    p.set_defaults(func=cmd_nlets)

    p = sub.add_parser("expansion-trials", help="random circuits against the vertex-expansion bound")
    _common(p)
    p.set_defaults(func=cmd_expansion)

    p = sub.add_parser("css", help="CSS code file utilities")
    p.add_argument("action", choices=("verify", "params", "distance"))
    p.add_argument("file")
    p.add_argument("--max-dim", type=int, default=26)
    p.set_defaults(func=cmd_css)

    p = sub.add_parser("hgp", help="hypergraph product utilities")
    hsub = p.add_subparsers(dest="action", required=True)
    hb = hsub.add_parser("build", help="write the product code of an edge-list graph")
    hb.add_argument("--graph", required=True)
    hb.add_argument("--out")
    hb.set_defaults(func=cmd_hgp_build)

    p = sub.add_parser("soundness", help="exhaustive soundness of a graph repetition code")
    p.add_argument("--graph", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_soundness)

    p = sub.add_parser("simulate", help="exact output distribution of a circuit")
    p.add_argument("--circuit", required=True)
    p.add_argument("--keep", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    from hgpnlets.schemas import SCHEMAS

    p = sub.add_parser("schema", help="print a JSON schema or validate a file against it")
    p.add_argument("action", choices=("show", "validate"))
    p.add_argument("name", choices=sorted(SCHEMAS))
    p.add_argument("file", nargs="?")
    p.set_defaults(func=cmd_schema)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (HgpError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OPERATIONAL


if __name__ == "__main__":
    sys.exit(main())
