"""Command line front end: generate, route, compare, export-dot.

Exit codes: 0 ok, 2 bad flags, 3 generation failure, 4 routing failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import baselines, experiments, router, topology
from .linkbudget import RadioConfig
from .pathtree import build_tree
from .topology import GenParams, GenerationError, NetworkValidationError

USAGE_ERROR, GENERATION_ERROR, ROUTING_ERROR = 2, 3, 4


def _radio_config(args) -> RadioConfig:
    cfg = RadioConfig()
    if getattr(args, "noise_dbm", None) is not None:
        cfg = cfg.with_noise(args.noise_dbm)
    return cfg


def _add_route_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("network", help="network JSON file")
    p.add_argument("--algo", choices=("ours", "noint", "random", "ga"), default="ours")
    p.add_argument("--groups", type=int, default=1, help="number of user groups")
    p.add_argument("--mode", choices=("isolated", "sequential"), default="isolated")
    p.add_argument("--hmax", type=int, default=4, help="max hops of a valid path")
    p.add_argument("--noise-dbm", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ga-k", type=int, default=20, help="GA population size")
    p.add_argument("--ga-j", type=int, default=10, help="GA survivors per generation")
    p.add_argument("--ga-generations", type=int, default=20)
    p.add_argument("--ga-mutation", type=float, default=0.1)


def cmd_generate(args) -> int:
    try:
        params = GenParams(
            b=args.bs,
            u=args.users,
            c=args.core,
            grid_side_m=args.grid_side,
            min_bs_sep_m=args.min_sep,
            bs_link_radius_m=args.link_radius,
            bs_link_prob=args.link_prob,
            seed=args.seed,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    try:
        net = topology.generate_network(params, h_max=args.hmax)
    except GenerationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return GENERATION_ERROR
    topology.save_network(net, args.output)
    print(
        f"wrote {args.output}: {net.b} BSs ({len(net.core_ids)} core), "
        f"{net.u} users, {len(net.bs_edges())} BS edges"
    )
    return 0


def _format_path(path) -> str:
    return " -> ".join(str(n) for n in path.nodes)


def cmd_route(args) -> int:
    try:
        net = topology.load_network(args.network)
    except (OSError, NetworkValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    cfg = _radio_config(args)
    try:
        trees = {u: build_tree(net, u, args.hmax) for u in net.users}
        stats = None
        if args.algo == "ours":
            plan = router.make_plan(net, args.groups, args.mode)
            assignment, stats = router.route(net, cfg, plan, args.hmax, trees)
        elif args.algo == "noint":
            plan = router.make_plan(net, args.groups, args.mode)
            assignment, stats = baselines.route_no_interference(
                net, cfg, plan, args.hmax, trees
            )
        elif args.algo == "random":
            assignment = baselines.route_random(net, cfg, args.seed, args.hmax, trees)
        else:
            ga = baselines.GaParams(
                population=args.ga_k,
                survivors=args.ga_j,
                generations=args.ga_generations,
                mutation_prob=args.ga_mutation,
                seed=args.seed,
            )
            assignment, _ = baselines.route_ga(net, cfg, ga, args.hmax, trees)
    except router.RoutingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ROUTING_ERROR
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR

    for uid in sorted(assignment.chosen):
        cost = assignment.per_user_cost_db[uid]
        print(
            f"user {uid}: {_format_path(assignment.chosen[uid])}  "
            f"cost {cost:.2f} dB"
        )
    value = experiments.coa(assignment.per_user_cost_db)
    print(f"CoA: {value:.2f} dB")
    if stats is not None:
        print(
            f"counters: snir_evals={stats.snir_evals} "
            f"path_cost_evals={stats.path_cost_evals} "
            f"combinations={stats.combinations}"
        )
    if args.json:
        doc = {
            "algorithm": args.algo,
            "coa_db": value,
            "users": {
                str(uid): {
                    "path": list(assignment.chosen[uid].nodes),
                    "cost_db": assignment.per_user_cost_db[uid],
                }
                for uid in sorted(assignment.chosen)
            },
        }
        if stats is not None:
            doc["counters"] = {
                "snir_evals": stats.snir_evals,
                "path_cost_evals": stats.path_cost_evals,
                "combinations": stats.combinations,
            }
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=1)
            fh.write("\n")
    return 0


def _parse_scenarios(spec: str) -> list[experiments.Scenario]:
    if spec == "table1":
        return list(experiments.TABLE1_SCENARIOS)
    out = []
    for part in spec.split(";"):
        fields = [int(x) for x in part.split(",")]
        if len(fields) != 4:
            raise ValueError(f"scenario {part!r} is not B,U,C,G")
        out.append(experiments.Scenario(*fields))
    return out


def cmd_compare(args) -> int:
    try:
        scenarios = _parse_scenarios(args.scenarios)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    threads = args.threads
    if threads is None:
        threads = int(os.environ.get("MESHROUTE_THREADS", "1"))
    try:
        reports = experiments.run_comparison(
            scenarios,
            seeds=range(args.seed_base, args.seed_base + args.seeds),
            cfg=_radio_config(args),
            h_max=args.hmax,
            random_runs=args.runs,
            ga_runs=args.ga_runs,
            include_ga=not args.no_ga,
            threads=threads,
        )
    except (GenerationError, router.RoutingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return GENERATION_ERROR if isinstance(exc, GenerationError) else ROUTING_ERROR
    experiments.write_csv(reports, args.output, include_wall=not args.no_wall)
    header = f"{'scenario':>14} {'seed':>4} {'ours':>8} {'algB':>8} {'algC':>8}"
    if not args.no_ga:
        header += f" {'GAmin':>8} {'GAmax':>8} {'GAavg':>8}"
    print(header)
    for rep in reports:
        line = (
            f"{rep.scenario.label:>14} {rep.seed:>4} "
            f"{rep.coa_ours:>8.2f} {rep.coa_blind:>8.2f} {rep.coa_random_avg:>8.2f}"
        )
        if not args.no_ga:
            line += f" {rep.ga_min:>8.2f} {rep.ga_max:>8.2f} {rep.ga_avg:>8.2f}"
        print(line)
    print(f"wrote {args.output}")
    return 0


def _dot_pos(net, i, scale=0.02):
    x, y = net.coords[i]
    return f"{x * scale:.3f},{y * scale:.3f}!"


def cmd_export_dot(args) -> int:
    try:
        net = topology.load_network(args.network)
    except (OSError, NetworkValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    cfg = _radio_config(args)
    colors = {"ours": "red", "noint": "green"}
    chosen_links: dict[str, set] = {}
    try:
        trees = {u: build_tree(net, u, args.hmax) for u in net.users}
        plan = router.make_plan(net, args.groups, args.mode)
        for algo in args.algos:
            if algo == "ours":
                assignment, _ = router.route(net, cfg, plan, args.hmax, trees)
            else:
                assignment, _ = baselines.route_no_interference(
                    net, cfg, plan, args.hmax, trees
                )
            links = set()
            for path in assignment.chosen.values():
                links.update((a, b) for a, b in path.links)
            chosen_links[algo] = links
    except router.RoutingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ROUTING_ERROR

    lines = ["graph mesh {", "  layout=neato;", "  node [fontsize=10];"]
    for i in range(net.b):
        shape = "doublecircle" if net.is_core(i) else "circle"
        lines.append(f'  n{i} [shape={shape}, pos="{_dot_pos(net, i)}"];')
    for i in net.users:
        lines.append(f'  n{i} [shape=square, pos="{_dot_pos(net, i)}"];')
    for i, j in sorted(
        (min(a, b), max(a, b))
        for a in range(net.num_nodes)
        for b in net.neighbors(a)
    ):
        lines.append(f"  n{i} -- n{j} [color=gray];")
    for algo in args.algos:
        color = colors[algo]
        for a, b in sorted(chosen_links[algo]):
            lines.append(f'  n{a} -- n{b} [color={color}, penwidth=2.0];')
    lines.append("}")
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"wrote {args.output}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="meshroute",
        description="Interference-aware routing over fixed-wireless mesh backhaul",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a random network file")
    p.add_argument("--bs", type=int, required=True, help="number of base stations")
    p.add_argument("--users", type=int, required=True)
    p.add_argument("--core", type=int, required=True, help="number of core BSs")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid-side", type=float, default=1113.2, help="square side (m)")
    p.add_argument("--min-sep", type=float, default=40.0, help="min BS separation (m)")
    p.add_argument("--link-radius", type=float, default=500.0)
    p.add_argument("--link-prob", type=float, default=0.5)
    p.add_argument("--hmax", type=int, default=4)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("route", help="route one network with a chosen algorithm")
    _add_route_flags(p)
    p.add_argument("--json", default=None, help="also write a JSON report")
    p.set_defaults(func=cmd_route)

    p = sub.add_parser("compare", help="run the scenario comparison to CSV")
    p.add_argument("--scenarios", default="table1", help='"table1" or "B,U,C,G;..."')
    p.add_argument("--seeds", type=int, default=5, help="seeds per scenario")
    p.add_argument("--seed-base", type=int, default=0)
    p.add_argument("--runs", type=int, default=1000, help="random-baseline draws")
    p.add_argument("--ga-runs", type=int, default=50)
    p.add_argument("--no-ga", action="store_true", help="skip the GA baseline")
    p.add_argument("--hmax", type=int, default=4)
    p.add_argument("--noise-dbm", type=float, default=None)
    p.add_argument("--threads", type=int, default=None, help="parallel cells")
    p.add_argument("--no-wall", action="store_true", help="omit wall times in CSV")
    p.add_argument("-o", "--output", required=True, help="CSV output path")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("export-dot", help="export a network and chosen paths as DOT")
    p.add_argument("network")
    p.add_argument("--algos", nargs="+", choices=("ours", "noint"),
                   default=["ours", "noint"])
    p.add_argument("--groups", type=int, default=1)
    p.add_argument("--mode", choices=("isolated", "sequential"), default="isolated")
    p.add_argument("--hmax", type=int, default=4)
    p.add_argument("--noise-dbm", type=float, default=None)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_export_dot)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


def run_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run_main()
