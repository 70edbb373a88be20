"""Command-line front end: representation searches, clearing, reductions,
and the experiment sweeps behind the CSV artifacts."""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .clearing import (
    FlipCostMatrix,
    clear_by_types,
    flip_and_clear,
    model_altruists,
    realize_cover,
)
from .fileio import (
    ParseError,
    read_attributes,
    read_edge_list,
    write_attributes,
    write_edge_list,
)
from .forge import (
    GeneratorConfig,
    decode_assignment,
    gen_attribute_pool,
    gen_blood_pool,
    gen_theorem4_graph,
    read_dimacs_3sat,
    reduce_3sat,
)
from .graphs import AttributeRepresentation, build_graph_from_attributes
from .oracle import max_cycle_cover_bruteforce
from .represent import (
    RepresentationProblem,
    decode_model,
    encode_k0,
    encode_kt,
    min_k,
    solve,
    theorem_width_bound,
)
from .satsolver import SAT, TIMEOUT, UNSAT
from .typespace import extract_type_space, extract_type_space_with_altruists
from . import cnfio

CSV_VERSION_LINE = "# typed-exchange csv v1"

_EXIT_SAT = 0
_EXIT_UNSAT = 1
_EXIT_TIMEOUT = 2
_EXIT_PARSE = 3
_EXIT_ALARM = 4

_STATUS_EXIT = {SAT: _EXIT_SAT, UNSAT: _EXIT_UNSAT, TIMEOUT: _EXIT_TIMEOUT}


def _atomic_write_text(path, text: str) -> None:
    """Write whole-file-or-nothing: temp file in the same dir, then rename."""
    path = Path(path)
    tmp = path.with_name(path.name + f".tmp{os.getpid()}")
    tmp.write_text(text)
    os.replace(tmp, path)


def _write_csv(path, header: str, rows) -> None:
    lines = [CSV_VERSION_LINE, header]
    lines.extend(",".join(str(x) for x in row) for row in rows)
    text = "\n".join(lines) + "\n"
    if path:
        _atomic_write_text(path, text)
    else:
        sys.stdout.write(text)


def _resolve_seed(args) -> int:
    env = os.environ.get("TYPED_EXCHANGE_SEED")
    if env is not None:
        return int(env)
    return args.seed


def _budgets(args):
    max_conflicts = getattr(args, "budget_conflicts", None)
    ms = getattr(args, "budget_ms", None)
    max_seconds = ms / 1000.0 if ms is not None else None
    return max_conflicts, max_seconds


def _load_graph(path):
    return read_edge_list(path)


def _graph_paths(inputs) -> list:
    paths = []
    for item in inputs:
        p = Path(item)
        if p.is_dir():
            paths.extend(sorted(p.glob("*.graph")))
        else:
            paths.append(p)
    return paths


def _parse_k_grid(spec: str) -> list:
    if ":" in spec:
        lo, hi = spec.split(":")
        return list(range(int(lo), int(hi) + 1))
    return [int(x) for x in spec.split(",")]


# ---------------------------------------------------------------------------
# represent


def cmd_represent(args) -> int:
    graph = _load_graph(args.graph)
    problem = RepresentationProblem(graph, args.k, args.t)
    max_conflicts, max_seconds = _budgets(args)

    if args.emit_dimacs:
        enc = encode_k0(problem) if args.t == 0 else encode_kt(problem)
        cnfio.write_dimacs(enc, args.emit_dimacs)
        cnfio.write_varmap(enc, str(args.emit_dimacs) + ".varmap")
        print(f"wrote {enc.num_vars} vars, {len(enc.clauses)} clauses")
        if not args.import_model:
            return _EXIT_SAT

    if args.import_model:
        enc = encode_k0(problem) if args.t == 0 else encode_kt(problem)
        model = cnfio.read_model(args.import_model)
        rep = decode_model(problem, enc.varmap, model)
        from .graphs import verify_representation

        report = verify_representation(graph, rep, problem.pairs)
        if not report.ok:
            print(f"INVALID model: {len(report.mismatches)} pair mismatches")
            return _EXIT_UNSAT
        print("SAT")
        if args.out:
            write_attributes(rep, args.out)
        return _EXIT_SAT

    outcome = solve(problem, max_conflicts=max_conflicts, max_seconds=max_seconds)
    stats = outcome.stats
    print(
        f"{outcome.status} k={args.k} t={args.t} "
        f"decisions={stats.decisions} conflicts={stats.conflicts} "
        f"wall_ms={stats.wall_seconds * 1000:.1f}"
    )
    if outcome.status == SAT and args.out:
        write_attributes(outcome.rep, args.out)
    return _STATUS_EXIT[outcome.status]


# ---------------------------------------------------------------------------
# min-k


def cmd_min_k(args) -> int:
    max_conflicts, max_seconds = _budgets(args)
    rows = []
    for path in _graph_paths(args.graphs):
        graph = _load_graph(path)
        result = min_k(
            graph, args.t, max_conflicts=max_conflicts, max_seconds=max_seconds
        )
        bound = theorem_width_bound(graph) + args.t
        rows.append(
            (path.name, graph.n, args.t, result.k_min, bound, int(result.conservative))
        )
    _write_csv(args.out, "instance,n,t,k_min,bound,conservative", rows)
    return 0


# ---------------------------------------------------------------------------
# sweep-k


def _sweep_k_instance(job):
    idx, seed, cfg_kwargs, t, k_grid, max_conflicts, max_seconds = job
    cfg = GeneratorConfig(seed=seed, **cfg_kwargs)
    _, graph = gen_attribute_pool(cfg)
    rows = []
    sat_seen = False
    for k in k_grid:
        outcome = solve(
            RepresentationProblem(graph, k, t),
            max_conflicts=max_conflicts,
            max_seconds=max_seconds,
        )
        raw = outcome.status
        # zero-padding monotonicity: SAT at smaller k implies SAT here, even
        # if this particular solve timed out; timeouts otherwise count UNSAT
        sat_seen = sat_seen or raw == SAT
        status = SAT if sat_seen else UNSAT
        stats = outcome.stats
        rows.append(
            (
                "sweep-k",
                f"g{idx:03d}",
                seed,
                graph.n,
                k,
                t,
                status,
                raw,
                round(stats.wall_seconds * 1000, 1),
                stats.decisions,
                stats.conflicts,
            )
        )
    return rows


def cmd_sweep_k(args) -> int:
    seed0 = _resolve_seed(args)
    k_grid = _parse_k_grid(args.k_grid) if args.k_grid else list(range(1, args.n + 1))
    cfg_kwargs = dict(
        n=args.n,
        k=args.gen_k,
        donor_probs=(args.donor_p,) * args.gen_k,
        patient_probs=(args.patient_p,) * args.gen_k,
        altruist_fraction=0.0,
    )
    max_conflicts, max_seconds = _budgets(args)
    jobs = [
        (i, seed0 + i, cfg_kwargs, args.t, k_grid, max_conflicts, max_seconds)
        for i in range(args.count)
    ]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            chunks = list(pool.map(_sweep_k_instance, jobs))
    else:
        chunks = [_sweep_k_instance(j) for j in jobs]
    rows = [row for chunk in chunks for row in chunk]
    rows.sort(key=lambda r: (r[1], r[4]))
    _write_csv(
        args.out,
        "sweep,instance,seed,n,k,t,status,raw_status,wall_ms,decisions,conflicts",
        rows,
    )
    return 0


# ---------------------------------------------------------------------------
# sweep-threshold


def _sweep_threshold_instance(job):
    import time

    n, idx, seed, cfg_kwargs, L, t_grid = job
    cfg = GeneratorConfig(n=n, seed=seed, **cfg_kwargs)
    rep0, graph0 = gen_attribute_pool(cfg)
    altruists = graph0.altruists
    pairs_total = graph0.n - len(altruists)
    rows = []
    for t in t_grid:
        start = time.perf_counter()
        rep_t = AttributeRepresentation(rep0.k, t, rep0.donor, rep0.patient)
        ts, alt_types = extract_type_space_with_altruists(rep_t, altruists)
        weights = tuple(0 if th in alt_types else 1 for th in range(ts.num_types))
        mv, _ = clear_by_types(
            ts, L, altruist_types=alt_types, type_weights=weights
        )
        matched = sum(
            m * sum(o for th, o in w.occurrences().items() if th not in alt_types)
            for w, m in mv.counts
        )
        # cross-check realizability on the chain-closed concrete graph
        graph_t = build_graph_from_attributes(rep_t).with_altruists(altruists)
        realize_cover(model_altruists(graph_t), ts, mv)
        wall_ms = round((time.perf_counter() - start) * 1000, 1)
        fraction = matched / pairs_total if pairs_total else 0.0
        rows.append(
            (
                "sweep-threshold",
                f"n{n}-i{idx:02d}",
                seed,
                n,
                rep0.k,
                t,
                L,
                matched,
                f"{fraction:.6f}",
                wall_ms,
            )
        )
    return rows


def cmd_sweep_threshold(args) -> int:
    seed0 = _resolve_seed(args)
    sizes = [int(x) for x in args.sizes.split(",")]
    t_max = args.t_max if args.t_max is not None else args.gen_k
    t_grid = list(range(0, t_max + 1))
    cfg_kwargs = dict(
        k=args.gen_k,
        donor_probs=(args.donor_p,) * args.gen_k,
        patient_probs=(args.patient_p,) * args.gen_k,
        altruist_fraction=args.altruist_fraction,
    )
    jobs = []
    for n in sizes:
        for i in range(args.count):
            jobs.append((n, i, seed0 + i, cfg_kwargs, args.L, t_grid))
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            chunks = list(pool.map(_sweep_threshold_instance, jobs))
    else:
        chunks = [_sweep_threshold_instance(j) for j in jobs]
    rows = [row for chunk in chunks for row in chunk]
    rows.sort(key=lambda r: (r[3], r[1], r[5]))
    _write_csv(
        args.out, "sweep,instance,seed,n,k,t,L,matched,fraction,wall_ms", rows
    )
    return 0


# ---------------------------------------------------------------------------
# clear


def _read_flip_costs(path) -> FlipCostMatrix:
    lines = [
        ln
        for ln in Path(path).read_text().splitlines()
        if ln.strip() and not ln.startswith("#")
    ]
    try:
        num = int(lines[0])
        rows = []
        for ln in lines[1 : 1 + num]:
            row = tuple(float(tok) for tok in ln.split())
            if len(row) != num:
                raise ValueError(f"expected {num} entries, got {len(row)}")
            rows.append(row)
        if len(rows) != num:
            raise ValueError(f"expected {num} rows, got {len(rows)}")
    except (ValueError, IndexError) as exc:
        raise ParseError(str(path), 1, f"bad flip-cost matrix: {exc}") from exc
    return FlipCostMatrix(tuple(rows))


def _is_attribute_file(path) -> bool:
    with open(path) as fh:
        first = fh.readline().split()
    return len(first) == 3


def cmd_clear(args) -> int:
    if _is_attribute_file(args.graph):
        rep = read_attributes(args.graph)
        graph = build_graph_from_attributes(rep)
        ts = extract_type_space(rep)
        closed = graph
        alt_types = frozenset()
    else:
        graph = _load_graph(args.graph)
        closed = model_altruists(graph)
        ts = extract_type_space(closed)
        alt_types = frozenset(ts.vertex_type[a] for a in closed.altruists)

    if args.flip_costs:
        cost = _read_flip_costs(args.flip_costs)
        result = flip_and_clear(ts, args.L, cost)
        plan = result.plan
        for (src, dst), count in plan.switches:
            print(f"flip {src} -> {dst}: {count}")
        print(f"cost: {plan.total_cost:g}")
        print(f"net: {plan.net_value:g}")
        return 0

    mv, value = clear_by_types(ts, args.L, altruist_types=alt_types)
    cover = realize_cover(closed, ts, mv)
    for cyc in cover.cycles:
        print("cycle: " + " ".join(str(v) for v in cyc))
    print(f"value: {value}")

    if args.oracle:
        if graph.n > 10:
            print("oracle skipped: n > 10", file=sys.stderr)
            return 0
        _, brute_value = max_cycle_cover_bruteforce(
            closed, args.L, altruist_cap=1 if closed.altruists else None
        )
        if brute_value != value:
            print(
                f"ORACLE MISMATCH: type clearing {value}, brute force {brute_value}",
                file=sys.stderr,
            )
            return _EXIT_ALARM
        print(f"oracle agrees: {brute_value}")
    return 0


# ---------------------------------------------------------------------------
# reduce


def cmd_reduce(args) -> int:
    formula = read_dimacs_3sat(args.formula)
    instance = reduce_3sat(formula)
    problem = instance.problem
    if args.out_prefix:
        write_edge_list(problem.graph, args.out_prefix + ".graph")
        pair_lines = [f"{i} {j}" for i, j in sorted(problem.constrained)]
        _atomic_write_text(args.out_prefix + ".pairs", "\n".join(pair_lines) + "\n")
    max_conflicts, max_seconds = _budgets(args)
    outcome = solve(problem, max_conflicts=max_conflicts, max_seconds=max_seconds)
    print(f"{outcome.status} k={problem.k} t={problem.t} n={problem.graph.n}")
    if outcome.status == SAT:
        assignment = decode_assignment(instance, outcome.rep)
        print(
            " ".join(
                f"x{i}={'true' if assignment[i] else 'false'}"
                for i in sorted(assignment)
            )
        )
        if args.out_prefix:
            write_attributes(outcome.rep, args.out_prefix + ".attrs")
    return _STATUS_EXIT[outcome.status]


# ---------------------------------------------------------------------------
# gen


def cmd_gen(args) -> int:
    seed = _resolve_seed(args)
    if args.kind == "pool":
        cfg = GeneratorConfig(
            n=args.n,
            k=args.gen_k,
            t=args.t,
            donor_probs=(args.donor_p,) * args.gen_k,
            patient_probs=(args.patient_p,) * args.gen_k,
            altruist_fraction=args.altruist_fraction,
            seed=seed,
        )
        rep, graph = gen_attribute_pool(cfg)
        write_attributes(rep, args.out + ".attrs")
        write_edge_list(graph, args.out + ".graph")
    elif args.kind == "blood":
        rep, graph = gen_blood_pool(args.n, seed=seed)
        write_attributes(rep, args.out + ".attrs")
        write_edge_list(graph, args.out + ".graph")
    elif args.kind == "theorem-family":
        graph = gen_theorem4_graph(args.n)
        write_edge_list(graph, args.out + ".graph")
    else:  # pragma: no cover - argparse restricts choices
        raise AssertionError(args.kind)
    print(f"wrote {args.out}.graph")
    return 0


# ---------------------------------------------------------------------------
# parser


def _add_budget_flags(p) -> None:
    p.add_argument("--budget-ms", type=float, default=None)
    p.add_argument("--budget-conflicts", type=int, default=None)


def _add_generator_flags(p, with_altruists: bool = True) -> None:
    p.add_argument("--gen-k", type=int, default=10, help="attribute width")
    p.add_argument("--donor-p", type=float, default=0.1)
    p.add_argument("--patient-p", type=float, default=0.2)
    if with_altruists:
        p.add_argument("--altruist-fraction", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="exchange-cli",
        description="Bit-vector representation and type-space clearing toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("represent", help="search for a (k,t) representation")
    p.add_argument("graph")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--t", type=int, default=0)
    p.add_argument("--out", default=None, help="attribute file to write on SAT")
    p.add_argument("--emit-dimacs", default=None)
    p.add_argument("--import-model", default=None)
    _add_budget_flags(p)
    p.set_defaults(func=cmd_represent)

    p = sub.add_parser("min-k", help="minimum representable width per graph")
    p.add_argument("graphs", nargs="+")
    p.add_argument("--t", type=int, default=0)
    p.add_argument("--out", default=None)
    _add_budget_flags(p)
    p.set_defaults(func=cmd_min_k)

    p = sub.add_parser("sweep-k", help="SAT/UNSAT sweep over k on random pools")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--count", type=int, default=30)
    p.add_argument("--t", type=int, default=0)
    p.add_argument("--k-grid", default=None, help="lo:hi or comma list")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default=None)
    _add_generator_flags(p, with_altruists=False)
    _add_budget_flags(p)
    p.set_defaults(func=cmd_sweep_k)

    p = sub.add_parser(
        "sweep-threshold", help="matched fraction vs threshold on random pools"
    )
    p.add_argument("--sizes", default="20,40,80")
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--t-max", type=int, default=None)
    p.add_argument("--L", type=int, default=3)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default=None)
    _add_generator_flags(p)
    p.set_defaults(func=cmd_sweep_threshold)

    p = sub.add_parser("clear", help="maximum cycle packing via the type space")
    p.add_argument("graph")
    p.add_argument("--L", type=int, default=3)
    p.add_argument("--oracle", action="store_true")
    p.add_argument("--flip-costs", default=None)
    p.set_defaults(func=cmd_clear)

    p = sub.add_parser("reduce", help="3SAT to representation-instance reduction")
    p.add_argument("formula")
    p.add_argument("--out-prefix", default=None)
    _add_budget_flags(p)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("gen", help="write generated instances to files")
    p.add_argument("--kind", choices=("pool", "blood", "theorem-family"), default="pool")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--t", type=int, default=0)
    p.add_argument("--out", required=True, help="output path prefix")
    _add_generator_flags(p)
    p.set_defaults(func=cmd_gen)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_PARSE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main(argv=None))
