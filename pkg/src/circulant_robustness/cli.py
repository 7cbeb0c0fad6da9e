"""Command-line front end.

Subcommands: generate, check, bounds, simulate, reproduce-paper.
Exit codes: 0 success, 1 internal failure, 2 invalid input or a failed
expectation. Agent labels on the terminal are 1-indexed; files and the
library use 0-indexed ids.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import __version__
from .adversary import AdversarySpec, format_signal, parse_signal, validate_adversary_placement
from .bounds import k_circulant_r_bound, k_circulant_rs_bound
from .config import ConfigError, ExperimentConfig, load_config
from .connectivity import build_connectivity_counterexample, underlying_vertex_connectivity
from .graph import (
    CirculantSpec,
    Digraph,
    GraphFormatError,
    k_circulant_order,
    make_circulant,
    make_k_circulant,
    parse_edge_list,
    serialize_edge_list,
    to_dot,
)
from .robustness import (
    MAX_N,
    EnumerationBudgetError,
    Strategy,
    is_rs_robust,
    max_r_robustness,
)
from .simulation import (
    PlacementError,
    simulate,
    write_plot_csv,
    write_sends_csv,
    write_trajectory_csv,
)
from .wmsr import WeightScheme

EXIT_OK, EXIT_INTERNAL, EXIT_INPUT = 0, 1, 2

BUILTINS = ("fig3-counterexample", "d1", "d2")
LABEL_NOTE = "agent labels are 1-indexed (label = library id + 1)"

# Fixed seed for reproduce-paper; any seed gives the same qualitative outcome.
REPRODUCTION_SEED = 2018


class UsageError(Exception):
    """Bad input; reported with exit code 2."""


def _labels(nodes) -> str:
    return "{" + ", ".join(str(v + 1) for v in sorted(nodes)) + "}"


def _builtin(name: str) -> Digraph:
    if name == "fig3-counterexample":
        return build_connectivity_counterexample()
    if name == "d1":
        return make_k_circulant(15, 6)
    if name == "d2":
        return make_k_circulant(15, 9)
    raise UsageError(f"unknown builtin {name!r}; choose from {', '.join(BUILTINS)}")


def _parse_offsets(text: str) -> list[int]:
    try:
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise UsageError(f"offsets {text!r} must be comma-separated integers") from None


def _graph_from(n=None, k=None, offsets=None, path=None, builtin=None) -> Digraph:
    chosen = [x is not None for x in (path, builtin, n)]
    if sum(chosen) != 1:
        raise UsageError("give exactly one of: an edge-list path, --builtin, or --n with --k/--offsets")
    try:
        if path is not None:
            p = Path(path)
            if not p.is_file():
                raise UsageError(f"graph file {p} does not exist")
            return parse_edge_list(p.read_text())
        if builtin is not None:
            return _builtin(builtin)
        if (k is None) == (offsets is None):
            raise UsageError("--n needs exactly one of --k or --offsets")
        if k is not None:
            return make_k_circulant(n, k)
        if isinstance(offsets, str):
            offsets = _parse_offsets(offsets)
        return make_circulant(CirculantSpec(n, tuple(offsets)))
    except (GraphFormatError, ValueError) as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(str(exc)) from None


def _emit(args, rows: list[tuple[str, object]]) -> None:
    if args.format == "csv":
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(("key", "value"))
        writer.writerows(rows)
    else:
        width = max(len(k) for k, _ in rows)
        for key, value in rows:
            print(f"{key:<{width}}  {value}")


# ---------------------------------------------------------------------------
# generate
# ---------------------------------------------------------------------------


def cmd_generate(args) -> int:
    g = _graph_from(n=args.n, k=args.k, offsets=args.offsets)
    text = serialize_edge_list(g)
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        out = Path(args.output)
        if args.output_dir:
            out = Path(args.output_dir) / out
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
        print(f"wrote {out} ({g.n} nodes, {len(g.edges)} edges)", file=sys.stderr)
    if args.dot:
        Path(args.dot).write_text(to_dot(g))
    return EXIT_OK


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------


def cmd_check(args) -> int:
    g = _graph_from(n=args.n, k=args.k, offsets=args.offsets, path=args.graph, builtin=args.builtin)
    strategy = Strategy(args.strategy)
    rows: list[tuple[str, object]] = [("nodes", g.n), ("edges", len(g.edges))]
    ok = True
    k = k_circulant_order(g)
    r_bound = None
    if k is not None:
        r_bound = k_circulant_r_bound(g.n, k)
        rows += [("k_circulant_k", k), ("r_bound", r_bound), ("rs_bound", k_circulant_rs_bound(k))]
    elif args.bound_only:
        rows.append(("r_bound", "none (not a k-circulant digraph)"))

    if not args.bound_only:
        try:
            report = max_r_robustness(g, strategy, args.threads)
        except EnumerationBudgetError as exc:
            print(f"refusing exact check: {exc}; pass --bound-only for closed forms", file=sys.stderr)
            return EXIT_INPUT
        rows += [("strategy", strategy.value), ("max_r", report.max_r)]
        if report.witness is not None:
            w = report.witness
            rows.append((f"witness_not_{report.failing_r}_robust", f"{_labels(w.s1)} | {_labels(w.s2)}"))
        rows.append(("f_local_tolerance", max(0, (report.max_r - 1) // 2)))
        if r_bound is not None:
            holds = report.max_r >= r_bound
            rows.append(("bound_le_exact", holds))
            ok &= holds
        if args.expect_r is not None:
            rows.append(("expect_r", f"{args.expect_r} ({'ok' if report.max_r == args.expect_r else 'MISMATCH'})"))
            ok &= report.max_r == args.expect_r
        for r, s in args.rs or []:
            try:
                rs = is_rs_robust(g, r, s, args.threads)
            except EnumerationBudgetError as exc:
                print(f"refusing (r,s) check: {exc}", file=sys.stderr)
                return EXIT_INPUT
            except ValueError as exc:
                raise UsageError(str(exc)) from None
            value = "holds" if rs.holds else "fails"
            if not rs.holds:
                w = rs.witness
                value += f" {_labels(w.s1)} | {_labels(w.s2)} |X1|={rs.x1_size} |X2|={rs.x2_size}"
            rows.append((f"rs_{r}_{s}", value))
            ok &= rs.holds
    if args.connectivity:
        try:
            rows.append(("underlying_vertex_connectivity", underlying_vertex_connectivity(g)))
        except ValueError as exc:
            print(f"refusing connectivity check: {exc}", file=sys.stderr)
            return EXIT_INPUT
    if args.format == "human":
        print(f"# {LABEL_NOTE}")
    _emit(args, rows)
    return EXIT_OK if ok else EXIT_INPUT


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------


def _parse_range(text: str) -> range:
    try:
        if "-" in text:
            lo, hi = text.split("-", 1)
            return range(int(lo), int(hi) + 1)
        return range(int(text), int(text) + 1)
    except ValueError:
        raise UsageError(f"range {text!r} must look like 7 or 4-14") from None


def bounds_rows(n_range, k_range=None, verify=False, rs_max_n=12, workers=None):
    header = ["n", "k", "r_bound", "rs_bound", "exact_max_r", "exact_rs_tt"]
    rows = []
    for n in n_range:
        if n < 2:
            continue
        ks = [k for k in (k_range or range(1, n)) if 1 <= k <= n - 1]
        for k in ks:
            t = k_circulant_rs_bound(k)
            row = [n, k, k_circulant_r_bound(n, k), t, "", ""]
            if verify:
                g = make_k_circulant(n, k)
                if n <= MAX_N[Strategy.PEELING]:
                    row[4] = max_r_robustness(g, Strategy.PEELING, workers).max_r
                else:
                    row[4] = "skipped"
                if n <= min(rs_max_n, MAX_N[Strategy.FULL_PAIRS]):
                    row[5] = "holds" if is_rs_robust(g, t, t, workers).holds else "fails"
                else:
                    row[5] = "skipped"
            rows.append(row)
    return header, rows


def cmd_bounds(args) -> int:
    n_range = _parse_range(args.n)
    k_range = _parse_range(args.k) if args.k else None
    header, rows = bounds_rows(n_range, k_range, args.verify, args.rs_max_n, args.threads)
    out = open(args.output, "w", newline="") if args.output else sys.stdout
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    finally:
        if out is not sys.stdout:
            out.close()
    violated = [r for r in rows if isinstance(r[4], int) and r[4] < r[2]]
    for r in violated:
        print(f"bound exceeds exact value at n={r[0]}, k={r[1]}", file=sys.stderr)
    return EXIT_INPUT if violated else EXIT_OK


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------


def _resolve_config(args) -> ExperimentConfig:
    base = load_config(args.config) if args.config else ExperimentConfig()
    overrides = {
        "n": args.n,
        "k": args.k,
        "offsets": args.offsets,
        "graph": args.graph,
        "builtin": args.builtin,
        "adversaries": args.adversaries,
        "index_base": 0 if args.zero_based else None,
        "model": args.model,
        "scope": args.scope,
        "f": args.f,
        "signal": args.signal,
        "f_filter": args.f_filter,
        "alpha": args.alpha,
        "horizon": args.horizon,
        "tol": args.tol,
        "seed": args.seed,
        "init_low": args.init_low,
        "init_high": args.init_high,
        "trajectory": args.trajectory,
        "expect_consensus": True if args.expect_consensus else None,
    }
    return base.merged(overrides)


def _run_simulation(cfg: ExperimentConfig, g: Digraph):
    try:
        members = cfg.adversary_ids()
        signal = parse_signal(cfg.signal, cfg.seed)
        spec = AdversarySpec(frozenset(members), cfg.effective_f(), cfg.model, cfg.scope, signal)
        max_in = max(g.in_degree(v) for v in range(g.n))
        scheme = WeightScheme(cfg.alpha) if cfg.alpha is not None else WeightScheme.for_in_degree(max_in)
    except (ConfigError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    check = validate_adversary_placement(g, spec) if all(0 <= m < g.n for m in members) else None
    if check is None:
        raise UsageError(f"adversary labels {_labels(members)} outside the {g.n}-node graph")
    if not check:
        raise PlacementError(check.message, check.violations)
    result = simulate(
        g,
        spec,
        scheme,
        f_filter=cfg.f_filter,
        horizon=cfg.horizon,
        tol=cfg.tol,
        seed=cfg.seed,
        init_range=(cfg.init_low, cfg.init_high),
    )
    return spec, scheme, result


def _metadata(cfg: ExperimentConfig, spec: AdversarySpec, scheme: WeightScheme, g: Digraph) -> dict:
    meta = {k: v for k, v in vars(cfg).items()}
    meta.update(
        signal=format_signal(spec.signal),
        alpha=scheme.alpha,
        weight_rule=scheme.rule,
        weight_note="uniform weights over retained values plus self",
        adversary_ids=sorted(spec.members),
        graph_nodes=g.n,
        graph_edges=len(g.edges),
        version=__version__,
    )
    return meta


def _summary_rows(result, spec) -> list[tuple[str, object]]:
    lo, hi = result.safety_interval
    value = result.consensus_value
    return [
        ("adversaries", _labels(spec.members) + f" ({spec.model}, {spec.scope}, F={spec.f})"),
        ("converged", result.converged),
        ("converged_at", result.converged_at if result.converged else "n/a"),
        ("consensus_value", f"{value:.17g}" if value is not None else "n/a"),
        ("spread_at_horizon", f"{result.spread_series[-1]:.6g}"),
        ("safety_interval", f"[{lo:.17g}, {hi:.17g}]"),
        ("safe", result.safe),
    ]


def _placement_failure(exc: PlacementError) -> int:
    print(f"invalid adversary placement: {exc}", file=sys.stderr)
    for v, count in sorted(exc.violations.items()):
        print(f"  agent {v + 1} [id {v}]: {count} adversarial in-neighbors", file=sys.stderr)
    return EXIT_INPUT


def cmd_simulate(args) -> int:
    try:
        cfg = _resolve_config(args)
    except ConfigError as exc:
        raise UsageError(str(exc)) from None
    g = _graph_from(n=cfg.n, k=cfg.k, offsets=cfg.offsets, path=cfg.graph, builtin=cfg.builtin)
    try:
        spec, scheme, result = _run_simulation(cfg, g)
    except PlacementError as exc:
        return _placement_failure(exc)

    out_dir = Path(args.output_dir or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    traj = Path(cfg.trajectory) if cfg.trajectory else out_dir / "trajectory.csv"
    traj.parent.mkdir(parents=True, exist_ok=True)
    write_trajectory_csv(result, traj)
    if spec.model == "byzantine":
        write_sends_csv(result, traj.with_name(traj.stem + "_sends.csv"))
    meta_path = traj.with_name(traj.stem + "_metadata.json")
    meta_path.write_text(json.dumps(_metadata(cfg, spec, scheme, g), indent=2, sort_keys=True) + "\n")

    if args.format == "human":
        print(f"# {LABEL_NOTE}")
    _emit(args, _summary_rows(result, spec) + [("trajectory_csv", str(traj)), ("seed", cfg.seed)])
    if cfg.expect_consensus and not (result.converged and result.safe):
        return EXIT_INPUT
    return EXIT_OK


# ---------------------------------------------------------------------------
# reproduce-paper
# ---------------------------------------------------------------------------

_SCENARIOS = (
    # name, k, adversary labels (1-indexed), F, guaranteed r-robustness
    ("d1", 6, (1, 7), 1, 3),
    ("d2", 9, (1, 7, 13), 2, 5),
)


def reproduce(out_dir: Path, seed: int, workers: int | None = None, with_rs: bool = False):
    """Run every reproduction step; return (summary lines, failed expectations)."""
    out_dir.mkdir(parents=True, exist_ok=True)
    lines = [f"# {LABEL_NOTE}", f"seed {seed}"]
    failures: list[str] = []
    table = [("graph", "n", "k", "r_bound", "exact_max_r", "f_local_tolerance", "rs_bound", "rs_verdict")]
    meta: dict[str, object] = {"seed": seed, "version": __version__, "scenarios": {}}

    def expect(label: str, ok: bool, expected: object, observed: object) -> None:
        status = "ok" if ok else "FAILED"
        lines.append(f"{label}: expected {expected}, observed {observed} [{status}]")
        if not ok:
            failures.append(f"{label}: expected {expected}, observed {observed}")

    for name, k, labels, f, guaranteed in _SCENARIOS:
        g = make_k_circulant(15, k)
        (out_dir / f"{name}_graph.txt").write_text(serialize_edge_list(g))
        report = max_r_robustness(g, Strategy.PEELING, workers)
        tolerance = max(0, (report.max_r - 1) // 2)
        expect(f"{name} C15(1..{k}) r-robustness", report.max_r >= guaranteed, f">= {guaranteed}", report.max_r)
        expect(f"{name} F-local tolerance", tolerance >= f, f">= {f}", tolerance)
        t = k_circulant_rs_bound(k)
        rs_verdict = "not run"
        if with_rs:
            rs = is_rs_robust(g, t, t, workers)
            rs_verdict = "holds" if rs.holds else "fails"
            expect(f"{name} ({t},{t})-robustness", rs.holds, "holds", rs_verdict)
        table.append((name, 15, k, k_circulant_r_bound(15, k), report.max_r, tolerance, t, rs_verdict))

        cfg = ExperimentConfig(
            k=k, n=15, adversaries=",".join(map(str, labels)), f=f, f_filter=f, seed=seed
        )
        spec, scheme, result = _run_simulation(cfg, g)
        write_trajectory_csv(result, out_dir / f"{name}_trajectory.csv")
        write_plot_csv(result, out_dir / f"{name}_plot.csv")
        meta["scenarios"][name] = _metadata(cfg, spec, scheme, g)
        lo, hi = result.safety_interval
        expect(f"{name} simulation converged", result.converged, f"spread <= {cfg.tol:g}", f"{result.spread_series[-1]:.3g}")
        value = result.consensus_value
        inside = value is not None and lo <= value <= hi
        expect(f"{name} consensus in normal initial hull", inside, f"[{lo:.6g}, {hi:.6g}]", value)

    g3 = build_connectivity_counterexample()
    (out_dir / "fig3_counterexample.txt").write_text(serialize_edge_list(g3))
    kappa = underlying_vertex_connectivity(g3)
    r3 = max_r_robustness(g3, Strategy.FULL_PAIRS, workers).max_r
    expect("counterexample underlying vertex connectivity", kappa == 4, 4, kappa)
    expect("counterexample max r-robustness", r3 == 1, 1, r3)
    table.append(("fig3-counterexample", g3.n, "", "", r3, max(0, (r3 - 1) // 2), "", ""))

    with open(out_dir / "robustness.csv", "w", newline="") as fh:
        csv.writer(fh, lineterminator="\n").writerows(table)
    (out_dir / "metadata.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    (out_dir / "summary.txt").write_text("\n".join(lines) + "\n")
    return lines, failures


def cmd_reproduce_paper(args) -> int:
    seed = REPRODUCTION_SEED if args.seed is None else args.seed
    out_dir = Path(args.output_dir or "reproduction")
    lines, failures = reproduce(out_dir, seed, args.threads, args.rs)
    print("\n".join(lines))
    print(f"artifacts written to {out_dir}")
    if failures:
        print("expectation failures:", file=sys.stderr)
        for f in failures:
            print(f"  - {f}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="RNG seed (echoed in every output)")
    common.add_argument("--threads", type=_positive_int, default=None,
                        help="worker threads for enumeration (default: $CIRCROBUST_THREADS or 1)")
    common.add_argument("--output-dir", default=None, help="directory for written artifacts")
    common.add_argument("--format", choices=("human", "csv"), default="human")

    graph_args = argparse.ArgumentParser(add_help=False)
    graph_args.add_argument("--n", type=int, help="node count of a circulant graph")
    group = graph_args.add_mutually_exclusive_group()
    group.add_argument("--k", type=int, help="k of C_n(1..k)")
    group.add_argument("--offsets", help="comma-separated circulant offsets, e.g. 1,2,3")

    parser = argparse.ArgumentParser(prog="circrobust", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", parents=[common, graph_args], help="write a circulant digraph edge list")
    p.add_argument("-o", "--output", help="edge-list path (default: stdout)")
    p.add_argument("--dot", help="also write a DOT file here")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("check", parents=[common, graph_args], help="exact robustness of a graph")
    p.add_argument("graph", nargs="?", help="edge-list file")
    p.add_argument("--builtin", choices=BUILTINS)
    p.add_argument("--strategy", choices=[s.value for s in Strategy], default=Strategy.PEELING.value)
    p.add_argument("--rs", nargs=2, type=int, action="append", metavar=("R", "S"),
                   help="also check (R,S)-robustness; repeatable")
    p.add_argument("--connectivity", action="store_true", help="report underlying vertex connectivity")
    p.add_argument("--bound-only", action="store_true", help="closed-form bounds only, no enumeration")
    p.add_argument("--expect-r", type=int, help="fail unless the exact max r equals this")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("bounds", parents=[common], help="closed-form bound table as CSV")
    p.add_argument("--n", required=True, help="node count or range, e.g. 15 or 4-14")
    p.add_argument("--k", help="k or range (default 1..n-1)")
    p.add_argument("--verify", action="store_true", help="append exact columns where within budget")
    p.add_argument("--rs-max-n", type=int, default=12, help="largest n for exact (t,t) checks")
    p.add_argument("-o", "--output", help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("simulate", parents=[common, graph_args], help="run a W-MSR simulation")
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--graph", help="edge-list file")
    p.add_argument("--builtin", choices=BUILTINS)
    p.add_argument("--adversaries", help="comma-separated agent labels (1-indexed unless --zero-based)")
    p.add_argument("--zero-based", action="store_true", help="adversary labels are 0-indexed ids")
    p.add_argument("--model", choices=("malicious", "byzantine"))
    p.add_argument("--scope", choices=("f_local", "f_total"))
    p.add_argument("--f", type=int, help="adversary bound F for the scope check (default: --f-filter)")
    p.add_argument("--signal", help="adversary signal, e.g. sinusoid:50:20, constant:10, per-edge")
    p.add_argument("--f-filter", type=int, help="W-MSR trimming parameter")
    p.add_argument("--alpha", type=float, help="weight lower bound (default 1/(2k))")
    p.add_argument("--horizon", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--init-low", type=float)
    p.add_argument("--init-high", type=float)
    p.add_argument("--trajectory", help="trajectory CSV path (default: <output-dir>/trajectory.csv)")
    p.add_argument("--expect-consensus", action="store_true",
                   help="exit 2 unless normal agents converge inside the safety interval")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("reproduce-paper", parents=[common],
                       help="rerun the n=15 experiments and the connectivity counterexample")
    p.add_argument("--rs", action="store_true", help="also run the full-pair (t,t) checks (~10 s)")
    p.set_defaults(func=cmd_reproduce_paper)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def entry() -> None:
    sys.exit(main())
