"""Command-line harness.

Subcommands: ``run`` (repeated seeded experiments, optionally comparing
allocators), ``count`` (Pauli-counting tables), ``allocate-demo`` (print an
allocation plan), ``noise-sweep`` (repeat a run across noise levels), and
``dump-pool`` (list a pool's operators).  A JSON config file may supply any
``run`` option; command-line flags override file values.  Report paths write
figures next to their CSV/JSON output unless ``--no-plot`` is given.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import fields
from pathlib import Path

from .experiments import ExperimentConfig, run_experiment, run_method_comparison, run_noise_sweep
from .hamiltonian import bundled_path, load_hamiltonian
from .measurement import allocate, count_report
from .pools import POOL_KINDS, build_pool


def _resolve_hamiltonian(spec: str) -> str:
    path = Path(spec)
    if path.exists():
        return str(path)
    try:
        return str(bundled_path(spec))
    except FileNotFoundError as exc:
        raise SystemExit(f"error: {exc}") from exc


def _experiment_config(args) -> ExperimentConfig:
    values = {}
    if args.config:
        try:
            doc = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise SystemExit(f"error: cannot read config {args.config}: {exc}")
        known = {f.name for f in fields(ExperimentConfig)}
        for key, value in doc.items():
            if key not in known:
                raise SystemExit(f"error: {args.config}: unknown config field {key!r}")
            values[key] = value
    overrides = {
        "hamiltonian_path": args.hamiltonian and _resolve_hamiltonian(args.hamiltonian),
        "pool_kind": args.pool,
        "mode": args.mode,
        "allocation": args.allocation,
        "shot_budget": args.budget,
        "shots_per_clique": args.shots_per_clique,
        "probe_shots": args.probe_shots,
        "epsilon": args.epsilon,
        "max_iterations": args.iterations,
        "noise_p": args.noise_p,
        "repetitions": args.repetitions,
        "seed_base": args.seed,
        "output_dir": args.output,
        "workers": args.workers,
    }
    if getattr(args, "no_reuse", False):
        overrides["reuse"] = False
    if getattr(args, "eta_form", None):
        overrides["eta_form"] = args.eta_form
    for key, value in overrides.items():
        if value is not None:
            values[key] = value
    if "hamiltonian_path" not in values:
        raise SystemExit("error: a Hamiltonian (path or bundled name) is required")
    values["hamiltonian_path"] = _resolve_hamiltonian(values["hamiltonian_path"])
    if "noise_channels" in values:
        values["noise_channels"] = tuple(values["noise_channels"])
    try:
        config = ExperimentConfig(**values)
        config.validate()
    except (TypeError, ValueError, FileNotFoundError) as exc:
        raise SystemExit(f"error: invalid configuration: {exc}")
    return config


def _add_run_options(parser, default_output):
    parser.add_argument("hamiltonian", nargs="?",
                        help="Hamiltonian JSON path or bundled name (h2, h3, h4, lih_reduced)")
    parser.add_argument("--config", help="JSON config file; flags override its values")
    parser.add_argument("--pool", choices=POOL_KINDS)
    parser.add_argument("--mode", choices=("exact", "shots"))
    parser.add_argument("--allocation", choices=("uniform", "vmsa", "vpsr"))
    parser.add_argument("--compare-allocations", action="store_true",
                        help="run uniform, vmsa, and vpsr side by side")
    parser.add_argument("--budget", type=int, help="total shot budget per observable")
    parser.add_argument("--shots-per-clique", type=int, dest="shots_per_clique")
    parser.add_argument("--probe-shots", type=int, dest="probe_shots")
    parser.add_argument("--epsilon", type=float)
    parser.add_argument("--iterations", type=int)
    parser.add_argument("--noise-p", type=float, dest="noise_p")
    parser.add_argument("--repetitions", "-R", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--no-reuse", action="store_true")
    parser.add_argument("--eta-form", choices=("corrected", "printed"), dest="eta_form")
    parser.add_argument("--workers", type=int)
    parser.add_argument("--output", "-o", default=None)
    parser.add_argument("--no-plot", action="store_true")
    parser.set_defaults(default_output=default_output)


def cmd_run(args) -> int:
    if args.output is None:
        args.output = args.default_output
    config = _experiment_config(args)
    plot = not args.no_plot
    if args.compare_allocations:
        comparison = run_method_comparison(config, plot=plot)
        print(json.dumps(comparison["shots_to_accuracy"], indent=1))
        if "reduction_vs_uniform" in comparison:
            print("reduction vs uniform:",
                  {m: None if v is None else f"{100*v:.2f}%"
                   for m, v in comparison["reduction_vs_uniform"].items()})
    else:
        summary = run_experiment(config, plot=plot)
        print(f"crossing iteration: {summary['crossing_iteration']}")
        print(f"shots to accuracy:  {summary['shots_to_accuracy']}")
        print(f"final |mean E - FCI|: {summary['final_err_of_mean']:.3e} Ha")
    print(f"artifacts in {config.output_dir}")
    return 0


def cmd_count(args) -> int:
    names = args.hamiltonians or ["h2", "h3", "h4", "lih_reduced"]
    pools = list(POOL_KINDS) if args.pools is None else args.pools
    paths = []
    for name in names:
        if Path(name).is_dir():
            found = sorted(Path(name).glob("*.json"))
            if not found:
                raise SystemExit(f"error: no *.json Hamiltonians in {name}")
            paths.extend(str(p) for p in found)
        else:
            paths.append(_resolve_hamiltonian(name))
    reports = []
    for path in paths:
        ham = load_hamiltonian(path)
        for kind in pools:
            pool = build_pool(kind, ham.n_electrons, ham.n_qubits)
            reports.append(count_report(ham, pool, kind))
    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / "counts.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["molecule", "n_qubits", "h_terms", "pool", "full", "grouped",
                         "reused", "grouped_pct_of_naive", "reused_pct_of_naive"])
        for r in reports:
            writer.writerow([r.molecule, r.n_qubits, r.h_terms, r.pool_kind, r.full,
                             r.grouped, r.reused,
                             f"{100*r.grouped_fraction:.2f}", f"{100*r.reused_fraction:.2f}"])
    for r in reports:
        print(f"{r.molecule:12s} {r.pool_kind:17s} full={r.full:7d} grouped={r.grouped:6d} "
              f"reused={r.reused:7d}  ({100*r.reused_fraction:5.2f}% of naive)")
    if reports:
        avg_g = sum(r.grouped_fraction for r in reports) / len(reports)
        avg_r = sum(r.reused_fraction for r in reports) / len(reports)
        print(f"average usage: grouping {100*avg_g:.2f}%  grouping+reuse {100*avg_r:.2f}%")
    if not args.no_plot and reports:
        from . import plots

        plots.render_counts(outdir, reports)
    print(f"wrote {path}")
    return 0


def cmd_allocate_demo(args) -> int:
    sigmas = [float(s) for s in args.sigmas.split(",") if s]
    plan = allocate(args.method, args.budget, args.probe_shots, sigmas,
                    eta_form=args.eta_form)
    print(f"method={plan.method} budget={plan.total_budget} probe={plan.probe_shots}")
    if plan.eta is not None:
        print(f"eta={plan.eta:.6f}")
    for i, (sigma, shots) in enumerate(zip(sigmas, plan.shots_per_clique)):
        print(f"  clique {i}: sigma={sigma:g} -> {shots} shots")
    print(f"total assigned: {plan.total_assigned}")
    return 0


def cmd_noise_sweep(args) -> int:
    if args.output is None:
        args.output = args.default_output
    config = _experiment_config(args)
    p_values = [float(p) for p in args.p_list.split(",") if p]
    doc = run_noise_sweep(config, p_values, plot=not args.no_plot)
    for key, entry in doc["noise_levels"].items():
        flag = "reaches" if entry["reaches_chemical_accuracy"] else "misses"
        print(f"p={key}: {flag} chemical accuracy "
              f"(final err of mean {entry['summary']['final_err_of_mean']:.3e} Ha)")
    print(f"artifacts in {config.output_dir}")
    return 0


def cmd_dump_pool(args) -> int:
    ham = load_hamiltonian(_resolve_hamiltonian(args.hamiltonian))
    pool = build_pool(args.pool, ham.n_electrons, ham.n_qubits)
    for i, op in enumerate(pool):
        print(f"[{i:3d}] {op.kind:17s} {op.label}")
        for j, gen in enumerate(op.generators):
            prefix = f"      theta_{j}: " if op.n_parameters > 1 else "      "
            body = str(gen).replace("\n", "; ")
            print(f"{prefix}{body}")
    print(f"{len(pool)} operators")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="adaptshot",
        description="Shot-frugal adaptive VQE simulator: measurement reuse and "
                    "variance-based shot allocation over QWC cliques.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run repeated seeded experiments")
    _add_run_options(p_run, "runs/run")
    p_run.set_defaults(func=cmd_run)

    p_count = sub.add_parser("count", help="emit full/grouped/reused counting tables")
    p_count.add_argument("hamiltonians", nargs="*",
                         help="bundled names or paths (default: h2 h3 h4 lih_reduced)")
    p_count.add_argument("--pools", nargs="*", choices=POOL_KINDS)
    p_count.add_argument("--output", "-o", default="runs/counts")
    p_count.add_argument("--no-plot", action="store_true")
    p_count.set_defaults(func=cmd_count)

    p_alloc = sub.add_parser("allocate-demo", help="print an allocation plan")
    p_alloc.add_argument("method", choices=("uniform", "vmsa", "vpsr"))
    p_alloc.add_argument("budget", type=int)
    p_alloc.add_argument("probe_shots", type=int)
    p_alloc.add_argument("sigmas", help="comma-separated probe standard deviations")
    p_alloc.add_argument("--eta-form", choices=("corrected", "printed"),
                         default="corrected", dest="eta_form")
    p_alloc.set_defaults(func=cmd_allocate_demo)

    p_noise = sub.add_parser("noise-sweep", help="run across noise levels")
    _add_run_options(p_noise, "runs/noise")
    p_noise.add_argument("--p-list", default="1e-5,1e-4,1e-3", dest="p_list")
    p_noise.set_defaults(func=cmd_noise_sweep)

    p_dump = sub.add_parser("dump-pool", help="list a pool's operators")
    p_dump.add_argument("hamiltonian")
    p_dump.add_argument("--pool", choices=POOL_KINDS, default="qubit_excitation")
    p_dump.set_defaults(func=cmd_dump_pool)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
