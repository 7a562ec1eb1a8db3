"""Command-line interface.

Subcommands:
    sweep         run a frequency sweep, detect peaks, compare to the oracle
    oracle        direct diagonalization: transition table to CSV
    predict       closed-form predicted sweep, no time evolution
    refine        plan (and optionally execute) zoom jobs for missing peaks
    verify        run the built-in invariant suite, exit 0 iff all pass
    trotter-bench error vs slice count plus interaction-circuit gate counts

Every config key can be overridden by a same-named flag; flags win. Output
files land in the configured output directory, written atomically; figures
are rendered next to the delimited data unless plotting is disabled.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import analytic, evolution, fileio, oracle as oracle_mod, spectroscopy
from .fileio import RunConfig

__all__ = ["build_parser", "main"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="probespec",
        description="Probe-qubit energy spectroscopy simulator and analysis toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="path to a key = value config file")
        p.add_argument("--omega-min", type=float, dest="omega_min")
        p.add_argument("--omega-max", type=float, dest="omega_max")
        p.add_argument("--intervals", type=int)
        p.add_argument("--c", type=float, dest="c")
        p.add_argument("--tau", type=float)
        p.add_argument("--alpha", type=float)
        p.add_argument("--method", choices=["exact", "trotter", "circuit"])
        p.add_argument("--trotter-slices", type=int, dest="trotter_slices")
        p.add_argument("--measurement", choices=["exact", "shots"])
        p.add_argument("--shots", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--threshold", type=float,
                       help="peak threshold as a fraction of the sweep maximum")
        p.add_argument("--out-dir", dest="out_dir")
        p.add_argument("--system", choices=["random", "dense", "pauli"])
        p.add_argument("--system-file", dest="system_file")
        p.add_argument("--random-n", type=int, dest="random_n")
        p.add_argument("--random-seed", type=int, dest="random_seed")
        p.add_argument("--no-plot", action="store_true", help="skip figure rendering")

    p_sweep = sub.add_parser("sweep", help="run a frequency sweep and analyse it")
    add_common(p_sweep)

    p_oracle = sub.add_parser("oracle", help="exact spectrum and transition table")
    add_common(p_oracle)

    p_predict = sub.add_parser("predict", help="closed-form predicted sweep")
    add_common(p_predict)

    p_refine = sub.add_parser("refine", help="plan zoom jobs for missing peaks")
    add_common(p_refine)
    p_refine.add_argument("sweep_csv", help="baseline sweep CSV to refine")
    p_refine.add_argument("--expected", type=int, default=None,
                          help="expected transition count (default: oracle dimension)")
    p_refine.add_argument("--execute", action="store_true", help="run the planned jobs")

    p_verify = sub.add_parser("verify", help="run the built-in invariant suite")
    add_common(p_verify)

    p_bench = sub.add_parser("trotter-bench", help="convergence and gate-count tables")
    add_common(p_bench)

    return parser


def _load_config(args: argparse.Namespace) -> RunConfig:
    if args.config:
        config = fileio.parse_config(Path(args.config).read_text(encoding="utf-8"))
    else:
        config = RunConfig()
    for key in ("omega_min", "omega_max", "intervals", "c", "tau", "alpha", "method",
                "trotter_slices", "measurement", "shots", "seed", "threshold", "out_dir",
                "system", "system_file", "random_n", "random_seed"):
        value = getattr(args, key, None)
        if value is not None:
            setattr(config, key, value)
    if getattr(args, "no_plot", False):
        config.plot = False
    config.validate()
    return config


def _sweep_pieces(config: RunConfig):
    sys_h = config.load_system()
    grid = spectroscopy.make_grid(config.omega_min, config.omega_max, config.intervals)
    method = evolution.method_from_name(config.method, config.trotter_slices)
    if config.measurement == "shots":
        measurement = spectroscopy.ShotSampling(count=config.shots, seed=config.seed)
    else:
        measurement = spectroscopy.ExactMarginal()
    sweep_config = spectroscopy.SweepConfig(
        c=config.c, tau=config.tau, alpha=config.alpha, method=method, measurement=measurement
    )
    return sys_h, grid, sweep_config


def _print_diagnostics(config: RunConfig, table: analytic.TransitionTable) -> None:
    print(f"coupling-time product c*tau = {config.c * config.tau:g}")
    min_freq = min(row.transition_frequency for row in table.rows)
    if config.c >= 0.01 * min_freq:
        print(
            f"advisory: coupling c = {config.c:g} is not small against the lowest "
            f"transition frequency {min_freq:g}; lineshapes may overlap"
        )


def _absolute_threshold(decay: np.ndarray, fraction: float) -> float:
    top = float(np.max(decay)) if decay.size else 0.0
    if top <= 0.0:
        return 0.5
    return min(max(fraction * top, 1e-12), 1.0 - 1e-12)


def _cmd_sweep(args: argparse.Namespace) -> int:
    config = _load_config(args)
    sys_h, grid, sweep_config = _sweep_pieces(config)
    table = analytic.transition_table(sys_h, config.c, config.alpha)
    _print_diagnostics(config, table)

    result = spectroscopy.run_sweep(sys_h, grid, sweep_config)
    peaks = spectroscopy.detect_peaks(result, _absolute_threshold(result.decay, config.threshold))
    spectrum = oracle_mod.diagonalize_system(sys_h, config.alpha)
    report = oracle_mod.compare_spectrum(peaks, spectrum, tol=grid.delta)
    explanations = oracle_mod.explain_misses(
        report, spectrum, config.c, config.tau, grid.delta,
        _absolute_threshold(result.decay, config.threshold),
    )

    out = Path(config.out_dir)
    fileio.write_text_atomic(out / "sweep.csv", fileio.sweep_csv(result))
    fileio.write_text_atomic(out / "peaks.json", fileio.peaks_json(peaks))
    fileio.write_text_atomic(
        out / "comparison.json", fileio.comparison_json(report, spectrum, explanations)
    )
    if config.plot:
        from . import plotting

        plotting.render_sweep_figure(result, peaks, spectrum, out / "sweep.png")

    print(f"swept {grid.m} frequencies in [{grid.omega_min:g}, {grid.omega_max:g}]")
    print(f"detected {len(peaks)} peak(s); matched {len(report.matched)} of "
          f"{spectrum.dim} transitions (max |error| {report.max_abs_error:.2e})")
    for m in report.matched:
        print(f"  matched  j={m.oracle_index:<3d} omega={m.peak.omega_peak:.6f} "
              f"height={m.peak.height:.4f} error={m.abs_error:.2e}")
    for e in explanations:
        print(f"  missing  j={e.oracle_index:<3d} omega={e.transition_frequency:.6f} "
              f"causes: {', '.join(e.causes)}")
    for p in report.spurious:
        print(f"  spurious omega={p.omega_peak:.6f} height={p.height:.4f}")
    print(f"wrote sweep.csv, peaks.json, comparison.json"
          + (", sweep.png" if config.plot else "") + f" in {out}")
    return 0


def _cmd_oracle(args: argparse.Namespace) -> int:
    config = _load_config(args)
    sys_h = config.load_system()
    table = analytic.transition_table(sys_h, config.c, config.alpha)
    _print_diagnostics(config, table)
    out = Path(config.out_dir)
    fileio.write_text_atomic(out / "transitions.csv", fileio.transitions_csv(table))
    print(f"{'j':>3} {'energy':>14} {'|sum_d|':>10} {'strength':>12} {'frequency':>12}")
    for row in table.rows:
        print(f"{row.index:>3} {row.energy:>14.6f} {abs(row.sum_d):>10.4f} "
              f"{row.strength:>12.6e} {row.transition_frequency:>12.6f}")
    print(f"wrote transitions.csv in {out}")
    return 0


def _cmd_predict(args: argparse.Namespace) -> int:
    config = _load_config(args)
    sys_h = config.load_system()
    grid = spectroscopy.make_grid(config.omega_min, config.omega_max, config.intervals)
    table = analytic.transition_table(sys_h, config.c, config.alpha)
    _print_diagnostics(config, table)
    predicted = analytic.predicted_sweep(table, grid, config.tau)
    lines = ["omega,p_predicted"]
    for k, omega in enumerate(grid.centers):
        lines.append(f"{float(omega)!r},{float(predicted.values[k])!r}")
    out = Path(config.out_dir)
    fileio.write_text_atomic(out / "predicted.csv", "\n".join(lines) + "\n")
    if config.plot:
        from . import plotting

        plotting.render_predicted_figure(grid, predicted, out / "predicted.png")
    clipped = int(np.count_nonzero(predicted.clipped))
    if clipped:
        print(f"warning: {clipped} grid point(s) clipped at 1.0; "
              "two-level approximation overflowed")
    print(f"wrote predicted.csv" + (", predicted.png" if config.plot else "") + f" in {out}")
    return 0


def _cmd_refine(args: argparse.Namespace) -> int:
    config = _load_config(args)
    sys_h, _, sweep_config = _sweep_pieces(config)
    grid, decay = fileio.parse_sweep_csv(Path(args.sweep_csv).read_text(encoding="utf-8"))
    result = spectroscopy.SweepResult(grid=grid, config=sweep_config, decay=decay)
    expected = args.expected if args.expected is not None else sys_h.dim
    threshold = _absolute_threshold(decay, config.threshold)
    peaks = spectroscopy.detect_peaks(result, threshold)
    jobs = spectroscopy.plan_refinement(result, expected, peaks=peaks)
    out = Path(config.out_dir)
    fileio.write_text_atomic(out / "refinement_plan.json", fileio.refinement_json(jobs))
    print(f"baseline sweep has {len(peaks)} peak(s), expected {expected}: "
          f"planned {len(jobs)} job(s)")
    for job in jobs:
        print(f"  {job.rung:<15} [{job.omega_min:.4f}, {job.omega_max:.4f}] "
              f"m={job.m} c={job.c:g} tau={job.tau:g}")
    if not args.execute:
        print(f"wrote refinement_plan.json in {out}")
        return 0

    executed = spectroscopy.execute_refinement(sys_h, sweep_config, jobs, config.threshold)
    spectrum = oracle_mod.diagonalize_system(sys_h, config.alpha)
    for i, (job, job_result, job_peaks) in enumerate(executed):
        fileio.write_text_atomic(out / f"refined_sweep_{i}.csv", fileio.sweep_csv(job_result))
        fileio.write_text_atomic(out / f"refined_peaks_{i}.json", fileio.peaks_json(job_peaks))
        report = oracle_mod.compare_spectrum(job_peaks, spectrum, tol=job_result.grid.delta)
        found = [m.oracle_index for m in report.matched]
        print(f"  job {i} ({job.rung}): {len(job_peaks)} peak(s), "
              f"matched transitions {found}")
    if config.plot and executed:
        from . import plotting

        plotting.render_refinement_figure(executed, out / "refinement.png")
    print(f"wrote refinement_plan.json and {len(executed)} refined sweep(s) in {out}")
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    _load_config(args)  # validates the config even though checks are self-contained
    from .selfcheck import run_all_checks

    results = run_all_checks()
    width = max(len(r.name) for r in results)
    failed = 0
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        if not r.passed:
            failed += 1
        print(f"{r.name:<{width}}  {status}  {r.detail}")
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 0 if failed == 0 else 1


def _cmd_trotter_bench(args: argparse.Namespace) -> int:
    config = _load_config(args)
    sys_h = config.load_system()
    # Convergence table on the configured system rescaled to unit spectral
    # width: at the raw energy scale the small-L slices are far outside the
    # asymptotic regime and the halving behavior would be invisible.
    from .model import ProbeParameters, SystemHamiltonian, build_total_hamiltonian
    from .operators import eigh as _eigh

    dec = _eigh(sys_h.matrix)
    spread = float(dec.eigenvalues[-1] - dec.eigenvalues[0]) or 1.0
    center = float(dec.eigenvalues.mean())
    scaled = (sys_h.matrix - center * np.eye(sys_h.dim)) / spread
    bench_sys = SystemHamiltonian.from_matrix(scaled)
    print("benchmark model: configured system rescaled to unit spectral width")
    params = ProbeParameters(omega=1.0, c=0.05, alpha=0.0, tau=1.0)
    m = build_total_hamiltonian(bench_sys, params)
    exact = evolution.exact_propagator(m, params.tau)
    slice_counts = [8, 16, 32, 64, 128]
    errors = []
    print(f"{'L':>6} {'onorm error':>14} {'ratio':>8}")
    prev = None
    for slices in slice_counts:
        err = float(np.linalg.norm(evolution.trotter_propagator(m, params.tau, slices) - exact, ord=2))
        errors.append(err)
        ratio = "" if prev is None else f"{err / prev:.3f}"
        print(f"{slices:>6} {err:>14.6e} {ratio:>8}")
        prev = err

    ns = list(range(2, 9))
    counts = [len(evolution.interaction_exponential_circuit(n, config.c, 0.1)) for n in ns]
    coeffs = np.polyfit(np.array(ns, dtype=np.float64), counts, 2)
    fitted = np.polyval(coeffs, ns)
    residual = float(np.linalg.norm(np.array(counts) - fitted) / np.linalg.norm(counts))
    print(f"{'n':>6} {'gates':>8} {'fit':>10}")
    for n, count, fit_val in zip(ns, counts, fitted):
        print(f"{n:>6} {count:>8} {fit_val:>10.1f}")
    print(f"quadratic fit {coeffs[0]:.2f} n^2 + {coeffs[1]:.2f} n + {coeffs[2]:.2f}, "
          f"relative residual {residual:.4f}")

    out = Path(config.out_dir)
    bench_lines = ["L,operator_norm_error"]
    for slices, err in zip(slice_counts, errors):
        bench_lines.append(f"{slices},{err!r}")
    fileio.write_text_atomic(out / "trotter_bench.csv", "\n".join(bench_lines) + "\n")
    count_lines = ["n,elementary_gates"]
    for n, count in zip(ns, counts):
        count_lines.append(f"{n},{count}")
    fileio.write_text_atomic(out / "gate_counts.csv", "\n".join(count_lines) + "\n")
    gates = evolution.interaction_exponential_circuit(sys_h.n, config.c, config.tau / config.trotter_slices)
    fileio.write_text_atomic(out / f"interaction_gates_n{sys_h.n}.txt", gates.to_text())
    if config.plot:
        from . import plotting

        plotting.render_bench_figure(
            slice_counts, errors, ns, counts,
            (float(coeffs[0]), float(coeffs[1]), float(coeffs[2])),
            out / "trotter_bench.png",
        )
    print(f"wrote trotter_bench.csv, gate_counts.csv, interaction_gates_n{sys_h.n}.txt"
          + (", trotter_bench.png" if config.plot else "") + f" in {out}")
    return 0


_COMMANDS = {
    "sweep": _cmd_sweep,
    "oracle": _cmd_oracle,
    "predict": _cmd_predict,
    "refine": _cmd_refine,
    "verify": _cmd_verify,
    "trotter-bench": _cmd_trotter_bench,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
