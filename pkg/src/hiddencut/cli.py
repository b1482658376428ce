"""Experiment runner: plant instances, run solvers, cross-check circuits,
validate closed-form statistics, benchmark scaling.

Exit codes are a stable contract for CI: 0 success, 2 acceptance-threshold
breach, 3 invalid configuration. Every output file embeds the producing
config, the seed, the package version and the bit-order convention; report
paths also render PNG figures next to the delimited output unless --no-plot
is given.
"""

from __future__ import annotations

import argparse
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import circuit, haarstats, io, plotting, solver, wht
from .purity import brute_force_cut_search, entanglement_feature
from .statevec import PlantedInstance, SetPartition, haar_random_state, plant_instance

XCHECK_TV_THRESHOLD = 1e-9
Z_THRESHOLD = 4.0
CHI2_P_FLOOR = 1e-3

EXIT_OK = 0
EXIT_BREACH = 2
EXIT_BADCONFIG = 3


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad flags; remap to the invalid-config code."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_BADCONFIG, f"{self.prog}: error: {message}\n")


def _parse_parts(text: str) -> SetPartition:
    """'0-3/4-7' or '0,2/1,3': slash-separated parts, comma items, a-b ranges."""
    parts = []
    for chunk in text.split("/"):
        qubits: list[int] = []
        for item in chunk.split(","):
            item = item.strip()
            if "-" in item:
                lo, hi = item.split("-")
                qubits.extend(range(int(lo), int(hi) + 1))
            elif item:
                qubits.append(int(item))
        parts.append(qubits)
    return SetPartition.of(parts)


def _parse_factors(text: str, num_parts: int):
    """'haar', 'schmidt:0.5,0.5', or a semicolon list with one entry per part."""
    def one(spec: str):
        spec = spec.strip()
        if spec == "haar":
            return "haar"
        if spec.startswith("schmidt:"):
            coeffs = [float(c) for c in spec.split(":", 1)[1].split(",")]
            return {"schmidt": coeffs}
        raise ValueError(f"unknown factor spec {spec!r}")

    if ";" in text:
        specs = [one(s) for s in text.split(";")]
        if len(specs) != num_parts:
            raise ValueError("one factor spec per part required")
        return specs
    return one(text)


def _spawn_rngs(seed: int, count: int) -> list[np.random.Generator]:
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(count)]


def _instance_from_args(args: argparse.Namespace, rng: np.random.Generator) -> PlantedInstance:
    if getattr(args, "infile", None):
        return io.load_instance(args.infile)
    if args.n is None or args.parts is None:
        raise ValueError("either --in or both --n and --parts are required")
    partition = _parse_parts(args.parts)
    if partition.num_qubits != args.n:
        raise ValueError(f"--parts covers {partition.num_qubits} qubits, --n is {args.n}")
    return plant_instance(args.n, partition, _parse_factors(args.factors, partition.num_parts), rng)


def _config_echo(args: argparse.Namespace) -> dict[str, Any]:
    skip = {"func"}
    return {k: v for k, v in vars(args).items() if k not in skip and v is not None}


# ------------------------------------------------------------------ plant

def cmd_plant(args: argparse.Namespace) -> int:
    rng = np.random.default_rng(args.seed)
    partition = _parse_parts(args.parts)
    instance = plant_instance(
        args.n, partition, _parse_factors(args.factors, partition.num_parts), rng
    )
    print(f"planted n={args.n} parts={partition.as_lists()} "
          f"epsilon_certified={instance.epsilon_certified:.6f}")
    if args.out:
        meta = io.output_meta(_config_echo(args), args.seed)
        written = io.save_instance(
            Path(args.out).with_suffix(".json"), instance, meta,
            inline_state=args.format == "json",
        )
        for p in written:
            print(f"wrote {p}")
    return EXIT_OK


# ------------------------------------------------------------------ solve

def _build_config(args: argparse.Namespace) -> solver.SolverConfig:
    return solver.SolverConfig(
        mode=args.mode,
        epsilon=args.epsilon,
        t=args.t,
        delta=args.delta,
        max_samples=args.max_samples,
        confidence=args.confidence,
        seed=args.seed,
    )


def cmd_solve(args: argparse.Namespace) -> int:
    cfg = _build_config(args)
    rngs = _spawn_rngs(args.seed, 2 * args.trials)
    instances = []
    for i in range(args.trials):
        instances.append(_instance_from_args(args, rngs[2 * i]))

    def run(i: int) -> solver.SolveReport:
        return solver.solve(instances[i], cfg, rngs[2 * i + 1])

    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            reports = list(pool.map(run, range(args.trials)))
    else:
        reports = [run(i) for i in range(args.trials)]

    successes = sum(1 for r in reports if r.success)
    mean_copies = sum(r.copies_consumed for r in reports) / len(reports)
    print(f"mode={args.mode} trials={args.trials} recovered={successes} "
          f"mean_copies={mean_copies:.1f}")
    if args.out:
        meta = io.output_meta(_config_echo(args), args.seed)
        base = Path(args.out)
        io.save_reports_json(base.with_suffix(".json"), reports, meta)
        if args.format == "csv":
            io.save_report_table_csv(base.with_suffix(".csv"), reports, meta)
        if args.plot:
            plotting.save_solve_figure(base.with_suffix(".png"), reports,
                                       title=f"{args.mode} solve")
        print(f"wrote {base.with_suffix('.json')}")
    return EXIT_OK


# ------------------------------------------------------------------ xcheck

def crosscheck_cases(seed: int) -> list[dict[str, Any]]:
    """The 40-case grid: per (n, t) point, 4 planted + 4 fully random states."""
    grid = [(2, 2), (3, 2), (4, 2), (2, 4), (3, 4)]
    partitions = {
        2: [[[0], [1]]],
        3: [[[0], [1, 2]], [[0, 1], [2]], [[0, 2], [1]], [[0], [1], [2]]],
        4: [[[0, 1], [2, 3]], [[0, 2], [1, 3]], [[0], [1, 2, 3]], [[0], [1], [2, 3]]],
    }
    rng = np.random.default_rng(seed)
    cases = []
    for n, t in grid:
        opts = partitions[n]
        for i in range(4):
            parts = SetPartition.of(opts[i % len(opts)])
            factors = []
            for part in parts.parts:
                factors.append((haar_random_state(len(part), rng), part))
            from .statevec import product_state

            state = product_state(factors)
            cases.append({"label": f"planted n={n} t={t} #{i}", "n": n, "t": t,
                          "state": state})
        for i in range(4):
            cases.append({"label": f"random n={n} t={t} #{i}", "n": n, "t": t,
                          "state": haar_random_state(n, rng)})
    return cases


def run_crosscheck(cases: list[dict[str, Any]], corrupt_purity: bool = False) -> list[dict[str, Any]]:
    results = []
    for case in cases:
        feature = entanglement_feature(case["state"])
        if corrupt_purity:
            # squared purities are a valid feature of a wrong state, so the
            # comparison machinery (not the integrity guard) must catch it
            feature = type(feature)(feature.num_qubits, feature.values**2)
        analytic = wht.statehsp_distribution(feature, case["t"])
        explicit = circuit.simulate_fourier_sampling_circuit(case["state"], case["t"])
        results.append({"label": case["label"], "n": case["n"], "t": case["t"],
                        "tv": wht.total_variation(analytic, explicit)})
    return results


def cmd_xcheck(args: argparse.Namespace) -> int:
    cases = crosscheck_cases(args.seed)
    results = run_crosscheck(cases, corrupt_purity=args.corrupt_purity)
    worst = max(results, key=lambda r: r["tv"])
    for r in results:
        print(f"{r['label']:26s} TV = {r['tv']:.3e}")
    print(f"worst: {worst['label']} TV = {worst['tv']:.3e} (threshold {XCHECK_TV_THRESHOLD:g})")
    if args.out:
        meta = io.output_meta(_config_echo(args), args.seed)
        base = Path(args.out)
        io.save_json(base.with_suffix(".json"), {"results": results}, meta)
        if args.plot:
            plotting.save_xcheck_figure(base.with_suffix(".png"), results,
                                        XCHECK_TV_THRESHOLD, title="circuit cross-check")
    return EXIT_OK if worst["tv"] <= XCHECK_TV_THRESHOLD else EXIT_BREACH


# ------------------------------------------------------------------ validate

def cmd_validate(args: argparse.Namespace) -> int:
    rng = np.random.default_rng(args.seed)
    breaches: list[str] = []

    report = haarstats.monte_carlo_haar_moments(args.n, args.trials, rng)
    zs = [abs(z) for z in report.z_scores()]
    worst_z = max(zs) if zs else 0.0
    print(f"moments n={args.n} trials={args.trials}: worst |z| = {worst_z:.2f}")
    if worst_z > Z_THRESHOLD:
        breaches.append(f"moment z-score {worst_z:.2f} > {Z_THRESHOLD}")

    cov_rows = None
    if args.cov_trials > 0:
        cov_rng = np.random.default_rng(args.seed + 1)
        pair_rng = np.random.default_rng(args.seed + 2)
        pairs = [(int(pair_rng.integers(1, 15)), int(pair_rng.integers(1, 15)))
                 for _ in range(10)]
        cov_rows = haarstats.monte_carlo_purity_covariance(4, pairs, args.cov_trials, cov_rng)
        worst_cov = max(abs(r["z"]) for r in cov_rows if r["z"] is not None)
        print(f"covariance n=4 trials={args.cov_trials}: worst |z| = {worst_cov:.2f}")
        if worst_cov > Z_THRESHOLD:
            breaches.append(f"covariance z-score {worst_cov:.2f} > {Z_THRESHOLD}")

    pi_rows = []
    if args.pi_n:
        from scipy import stats as sps

        sim_rng = np.random.default_rng(args.seed + 3)
        chi_n = 12
        chi_cut = SetPartition.of([list(range(chi_n // 2)), list(range(chi_n // 2, chi_n))])
        counts: dict[int, int] = {}
        draws = haarstats._rejection_batch(chi_n, chi_cut, sim_rng, 200_000)
        for y in draws:
            counts[int(y)] = counts.get(int(y), 0) + 1
        law = haarstats.enumerated_rejection_law(chi_n, chi_cut)
        chi2, dof = _binned_chi2(counts, law, chi_n, chi_cut, draws.size)
        pval = float(sps.chi2.sf(chi2, dof))
        print(f"rejection-sampler chi2 n={chi_n}: chi2={chi2:.1f} dof={dof} p={pval:.4f}")
        if pval <= CHI2_P_FLOOR:
            breaches.append(f"chi-squared p = {pval:.2e} <= {CHI2_P_FLOOR}")

        for n in args.pi_n:
            cut = SetPartition.of([list(range(n // 2)), list(range(n // 2, n))])
            est = haarstats.monte_carlo_pi(n, n - 3, args.pi_trials, cut, sim_rng)
            half = (est.wilson_hi - est.wilson_lo) / 2
            pi_rows.append(est.to_dict())
            ok = est.pi_hat >= est.analytic_lower_bound - 3 * half
            print(f"pi n={n} k={n - 3}: {est.pi_hat:.4f} "
                  f"(analytic lower bound {est.analytic_lower_bound:.4f}) "
                  f"{'ok' if ok else 'BREACH'}")
            if not ok:
                breaches.append(f"pi at n={n} below analytic bound")

    if args.out:
        meta = io.output_meta(_config_echo(args), args.seed)
        base = Path(args.out)
        payload = {"moments": report.to_dict(), "covariance": cov_rows, "pi": pi_rows,
                   "breaches": breaches}
        io.save_json(base.with_suffix(".json"), payload, meta)
        _save_moment_csv(base.with_suffix(".csv"), report, meta)
        if args.plot:
            plotting.save_validate_figure(base.with_suffix(".png"), report, cov_rows,
                                          title="closed-form validation")
    if breaches:
        for b in breaches:
            print(f"BREACH: {b}")
        return EXIT_BREACH
    return EXIT_OK


def _binned_chi2(counts: dict[int, int], law: np.ndarray, n: int,
                 cut: SetPartition, total: int,
                 min_expected: float = 5.0) -> tuple[float, int]:
    """Chi-squared against the enumerated law, binning outcomes by the weight
    pair on the two cut sides and merging bins with tiny expected counts."""
    m1, m2 = cut.indicator_masks()
    bins: dict[tuple[int, int], tuple[float, int]] = {}
    for y in range(1 << n):
        if law[y] == 0.0:
            continue
        key = ((y & m1).bit_count(), (y & m2).bit_count())
        prob, cnt = bins.get(key, (0.0, 0))
        bins[key] = (prob + float(law[y]), cnt + counts.get(y, 0))
    merged_prob, merged_cnt = 0.0, 0
    chi2 = 0.0
    cells = 0
    for prob, cnt in bins.values():
        if prob * total < min_expected:
            merged_prob += prob
            merged_cnt += cnt
            continue
        chi2 += (cnt - prob * total) ** 2 / (prob * total)
        cells += 1
    if merged_prob * total >= 1.0:
        chi2 += (merged_cnt - merged_prob * total) ** 2 / (merged_prob * total)
        cells += 1
    return chi2, max(1, cells - 1)


def _save_moment_csv(path: Path, report: haarstats.MomentReport, meta: dict[str, Any]) -> None:
    columns = ["family", "weight", "closed_mean", "emp_mean", "emp_std", "z"]
    rows = []
    for r in report.per_weight_purity:
        rows.append(("purity", r["weight"], r["closed_mean"], r["emp_mean"],
                     r["emp_std"], r["z"]))
    for r in report.per_weight_fourier:
        rows.append(("fourier", r["weight"], r["closed_mean"], r["emp_mean"],
                     r["emp_std"], r["z"]))
    io._write_csv(path, meta, columns, rows)


# ------------------------------------------------------------------ bench

def cmd_bench(args: argparse.Namespace) -> int:
    modes = ["nonadaptive", "adaptive"] if args.mode == "both" else [args.mode]
    rows = []
    all_reports: dict[str, list[solver.SolveReport]] = {}
    for mode in modes:
        for n in args.n:
            parts = SetPartition.of([list(range(n // 2)), list(range(n // 2, n))])
            rngs = _spawn_rngs(args.seed + n, 2 * args.trials)
            copies, wall, succ = [], [], 0
            reports = []
            for i in range(args.trials):
                inst = plant_instance(n, parts, "haar", rngs[2 * i])
                eps = args.epsilon or inst.epsilon_certified
                if mode == "adaptive":
                    cfg = solver.SolverConfig(mode=mode, epsilon=eps,
                                              t=solver.even_at_least(2.0 / eps**2))
                else:
                    cfg = solver.SolverConfig(mode=mode, epsilon=eps, delta=args.delta,
                                              max_part=n // 2)
                t0 = time.perf_counter()
                rep = solver.solve(inst, cfg, rngs[2 * i + 1])
                wall.append(time.perf_counter() - t0)
                copies.append(rep.copies_consumed)
                succ += bool(rep.success)
                reports.append(rep)
            all_reports[f"{mode}-{n}"] = reports
            rows.append({
                "mode": mode, "n": n, "t": reports[0].t,
                "epsilon": args.epsilon or float(np.mean([r.epsilon for r in reports])),
                "trials": args.trials,
                "mean_copies": float(np.mean(copies)),
                "std_copies": float(np.std(copies)),
                "mean_wall_s": float(np.mean(wall)),
                "success_rate": succ / args.trials,
            })
            print(f"{mode:12s} n={n:2d} t={rows[-1]['t']:4d} "
                  f"copies={rows[-1]['mean_copies']:9.1f} "
                  f"success={rows[-1]['success_rate']:.2f}")

    fit = {}
    for mode in modes:
        sub = [r for r in rows if r["mode"] == mode]
        xs = np.array([r["n"] / r["epsilon"] ** 2 for r in sub])
        ys = np.array([r["mean_copies"] for r in sub])
        if len(sub) >= 2:
            slope, intercept = np.polyfit(xs, ys, 1)
            pred = slope * xs + intercept
            ss_res = float(((ys - pred) ** 2).sum())
            ss_tot = float(((ys - ys.mean()) ** 2).sum())
            fit[mode] = {"a": float(slope), "intercept": float(intercept),
                         "r_squared": 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0}
            print(f"{mode}: copies ~ {slope:.2f} * n/eps^2 + {intercept:.1f} "
                  f"(R^2 = {fit[mode]['r_squared']:.3f})")

    if args.out:
        meta = io.output_meta(_config_echo(args), args.seed)
        base = Path(args.out)
        columns = list(rows[0].keys())
        io._write_csv(base.with_suffix(".csv"), meta, columns,
                      [[r[c] for c in columns] for r in rows])
        io.save_json(base.with_suffix(".json"), {"table": rows, "fit": fit}, meta)
        if args.plot:
            plotting.save_bench_figure(base.with_suffix(".png"), rows,
                                       title="copy scaling")
    return EXIT_OK


# ------------------------------------------------------------------ oracle

def cmd_oracle(args: argparse.Namespace) -> int:
    rng = np.random.default_rng(args.seed)
    instance = _instance_from_args(args, rng)
    recovered = brute_force_cut_search(instance.state, tol=args.tol)
    print(f"brute-force partition: {recovered.as_lists()}")
    if instance.truth is not None:
        match = recovered == instance.truth
        print(f"matches planted truth: {match}")
        if not match:
            return EXIT_BREACH
    return EXIT_OK


# ------------------------------------------------------------------ parser

def build_parser() -> _Parser:
    parser = _Parser(prog="hiddencut", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: _Parser, trials: bool = False) -> None:
        p.add_argument("--seed", type=int, required=True, help="RNG seed (echoed in outputs)")
        p.add_argument("--out", type=str, default=None, help="output path base")
        p.add_argument("--no-plot", dest="plot", action="store_false",
                       help="skip figure rendering next to delimited output")
        if trials:
            p.add_argument("--trials", type=int, default=1)
            p.add_argument("--threads", type=int, default=1)

    p = sub.add_parser("plant", help="plant a product-state instance and write it to disk")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--parts", type=str, required=True, help="e.g. 0-3/4-7 or 0,2/1,3")
    p.add_argument("--factors", type=str, default="haar",
                   help="haar | schmidt:c1,c2,... | ';'-separated per-part list")
    p.add_argument("--format", choices=["binary", "json"], default="binary",
                   help="statevector storage (binary sidecar or inline JSON)")
    common(p)
    p.set_defaults(func=cmd_plant)

    p = sub.add_parser("solve", help="run a solver over planted or loaded instances")
    p.add_argument("--in", dest="infile", type=str, default=None, help="instance JSON file")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--parts", type=str, default=None)
    p.add_argument("--factors", type=str, default="haar")
    p.add_argument("--mode", choices=list(solver.MODES), default="adaptive")
    p.add_argument("--t", type=int, default=None, help="fixed copies per sample (even)")
    p.add_argument("--delta", type=float, default=None, help="target failure for the t policy")
    p.add_argument("--epsilon", type=float, default=None, help="promise override")
    p.add_argument("--confidence", type=float, default=0.99)
    p.add_argument("--max-samples", dest="max_samples", type=int, default=512)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    common(p, trials=True)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("xcheck", help="explicit-circuit vs analytic distribution sweep")
    p.add_argument("--corrupt-purity", action="store_true",
                   help="inject a purity error to self-test the failure path")
    common(p)
    p.set_defaults(func=cmd_xcheck)

    p = sub.add_parser("validate", help="Monte Carlo validation of the closed-form statistics")
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--cov-trials", dest="cov_trials", type=int, default=100_000)
    p.add_argument("--pi-n", dest="pi_n", type=lambda s: [int(x) for x in s.split(",")],
                   default=[12, 16, 20])
    p.add_argument("--pi-trials", dest="pi_trials", type=int, default=10_000)
    common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("bench", help="copy-scaling sweep with linear fit")
    p.add_argument("--n", type=lambda s: [int(x) for x in s.split(",")],
                   default=[6, 8, 10, 12])
    p.add_argument("--epsilon", type=float, default=0.3)
    p.add_argument("--delta", type=float, default=1e-6)
    p.add_argument("--mode", choices=["nonadaptive", "adaptive", "both"], default="both")
    p.add_argument("--trials", type=int, default=10)
    common(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("oracle", help="brute-force purity-scan cut search")
    p.add_argument("--in", dest="infile", type=str, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--parts", type=str, default=None)
    p.add_argument("--factors", type=str, default="haar")
    p.add_argument("--tol", type=float, default=1e-8)
    common(p)
    p.set_defaults(func=cmd_oracle)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BADCONFIG


if __name__ == "__main__":
    sys.exit(main())
