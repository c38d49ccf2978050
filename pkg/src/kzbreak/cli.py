"""Command-line entry point: sweeps, tomography simulation, analysis and
canned figure reproductions.  Emits data files only."""
from __future__ import annotations

import argparse
import sys
import time
from collections import defaultdict

import numpy as np

from . import analysis, analytic, propagator, ricemele
from .config import ExperimentConfig, default_rm_grid, default_tau_grid, load_config
from .errors import (AccuracyError, ConfigError, DomainError, ExtractionError,
                     InsufficientDataError, StiffnessError)
from .hamiltonian import QuenchProtocol, khz
from .output import OutputDir, read_csv
from .states import basis_state
from .sweeps import (LzTask, RmTask, TomoTask, default_workers, lz_point, rm_point,
                     run_parallel, tomo_point)

EXIT_OK, EXIT_CONFIG, EXIT_ACCURACY, EXIT_ANALYSIS = 0, 2, 3, 4

LZ_COLUMNS = ["delta_max", "tau_Q_over_tau0", "T", "n_numeric", "n_analytic"]
RM_COLUMNS = ["delta_max_rad_s", "T_s", "tau_Q", "n_total"]
PROFILE_COLUMNS = ["delta_max_rad_s", "T_s", "tau_Q", "p_rad_s", "collapse_x", "n_p"]
TRACE_COLUMNS = ["T_s", "t_seconds", "re_alpha", "im_alpha", "re_beta", "im_beta", "p_upper"]

# Reference values quoted for the canned reproductions.
REFERENCE = {
    "lz_coupling_khz": 31.75,
    "fig2b_delta_max_khz": [25, 41, 57, 78, 110, 190, 440],
    "figS3_x_c": [7.00, 3.00, 1.22, 0.90, 0.65, 0.40],
    "figS2": {"delta_max_khz": 300.0, "coupling_khz": 18.11, "T_us": [20, 40, 60, 140]},
    "rm_delta_max_khz": [5.25, 6.30, 7.35, 8.40, 9.45, 10.50],
    "a": [[-0.513, 0.015], [-0.488, 0.024], [-0.510, 0.013], [-0.512, 0.013],
          [-0.516, 0.039], [-0.487, 0.014]],
    "b": [2.12, 0.13],
    "c": [0.97, 0.02],
    "fig3b_delta_max": 33e3,
    "fig3b_T_delta_max": [16.0, 64.0, 256.0],
}
FIGURES = ("fig2a", "fig2b", "fig3b", "fig3c", "figS2", "figS3", "figS4", "figS5")


# sweeps ----------------------------------------------------------------------

def _lz_tasks(cfg: ExperimentConfig):
    return [LzTask(cfg.coupling, dm, T, cfg.engine, cfg.shots, cfg.seed, cfg.rel_tol, cfg.abs_tol)
            for dm in cfg.delta_max for T in cfg.durations(dm)]


def lz_analysis(points, cfg: ExperimentConfig) -> dict | None:
    """Per-range plateau and critical time plus the critical-law fit."""
    curves = defaultdict(list)
    for p in points:
        curves[p.delta_max].append((p.tau_ratio, p.n_numeric))
    if all(len(c) < 2 for c in curves.values()):
        return None
    rows, xs, taus = [], [], []
    for dm in sorted(curves):
        tau, n = np.array(curves[dm]).T
        ca = analysis.analyze_lz_curve(tau, n, cfg.eps_plateau, cfg.window_factor)
        x_c = dm / (2 * cfg.coupling)
        rows.append({
            "delta_max": dm,
            "x_c": x_c,
            "n_sat": ca.plateau.n_sat,
            "n_sat_predicted": analytic.plateau_prediction(x_c),
            "tau_Qc_over_tau0": ca.tau_c,
            "alpha_fit": ca.alpha_fit,
            "note": ca.note,
        })
        if ca.usable:
            xs.append(x_c)
            taus.append(ca.tau_c)
    report = {"ranges": rows, "critical_law": None,
              "config": {"eps_plateau": cfg.eps_plateau, "window_factor": cfg.window_factor,
                         "floor": analysis.DEFAULT_LZ_FLOOR}}
    if len(xs) >= 2:
        fit = analysis.fit_critical_law(xs, taus)
        report["critical_law"] = {"alpha": fit.alpha, "r_squared_log": fit.r_squared,
                                  "r_squared_linear": fit.r_squared_linear, "n_points": fit.n_points}
    return report


def run_lz(cfg: ExperimentConfig, out: OutputDir, workers: int) -> dict | None:
    points = run_parallel(lz_point, _lz_tasks(cfg), workers)
    header = LZ_COLUMNS + (["n_tomographic"] if cfg.engine == "tomographic" else [])
    rows = []
    for p in points:
        row = [p.delta_max, p.tau_ratio, p.period, p.n_numeric, p.n_analytic]
        if cfg.engine == "tomographic":
            row.append(p.n_tomographic)
        rows.append(row)
    out.write_csv("lz_sweep.csv", header, rows)
    if cfg.engine == "tomographic":
        out.write_json("lz_tomography.json", [
            {"delta_max": p.delta_max, "T": p.period, **p.rho} for p in points])
    report = lz_analysis(points, cfg)
    if report is not None:
        out.write_json("lz_analysis.json", {**report, "config_echo": cfg.to_json()})
    return report


def rm_report(results, cfg: ExperimentConfig) -> dict:
    sweeps = defaultdict(lambda: ([], []))
    for r in results:
        sweeps[r.delta_max][0].append(r.tau_Q)
        sweeps[r.delta_max][1].append(r.n_total)
    sweeps = {dm: (np.array(t), np.array(n)) for dm, (t, n) in sweeps.items()}
    if len(sweeps) >= 3:
        summary = analysis.breakdown_summary(sweeps, cfg.eps_plateau, cfg.window_factor)
        report = summary.to_json()
        report["b_fit"] = analysis.fit_to_json(summary.b_fit)
        report["c_fit"] = analysis.fit_to_json(summary.c_fit)
    else:
        report = {"exponents": {"a": [], "a_stderr": []}, "plateaus": [], "criticals": [],
                  "config": {"eps_plateau": cfg.eps_plateau, "window_factor": cfg.window_factor}}
        for dm in sorted(sweeps):
            ca = analysis.analyze_power_curve(*sweeps[dm], cfg.eps_plateau, cfg.window_factor)
            report["exponents"]["a"].append(ca.fit.exponent if ca.fit else None)
            report["exponents"]["a_stderr"].append(ca.fit.stderr if ca.fit else None)
            report["plateaus"].append({"delta_max": dm, "n_sat": ca.plateau.n_sat})
            report["criticals"].append({"delta_max": dm, "tau_Q_c": ca.tau_c, "note": ca.note})
    return report


def run_rm(cfg: ExperimentConfig, out: OutputDir, workers: int, analyze: bool = True):
    tasks = [RmTask(dm, T, cfg.engine, cfg.n_points, cfg.shots, cfg.seed, cfg.rel_tol, cfg.abs_tol)
             for dm in cfg.delta_max for T in cfg.durations(dm)]
    results = run_parallel(rm_point, tasks, workers)
    out.write_csv("rm_aggregate.csv", RM_COLUMNS, [
        [r.delta_max, r.T, r.tau_Q, r.n_total] for r in results])
    profile = []
    for r in results:
        xs = ricemele.collapse_coordinate(r.p_values, r.T, r.delta_max)
        profile += [[r.delta_max, r.T, r.tau_Q, p, x, n] for p, x, n in zip(r.p_values, xs, r.n_p)]
    out.write_csv("rm_profiles.csv", PROFILE_COLUMNS, profile)
    report = None
    if analyze:
        report = rm_report(results, cfg)
        out.write_json("rm_analysis.json", {**report, "config_echo": cfg.to_json()})
    return results, report


def run_tomo(cfg: ExperimentConfig, out: OutputDir, workers: int):
    tasks = [TomoTask(cfg.model, cfg.coupling, dm, T, cfg.shots, cfg.seed, cfg.rel_tol, cfg.abs_tol)
             for dm in cfg.delta_max for T in cfg.durations(dm)]
    results = run_parallel(tomo_point, tasks, workers)
    out.write_csv("tomography.csv", ["delta_max", "T", "shots", "n_exact", "n_tomographic"],
                  [[r["delta_max"], r["T"], r["shots"], r["n_exact"], r["n_tomographic"]]
                   for r in results])
    out.write_json("tomography.json", {"points": results, "config_echo": cfg.to_json()})
    return results


# analyze ------------------------------------------------------------------------

def analyze_csv(path, eps_plateau: float = analysis.DEFAULT_EPS_PLATEAU,
                window_factor: float = analysis.DEFAULT_WINDOW_FACTOR) -> dict:
    """Re-run the analysis on a sweep CSV written by lz-sweep or rm-sweep."""
    header, rows = read_csv(path)
    data = np.array(rows, dtype=float).reshape(-1, len(header))
    col = {name: data[:, i] for i, name in enumerate(header)}
    curves = defaultdict(lambda: ([], []))
    if "tau_Q_over_tau0" in col:
        x_key, model = "tau_Q_over_tau0", "lz"
        y_key = "n_numeric"
        dm_key = "delta_max"
    elif "tau_Q" in col and "n_total" in col:
        x_key, y_key, model = "tau_Q", "n_total", "ricemele"
        dm_key = "delta_max_rad_s"
    else:
        raise ConfigError(str(path), "unrecognised CSV layout")
    for dm, x, y in zip(col[dm_key], col[x_key], col[y_key]):
        curves[float(dm)][0].append(x)
        curves[float(dm)][1].append(y)
    sweeps = {dm: (np.array(x), np.array(y)) for dm, (x, y) in curves.items()}
    if model == "ricemele":
        summary = analysis.breakdown_summary(sweeps, eps_plateau, window_factor)
        return {"model": model, **summary.to_json()}
    rows_out, xs, taus = [], [], []
    coupling = None
    if "T" in col:
        # tau/tau0 = J^2 T / dmax recovers J
        coupling = float(np.sqrt(col[x_key][0] * col["delta_max"][0] / col["T"][0]))
    for dm in sorted(sweeps):
        ca = analysis.analyze_lz_curve(*sweeps[dm], eps_plateau, window_factor)
        rows_out.append({"delta_max": dm, "n_sat": ca.plateau.n_sat, "tau_Qc_over_tau0": ca.tau_c,
                         "alpha_fit": ca.alpha_fit, "note": ca.note})
        if ca.usable and coupling:
            xs.append(dm / (2 * coupling))
            taus.append(ca.tau_c)
    if not any(r["tau_Qc_over_tau0"] for r in rows_out):
        raise InsufficientDataError("no quench range yielded a critical time")
    report = {"model": model, "ranges": rows_out, "critical_law": None,
              "config": {"eps_plateau": eps_plateau, "window_factor": window_factor}}
    if len(xs) >= 2:
        fit = analysis.fit_critical_law(xs, taus)
        report["critical_law"] = {"alpha": fit.alpha, "r_squared_log": fit.r_squared,
                                  "r_squared_linear": fit.r_squared_linear}
    return report


# reproduce ------------------------------------------------------------------------

def figure_config(figure_id: str, seed: int = 0, engine: str = "numeric") -> ExperimentConfig:
    J = khz(REFERENCE["lz_coupling_khz"])
    tau = tuple(default_tau_grid())
    if figure_id == "fig2a":
        return ExperimentConfig("lz", J, (khz(41),), tau_ratio=tau, seed=seed, engine=engine)
    if figure_id == "fig2b":
        return ExperimentConfig("lz", J, tuple(khz(f) for f in REFERENCE["fig2b_delta_max_khz"]),
                                tau_ratio=tau, seed=seed, engine=engine)
    if figure_id == "figS3":
        return ExperimentConfig("lz", J, tuple(2 * J * x for x in REFERENCE["figS3_x_c"]),
                                tau_ratio=tau, seed=seed, engine=engine)
    if figure_id == "figS2":
        s = REFERENCE["figS2"]
        return ExperimentConfig("lz", khz(s["coupling_khz"]), (khz(s["delta_max_khz"]),),
                                T=tuple(t * 1e-6 for t in s["T_us"]), seed=seed, engine="numeric")
    if figure_id == "fig3b":
        return ExperimentConfig("ricemele", delta_max=(REFERENCE["fig3b_delta_max"],),
                                T_delta_max=tuple(REFERENCE["fig3b_T_delta_max"]), seed=seed,
                                engine=engine)
    if figure_id in ("fig3c", "figS4", "figS5"):
        return ExperimentConfig("ricemele", delta_max=tuple(khz(f) for f in REFERENCE["rm_delta_max_khz"]),
                                T_delta_max=tuple(default_rm_grid()), seed=seed, engine=engine)
    raise ConfigError("figure_id", f"unknown figure {figure_id!r}; expected one of {FIGURES}")


def _reproduce_figS2(cfg, out: OutputDir):
    """Passage traces over two detuning periods and the single-pass
    transition probability against the Landau-Zener formula."""
    J, dm = cfg.coupling, cfg.delta_max[0]
    trace_rows, summary = [], []
    for T in cfg.T:
        protocol = QuenchProtocol.triangular(dm, T, n_periods=2)
        times = np.linspace(0.0, protocol.duration, 401)
        t, states, p_up = propagator.lz_passage_trace(J, protocol, basis_state(0), sample_times=times)
        trace_rows += [[T, ti, a.real, a.imag, b.real, b.imag, pu]
                       for ti, (a, b), pu in zip(t, states, p_up)]
        p_sim = propagator.single_pass_transition(J, dm, T)
        p_lz = analytic.lz_probability(2 * J, 4 * dm / T)
        summary.append({"T": T, "P_simulated": p_sim, "P_lz_formula": p_lz,
                        "abs_difference": abs(p_sim - p_lz)})
    out.write_csv("figS2_traces.csv", TRACE_COLUMNS, trace_rows)
    return {"single_pass": summary}


def reproduce(figure_id: str, out: OutputDir, workers: int, seed: int = 0,
              engine: str = "numeric") -> dict:
    cfg = figure_config(figure_id, seed, engine)
    summary: dict = {"figure": figure_id}
    if figure_id == "figS2":
        summary.update(_reproduce_figS2(cfg, out))
    elif cfg.model == "lz":
        report = run_lz(cfg, out, workers)
        summary["ranges"] = [
            {k: r[k] for k in ("x_c", "n_sat", "n_sat_predicted", "tau_Qc_over_tau0", "alpha_fit")}
            for r in report["ranges"]]
        summary["critical_law"] = report["critical_law"]
        if figure_id == "figS3":
            summary["reference_x_c"] = REFERENCE["figS3_x_c"]
    elif figure_id == "fig3b":
        results, _ = run_rm(cfg, out, workers, analyze=False)
        curves = [(ricemele.collapse_coordinate(r.p_values, r.T, r.delta_max), r.n_p) for r in results]
        summary["T_delta_max"] = [r.T * r.delta_max for r in results]
        summary["collapse_max_deviation"] = analysis.collapse_deviation(curves)
    else:
        _, report = run_rm(cfg, out, workers)
        ex = report["exponents"]
        if figure_id in ("fig3c", "figS5"):
            summary["b"] = {"simulated": ex["b"], "stderr": ex["b_stderr"], "reference": REFERENCE["b"],
                            "predicted": analysis.ScalingExponents().b_pred}
            summary["c"] = {"simulated": ex["c"], "stderr": ex["c_stderr"], "reference": REFERENCE["c"],
                            "predicted": analysis.ScalingExponents().c_pred}
            summary["plateaus"] = report["plateaus"]
            summary["criticals"] = report["criticals"]
        if figure_id in ("fig3c", "figS4"):
            summary["a"] = [{"delta_max": dm, "simulated": a, "stderr": s, "reference": p}
                            for dm, a, s, p in zip(cfg.delta_max, ex["a"], ex["a_stderr"], REFERENCE["a"])]
            summary["a_predicted"] = analysis.ScalingExponents().a_pred
    out.write_json("summary.json", {**summary, "config_echo": cfg.to_json()})
    return summary


# entry point --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value configuration file")
    common.add_argument("--out", help="output directory")
    common.add_argument("--seed", type=int, help="base RNG seed (unsigned 64-bit)")
    common.add_argument("--workers", type=int, help="worker processes (default: logical cores)")
    common.add_argument("--engine", choices=("numeric", "analytic", "tomographic"))
    common.add_argument("--eps-plateau", type=float, help="relative plateau tolerance")

    parser = argparse.ArgumentParser(prog="kzbreak", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("lz-sweep", parents=[common], help="Landau-Zener quench sweep")
    sub.add_parser("rm-sweep", parents=[common], help="Rice-Mele quench sweep")
    sub.add_parser("tomo-sim", parents=[common], help="simulated state tomography of final states")
    p = sub.add_parser("analyze", parents=[common], help="scaling analysis of a sweep CSV")
    p.add_argument("csv")
    p = sub.add_parser("reproduce", parents=[common], help="canned figure reproduction")
    p.add_argument("figure_id", choices=FIGURES)
    return parser


def _load(args, model: str | None) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig(model=model or "lz")
    if model and cfg.model != model:
        raise ConfigError("model", f"this command needs model = {model}, config has {cfg.model!r}")
    cfg = cfg.with_overrides(seed=args.seed, engine=args.engine, eps_plateau=args.eps_plateau,
                             workers=args.workers, out=args.out)
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.seed is not None and not 0 <= args.seed < 2**64:
            raise ConfigError("--seed", "must be an unsigned 64-bit integer")
        if args.workers is not None and args.workers < 1:
            raise ConfigError("--workers", "must be positive")
        return _dispatch(args)
    except (ConfigError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (AccuracyError, StiffnessError) as exc:
        print(f"numeric accuracy failure: {exc}", file=sys.stderr)
        return EXIT_ACCURACY
    except (InsufficientDataError, ExtractionError) as exc:
        print(f"analysis failed: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS


def _dispatch(args) -> int:
    start = time.perf_counter()
    if args.command == "analyze":
        eps = args.eps_plateau or analysis.DEFAULT_EPS_PLATEAU
        report = analyze_csv(args.csv, eps)
        if args.out:
            out = OutputDir(args.out)
            out.write_json("analysis.json", report)
            out.finish("analyze", {"csv": str(args.csv), "eps_plateau": eps},
                       time.perf_counter() - start, 1)
        else:
            from .output import json_text
            sys.stdout.write(json_text(report))
        return EXIT_OK

    if args.command == "reproduce":
        workers = args.workers or default_workers()
        out = OutputDir(args.out or f"out/{args.figure_id}")
        summary = reproduce(args.figure_id, out, workers, args.seed or 0, args.engine or "numeric")
        out.finish(f"reproduce {args.figure_id}",
                   figure_config(args.figure_id, args.seed or 0, args.engine or "numeric").to_json(),
                   time.perf_counter() - start, workers)
        print(f"wrote {len(out.files) + 1} files to {out.path}")
        return EXIT_OK

    model = {"lz-sweep": "lz", "rm-sweep": "ricemele", "tomo-sim": None}[args.command]
    cfg = _load(args, model)
    workers = cfg.workers or default_workers()
    out = OutputDir(cfg.out or f"out/{args.command}")
    if args.command == "lz-sweep":
        run_lz(cfg, out, workers)
    elif args.command == "rm-sweep":
        run_rm(cfg, out, workers)
    else:
        run_tomo(cfg, out, workers)
    out.finish(args.command, cfg.to_json(), time.perf_counter() - start, workers)
    print(f"wrote {len(out.files) + 1} files to {out.path}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
