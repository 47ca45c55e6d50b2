"""Command-line surface: simulate | pdf | moments | confidence | noise | compare.

Every run writes a JSON manifest next to its outputs recording the
subcommand, the full parameter set, the master seed, and the package
version, so any artifact can be reproduced bit-identically.  Exit codes:
0 success, 2 usage or configuration error, 3 numerical-integrity error.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, analytics, gof, noise as noise_mod, plotting, simulator
from .clifford import CliffordConstructionError
from .simulator import NumericalIntegrityError

FLOAT_FMT = "%.17g"


class CliError(Exception):
    """Invalid usage or configuration (exit code 2)."""


def _fmt(value: float) -> str:
    return FLOAT_FMT % value


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=0, help="master RNG seed")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker threads for simulation")
    parser.add_argument("--out-dir", default=".", help="output directory")
    parser.add_argument("--config", default=None,
                        help="flat key = value config file; flags override it")
    parser.add_argument("--plot", action="store_true",
                        help="also render PNG figures next to the CSV output")


def _add_model_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--model", default="dc",
                        choices=["markovian", "dc", "block", "fourier"])
    parser.add_argument("--sigma", type=float, default=0.015,
                        help="rms rotation angle per gate, radians")
    parser.add_argument("--block-length", type=int, default=10,
                        help="gates per correlated block (block model)")
    parser.add_argument("--power-law", type=float, default=0.0,
                        help="PSD exponent p: 0 white, -1 pink, 1 Ohmic")
    parser.add_argument("--mode-count", type=int, default=50,
                        help="number of comb modes (fourier model)")
    parser.add_argument("--mode-spacing", type=float, default=1.0,
                        help="comb spacing omega_0 in rad/s")
    parser.add_argument("--amplitude", type=float, default=1.0,
                        help="global scale of the fourier comb")
    parser.add_argument("--gate-time", type=float, default=1.0,
                        help="gate duration tau_g in seconds")
    parser.add_argument("--target-variance", type=float, default=None,
                        help="rescale the fourier amplitude to hit this C(0)")


def _add_regime_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--regime", required=True,
                        choices=["markovian", "dc", "block", "generic"])
    parser.add_argument("--J", type=int, default=100)
    parser.add_argument("--sigma", type=float, default=0.015)
    parser.add_argument("--n", type=int, default=50,
                        help="noise realizations per sequence (markovian law)")
    parser.add_argument("--M", type=int, default=10,
                        help="block length (block law)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rbwalk",
        description="Randomized-benchmarking statistics under correlated noise",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("simulate", help="run a full k x n fidelity experiment")
    _add_common(p)
    _add_model_flags(p)
    p.add_argument("--J", type=int, default=100)
    p.add_argument("--k", type=int, default=100, help="number of sequences")
    p.add_argument("--n", type=int, default=50,
                   help="noise realizations per sequence")
    p.add_argument("--mode", default="dephasing",
                   choices=["dephasing", "universal"])
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("pdf", help="tabulate a closed-form fidelity density")
    _add_common(p)
    _add_regime_flags(p)
    p.add_argument("--finite-n", action="store_true",
                   help="use the exact finite-averaging DC density")
    p.add_argument("--f-min", type=float, default=0.9)
    p.add_argument("--f-max", type=float, default=1.0)
    p.add_argument("--f-step", type=float, default=1e-4)
    p.add_argument("--normalize-mode", action="store_true",
                   help="scale the curve to peak value 1")
    _add_model_flags_generic(p)
    p.set_defaults(func=cmd_pdf)

    p = sub.add_parser("moments", help="law parameters and moments as JSON")
    _add_common(p)
    _add_regime_flags(p)
    _add_model_flags_generic(p)
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("confidence", help="minimum sequence count for a band")
    _add_common(p)
    p.add_argument("--regime", required=True,
                   choices=["markovian", "dc", "block"])
    p.add_argument("--g-lower", type=float, default=0.1)
    p.add_argument("--g-upper", type=float, default=0.1)
    p.add_argument("--epsilon", type=float, default=0.01)
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--J", type=int, default=100)
    p.add_argument("--M", type=int, default=10)
    p.set_defaults(func=cmd_confidence)

    p = sub.add_parser("noise", help="draw noise realizations and C(k)")
    _add_common(p)
    _add_model_flags(p)
    p.add_argument("--J", type=int, default=100)
    p.add_argument("--count", type=int, default=1000,
                   help="number of realizations")
    p.set_defaults(func=cmd_noise)

    p = sub.add_parser("compare", help="fit report of a fidelity matrix vs a law")
    _add_common(p)
    _add_regime_flags(p)
    p.add_argument("--matrix", required=True, help="fidelity matrix CSV")
    _add_model_flags_generic(p)
    p.set_defaults(func=cmd_compare)

    return parser


def _add_model_flags_generic(parser: argparse.ArgumentParser) -> None:
    """Fourier-comb flags used by the generic regime."""
    parser.add_argument("--power-law", type=float, default=0.0)
    parser.add_argument("--mode-count", type=int, default=50)
    parser.add_argument("--mode-spacing", type=float, default=1.0)
    parser.add_argument("--amplitude", type=float, default=1.0)
    parser.add_argument("--gate-time", type=float, default=1.0)
    parser.add_argument("--target-variance", type=float, default=None)


def load_config(path) -> list:
    """Turn a flat `key = value` file into a flag token list.

    Keys use the long-option spelling with either dashes or underscores.
    Tokens are injected before the explicit flags, so flags win.
    """
    tokens = []
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError(f"{path}:{lineno}: expected `key = value`, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise CliError(f"{path}:{lineno}: missing key or value")
        flag = "--" + key.replace("_", "-")
        if value.lower() in ("true", "yes"):
            tokens.append(flag)
        else:
            tokens.extend([flag, value])
    return tokens


def _inject_config(argv: list) -> list:
    """Splice config-file tokens right after the subcommand."""
    path = None
    for i, token in enumerate(argv):
        if token == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif token.startswith("--config="):
            path = token.split("=", 1)[1]
    if path is None:
        return argv
    return argv[:1] + load_config(path) + argv[1:]


def _build_noise_model(args):
    if args.model == "markovian":
        return noise_mod.Markovian(sigma=args.sigma)
    if args.model == "dc":
        return noise_mod.DC(sigma=args.sigma)
    if args.model == "block":
        return noise_mod.Block(sigma=args.sigma, block_length=args.block_length)
    model = noise_mod.FourierPSD.power_law(
        args.power_law, args.mode_count, args.mode_spacing,
        args.amplitude, args.gate_time,
    )
    if args.target_variance is not None:
        model = noise_mod.calibrate_amplitude(model, args.target_variance)
    return model


def _build_law(args) -> analytics.GammaLaw:
    if args.regime == "generic":
        model = noise_mod.FourierPSD.power_law(
            args.power_law, args.mode_count, args.mode_spacing,
            args.amplitude, args.gate_time,
        )
        if args.target_variance is not None:
            model = noise_mod.calibrate_amplitude(model, args.target_variance)
        C = noise_mod.analytic_autocorrelation(model, args.J)
        return analytics.generic_gamma_params(C, args.J)
    return analytics.fidelity_law(args.regime, args.J, args.sigma,
                                  n=args.n, M=args.M)


def _regime_params(args) -> dict:
    params = {"regime": args.regime, "J": args.J, "sigma": args.sigma}
    if args.regime == "markovian":
        params["n"] = args.n
    if args.regime == "block":
        params["M"] = args.M
    if args.regime == "generic":
        params.update({
            "power_law": args.power_law, "mode_count": args.mode_count,
            "mode_spacing": args.mode_spacing, "amplitude": args.amplitude,
            "gate_time": args.gate_time, "target_variance": args.target_variance,
        })
    return params


def write_manifest(out_dir: Path, subcommand: str, params: dict,
                   outputs: list, seed: int | None = None) -> Path:
    manifest = {
        "subcommand": subcommand,
        "parameters": params,
        "master_seed": seed,
        "software_version": __version__,
        "created_utc": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "outputs": outputs,
    }
    path = out_dir / "manifest.json"
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _out_dir(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_simulate(args) -> int:
    out = _out_dir(args)
    model = _build_noise_model(args)
    if args.mode == "universal":
        model = noise_mod.UniversalNoise.z_only(model)
    cfg = simulator.ExperimentConfig(
        J=args.J, k=args.k, n=args.n, noise_model=model,
        mode=args.mode, master_seed=args.seed,
    )
    matrix = simulator.run_experiment(cfg, threads=args.threads)
    averages = simulator.row_average(matrix)

    matrix_csv = out / "fidelity_matrix.csv"
    simulator.write_fidelity_csv(matrix_csv, matrix,
                                 sidecar_path=out / "fidelity_matrix.json")
    averages_csv = out / "row_averages.csv"
    with open(averages_csv, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sequence", "row_average"])
        for i, value in enumerate(averages, start=1):
            writer.writerow([i, _fmt(value)])

    edges = gof.freedman_diaconis_edges(averages)
    counts, _ = np.histogram(averages, bins=edges)
    widths = np.diff(edges)
    density = counts / (counts.sum() * widths) if counts.sum() else counts
    histogram_csv = out / "histogram.csv"
    with open(histogram_csv, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bin_left", "bin_right", "count", "density"])
        for left, right, c, d in zip(edges[:-1], edges[1:], counts, density):
            writer.writerow([_fmt(left), _fmt(right), int(c), _fmt(d)])

    outputs = [matrix_csv.name, "fidelity_matrix.json", averages_csv.name,
               histogram_csv.name]
    if args.plot:
        plotting.render_histogram(out / "histogram.png", averages, edges)
        outputs.append("histogram.png")
    params = dict(matrix.config)
    params["histogram"] = {"rule": "freedman-diaconis",
                           "edges": [float(e) for e in edges]}
    write_manifest(out, "simulate", params, outputs, seed=args.seed)
    summary = {
        "grand_mean": simulator.grand_mean(matrix),
        "row_average_variance": float(np.var(averages, ddof=1)) if args.k > 1 else 0.0,
        "outputs": outputs,
    }
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def cmd_pdf(args) -> int:
    out = _out_dir(args)
    steps = int(round((args.f_max - args.f_min) / args.f_step))
    if steps < 1:
        raise CliError("empty fidelity grid; check --f-min/--f-max/--f-step")
    grid = np.linspace(args.f_min, args.f_max, steps + 1)
    if args.finite_n:
        if args.regime != "dc":
            raise CliError("--finite-n applies to the dc regime only")
        density = analytics.dc_finite_n_pdf(grid, args.J, args.sigma, args.n)
        law_info = {"kind": "dc_finite_n", "n": args.n}
    else:
        law = _build_law(args)
        density = law.pdf(grid)
        law_info = {"kind": "gamma", "shape": law.shape, "scale": law.scale,
                    "delta_offset": law.delta_offset}
    if args.normalize_mode:
        peak = float(np.max(density))
        if peak > 0:
            density = density / peak
    density_csv = out / "density.csv"
    with open(density_csv, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["F", "density"])
        for f, d in zip(grid, density):
            writer.writerow([_fmt(f), _fmt(d)])
    outputs = [density_csv.name]
    if args.plot:
        plotting.render_density(out / "density.png", grid, density)
        outputs.append("density.png")
    params = _regime_params(args)
    params.update({"f_min": args.f_min, "f_max": args.f_max,
                   "f_step": args.f_step,
                   "normalize_mode": args.normalize_mode, "law": law_info})
    write_manifest(out, "pdf", params, outputs)
    print(json.dumps({"rows": len(grid), "outputs": outputs}))
    return 0


def cmd_moments(args) -> int:
    out = _out_dir(args)
    law = _build_law(args)
    moments = analytics.regime_moments(law)
    report = {
        "parameters": _regime_params(args),
        "law": {"shape": law.shape, "scale": law.scale,
                "delta_offset": law.delta_offset},
        "moments": {
            "expectation": moments.expectation, "mode": moments.mode,
            "variance": moments.variance, "skew": moments.skew,
        },
    }
    with open(out / "moments.json", "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    write_manifest(out, "moments", report["parameters"], ["moments.json"])
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0


def cmd_confidence(args) -> int:
    out = _out_dir(args)
    if args.regime == "dc":
        shape = 1.5
    elif args.regime == "markovian":
        shape = 1.5 * args.n
    else:
        if args.M < 2 or args.M > args.J:
            raise CliError("block regime needs 2 <= M <= J")
        shape = 1.5 * args.J / (args.M - 1)
    k_minimum = analytics.k_min(shape, args.g_lower, args.g_upper, args.epsilon)
    k_values = sorted(set(
        list(range(1, 11))
        + [max(1, k_minimum + d) for d in range(-5, 6)]
        + [2 * k_minimum]
    ))
    table = analytics.failure_probability_table(
        shape, args.g_lower, args.g_upper, k_values)
    table_csv = out / "failure_probability.csv"
    with open(table_csv, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "delta_fail"])
        for k, delta in table:
            writer.writerow([k, _fmt(delta)])
    outputs = [table_csv.name]
    if args.plot:
        ks = np.unique(np.linspace(1, 2 * k_minimum, 200).astype(int))
        fails = [analytics.confidence_failure(shape, 1.0, args.g_lower,
                                              args.g_upper, int(k)) for k in ks]
        plotting.render_failure_curve(out / "failure_probability.png",
                                      ks, fails, args.epsilon, k_minimum)
        outputs.append("failure_probability.png")
    params = {"regime": args.regime, "shape": shape, "g_lower": args.g_lower,
              "g_upper": args.g_upper, "epsilon": args.epsilon,
              "n": args.n, "J": args.J, "M": args.M}
    write_manifest(out, "confidence", params, outputs)
    print(json.dumps({"k_min": k_minimum, "shape": shape,
                      "epsilon": args.epsilon, "outputs": outputs}))
    return 0


def cmd_noise(args) -> int:
    out = _out_dir(args)
    model = _build_noise_model(args)
    rng = np.random.default_rng(np.random.SeedSequence(args.seed))
    draws = np.stack([noise_mod.sample_realization(model, args.J, rng)
                      for _ in range(args.count)])
    realizations_csv = out / "realizations.csv"
    noise_mod.write_realizations_csv(realizations_csv, draws)
    analytic = noise_mod.analytic_autocorrelation(model, args.J)
    empirical = (noise_mod.empirical_autocorrelation(draws)
                 if args.count >= 2 else np.full(args.J, math.nan))
    autocorr_csv = out / "autocorrelation.csv"
    with open(autocorr_csv, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "analytic", "empirical"])
        for k in range(args.J):
            writer.writerow([k, _fmt(analytic[k]), _fmt(empirical[k])])
    outputs = [realizations_csv.name, autocorr_csv.name]
    if args.plot:
        plotting.render_autocorrelation(
            out / "autocorrelation.png", np.arange(args.J), analytic,
            empirical if args.count >= 2 else None)
        outputs.append("autocorrelation.png")
    params = {"model": noise_mod.model_to_dict(model), "J": args.J,
              "count": args.count}
    write_manifest(out, "noise", params, outputs, seed=args.seed)
    print(json.dumps({"count": args.count, "outputs": outputs}))
    return 0


def cmd_compare(args) -> int:
    out = _out_dir(args)
    try:
        matrix = simulator.read_fidelity_csv(args.matrix)
    except (OSError, ValueError) as exc:
        raise CliError(f"cannot load matrix {args.matrix}: {exc}") from exc
    averages = simulator.row_average(matrix)
    law = _build_law(args)
    ks = gof.ks_test(averages, law.cdf)
    observed = analytics.sample_moments(averages)
    predicted = analytics.regime_moments(law)
    report = {
        "parameters": _regime_params(args),
        "matrix": {"path": str(args.matrix), "k": matrix.k, "n": matrix.n},
        "law": {"shape": law.shape, "scale": law.scale,
                "delta_offset": law.delta_offset},
        "ks": {"statistic": ks.statistic, "p_value": ks.p_value,
               "sample_size": ks.sample_size},
        "moment_deltas": {
            "expectation": observed.expectation - predicted.expectation,
            "variance": observed.variance - predicted.variance,
            "skew": observed.skew - predicted.skew,
        },
        "sample_moments": {
            "expectation": observed.expectation,
            "variance": observed.variance, "skew": observed.skew,
        },
    }
    with open(out / "compare.json", "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    outputs = ["compare.json"]
    if args.plot:
        edges = gof.freedman_diaconis_edges(averages)
        plotting.render_histogram(out / "compare.png", averages, edges,
                                  overlay=law.pdf)
        outputs.append("compare.png")
    write_manifest(out, "compare", report["parameters"], outputs)
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_inject_config(argv))
    except CliError as exc:
        print(f"rbwalk: error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"rbwalk: error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"rbwalk: invalid parameters: {exc}", file=sys.stderr)
        return 2
    except (NumericalIntegrityError, CliffordConstructionError) as exc:
        print(f"rbwalk: numerical integrity failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
