#!/usr/bin/env python3
"""
critfield - CLI Entry Point

Kac-Rice predictions for the critical points of infinite-width random neural
networks on the sphere, and the experiments that check them by simulation.
"""

import argparse
import hashlib
import json
import logging
import sys
import time
from pathlib import Path
from typing import Optional

from tqdm import tqdm

from critfield import __version__
from critfield.core.errors import ArgumentError, CritFieldError
from critfield.core.models import Activation, ActivationKind, GOIParams, IndexSelector
from critfield.core.parallel import ParallelSampler, set_default_workers
from critfield.experiments import EXPERIMENTS, ExperimentConfig, default_config, load_config, run_experiment
from critfield.goi import goi_expectation_mc, goi_expectation_oracle
from critfield.kacrice import (
    asymptotic_crit_count,
    check_degeneracy,
    prediction_table,
    spectral_params,
)
from critfield.kernel import (
    build_kernel,
    classify_regime,
    kappa_L_derivs_fd,
    kernel_to_json,
)
from critfield.output import Reporter, print_block

logger = logging.getLogger(__name__)

DEFAULT_SEED = 0
DEFAULT_QUERY_SAMPLES = 200_000


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from e


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from e


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="Master RNG seed (default: 0)")
    common.add_argument(
        "--threads", type=int, default=None, help="Worker processes (default: 1; 0 uses all CPUs)"
    )
    common.add_argument("--out", type=Path, default=None, help="Output directory for CSV/JSON")
    common.add_argument(
        "--paper-scale",
        action="store_true",
        help="Full replica counts, widths and Monte Carlo sizes",
    )
    common.add_argument("--mc-samples", type=int, default=None, help="Monte Carlo samples per estimate")
    common.add_argument("--verbose", "-v", action="store_true", help="Enable verbose output")
    return common


def _activation_arguments(parser: argparse.ArgumentParser, default: Optional[str]) -> None:
    parser.add_argument(
        "--activation",
        choices=[k.value for k in ActivationKind if k is not ActivationKind.NUMERIC_TABLE],
        default=default,
        help="Activation family",
    )
    parser.add_argument("--a2", type=float, default=None, help="a^2 of the Gaussian activation")
    parser.add_argument("--lambda-b", type=float, default=None, help="Bias variance in [0, 1)")


def parse_args(argv: Optional[list[str]] = None) -> argparse.Namespace:
    """Parse command line arguments."""
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="critfield",
        description="Expected critical points of random neural networks on the sphere",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Kernel and regime of the sparse Gaussian activation
  critfield kernel-info --activation gaussian_rbf --a2 2.41421356237

  # Expected minima, saddles and maxima at depth 20
  critfield predict --a2 9 --depth 20 --mc-samples 1000000

  # Desk-scale reproduction of the critical-point figure
  critfield fig-critical --out results --threads 8
        """,
    )
    parser.add_argument("--version", action="version", version=f"critfield {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kernel-info", parents=[common], help="Hermite series and derivatives of kappa")
    _activation_arguments(p, ActivationKind.GAUSSIAN_RBF.value)
    p.add_argument("--depth", type=int, default=1, help="Depth for the kappa_L derivatives (default: 1)")
    p.add_argument("--json", action="store_true", help="Print the kernel as JSON")

    p = sub.add_parser("regime", parents=[common], help="Disorder regime of an activation")
    _activation_arguments(p, ActivationKind.GAUSSIAN_RBF.value)

    p = sub.add_parser("predict", parents=[common], help="Kac-Rice expected critical points")
    _activation_arguments(p, ActivationKind.GAUSSIAN_RBF.value)
    p.add_argument("--depth", type=int, default=1, help="Network depth L (default: 1)")
    p.add_argument("--d", type=int, default=2, help="Sphere dimension (default: 2)")
    p.add_argument("--threshold", type=float, default=None, help="Count only points above u")
    p.add_argument("--asymptotic", action="store_true", help="Also evaluate the depth asymptote")

    p = sub.add_parser("goi-estimate", parents=[common], help="Monte Carlo GOI expectation")
    p.add_argument("--d", type=int, default=2, help="Matrix dimension (default: 2)")
    p.add_argument("--c", type=float, default=0.5, help="GOI parameter c (default: 0.5)")
    p.add_argument("--index", type=int, default=0, help="Index i of the eigenvalue event")
    p.add_argument("--shift", type=float, default=0.0, help="Eigenvalue shift s")
    p.add_argument(
        "--method",
        choices=["change-of-variables", "eigenvalues"],
        default="change-of-variables",
        help="Estimator (default: change-of-variables)",
    )

    for name in EXPERIMENTS:
        p = sub.add_parser(name, parents=[common], help=f"Run the {name} experiment")
        p.add_argument("--config", type=Path, default=None, help="JSON configuration file")
        _activation_arguments(p, None)
        p.add_argument("--depths", type=_int_list, default=None, help="Comma-separated depths")
        p.add_argument("--resolutions", type=_int_list, default=None, help="Comma-separated HEALPix orders")
        p.add_argument("--replicas", type=int, default=None, help="Simulated fields per setting")
        p.add_argument("--width", type=int, default=None, help="Hidden-layer width")
        p.add_argument("--widths", type=_int_list, default=None, help="Comma-separated width sweep")
        p.add_argument("--lmax", type=int, default=None, help="Spectral truncation")
        p.add_argument("--thresholds", type=_float_list, default=None, help="Comma-separated levels u")
        p.add_argument("--export-fields", action="store_true", default=None, help="Export one field per setting")

    return parser.parse_args(argv)


def _activation_from_args(args: argparse.Namespace) -> Activation:
    lambda_b = args.lambda_b or 0.0
    match ActivationKind(args.activation):
        case ActivationKind.GAUSSIAN_RBF:
            if args.a2 is None:
                raise ArgumentError("--a2 is required for the gaussian_rbf activation")
            return Activation.gaussian(a2=args.a2, lambda_b=lambda_b)
        case ActivationKind.RELU:
            return Activation.relu(lambda_b)
        case ActivationKind.TANH:
            return Activation.tanh(lambda_b)


def _progress_sampler(args: argparse.Namespace, desc: str) -> tuple[ParallelSampler, tqdm]:
    pbar = tqdm(total=0, unit="chunk", desc=desc, disable=not sys.stderr.isatty())

    def on_progress(completed: int, total: int) -> None:
        if completed == 1 or pbar.total != total:
            pbar.reset(total=total)
        pbar.update(completed - pbar.n)

    return ParallelSampler(args.threads, progress_callback=on_progress), pbar


def _args_hash(args: argparse.Namespace) -> str:
    """SHA-256 of the arguments that determine a query result."""
    skip = {"out", "threads", "verbose"}
    data = {k: str(v) for k, v in vars(args).items() if k not in skip}
    return hashlib.sha256(json.dumps(data, sort_keys=True).encode()).hexdigest()


def cmd_kernel_info(args: argparse.Namespace) -> int:
    kernel = build_kernel(_activation_from_args(args))
    if args.json:
        print(kernel_to_json(kernel))
        return 0
    regime = classify_regime(kernel)
    items = {
        "activation": kernel.activation.label,
        "lambda_W": kernel.lambda_w,
        "series order": kernel.order,
        "quadrature nodes": kernel.quad_nodes,
        "kappa'(1)": kernel.dkappa1,
        "kappa''(1)": kernel.ddkappa1,
        "CRI": kernel.cri.kind.value,
        "regime": regime.tag.value,
    }
    if kernel.has_finite_ddkappa1:
        params = spectral_params(kernel, args.depth, 2)
        fd_first, fd_second = kappa_L_derivs_fd(kernel, args.depth)
        items[f"depth {args.depth}"] = {
            "eta_L": params.eta_L,
            "xi_L": params.xi_L,
            "gamma_L": params.gamma_L,
            "kappa_L'(1) (fd)": fd_first,
            "kappa_L''(1) (fd)": fd_second,
        }
    print_block("kernel", items)
    return 0


def cmd_regime(args: argparse.Namespace) -> int:
    kernel = build_kernel(_activation_from_args(args))
    regime = classify_regime(kernel)
    print(f"{kernel.activation.label}: {regime.tag.value} (kappa'(1) = {regime.dkappa1:.12g})")
    return 0


def cmd_predict(args: argparse.Namespace) -> int:
    kernel = build_kernel(_activation_from_args(args))
    seed = DEFAULT_SEED if args.seed is None else args.seed
    mc = args.mc_samples or DEFAULT_QUERY_SAMPLES
    sampler, pbar = _progress_sampler(args, "predict")
    regime = classify_regime(kernel).tag.value
    with pbar:
        gamma = check_degeneracy(kernel, args.depth, args.d)
        table = prediction_table(kernel, args.depth, args.d, mc, seed, args.threshold, sampler)
        asymptotes = (
            [asymptotic_crit_count(kernel, args.depth, args.d, i, mc, seed, sampler) for i in range(args.d + 1)]
            if args.asymptotic
            else []
        )

    rows = []
    items: dict = {"kernel": kernel.activation.label, "regime": regime, "gamma_L": gamma}
    for p in table.predictions:
        items[f"E[C_{p.index}]"] = f"{p.value:.6g} +/- {p.stderr:.2g}"
        rows.append({"experiment": "predict", "quantity": "theory", **_prediction_row(p, kernel, regime)})
    for p in asymptotes:
        items[f"asymptote C_{p.index}"] = f"{p.value:.6g} +/- {p.stderr:.2g}"
        rows.append({"experiment": "predict", "quantity": "asymptotic", **_prediction_row(p, kernel, regime)})
    items["alternating sum"] = f"{table.morse_sum:.6g} +/- {table.morse_stderr:.2g}"
    print_block(f"predictions at depth {args.depth}", items)

    if args.out is not None:
        reporter = Reporter(args.out, __version__, _args_hash(args), seed, verbose=args.verbose)
        reporter.write_csv("predict.csv", rows)
        print(f"wrote {reporter.written[-1]}")
    return 0


def _prediction_row(p, kernel, regime: str) -> dict:
    return {
        "kernel_id": kernel.activation.label,
        "L": p.depth,
        "d": p.d,
        "i": p.index,
        "u": p.threshold,
        "value": p.value,
        "stderr": p.stderr,
        "regime": regime,
    }


def cmd_goi_estimate(args: argparse.Namespace) -> int:
    seed = DEFAULT_SEED if args.seed is None else args.seed
    mc = args.mc_samples or DEFAULT_QUERY_SAMPLES
    params = GOIParams(args.d, args.c)
    sel = IndexSelector(args.index, args.shift)
    sel.validate(args.d)
    estimator = goi_expectation_oracle if args.method == "eigenvalues" else goi_expectation_mc
    sampler, pbar = _progress_sampler(args, "goi")
    with pbar:
        estimate = estimator(params, sel, mc, seed, sampler)
    print_block(
        "GOI expectation",
        {
            "d": args.d,
            "c": args.c,
            "index": args.index,
            "shift": args.shift,
            "method": args.method,
            "mean": estimate.mean,
            "stderr": estimate.stderr,
            "samples": estimate.n_samples,
        },
    )
    return 0


def _experiment_config(args: argparse.Namespace) -> ExperimentConfig:
    if args.config is not None:
        config = load_config(args.config, args.paper_scale)
        if config.name != args.command:
            raise ArgumentError(f"{args.config} configures {config.name}, not {args.command}")
    else:
        config = default_config(args.command, args.paper_scale)
    return config.with_overrides(
        seed=args.seed,
        output_dir=str(args.out) if args.out is not None else None,
        mc_samples=args.mc_samples,
        activation=args.activation,
        a2=args.a2,
        lambda_b=args.lambda_b,
        depths=args.depths,
        resolutions=args.resolutions,
        replicas=args.replicas,
        width=args.width,
        widths=args.widths,
        lmax=args.lmax,
        thresholds=args.thresholds,
        export_fields=args.export_fields,
    ).validate()


def cmd_experiment(args: argparse.Namespace) -> int:
    config = _experiment_config(args)
    reporter = Reporter(Path(config.output_dir), __version__, config.config_hash(), config.seed, args.verbose)
    print(f"critfield {__version__}: {config.name}")
    print(f"Output: {reporter.output_dir}")

    started = time.monotonic()
    sampler, pbar = _progress_sampler(args, config.name)
    with pbar:
        result = run_experiment(config, sampler)

    stem = config.name.replace("-", "_")
    reporter.write_csv(f"{stem}.csv", result.rows)
    reporter.write_json(f"{stem}.json", {"config": config.to_dict(), "summary": result.summary})
    for name, sample, grid in result.exports:
        reporter.export_field(name, sample, grid)
    reporter.print_summary(config.name, result.summary, time.monotonic() - started)
    return 0


COMMANDS = {
    "kernel-info": cmd_kernel_info,
    "regime": cmd_regime,
    "predict": cmd_predict,
    "goi-estimate": cmd_goi_estimate,
    **{name: cmd_experiment for name in EXPERIMENTS},
}


def main(argv: Optional[list[str]] = None) -> int:
    """Main entry point."""
    args = parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    set_default_workers(args.threads if args.threads is not None else 1)

    try:
        return COMMANDS[args.command](args)
    except KeyboardInterrupt:
        print("\n\nOperation cancelled by user.")
        return 130
    except ArgumentError as e:
        print(f"\nError: {e}", file=sys.stderr)
        return 2
    except CritFieldError as e:
        print(f"\nError: {e}", file=sys.stderr)
        return 3
    except Exception as e:
        print(f"\nError: {e}", file=sys.stderr)
        if args.verbose:
            import traceback

            traceback.print_exc()
        return 1


if __name__ == "__main__":
    sys.exit(main())
