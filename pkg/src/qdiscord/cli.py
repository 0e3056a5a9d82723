"""Command-line interface.

Subcommands cover the full pipeline: dataset generation, exact discord
computation for a stored state, training, evaluation, replicated
experiments, the worked example sweep, and single-state prediction.
Every command echoes its resolved configuration so a run can be
reproduced from its output alone.

Exit codes: 0 on success, 1 on runtime failure, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from .datagen import (
    RejectionStats,
    SamplerConfig,
    build_dataset,
    load_dataset,
    save_dataset,
    state_from_params,
    validate_dataset,
)
from .features import feature_dim, feature_map
from .models import ModelKind, forward
from .quantum_core import (
    OptimizerConfig,
    minimize_conditional_entropy,
    partial_trace,
    read_state_file,
    von_neumann_entropy,
)
from .training import (
    TrainConfig,
    evaluate,
    format_replicate_table,
    load_checkpoint,
    replicate_experiment,
    save_checkpoint,
    train,
    write_replicate_report,
    write_trajectory,
)
from .xstate import (
    DomainError,
    example_analytic_c,
    example_oracle_c,
    example_state,
    example_valid_interval,
)

__all__ = ["FamilyMismatchError", "main"]


class FamilyMismatchError(ValueError):
    """Checkpoint and input disagree on the parameter family."""


def _echo(args: argparse.Namespace) -> None:
    pairs = sorted(vars(args).items())
    print("config: " + " ".join(f"{k}={v}" for k, v in pairs if k != "func"))


def _train_config(args: argparse.Namespace) -> TrainConfig:
    return TrainConfig(
        kind=ModelKind(args.model),
        steps=args.steps,
        lr0=args.lr0,
        decay_factor=args.decay,
        decay_interval=args.decay_interval,
        hidden=args.hidden,
        degree=args.degree,
        batch=args.batch,
        seed=args.seed,
        log_every=args.log_every,
    )


def _add_train_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--model", required=True, choices=[k.value for k in ModelKind])
    parser.add_argument("--steps", type=int, default=300_000)
    parser.add_argument("--lr0", type=float, default=0.2)
    parser.add_argument("--decay", type=float, default=0.98)
    parser.add_argument("--decay-interval", type=int, default=3000)
    parser.add_argument("--hidden", type=int, default=16)
    parser.add_argument("--degree", type=int, default=6)
    parser.add_argument("--batch", type=int, default=None)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--log-every", type=int, default=1000)


def _progress_printer(step: int, lr: float, loss: float) -> None:
    print(f"step {step} lr {lr:.6g} loss {loss:.6e}", flush=True)


def _cmd_feature_dim(args: argparse.Namespace) -> int:
    _echo(args)
    print(f"feature_dim(n={args.n}, L={args.degree}) = {feature_dim(args.n, args.degree)}")
    return 0


def _cmd_gen_data(args: argparse.Namespace) -> int:
    _echo(args)
    cfg = SamplerConfig(args.family, args.seed, args.max_rejections)
    stats = RejectionStats()
    dataset = build_dataset(cfg, args.size, threads=args.threads, stats=stats)
    save_dataset(dataset, args.out, seed=args.seed)
    print(f"wrote {dataset.size} {dataset.family} records to {args.out}")
    if stats.attempts:
        print(
            f"rejection sampling: {stats.accepted}/{stats.attempts} accepted"
            f" (rate {stats.acceptance_rate:.4f})"
        )
    print(f"labels: min {dataset.labels.min():.6f} max {dataset.labels.max():.6f}")
    return 0


def _cmd_discord(args: argparse.Namespace) -> int:
    _echo(args)
    rho = read_state_file(args.state)
    if rho.dim != 4:
        raise ValueError("discord needs a two-qubit (4x4) state")
    cfg = OptimizerConfig(args.n_theta, args.n_phi, args.refine_starts, args.tol)
    s_a = von_neumann_entropy(partial_trace(rho, "A"))
    s_b = von_neumann_entropy(partial_trace(rho, "B"))
    s_ab = von_neumann_entropy(rho)
    result = minimize_conditional_entropy(rho, cfg)
    classical = max(0.0, s_a - result.c_min)
    discord = max(0.0, s_b - s_ab + result.c_min)
    print(f"S(rho_A) = {s_a:.12f}")
    print(f"S(rho_B) = {s_b:.12f}")
    print(f"S(rho_AB) = {s_ab:.12f}")
    print(f"c_min = {result.c_min:.12f}")
    print(f"argmin: theta = {result.argmin.theta:.12f} phi = {result.argmin.phi:.12f}")
    print(f"evaluations = {result.evaluations}")
    print(f"mutual_information = {s_a + s_b - s_ab:.12f}")
    print(f"classical_correlation = {classical:.12f}")
    print(f"quantum_discord = {discord:.12f}")
    return 0


def _cmd_train(args: argparse.Namespace) -> int:
    _echo(args)
    dataset, _ = load_dataset(args.data)
    cfg = _train_config(args)
    record, weights = train(cfg, dataset, progress=_progress_printer)
    if record.degenerate_start:
        print("warning: degenerate initialization (all entropy units dead)", file=sys.stderr)
    save_checkpoint(weights, cfg, args.out)
    print(f"final train loss {record.train_loss:.6e} wall {record.wall_time_s:.1f}s")
    print(f"wrote checkpoint to {args.out}")
    if args.log:
        write_trajectory(record, args.log)
        print(f"wrote trajectory to {args.log}")
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    _echo(args)
    weights, cfg = load_checkpoint(args.checkpoint)
    dataset, _ = load_dataset(args.data)
    _check_family(weights.feature_dim, cfg.degree, dataset.param_dim)
    result = evaluate(weights, dataset, cfg.degree)
    print(f"loss = {result.loss:.6e} over {dataset.size} samples")
    if args.scatter_out:
        rows = ["label\tprediction"]
        rows += [f"{c:.17g}\t{p:.17g}" for c, p in result.pairs]
        with open(args.scatter_out, "w", encoding="ascii") as fh:
            fh.write("\n".join(rows) + "\n")
        print(f"wrote scatter pairs to {args.scatter_out}")
    return 0


def _cmd_replicate(args: argparse.Namespace) -> int:
    _echo(args)
    if args.data:
        train_set, _ = load_dataset(args.data)
        if not args.test_data:
            raise ValueError("--test-data is required when --data is given")
        test_set, _ = load_dataset(args.test_data)
    else:
        if not args.family:
            raise ValueError("give either --data/--test-data or --family with sizes")
        print(f"generating {args.family} datasets (train {args.train_size}, test {args.test_size})")
        train_set = build_dataset(
            SamplerConfig(args.family, args.data_seed), args.train_size, threads=args.threads
        )
        test_set = build_dataset(
            SamplerConfig(args.family, args.data_seed + 1), args.test_size, threads=args.threads
        )
    cfg = _train_config(args)
    report = replicate_experiment(cfg, train_set, test_set, args.runs)
    print(format_replicate_table(report), end="")
    if args.out:
        write_replicate_report(report, args.out)
        print(f"wrote report to {args.out}")
    return 0


def _cmd_sweep_example(args: argparse.Namespace) -> int:
    _echo(args)
    lo, hi = example_valid_interval()
    print(f"normalized family is a valid state for a in [{lo:.4f}, {hi:.4f}]")
    weights = cfg = None
    if args.checkpoint:
        weights, cfg = load_checkpoint(args.checkpoint)
        _check_family(weights.feature_dim, cfg.degree, 7)
    rows = ["a\ts_z\ts_x\ts_y\tanalytic_min\toracle_c\tmodel_pred\tvalid"]
    for a in np.linspace(args.a_min, args.a_max, args.count):
        valid = lo - 1e-12 <= a <= hi + 1e-12
        try:
            curves = example_analytic_c(a)
            s_z, s_x, s_y, c_min = curves.s_z, curves.s_x, curves.s_y, curves.c_min
        except DomainError:
            s_z = s_x = s_y = c_min = float("nan")
        oracle = example_oracle_c(a) if valid else float("nan")
        pred = float("nan")
        if weights is not None and valid:
            raw = example_state(a)
            matrix = raw / raw.trace().real
            params = np.array(
                [
                    matrix[0, 0].real,
                    matrix[1, 1].real,
                    matrix[2, 2].real,
                    matrix[0, 3].real,
                    matrix[0, 3].imag,
                    matrix[1, 2].real,
                    matrix[1, 2].imag,
                ]
            )
            pred = float(forward(weights, feature_map(params, cfg.degree)[None, :])[0][0])
        rows.append(
            f"{a:.10g}\t{s_z:.10g}\t{s_x:.10g}\t{s_y:.10g}\t{c_min:.10g}"
            f"\t{oracle:.10g}\t{pred:.10g}\t{int(valid)}"
        )
    text = "\n".join(rows) + "\n"
    if args.out:
        with open(args.out, "w", encoding="ascii") as fh:
            fh.write(text)
        print(f"wrote {args.count} sweep rows to {args.out}")
    else:
        print(text, end="")
    return 0


def _check_family(features: int, degree: int, param_dim: int) -> None:
    expected = feature_dim(param_dim, degree)
    if expected != features:
        raise FamilyMismatchError(
            f"checkpoint expects {features} features at degree {degree},"
            f" but {param_dim}-parameter input expands to {expected}"
        )


def _cmd_predict(args: argparse.Namespace) -> int:
    _echo(args)
    weights, cfg = load_checkpoint(args.checkpoint)
    with open(args.params, encoding="ascii") as fh:
        params = np.array([float(t) for t in fh.read().split()])
    _check_family(weights.feature_dim, cfg.degree, params.size)
    prediction = float(forward(weights, feature_map(params, cfg.degree)[None, :])[0][0])
    print(f"prediction = {prediction:.12f}")
    if args.oracle:
        family = {7: "xstate", 9: "real"}.get(params.size)
        if family is None:
            raise ValueError(f"no state family has {params.size} parameters")
        rho = state_from_params(params, family)
        exact = minimize_conditional_entropy(rho).c_min
        print(f"oracle = {exact:.12f}")
        print(f"abs_error = {abs(exact - prediction):.12f}")
    return 0


def _cmd_validate_data(args: argparse.Namespace) -> int:
    _echo(args)
    dataset, _ = load_dataset(args.data)
    count = validate_dataset(dataset)
    print(f"{count}/{dataset.size} records satisfy the {dataset.family} constraints")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qdiscord",
        description="Quantum discord oracle and learned surrogates for two-qubit states.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("feature-dim", help="size of the polynomial feature expansion")
    p.add_argument("-n", type=int, required=True, help="number of parameters")
    p.add_argument("--degree", "-L", type=int, required=True, help="maximum total degree")
    p.set_defaults(func=_cmd_feature_dim)

    p = sub.add_parser("gen-data", help="sample states and label them with the oracle")
    p.add_argument("--family", required=True, choices=["xstate", "real"])
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--max-rejections", type=int, default=10_000)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen_data)

    p = sub.add_parser("discord", help="exact discord of a stored state")
    p.add_argument("--state", required=True, help="state file path")
    p.add_argument("--n-theta", type=int, default=33)
    p.add_argument("--n-phi", type=int, default=64)
    p.add_argument("--refine-starts", type=int, default=3)
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=_cmd_discord)

    p = sub.add_parser("train", help="train one model on a labeled dataset")
    p.add_argument("--data", required=True)
    _add_train_flags(p)
    p.add_argument("--out", required=True, help="checkpoint path")
    p.add_argument("--log", help="trajectory output path")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("eval", help="loss of a checkpoint on a dataset")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--scatter-out", help="write (label, prediction) pairs here")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("replicate", help="repeat training with re-seeded weights")
    p.add_argument("--data", help="training dataset (with --test-data)")
    p.add_argument("--test-data")
    p.add_argument("--family", choices=["xstate", "real"], help="generate datasets instead")
    p.add_argument("--train-size", type=int, default=6000)
    p.add_argument("--test-size", type=int, default=2000)
    p.add_argument("--data-seed", type=int, default=100)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--runs", type=int, default=5)
    _add_train_flags(p)
    p.add_argument("--out", help="report path")
    p.set_defaults(func=_cmd_replicate)

    p = sub.add_parser("sweep-example", help="curves/oracle/prediction over the example family")
    p.add_argument("--a-min", type=float, default=-0.07)
    p.add_argument("--a-max", type=float, default=1.0)
    p.add_argument("--count", type=int, default=215)
    p.add_argument("--checkpoint", help="optional model for the prediction column")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_sweep_example)

    p = sub.add_parser("predict", help="model prediction for one parameter vector")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--params", required=True, help="text file of parameter values")
    p.add_argument("--oracle", action="store_true", help="also run the exact oracle")
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("validate-data", help="re-check every dataset record")
    p.add_argument("--data", required=True)
    p.set_defaults(func=_cmd_validate_data)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - single reporting point for runtime errors
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
