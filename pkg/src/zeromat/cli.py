"""Command-line harness: dataset generation, comparisons, the lock-state
sweep, and model persistence."""
from __future__ import annotations

import argparse
import sys

from .baselines import PmfConfig, train_pmf
from .datasets import (
    SplitSpec,
    ZipfSpec,
    generate_zipf_dataset,
    load_ratings,
    render_ratings_csv,
    save_ratings_csv,
)
from .experiments import (
    ExperimentConfig,
    derive_seeds,
    emit_report,
    render_curve,
    render_report,
    run_comparison,
    run_lockstate_experiment,
)
from .factors import save_factors
from .training import TrainConfig, train_zeromat

ZEROMAT_DEFAULTS = TrainConfig()
PMF_DEFAULTS = PmfConfig()


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except Exception as exc:  # argparse handles its own exits
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zeromat",
        description=(
            "Cold-start recommender lab: a data-free trainer compared against "
            "PMF and random baselines on MovieLens-format, CSV, or synthetic "
            "Zipf data. The Matthew-effect degree reported everywhere is the "
            "Gini coefficient of per-item rating mass."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a synthetic Zipf dataset as CSV")
    _add_zipf_flags(gen, required=True)
    gen.add_argument("--seed", type=int, default=0, help="master random seed")
    gen.add_argument("--out", default=None, help="output path (default: stdout)")
    gen.set_defaults(handler=_cmd_gen)

    compare = sub.add_parser(
        "compare", help="train all methods on one dataset and report metrics"
    )
    compare.add_argument("--data", default=None, help="MovieLens or CSV ratings file")
    _add_zipf_flags(compare, required=False)
    _add_model_flags(compare)
    compare.add_argument("--split", type=float, default=0.8, help="train fraction")
    compare.add_argument("--seed", type=int, default=0, help="master random seed")
    compare.add_argument("--format", choices=("csv", "json"), default="csv")
    compare.add_argument("--out", default=None, help="report path (default: stdout)")
    compare.set_defaults(handler=_cmd_compare)

    lockstate = sub.add_parser(
        "lockstate", help="sweep the uniform-mix knob and track each method's MAE"
    )
    _add_zipf_flags(lockstate, required=True, lambda_list=True)
    _add_model_flags(lockstate)
    lockstate.add_argument("--replicates", type=int, default=5)
    lockstate.add_argument("--split", type=float, default=0.8, help="train fraction")
    lockstate.add_argument("--seed", type=int, default=0, help="master random seed")
    lockstate.add_argument("--format", choices=("csv", "json"), default="csv")
    lockstate.add_argument("--out", default=None, help="curve path (default: stdout)")
    lockstate.set_defaults(handler=_cmd_lockstate)

    train = sub.add_parser("train", help="train one model and persist it")
    train.add_argument("--method", choices=("zeromat", "pmf"), default="zeromat")
    train.add_argument("--data", default=None, help="ratings file (required for pmf)")
    train.add_argument("--users", type=int, default=None)
    train.add_argument("--items", type=int, default=None)
    _add_model_flags(train)
    train.add_argument(
        "--r-max", type=float, default=None, help="rating ceiling override"
    )
    train.add_argument("--seed", type=int, default=0, help="master random seed")
    train.add_argument("--out", required=True, help="model file path")
    train.set_defaults(handler=_cmd_train)

    return parser


def _add_zipf_flags(parser, required: bool, lambda_list: bool = False) -> None:
    parser.add_argument("--users", type=int, default=None, required=required)
    parser.add_argument("--items", type=int, default=None, required=required)
    parser.add_argument(
        "--per-user", type=int, default=None, required=required,
        help="ratings drawn per user",
    )
    parser.add_argument("--zipf-s", type=float, default=1.0, help="popularity exponent")
    if lambda_list:
        parser.add_argument(
            "--lambda", dest="uniform_mix", default="0,0.25,0.5,0.75,1.0",
            help="comma-separated uniform-mix values to sweep",
        )
    else:
        parser.add_argument(
            "--lambda", dest="uniform_mix", type=float, default=0.0,
            help="uniform-mix in [0, 1]: 0 pure Zipf, 1 pure uniform",
        )
    parser.add_argument(
        "--r-max", type=float, default=None,
        help="rating ceiling (synthetic default 5.0; file default: observed max)",
    )


def _add_model_flags(parser) -> None:
    parser.add_argument("--k", type=int, default=10, help="latent dimension")
    parser.add_argument(
        "--eta", type=float, default=None,
        help="learning rate for both trainers (default: each trainer's own)",
    )
    parser.add_argument(
        "--iters", type=int, default=None,
        help="data-free trainer iterations (default: dimension-scaled)",
    )
    parser.add_argument("--epochs", type=int, default=PMF_DEFAULTS.epochs)
    parser.add_argument("--reg", type=float, default=PMF_DEFAULTS.reg)


def _zipf_spec(args) -> ZipfSpec:
    mix = args.uniform_mix if isinstance(args.uniform_mix, float) else 0.0
    return ZipfSpec(
        num_users=args.users,
        num_items=args.items,
        ratings_per_user=args.per_user,
        exponent=args.zipf_s,
        r_max=args.r_max if args.r_max is not None else 5.0,
        uniform_mix=mix,
    )


def _trainer_configs(args, seed_zm: int, seed_pmf: int) -> tuple[TrainConfig, PmfConfig]:
    zm_eta = args.eta if args.eta is not None else ZEROMAT_DEFAULTS.learning_rate
    pmf_eta = args.eta if args.eta is not None else PMF_DEFAULTS.learning_rate
    zeromat = TrainConfig(
        k=args.k, learning_rate=zm_eta, iterations=args.iters, seed=seed_zm
    )
    pmf = PmfConfig(
        k=args.k, learning_rate=pmf_eta, reg=args.reg, epochs=args.epochs, seed=seed_pmf
    )
    return zeromat, pmf


def _cmd_gen(args) -> int:
    dataset = generate_zipf_dataset(_zipf_spec(args), args.seed)
    if args.out is None:
        sys.stdout.write(render_ratings_csv(dataset))
    else:
        save_ratings_csv(dataset, args.out)
    return 0


def _experiment_config(args) -> ExperimentConfig:
    zipf_flags = args.users is not None or args.items is not None or args.per_user is not None
    if (args.data is not None) == zipf_flags:
        raise ValueError(
            "exactly one data source: pass --data, or --users/--items/--per-user"
        )
    s_split, s_zm, s_pmf, s_cfg = derive_seeds(args.seed, 4)
    zeromat, pmf = _trainer_configs(args, s_zm, s_pmf)
    split = SplitSpec(train_fraction=args.split, seed=s_split)
    if args.data is not None:
        return ExperimentConfig(
            data_path=args.data,
            split=split,
            zeromat=zeromat,
            pmf=pmf,
            r_max_override=args.r_max,
            seed=s_cfg,
            out_path=args.out,
            report_format=args.format,
        )
    if args.users is None or args.items is None or args.per_user is None:
        raise ValueError("synthetic source needs --users, --items and --per-user")
    return ExperimentConfig(
        zipf=_zipf_spec(args),
        split=split,
        zeromat=zeromat,
        pmf=pmf,
        seed=s_cfg,
        out_path=args.out,
        report_format=args.format,
    )


def _cmd_compare(args) -> int:
    config = _experiment_config(args)
    reports = run_comparison(config)
    if config.out_path is None:
        sys.stdout.write(render_report(reports, config.report_format))
    else:
        emit_report(reports, config.report_format, config.out_path)
    return 0


def _cmd_lockstate(args) -> int:
    lambdas = [float(part) for part in str(args.uniform_mix).split(",") if part != ""]
    zeromat, pmf = _trainer_configs(args, ZEROMAT_DEFAULTS.seed, PMF_DEFAULTS.seed)
    curve = run_lockstate_experiment(
        _zipf_spec(args),
        lambdas,
        args.replicates,
        split=SplitSpec(train_fraction=args.split),
        zeromat=zeromat,
        pmf=pmf,
        seed=args.seed,
    )
    if args.out is None:
        sys.stdout.write(render_curve(curve, args.format))
    else:
        emit_report(curve, args.format, args.out)
    return 0


def _cmd_train(args) -> int:
    s_zm, s_pmf = derive_seeds(args.seed, 2)
    zeromat, pmf = _trainer_configs(args, s_zm, s_pmf)
    if args.method == "zeromat":
        if args.data is not None:
            dataset = load_ratings(args.data, r_max=args.r_max)
            n_users, n_items = dataset.num_users, dataset.num_items
        elif args.users is not None and args.items is not None:
            n_users, n_items = args.users, args.items
        else:
            raise ValueError("zeromat training needs --users/--items or --data for dimensions")
        run = train_zeromat(n_users, n_items, zeromat)
        save_factors(run.model, args.out, epsilon=zeromat.epsilon, seed=zeromat.seed)
        return 0
    if args.data is None:
        raise ValueError("pmf training needs --data")
    dataset = load_ratings(args.data, r_max=args.r_max)
    run = train_pmf(dataset, pmf)
    save_factors(run.model, args.out, epsilon=0.0, seed=pmf.seed)
    return 0


if __name__ == "__main__":
    sys.exit(main())
