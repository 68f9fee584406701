"""Command-line entry point.

Subcommands: generate, train, disaggregate, evaluate, compare, init-study.
Exit codes: 0 success, 1 usage error, 2 data/validation error, 3 numerical
failure.  Identical flags, files and seeds give byte-identical outputs.
"""

import argparse
import csv
import os
import sys

from . import __version__
from .data import N_PERIODS, load_climate, load_dataset, split_by_site
from .engine import DisaggConfig, disaggregate, fit_config, initial_values
from .errors import DataError, GrassDisaggError, MissingCumulative, NumericalError
from .evaluation import evaluate_methods, init_ratio_study, protocol_configs
from .regressors import load_regressor, save_regressor
from .report import write_ratio_report, write_report
from .synthgen import PRESETS, generate_dataset, write_dataset
from .transforms import forward


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


# Flags that override DisaggConfig fields (flag dest == field name).
_CONFIG_FLAGS = (
    ("--order-p", "order_p", int),
    ("--preprocessing", "preprocessing", str),
    ("--regressor", "regressor", str),
    ("--initialization", "initialization", str),
    ("--average-init-value", "average_init_value", float),
    ("--postprocessing", "postprocessing", str),
    ("--svr-box", "svr_box", float),
    ("--svr-epsilon", "svr_epsilon", float),
    ("--svr-gamma", "svr_gamma", float),
    ("--n-trees", "n_trees", int),
    ("--min-leaf", "min_leaf", int),
    ("--mtry", "mtry", int),
    ("--sample-cap", "sample_cap", int),
)


def _add_config_flags(parser):
    parser.add_argument("--config", help="flat key = value configuration file")
    for flag, dest, typ in _CONFIG_FLAGS:
        parser.add_argument(flag, dest=dest, type=typ, default=argparse.SUPPRESS)


def parse_config_file(path):
    """Flat ``key = value`` lines; # starts a comment."""
    mapping = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for n, line in enumerate(fh, start=1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise DataError(f"{path}:{n}: expected key = value, got {line!r}")
                key, value = line.split("=", 1)
                mapping[key.strip()] = value.strip()
    except OSError as exc:
        raise DataError(f"cannot read config file {path}: {exc}") from None
    return mapping


def _build_config(args, seed=None):
    """Defaults < config file < command-line flags."""
    mapping = {}
    if getattr(args, "config", None):
        mapping.update(parse_config_file(args.config))
    for _, dest, _ in _CONFIG_FLAGS:
        if hasattr(args, dest):
            mapping[dest] = getattr(args, dest)
    if seed is not None:
        mapping["seed"] = seed
    return DisaggConfig.from_mapping(mapping)


def _header(command, seed, cfg=None, extra=None):
    info = {"command": command, "seed": seed, "version": __version__}
    if cfg is not None:
        info["config_hash"] = cfg.config_hash()
    if extra:
        info.update(extra)
    return info


def _cmd_generate(args):
    factory = PRESETS[args.preset]
    overrides = {"seed": args.seed}
    if args.sites is not None:
        overrides["n_sites"] = args.sites
    if args.years is not None:
        overrides["n_years"] = args.years
    if args.first_year is not None:
        overrides["first_year"] = args.first_year
    params = factory(**overrides)
    ds = generate_dataset(params)
    write_dataset(ds, args.out)
    print(f"wrote {len(ds)} records ({params.n_sites} sites x {params.n_years} years) to {args.out}")
    return 0


def _cmd_train(args):
    cfg = _build_config(args, seed=args.seed)
    ds = load_dataset(args.data)
    reg = fit_config(ds, cfg)
    save_regressor(reg, args.model_out, config=cfg.to_mapping())
    print(f"trained {cfg.label()} on {len(ds)} records -> {args.model_out}")
    return 0


def _cmd_disaggregate(args):
    reg, stored = load_regressor(args.model)
    mapping = dict(stored or {})
    for _, dest, _ in _CONFIG_FLAGS:
        if hasattr(args, dest):
            mapping[dest] = getattr(args, dest)
    cfg = DisaggConfig.from_mapping(mapping)
    series = load_climate(args.climate)

    out_rows = []
    for item in series:
        cumulative = args.cumulative
        if cfg.initialization == "concrete" and item.growth is None:
            raise DataError(
                f"site {item.site_id}, year {item.year}: concrete initialization needs "
                "growth values; use --initialization average"
            )
        if cfg.postprocessing != "none" and cumulative is None:
            raise MissingCumulative(
                f"postprocessing {cfg.postprocessing!r} needs --cumulative"
            )
        if cfg.initialization == "concrete":
            init = forward(cfg.preprocessing, item.growth)[:cfg.order_p]
        else:
            init = initial_values(cfg, record=None)
        result = disaggregate(reg, item.climate, cumulative, cfg, init)
        for t in range(N_PERIODS):
            truth = "" if item.growth is None else repr(float(item.growth[t]))
            out_rows.append(
                (item.site_id, item.year, t + 1, truth, repr(float(result.reconstructed[t])))
            )
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("id", "year", "period", "growth_true", "growth_pred"))
        writer.writerows(out_rows)
    print(f"reconstructed {len(series)} series -> {args.out}")
    return 0


def _cmd_evaluate(args):
    cfg = _build_config(args, seed=args.seed)
    ds = load_dataset(args.data)
    train, test = split_by_site(ds, args.split_fraction, args.seed)
    report = evaluate_methods(train, test, [cfg], jobs=args.jobs)
    write_report(report, args.report_dir,
                 header_info=_header("evaluate", args.seed, cfg,
                                     {"split_fraction": args.split_fraction,
                                      "train_records": len(train),
                                      "test_records": len(test)}),
                 boxplot=args.boxplot)
    print(f"evaluated {cfg.label()} + naive on {len(test)} test series -> {args.report_dir}")
    return 0


def _cmd_compare(args):
    ds = load_dataset(args.data)
    train, test = split_by_site(ds, args.split_fraction, args.seed)
    configs = protocol_configs(
        seed=args.seed,
        svr_sample_cap=args.svr_sample_cap,
        forest_sample_cap=args.forest_sample_cap,
    )
    report = evaluate_methods(train, test, configs, jobs=args.jobs)
    write_report(report, args.report_dir,
                 header_info=_header("compare", args.seed, None,
                                     {"split_fraction": args.split_fraction,
                                      "train_records": len(train),
                                      "test_records": len(test),
                                      "svr_sample_cap": args.svr_sample_cap,
                                      "forest_sample_cap": args.forest_sample_cap}),
                 boxplot=args.boxplot)
    print(f"compared {len(report.methods)} methods on {len(test)} test series -> {args.report_dir}")
    return 0


_MODEL_GROUPS = {
    "lm": ("linear",),
    "svr": ("svr",),
    "rf": ("forest",),
    "all": ("linear", "svr", "forest"),
}


def _cmd_init_study(args):
    ds = load_dataset(args.data)
    train, test = split_by_site(ds, args.split_fraction, args.seed)
    kinds = _MODEL_GROUPS.get(args.models)
    if kinds is None:
        raise DataError(f"--models must be one of {sorted(_MODEL_GROUPS)}")
    configs = [
        cfg for cfg in protocol_configs(
            seed=args.seed,
            svr_sample_cap=args.svr_sample_cap,
            forest_sample_cap=args.forest_sample_cap,
        )
        if cfg.regressor in kinds
    ]
    study = init_ratio_study(train, test, configs)
    write_ratio_report(study, args.report_dir,
                       header_info=_header("init-study", args.seed, None,
                                           {"split_fraction": args.split_fraction,
                                            "models": args.models}))
    print(f"initialization study over {len(configs)} methods -> {args.report_dir}")
    return 0


def build_parser():
    parser = _Parser(prog="grassdisagg",
                     description="Disaggregate annual grass growth into 10-day series.")
    parser.add_argument("--version", action="version", version=f"grassdisagg {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="write a synthetic dataset CSV")
    p.add_argument("--preset", choices=sorted(PRESETS), default="default")
    p.add_argument("--sites", type=int, default=None)
    p.add_argument("--years", type=int, default=None)
    p.add_argument("--first-year", type=int, default=None)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("train", help="fit one model and serialize it")
    p.add_argument("--data", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--model-out", required=True)
    _add_config_flags(p)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("disaggregate", help="reconstruct series from climate")
    p.add_argument("--model", required=True)
    p.add_argument("--climate", required=True)
    p.add_argument("--cumulative", type=float, default=None)
    p.add_argument("--out", required=True)
    for flag, dest, typ in _CONFIG_FLAGS:
        p.add_argument(flag, dest=dest, type=typ, default=argparse.SUPPRESS)
    p.set_defaults(func=_cmd_disaggregate)

    p = sub.add_parser("evaluate", help="evaluate one configured method + naive")
    p.add_argument("--data", required=True)
    p.add_argument("--split-fraction", type=float, default=0.3)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--report-dir", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--boxplot", action="store_true")
    _add_config_flags(p)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("compare", help="run the 9-model + naive comparison")
    p.add_argument("--data", required=True)
    p.add_argument("--split-fraction", type=float, default=0.3)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--report-dir", required=True)
    p.add_argument("--svr-sample-cap", type=int, default=2000)
    p.add_argument("--forest-sample-cap", type=int, default=5000)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--boxplot", action="store_true")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("init-study", help="average vs concrete initialization ratios")
    p.add_argument("--data", required=True)
    p.add_argument("--split-fraction", type=float, default=0.3)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--report-dir", required=True)
    p.add_argument("--models", default="lm",
                   help="lm (default), svr, rf, or all")
    p.add_argument("--svr-sample-cap", type=int, default=2000)
    p.add_argument("--forest-sample-cap", type=int, default=5000)
    p.set_defaults(func=_cmd_init_study)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    try:
        return args.func(args)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except GrassDisaggError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
