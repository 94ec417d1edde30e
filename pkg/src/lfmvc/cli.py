"""Command-line entry point: ``lfmvc {kernels,run,synth,bound,bench}``."""
import argparse
import json
import logging
import sys
from pathlib import Path

from . import io
from .analysis import generalization_bound
from .errors import ConfigError, DataError, LFMVCError
from .experiment import ExperimentConfig, emit_results, run_experiment
from .kernels import KernelSpec, compute_kernel, preprocess

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_SOLVER = 0, 2, 3, 4

log = logging.getLogger("lfmvc")


def _spec_list(raw, count):
    specs = [KernelSpec.from_dict(json.loads(s)) for s in raw] if raw else [KernelSpec()]
    if len(specs) == 1:
        return specs * count
    if len(specs) != count:
        raise ConfigError(f"got {len(specs)} kernel specs for {count} feature files")
    return specs


def cmd_kernels(args):
    specs = _spec_list(args.spec, len(args.features))
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    suffix = ".bin" if args.binary else ".csv"
    for p, (path, spec) in enumerate(zip(args.features, specs)):
        K = compute_kernel(io.read_features(path), spec)
        if args.preprocess:
            K = preprocess(K)
        dest = out / f"kernel_{p}{suffix}"
        io.write_kernel(dest, K)
        print(dest)
    return EXIT_OK


_OVERRIDES = ("label_file", "kernel_files", "feature_files", "k", "algorithm", "lambda_grid",
              "tau_fraction_grid", "restarts", "eps0", "max_iter", "seed", "preprocess",
              "retain_iterates", "row_normalize", "workers")


def cmd_run(args):
    overrides = {key: getattr(args, key) for key in _OVERRIDES if getattr(args, key) is not None}
    if args.kernel_spec is not None:
        overrides["kernel_specs"] = [json.loads(s) for s in args.kernel_spec]
    if args.config:
        config = ExperimentConfig.from_file(args.config, overrides)
    else:
        config = ExperimentConfig.from_dict(overrides)
    record = run_experiment(config)
    for path in emit_results(record, args.out_dir):
        log.info("wrote %s", path)
    summary = record.summary
    print(json.dumps({k: summary[k] for k in ("n_cells", "failed_cells", "best_by_acc") if k in summary}, indent=2))
    if summary["failed_cells"] == summary["n_cells"]:
        first = next(c["error"] for c in record.cells if c["error"])
        print(f"error: every grid cell failed; first error: {first}", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


def cmd_synth(args):
    from .synth import write_synthetic

    paths, labels = write_synthetic(args.out_dir, n=args.n, k=args.k, m=args.m, noise_view=args.noise_view,
                                    seed=args.seed, separation=args.separation, spread=args.spread)
    config = {"feature_files": [p.name for p in paths], "label_file": labels.name,
              "kernel_specs": [{"kind": "linear"}], "algorithm": "lf_lam", "k": args.k}
    cfg_path = Path(args.out_dir) / "config.json"
    cfg_path.write_text(json.dumps(config, indent=2) + "\n")
    for p in [*paths, labels, cfg_path]:
        print(p)
    return EXIT_OK


def cmd_bound(args):
    value = generalization_bound(args.n, args.m, args.k, args.delta)
    print(json.dumps({"n": args.n, "m": args.m, "k": args.k, "delta": args.delta, "bound": value}))
    return EXIT_OK


def cmd_bench(args):
    from . import bench

    if args.backends:
        result = bench.compare_backends(n=args.backend_n, k=args.k)
    else:
        result = bench.scaling_sweep(ns=tuple(args.ns), m=args.m, k=args.k, local=not args.global_)
    print(json.dumps(result, indent=2))
    return EXIT_OK


def _bool_pair(parser, name, help):
    group = parser.add_mutually_exclusive_group()
    dest = name.replace("-", "_")
    group.add_argument(f"--{name}", dest=dest, action="store_true", default=None, help=help)
    group.add_argument(f"--no-{name}", dest=dest, action="store_false")


def build_parser():
    parser = argparse.ArgumentParser(prog="lfmvc", description="Late-fusion multi-view kernel clustering")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kernels", help="compute kernel files from feature CSVs")
    p.add_argument("features", nargs="+", help="one feature CSV per view")
    p.add_argument("--spec", action="append", help='kernel spec JSON, e.g. \'{"kind": "gaussian", "sigma": 1}\'; '
                   "give once for all views or once per view")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--binary", action="store_true", help="write the 8-byte-header float64 format")
    p.add_argument("--preprocess", action="store_true", help="center then normalize before writing")
    p.set_defaults(func=cmd_kernels)

    p = sub.add_parser("run", help="run an experiment grid")
    p.add_argument("--config", help="ExperimentConfig JSON; flags below override its fields")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--label-file")
    p.add_argument("--kernel-files", nargs="+")
    p.add_argument("--feature-files", nargs="+")
    p.add_argument("--kernel-spec", action="append", help="kernel spec JSON (repeatable)")
    p.add_argument("--k", type=int)
    p.add_argument("--algorithm", choices=("a_mkkm", "sb_kkm", "mkkm", "lf_gam", "lf_lam"))
    p.add_argument("--lambda-grid", type=float, nargs="+")
    p.add_argument("--tau-fraction-grid", type=float, nargs="+")
    p.add_argument("--restarts", type=int)
    p.add_argument("--eps0", type=float)
    p.add_argument("--max-iter", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    _bool_pair(p, "preprocess", "center and normalize kernels")
    _bool_pair(p, "retain-iterates", "keep per-iteration iterates and write trace CSVs")
    _bool_pair(p, "row-normalize", "scale partition rows to unit norm before Lloyd")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("synth", help="write a synthetic multi-view blob dataset")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--n", type=int, default=300)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--noise-view", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--separation", type=float, default=2.0)
    p.add_argument("--spread", type=float, default=1.0)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("bound", help="generalization bound calculator")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--delta", type=float, default=0.05)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("bench", help="per-iteration scaling sweep, or numba-vs-numpy kernel timings")
    p.add_argument("--ns", type=int, nargs="+", default=[500, 1000, 2000, 4000])
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--global", dest="global_", action="store_true", help="time the global solver sweep")
    p.add_argument("--backends", action="store_true", help="compare the numba and numpy kernel paths")
    p.add_argument("--backend-n", type=int, default=2000)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except json.JSONDecodeError as exc:
        print(f"config error: bad JSON: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, FileNotFoundError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except LFMVCError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
