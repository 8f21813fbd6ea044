"""Command-line front end.

Four subcommands: simulate (draw a mixture with ground truth), separate
(run a separation algorithm), diagnose (estimate the decomposition terms),
verify (run the identity suite).  Outputs are CSV for data and JSON for
reports; every run with a fixed seed writes byte-identical files.  Exit
codes: 0 success, 1 algorithmic failure, 2 bad input.
"""
import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .algorithms import (SolverConfig, orthogonal_ica, relative_gradient_ica)
from .data import (Dataset, MixingModel, random_mixing, read_csv, simulate,
                   write_csv)
from .errors import IcageoError, InvalidConfig, IoError, exit_code_for
from .estimators import score_table
from .evaluation import amari_index, diagnose
from .gaussian import correlation_C, sample_covariance
from .oracle import builtin_suite, load_verify_spec
from .rng import Rng
from .sources import parse_source

CLI_SCORES = ("tanh", "cube", "adaptive")
CLI_ALGORITHMS = ("relative_gradient", "orthogonal")


def _json_dump(path: Path, obj) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(obj, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def _load_config_file(path) -> dict:
    """Flat key=value file; '#' starts a comment, blank lines ignored."""
    out = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                text = line.split("#", 1)[0].strip()
                if not text:
                    continue
                if "=" not in text:
                    raise InvalidConfig(
                        f"{path}: line {lineno}: expected key=value")
                key, value = text.split("=", 1)
                out[key.strip().replace("-", "_")] = value.strip()
    except OSError as exc:
        raise IoError(f"cannot read config {path}: {exc}") from exc
    return out


class _Options:
    """Merged view of CLI flags, config-file entries, and defaults.

    Command-line flags win over the config file, which wins over built-in
    defaults; the seed's last fallback is the ICAGEO_SEED environment
    variable.
    """

    def __init__(self, args: argparse.Namespace):
        self.args = vars(args)
        cfg_path = self.args.get("config")
        self.file = _load_config_file(cfg_path) if cfg_path else {}

    def get(self, key: str, default=None, cast=None):
        value = self.args.get(key)
        if value is None and key in self.file:
            value = self.file[key]
        if value is None:
            value = default
        if value is not None and cast is not None:
            try:
                value = cast(value)
            except (TypeError, ValueError) as exc:
                raise InvalidConfig(f"bad value for {key}: {value!r}") from exc
        return value

    def seed(self) -> int:
        value = self.get("seed")
        if value is None:
            value = os.environ.get("ICAGEO_SEED", "0")
        try:
            return int(value)
        except ValueError as exc:
            raise InvalidConfig(f"seed must be an integer, got {value!r}") from exc


def _outdir(opts: _Options) -> Path:
    out = Path(opts.get("output_dir", "."))
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create output directory {out}: {exc}") from exc
    return out


def _centered(data: Dataset, center: bool) -> Dataset:
    if not center:
        return data
    return Dataset(data.samples - data.samples.mean(axis=0),
                   data.channel_names)


# -- simulate --------------------------------------------------------------

def cmd_simulate(opts: _Options) -> int:
    sources_text = opts.get("sources")
    if not sources_text:
        raise InvalidConfig(
            "simulate needs --sources, e.g. "
            "`icageo simulate --sources laplace,uniform --samples 20000`")
    specs = [parse_source(tok) for tok in str(sources_text).split(",") if tok]
    if not specs:
        raise InvalidConfig("--sources lists no source families")
    T = opts.get("samples", 20000, int)
    seed = opts.seed()
    cond = opts.get("cond", 5.0, float)
    rng = Rng(seed)
    mixing_path = opts.get("mixing")
    if mixing_path:
        try:
            with open(mixing_path, "r", encoding="utf-8") as fh:
                A = np.asarray(json.load(fh)["mixing"], dtype=float)
        except OSError as exc:
            raise IoError(f"cannot read {mixing_path}: {exc}") from exc
        except (json.JSONDecodeError, KeyError) as exc:
            raise InvalidConfig(
                f"{mixing_path}: expected JSON with a 'mixing' matrix") from exc
    else:
        A = random_mixing(len(specs), rng.child(1000), cond)
    model = MixingModel(A, tuple(specs))
    X, S = simulate(model, T, rng)
    if all(s.family == "gaussian" for s in specs):
        print("warning: Gaussian-only mixture is not blindly separable; "
              "second-order statistics fix it only up to rotation",
              file=sys.stderr)
    out = _outdir(opts)
    write_csv(out / "X.csv", X)
    write_csv(out / "S.csv", S)
    _json_dump(out / "model.json", {
        "mixing": A.tolist(),
        "sources": [s.label() for s in specs],
        "samples": T,
        "seed": seed,
        "version": __version__,
    })
    print(f"wrote {out / 'X.csv'}, {out / 'S.csv'}, {out / 'model.json'}")
    return 0


# -- separate ---------------------------------------------------------------

def _load_model(path) -> MixingModel:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
        A = np.asarray(obj["mixing"], dtype=float)
        specs = tuple(parse_source(s) for s in obj["sources"])
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise InvalidConfig(f"{path}: malformed model file") from exc
    return MixingModel(A, specs)


def cmd_separate(opts: _Options) -> int:
    data = read_csv(opts.get("input"))
    data = _centered(data, bool(opts.get("center", False)))
    algorithm = opts.get("algorithm", "relative_gradient")
    if algorithm not in CLI_ALGORITHMS:
        raise InvalidConfig(f"unknown algorithm {algorithm!r}; choose from "
                            f"{', '.join(CLI_ALGORITHMS)}")
    score = opts.get("score", "adaptive")
    if score not in CLI_SCORES:
        raise InvalidConfig(f"unknown score {score!r}; choose from "
                            f"{', '.join(CLI_SCORES)}")
    config = SolverConfig(step=opts.get("step", 0.1, float),
                          max_iter=opts.get("max_iter", 2000, int),
                          tol=opts.get("tol", 1e-4, float),
                          score=score,
                          seed=opts.seed())
    if algorithm == "relative_gradient":
        result = relative_gradient_ica(data, config)
    else:
        result = orthogonal_ica(data, config)
    out = _outdir(opts)
    _json_dump(out / "B.json", {"demixing": result.demixing.tolist()})
    write_csv(out / "Y.csv", result.recovered)
    try:
        with open(out / "trace.csv", "w", encoding="utf-8") as fh:
            fh.write("iteration,value\n")
            for k, v in enumerate(result.trajectory):
                fh.write(f"{k},{v:.17g}\n")
    except OSError as exc:
        raise IoError(f"cannot write trace.csv: {exc}") from exc
    report = {
        "algorithm": algorithm,
        "score": score,
        "converged": result.converged,
        "iterations": result.iterations,
        "stationarity_norm": float(result.trajectory[-1]),
        "no_improvement": result.no_improvement,
        "correlation_C": correlation_C(sample_covariance(result.recovered)),
    }
    model_path = opts.get("model")
    if model_path:
        model = _load_model(model_path)
        report["amari_index"] = amari_index(result.demixing @ model.mixing).value
    _json_dump(out / "report.json", report)
    print(f"converged={report['converged']} iterations={report['iterations']} "
          f"stationarity_norm={report['stationarity_norm']:.3e}"
          + (f" amari_index={report['amari_index']:.4f}"
             if "amari_index" in report else ""))
    return 0


# -- diagnose ----------------------------------------------------------------

def cmd_diagnose(opts: _Options) -> int:
    data = read_csv(opts.get("input"))
    data = _centered(data, bool(opts.get("center", False)))
    report = diagnose(data, seed=opts.seed())
    out = _outdir(opts)
    _json_dump(out / "report.json", report.to_json())
    try:
        with open(out / "plotdata.csv", "w", encoding="utf-8") as fh:
            fh.write("channel,position,density,score\n")
            if data.T >= 1000:
                for i, name in enumerate(data.names()):
                    table = score_table(data.column(i))
                    for g, d, p in zip(table.grid, table.density, table.psi):
                        fh.write(f"{name},{g:.17g},{d:.17g},{p:.17g}\n")
    except OSError as exc:
        raise IoError(f"cannot write plotdata.csv: {exc}") from exc
    parts = [f"correlation={report.correlation:.4f}",
             "sum_negentropy={:.4f}".format(
                 sum(g.value for g in report.marginal_negentropies))]
    if report.mi is not None:
        parts.insert(0, f"mi={report.mi.value:.4f}")
    print(" ".join(parts))
    return 0


# -- verify -------------------------------------------------------------------

def cmd_verify(opts: _Options) -> int:
    spec_path = opts.get("spec")
    step = opts.get("step", 0.01, float)
    if spec_path:
        checks = load_verify_spec(spec_path)
    else:
        checks = builtin_suite(step=step)
    out = _outdir(opts)
    all_passed = all(c["passed"] for c in checks)
    _json_dump(out / "identities.json",
               {"checks": checks, "all_passed": all_passed})
    for c in checks:
        status = "PASS" if c["passed"] else "FAIL"
        print(f"{status} {c['name']}: residual {c['residual']:.3e} "
              f"(threshold {c['threshold']:.0e})")
    print(f"{sum(c['passed'] for c in checks)}/{len(checks)} identities passed")
    return 0 if all_passed else 1


# -- argument parsing ----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="icageo",
        description="ICA with an information-geometric audit trail: simulate "
                    "mixtures, separate them, and verify the divergence "
                    "identities that justify the objective.")
    parser.add_argument("--version", action="version",
                        version=f"icageo {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="flat key=value config file; "
                       "command-line flags override it")
        p.add_argument("--seed", type=int, default=None,
                       help="64-bit seed (default: $ICAGEO_SEED or 0)")
        p.add_argument("--output-dir", dest="output_dir", default=None,
                       help="directory for output files (default: .)")

    p = sub.add_parser("simulate", help="draw a source mixture with ground truth")
    common(p)
    p.add_argument("--sources", default=None,
                   help="comma list, e.g. laplace,uniform,"
                        "generalized-gaussian(4)")
    p.add_argument("--samples", type=int, default=None, help="observation count")
    p.add_argument("--cond", type=float, default=None,
                   help="condition number of the random mixing matrix")
    p.add_argument("--mixing", default=None,
                   help="JSON file with an explicit 'mixing' matrix")

    p = sub.add_parser("separate", help="estimate a demixing matrix")
    common(p)
    p.add_argument("input", help="CSV of observations (header + rows)")
    p.add_argument("--algorithm", choices=CLI_ALGORITHMS, default=None)
    p.add_argument("--score", choices=CLI_SCORES, default=None)
    p.add_argument("--step", type=float, default=None, help="gradient step size")
    p.add_argument("--tol", type=float, default=None,
                   help="stationarity/improvement stopping tolerance")
    p.add_argument("--max-iter", dest="max_iter", type=int, default=None)
    p.add_argument("--center", action="store_true",
                   help="subtract channel means first")
    p.add_argument("--model", default=None,
                   help="model.json with ground truth, enables the Amari index")

    p = sub.add_parser("diagnose",
                       help="estimate mutual information, correlation, "
                            "and negentropies")
    common(p)
    p.add_argument("input", help="CSV of observations")
    p.add_argument("--center", action="store_true",
                   help="subtract channel means first")

    p = sub.add_parser("verify", help="run the divergence-identity suite")
    common(p)
    p.add_argument("--spec", default=None,
                   help="JSON file with a user 'joint' table or 'density'")
    p.add_argument("--step", type=float, default=None,
                   help="quadrature step for the analytic checks")
    return parser


_COMMANDS = {
    "simulate": cmd_simulate,
    "separate": cmd_separate,
    "diagnose": cmd_diagnose,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        opts = _Options(args)
        return _COMMANDS[args.command](opts)
    except IcageoError as err:
        print(f"icageo {args.command}: error: {err}", file=sys.stderr)
        return exit_code_for(err)


def entrypoint() -> None:
    sys.exit(main())
