"""Command-line driver: ``marginloss <subcommand> ...``.

Exit codes: 0 on success, 2 for validation or domain errors (one JSON line
on standard error), 3 for I/O errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .boosting import BoostModel, boost_predict, staged_diagnostics, train_adaboost
from .data import fmt, read_csv, write_csv, write_table
from .datagen import generate, load_config
from .errors import MarginLossError, ParameterError
from .estimator import (FitOptions, ModelSpec, exp_empirical_risk, fit, pnorm_fit,
                        pnorm_objective, predict)
from .losses import conformability_check, convexity_check, parse_loss, tabulate
from .residuals import component_log_s2, slrr

SCHEMA_HELP = """\
data CSV:
  optional '#' comment lines, then a header row.  One column must be named
  'y' with labels in {-1, 1} or {0, 1} (0 is read as -1); every other column
  is a numeric feature.

model JSON (fit, pnorm-fit):
  {"config": {...}, "loss": {"name", "dist", "weight", "k", "margin_scale", ...},
   "model": {"kind": "linear", "intercept": bool}, "feature_names": [...],
   "beta": [...], "status": "converged" | "max_iterations" | "diverged_separable",
   "iterations": int, "final_risk": float, "gradient_norm": float, "r_emp": float}

model JSON (boost):
  {"config": {...}, "kind": "adaboost_stumps", "status": ..., "stages":
   [{"theta", "feature_index", "threshold", "polarity", "weighted_error"}, ...],
   "staged_r_emp": [...], "feature_names": [...]}

Tables start with one '# {json}' line echoing the resolved configuration.
Floats are written with 17 significant digits.
"""

EXIT_USAGE = 2
EXIT_IO = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def to_json(obj) -> str:
    """JSON with floats at 17 significant digits."""
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {to_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(to_json(v) for v in obj) + "]"
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return fmt(x) if math.isfinite(x) else json.dumps(x)
    return json.dumps(str(obj))


def _global_flags(parser, suppress: bool):
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--seed", type=int, default=argparse.SUPPRESS if suppress else 0,
                        help="random seed (default 0)")
    parser.add_argument("--threads", type=int, default=argparse.SUPPRESS if suppress else 1,
                        help="worker threads for risk and gradient sums (default 1)")
    parser.add_argument("--format", choices=("csv", "tsv", "json"), default=default,
                        help="table output format (default: tsv for tabulate, csv otherwise)")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    _global_flags(common, suppress=True)

    p = _Parser(prog="marginloss", description="Conformable margin losses, fitting and boosting.",
                epilog=SCHEMA_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--version", action="version", version=__version__)
    _global_flags(p, suppress=False)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, **kw):
        return sub.add_parser(name, parents=[common], epilog=SCHEMA_HELP,
                              formatter_class=argparse.RawDescriptionHelpFormatter, **kw)

    losses = add("losses", help="tabulate or check a loss")
    lsub = losses.add_subparsers(dest="action", required=True, parser_class=_Parser)
    tab = lsub.add_parser("tabulate", parents=[common], help="write v, phi, dphi")
    tab.add_argument("--loss", required=True, help="e.g. logistic, gaussian:4, laplace:2")
    tab.add_argument("--range", required=True, help="a:b")
    tab.add_argument("--points", type=int, default=101)
    tab.add_argument("--method", choices=("auto", "closed", "quadrature"), default="auto")
    tab.add_argument("--out", required=True)
    chk = lsub.add_parser("check", parents=[common], help="conformability and convexity as JSON")
    chk.add_argument("--loss", required=True)

    f = add("fit", help="empirical risk minimisation")
    f.add_argument("--loss", required=True)
    f.add_argument("--data", required=True)
    f.add_argument("--model", choices=("linear",), default="linear")
    f.add_argument("--intercept", action="store_true")
    f.add_argument("--tol", type=float, default=1e-8)
    f.add_argument("--max-iter", type=int, default=20000)
    f.add_argument("--restarts", type=int, default=5)
    f.add_argument("--out", required=True)

    pn = add("pnorm-fit", help="minimise sum |S_i|^p")
    pn.add_argument("--p", type=float, required=True)
    pn.add_argument("--data", required=True)
    pn.add_argument("--model", choices=("linear",), default="linear")
    pn.add_argument("--intercept", action="store_true")
    pn.add_argument("--tol", type=float, default=1e-8)
    pn.add_argument("--max-iter", type=int, default=20000)
    pn.add_argument("--out", required=True)

    b = add("boost", help="AdaBoost with decision stumps")
    b.add_argument("--data", required=True)
    b.add_argument("--stages", type=int, default=100)
    b.add_argument("--r-emp-stop", type=float, default=None)
    b.add_argument("--out", required=True)
    b.add_argument("--diag", default=None, help="per-stage diagnostics table")

    s = add("simulate", help="seeded synthetic data")
    s.add_argument("--config", required=True, help="JSON mirroring the generator config")
    s.add_argument("--out", required=True)

    d = add("diagnose", help="residual diagnostics")
    dsub = d.add_subparsers(dest="action", required=True, parser_class=_Parser)
    r = dsub.add_parser("residuals", parents=[common], help="per-row margins and residuals")
    r.add_argument("--model", required=True)
    r.add_argument("--data", required=True)
    r.add_argument("--out", required=True)
    return p


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if not k.startswith("_")}


def _table_format(args, default: str) -> str:
    return args.format or default


def _write_table(path, header, columns, config, fmt_name):
    if fmt_name == "json":
        body = {"config": config, "columns": {h: [float(x) for x in c] for h, c in zip(header, columns)}}
        Path(path).write_text(to_json(body) + "\n")
    else:
        write_table(path, header, columns, comment=config, delimiter="\t" if fmt_name == "tsv" else ",")


def _parse_range(text: str):
    try:
        a, b = (float(t) for t in text.split(":"))
    except ValueError:
        raise ParameterError(f"--range must look like a:b, got {text!r}") from None
    return a, b


def cmd_losses(args):
    loss = parse_loss(args.loss)
    if args.action == "tabulate":
        a, b = _parse_range(args.range)
        table = tabulate(loss, a, b, args.points, method=args.method)
        config = _config(args)
        config["loss_params"] = loss.describe()
        _write_table(args.out, ["v", "phi", "dphi"], [table.grid, table.values, table.derivatives],
                     config, _table_format(args, "tsv"))
        return
    conf = conformability_check(loss)
    cvx = convexity_check(loss)
    print(to_json({
        "loss": args.loss,
        "conformable": bool(conf.passed),
        "convex": bool(cvx.convex),
        "conformability": conf._asdict(),
        "convexity": cvx._asdict(),
        "params": loss.describe(),
        "config": _config(args),
    }))


def _spec(args) -> ModelSpec:
    return ModelSpec.linear(intercept=args.intercept)


def _fit_output(args, loss_desc, spec, data, res) -> dict:
    return {
        "config": _config(args),
        "loss": loss_desc,
        "model": spec.to_dict(),
        "feature_names": list(data.feature_names),
        "beta": res.beta,
        "status": res.status.value,
        "iterations": res.iterations,
        "final_risk": res.final_risk,
        "gradient_norm": res.gradient_norm,
        "r_emp": exp_empirical_risk(spec, res.beta, data),
    }


def cmd_fit(args):
    loss = parse_loss(args.loss)
    data = read_csv(args.data)
    spec = _spec(args)
    opts = FitOptions(tolerance=args.tol, max_iter=args.max_iter, restarts=args.restarts,
                      seed=args.seed, threads=args.threads)
    res = fit(loss, spec, data, opts)
    Path(args.out).write_text(to_json(_fit_output(args, loss.describe(), spec, data, res)) + "\n")


def cmd_pnorm(args):
    if not args.p > 0:
        raise ParameterError("--p must be positive")
    data = read_csv(args.data)
    spec = _spec(args)
    opts = FitOptions(tolerance=args.tol, max_iter=args.max_iter, seed=args.seed, threads=args.threads)
    res = pnorm_fit(spec, data, args.p, opts)
    out = _fit_output(args, {"name": f"pnorm:{fmt(args.p)}", "p": args.p}, spec, data, res)
    out["objective"] = pnorm_objective(spec, res.beta, data, args.p)
    Path(args.out).write_text(to_json(out) + "\n")


def cmd_boost(args):
    data = read_csv(args.data)
    model = train_adaboost(data, args.stages, r_emp_stop=args.r_emp_stop, seed=args.seed)
    out = {"config": _config(args), **model.to_dict(), "feature_names": list(data.feature_names)}
    Path(args.out).write_text(to_json(out) + "\n")
    if args.diag:
        rows = staged_diagnostics(model, data)
        cols = list(zip(*rows))
        _write_table(args.diag, ["stage", "train_risk", "r_emp", "misclassification"], cols,
                     _config(args), _table_format(args, "csv"))


def cmd_simulate(args):
    cfg = load_config(args.config)
    if args._seed_given:  # an explicit --seed overrides the config file
        cfg = type(cfg).from_dict({**cfg.to_dict(), "seed": args.seed})
    data = generate(cfg)
    config = _config(args)
    config["generator"] = cfg.to_dict()
    write_csv(args.out, data, comment=config)


def _load_model(path):
    with open(path) as fh:
        return json.load(fh)


def cmd_diagnose(args):
    doc = _load_model(args.model)
    data = read_csv(args.data)
    if doc.get("kind") == "adaboost_stumps":
        model = BoostModel.from_dict(doc)
        f = boost_predict(model, data.X)
        contrib = np.column_stack([t * s.predict(data.X) for t, s in model.stages])
        names = [f"log_s2_stage{m + 1}" for m in range(len(model.stages))]
    else:
        m = doc.get("model", {})
        if m.get("kind") != "linear":
            raise ParameterError("model JSON must describe a linear fit or a boosting model")
        spec = ModelSpec.linear(intercept=bool(m.get("intercept", False)))
        beta = np.asarray(doc["beta"], dtype=float)
        f = predict(spec, beta, data.X)
        contrib = spec.components(data.X, beta)
        names = (["log_s2_intercept"] if spec.intercept else []) + [f"log_s2_{n}" for n in data.feature_names]
    res = slrr(data.y, f)
    comp = component_log_s2(data.y, contrib)
    header = ["y_star", "f", "margin", "s", "s_squared", *names]
    cols = [data.y.astype(int), f, res.margin, res.s, res.s_squared, *comp.T]
    _write_table(args.out, header, cols, _config(args), _table_format(args, "csv"))


def main(argv=None) -> int:
    parser = build_parser()
    argv = _join_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
        handler = {"losses": cmd_losses, "fit": cmd_fit, "pnorm-fit": cmd_pnorm, "boost": cmd_boost,
                   "simulate": cmd_simulate, "diagnose": cmd_diagnose}[args.command]
        _normalise(args)
        args._seed_given = any(a == "--seed" or a.startswith("--seed=") for a in argv)
        handler(args)
    except UsageError as exc:
        return _fail(EXIT_USAGE, "usage", str(exc))
    except (MarginLossError, ValueError, KeyError) as exc:
        return _fail(EXIT_USAGE, type(exc).__name__, str(exc).strip("'\""))
    except OSError as exc:
        return _fail(EXIT_IO, type(exc).__name__, str(exc))
    return 0


def _join_negative_values(argv):
    # "--range -2:2" would otherwise read "-2:2" as an option
    out, i = [], 0
    while i < len(argv):
        if argv[i] == "--range" and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"--range={argv[i + 1]}")
            i += 2
            continue
        out.append(argv[i])
        i += 1
    return out


def _normalise(args):
    for name in ("seed", "threads"):
        if not hasattr(args, name):
            setattr(args, name, 0 if name == "seed" else 1)
    if not hasattr(args, "format"):
        args.format = None
    if args.threads < 1:
        raise ParameterError("--threads must be at least 1")


def _fail(code: int, kind: str, message: str) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message, "exit_code": code}) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
