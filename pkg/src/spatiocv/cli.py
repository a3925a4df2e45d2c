"""Command-line interface.

Exit status is 0 on success, 1 on runtime errors and 2 on usage errors.
Method parameters are passed as extra ``--name value`` options, e.g.
``spatiocv partition --method spcv_block --range 1000 --folds 5 ...``.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from typing import Any, Optional, Sequence

import numpy as np

from . import io
from .evaluation import make_learner, nested_resample, resample
from .partitioners import estimate_autocorrelation_range, repeat_plan
from .plan import validate_plan
from .plot import PlotSpec, render_partition_svg
from .synthgen import make_classification_task, sample_grf
from .task import TaskSchema

class UsageError(Exception):
    pass


def _literal(text: str) -> Any:
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    if low in ("none", "null"):
        return None
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def _extra_params(extra: Sequence[str]) -> dict[str, Any]:
    """Turn leftover ``--key value`` / ``--key=value`` tokens into a record."""
    params: dict[str, Any] = {}
    it = iter(extra)
    for tok in it:
        if not tok.startswith("--"):
            raise UsageError(f"unexpected argument {tok!r}")
        key = tok[2:]
        if "=" in key:
            key, value = key.split("=", 1)
        else:
            try:
                value = next(it)
            except StopIteration:
                raise UsageError(f"option {tok} needs a value") from None
        params[key.replace("-", "_")] = _literal(value)
    return params


def _kv_list(items: Optional[Sequence[str]]) -> dict[str, Any]:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise UsageError(f"expected key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.replace("-", "_")] = _literal(v)
    return out


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="64-bit master seed")
    p.add_argument("--json", action="store_true", help="print a machine-readable summary on stdout")
    p.add_argument("--out", help="output path")


def _add_schema(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--input", required=required, help="task CSV or GeoJSON file")
    p.add_argument("--response", help="response column")
    p.add_argument("--coords", default="x,y", help="coordinate columns, comma separated")
    p.add_argument("--time", help="time column")
    p.add_argument("--group", help="group column")
    p.add_argument("--location", help="location id column")
    p.add_argument("--positive", help="positive class label")
    p.add_argument("--features", help="feature columns, comma separated (default: all numeric)")
    p.add_argument("--coords-as-features", action="store_true")


def _load_task(args):
    if args.response is None:
        raise UsageError("--response is required to load a task")
    schema = TaskSchema(
        response=args.response,
        coords=tuple(args.coords.split(",")),
        time=args.time,
        group=args.group,
        location=args.location,
        features=None if args.features is None else tuple(args.features.split(",")),
        positive=args.positive,
        coords_as_features=args.coords_as_features,
    )
    if args.input.lower().endswith((".geojson", ".json")):
        return io.load_task_geojson(args.input, schema)
    return io.load_task_csv(args.input, schema)


def _emit(args, summary: dict) -> None:
    if args.json:
        sys.stdout.write(json.dumps(summary, sort_keys=True) + "\n")


def cmd_partition(args, extra) -> int:
    task = _load_task(args)
    params = _extra_params(extra)
    plan = repeat_plan(task, args.method, params, repeats=args.repeats, seed=args.seed)
    if args.out:
        io.write_plan(plan, args.out)
    else:
        sys.stdout.write(plan.to_json())
    _emit(args, {"method": plan.method, "folds": len(plan.folds), "repeats": plan.repeats, "out": args.out})
    return 0


def _learner(args):
    params = _kv_list(args.learner_param)
    return make_learner(args.learner, **params)


def cmd_resample(args, extra) -> int:
    if extra:
        raise UsageError(f"unexpected arguments {extra}")
    task = _load_task(args)
    plan = io.read_plan(args.plan)
    result = resample(task, _learner(args), plan, args.measure)
    if args.out:
        io.write_json(result.to_dict(), args.out)
    _emit(args, result.to_dict())
    if not args.out and not args.json:
        sys.stdout.write(result.to_json())
    return 0


def cmd_nested(args, extra) -> int:
    task = _load_task(args)
    plan = io.read_plan(args.plan)
    grid = []
    for spec in args.grid:
        grid.append(_kv_list(spec.split(";")))
    inner = _kv_list(args.inner_param)
    res = nested_resample(task, _learner(args), grid, args.inner_method, inner, plan, args.measure, seed=args.seed)
    out = res.result.to_dict()
    out["chosen"] = list(res.chosen)
    if args.out:
        io.write_json(out, args.out)
    _emit(args, out)
    if not args.out and not args.json:
        sys.stdout.write(json.dumps(out, indent=2) + "\n")
    return 0


def cmd_synth(args, extra) -> int:
    if extra:
        raise UsageError(f"unexpected arguments {extra}")
    field = sample_grf(args.n, args.sigma2, args.rho, args.nugget, seed=args.seed)
    task = make_classification_task(field, args.noise_features, seed=args.seed)
    if not args.out:
        raise UsageError("synth needs --out")
    io.write_task_csv(task, args.out)
    _emit(args, {"n": task.n, "features": list(task.feature_names), "out": args.out})
    return 0


def _count_records(path: str) -> int:
    if path.lower().endswith((".geojson", ".json")):
        with open(path, encoding="utf-8") as fh:
            return len(json.load(fh).get("features", []))
    with open(path, newline="", encoding="utf-8") as fh:
        return max(sum(1 for row in csv.reader(fh) if row) - 1, 0)


def cmd_validate(args, extra) -> int:
    # only the record count matters, so a schema is optional here
    target = _load_task(args) if args.response else _count_records(args.input)
    plan = io.read_plan(args.plan)
    report = validate_plan(plan, target)
    _emit(args, {"passed": report.passed, "violations": report.violations, "folds": report.n_folds})
    for v in report.violations:
        sys.stderr.write(v + "\n")
    return 0 if report.passed else 1


def cmd_plot(args, extra) -> int:
    task = _load_task(args)
    plan = io.read_plan(args.plan)
    if plan.blocks is None and args.show_blocks:
        # block outlines are not serialized; rebuild them from the same call
        plan = repeat_plan(task, plan.method, plan.params, repeats=1, seed=plan.seed)
    ids = [int(s) for s in args.fold_ids.split(",")]
    spec = PlotSpec(fold_ids=ids, repeat=args.repeat, show_blocks=args.show_blocks, facet_by_time=args.facet_time)
    if not args.out:
        raise UsageError("plot needs --out")
    render_partition_svg(task, plan, spec, args.out)
    _emit(args, {"out": args.out, "folds": ids})
    return 0


def cmd_range(args, extra) -> int:
    task = _load_task(args)
    if args.column is None:
        values = task.response.astype(float) if task.task_type == "regr" else task.binary_response().astype(float)
    else:
        values = np.asarray(task.column(args.column), dtype=float)
    est = estimate_autocorrelation_range(values, task.coords, n_lags=args.n_lags, cutoff=args.cutoff)
    if args.out:
        io.write_json(est.to_dict(), args.out)
    if args.json:
        _emit(args, est.to_dict())
    else:
        sys.stdout.write(f"{est.range!r}\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spatiocv", description="Spatial and spatiotemporal cross-validation")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("partition", help="build a resampling plan")
    _add_schema(p)
    _add_common(p)
    p.add_argument("--method", required=True)
    p.add_argument("--repeats", type=int, default=1)
    p.set_defaults(func=cmd_partition, takes_extra=True)

    for name, func, help_ in (("resample", cmd_resample, "run a plan"), ("nested", cmd_nested, "nested CV tuning")):
        p = sub.add_parser(name, help=help_)
        _add_schema(p)
        _add_common(p)
        p.add_argument("--plan", required=True, help="outer plan JSON")
        p.add_argument("--learner", default="knn", choices=["knn", "logistic", "featureless"])
        p.add_argument("--learner-param", action="append", metavar="KEY=VALUE")
        p.add_argument("--measure", default="auroc", choices=["auroc", "misclassification", "rmse"])
        if name == "nested":
            p.add_argument("--grid", action="append", required=True, metavar="K=V[;K=V]",
                           help="one hyperparameter setting; repeat for each grid point")
            p.add_argument("--inner-method", required=True)
            p.add_argument("--inner-param", action="append", metavar="KEY=VALUE")
        p.set_defaults(func=func, takes_extra=False)

    p = sub.add_parser("synth", help="write a synthetic autocorrelated task CSV")
    _add_common(p)
    p.add_argument("--n", type=int, default=400)
    p.add_argument("--sigma2", type=float, default=1.0)
    p.add_argument("--rho", type=float, default=0.1)
    p.add_argument("--nugget", type=float, default=0.0)
    p.add_argument("--noise-features", type=int, default=2)
    p.set_defaults(func=cmd_synth, takes_extra=False)

    p = sub.add_parser("validate", help="check a plan against a task")
    _add_schema(p)
    _add_common(p)
    p.add_argument("--plan", required=True)
    p.set_defaults(func=cmd_validate, takes_extra=False)

    p = sub.add_parser("plot", help="render folds as SVG")
    _add_schema(p)
    _add_common(p)
    p.add_argument("--plan", required=True)
    p.add_argument("--fold-ids", default="1")
    p.add_argument("--repeat", type=int, default=1)
    p.add_argument("--show-blocks", action="store_true")
    p.add_argument("--facet-time", action="store_true")
    p.set_defaults(func=cmd_plot, takes_extra=False)

    p = sub.add_parser("range", help="estimate the autocorrelation range")
    _add_schema(p)
    _add_common(p)
    p.add_argument("--column", help="numeric column to analyze (default: the response)")
    p.add_argument("--n-lags", type=int, default=8)
    p.add_argument("--cutoff", type=float)
    p.set_defaults(func=cmd_range, takes_extra=False)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args, extra = parser.parse_known_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if extra and not args.takes_extra:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"spatiocv: error: unrecognized arguments: {' '.join(extra)}\n")
        return 2
    try:
        return args.func(args, extra)
    except UsageError as e:
        sys.stderr.write(f"spatiocv: error: {e}\n")
        return 2
    except (ValueError, OSError, KeyError, AssertionError) as e:
        msg = e.args[0] if isinstance(e, KeyError) and e.args else e
        sys.stderr.write(f"spatiocv: {msg}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
