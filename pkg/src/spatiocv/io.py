"""Task CSV / GeoJSON ingestion and plan / result serialization.

Everything is UTF-8 with a dot decimal separator; floats are written with 17
significant digits so values survive a round trip exactly.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Any, Mapping, Optional

import numpy as np
import pandas as pd

from .plan import ResamplingPlan
from .task import Task, TaskError, TaskSchema, build_task

_MISSING = {"", "NA", "NaN", "nan"}


def format_value(v: Any) -> str:
    if isinstance(v, (float, np.floating)):
        if math.isnan(v):
            return "NaN"
        return "%.17g" % v
    if isinstance(v, (bool, np.bool_)):
        return "TRUE" if v else "FALSE"
    return str(v)


def _as_schema(schema) -> TaskSchema:
    if schema is None:
        raise TaskError("a schema with at least a response column is required")
    return schema if isinstance(schema, TaskSchema) else TaskSchema.from_mapping(schema)


def _raw_columns(schema: TaskSchema) -> set[str]:
    """Columns that keep their text form instead of being parsed as numbers."""
    raw = {c for c in (schema.group, schema.location, schema.time) if c is not None}
    if schema.positive is not None and schema.response is not None:
        raw.add(schema.response)
    return raw


def _parse_column(values: list[str]):
    out = []
    for v in values:
        if v.strip() in _MISSING:
            out.append(float("nan"))
            continue
        try:
            out.append(float(v))
        except ValueError:
            return values
    if all(math.isnan(x) for x in out):
        return values
    return out


def load_task_csv(path, schema, id: Optional[str] = None) -> Task:
    """Read a header-first CSV file into a :class:`Task`."""
    schema = _as_schema(schema)
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise TaskError(f"{path}: empty file") from None
        if len(set(header)) != len(header):
            raise TaskError(f"{path}: duplicate column names in header")
        rows = []
        for row in reader:
            if not row:
                continue
            if len(row) != len(header):
                raise TaskError(
                    f"{path}: line {reader.line_num}: expected {len(header)} fields, got {len(row)}"
                )
            rows.append(row)
    raw = _raw_columns(schema)
    columns = {}
    for j, name in enumerate(header):
        values = [r[j] for r in rows]
        columns[name] = values if name in raw else _parse_column(values)
    return build_task(pd.DataFrame(columns, columns=header), schema, id=id or path.stem)


def write_task_csv(task: Task, path) -> None:
    """Write the task's records with their original column names."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(task.data.columns))
        for row in task.data.itertuples(index=False, name=None):
            w.writerow([format_value(v) for v in row])


def load_task_geojson(path, schema, id: Optional[str] = None) -> Task:
    """Read a FeatureCollection of Point features; coordinates come from the
    geometry and take the schema's coordinate names."""
    schema = _as_schema(schema)
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("type") != "FeatureCollection":
        raise TaskError(f"{path}: expected a FeatureCollection")
    feats = doc.get("features", [])
    if not feats:
        raise TaskError(f"{path}: no features")
    keys = None
    records = []
    xname, yname = schema.coords
    for i, feat in enumerate(feats):
        geom = feat.get("geometry") or {}
        if geom.get("type") != "Point":
            raise TaskError(f"{path}: feature {i} has geometry {geom.get('type')!r}; points only")
        props = dict(feat.get("properties") or {})
        if keys is None:
            keys = list(props)
        elif set(props) != set(keys):
            raise TaskError(f"{path}: feature {i} has mixed property schemas")
        if xname in props or yname in props:
            raise TaskError(f"{path}: property names clash with coordinate names {schema.coords}")
        x, y = geom["coordinates"][:2]
        rec = {xname: float(x), yname: float(y)}
        for k in keys:
            v = props[k]
            if k in _raw_columns(schema):
                v = format_value(v)
            elif isinstance(v, (int, float)) and not isinstance(v, bool):
                v = float(v)
            rec[k] = v
        records.append(rec)
    return build_task(pd.DataFrame(records), schema, id=id or path.stem)


def write_plan(plan: ResamplingPlan, path) -> None:
    Path(path).write_text(plan.to_json(), encoding="utf-8")


def read_plan(path) -> ResamplingPlan:
    return ResamplingPlan.from_json(Path(path).read_text(encoding="utf-8"))


def write_json(obj: Mapping[str, Any], path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")
