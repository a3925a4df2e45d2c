"""Task data model: observations with a response, features, planar coordinates
and optional time / group / location roles."""

from __future__ import annotations

import datetime as _dt
from dataclasses import dataclass, field, replace
from typing import Any, Mapping, Optional, Sequence

import numpy as np
import pandas as pd

ROLES = ("group", "time", "location")
_EPOCH = _dt.date(1970, 1, 1)


class TaskError(ValueError):
    """Raised when records or a schema do not describe a valid task."""


@dataclass(frozen=True)
class TaskSchema:
    """Column-role map used to build a :class:`Task`.

    ``features=None`` means every remaining numeric column is a feature.
    """

    response: Optional[str] = None
    coords: tuple[str, str] = ("x", "y")
    time: Optional[str] = None
    group: Optional[str] = None
    location: Optional[str] = None
    features: Optional[tuple[str, ...]] = None
    positive: Optional[str] = None
    coords_as_features: bool = False

    @classmethod
    def from_mapping(cls, schema: Mapping[str, Any]) -> "TaskSchema":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(schema) - known
        if unknown:
            raise TaskError(f"unknown schema keys: {sorted(unknown)}")
        kw = dict(schema)
        if "coords" in kw:
            kw["coords"] = tuple(kw["coords"])
        if kw.get("features") is not None:
            kw["features"] = tuple(kw["features"])
        if kw.get("positive") is not None:
            kw["positive"] = str(kw["positive"])
        return cls(**kw)

    def role_column(self, role: str) -> Optional[str]:
        return getattr(self, role)


@dataclass(frozen=True, eq=False)
class Task:
    """An immutable learning sample.

    Attributes
    ----------
    data : pandas.DataFrame
        The original records, one row per observation.
    response : ndarray
        Labels (str) for classification, floats for regression.
    features : ndarray, shape (n, p)
    coords : ndarray, shape (n, 2)
    time : ndarray of int64 or None
        Normalized time keys (integers, or days since 1970-01-01 for dates).
    group, location_id : ndarray of str or None
    """

    id: str
    data: pd.DataFrame = field(repr=False)
    schema: TaskSchema
    response: np.ndarray = field(repr=False)
    features: np.ndarray = field(repr=False)
    feature_names: tuple[str, ...]
    coords: np.ndarray = field(repr=False)
    time: Optional[np.ndarray] = field(default=None, repr=False)
    group: Optional[np.ndarray] = field(default=None, repr=False)
    location_id: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return len(self.response)

    @property
    def p(self) -> int:
        return self.features.shape[1]

    @property
    def positive_label(self) -> Optional[str]:
        return self.schema.positive

    @property
    def coords_as_features(self) -> bool:
        return self.schema.coords_as_features

    @property
    def task_type(self) -> str:
        return "classif" if self.response.dtype.kind in "OUS" else "regr"

    @property
    def classes(self) -> list[str]:
        if self.task_type != "classif":
            raise TaskError("regression task has no classes")
        return sorted(set(self.response.tolist()))

    def binary_response(self) -> np.ndarray:
        """Boolean vector, True where the response equals the positive label."""
        if self.positive_label is None:
            raise TaskError("task has no positive_label")
        return self.response == self.positive_label

    def column(self, name: str) -> np.ndarray:
        """Values of a named column; role columns return their normalized form."""
        if name == self.schema.time:
            return self.time
        if name == self.schema.group:
            return self.group
        if name == self.schema.location:
            return self.location_id
        if name not in self.data.columns:
            raise TaskError(f"unknown column {name!r}")
        return self.data[name].to_numpy()

    def feature(self, name: str) -> np.ndarray:
        try:
            j = self.feature_names.index(name)
        except ValueError:
            raise TaskError(f"unknown feature {name!r}") from None
        return self.features[:, j]

    def subset(self, indices: Sequence[int]) -> "Task":
        """Task restricted to the given 0-based rows (in the given order)."""
        idx = np.asarray(indices, dtype=np.int64)
        return build_task(self.data.iloc[idx].reset_index(drop=True), self.schema, id=self.id, check_positive=False)


def _is_numeric(values: pd.Series) -> bool:
    return pd.api.types.is_numeric_dtype(values) and not pd.api.types.is_bool_dtype(values)


def parse_time_keys(values: Sequence[Any]) -> np.ndarray:
    """Normalize time values to int64 keys.

    Integers pass through; ISO-8601 dates (``YYYY-MM-DD``) become days since
    1970-01-01.
    """
    out = np.empty(len(values), dtype=np.int64)
    for i, v in enumerate(values):
        if isinstance(v, (bool, np.bool_)):
            raise TaskError(f"time value {v!r} is not an integer or ISO date")
        if isinstance(v, (int, np.integer)):
            out[i] = int(v)
            continue
        if isinstance(v, (float, np.floating)):
            if not float(v).is_integer():
                raise TaskError(f"time value {v!r} is not an integer or ISO date")
            out[i] = int(v)
            continue
        if isinstance(v, _dt.date):
            out[i] = (v if not isinstance(v, _dt.datetime) else v.date()).toordinal() - _EPOCH.toordinal()
            continue
        s = str(v).strip()
        try:
            out[i] = int(s)
            continue
        except ValueError:
            pass
        try:
            out[i] = _dt.date.fromisoformat(s).toordinal() - _EPOCH.toordinal()
        except ValueError:
            raise TaskError(f"time value {v!r} is not an integer or ISO date") from None
    return out


def _categorical(values: pd.Series) -> np.ndarray:
    if values.isna().any():
        raise TaskError(f"column {values.name!r} has missing values")
    return np.array([str(v) for v in values], dtype=object)


def build_task(
    records: Any,
    schema: TaskSchema | Mapping[str, Any],
    id: str = "task",
    check_positive: bool = True,
) -> Task:
    """Validate ``records`` against ``schema`` and build a :class:`Task`.

    ``records`` may be a DataFrame, a column mapping or a list of row dicts.
    Coordinates are removed from the features unless ``coords_as_features``.
    """
    if not isinstance(schema, TaskSchema):
        schema = TaskSchema.from_mapping(schema)
    data = records.copy() if isinstance(records, pd.DataFrame) else pd.DataFrame(records)
    data = data.reset_index(drop=True)
    cols = list(data.columns)

    if schema.response is None:
        raise TaskError("missing response")
    if schema.response not in cols:
        raise TaskError(f"missing response column {schema.response!r}")
    if len(schema.coords) != 2:
        raise TaskError("exactly two coordinate columns are required")
    for c in schema.coords:
        if c not in cols:
            raise TaskError(f"missing coordinate column {c!r}")
    if len(data) < 2:
        raise TaskError("a task needs at least 2 observations")

    role_cols = {}
    for role in ROLES:
        col = schema.role_column(role)
        if col is None:
            continue
        if col not in cols:
            raise TaskError(f"missing {role} column {col!r}")
        if col == schema.response or col in schema.coords:
            raise TaskError(f"column {col!r} cannot take the {role} role")
        if col in role_cols.values():
            raise TaskError(f"column {col!r} assigned to more than one role")
        role_cols[role] = col

    for c in schema.coords:
        if not _is_numeric(data[c]):
            raise TaskError(f"non-numeric coordinate column {c!r}")
    coords = data[list(schema.coords)].to_numpy(dtype=float)
    if not np.all(np.isfinite(coords)):
        raise TaskError("coordinates must be finite")

    resp = data[schema.response]
    if resp.isna().any():
        raise TaskError("response has missing values")
    if schema.positive is not None or not _is_numeric(resp):
        response = np.array([str(v) for v in resp], dtype=object)
        if check_positive and schema.positive is not None and schema.positive not in set(response):
            raise TaskError(f"positive label {schema.positive!r} does not occur in the response")
    else:
        response = resp.to_numpy(dtype=float)

    reserved = {schema.response, *role_cols.values()}
    if schema.features is not None:
        names = list(schema.features)
        for f in names:
            if f not in cols:
                raise TaskError(f"missing feature column {f!r}")
            if f in reserved:
                raise TaskError(f"column {f!r} cannot be both a feature and a role")
        names = [f for f in names if f not in schema.coords]
    else:
        names = [c for c in cols if c not in reserved and c not in schema.coords and _is_numeric(data[c])]
    if schema.coords_as_features:
        names = names + [c for c in schema.coords]
    for f in names:
        if not _is_numeric(data[f]):
            raise TaskError(f"non-numeric feature column {f!r}")
    features = data[names].to_numpy(dtype=float) if names else np.empty((len(data), 0))
    if not np.all(np.isfinite(features)):
        raise TaskError("feature table has missing or non-finite values")

    time = parse_time_keys(data[role_cols["time"]].tolist()) if "time" in role_cols else None
    group = _categorical(data[role_cols["group"]]) if "group" in role_cols else None
    location = _categorical(data[role_cols["location"]]) if "location" in role_cols else None

    for arr in (response, features, coords, time, group, location):
        if arr is not None:
            arr.setflags(write=False)
    return Task(
        id=id,
        data=data,
        schema=schema,
        response=response,
        features=features,
        feature_names=tuple(names),
        coords=coords,
        time=time,
        group=group,
        location_id=location,
    )


def set_role(task: Task, column: str, role: str) -> Task:
    """Assign ``column`` to ``role`` (group, time or location).

    The column stops being a model feature.
    """
    if role not in ROLES:
        raise TaskError(f"unknown role {role!r}; expected one of {ROLES}")
    if column not in task.data.columns:
        raise TaskError(f"unknown column {column!r}")
    current = task.schema.role_column(role)
    if current is not None:
        raise TaskError(f"duplicate role assignment: {role!r} is already set to {current!r}")
    features = task.schema.features
    if features is not None:
        features = tuple(f for f in features if f != column)
    schema = replace(task.schema, **{role: column}, features=features)
    return build_task(task.data, schema, id=task.id)
