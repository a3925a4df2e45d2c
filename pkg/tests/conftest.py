import sys

import numpy as np
import pandas as pd
import pytest

from spatiocv.task import build_task


def point_task(xy, labels=None, extra=None, **schema):
    """Small classification task on the given coordinates."""
    xy = np.asarray(xy, dtype=float)
    n = len(xy)
    if labels is None:
        labels = ["1" if i % 2 else "0" for i in range(n)]
    data = {"y_": [str(v) for v in labels], "x": xy[:, 0], "y": xy[:, 1], "f1": np.arange(n, dtype=float)}
    for k, v in (extra or {}).items():
        data[k] = v
    sch = {"response": "y_", "coords": ("x", "y"), "features": ["f1"]}
    sch.update(schema)
    return build_task(pd.DataFrame(data), sch, check_positive=False)


def random_task(rng: np.random.Generator, n: int, n_groups=None, n_loc=None, n_time=None):
    """Random task with a group role, location/time roles and two features."""
    n_groups = n_groups or int(rng.integers(3, 9))
    n_loc = n_loc or int(rng.integers(3, 8))
    n_time = n_time or int(rng.integers(3, 8))
    xy = rng.uniform(0, 100, size=(n, 2))
    data = pd.DataFrame(
        {
            "label": np.where(rng.uniform(size=n) < 0.5, "p", "a"),
            "x": xy[:, 0],
            "y": xy[:, 1],
            "elev": rng.normal(size=n),
            "slope": rng.normal(size=n),
            "grp": [f"g{v}" for v in rng.integers(0, n_groups, size=n)],
            "site": [f"s{v}" for v in rng.integers(0, n_loc, size=n)],
            "day": rng.integers(0, n_time, size=n),
        }
    )
    # make sure every level shows up so the level counts are as drawn
    data.loc[: n_groups - 1, "grp"] = [f"g{i}" for i in range(n_groups)]
    data.loc[: n_loc - 1, "site"] = [f"s{i}" for i in range(n_loc)]
    data.loc[: n_time - 1, "day"] = np.arange(n_time)
    data.loc[0, "label"], data.loc[1, "label"] = "p", "a"
    schema = {
        "response": "label",
        "coords": ("x", "y"),
        "group": "grp",
        "location": "site",
        "time": "day",
        "positive": "p",
    }
    return build_task(data, schema)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_task(rng):
    return random_task(rng, 60, n_groups=6, n_loc=4, n_time=4)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "REPORT", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
