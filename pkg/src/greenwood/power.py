"""Rejection-rate studies: power across parameter grids and size at the null.

A study fixes a test, a data family, a parameter grid and sample sizes, then
counts rejections over ``R`` independent replications per grid point. Grid
point ``(i, j)`` always runs on its own block of RNG substreams, so curves
are pure functions of the configuration and reruns are bit-identical.

Curves export to CSV with header ``family,param,n,replications,rejection_rate``
plus a JSON sidecar carrying the configuration echo.
"""

from __future__ import annotations

import csv
import json
import math
import os
import tempfile
from dataclasses import dataclass

from .critical import GROUP_STRIDE
from .distributions import (
    GPD,
    DistributionSpec,
    Gaussian,
    Stable,
    StudentT,
    family_tag,
    params_dict,
    sample,
)
from .rng import RngStream
from .testing import (
    GAUSSIAN_NULL,
    GPD_BOUNDARY,
    STUDENT_T_BOUNDARY,
    TestSpec,
    run_test,
    thresholds_for,
)

__all__ = [
    "PowerCurve",
    "PowerPoint",
    "PowerStudyConfig",
    "data_spec",
    "export_curve",
    "import_curve",
    "run_power_study",
    "size_check",
]

CSV_HEADER = ("family", "param", "n", "replications", "rejection_rate")


def data_spec(family: str, param: float) -> DistributionSpec:
    """Map a study's scalar grid parameter to a distribution spec."""
    if family == "stable":
        return Stable(param, 1.0)
    if family == "student_t":
        return StudentT(param)
    if family == "gpd":
        return GPD(param, 1.0)
    if family == "gaussian":
        return Gaussian(0.0, param)  # grid parameter is the variance
    raise ValueError(f"unknown data family {family!r}")


@dataclass(frozen=True)
class PowerStudyConfig:
    test: TestSpec
    data_family: str
    parameter_grid: tuple
    sample_sizes: tuple
    replications: int
    master_seed: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "parameter_grid", tuple(self.parameter_grid))
        object.__setattr__(self, "sample_sizes", tuple(self.sample_sizes))
        if len(self.parameter_grid) == 0:
            raise ValueError("parameter grid must be nonempty")
        if len(self.sample_sizes) == 0:
            raise ValueError("sample sizes must be nonempty")
        if any(b <= a for a, b in zip(self.parameter_grid, self.parameter_grid[1:])):
            raise ValueError("parameter grid must be strictly increasing")
        if any(n < 2 for n in self.sample_sizes):
            raise ValueError("sample sizes must be at least 2")
        if self.replications < 100:
            raise ValueError("replications must be at least 100")
        for p in self.parameter_grid:
            data_spec(self.data_family, p)  # fail fast on invalid grid values

    def to_json_dict(self) -> dict:
        null = self.test.null_spec
        return {
            "test_kind": self.test.kind,
            "c": self.test.c,
            "null": None
            if null is None
            else {"family": family_tag(null), "params": _encode(params_dict(null))},
            "data_family": self.data_family,
            "parameter_grid": [_encode_scalar(p) for p in self.parameter_grid],
            "sample_sizes": list(self.sample_sizes),
            "replications": self.replications,
            "master_seed": self.master_seed,
        }


def _encode_scalar(v):
    return "inf" if isinstance(v, float) and math.isinf(v) else v


def _encode(params: dict) -> dict:
    return {k: _encode_scalar(float(v)) for k, v in params.items()}


@dataclass(frozen=True)
class PowerPoint:
    param: float
    n: int
    rejection_rate: float
    replications: int


@dataclass(frozen=True)
class PowerCurve:
    points: tuple
    config: dict

    def rate(self, param: float, n: int) -> float:
        for pt in self.points:
            if pt.param == param and pt.n == n:
                return pt.rejection_rate
        raise KeyError(f"no point for param={param} n={n}")


def run_power_study(config: PowerStudyConfig) -> PowerCurve:
    """Rejection rate at every ``(param, n)`` grid point of ``config``.

    Table coverage is verified for all sample sizes up front, so a study
    cannot die halfway through; replication ``r`` of grid point ``(i, j)``
    samples from substream ``(i * len(sample_sizes) + j) * GROUP_STRIDE + r``.
    """
    for n in config.sample_sizes:
        thresholds_for(config.test, n)

    rng = RngStream(config.master_seed)
    points = []
    sizes = config.sample_sizes
    for i, param in enumerate(config.parameter_grid):
        dspec = data_spec(config.data_family, param)
        for j, n in enumerate(sizes):
            base = rng.substream((i * len(sizes) + j) * GROUP_STRIDE)
            rejected = 0
            for r in range(config.replications):
                x = sample(dspec, n, base.substream(r))
                if run_test(config.test, x).reject:
                    rejected += 1
            points.append(
                PowerPoint(param, n, rejected / config.replications, config.replications)
            )
    return PowerCurve(tuple(points), config.to_json_dict())


_NULL_FOR_SIZE = {
    "mg1": GAUSSIAN_NULL,
    "mg2": GAUSSIAN_NULL,
    "mg3_gpd": GPD_BOUNDARY,
    "mg4_student_t": STUDENT_T_BOUNDARY,
    "jarque_bera": GAUSSIAN_NULL,
    "ks_normality": GAUSSIAN_NULL,
}


def size_check(test: TestSpec, n: int, replications: int, rng: RngStream) -> float:
    """Empirical rejection rate under the test's own null boundary.

    For a well-calibrated test this sits near ``c`` up to binomial noise of
    order ``sqrt(c (1 - c) / replications)``.
    """
    if replications < 100:
        raise ValueError("replications must be at least 100")
    if test.kind == "mg_two_sided":
        null = test.null_spec
    else:
        null = _NULL_FOR_SIZE[test.kind]
    thresholds_for(test, n)
    rejected = 0
    for r in range(replications):
        x = sample(null, n, rng.substream(r))
        if run_test(test, x).reject:
            rejected += 1
    return rejected / replications


def export_curve(curve: PowerCurve, path) -> None:
    """Write a curve as CSV plus a ``<path>.json`` configuration sidecar.

    Rows carry exact ``repr`` floats, so identical studies produce
    byte-identical files.
    """
    path = os.fspath(path)
    family = curve.config["data_family"]
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_HEADER)
            for pt in curve.points:
                writer.writerow(
                    [family, repr(pt.param), pt.n, pt.replications, repr(pt.rejection_rate)]
                )
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    sidecar = path + ".json"
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(curve.config, fh, indent=2, sort_keys=True)
            fh.write("\n")
        os.replace(tmp, sidecar)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def import_curve(path) -> PowerCurve:
    """Read back a curve written by :func:`export_curve`."""
    path = os.fspath(path)
    points = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != CSV_HEADER:
            raise ValueError(f"unexpected CSV header {header!r}")
        for row in reader:
            if not row:
                continue
            _, param, n, reps, rate = row
            points.append(
                PowerPoint(
                    math.inf if param == "inf" else float(param),
                    int(n),
                    float(rate),
                    int(reps),
                )
            )
    sidecar = path + ".json"
    config = {}
    if os.path.exists(sidecar):
        with open(sidecar, "r", encoding="utf-8") as fh:
            config = json.load(fh)
    return PowerCurve(tuple(points), config)
