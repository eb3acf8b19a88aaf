"""Hypothesis tests built on the modified Greenwood statistic, plus baselines.

Five statistic-based tests share one engine: compute ``S_n``, look up the
Monte Carlo threshold(s) in a quantile table, and compare. Ties reject, so
every rejection region is closed.

==================  =========================  =============  ==============
kind                null                       rejects when   reads table at
==================  =========================  =============  ==============
mg1                 Gaussian                   S_n <= q       (c, lower)
mg2                 Gaussian                   S_n >= q       (c, upper)
mg3_gpd             GPD, gamma = 0.5           S_n <= q       (c, lower)
mg4_student_t       Student t, nu = 2          S_n <= q       (c, lower)
mg_two_sided        any family                 outside [l,u]  (c/2, both)
==================  =========================  =============  ==============

``mg3_gpd`` and ``mg4_student_t`` probe the variance-finiteness boundary of
their family: small ``S_n`` is evidence of tails lighter than the boundary
case, i.e. of finite variance. The Jarque-Bera and fitted-normal
Kolmogorov-Smirnov baselines use Monte Carlo critical values simulated on a
fixed internal seed and cached per ``(kind, n, c, M)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .critical import QuantileTable
from .distributions import GPD, DistributionSpec, Gaussian, StudentT
from .rng import RngStream
from .statistic import StatisticValue, modified_greenwood

__all__ = [
    "GAUSSIAN_NULL",
    "GPD_BOUNDARY",
    "STUDENT_T_BOUNDARY",
    "MG_KINDS",
    "BASELINE_KINDS",
    "TestOutcome",
    "TestSpec",
    "jarque_bera_test",
    "ks_distance",
    "ks_normality_test",
    "mg_gaussianity_test",
    "mg_infinite_variance_test_gpd",
    "mg_infinite_variance_test_t",
    "mg_two_sided_test",
    "run_test",
    "thresholds_for",
]

GAUSSIAN_NULL = Gaussian(0.0, 1.0)
GPD_BOUNDARY = GPD(0.5, 1.0)  # last shape with infinite variance
STUDENT_T_BOUNDARY = StudentT(2)  # last integer nu with infinite variance

MG_KINDS = ("mg1", "mg2", "mg3_gpd", "mg4_student_t", "mg_two_sided")
BASELINE_KINDS = ("jarque_bera", "ks_normality")

_BASELINE_SEED = 271828182845
_BASELINE_CHUNK = 4096
_baseline_cache: dict[tuple, float] = {}


@dataclass(frozen=True)
class TestOutcome:
    """Decision record for one test run on one sample."""

    __test__ = False  # keep pytest from collecting the Test* name

    kind: str
    n: int
    c: float
    statistic: float
    thresholds: tuple
    reject: bool

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "c": self.c,
            "statistic": self.statistic,
            "thresholds": list(self.thresholds),
            "reject": self.reject,
        }


@dataclass(frozen=True)
class TestSpec:
    """A test kind bound to its level, table and (where needed) null spec.

    ``table`` is required for the mg kinds and ignored by the baselines;
    ``null_spec`` is only consulted by ``mg_two_sided``. ``extra_params``
    widens the table key (the spectrogram pipeline uses this to keep
    time-frequency nulls separate from raw ones).
    """

    __test__ = False  # keep pytest from collecting the Test* name

    kind: str
    c: float = 0.05
    table: QuantileTable | None = None
    null_spec: DistributionSpec | None = None
    extra_params: dict | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.kind not in MG_KINDS + BASELINE_KINDS:
            raise ValueError(f"unknown test kind {self.kind!r}")
        if not (0.0 < self.c < 0.5):
            raise ValueError("c must lie in (0, 0.5)")
        if self.kind in MG_KINDS and self.table is None:
            raise ValueError(f"kind {self.kind!r} requires a quantile table")
        if self.kind == "mg_two_sided" and self.null_spec is None:
            raise ValueError("mg_two_sided requires a null spec")


def _lookup(
    table: QuantileTable,
    spec: DistributionSpec,
    n: int,
    c: float,
    side: str,
    extra_params: dict | None,
) -> float:
    if table is None:
        raise ValueError("this test requires a quantile table")
    return table.value_for(spec, n, c, side, extra_params)


def mg_gaussianity_test(
    sample,
    c: float,
    table: QuantileTable,
    side: str = "upper",
    extra_params: dict | None = None,
) -> TestOutcome:
    """One-sided Gaussianity test.

    ``side="upper"`` (kind ``mg2``) rejects for large ``S_n``, the heavy-tail
    direction; ``side="lower"`` (kind ``mg1``) rejects for small ``S_n``.
    """
    if side not in ("upper", "lower"):
        raise ValueError("side must be 'upper' or 'lower'")
    stat = modified_greenwood(sample)
    q = _lookup(table, GAUSSIAN_NULL, stat.n, c, side, extra_params)
    if side == "upper":
        return TestOutcome("mg2", stat.n, c, stat.s_n, (q,), stat.s_n >= q)
    return TestOutcome("mg1", stat.n, c, stat.s_n, (q,), stat.s_n <= q)


def mg_infinite_variance_test_gpd(
    sample,
    c: float,
    table: QuantileTable,
    extra_params: dict | None = None,
) -> TestOutcome:
    """Test H0: infinite variance within the GPD family (boundary gamma = 0.5).

    Requires nonnegative observations; rejecting (small ``S_n``) is evidence
    of finite variance.
    """
    x = np.asarray(sample, dtype=np.float64)
    if x.ndim == 1 and (x < 0.0).any():
        raise ValueError("gpd-family test requires nonnegative observations")
    stat = modified_greenwood(x)
    q = _lookup(table, GPD_BOUNDARY, stat.n, c, "lower", extra_params)
    return TestOutcome("mg3_gpd", stat.n, c, stat.s_n, (q,), stat.s_n <= q)


def mg_infinite_variance_test_t(
    sample,
    c: float,
    table: QuantileTable,
    extra_params: dict | None = None,
) -> TestOutcome:
    """Test H0: infinite variance within the Student t family (boundary nu = 2)."""
    stat = modified_greenwood(sample)
    q = _lookup(table, STUDENT_T_BOUNDARY, stat.n, c, "lower", extra_params)
    return TestOutcome("mg4_student_t", stat.n, c, stat.s_n, (q,), stat.s_n <= q)


def mg_two_sided_test(
    sample,
    null_spec: DistributionSpec,
    c: float,
    table: QuantileTable,
    extra_params: dict | None = None,
) -> TestOutcome:
    """Two-sided test against an arbitrary null, level split evenly per tail."""
    stat = modified_greenwood(sample)
    lo = _lookup(table, null_spec, stat.n, c / 2.0, "lower", extra_params)
    hi = _lookup(table, null_spec, stat.n, c / 2.0, "upper", extra_params)
    reject = stat.s_n <= lo or stat.s_n >= hi
    return TestOutcome("mg_two_sided", stat.n, c, stat.s_n, (lo, hi), reject)


# --------------------------------------------------------------------------
# baselines


def _jb_values(x: np.ndarray) -> np.ndarray:
    # rows are samples; moment form n * (skew**2 / 6 + (kurt - 3)**2 / 24)
    n = x.shape[1]
    d = x - x.mean(axis=1, keepdims=True)
    m2 = np.mean(d * d, axis=1)
    m3 = np.mean(d**3, axis=1)
    m4 = np.mean(d**4, axis=1)
    skew = m3 / m2**1.5
    kurt = m4 / (m2 * m2)
    return n * (skew**2 / 6.0 + (kurt - 3.0) ** 2 / 24.0)


def _ks_values(x: np.ndarray) -> np.ndarray:
    # sup distance between the empirical CDF and the normal fitted by moments
    m, n = x.shape
    xs = np.sort(x, axis=1)
    mean = x.mean(axis=1, keepdims=True)
    sd = x.std(axis=1, ddof=1, keepdims=True)
    u = special.ndtr((xs - mean) / sd)
    i = np.arange(1, n + 1, dtype=np.float64)
    d_plus = (i / n - u).max(axis=1)
    d_minus = (u - (i - 1.0) / n).max(axis=1)
    return np.maximum(d_plus, d_minus)


def ks_distance(probs) -> float:
    """Sup distance between an empirical CDF and the CDF that produced ``probs``.

    ``probs`` must be the reference CDF evaluated at the *sorted* sample.
    """
    u = np.asarray(probs, dtype=np.float64)
    if u.ndim != 1 or u.size == 0:
        raise ValueError("probs must be a nonempty one-dimensional array")
    n = u.size
    i = np.arange(1, n + 1, dtype=np.float64)
    return float(max((i / n - u).max(), (u - (i - 1.0) / n).max()))


def _baseline_threshold(kind: str, n: int, c: float, replications: int) -> float:
    """Upper-tail Monte Carlo critical value for a baseline statistic.

    Simulated once per ``(kind, n, c, M)`` on a fixed internal seed and cached
    for the process lifetime; both baseline statistics are location-scale
    free, so standard normal draws suffice.
    """
    key = (kind, n, c, replications)
    cached = _baseline_cache.get(key)
    if cached is not None:
        return cached
    values_fn = _jb_values if kind == "jarque_bera" else _ks_values
    kind_code = BASELINE_KINDS.index(kind)
    stream = RngStream(_BASELINE_SEED, (kind_code << 56) | (n << 16))
    out = np.empty(replications, dtype=np.float64)
    done = 0
    chunk_index = 0
    while done < replications:
        m = min(_BASELINE_CHUNK, replications - done)
        g = stream.substream(chunk_index).generator()
        out[done : done + m] = values_fn(g.standard_normal((m, n)))
        done += m
        chunk_index += 1
    thr = float(np.quantile(out, 1.0 - c, method="linear"))
    _baseline_cache[key] = thr
    return thr


def _baseline_sample(sample) -> np.ndarray:
    x = np.asarray(sample, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("sample must be one-dimensional")
    if x.size < 8:
        raise ValueError("baseline tests need at least 8 observations")
    if not np.isfinite(x).all():
        raise ValueError("sample contains NaN or infinite values")
    if x.std(ddof=1) == 0.0:
        raise ValueError("sample is degenerate (zero variance)")
    return x


def jarque_bera_test(sample, c: float = 0.05, replications: int = 100000) -> TestOutcome:
    """Moment-based normality test, Monte Carlo critical value, rejects upward."""
    x = _baseline_sample(sample)
    stat = float(_jb_values(x[None, :])[0])
    thr = _baseline_threshold("jarque_bera", x.size, c, replications)
    return TestOutcome("jarque_bera", x.size, c, stat, (thr,), stat >= thr)


def ks_normality_test(sample, c: float = 0.05, replications: int = 100000) -> TestOutcome:
    """Kolmogorov-Smirnov distance to the moment-fitted normal, rejects upward."""
    x = _baseline_sample(sample)
    stat = float(_ks_values(x[None, :])[0])
    thr = _baseline_threshold("ks_normality", x.size, c, replications)
    return TestOutcome("ks_normality", x.size, c, stat, (thr,), stat >= thr)


# --------------------------------------------------------------------------
# dispatch


def thresholds_for(spec: TestSpec, n: int) -> tuple:
    """Thresholds ``spec`` would use at sample size ``n`` (coverage check)."""
    if spec.kind == "mg1":
        return (_lookup(spec.table, GAUSSIAN_NULL, n, spec.c, "lower", spec.extra_params),)
    if spec.kind == "mg2":
        return (_lookup(spec.table, GAUSSIAN_NULL, n, spec.c, "upper", spec.extra_params),)
    if spec.kind == "mg3_gpd":
        return (_lookup(spec.table, GPD_BOUNDARY, n, spec.c, "lower", spec.extra_params),)
    if spec.kind == "mg4_student_t":
        return (
            _lookup(spec.table, STUDENT_T_BOUNDARY, n, spec.c, "lower", spec.extra_params),
        )
    if spec.kind == "mg_two_sided":
        return (
            _lookup(spec.table, spec.null_spec, n, spec.c / 2.0, "lower", spec.extra_params),
            _lookup(spec.table, spec.null_spec, n, spec.c / 2.0, "upper", spec.extra_params),
        )
    if spec.kind == "jarque_bera":
        return (_baseline_threshold("jarque_bera", n, spec.c, 100000),)
    if spec.kind == "ks_normality":
        return (_baseline_threshold("ks_normality", n, spec.c, 100000),)
    raise ValueError(f"unknown test kind {spec.kind!r}")


def run_test(spec: TestSpec, sample) -> TestOutcome:
    """Run the test described by ``spec`` on one sample."""
    if spec.kind == "mg1":
        return mg_gaussianity_test(sample, spec.c, spec.table, "lower", spec.extra_params)
    if spec.kind == "mg2":
        return mg_gaussianity_test(sample, spec.c, spec.table, "upper", spec.extra_params)
    if spec.kind == "mg3_gpd":
        return mg_infinite_variance_test_gpd(sample, spec.c, spec.table, spec.extra_params)
    if spec.kind == "mg4_student_t":
        return mg_infinite_variance_test_t(sample, spec.c, spec.table, spec.extra_params)
    if spec.kind == "mg_two_sided":
        return mg_two_sided_test(
            sample, spec.null_spec, spec.c, spec.table, spec.extra_params
        )
    if spec.kind == "jarque_bera":
        return jarque_bera_test(sample, spec.c)
    if spec.kind == "ks_normality":
        return ks_normality_test(sample, spec.c)
    raise ValueError(f"unknown test kind {spec.kind!r}")
