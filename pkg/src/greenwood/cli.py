"""Command-line interface.

Subcommands
-----------
quantiles    build a Monte Carlo quantile table (raw or spectrogram domain)
test         run one test on a single sample read from CSV
power        run a rejection-rate study over a parameter grid
analyze      screen a long signal, segment-wise or through a spectrogram
spectrogram  compute and store a spectrogram matrix

Exit codes: 0 success, 1 runtime failure (unreadable or invalid input data),
2 argument error (bad flags, insufficient replications, missing table
coverage). ``--threads`` and the ``GREENWOOD_THREADS`` variable are accepted
as scheduling hints; results never depend on them.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from .critical import QuantileTable, TableCoverageError, TableRequest, build_quantile_table
from .distributions import DistributionSpec, spec_from
from .power import PowerStudyConfig, export_curve, run_power_study
from .rng import RngStream
from .signal import (
    Signal,
    batch_test,
    build_spectrogram_quantile_table,
    frequency_rows,
    kaiser_window,
    read_signal,
    segment_signal,
    spectrogram,
    spectrogram_null_params,
)
from .testing import (
    GAUSSIAN_NULL,
    GPD_BOUNDARY,
    MG_KINDS,
    BASELINE_KINDS,
    STUDENT_T_BOUNDARY,
    TestSpec,
    run_test,
)

__all__ = ["main"]


class _UsageError(Exception):
    pass


def _parse_int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise _UsageError(f"expected a comma-separated list of integers, got {text!r}")


def _parse_float_list(text: str) -> list[float]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            out.append(math.inf if part == "inf" else float(part))
        except ValueError:
            raise _UsageError(f"expected a comma-separated list of numbers, got {text!r}")
    return out


def _parse_grid(text: str) -> list[float]:
    """Either ``start:step:stop`` (inclusive) or a comma list; ``inf`` allowed."""
    if ":" in text:
        pieces = text.split(":")
        if len(pieces) != 3:
            raise _UsageError(f"grid must be start:step:stop or a comma list, got {text!r}")
        try:
            start, step, stop = (float(p) for p in pieces)
        except ValueError:
            raise _UsageError(f"non-numeric grid bounds in {text!r}")
        if step <= 0:
            raise _UsageError("grid step must be positive")
        count = int(round((stop - start) / step))
        grid = [start + k * step for k in range(count + 1)]
        return [g for g in grid if g <= stop + 1e-12]
    return _parse_float_list(text)


def _spec_from_args(args) -> DistributionSpec:
    family = args.family
    if family is None:
        raise _UsageError("--family is required here")
    params: dict = {}
    if family == "gaussian":
        params = {"mu": args.mu, "sigma2": args.sigma2}
    elif family == "stable":
        if args.alpha is None:
            raise _UsageError("--alpha is required for the stable family")
        params = {"alpha": args.alpha, "sigma": args.sigma}
    elif family == "student_t":
        if args.nu is None:
            raise _UsageError("--nu is required for the student_t family")
        params = {"nu": args.nu}
    elif family == "gpd":
        if args.gamma is None:
            raise _UsageError("--gamma is required for the gpd family")
        params = {"gamma": args.gamma, "delta": args.delta}
    else:
        raise _UsageError(f"unknown family {family!r}")
    try:
        return spec_from(family, params)
    except (ValueError, TypeError) as exc:
        raise _UsageError(str(exc))


def _add_family_flags(parser: argparse.ArgumentParser, required: bool = False) -> None:
    parser.add_argument(
        "--family",
        choices=("gaussian", "stable", "student_t", "gpd"),
        required=required,
        help="distribution family",
    )
    parser.add_argument("--mu", type=float, default=0.0, help="gaussian mean")
    parser.add_argument("--sigma2", type=float, default=1.0, help="gaussian variance")
    parser.add_argument("--alpha", type=float, help="stable tail index in (0, 2]")
    parser.add_argument("--sigma", type=float, default=1.0, help="stable scale")
    parser.add_argument(
        "--nu", type=lambda s: math.inf if s == "inf" else float(s),
        help="student t degrees of freedom (integer or 'inf')",
    )
    parser.add_argument("--gamma", type=float, help="gpd shape")
    parser.add_argument("--delta", type=float, default=1.0, help="gpd scale")


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--threads",
        type=int,
        default=None,
        help="worker hint; accepted for compatibility, never changes results",
    )


def _thread_hint(args) -> int | None:
    if args.threads is not None:
        value = args.threads
    else:
        raw = os.environ.get("GREENWOOD_THREADS")
        if raw is None:
            return None
        try:
            value = int(raw)
        except ValueError:
            raise _UsageError(f"GREENWOOD_THREADS must be an integer, got {raw!r}")
    if value < 1:
        raise _UsageError("thread count must be at least 1")
    return value


def _load_table(path) -> QuantileTable:
    try:
        return QuantileTable.load(path)
    except FileNotFoundError:
        raise
    except (ValueError, KeyError) as exc:
        raise ValueError(f"cannot parse quantile table {path}: {exc}")


def _null_for_kind(kind: str, args) -> DistributionSpec | None:
    if kind in ("mg1", "mg2"):
        return GAUSSIAN_NULL
    if kind == "mg3_gpd":
        return GPD_BOUNDARY
    if kind == "mg4_student_t":
        return STUDENT_T_BOUNDARY
    if kind == "mg_two_sided":
        return _spec_from_args(args)
    return None


def _write_or_print(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


# --------------------------------------------------------------------------
# subcommands


def _cmd_quantiles(args) -> int:
    _thread_hint(args)
    reps = 10000 if args.quick else args.reps
    if reps < 1000:
        raise _UsageError(f"--reps must be at least 1000 (got {reps})")
    spec = _spec_from_args(args)
    cs = _parse_float_list(args.c)
    if not cs:
        raise _UsageError("--c must list at least one level")
    sides = ("lower", "upper") if args.side == "both" else (args.side,)
    rng = RngStream(args.seed)

    if args.domain == "spectrogram":
        if args.window_length is None or args.signal_length is None:
            raise _UsageError(
                "spectrogram domain requires --window-length and --signal-length"
            )
        table = build_spectrogram_quantile_table(
            spec,
            [(c, side) for c in cs for side in sides],
            args.signal_length,
            args.window_length,
            args.beta,
            args.overlap,
            args.signals,
            rng,
            args.f_min,
            args.f_max,
            args.sample_rate,
        )
    else:
        ns = _parse_int_list(args.n) if args.n else []
        if not ns:
            raise _UsageError("--n must list at least one sample size")
        requests = [
            TableRequest(spec, n, c, side) for n in ns for c in cs for side in sides
        ]
        table = build_quantile_table(requests, reps, rng)
    table.save(args.out)
    print(f"wrote {len(table)} entries to {args.out}")
    return 0


def _cmd_test(args) -> int:
    _thread_hint(args)
    table = _load_table(args.table) if args.table else None
    if args.kind in MG_KINDS and table is None:
        raise _UsageError(f"--table is required for kind {args.kind}")
    sample = np.loadtxt(args.input, dtype=np.float64, ndmin=1)
    if sample.ndim != 1:
        raise ValueError("sample file must contain a single column of numbers")
    spec = TestSpec(
        kind=args.kind,
        c=args.c,
        table=table,
        null_spec=_null_for_kind(args.kind, args),
    )
    outcome = run_test(spec, sample)
    _write_or_print(outcome.to_json_dict(), args.out)
    return 0


def _cmd_power(args) -> int:
    _thread_hint(args)
    reps = 500 if args.quick else args.reps
    table = _load_table(args.table) if args.table else None
    if args.kind in MG_KINDS and table is None:
        raise _UsageError(f"--table is required for kind {args.kind}")
    grid = _parse_grid(args.grid)
    if not grid:
        raise _UsageError("parameter grid is empty")
    ns = _parse_int_list(args.n)
    spec = TestSpec(
        kind=args.kind, c=args.c, table=table, null_spec=_null_for_kind(args.kind, args)
    )
    try:
        config = PowerStudyConfig(
            test=spec,
            data_family=args.data_family,
            parameter_grid=tuple(grid),
            sample_sizes=tuple(ns),
            replications=reps,
            master_seed=args.seed,
        )
    except ValueError as exc:
        raise _UsageError(str(exc))
    curve = run_power_study(config)
    export_curve(curve, args.out)
    print(f"wrote {len(curve.points)} rows to {args.out}")
    return 0


def _cmd_analyze(args) -> int:
    _thread_hint(args)
    table = _load_table(args.table)
    sig = read_signal(args.input, args.sample_rate)

    if args.mode == "time":
        spec = TestSpec(
            kind=args.kind,
            c=args.c,
            table=table,
            null_spec=_null_for_kind(args.kind, args),
        )
        segments = segment_signal(sig, args.segment_length)
        report = batch_test(segments, spec, domain="time")
    else:
        if args.kind not in MG_KINDS:
            raise _UsageError("time-frequency mode supports the mg test kinds only")
        if args.window_length is None:
            raise _UsageError("time-frequency mode requires --window-length")
        has_tf_entries = any(
            rec["params"].get("domain") == "spectrogram" for rec in table.records
        )
        if not has_tf_entries:
            raise _UsageError(
                "time-frequency mode needs a table built from spectrogram nulls "
                "(build one with: greenwood quantiles --domain spectrogram ...); "
                f"{args.table} holds raw-sample entries only"
            )
        null = _null_for_kind(args.kind, args)
        extra = spectrogram_null_params(
            null, args.window_length, args.beta, args.overlap, len(sig)
        )
        spec = TestSpec(
            kind=args.kind, c=args.c, table=table, null_spec=null, extra_params=extra
        )
        window = kaiser_window(args.window_length, args.beta)
        sp = spectrogram(sig, window, args.overlap)
        rows = frequency_rows(sp, args.f_min, args.f_max)
        report = batch_test(
            [r for _, r in rows],
            spec,
            domain="time-frequency",
            labels=[f for f, _ in rows],
        )

    _write_or_print(report.to_json_dict(), args.out)
    print(
        f"{report.domain}: {len(report.outcomes)} units, "
        f"{report.rejection_percentage:.2f}% rejected at c={args.c}",
        file=sys.stderr,
    )
    return 0


def _cmd_spectrogram(args) -> int:
    _thread_hint(args)
    sig = read_signal(args.input, args.sample_rate)
    window = kaiser_window(args.window_length, args.beta)
    sp = spectrogram(sig, window, args.overlap)
    np.save(args.out, sp.magnitude_squared)
    meta = {
        "shape": list(sp.magnitude_squared.shape),
        "frequency_step_hz": float(sp.frequencies[1] - sp.frequencies[0])
        if sp.frequencies.size > 1
        else 0.0,
        "frame_count": int(sp.times.size),
        "window_length": int(window.size),
        "beta": args.beta,
        "overlap": args.overlap,
        "sample_rate": sig.sample_rate,
        "matrix_file": args.out if args.out.endswith(".npy") else args.out + ".npy",
    }
    print(json.dumps(meta, indent=2, sort_keys=True))
    return 0


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="greenwood",
        description="Heavy-tail testing with the modified Greenwood statistic",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("quantiles", help="build a Monte Carlo quantile table")
    _add_family_flags(p, required=True)
    _add_common_flags(p)
    p.add_argument("--n", help="comma list of sample sizes (raw domain)")
    p.add_argument("--c", default="0.05", help="comma list of levels (default 0.05)")
    p.add_argument("--side", choices=("lower", "upper", "both"), default="both")
    p.add_argument("--reps", type=int, default=100000, help="replications (min 1000)")
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--quick", action="store_true", help="drop replications to 10000")
    p.add_argument("--out", required=True, help="output JSON path")
    p.add_argument(
        "--domain",
        choices=("raw", "spectrogram"),
        default="raw",
        help="simulate plain samples, or rows of a spectrogram",
    )
    p.add_argument("--window-length", type=int, help="spectrogram window length")
    p.add_argument("--beta", type=float, default=5.0, help="Kaiser beta (default 5)")
    p.add_argument("--overlap", type=int, default=0, help="window overlap (default 0)")
    p.add_argument("--signal-length", type=int, help="simulated signal length")
    p.add_argument(
        "--signals", type=int, default=100, help="simulated signals to pool (default 100)"
    )
    p.add_argument("--f-min", type=float, help="band lower edge, Hz")
    p.add_argument("--f-max", type=float, help="band upper edge, Hz")
    p.add_argument("--sample-rate", type=float, default=1.0, help="simulated rate, Hz")
    p.set_defaults(func=_cmd_quantiles)

    p = sub.add_parser("test", help="test one sample from a single-column CSV")
    _add_family_flags(p)
    _add_common_flags(p)
    p.add_argument("--input", required=True, help="sample file (one number per line)")
    p.add_argument("--kind", required=True, choices=MG_KINDS + BASELINE_KINDS)
    p.add_argument("--table", help="quantile table JSON (required for mg kinds)")
    p.add_argument("--c", type=float, default=0.05, help="level (default 0.05)")
    p.add_argument("--out", help="write the outcome JSON here instead of stdout")
    p.set_defaults(func=_cmd_test)

    p = sub.add_parser("power", help="rejection-rate study over a parameter grid")
    _add_family_flags(p)
    _add_common_flags(p)
    p.add_argument("--kind", required=True, choices=MG_KINDS + BASELINE_KINDS)
    p.add_argument("--table", help="quantile table JSON (required for mg kinds)")
    p.add_argument(
        "--data-family",
        required=True,
        choices=("gaussian", "stable", "student_t", "gpd"),
        help="family the data is drawn from",
    )
    p.add_argument("--grid", required=True, help="start:step:stop or comma list")
    p.add_argument("--n", required=True, help="comma list of sample sizes")
    p.add_argument("--c", type=float, default=0.05)
    p.add_argument("--reps", type=int, default=2000, help="replications per point")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--quick", action="store_true", help="drop replications to 500")
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=_cmd_power)

    p = sub.add_parser("analyze", help="screen a long signal for heavy tails")
    _add_family_flags(p)
    _add_common_flags(p)
    p.add_argument("--input", required=True, help="signal file (binary or CSV)")
    p.add_argument("--mode", choices=("time", "tf"), default="time")
    p.add_argument("--kind", default="mg2", choices=MG_KINDS + BASELINE_KINDS)
    p.add_argument("--table", required=True, help="quantile table JSON")
    p.add_argument("--c", type=float, default=0.05)
    p.add_argument(
        "--segment-length", type=int, default=1000, help="time mode segment length"
    )
    p.add_argument("--window-length", type=int, help="tf mode window length")
    p.add_argument("--beta", type=float, default=5.0, help="Kaiser beta (default 5)")
    p.add_argument("--overlap", type=int, default=0)
    p.add_argument("--f-min", type=float, help="band lower edge, Hz")
    p.add_argument("--f-max", type=float, help="band upper edge, Hz")
    p.add_argument("--sample-rate", type=float, default=1.0, help="rate for CSV input")
    p.add_argument("--out", help="write the report JSON here instead of stdout")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("spectrogram", help="compute and store a spectrogram matrix")
    _add_common_flags(p)
    p.add_argument("--input", required=True, help="signal file (binary or CSV)")
    p.add_argument("--window-length", type=int, required=True)
    p.add_argument("--beta", type=float, default=5.0, help="Kaiser beta (default 5)")
    p.add_argument("--overlap", type=int, default=0)
    p.add_argument("--sample-rate", type=float, default=1.0, help="rate for CSV input")
    p.add_argument("--out", required=True, help="output .npy path for the matrix")
    p.set_defaults(func=_cmd_spectrogram)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except TableCoverageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
