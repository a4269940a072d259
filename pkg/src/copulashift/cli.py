"""Command-line interface, file formats and result serialization.

Input tables are UTF-8 CSV with a header row naming exactly the columns
``x``, ``y``, ``z_1`` .. ``z_d`` (d >= 1) and optionally ``t``, which is
ignored by the math and echoed through.  Decimal '.' and comma separators;
at least 4 data rows.

Results are JSON documents ``{"command", "config", "result"}`` where
``config`` echoes every effective parameter (seed, k, gamma, B, ...) so the
document can be replayed bit for bit.  All indices are 0-based: a split or
change-point index is the row index of the first post-segment row.  Floats
serialize with 17 significant digits and therefore round-trip exactly.

Exit codes: 0 success, 2 input-format errors, 3 configuration errors,
4 numeric or estimation errors.  Diagnostics go to stderr; documents to
stdout or ``--out``.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from dataclasses import asdict

import click
import numpy as np

from . import preprocess
from .core import (
    ConfigError,
    DataError,
    Dataset,
    EstimatorConfig,
    EtaOutOfRange,
    split,
    validate,
)
from .estimator import estimate_q, resolve_gamma
from .harness import BenchConfig, run_bench
from .scan import CORRECTIONS, ScanConfig
from .scan import scan as run_scan
from .inference import PermutationPlan, permutation_test
from .synth import ScenarioSpec, generate, list_scenarios

EXIT_INPUT = 2
EXIT_CONFIG = 3
EXIT_NUMERIC = 4


class InputFormatError(Exception):
    """The input file does not match the documented table format."""


# --- table format -------------------------------------------------------


def read_table(path: str) -> tuple[Dataset, np.ndarray | None]:
    """Parse an input CSV into a validated dataset plus the optional t column."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise InputFormatError(f"{path}: empty file") from None
            rows = list(reader)
    except OSError as exc:
        raise InputFormatError(f"cannot read {path}: {exc}") from exc
    header = [h.strip() for h in header]
    z_names = [h for h in header if h.startswith("z_")]
    if not z_names:
        raise InputFormatError(f"{path}: at least one confounder column z_1 is required")
    expected_z = [f"z_{i}" for i in range(1, len(z_names) + 1)]
    required = {"x", "y", *expected_z}
    allowed = required | {"t"}
    present = set(header)
    if z_names != expected_z or not required.issubset(present) or not present.issubset(allowed):
        raise InputFormatError(
            f"{path}: header must be x, y, z_1..z_d (d >= 1) and optionally t; got {header}"
        )
    if len(header) != len(present):
        raise InputFormatError(f"{path}: duplicate column names in {header}")
    if len(rows) < 4:
        raise InputFormatError(f"{path}: need at least 4 data rows, got {len(rows)}")
    col = {name: header.index(name) for name in header}
    try:
        matrix = np.array([[float(v) for v in row] for row in rows], dtype=np.float64)
    except (ValueError, IndexError) as exc:
        raise InputFormatError(f"{path}: unparseable numeric value ({exc})") from exc
    if matrix.shape[1] != len(header):
        raise InputFormatError(f"{path}: ragged rows")
    x = matrix[:, col["x"]]
    y = matrix[:, col["y"]]
    z = matrix[:, [col[name] for name in expected_z]]
    t = matrix[:, col["t"]] if "t" in col else None
    return validate(Dataset(x=x, y=y, z=z)), t


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def write_table(path: str, data: Dataset, t: np.ndarray | None = None) -> None:
    header = ["x", "y"] + [f"z_{i}" for i in range(1, data.d + 1)]
    if t is not None:
        header.append("t")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i in range(data.n):
            row = [_fmt(data.x[i]), _fmt(data.y[i])]
            row += [_fmt(v) for v in data.z[i]]
            if t is not None:
                row.append(_fmt(t[i]))
            writer.writerow(row)


# --- result documents ---------------------------------------------------


def dump_json(obj) -> str:
    """Serialize a result document with 17-significant-digit floats."""
    buf = io.StringIO()
    _dump(obj, buf)
    buf.write("\n")
    return buf.getvalue()


def _dump(obj, buf) -> None:
    if isinstance(obj, dict):
        buf.write("{")
        for i, (key, value) in enumerate(obj.items()):
            if i:
                buf.write(", ")
            buf.write(json.dumps(str(key)))
            buf.write(": ")
            _dump(value, buf)
        buf.write("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        buf.write("[")
        for i, value in enumerate(obj):
            if i:
                buf.write(", ")
            _dump(value, buf)
        buf.write("]")
    elif isinstance(obj, (bool, np.bool_)):
        buf.write("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        buf.write(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        if not np.isfinite(obj):
            raise ValueError(f"cannot serialize non-finite float {obj}")
        buf.write(_fmt(float(obj)))
    elif obj is None:
        buf.write("null")
    else:
        buf.write(json.dumps(str(obj)))


def _emit(document: dict, out: str | None) -> None:
    text = dump_json(document)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _guard(fn):
    def wrapper(**kwargs):
        try:
            fn(**kwargs)
        except InputFormatError as exc:
            _fail(EXIT_INPUT, str(exc))
        except ConfigError as exc:
            _fail(EXIT_CONFIG, str(exc))
        except DataError as exc:
            _fail(EXIT_NUMERIC, str(exc))

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


# --- commands -----------------------------------------------------------


@click.group()
def main():
    """Detect changes in the causal dependence of y on x given z."""


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path())
@click.option("--eta", required=True, type=int, help="Row index of the first post-segment row (0-based).")
@click.option("--k", default=30, show_default=True, type=int)
@click.option("--perms", default=499, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--gamma", default=None, type=float, help="Fixed kernel bandwidth; default: median heuristic.")
@click.option("--threads", default=1, show_default=True, type=int, help="Worker count; 0 = all cores.")
@click.option("--out", default=None, type=click.Path())
@_guard
def detect(input_path, eta, k, perms, seed, gamma, threads, out):
    """Split statistic and permutation p-value at a known split index."""
    data, _ = read_table(input_path)
    if not 1 <= eta <= data.n - 1:
        raise EtaOutOfRange(eta, data.n)
    view = split(data, eta)
    fixed = EstimatorConfig(k=k, gamma=resolve_gamma(view, EstimatorConfig(k=k, gamma=gamma)))
    stat = estimate_q(view, fixed)
    outcome = permutation_test(
        view, fixed, PermutationPlan(b=perms, seed=seed), n_jobs=threads if threads else -1
    )
    document = {
        "command": "detect",
        "config": {
            "input": input_path,
            "eta": eta,
            "k": k,
            "perms": perms,
            "seed": seed,
            "gamma": stat.gamma,
            "kernel": fixed.kernel,
        },
        "result": {
            "q_hat": stat.q_hat,
            "t1": stat.t1,
            "t2": stat.t2,
            "t3": stat.t3,
            "gamma": stat.gamma,
            "k": stat.k,
            "p_value": outcome.p_value,
        },
    }
    _emit(document, out)


@main.command("scan")
@click.option("--input", "input_path", required=True, type=click.Path())
@click.option("--window", required=True, type=int)
@click.option("--step", default=1, show_default=True, type=int)
@click.option("--pbar", default=0.05, show_default=True, type=float)
@click.option(
    "--correction",
    default="benjamini_yekutieli",
    show_default=True,
    type=click.Choice(CORRECTIONS),
)
@click.option("--perms", default=499, show_default=True, type=int)
@click.option("--k", default=30, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--threads", default=1, show_default=True, type=int, help="Worker count; 0 = all cores.")
@click.option("--out", default=None, type=click.Path())
@_guard
def scan_cmd(input_path, window, step, pbar, correction, perms, k, seed, threads, out):
    """Scan a series for change points at unknown locations."""
    data, _ = read_table(input_path)
    cfg = ScanConfig(
        window=window,
        step=step,
        p_bar=pbar,
        b=perms,
        correction=correction,
        estimator=EstimatorConfig(k=k),
        seed=seed,
    )
    result = run_scan(data, cfg, n_jobs=threads if threads else -1)
    document = {
        "command": "scan",
        "config": {
            "input": input_path,
            "window": window,
            "step": step,
            "pbar": pbar,
            "correction": correction,
            "perms": perms,
            "k": k,
            "seed": seed,
        },
        "result": {
            "trace": [[int(i), float(q)] for i, q in zip(result.trace_index, result.trace_value)],
            "candidates": result.candidates,
            "p_values": result.p_values,
            "accepted": result.accepted,
        },
    }
    _emit(document, out)


@main.command()
@click.option("--scenario", required=True)
@click.option("--n", default=800, show_default=True, type=int)
@click.option("--tau", default=None, type=int, help="Change index; default n//2.")
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--out", "out_prefix", required=True, type=click.Path(), help="Writes PREFIX.csv and PREFIX.json.")
@click.option("--param", "params", multiple=True, help="Scenario parameter override, name=value.")
@_guard
def simulate(scenario, n, tau, seed, out_prefix, params):
    """Generate a synthetic scenario as CSV plus a JSON metadata sidecar."""
    overrides = {}
    for item in params:
        if "=" not in item:
            raise ConfigError(f"--param expects name=value, got {item!r}")
        name, raw = item.split("=", 1)
        try:
            value = float(raw) if "." in raw or "e" in raw.lower() else int(raw)
        except ValueError:
            value = raw
        overrides[name.strip()] = value
    spec = ScenarioSpec(id=scenario, n=n, tau=tau, seed=seed, params=overrides)
    output = generate(spec)
    write_table(f"{out_prefix}.csv", output.data)
    with open(f"{out_prefix}.json", "w", encoding="utf-8") as fh:
        fh.write(dump_json(output.meta))
    click.echo(f"wrote {out_prefix}.csv and {out_prefix}.json", err=True)


@main.command()
@click.option("--scenarios", required=True, help="Comma-separated scenario ids, or 'all'.")
@click.option("--replicates", default=50, show_default=True, type=int)
@click.option("--perms", default=499, show_default=True, type=int)
@click.option("--n", default=800, show_default=True, type=int)
@click.option("--k", default=30, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--threads", default=1, show_default=True, type=int, help="Worker count; 0 = all cores.")
@click.option("--out", "out_prefix", default=None, type=click.Path(), help="Writes PREFIX.csv and PREFIX.json.")
@_guard
def bench(scenarios, replicates, perms, n, k, seed, threads, out_prefix):
    """Monte-Carlo benchmark: AUC, median p-value and rejections per scenario."""
    wanted = [s for s in (part.strip() for part in scenarios.split(",")) if s]
    if wanted == ["all"]:
        wanted = list(list_scenarios())
    cfg = BenchConfig(
        scenarios=tuple(wanted),
        replicates=replicates,
        n=n,
        b=perms,
        k=k,
        seed=seed,
        n_jobs=threads if threads != 0 else -1,
    )
    rows = run_bench(cfg, log=sys.stderr)
    document = {
        "command": "bench",
        "config": {
            "scenarios": [r.scenario for r in rows],
            "replicates": replicates,
            "perms": perms,
            "n": n,
            "k": k,
            "seed": seed,
        },
        "result": [asdict(row) for row in rows],
    }
    if out_prefix:
        with open(f"{out_prefix}.csv", "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["scenario", "auc", "auc_se", "median_p", "rejections", "replicates"])
            for row in rows:
                writer.writerow(
                    [row.scenario, _fmt(row.auc), _fmt(row.auc_se), _fmt(row.median_p), row.rejections, row.replicates]
                )
        with open(f"{out_prefix}.json", "w", encoding="utf-8") as fh:
            fh.write(dump_json(document))
        click.echo(f"wrote {out_prefix}.csv and {out_prefix}.json", err=True)
    else:
        _emit(document, None)


@main.command("preprocess")
@click.option("--input", "input_path", required=True, type=click.Path())
@click.option("--spec", "spec_path", required=True, type=click.Path(), help="JSON mapping columns to price/rate kinds.")
@click.option("--out", required=True, type=click.Path())
@_guard
def preprocess_cmd(input_path, spec_path, out):
    """Transform level series to volatility-normalized returns.

    The spec file is JSON: {"span": 63, "epsilon": 1e-6, "mean": "ewma",
    "columns": {"x": "price", "y": "rate", "z_1": "rate", ...}}.  Every data
    column must be mapped.  Output rows number n - 1 (differencing).
    """
    try:
        with open(spec_path, encoding="utf-8") as fh:
            spec = json.load(fh)
    except OSError as exc:
        raise InputFormatError(f"cannot read {spec_path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputFormatError(f"{spec_path}: invalid JSON ({exc})") from exc
    if not isinstance(spec, dict) or "columns" not in spec:
        raise ConfigError(f"{spec_path}: expected an object with a 'columns' map")
    cfg = preprocess.EwmaConfig(
        span=int(spec.get("span", preprocess.DEFAULT_SPAN_DAILY)),
        epsilon=float(spec.get("epsilon", preprocess.DEFAULT_EPSILON)),
        mean=str(spec.get("mean", "ewma")),
    )
    data, t = read_table(input_path)
    columns = {"x": data.x, "y": data.y}
    for i in range(data.d):
        columns[f"z_{i + 1}"] = data.z[:, i]
    kinds = spec["columns"]
    missing = set(columns) - set(kinds)
    if missing:
        raise ConfigError(f"{spec_path}: no kind given for columns {sorted(missing)}")
    transformed = {}
    for name, series in columns.items():
        kind = kinds[name]
        if kind not in preprocess.SERIES_KINDS:
            raise ConfigError(f"{spec_path}: column {name!r} has unknown kind {kind!r}")
        transformed[name] = preprocess.pipeline(series, kind, cfg)
    z_new = np.column_stack([transformed[f"z_{i + 1}"] for i in range(data.d)])
    result = Dataset(x=transformed["x"], y=transformed["y"], z=z_new)
    write_table(out, result, t=None if t is None else t[1:])
    document = {
        "command": "preprocess",
        "config": {
            "input": input_path,
            "spec": spec_path,
            "span": cfg.span,
            "alpha": cfg.alpha,
            "epsilon": cfg.epsilon,
            "mean": cfg.mean,
            "columns": {name: kinds[name] for name in sorted(columns)},
        },
        "result": {"rows": result.n, "out": out},
    }
    sys.stdout.write(dump_json(document))


if __name__ == "__main__":
    main()
