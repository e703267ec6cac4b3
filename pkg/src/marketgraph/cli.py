"""Command-line pipelines: price CSVs in, plot-ready CSV/JSON out.

Subcommands: ``learn`` (static graph), ``learn-tv`` (rolling time-varying
graphs + indicators), ``backtest`` (connectivity-gated S1/S2 comparison),
``synth`` (synthetic fixtures with planted truth), ``indicators``
(recompute indicators from stored Laplacians).

Exit codes: 0 success, 2 validation error, 3 solver non-convergence
(artifacts are still written).
"""

from __future__ import annotations

import argparse
import csv
import datetime
import json
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .analytics import compute_indicators, strategy_s1, strategy_s2
from .laplacian import laplacian_from_weights, num_components, pair_indices
from .preprocessing import (
    PricePanel,
    ReturnsPanel,
    correlation_from_covariance,
    distance_matrix,
    log_returns,
    normalize_columns,
    remove_market_factor,
    sample_covariance,
)
from .solvers import SolverConfig, learn_connected_mle, learn_k_component, learn_smooth_graph, learn_time_varying
from .synthetic import random_k_component_graph, sample_gmrf, simulate_factor_market

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NONCONVERGED = 3

EDGE_THRESHOLD_REL = 1e-4  # an edge is emitted when weight > rel * max weight

DEFAULTS = {
    "scale": "correlation",
    "market": "keep",
    "market_column": None,
    "method": "mle",
    "k": 1,
    "eta": 10.0,
    "alpha": 0.0,
    "gamma": 1.0,
    "delta": 100.0,
    "tau": 1.0,
    "window": 30,
    "stride": 1,
    "memory": 1,
    "seed": 0,
    "ffill": False,
    "invert_gate": False,
    "mode": "gmrf",
    "assets": 10,
    "days": 230,
    "k_true": 2,
    "regimes": "115:0.1,115:0.7",
    "weight_min": 1.0,
    "weight_max": 3.0,
    "beta_min": 0.8,
    "beta_max": 1.2,
    "density": 1.0,
    "indicators": None,
}


class ValidationError(ValueError):
    pass


# ---------------------------------------------------------------------------
# ingestion and file formats
# ---------------------------------------------------------------------------

def ingest_prices(path, ffill: bool = False) -> PricePanel:
    """Read and validate a price CSV (header ``date,<ticker>,...``).

    Rows with missing cells are dropped, or forward-filled when ``ffill``
    is set.  Duplicate dates, non-monotone dates and non-numeric cells are
    errors reported with their row number.
    """
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"input file not found: {path}")
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValidationError(f"{path}: empty file")
    header = [c.strip() for c in rows[0]]
    if not header or header[0].lower() != "date":
        raise ValidationError(f"{path}: first header column must be 'date'")
    tickers = tuple(header[1:])
    if not tickers:
        raise ValidationError(f"{path}: no ticker columns")

    dates: list[datetime.date] = []
    values: list[list[float | None]] = []
    for rn, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(tickers) + 1:
            raise ValidationError(
                f"{path}: row {rn}: expected {len(tickers) + 1} cells, got {len(row)}"
            )
        try:
            d = datetime.date.fromisoformat(row[0].strip())
        except ValueError:
            raise ValidationError(f"{path}: row {rn}: invalid ISO date {row[0]!r}") from None
        if dates:
            if d == dates[-1]:
                raise ValidationError(f"{path}: row {rn}: duplicate date {d.isoformat()}")
            if d < dates[-1]:
                raise ValidationError(
                    f"{path}: row {rn}: dates not increasing ({d.isoformat()} after "
                    f"{dates[-1].isoformat()})"
                )
        cells: list[float | None] = []
        for ci, cell in enumerate(row[1:]):
            text = cell.strip()
            if not text or text.lower() == "nan":
                cells.append(None)
                continue
            try:
                v = float(text)
            except ValueError:
                raise ValidationError(
                    f"{path}: row {rn}, column {tickers[ci]}: non-numeric cell {cell!r}"
                ) from None
            if not np.isfinite(v):
                cells.append(None)
                continue
            if v <= 0:
                raise ValidationError(
                    f"{path}: row {rn}, column {tickers[ci]}: non-positive price {v}"
                )
            cells.append(v)
        dates.append(d)
        values.append(cells)

    kept_dates: list[datetime.date] = []
    kept: list[list[float]] = []
    dropped = 0
    last: list[float | None] = [None] * len(tickers)
    for d, cells in zip(dates, values):
        if ffill:
            cells = [c if c is not None else last[i] for i, c in enumerate(cells)]
        if any(c is None for c in cells):
            dropped += 1
            continue
        last = cells
        kept_dates.append(d)
        kept.append(cells)  # type: ignore[arg-type]
    if dropped:
        print(f"note: dropped {dropped} row(s) with missing values", file=sys.stderr)
    if len(kept) < 2:
        raise ValidationError(f"{path}: fewer than 2 usable price rows")
    return PricePanel(
        dates=tuple(kept_dates), tickers=tickers, prices=np.array(kept, dtype=float)
    )


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def write_matrix_csv(path, M: np.ndarray, labels) -> None:
    with Path(path).open("w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(labels)
        for row in np.asarray(M):
            out.writerow([_fmt(v) for v in row])


def read_matrix_csv(path) -> tuple[np.ndarray, tuple[str, ...]]:
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2:
        raise ValidationError(f"{path}: not a matrix CSV")
    labels = tuple(c.strip() for c in rows[0])
    try:
        M = np.array([[float(c) for c in row] for row in rows[1:]], dtype=float)
    except ValueError:
        raise ValidationError(f"{path}: corrupt matrix CSV") from None
    if M.shape != (len(labels), len(labels)):
        raise ValidationError(f"{path}: matrix shape {M.shape} does not match header")
    return M, labels


def write_edges_csv(path, L: np.ndarray, labels) -> int:
    iu, ju = pair_indices(L.shape[0])
    w = np.maximum(-L[iu, ju], 0.0)
    threshold = EDGE_THRESHOLD_REL * (w.max() if w.size else 0.0)
    n_edges = 0
    with Path(path).open("w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["i", "j", "weight"])
        for i, j, wv in zip(iu, ju, w):
            if wv > threshold:
                out.writerow([labels[i], labels[j], _fmt(wv)])
                n_edges += 1
    return n_edges


def write_indicators_csv(path, indicators) -> None:
    with Path(path).open("w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["date", "algebraic_connectivity", "spectral_radius", "time_consistency"])
        for t, d in enumerate(indicators.dates):
            cons = _fmt(indicators.time_consistency[t - 1]) if t > 0 else ""
            out.writerow(
                [
                    d.isoformat(),
                    _fmt(indicators.algebraic_connectivity[t]),
                    _fmt(indicators.spectral_radius[t]),
                    cons,
                ]
            )


def read_indicators_csv(path):
    from .analytics import IndicatorSeries

    path = Path(path)
    if not path.exists():
        raise ValidationError(f"indicator file not found: {path}")
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][:3] != ["date", "algebraic_connectivity", "spectral_radius"]:
        raise ValidationError(f"{path}: not an indicators CSV")
    dates, lam2, lmax, cons = [], [], [], []
    for row in rows[1:]:
        dates.append(datetime.date.fromisoformat(row[0]))
        lam2.append(float(row[1]))
        lmax.append(float(row[2]))
        if row[3]:
            cons.append(float(row[3]))
    return IndicatorSeries(
        dates=tuple(dates),
        algebraic_connectivity=np.array(lam2),
        spectral_radius=np.array(lmax),
        time_consistency=np.array(cons),
    )


def write_meta(outdir: Path, command: str, resolved: dict, extra: dict) -> None:
    meta = {
        "command": command,
        "version": __version__,
        "config": {k: v for k, v in sorted(resolved.items())},
    }
    meta.update(extra)
    with (outdir / "meta.json").open("w") as fh:
        json.dump(meta, fh, indent=2, default=str)
        fh.write("\n")


# ---------------------------------------------------------------------------
# configuration resolution
# ---------------------------------------------------------------------------

def _parse_config_file(path) -> dict:
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"config file not found: {path}")
    out = {}
    for ln, line in enumerate(path.read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"{path}: line {ln}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _coerce(key: str, value):
    default = DEFAULTS[key]
    if isinstance(value, str):
        if isinstance(default, bool):
            low = value.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValidationError(f"config key {key}: expected a boolean, got {value!r}")
        if isinstance(default, int) and not isinstance(default, bool):
            return int(value)
        if isinstance(default, float):
            return float(value)
    return value


def resolve_config(args: argparse.Namespace) -> dict:
    """defaults < config file < explicit command-line flags."""
    resolved = dict(DEFAULTS)
    if getattr(args, "config", None):
        for key, value in _parse_config_file(args.config).items():
            if key not in DEFAULTS:
                raise ValidationError(f"unknown config key: {key}")
            resolved[key] = _coerce(key, value)
    for key in DEFAULTS:
        cli_value = getattr(args, key, None)
        if cli_value is not None:
            resolved[key] = cli_value
    resolved["input"] = getattr(args, "input", None)
    resolved["output_dir"] = getattr(args, "output_dir", None)
    return resolved


def _solver_config(r: dict) -> SolverConfig:
    return SolverConfig(
        eta=r["eta"],
        alpha=r["alpha"],
        gamma=r["gamma"],
        delta=r["delta"],
        k=r["k"],
        memory=r["memory"],
        seed=r["seed"],
    )


def _prepared_returns(r: dict) -> ReturnsPanel:
    panel = ingest_prices(r["input"], ffill=r["ffill"])
    returns = log_returns(panel)
    if r["market"] == "remove":
        market = None
        if r["market_column"]:
            col = r["market_column"]
            if col not in returns.tickers:
                raise ValidationError(f"market column {col!r} not in tickers")
            idx = returns.tickers.index(col)
            market = returns.returns[:, idx]
            keep = [i for i in range(returns.p) if i != idx]
            returns = ReturnsPanel(
                dates=returns.dates,
                tickers=tuple(t for i, t in enumerate(returns.tickers) if i != idx),
                returns=returns.returns[:, keep],
            )
        returns = remove_market_factor(returns, market).residuals
    return returns


def _similarity(returns: ReturnsPanel, scale: str):
    S = sample_covariance(returns)
    if scale == "correlation":
        S = correlation_from_covariance(S)
    return S


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_learn(r: dict) -> int:
    outdir = Path(r["output_dir"])
    outdir.mkdir(parents=True, exist_ok=True)
    returns = _prepared_returns(r)
    cfg = _solver_config(r)
    t0 = time.perf_counter()

    if r["k"] > 1:
        S = _similarity(returns, r["scale"])
        L, report = learn_k_component(S, cfg)
    elif r["method"] == "smooth":
        if r["alpha"] <= 0:
            raise ValidationError("--method smooth requires --alpha > 0")
        X = normalize_columns(returns) if r["scale"] == "correlation" else returns
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            w = learn_smooth_graph(distance_matrix(X), cfg)
        L = laplacian_from_weights(w, returns.p)
        report = None
        converged = not any("did not reach tolerance" in str(c.message) for c in caught)
    else:
        L, report = learn_connected_mle(_similarity(returns, r["scale"]), cfg)
    wall = time.perf_counter() - t0

    if report is not None:
        converged = report.converged
    write_matrix_csv(outdir / "laplacian.csv", L, returns.tickers)
    n_edges = write_edges_csv(outdir / "edges.csv", L, returns.tickers)
    extra = {
        "converged": bool(converged),
        "iterations": report.iterations if report else None,
        "objective": float(report.objective_trace[-1]) if report is not None and len(report.objective_trace) else None,
        "constraint_residuals": dict(report.constraint_residuals) if report else {},
        "nullity": int(num_components(L)),
        "n_edges": n_edges,
        "wall_time_s": wall,
    }
    write_meta(outdir, "learn", r, extra)
    return EXIT_OK if converged else EXIT_NONCONVERGED


def _rolling_windows(returns: ReturnsPanel, window: int, stride: int):
    if window < 2:
        raise ValidationError("window length must be at least 2")
    if stride < 1:
        raise ValidationError("stride must be at least 1")
    if returns.n < window:
        raise ValidationError(
            f"{returns.n} return rows are fewer than one window of {window}"
        )
    return list(range(0, returns.n - window + 1, stride))


def cmd_learn_tv(r: dict) -> int:
    outdir = Path(r["output_dir"])
    outdir.mkdir(parents=True, exist_ok=True)
    returns = _prepared_returns(r)
    starts = _rolling_windows(returns, r["window"], r["stride"])
    cfg = _solver_config(r)

    t0 = time.perf_counter()
    S_seq, n_seq, window_dates, spans = [], [], [], []
    for s in starts:
        chunk = ReturnsPanel(
            dates=returns.dates[s : s + r["window"]],
            tickers=returns.tickers,
            returns=returns.returns[s : s + r["window"]],
        )
        S_seq.append(_similarity(chunk, r["scale"]))
        n_seq.append(chunk.n)
        window_dates.append(chunk.dates[-1])
        spans.append((chunk.dates[0], chunk.dates[-1]))
    L_seq = learn_time_varying(S_seq, n_seq, cfg)
    wall = time.perf_counter() - t0

    for t, L in enumerate(L_seq):
        write_matrix_csv(outdir / f"laplacian_{t:04d}.csv", L, returns.tickers)
    with (outdir / "windows.csv").open("w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["window", "start_date", "end_date"])
        for t, (d0, d1) in enumerate(spans):
            out.writerow([t, d0.isoformat(), d1.isoformat()])
    indicators = compute_indicators(L_seq, window_dates)
    write_indicators_csv(outdir / "indicators.csv", indicators)
    write_meta(
        outdir,
        "learn-tv",
        r,
        {"n_windows": len(L_seq), "wall_time_s": wall, "converged": True},
    )
    return EXIT_OK


def cmd_backtest(r: dict) -> int:
    outdir = Path(r["output_dir"])
    outdir.mkdir(parents=True, exist_ok=True)
    panel = ingest_prices(r["input"], ffill=r["ffill"])
    returns = log_returns(panel)  # PnL always uses raw returns

    if r["indicators"]:
        indicators = read_indicators_csv(r["indicators"])
    else:
        est_returns = _prepared_returns(r)
        starts = _rolling_windows(est_returns, r["window"], r["stride"])
        S_seq, n_seq, window_dates = [], [], []
        for s in starts:
            chunk = ReturnsPanel(
                dates=est_returns.dates[s : s + r["window"]],
                tickers=est_returns.tickers,
                returns=est_returns.returns[s : s + r["window"]],
            )
            S_seq.append(_similarity(chunk, r["scale"]))
            n_seq.append(chunk.n)
            window_dates.append(chunk.dates[-1])
        L_seq = learn_time_varying(S_seq, n_seq, _solver_config(r))
        indicators = compute_indicators(L_seq, window_dates)
        write_indicators_csv(outdir / "indicators.csv", indicators)

    s1 = strategy_s1(returns)
    s2 = strategy_s2(returns, indicators, tau=r["tau"], invert=r["invert_gate"])
    with (outdir / "pnl.csv").open("w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["date", "s1_cum", "s2_cum", "position"])
        for t, d in enumerate(returns.dates):
            out.writerow(
                [
                    d.isoformat(),
                    _fmt(s1.cumulative_pnl[t]),
                    _fmt(s2.cumulative_pnl[t]),
                    _fmt(s2.positions[t]),
                ]
            )
    write_meta(
        outdir,
        "backtest",
        r,
        {
            "converged": True,
            "final_s1": float(s1.cumulative_pnl[-1]),
            "final_s2": float(s2.cumulative_pnl[-1]),
            "days_invested": int(s2.positions.sum()),
        },
    )
    return EXIT_OK


def _parse_regimes(text: str):
    regimes = []
    for part in text.split(","):
        length, _, level = part.partition(":")
        try:
            regimes.append((int(length), float(level)))
        except ValueError:
            raise ValidationError(
                f"invalid --regimes {text!r}; expected 'len:corr,len:corr,...'"
            ) from None
    return tuple(regimes)


def cmd_synth(r: dict) -> int:
    outdir = Path(r["output_dir"])
    outdir.mkdir(parents=True, exist_ok=True)
    p, n, seed = r["assets"], r["days"], r["seed"]

    if r["mode"] == "gmrf":
        planted = random_k_component_graph(
            p,
            r["k_true"],
            weight_range=(r["weight_min"], r["weight_max"]),
            seed=seed,
            extra_edge_prob=r["density"],
        )
        returns = sample_gmrf(planted.L_true, n - 1, seed=seed + 1)
        write_matrix_csv(outdir / "laplacian_true.csv", planted.L_true, returns.tickers)
        extra = {"planted_nullity": int(num_components(planted.L_true)), "k_true": r["k_true"]}
    elif r["mode"] == "factor":
        sim = simulate_factor_market(
            p,
            n - 1,
            beta_range=(r["beta_min"], r["beta_max"]),
            regimes=_parse_regimes(r["regimes"]),
            seed=seed,
        )
        returns = sim.returns
        with (outdir / "regimes.csv").open("w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(["first_row", "residual_correlation"])
            boundaries = (0,) + sim.regime_boundaries
            for b, level in zip(boundaries, sim.regime_levels):
                out.writerow([b, _fmt(level)])
        with (outdir / "market.csv").open("w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(["date", "market_return"])
            for d, v in zip(returns.dates, sim.market):
                out.writerow([d.isoformat(), _fmt(v)])
        extra = {"regimes": r["regimes"]}
    else:
        raise ValidationError(f"unknown synth mode {r['mode']!r}")

    # returns.csv plus a price panel reproducing those returns under log_returns
    with (outdir / "returns.csv").open("w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["date"] + list(returns.tickers))
        for t, d in enumerate(returns.dates):
            out.writerow([d.isoformat()] + [_fmt(v) for v in returns.returns[t]])
    prices = 100.0 * np.exp(np.vstack([np.zeros(p), np.cumsum(returns.returns, axis=0)]))
    first_date = returns.dates[0] - datetime.timedelta(days=1)
    price_dates = (first_date,) + returns.dates
    with (outdir / "prices.csv").open("w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["date"] + list(returns.tickers))
        for t, d in enumerate(price_dates):
            out.writerow([d.isoformat()] + [_fmt(v) for v in prices[t]])

    extra.update({"converged": True, "n_price_rows": len(price_dates)})
    write_meta(outdir, "synth", r, extra)
    return EXIT_OK


def cmd_indicators(r: dict) -> int:
    indir = Path(r["input"])
    if not indir.is_dir():
        raise ValidationError(f"--input must be a directory of stored Laplacians: {indir}")
    matrix_files = sorted(indir.glob("laplacian_*.csv"))
    if not matrix_files:
        raise ValidationError(f"no laplacian_*.csv files in {indir}")
    windows_file = indir / "windows.csv"
    if not windows_file.exists():
        raise ValidationError(f"missing windows.csv in {indir}")
    with windows_file.open(newline="") as fh:
        rows = list(csv.reader(fh))
    end_dates = [datetime.date.fromisoformat(row[2]) for row in rows[1:]]
    if len(end_dates) != len(matrix_files):
        raise ValidationError("windows.csv does not match the stored matrices")
    L_seq = [read_matrix_csv(f)[0] for f in matrix_files]
    indicators = compute_indicators(L_seq, end_dates)
    outdir = Path(r["output_dir"])
    outdir.mkdir(parents=True, exist_ok=True)
    write_indicators_csv(outdir / "indicators.csv", indicators)
    write_meta(outdir, "indicators", r, {"converged": True, "n_windows": len(L_seq)})
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _add_shared(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--input", help="input CSV file (or directory for 'indicators')")
    sp.add_argument("--output-dir", help="directory for output artifacts")
    sp.add_argument("--config", help="key = value config file; flags override it")
    sp.add_argument("--scale", choices=["covariance", "correlation"])
    sp.add_argument("--market", choices=["keep", "remove"])
    sp.add_argument("--market-column", dest="market_column", help="ticker used as the market index")
    sp.add_argument("--k", type=int, help="component count (k > 1 selects the k-component solver)")
    sp.add_argument("--eta", type=float, help="spectral rank-penalty weight")
    sp.add_argument("--alpha", type=float, help="sparsity / log-degree weight")
    sp.add_argument("--gamma", type=float, help="Frobenius weight of the smooth baseline")
    sp.add_argument("--delta", type=float, help="temporal coupling weight")
    sp.add_argument("--tau", type=float, help="connectivity threshold of the S2 gate")
    sp.add_argument("--window", type=int, help="rolling window length in return days")
    sp.add_argument("--stride", type=int, help="rolling window stride in days")
    sp.add_argument("--memory", type=int, help="joint-history length of the time-varying solver")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--ffill", action="store_const", const=True, default=None,
                    help="forward-fill missing prices instead of dropping rows")
    sp.add_argument("--invert-gate", dest="invert_gate", action="store_const", const=True,
                    default=None, help="invest when connectivity is at or above tau")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="marketgraph",
        description="Learn Laplacian graphs from financial return data.",
    )
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("learn", help="estimate one static graph")
    _add_shared(sp)
    sp.add_argument("--method", choices=["mle", "smooth"], help="estimator for k=1")

    sp = sub.add_parser("learn-tv", help="rolling time-varying graphs + indicators")
    _add_shared(sp)

    sp = sub.add_parser("backtest", help="S1 vs connectivity-gated S2 cumulative PnL")
    _add_shared(sp)
    sp.add_argument("--indicators", help="indicators.csv from a previous learn-tv run")

    sp = sub.add_parser("synth", help="generate synthetic fixtures with planted truth")
    _add_shared(sp)
    sp.add_argument("--mode", choices=["gmrf", "factor"])
    sp.add_argument("--assets", type=int, help="number of assets p")
    sp.add_argument("--days", type=int, help="number of price rows")
    sp.add_argument("--k-true", dest="k_true", type=int, help="planted component count")
    sp.add_argument("--regimes", help="factor mode segments 'len:corr,len:corr,...'")
    sp.add_argument("--weight-min", dest="weight_min", type=float)
    sp.add_argument("--weight-max", dest="weight_max", type=float)
    sp.add_argument("--beta-min", dest="beta_min", type=float)
    sp.add_argument("--beta-max", dest="beta_max", type=float)
    sp.add_argument("--density", type=float, help="in-group extra edge probability")

    sp = sub.add_parser("indicators", help="recompute indicators from stored Laplacians")
    _add_shared(sp)
    return ap


_COMMANDS = {
    "learn": cmd_learn,
    "learn-tv": cmd_learn_tv,
    "backtest": cmd_backtest,
    "synth": cmd_synth,
    "indicators": cmd_indicators,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        resolved = resolve_config(args)
        if not resolved.get("input") and args.command != "synth":
            raise ValidationError("--input is required")
        if not resolved.get("output_dir"):
            raise ValidationError("--output-dir is required")
        return _COMMANDS[args.command](resolved)
    except (ValidationError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
