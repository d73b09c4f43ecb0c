"""CSV input and output. Numbers are written with ``%.17g`` so a write/read cycle is exact."""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from runup.core import Grid1D, InvalidParameterError, PhysicalIC, ShorelineSeries

FMT = "%.17g"


class InputError(InvalidParameterError):
    pass


def _read_table(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise InputError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    data = np.empty((len(rows) - 1, len(header)))
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise InputError(f"{path}: row {i} has {len(row)} fields, header has {len(header)}")
        for j, cell in enumerate(row):
            try:
                v = float(cell)
            except ValueError:
                raise InputError(f"{path}: row {i}, column {header[j]!r}: not a number ({cell.strip()!r})") from None
            if not np.isfinite(v):
                raise InputError(f"{path}: row {i}, column {header[j]!r}: non-finite value")
            data[i - 2, j] = v
    return header, data


def _column(path, header, data, name):
    if name not in header:
        raise InputError(f"{path}: missing column {name!r} (found {header})")
    return data[:, header.index(name)]


def read_series_csv(path):
    """``t,R`` -> ShorelineSeries; ``x,eta0,u0`` -> PhysicalIC."""
    header, data = _read_table(path)
    if "t" in header:
        kind, cols = "t", ("t", "R")
    elif "x" in header:
        kind, cols = "x", ("x", "eta0", "u0")
    else:
        raise InputError(f"{path}: header must contain t,R or x,eta0,u0 (found {header})")
    arrays = [_column(path, header, data, c) for c in cols]
    if arrays[0].size < 2:
        raise InputError(f"{path}: need at least two data rows")
    d = np.diff(arrays[0])
    if np.any(d <= 0):
        i = int(np.argmax(d <= 0))
        raise InputError(f"{path}: column {kind!r} is not strictly increasing at row {i + 3} "
                         f"({arrays[0][i]!r} then {arrays[0][i + 1]!r})")
    if kind == "t":
        return ShorelineSeries(Grid1D(arrays[0], "t"), arrays[1])
    return PhysicalIC(Grid1D(arrays[0], "x"), arrays[1], arrays[2])


def write_columns(path, names, columns):
    arr = np.column_stack([np.asarray(c, dtype=float) for c in columns])
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(names) + "\n")
        for row in arr:
            fh.write(",".join(FMT % v for v in row) + "\n")


def write_diagnostics(path, diag: dict):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("metric,value\n")
        for k in sorted(diag):
            v = diag[k]
            fh.write(f"{k},{FMT % v if isinstance(v, (int, float, np.floating)) else v}\n")


def emit_results(out_dir, runup=None, recovered=None, original=None, gamma=None, diagnostics=None, extra=None):
    """Write whichever outputs are given; returns the list of files written."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    def put(name, names, cols):
        write_columns(out / name, names, cols)
        written.append(out / name)

    if runup is not None:
        put("runup.csv", ("t", "R"), (runup.t.nodes, runup.R))
    if recovered is not None:
        put("recovered_ic.csv", ("x", "eta0", "u0"), (recovered.x.nodes, recovered.eta0, recovered.u0))
    if original is not None:
        put("original_ic.csv", ("x", "eta0", "u0"), (original.x.nodes, original.eta0, original.u0))
    if gamma is not None:
        put("gamma.csv", ("sigma", "tau"), (gamma.sigma.nodes, gamma.tau_of_sigma))
    if original is not None and recovered is not None:
        x = original.x.nodes
        xr = recovered.x.nodes
        inside = (x >= xr[0]) & (x <= xr[-1])
        e = np.where(inside, np.interp(x, xr, recovered.eta0), np.nan)
        u = np.where(inside, np.interp(x, xr, recovered.u0), np.nan)
        put("plot_compare.csv", ("x", "eta0_orig", "eta0_rec", "u0_orig", "u0_rec"),
            (x, original.eta0, e, original.u0, u))
    for name, (names, cols) in (extra or {}).items():
        put(name, names, cols)
    if diagnostics is not None:
        write_diagnostics(out / "diagnostics.csv", diagnostics)
        written.append(out / "diagnostics.csv")
    return written


__all__ = ["read_series_csv", "write_columns", "write_diagnostics", "emit_results", "InputError", "FMT"]
