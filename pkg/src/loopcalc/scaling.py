"""Volume-scaling sweeps, CSV output and family snapshots."""

from __future__ import annotations

import csv
import hashlib
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .loop_geom import (
    LoopFamily,
    area_form,
    chen_integral_numeric,
    power,
    suplength,
    sweepout_s2,
    volume_upper,
)
from .numeric_witness import DEFAULT_RESOLUTION, DEFAULT_SAMPLES, build_P_numeric

FORMAT_VERSION = 1
CSV_COLUMNS = ("format_version", "L", "suplength", "vol_multiscale", "vol_naive",
               "chen_value", "runtime_ms")

__all__ = ["ScalingRow", "scaling_row", "scaling_sweep", "write_csv", "read_csv",
           "fit_exponent", "family_snapshot", "thread_count", "FORMAT_VERSION", "CSV_COLUMNS"]


@dataclass(frozen=True)
class ScalingRow:
    L: int
    suplength: float
    vol_multiscale: float
    vol_naive: float
    chen_value: float
    runtime_ms: float
    format_version: int = FORMAT_VERSION


def thread_count(default: int = 1) -> int:
    raw = os.environ.get("LOOPCALC_THREADS")
    if raw is None:
        return default
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"LOOPCALC_THREADS must be an integer, got {raw!r}") from None
    if n < 1:
        raise ValueError("LOOPCALC_THREADS must be positive")
    return n


def scaling_row(L: int, R: int = DEFAULT_RESOLUTION, S: int = DEFAULT_SAMPLES) -> ScalingRow:
    start = time.perf_counter()
    multi = build_P_numeric(L, R, S)
    naive = build_P_numeric(L, R, S, naive=True)
    sl = max((suplength(f) for f in multi), default=0.0)
    chen = chen_integral_numeric([area_form()], power(L, sweepout_s2(R, S)))
    row = ScalingRow(L, sl, volume_upper(multi).value, volume_upper(naive).value, chen,
                     1000.0 * (time.perf_counter() - start))
    return row


def scaling_sweep(Ls, R: int = DEFAULT_RESOLUTION, S: int = DEFAULT_SAMPLES,
                  threads: int | None = None) -> list[ScalingRow]:
    threads = threads or thread_count()
    if threads == 1:
        return [scaling_row(L, R, S) for L in Ls]
    with ThreadPoolExecutor(threads) as pool:
        return list(pool.map(lambda L: scaling_row(L, R, S), Ls))


def write_csv(rows, path_or_file) -> None:
    def _write(fh):
        w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: asdict(r)[k] for k in CSV_COLUMNS})

    if hasattr(path_or_file, "write"):
        _write(path_or_file)
    else:
        with open(path_or_file, "w", newline="") as fh:
            _write(fh)


def read_csv(path) -> list[ScalingRow]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    out = []
    for r in rows:
        if int(r["format_version"]) != FORMAT_VERSION:
            raise ValueError(f"unsupported format_version {r['format_version']}")
        out.append(ScalingRow(int(r["L"]), float(r["suplength"]), float(r["vol_multiscale"]),
                              float(r["vol_naive"]), float(r["chen_value"]),
                              float(r["runtime_ms"])))
    return out


def fit_exponent(Ls, values) -> float:
    """Least-squares slope of ``log(values)`` against ``log(L)``."""
    x, y = np.log(np.asarray(Ls, float)), np.log(np.asarray(values, float))
    return float(np.polyfit(x, y, 1)[0])


def family_snapshot(f: LoopFamily, include_samples: bool = False) -> dict:
    """JSON-ready description; sample arrays are summarized by SHA-256."""
    segs = []
    for seg, count in f.segments:
        data = np.ascontiguousarray(seg.data)
        d = {"axes": list(seg.axes), "curfew": seg.curfew, "repeat": count,
             "shape": list(data.shape), "sha256": hashlib.sha256(data.tobytes()).hexdigest()}
        if include_samples:
            d["samples"] = data.tolist()
        segs.append(d)
    return {"format_version": FORMAT_VERSION, "arity": f.arity, "resolution": f.resolution,
            "samples_per_unit": f.samples_per_unit, "curfew": f.curfew, "weight": f.weight,
            "label": f.label, "segments": segs}


def dump_snapshot(f: LoopFamily, path, include_samples: bool = False) -> None:
    with open(path, "w") as fh:
        json.dump(family_snapshot(f, include_samples), fh, indent=1, sort_keys=True)
