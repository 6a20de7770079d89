"""
Text file formats: traces, B-scans, spectra, curves, scenarios, reports.

Trace file::

    # rebar-gauge trace
    # dt_s=1e-11
    # t0_s=0
    # n=2048
    # polarization=par
    # units=V
    0.0
    ...

Samples are written with 17 significant digits so a write/read cycle is
bit-exact. A B-scan is a CSV matrix (one row per time sample, one column per
antenna position) with a JSON sidecar carrying ``dt_s``, ``t0_s``,
``trace_spacing_m``, ``polarization`` and optionally ``x0_m``.
"""

import hashlib
import json
import math
import os
from pathlib import Path
import tempfile

import numpy as np

from .errors import TraceFormatError
from .sigproc import Spectrum, Trace

TRACE_MAGIC = "# rebar-gauge trace"
POLARIZATIONS = ("par", "perp")


def atomic_write_text(path, text):
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def file_digest(*paths):
    """SHA-256 over the concatenated bytes of ``paths``, in order."""
    h = hashlib.sha256()
    for p in paths:
        h.update(Path(p).read_bytes())
    return h.hexdigest()


def _read_text(path):
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise TraceFormatError(f"cannot read {path}: {exc}") from exc


def format_trace(trace, units="V"):
    lines = [
        TRACE_MAGIC,
        f"# dt_s={trace.dt!r}",
        f"# t0_s={trace.t0!r}",
        f"# n={len(trace)}",
    ]
    if trace.polarization is not None:
        lines.append(f"# polarization={trace.polarization}")
    lines.append(f"# units={units}")
    for key in sorted(trace.meta):
        lines.append(f"# meta.{key}={trace.meta[key]}")
    lines.extend(f"{v:.17g}" for v in trace.samples)
    return "\n".join(lines) + "\n"


def write_trace(path, trace, units="V"):
    atomic_write_text(path, format_trace(trace, units))


def parse_trace(text, source="<text>"):
    header = {}
    values = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                key, _, value = body.partition("=")
                header[key.strip()] = value.strip()
            continue
        try:
            values.append(float(line))
        except ValueError as exc:
            raise TraceFormatError(f"{source}:{lineno}: not a number: {line!r}") from exc
    for key in ("dt_s", "n"):
        if key not in header:
            raise TraceFormatError(f"{source}: header lacks {key}")
    try:
        dt = float(header["dt_s"])
        t0 = float(header.get("t0_s", "0"))
        n = int(header["n"])
    except ValueError as exc:
        raise TraceFormatError(f"{source}: bad header value: {exc}") from exc
    if not (math.isfinite(dt) and dt > 0.0):
        raise TraceFormatError(f"{source}: dt_s must be positive")
    if n != len(values):
        raise TraceFormatError(f"{source}: header says n={n} but {len(values)} samples follow")
    pol = header.get("polarization")
    if pol is not None and pol not in POLARIZATIONS:
        raise TraceFormatError(f"{source}: polarization must be one of {POLARIZATIONS}")
    meta = {k[5:]: v for k, v in header.items() if k.startswith("meta.")}
    if "units" in header:
        meta["units"] = header["units"]
    try:
        return Trace(np.array(values), dt=dt, t0=t0, polarization=pol, meta=meta)
    except ValueError as exc:
        raise TraceFormatError(f"{source}: {exc}") from exc


def read_trace(path):
    return parse_trace(_read_text(path), str(path))


def sidecar_path(path):
    return Path(path).with_suffix(".json")


def write_bscan(path, matrix, dt, t0, spacing, polarization, x0=0.0):
    matrix = np.asarray(matrix, dtype=float)
    rows = "\n".join(",".join(f"{v:.17g}" for v in row) for row in matrix)
    meta = {
        "dt_s": dt,
        "t0_s": t0,
        "trace_spacing_m": spacing,
        "polarization": polarization,
        "x0_m": x0,
    }
    atomic_write_text(path, rows + "\n")
    atomic_write_text(sidecar_path(path), json.dumps(meta, indent=2) + "\n")


def read_bscan(path):
    """Return ``(matrix, meta)``; ``matrix`` has one column per position."""
    meta_path = sidecar_path(path)
    try:
        meta = json.loads(_read_text(meta_path))
    except json.JSONDecodeError as exc:
        raise TraceFormatError(f"{meta_path}: invalid JSON: {exc}") from exc
    for key in ("dt_s", "trace_spacing_m"):
        if key not in meta:
            raise TraceFormatError(f"{meta_path}: missing {key}")
    if not float(meta["trace_spacing_m"]) > 0.0:
        raise TraceFormatError(f"{meta_path}: trace spacing must be positive")
    if not float(meta["dt_s"]) > 0.0:
        raise TraceFormatError(f"{meta_path}: dt_s must be positive")
    rows = []
    for lineno, line in enumerate(_read_text(path).splitlines(), 1):
        if not line.strip():
            continue
        try:
            rows.append([float(v) for v in line.split(",")])
        except ValueError as exc:
            raise TraceFormatError(f"{path}:{lineno}: {exc}") from exc
    if not rows or len({len(r) for r in rows}) != 1:
        raise TraceFormatError(f"{path}: B-scan matrix must be rectangular and non-empty")
    matrix = np.array(rows)
    if not np.all(np.isfinite(matrix)):
        raise TraceFormatError(f"{path}: non-finite samples")
    return matrix, meta


def format_spectrum(spectrum):
    lines = [f"# n_time={spectrum.n_time if spectrum.n_time is not None else ''}",
             "freq_hz,re,im"]
    for f, z in zip(spectrum.frequencies, spectrum.bins):
        lines.append(f"{f:.17g},{z.real:.17g},{z.imag:.17g}")
    return "\n".join(lines) + "\n"


def read_spectrum(path):
    """
    Read a ``freq_hz,re,im`` CSV with uniformly spaced frequencies.

    A leading ``# n_time=N`` comment gives the DFT length of the trace the
    spectrum came from.
    """
    n_time = None
    freqs, bins = [], []
    for lineno, raw in enumerate(_read_text(path).splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, value = line[1:].partition("=")
            if key.strip() == "n_time" and value.strip():
                n_time = int(value)
            continue
        if line.lower().startswith("freq"):
            continue
        try:
            f, re_, im = (float(v) for v in line.split(","))
        except ValueError as exc:
            raise TraceFormatError(f"{path}:{lineno}: expected freq_hz,re,im") from exc
        freqs.append(f)
        bins.append(complex(re_, im))
    if not freqs:
        raise TraceFormatError(f"{path}: no spectrum rows")
    f = np.array(freqs)
    if f.size == 1:
        df = 1.0
    else:
        steps = np.diff(f)
        df = float(steps.mean())
        if df <= 0.0 or not np.allclose(steps, df, rtol=1e-9, atol=0.0):
            raise TraceFormatError(f"{path}: frequencies must be uniformly increasing")
    try:
        return Spectrum(np.array(bins), f_start=float(f[0]), df=df, n_time=n_time)
    except ValueError as exc:
        raise TraceFormatError(f"{path}: {exc}") from exc


def write_json(path, record):
    atomic_write_text(path, json.dumps(record, indent=2, sort_keys=True) + "\n")


def read_json(path):
    try:
        return json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise TraceFormatError(f"{path}: invalid JSON: {exc}") from exc
