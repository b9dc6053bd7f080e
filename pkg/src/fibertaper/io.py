"""File formats: two-column CSV traces, spectrogram matrices, PGM maps and JSON."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from fibertaper.errors import ValidationError


def read_columns(path, expected: tuple[str, ...] | None = None) -> dict[str, np.ndarray]:
    """Read a headed numeric CSV, skipping blank lines and ``#`` comments.

    Parameters
    ----------
    path : str or Path
    expected : tuple of str, optional
        Column names that must be present.
    """
    lines = [ln for ln in Path(path).read_text().splitlines()
             if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ValidationError(f"{path}: no data")
    reader = csv.reader(lines)
    header = [h.strip() for h in next(reader)]
    if expected and any(name not in header for name in expected):
        raise ValidationError(f"{path}: expected columns {','.join(expected)}, "
                              f"found {','.join(header)}")
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if len(row) != len(header):
            raise ValidationError(f"{path}: row {lineno} has {len(row)} fields")
        try:
            rows.append([float(v) if v.strip() else math.nan for v in row])
        except ValueError as exc:
            raise ValidationError(f"{path}: row {lineno}: {exc}") from None
    data = np.array(rows, dtype=float).reshape(-1, len(header))
    return {name: data[:, i] for i, name in enumerate(header)}


def format_csv(header: list[str], columns, comments: list[str] | None = None) -> str:
    """Render columns as CSV; NaN becomes an empty cell."""
    buf = io.StringIO()
    for c in comments or []:
        buf.write(f"# {c}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    cols = [np.asarray(c, dtype=float) for c in columns]
    for row in zip(*cols):
        writer.writerow(["" if math.isnan(v) else repr(float(v)) for v in row])
    return buf.getvalue()


def read_trace(path):
    """Load an ``L_m,T`` CSV as a :class:`~fibertaper.beats.TransmittanceTrace`."""
    from fibertaper.beats import TransmittanceTrace

    cols = read_columns(path, ("L_m", "T"))
    return TransmittanceTrace(cols["L_m"], cols["T"], {"source": str(path)})


def read_scan(path, wavelength: float):
    """Load a ``z_m,I`` CSV as a :class:`~fibertaper.analysis.ScanTrace`."""
    from fibertaper.analysis.scan import ScanTrace

    cols = read_columns(path, ("z_m", "I"))
    return ScanTrace(cols["z_m"], cols["I"], wavelength)


def spectrogram_csv(sg) -> str:
    """Matrix CSV: first row is the frequency axis, first column the window centres."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["L_m\\K_norm"] + [repr(float(f)) for f in sg.freq_axis])
    for L, row in zip(sg.L_centers, sg.magnitude):
        writer.writerow([repr(float(L))] + [repr(float(v)) for v in row])
    return buf.getvalue()


def write_pgm(path, matrix) -> None:
    """Write a 16-bit binary PGM (row = L window), scaled to the matrix maximum."""
    m = np.asarray(matrix, dtype=float)
    top = m.max() if m.size else 0.0
    scaled = np.zeros(m.shape) if top <= 0 else m / top
    pixels = np.round(scaled * 65535).astype(">u2")
    height, width = pixels.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{width} {height}\n65535\n".encode("ascii"))
        fh.write(pixels.tobytes())


def read_pgm(path) -> np.ndarray:
    """Read back a PGM written by :func:`write_pgm`."""
    raw = Path(path).read_bytes()
    parts = raw.split(maxsplit=4)
    if parts[0] != b"P5":
        raise ValidationError(f"{path}: not a binary PGM")
    width, height, maxval = int(parts[1]), int(parts[2]), int(parts[3])
    dtype = ">u2" if maxval > 255 else "u1"
    return np.frombuffer(parts[4], dtype=dtype).reshape(height, width)


def _default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    return str(obj)


def _finite(obj):
    """Replace non-finite floats by None so the output is strict JSON."""
    if isinstance(obj, dict):
        return {str(k): _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def dumps(obj) -> str:
    """Strict JSON (NaN and inf become null); numpy and ``to_dict`` objects allowed."""
    plain = json.loads(json.dumps(obj, default=_default))
    return json.dumps(_finite(plain), indent=2, allow_nan=False)
