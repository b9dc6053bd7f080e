"""Short-time Fourier analysis of transmittance traces and ridge tracking."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import get_window

from fibertaper.errors import ValidationError, WindowTooShort

MIN_WINDOW_SAMPLES = 16


@dataclass(frozen=True, eq=False)
class Spectrogram:
    """STFT magnitude of a trace.

    Attributes
    ----------
    L_centers : ndarray, shape (n_windows,)
        Window-centre lengthening [m].
    freq_axis : ndarray, shape (n_freq,)
        Normalised beat frequency ``K lambda / (2 pi)`` (DC excluded).
    magnitude : ndarray, shape (n_windows, n_freq)
    window_width : float
        Window length [m].
    """

    L_centers: np.ndarray
    freq_axis: np.ndarray
    magnitude: np.ndarray
    window_width: float
    wavelength: float

    def __post_init__(self):
        if self.magnitude.shape != (self.L_centers.size, self.freq_axis.size):
            raise ValidationError("magnitude shape does not match the axes")

    @property
    def bin_width(self) -> float:
        """Spacing of the normalised frequency axis."""
        return float(self.freq_axis[1] - self.freq_axis[0]) if self.freq_axis.size > 1 \
            else float(self.freq_axis[0])

    def to_angular(self, f_norm):
        """Convert normalised frequency back to ``K`` [rad/m]."""
        return 2 * math.pi * np.asarray(f_norm) / self.wavelength


def spectrogram(trace, window_width: float, spec) -> Spectrogram:
    """Hann-windowed STFT magnitude with hop = window/4 and per-window mean removal.

    Parameters
    ----------
    trace : TransmittanceTrace
    window_width : float
        Window length in lengthening [m].
    spec : WaveguideSpec
        Supplies the wavelength for the ``K lambda / 2 pi`` axis.

    Raises
    ------
    WindowTooShort
        If the window covers fewer than 16 samples or exceeds the trace.
    """
    dL = trace.step
    n_win = int(round(window_width / dL))
    if n_win < MIN_WINDOW_SAMPLES:
        raise WindowTooShort(
            f"window of {window_width:.3g} m spans {n_win} samples (< {MIN_WINDOW_SAMPLES})")
    if n_win > trace.T.size:
        raise WindowTooShort("window longer than the trace")
    hop = max(1, n_win // 4)
    starts = np.arange(0, trace.T.size - n_win + 1, hop)
    frames = np.lib.stride_tricks.sliding_window_view(trace.T, n_win)[starts]
    frames = frames - frames.mean(axis=1, keepdims=True)
    taper = get_window("hann", n_win, fftbins=True)
    spectrum = np.abs(np.fft.rfft(frames * taper, axis=1))[:, 1:]
    # scale so a unit-amplitude tone on a bin peaks at 0.5 x its amplitude
    spectrum *= 2.0 / taper.sum()
    # what survives mean removal of a constant frame is rounding noise
    spectrum[spectrum <= 64 * np.finfo(float).eps * float(np.max(np.abs(trace.T)))] = 0.0
    freqs = np.fft.rfftfreq(n_win, dL)[1:] * spec.wavelength
    centers = trace.L[starts] + 0.5 * (n_win - 1) * dL
    return Spectrogram(centers, freqs, spectrum, n_win * dL, spec.wavelength)


@dataclass
class RidgeTrack:
    """A frequency ridge followed across consecutive windows."""

    L: list = field(default_factory=list)
    K_norm: list = field(default_factory=list)
    magnitude: list = field(default_factory=list)
    _last_window: int = -1
    _last_bin: float = 0.0

    @property
    def points(self) -> list[tuple[float, float, float]]:
        return list(zip(self.L, self.K_norm, self.magnitude))

    @property
    def continuity(self) -> float:
        """Largest gap in L between consecutive points [m]."""
        return float(np.max(np.diff(self.L))) if len(self.L) > 1 else 0.0

    @property
    def strength(self) -> float:
        return float(np.sum(self.magnitude))

    def as_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return np.asarray(self.L), np.asarray(self.K_norm), np.asarray(self.magnitude)

    def to_dict(self) -> dict:
        return {"L_m": list(map(float, self.L)), "K_norm": list(map(float, self.K_norm)),
                "magnitude": list(map(float, self.magnitude)), "continuity_m": self.continuity}


def _peaks(row: np.ndarray, floor: float) -> list[tuple[float, float]]:
    """Interior local maxima above ``floor`` as (fractional bin, magnitude).

    Edge bins are skipped: a maximum there cannot be told apart from leakage
    of an unresolved slower (or faster) component.
    """
    out = []
    for i in range(1, row.size - 1):
        a, b, c = row[i - 1], row[i], row[i + 1]
        if b < floor or not (b > a and b >= c):
            continue
        denom = a - 2 * b + c
        delta = 0.5 * (a - c) / denom if denom != 0 else 0.0
        out.append((i + delta, b - 0.25 * (a - c) * delta))
    return out


def extract_ridges(sg: Spectrogram, threshold: float = 0.05, max_jump: float = 3.0,
                   min_length: int = 5, max_gap: int = 2) -> list[RidgeTrack]:
    """Link per-window spectral peaks into ridges.

    Parameters
    ----------
    sg : Spectrogram
    threshold : float
        Peaks below ``threshold * sg.magnitude.max()`` are ignored.
    max_jump : float
        Largest frequency step, in bins, between linked peaks.
    min_length : int
        Ridges with fewer windows are discarded.
    max_gap : int
        Number of consecutive windows a ridge may skip.

    Returns
    -------
    list of RidgeTrack
        Sorted by decreasing total magnitude.
    """
    if not 0.0 < threshold < 1.0:
        raise ValidationError(f"threshold must lie in (0, 1), got {threshold}")
    top = float(sg.magnitude.max()) if sg.magnitude.size else 0.0
    if top <= 0.0:
        return []
    floor = threshold * top
    f0, df = float(sg.freq_axis[0]), sg.bin_width
    active: list[RidgeTrack] = []
    done: list[RidgeTrack] = []
    for wi, row in enumerate(sg.magnitude):
        still = []
        for r in active:
            (still if wi - r._last_window <= max_gap + 1 else done).append(r)
        active = still
        peaks = sorted(_peaks(row, floor), key=lambda p: -p[1])
        claimed = set()
        for bin_pos, mag in peaks:
            best, best_d = None, max_jump
            for r in active:
                if id(r) in claimed or r._last_window == wi:
                    continue
                d = abs(r._last_bin - bin_pos)
                if d <= best_d:
                    best, best_d = r, d
            if best is None:
                best = RidgeTrack()
                active.append(best)
            claimed.add(id(best))
            best.L.append(float(sg.L_centers[wi]))
            best.K_norm.append(f0 + bin_pos * df)
            best.magnitude.append(float(mag))
            best._last_window, best._last_bin = wi, bin_pos
    done.extend(active)
    ridges = [r for r in done if len(r.L) >= min_length]
    ridges.sort(key=lambda r: -r.strength)
    return ridges
