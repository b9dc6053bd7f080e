"""Detection of beat-amplitude drops in a transmittance trace."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from fibertaper.errors import ValidationError

DEFAULT_ENVELOPE_WINDOW = 0.2e-3


@dataclass(frozen=True)
class CutoffEvent:
    """An amplitude drop at lengthening ``L_drop`` [m].

    ``residual_pp`` is the median peak-to-peak transmittance left after the
    drop, ``reference_pp`` the level before it.
    """

    L_drop: float
    residual_pp: float
    reference_pp: float

    def __iter__(self):
        return iter((self.L_drop, self.residual_pp))

    def to_dict(self) -> dict:
        return {"L_drop_m": self.L_drop, "residual_pp": self.residual_pp,
                "reference_pp": self.reference_pp}


def pp_envelope(trace, window: float = DEFAULT_ENVELOPE_WINDOW):
    """Sliding peak-to-peak envelope with hop = window/4.

    Returns
    -------
    centers, envelope, starts, n_win
    """
    n_win = max(2, int(round(window / trace.step)))
    if n_win > trace.T.size:
        raise ValidationError("envelope window longer than the trace")
    hop = max(1, n_win // 4)
    starts = np.arange(0, trace.T.size - n_win + 1, hop)
    frames = np.lib.stride_tricks.sliding_window_view(trace.T, n_win)[starts]
    env = frames.max(axis=1) - frames.min(axis=1)
    centers = trace.L[starts] + 0.5 * (n_win - 1) * trace.step
    return centers, env, starts, n_win


def _sign_changes(x: np.ndarray) -> int:
    s = np.sign(x - x.mean())
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))


def detect_cutoffs(trace, *, window: float = DEFAULT_ENVELOPE_WINDOW, drop: float = 0.5,
                   sustain: int = 10, lookback: int = 4,
                   min_level: float = 0.02) -> list[CutoffEvent]:
    """Find sustained drops of the oscillation envelope.

    An event is declared at window ``i`` when the envelope of windows
    ``i .. i + sustain - 1`` stays at or below ``(1 - drop)`` times the largest
    envelope of the ``lookback`` preceding windows. The preceding windows must
    hold real oscillation: at least two mean crossings each and an envelope
    of at least ``min_level`` times the global maximum.

    Parameters
    ----------
    trace : TransmittanceTrace
    window : float
        Envelope window length [m].
    drop : float
        Fractional decrease that counts as a cutoff (0 < drop < 1).
    sustain, lookback : int
        Window counts, see above.
    min_level : float
        Significance floor relative to the global envelope maximum.

    Returns
    -------
    list of CutoffEvent
        In increasing ``L``.
    """
    if not 0.0 < drop < 1.0:
        raise ValidationError(f"drop must lie in (0, 1), got {drop}")
    centers, env, starts, n_win = pp_envelope(trace, window)
    top = float(env.max()) if env.size else 0.0
    if top <= 0.0:
        return []
    events = []
    i = lookback
    while i + sustain <= env.size:
        ref_slice = slice(i - lookback, i)
        ref = float(env[ref_slice].max())
        if ref < min_level * top or np.max(env[i:i + sustain]) > (1.0 - drop) * ref:
            i += 1
            continue
        oscillating = all(
            _sign_changes(trace.T[s:s + n_win]) >= 2 for s in starts[ref_slice])
        if not oscillating:
            i += 1
            continue
        residual = float(np.median(env[i:i + sustain]))
        events.append(CutoffEvent(float(centers[i]), residual, ref))
        i += sustain
    return events
