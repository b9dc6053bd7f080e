"""Exponential taper shape for a constant hot zone.

A fibre of radius ``r0`` pulled symmetrically while a hot zone of fixed length
``h`` is softened ends up, after a total lengthening ``L``, with exponential
flanks and a cylindrical waist::

    r(z) = r0 exp(-z/h)     for 0 <= z <= L/2
    r(z) = w                for L/2 <= z <= (L + h)/2
    w    = r0 exp(-L/(2h))

mirrored about ``z = (L + h)/2``. Volume is conserved: the flanks and waist of
length ``h`` together hold exactly ``pi r0^2 h``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from fibertaper.errors import DegenerateFit, ValidationError
from fibertaper.specfun import DomainError

#: Default pulling speed of each translation stage [m/s].
DEFAULT_PULL_SPEED = 40e-6


@dataclass(frozen=True)
class TaperProfile:
    """Initial radius ``r0`` [m], hot-zone length ``h`` [m] and lengthening ``L`` [m]."""

    r0: float
    h: float
    L: float = 0.0

    def __post_init__(self):
        for name in ("r0", "h", "L"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValidationError(f"{name} must be finite, got {value!r}")
        if self.r0 <= 0 or self.h <= 0:
            raise ValidationError(f"need r0 > 0 and h > 0, got r0={self.r0}, h={self.h}")
        if self.L < 0:
            raise ValidationError(f"lengthening must be >= 0, got {self.L}")

    @property
    def length(self) -> float:
        """Full axial extent of the tapered region, ``L + h``."""
        return self.L + self.h

    def with_length(self, L: float) -> "TaperProfile":
        return TaperProfile(self.r0, self.h, L)


def waist(profile: TaperProfile) -> float:
    """Waist radius ``r0 exp(-L/2h)``."""
    # shares radius_at's arithmetic so the two agree to the last bit
    return radius_at(profile, 0.5 * profile.L)


def waist_at(r0: float, h: float, L):
    """Vectorised waist radius for an array of lengthenings."""
    return r0 * np.exp(-np.asarray(L, dtype=float) / (2.0 * h))


def lengthening_for_waist(r0: float, h: float, w):
    """Inverse of :func:`waist_at`: the ``L`` at which the waist equals ``w``."""
    return 2.0 * h * np.log(r0 / np.asarray(w, dtype=float))


def radius_at(profile: TaperProfile, z):
    """Taper radius at axial position ``z`` [m], measured from one end.

    Accepts scalars or arrays. Raises :class:`DomainError` for positions
    outside ``[0, L + h]``.
    """
    z_arr = np.asarray(z, dtype=float)
    if np.any(~np.isfinite(z_arr)) or np.any(z_arr < 0) or np.any(z_arr > profile.length):
        raise DomainError(f"z must lie in [0, {profile.length:.6g}] m")
    # fold onto the first half; the taper is symmetric about (L + h)/2
    folded = np.minimum(z_arr, profile.length - z_arr)
    r = profile.r0 * np.exp(-np.minimum(folded, 0.5 * profile.L) / profile.h)
    return float(r) if r.ndim == 0 else r


def total_volume(profile: TaperProfile) -> float:
    """Glass volume of both flanks plus the waist cylinder, in closed form."""
    r0, h = profile.r0, profile.h
    w = waist(profile)
    # each flank: integral of pi r0^2 exp(-2z/h) over [0, L/2]
    flanks = math.pi * r0**2 * h * (-math.expm1(-profile.L / h))
    return flanks + math.pi * w**2 * h


def fit_exponential(measurements) -> tuple[float, float, float]:
    """Fit ``ln w = ln r0 - L/(2h)`` to ``(L, w)`` pairs by linear least squares.

    Parameters
    ----------
    measurements : sequence of (float, float)
        Lengthening [m] and waist radius [m]. At least two points; all radii
        must be positive.

    Returns
    -------
    r0, h, rms : float
        Fitted initial radius and hot-zone length, and the RMS residual of
        ``ln w``.

    Raises
    ------
    DegenerateFit
        If all ``L`` coincide or the waist does not shrink with ``L``.
    """
    data = np.asarray(measurements, dtype=float)
    if data.ndim != 2 or data.shape[1] != 2 or data.shape[0] < 2:
        raise ValidationError("need at least two (L, w) measurements")
    L, w = data[:, 0], data[:, 1]
    if np.any(~np.isfinite(data)) or np.any(w <= 0):
        raise ValidationError("all waist radii must be finite and positive")
    if np.ptp(L) == 0:
        raise DegenerateFit("all lengthening values are equal")
    slope, intercept = np.polyfit(L, np.log(w), 1)
    if slope >= 0:
        raise DegenerateFit(f"waist does not decrease with L (slope {slope:.3g})")
    resid = np.log(w) - (intercept + slope * L)
    return float(np.exp(intercept)), float(-0.5 / slope), float(np.sqrt(np.mean(resid**2)))


def lengthening_from_time(t, speed: float = DEFAULT_PULL_SPEED):
    """``L = 2 v t`` for two stages pulling apart at ``speed`` each."""
    return 2.0 * speed * np.asarray(t, dtype=float)
