"""Intermodal beating along an adiabatic taper.

Two local modes launched together pick up a relative phase while the light
crosses the taper. With the exponential profile of :mod:`fibertaper.taper`
the phase after a lengthening ``L`` is::

    Phi(L) = 2 * integral_0^{L/2} dbeta(r(z)) dz + h dbeta(w)
           = 2 h * integral_{ln w}^{ln r0} dbeta(e^s) ds + h dbeta(w)

(``z -> s = ln r`` with ``dz = -h ds``) and its rate of change with ``L`` is::

    K(L) = dbeta(w) - (w/2) d(dbeta)/dr at r = w.

Here ``dbeta = (2 pi / lambda) (n_eff,1 - n_eff,2)``. Where either mode of the
pair is below cutoff the pair accumulates no phase (the cut-off mode radiates).

Beat models are small objects exposing ``delta_beta(r)``, its radial
derivative, the pair cutoff and the radii where the integrand has kinks; the
physical one (:class:`CurvePair`) reads cached dispersion curves, and the
constant and power-law stubs serve as closed-form checks.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np

from fibertaper import waveguide as wg
from fibertaper.errors import BelowCutoff, BothBelowCutoff, NyquistViolation, ValidationError
from fibertaper.taper import lengthening_for_waist, waist, waist_at
from fibertaper.waveguide import HE11, ModeId, WaveguideSpec, as_mode

#: Default width in L over which a mode's amplitude ramps to zero at cutoff [m].
DEFAULT_RAMP_WIDTH = 0.2e-3

# Smallest radius covered by the fundamental-mode curve [m]; every other mode
# starts at its own cutoff.
_FUNDAMENTAL_R_MIN = 0.05e-6
_CURVE_POINTS = 400

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(10)


# ---------------------------------------------------------------------------
# Dispersion-curve cache
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=128)
def dispersion_curve(spec: WaveguideSpec, mode: ModeId, r_max: float) -> wg.DispersionCurve:
    """Cached 400-point curve of ``mode`` from cutoff (or 50 nm) up to ``r_max``."""
    rc = wg.cutoff_radius(spec, mode)
    r_lo = _FUNDAMENTAL_R_MIN if rc is None else rc
    if r_max <= r_lo:
        raise BelowCutoff(f"{mode} is not guided below {r_lo:.4g} m")
    return wg.trace_curve(spec, mode, r_lo, r_max, _CURVE_POINTS)


def _curve_r_max(r: float) -> float:
    """Round the requested upper radius up so nearby requests share a cache entry."""
    return float(np.exp(math.ceil(math.log(max(r, 5e-6)) * 16) / 16) * 1.0001)


# ---------------------------------------------------------------------------
# Beat models
# ---------------------------------------------------------------------------

class BeatModel:
    """Propagation-constant difference of a mode pair as a function of radius.

    Subclasses implement :meth:`delta_beta` and :meth:`d_delta_beta_dr` for
    arrays of radii, returning 0 below :attr:`cutoff`.
    """

    #: Radius below which the pair is not jointly guided (0 if always guided).
    cutoff: float = 0.0

    def delta_beta(self, r):
        raise NotImplementedError

    def d_delta_beta_dr(self, r):
        raise NotImplementedError

    def breakpoints(self) -> np.ndarray:
        """Radii where the integrand is only piecewise smooth."""
        return np.array([self.cutoff]) if self.cutoff > 0 else np.empty(0)

    def guides(self, r) -> np.ndarray:
        return np.asarray(r, dtype=float) >= self.cutoff


class ConstantBeat(BeatModel):
    """``dbeta = c`` at every radius."""

    def __init__(self, value: float):
        self.value = float(value)

    def delta_beta(self, r):
        return np.full_like(np.asarray(r, dtype=float), self.value)

    def d_delta_beta_dr(self, r):
        return np.zeros_like(np.asarray(r, dtype=float))


class PowerLawBeat(BeatModel):
    """``dbeta = c (r / r_ref)^(-p)``; gives ``K = dbeta(w) (1 + p/2)``."""

    def __init__(self, c: float, p: float, r_ref: float = 1e-6):
        self.c, self.p, self.r_ref = float(c), float(p), float(r_ref)

    def delta_beta(self, r):
        return self.c * (np.asarray(r, dtype=float) / self.r_ref) ** (-self.p)

    def d_delta_beta_dr(self, r):
        r = np.asarray(r, dtype=float)
        return -self.p * self.delta_beta(r) / r


class CurvePair(BeatModel):
    """Physical beat model from two cached dispersion curves.

    Parameters
    ----------
    spec : WaveguideSpec
    pair : (ModeId, ModeId)
        ``dbeta`` is ``beta(pair[0]) - beta(pair[1])``.
    r_max : float
        Largest radius that will be queried [m].
    """

    def __init__(self, spec: WaveguideSpec, pair, r_max: float):
        m1, m2 = (as_mode(m) for m in pair)
        self.spec, self.pair = spec, (m1, m2)
        self.k0 = spec.k0
        cut = [wg.cutoff_radius(spec, m) for m in (m1, m2)]
        self.cutoff = max(c or 0.0 for c in cut)
        r_key = _curve_r_max(r_max)
        self.r_max = r_key
        self.identical = m1 == m2
        if self.identical:
            self.curves = ()
        else:
            self.curves = tuple(dispersion_curve(spec, m, r_key) for m in (m1, m2))
        # below the fundamental curve's first sample the pair is treated as cut off
        self.cutoff = max(self.cutoff, *(c.r_min for c in self.curves)) if self.curves else 0.0

    def _eval(self, r, what):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        if self.identical:
            return out
        if np.any(r > self.r_max):
            raise ValidationError(f"radius above the cached curve range ({self.r_max:.4g} m)")
        ok = r > self.cutoff
        if np.any(ok):
            rr = r[ok]
            a, b = (getattr(c, what)(rr) for c in self.curves)
            out[ok] = self.k0 * (a - b)
        return out

    def delta_beta(self, r):
        return self._eval(r, "neff")

    def d_delta_beta_dr(self, r):
        return self._eval(r, "dneff_dr")

    def breakpoints(self) -> np.ndarray:
        if self.identical:
            return np.empty(0)
        pts = [self.cutoff] + [c.knots() for c in self.curves]
        pts = np.concatenate([np.atleast_1d(p) for p in pts])
        return np.unique(pts[pts >= self.cutoff])

    def guides(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        return np.ones_like(r, dtype=bool) if self.identical else r > self.cutoff


def as_beat_model(spec: WaveguideSpec, pair_or_model, r_max: float) -> BeatModel:
    if isinstance(pair_or_model, BeatModel):
        return pair_or_model
    return CurvePair(spec, pair_or_model, r_max)


# ---------------------------------------------------------------------------
# Local quantities
# ---------------------------------------------------------------------------

def delta_beta(spec: WaveguideSpec, mode_pair, radius: float) -> float:
    """``(2 pi / lambda) (n_eff,1 - n_eff,2)`` at ``radius`` from the exact solver.

    Raises :class:`BelowCutoff` if either mode is not guided there.
    """
    m1, m2 = (as_mode(m) for m in mode_pair)
    if m1 == m2:
        return 0.0
    return spec.k0 * (wg.solve_neff(spec, m1, radius) - wg.solve_neff(spec, m2, radius))


def beat_frequency(spec: WaveguideSpec, waist_radius, mode_pair, *, normalized: bool = False):
    """Spatial angular beat frequency ``K`` [rad/m of lengthening] at a waist.

    Parameters
    ----------
    spec : WaveguideSpec
    waist_radius : float or array
    mode_pair : pair of modes or BeatModel
    normalized : bool
        Return ``K lambda / (2 pi)`` instead.

    Raises
    ------
    BelowCutoff
        If the pair is not guided at some requested waist.
    """
    w = np.asarray(waist_radius, dtype=float)
    model = as_beat_model(spec, mode_pair, float(np.max(w)))
    if not np.all(model.guides(w)):
        raise BelowCutoff(f"pair not guided at waist {float(np.min(w)):.4g} m")
    k = model.delta_beta(w) - 0.5 * w * model.d_delta_beta_dr(w)
    if normalized:
        k = k * spec.wavelength / (2 * math.pi)
    return float(k) if k.ndim == 0 else k


def _k_unchecked(model: BeatModel, w: np.ndarray) -> np.ndarray:
    """``K`` at each waist, 0 where the pair is not guided."""
    k = model.delta_beta(w) - 0.5 * w * model.d_delta_beta_dr(w)
    return np.where(model.guides(w), k, 0.0)


# ---------------------------------------------------------------------------
# Accumulated phase
# ---------------------------------------------------------------------------

@dataclass
class _PhaseTable:
    """Cumulative ``integral_s^{ln r0} dbeta(e^t) dt`` on the model's breakpoints."""

    model: BeatModel
    r0: float
    s_knots: np.ndarray = field(init=False)
    tail: np.ndarray = field(init=False)

    def __post_init__(self):
        s_top = math.log(self.r0)
        bp = self.model.breakpoints()
        bp = bp[(bp > 0) & (bp < self.r0)]
        # the table reaches e^-12 r0 (sub-nanometre for real fibres); anything
        # thinner is integrated directly in integral_from
        lo = min(math.log(bp.min()), s_top - 12.0) if bp.size else s_top - 12.0
        knots = np.unique(np.concatenate([np.log(bp), [lo, s_top]]))
        # keep panels narrow so the 10-point rule stays exact to rounding
        fine = [knots[0]]
        for a, b in zip(knots[:-1], knots[1:]):
            n = max(1, int(math.ceil((b - a) / 0.05)))
            fine.extend(np.linspace(a, b, n + 1)[1:])
        self.s_knots = np.asarray(fine)
        pieces = self._gl(self.s_knots[:-1], self.s_knots[1:])
        self.tail = np.concatenate([np.cumsum(pieces[::-1])[::-1], [0.0]])

    def _gl(self, a, b):
        a = np.asarray(a, dtype=float)[..., None]
        b = np.asarray(b, dtype=float)[..., None]
        half = 0.5 * (b - a)
        s = 0.5 * (a + b) + half * _GL_NODES
        return np.sum(_GL_WEIGHTS * self.model.delta_beta(np.exp(s)), axis=-1) * half[..., 0]

    def integral_from(self, s):
        """``integral_s^{ln r0}`` for an array of ``s`` (values above ``ln r0`` give 0)."""
        s = np.minimum(np.asarray(s, dtype=float), self.s_knots[-1])
        below = s < self.s_knots[0]
        s_in = np.maximum(s, self.s_knots[0])
        idx = np.clip(np.searchsorted(self.s_knots, s_in, side="right") - 1, 0,
                      self.s_knots.size - 2)
        upper = self.s_knots[idx + 1]
        out = self.tail[idx + 1] + self._gl(s_in, upper)
        if np.any(below):
            # below every breakpoint the integrand is smooth down to s
            out = np.where(below, out + self._gl(s, self.s_knots[0]), out)
        return out


def beat_phase_model(model: BeatModel, r0: float, h: float, L):
    """Accumulated relative phase for any :class:`BeatModel` at lengthening(s) ``L``."""
    L_arr = np.asarray(L, dtype=float)
    table = _PhaseTable(model, r0)
    w = waist_at(r0, h, L_arr)
    phi = 2.0 * h * table.integral_from(np.log(w)) + h * model.delta_beta(w)
    return float(phi) if phi.ndim == 0 else phi


def beat_phase(spec: WaveguideSpec, profile, mode_pair):
    """Relative phase ``Phi`` [rad] of a mode pair across a taper.

    Parameters
    ----------
    spec : WaveguideSpec
    profile : TaperProfile
    mode_pair : pair of modes or BeatModel

    Raises
    ------
    BothBelowCutoff
        If neither mode of the pair is guided at the waist.
    """
    w = waist(profile)
    if not isinstance(mode_pair, BeatModel):
        if not any(wg.is_guided(spec, m, w) or as_mode(m).is_fundamental for m in mode_pair):
            raise BothBelowCutoff(f"neither {mode_pair[0]} nor {mode_pair[1]} is guided "
                                  f"at waist {w:.4g} m")
    model = as_beat_model(spec, mode_pair, profile.r0)
    return beat_phase_model(model, profile.r0, profile.h, profile.L)


# ---------------------------------------------------------------------------
# Transmittance synthesis
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModeAmplitudeSet:
    """Launch amplitudes of the local modes and an incoherent loss fraction.

    ``amplitudes`` are path amplitudes: the transmitted field is their phased
    sum, so ``sum |a_i| <= 1`` (together with the loss) is what keeps the
    transmittance in ``[0, 1]``. HE11 must be present and dominant.
    """

    entries: tuple
    incoherent_loss: float = 0.0

    def __post_init__(self):
        entries = tuple((as_mode(m), complex(a)) for m, a in self.entries)
        object.__setattr__(self, "entries", entries)
        modes = [m for m, _ in entries]
        if len(set(modes)) != len(modes):
            raise ValidationError("each mode may appear only once")
        if HE11 not in modes:
            raise ValidationError("the amplitude set must contain HE11")
        mags = {m: abs(a) for m, a in entries}
        if any(mags[m] > mags[HE11] for m in modes):
            raise ValidationError("HE11 must carry the largest amplitude")
        if not 0.0 <= self.incoherent_loss < 1.0:
            raise ValidationError("incoherent_loss must lie in [0, 1)")
        total = sum(mags.values())
        if total > 1.0 + 1e-12:
            raise ValidationError(f"sum of |amplitude| is {total:.6g} > 1")

    @classmethod
    def from_mapping(cls, amplitudes: dict, incoherent_loss: float = 0.0):
        return cls(tuple(amplitudes.items()), incoherent_loss)

    @property
    def modes(self) -> list[ModeId]:
        return [m for m, _ in self.entries]

    def amplitude(self, mode) -> complex:
        mode = as_mode(mode)
        for m, a in self.entries:
            if m == mode:
                return a
        return 0j


@dataclass(frozen=True, eq=False)
class TransmittanceTrace:
    """Transmittance sampled on a uniform lengthening grid."""

    L: np.ndarray
    T: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        L = np.asarray(self.L, dtype=float)
        T = np.asarray(self.T, dtype=float)
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "T", T)
        if L.ndim != 1 or L.shape != T.shape or L.size < 2:
            raise ValidationError("L and T must be 1-D arrays of equal length >= 2")
        step = np.diff(L)
        if np.any(step <= 0) or np.ptp(step) > 1e-6 * step.mean():
            raise ValidationError("L samples must be uniformly spaced and increasing")
        if np.any(~np.isfinite(T)) or np.any(T < -1e-12) or np.any(T > 1 + 1e-12):
            raise ValidationError("transmittance must lie in [0, 1]")
        # drop rounding overshoot only; real violations were rejected above
        object.__setattr__(self, "T", np.clip(T, 0.0, 1.0))

    @property
    def step(self) -> float:
        return float((self.L[-1] - self.L[0]) / (self.L.size - 1))


def cutoff_ramp(L, L_cut: float, width: float):
    """Raised-cosine factor: 1 up to ``L_cut - width``, 0 from ``L_cut`` on."""
    L = np.asarray(L, dtype=float)
    if width <= 0:
        return (L < L_cut).astype(float)
    x = np.clip((L_cut - L) / width, 0.0, 1.0)
    return 0.5 - 0.5 * np.cos(math.pi * x)


def synthesize_transmittance(spec: WaveguideSpec, r0: float, h: float,
                             amplitudes: ModeAmplitudeSet, L_max: float, dL: float,
                             ramp_width: float = DEFAULT_RAMP_WIDTH) -> TransmittanceTrace:
    """Transmittance ``(1 - loss) |sum_i a_i(L) exp(-i Phi_i(L))|^2`` of a pulled taper.

    ``Phi_i`` is the phase of mode ``i`` relative to HE11. Each mode's amplitude
    ramps to zero over ``ramp_width`` ending at the lengthening where the waist
    reaches its cutoff radius.

    Raises
    ------
    NyquistViolation
        If ``dL`` undersamples the fastest beat in the sweep.
    """
    if not (dL > 0 and L_max > 0 and r0 > 0 and h > 0):
        raise ValidationError("r0, h, L_max and dL must be positive")
    n = int(round(L_max / dL)) + 1
    L = np.arange(n) * dL
    w = waist_at(r0, h, L)
    field_sum = np.zeros(n, dtype=complex)
    k_max = 0.0
    cutoffs = {}
    for mode, a in amplitudes.entries:
        if a == 0:
            continue
        if mode == HE11:
            field_sum += a
            continue
        rc = wg.cutoff_radius(spec, mode)
        L_cut = float(lengthening_for_waist(r0, h, rc)) if rc < r0 else 0.0
        cutoffs[str(mode)] = L_cut
        env = cutoff_ramp(L, L_cut, ramp_width)
        live = env > 0
        if not np.any(live):
            continue
        model = CurvePair(spec, (HE11, mode), r0)
        phi = beat_phase_model(model, r0, h, L[live])
        k_max = max(k_max, float(np.max(np.abs(_k_unchecked(model, w[live])))))
        field_sum[live] += a * env[live] * np.exp(-1j * phi)
    if k_max * dL >= math.pi:
        raise NyquistViolation(
            f"dL = {dL:.3g} m undersamples beats up to K = {k_max:.4g} rad/m "
            f"(need dL < {math.pi / k_max:.3g} m)")
    T = (1.0 - amplitudes.incoherent_loss) * np.abs(field_sum) ** 2
    meta = {
        "source": "synthetic",
        "spec": {"n_core": spec.n_core, "n_clad": spec.n_clad, "wavelength": spec.wavelength},
        "r0": r0, "h": h, "ramp_width": ramp_width,
        "amplitudes": {str(m): [a.real, a.imag] for m, a in amplitudes.entries},
        "incoherent_loss": amplitudes.incoherent_loss,
        "cutoff_L": cutoffs,
    }
    return TransmittanceTrace(L, T, meta)
