"""Near-field scan analysis: beat periods, index differences and mode identification."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares, minimize_scalar
from scipy.signal import get_window

from fibertaper import waveguide as wg
from fibertaper.beats import dispersion_curve
from fibertaper.errors import (
    BelowCutoff,
    NoFeasibleRadius,
    ScanTooShort,
    ValidationError,
)
from fibertaper.waveguide import HE11, ModeId, WaveguideSpec, as_mode

#: Half-width in bins of the Hann main lobe used to integrate peak power.
_LOBE_HALF_WIDTH = 3
_MIN_PERIODS = 4

#: Default candidates: the low-order modes seen beating with HE11 in
#: sub-micron tapers. Wider sets (e.g. :data:`EXTENDED_CANDIDATES`) admit
#: near-degenerate alternatives that two-digit index data cannot separate.
DEFAULT_CANDIDATES = tuple(ModeId.parse(s) for s in ("HE12", "HE21", "HE22", "EH11", "TE01"))
EXTENDED_CANDIDATES = tuple(ModeId.parse(s) for s in (
    "HE12", "HE13", "HE21", "HE22", "EH11", "EH12", "EH21", "EH22", "TE01", "TE02"))

DEFAULT_RADIUS_RANGE = (0.2e-6, 2.0e-6)

#: Index resolution of a 100 um scan at 775 nm (one DFT bin); observed
#: differences may exceed the largest reachable value by this much.
DEFAULT_DN_TOLERANCE = 775e-9 / 100e-6


@dataclass(frozen=True, eq=False)
class ScanTrace:
    """Near-field intensity sampled uniformly along the taper axis."""

    z: np.ndarray
    intensity: np.ndarray
    wavelength: float
    offset_position: float = 0.0

    def __post_init__(self):
        z = np.asarray(self.z, dtype=float)
        inten = np.asarray(self.intensity, dtype=float)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "intensity", inten)
        if z.ndim != 1 or z.shape != inten.shape or z.size < 2:
            raise ValidationError("z and intensity must be 1-D arrays of equal length >= 2")
        step = np.diff(z)
        if np.any(step <= 0) or np.ptp(step) > 1e-6 * step.mean():
            raise ValidationError("z samples must be uniformly spaced and increasing")
        if not self.wavelength > 0:
            raise ValidationError("wavelength must be positive")

    @property
    def step(self) -> float:
        return float((self.z[-1] - self.z[0]) / (self.z.size - 1))

    @property
    def length(self) -> float:
        return float(self.z[-1] - self.z[0]) + self.step


@dataclass(frozen=True)
class ScanComponent:
    period: float
    delta_neff: float
    weight: float

    def __iter__(self):
        return iter((self.period, self.delta_neff, self.weight))


def analyze_scan(scan: ScanTrace, n_components: int = 2) -> list[ScanComponent]:
    """Strongest beat components of a near-field scan.

    The mean-removed intensity is Hann-windowed and Fourier transformed; the
    ``n_components`` largest non-DC peaks are located to sub-bin precision by
    a parabola through the log magnitudes. ``weight`` is the power in the
    peak's main lobe divided by the total non-DC power.

    Returns
    -------
    list of ScanComponent
        Sorted by decreasing weight; empty if the scan has no AC content.

    Raises
    ------
    ScanTooShort
        If the scan spans fewer than four periods of a detected component.
    """
    if n_components < 1:
        raise ValidationError("n_components must be >= 1")
    x = scan.intensity - scan.intensity.mean()
    n = x.size
    if n < 16:
        raise ScanTooShort(f"scan has only {n} samples")
    spec = np.fft.rfft(x * get_window("hann", n, fftbins=True))
    power = np.abs(spec) ** 2
    power[0] = 0.0
    total = power[1:].sum()
    if total <= 1e-24 * max(1.0, float(np.sum(scan.intensity**2))):
        return []
    # the first bins carry the leaked DC lobe of the window
    mag = np.sqrt(power)
    candidates = [
        i for i in range(2, power.size - 1)
        if mag[i] > mag[i - 1] and mag[i] >= mag[i + 1]
    ]
    candidates.sort(key=lambda i: -power[i])
    out, used = [], np.zeros(power.size, dtype=bool)
    for i in candidates:
        if len(out) == n_components:
            break
        if used[i]:
            continue
        la, lb, lc = np.log(mag[i - 1:i + 2] + 1e-300)
        denom = la - 2 * lb + lc
        delta = 0.5 * (la - lc) / denom if denom != 0 else 0.0
        k_bin = i + delta
        lo, hi = max(1, i - _LOBE_HALF_WIDTH), min(power.size, i + _LOBE_HALF_WIDTH + 1)
        used[lo:hi] = True
        weight = float(power[lo:hi].sum() / total)
        freq = k_bin / (n * scan.step)  # cycles per metre
        period = 1.0 / freq
        out.append(ScanComponent(period, scan.wavelength / period, weight))
    for c in out:
        if c.period * _MIN_PERIODS > scan.length:
            raise ScanTooShort(
                f"scan of {scan.length:.3g} m covers fewer than {_MIN_PERIODS} periods "
                f"of a {c.period:.3g} m beat")
    return out


# ---------------------------------------------------------------------------
# Mode identification
# ---------------------------------------------------------------------------

@dataclass
class ModeAssignment:
    """Best match of observed index differences to guided modes."""

    pairs: list
    inferred_radius: float
    residual: float
    alternative: dict | None = None
    extra: dict = field(default_factory=dict)

    @property
    def modes(self) -> list[ModeId]:
        return [m for m, _, _ in self.pairs]

    def to_dict(self) -> dict:
        return {
            "modes": [str(m) for m in self.modes],
            "pairs": [{"mode": str(m), "delta_neff": d, "weight": w} for m, d, w in self.pairs],
            "inferred_radius_m": self.inferred_radius,
            "residual": self.residual,
            "alternative": self.alternative,
        }


def _components(components):
    """Normalise input to (delta_neff array, weights array or None)."""
    dn, wts = [], []
    for c in components:
        if isinstance(c, ScanComponent):
            dn.append(c.delta_neff)
            wts.append(c.weight)
        elif np.ndim(c) == 0:
            dn.append(float(c))
            wts.append(None)
        else:
            dn.append(float(c[0]))
            wts.append(float(c[1]) if len(c) > 1 else None)
    return np.asarray(dn, dtype=float), wts


def _delta_table(spec, candidates, radii, r_max):
    """``n_eff(HE11) - n_eff(mode)`` on the radius grid (NaN below cutoff)."""
    ref = dispersion_curve(spec, HE11, r_max).neff(radii)
    table = np.full((len(candidates), radii.size), np.nan)
    for j, mode in enumerate(candidates):
        rc = wg.cutoff_radius(spec, mode)
        if rc >= r_max:
            continue
        ok = radii > rc
        table[j, ok] = ref[ok] - dispersion_curve(spec, mode, r_max).neff(radii[ok])
    return table


def _exact_delta(spec, mode, r) -> float:
    try:
        return wg.solve_neff(spec, HE11, r) - wg.solve_neff(spec, mode, r)
    except BelowCutoff:
        return math.nan


def identify_modes(components, spec: WaveguideSpec | None = None, candidate_modes=None, *,
                   radius_range=DEFAULT_RADIUS_RANGE, n_grid: int = 600,
                   alternative_margin: float = 0.2,
                   dn_tolerance: float = DEFAULT_DN_TOLERANCE) -> ModeAssignment:
    """Assign observed index differences to modes beating with HE11, and infer the radius.

    Minimises ``sum_j (dN_obs_j - (n_eff(HE11, r) - n_eff(mode_j, r)))^2``
    over the radius and over injective assignments of components to
    candidate modes: a grid search on cached dispersion curves followed by a
    bounded refinement with the exact solver.

    Parameters
    ----------
    components : sequence
        Index differences, ``(delta_neff, weight)`` tuples or
        :class:`ScanComponent` objects.
    spec : WaveguideSpec, optional
    candidate_modes : sequence of ModeId, optional
        Defaults to :data:`DEFAULT_CANDIDATES`. HE11 is not allowed.
    radius_range : (float, float)
        Radii searched [m].
    dn_tolerance : float
        Measurement uncertainty of the index differences; a component is
        infeasible only if it exceeds every reachable value by more than this.

    Returns
    -------
    ModeAssignment
        ``alternative`` holds the best assignment with a different mode set
        when its residual is within ``alternative_margin`` of the best.

    Raises
    ------
    NoFeasibleRadius
        If some component exceeds every achievable index difference.
    """
    spec = spec or WaveguideSpec()
    dn, weights = _components(components)
    if dn.size == 0:
        raise ValidationError("need at least one component")
    if np.any(~np.isfinite(dn)) or np.any(dn <= 0):
        raise ValidationError("index differences must be positive")
    cands = [as_mode(m) for m in (candidate_modes or DEFAULT_CANDIDATES)]
    if HE11 in cands:
        raise ValidationError("HE11 is the reference mode and cannot be a candidate")
    if len(cands) < dn.size:
        raise ValidationError("fewer candidates than components")
    r_lo, r_hi = radius_range
    radii = np.geomspace(r_lo, r_hi, n_grid)
    table = _delta_table(spec, cands, radii, r_hi * 1.01)
    reachable = np.nanmax(table) if np.any(np.isfinite(table)) else 0.0
    if np.any(dn >= min(reachable + dn_tolerance, spec.n_core - spec.n_clad)):
        raise NoFeasibleRadius(
            f"largest achievable index difference is {reachable:.4f}; got {dn.max():.4f}")

    # best grid radius for every injective assignment
    scored = []
    for combo in itertools.permutations(range(len(cands)), dn.size):
        pred = table[list(combo)]
        ss = np.sum((pred - dn[:, None]) ** 2, axis=0)
        if not np.any(np.isfinite(ss)):
            continue
        k = int(np.nanargmin(ss))
        scored.append((float(ss[k]), k, combo))
    if not scored:
        raise NoFeasibleRadius("no candidate assignment is guided in the radius range")
    scored.sort()

    def refine(k, combo):
        modes = [cands[c] for c in combo]
        lo, hi = radii[max(k - 1, 0)], radii[min(k + 1, radii.size - 1)]

        def f(r):
            pred = np.array([_exact_delta(spec, m, r) for m in modes])
            val = float(np.sum((pred - dn) ** 2))
            return val if math.isfinite(val) else 1e3

        res = minimize_scalar(f, bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-9 * hi})
        r, ss = (float(res.x), float(res.fun)) if res.fun <= f(radii[k]) else \
            (float(radii[k]), f(radii[k]))
        # Gauss-Newton polish on the residual vector: the scalar search above
        # only pins r to ~sqrt(eps) because the squared error is flat at its minimum
        scale = 1e-6

        def resid(x):
            pred = np.array([_exact_delta(spec, m, x[0] * scale) for m in modes])
            return np.where(np.isfinite(pred), pred - dn, 1.0)

        try:
            ls = least_squares(resid, [r / scale], bounds=([lo / scale], [hi / scale]),
                               xtol=1e-15, ftol=1e-15, gtol=1e-15)
            if 2 * ls.cost <= ss:
                r, ss = float(ls.x[0]) * scale, 2 * float(ls.cost)
        except ValueError:
            pass
        return r, math.sqrt(ss / dn.size), modes

    # refine the leading few: grid ranking may swap after refinement
    refined = [(*refine(k, combo), combo) for _, k, combo in scored[:6]]
    refined.sort(key=lambda t: t[1])
    r_best, rms_best, modes_best, combo_best = refined[0]
    alt = None
    for r, rms, modes, combo in refined[1:]:
        if set(combo) == set(combo_best):
            continue
        if rms <= (1.0 + alternative_margin) * rms_best or rms - rms_best < 1e-9:
            alt = {"modes": [str(m) for m in modes], "inferred_radius_m": r, "residual": rms}
        break
    pairs = [(m, float(d), w) for m, d, w in zip(modes_best, dn, weights)]
    return ModeAssignment(pairs, r_best, rms_best, alt)
