"""Exact vector modes of a step-index cylinder with an infinite cladding.

The core is a uniform dielectric rod of radius ``r`` and index ``n_core`` in a
cladding of index ``n_clad`` (air for a tapered fibre). With
``u = k r sqrt(n_core^2 - n^2)`` and ``w = k r sqrt(n^2 - n_clad^2)`` the
eigenvalue equation factorises into one equation per family::

    TE   J1(u)/(u J0(u)) = -K1(w)/(w K0(w))
    TM   J1(u)/(u J0(u)) = -(n_clad/n_core)^2 K1(w)/(w K0(w))
    HE   J_{l-1}(u)/(u J_l(u)) = l/u^2 - P b - R
    EH   J_{l+1}(u)/(u J_l(u)) = l/u^2 + P b - R

where ``b = K_l'(w)/(w K_l(w))``, ``P = (n_core^2 + n_clad^2)/(2 n_core^2)``
and ``R = sqrt(((n_core^2 - n_clad^2)/(2 n_core^2))^2 b^2
+ (l n/n_core)^2 (1/u^2 + 1/w^2)^2)``. The product of the HE and EH factors is
the usual hybrid determinant.

Each family is solved on the transverse parameter ``w`` rather than on
``n``: ``w -> 0`` is the cutoff end, where the right-hand sides are evaluated
through their analytic limits instead of by bisecting into the singularity.
The HE/EH right-hand sides are rearranged so the ``1/w^2`` terms cancel
analytically.

Modes are labelled by root order: between consecutive zeros of ``J_l`` each
family has at most one root, so ``HE_lm`` lives in the m-th inter-zero window
and ``EH_lm``, ``TE_0m``, ``TM_0m`` in the (m+1)-th (their first window never
holds a root).
"""

from __future__ import annotations

import enum
import functools
import math
import re
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicHermiteSpline, PchipInterpolator
from scipy.optimize import brentq

from fibertaper import specfun
from fibertaper.errors import (
    BelowCutoff,
    EmptyCurve,
    NoConvergence,
    ValidationError,
)

# l + 1 must stay within the Bessel kernel.
MAX_AZIMUTHAL_ORDER = specfun.MAX_ORDER - 1

# Smallest w tried before the root is declared numerically at cutoff.
_W_FLOOR_EXPONENTS = (8, 16, 32, 64, 96)


@dataclass(frozen=True)
class WaveguideSpec:
    """Optical context: core and cladding indices and the vacuum wavelength [m]."""

    n_core: float = 1.453
    n_clad: float = 1.0
    wavelength: float = 775e-9

    def __post_init__(self):
        for name in ("n_core", "n_clad", "wavelength"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ValidationError(f"{name} must be a finite number, got {value!r}")
        if self.n_clad < 1.0:
            raise ValidationError(f"n_clad must be >= 1, got {self.n_clad}")
        if self.n_core <= self.n_clad:
            raise ValidationError(
                f"n_core ({self.n_core}) must exceed n_clad ({self.n_clad})")
        if self.wavelength <= 0:
            raise ValidationError(f"wavelength must be > 0, got {self.wavelength}")

    @property
    def k0(self) -> float:
        """Vacuum wavenumber 2*pi/wavelength [rad/m]."""
        return 2.0 * math.pi / self.wavelength

    @property
    def numerical_aperture(self) -> float:
        return math.sqrt(self.n_core**2 - self.n_clad**2)

    def v_number(self, radius):
        return self.k0 * self.numerical_aperture * radius

    def radius_for_v(self, v):
        return v / (self.k0 * self.numerical_aperture)


class Family(str, enum.Enum):
    HE = "HE"
    EH = "EH"
    TE = "TE"
    TM = "TM"


_MODE_RE = re.compile(r"^(HE|EH|TE|TM)(\d)(\d+)$")


@dataclass(frozen=True, order=True)
class ModeId:
    """Guided-mode label, e.g. ``HE11`` or ``TE01``.

    The text form is the family followed by a single-digit azimuthal order and
    the radial order, so ``HE110`` parses as l=1, m=10.
    """

    family: Family
    l: int
    m: int

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if self.m < 1:
            raise ValidationError(f"radial order must be >= 1, got {self.m}")
        if self.family in (Family.TE, Family.TM):
            if self.l != 0:
                raise ValidationError(f"{self.family.value} modes require l = 0, got l = {self.l}")
        elif not 1 <= self.l <= 9:
            raise ValidationError(f"{self.family.value} modes require 1 <= l <= 9, got l = {self.l}")

    @classmethod
    def parse(cls, text: str) -> "ModeId":
        token = text.strip().upper()
        match = _MODE_RE.match(token)
        if match is None:
            raise ValidationError(f"cannot parse mode name {text!r}")
        try:
            return cls(Family(match.group(1)), int(match.group(2)), int(match.group(3)))
        except ValidationError as exc:
            raise ValidationError(f"invalid mode {text!r}: {exc}") from None

    def __str__(self) -> str:
        return f"{self.family.value}{self.l}{self.m}"

    @property
    def is_fundamental(self) -> bool:
        return self.family is Family.HE and self.l == 1 and self.m == 1


HE11 = ModeId(Family.HE, 1, 1)


def as_mode(mode) -> ModeId:
    return mode if isinstance(mode, ModeId) else ModeId.parse(str(mode))


# ---------------------------------------------------------------------------
# Characteristic function
# ---------------------------------------------------------------------------

def _bessel_orders(mode: ModeId) -> tuple[int, int]:
    """(order of J in the denominator, order of J in the numerator)."""
    if mode.family in (Family.TE, Family.TM):
        return 0, 1
    if mode.l > MAX_AZIMUTHAL_ORDER:
        raise ValidationError(
            f"{mode}: azimuthal order above {MAX_AZIMUTHAL_ORDER} not supported")
    if mode.family is Family.HE:
        return mode.l, mode.l - 1
    return mode.l, mode.l + 1


@functools.lru_cache(maxsize=None)
def bessel_j_zero(order: int, index: int) -> float:
    """index-th positive zero of J_order (index >= 1); index 0 returns 0."""
    if index == 0:
        return 0.0
    found = 0
    step = 0.25
    x = 1e-3 if order == 0 else order + 0.5
    f_prev = specfun.j_sequence(order, x)[order]
    while True:
        x_next = x + step
        f_next = specfun.j_sequence(order, x_next)[order]
        if f_prev == 0.0 or f_prev * f_next < 0.0:
            found += 1
            if found == index:
                return brentq(lambda t: specfun.j_sequence(order, t)[order], x, x_next,
                              xtol=1e-15, rtol=4 * np.finfo(float).eps)
        x, f_prev = x_next, f_next


def _window(mode: ModeId) -> tuple[float, float]:
    """Interval of u (between zeros of J_l) holding the mode's root."""
    j_order, _ = _bessel_orders(mode)
    index = mode.m if mode.family is Family.HE else mode.m + 1
    return bessel_j_zero(j_order, index - 1), bessel_j_zero(j_order, index)


def _rhs(spec: WaveguideSpec, mode: ModeId, u: float, w: float, v: float) -> float:
    """Right-hand side G(w) of the family equation J_a/(u J_l) = G, for w > 0."""
    n1sq, n2sq = spec.n_core**2, spec.n_clad**2
    if mode.family in (Family.TE, Family.TM):
        k0, k1 = specfun.k_sequence(1, w, scaled=True)
        g = -k1 / (w * k0)
        return g if mode.family is Family.TE else g * n2sq / n1sq
    l = mode.l
    ks = specfun.k_sequence(l, w, scaled=True)
    q = ks[l - 1] / (w * ks[l])
    kr_sq = (v * v) / (n1sq - n2sq)
    neff_sq = n2sq + w * w / kr_sq
    n = math.sqrt(neff_sq)
    b = -q - l / (w * w)
    s = 1.0 / (u * u) + 1.0 / (w * w)
    p = (n1sq + n2sq) / (2.0 * n1sq)
    c = (n1sq - n2sq) / (2.0 * n1sq)
    r = math.hypot(c * b, l * n * s / spec.n_core)
    if mode.family is Family.EH:
        return l / (u * u) + p * b - r
    n2 = spec.n_clad
    # -P b - R rewritten as (P^2 b^2 - R^2)/(-P b + R) with the 1/w^2 terms
    # of (n2 b + l n S) cancelled by hand.
    lower = n2 * b - l * n * s
    upper = -n2 * q + l / (kr_sq * (n + n2)) + l * n / (u * u)
    return l / (u * u) + lower * upper / (n1sq * (r - p * b))


def _rhs_at_cutoff_sign_or_value(spec: WaveguideSpec, mode: ModeId):
    """Limit of G as w -> 0: a finite value or +/-inf."""
    if mode.family in (Family.TE, Family.TM, Family.EH):
        return -math.inf
    if mode.l == 1:
        return math.inf
    n1sq, n2sq = spec.n_core**2, spec.n_clad**2
    return n2sq / ((n1sq + n2sq) * (mode.l - 1))


def _normalised(ja_over_u: float, jl: float, g: float) -> float:
    if math.isinf(g):
        return -jl * math.copysign(1.0, g)
    return (ja_over_u - jl * g) / math.sqrt(1.0 + g * g)


def _family_residual(spec, mode, u, w, v) -> float:
    """(J_a(u)/u - J_l(u) G(w)) / sqrt(1 + G^2); pole free, bounded in G."""
    j_order, a_order = _bessel_orders(mode)
    js = specfun.j_sequence(max(j_order, a_order), u)
    if w == 0.0:
        g = _rhs_at_cutoff_sign_or_value(spec, mode)
    else:
        g = _rhs(spec, mode, u, w, v)
    return _normalised(js[a_order] / u, js[j_order], g)


def _uw(spec: WaveguideSpec, radius: float, n_eff: float) -> tuple[float, float, float]:
    kr = spec.k0 * radius
    u = kr * math.sqrt((spec.n_core - n_eff) * (spec.n_core + n_eff))
    w = kr * math.sqrt((n_eff - spec.n_clad) * (n_eff + spec.n_clad))
    return u, w, kr * spec.numerical_aperture


def _neff_from_uw(spec: WaveguideSpec, radius: float, u: float, w: float) -> float:
    kr = spec.k0 * radius
    if w <= u:
        return math.sqrt(spec.n_clad**2 + (w / kr) ** 2)
    return math.sqrt(spec.n_core**2 - (u / kr) ** 2)


def dispersion_residual(spec: WaveguideSpec, mode, radius: float, n_eff: float) -> float:
    """Characteristic function of ``mode`` at a trial effective index.

    Zero exactly at the mode's effective index. Inside the mode's window of
    ``u`` the value is the family equation cleared of its poles and scaled to
    stay bounded; outside the window it is held at the edge value, so as a
    function of ``n_eff`` it changes sign once if the mode is guided and never
    otherwise.
    """
    mode = as_mode(mode)
    if not spec.n_clad < n_eff < spec.n_core:
        raise specfun.DomainError(
            f"n_eff={n_eff} outside ({spec.n_clad}, {spec.n_core})")
    if radius <= 0:
        raise specfun.DomainError(f"radius must be > 0, got {radius}")
    u, w, v = _uw(spec, radius, n_eff)
    u_lo, u_hi = _window(mode)
    if u <= u_lo:
        u = u_lo if u_lo > 0 else u
    elif u >= u_hi:
        u = u_hi
    else:
        return _family_residual(spec, mode, u, w, v)
    # clamped to a window edge, where J_l(u) = 0
    w = math.sqrt(max(v * v - u * u, 0.0))
    return _family_residual(spec, mode, u, w, v)


class _ModeProblem:
    """Root bracket of one mode at one V number, in the variable w."""

    def __init__(self, spec: WaveguideSpec, mode: ModeId, v: float):
        self.spec, self.mode, self.v = spec, mode, v
        self.u_lo, self.u_hi = _window(mode)

    def f(self, w: float) -> float:
        v = self.v
        u = math.sqrt((v - w) * (v + w))
        return _family_residual(self.spec, self.mode, u, w, v)

    def high_w_end(self) -> tuple[float, float]:
        """(w, residual) at the small-u window edge (n_eff towards n_core)."""
        u = self.u_lo if self.u_lo > 0 else 1e-6 * self.v
        w = math.sqrt((self.v - u) * (self.v + u))
        return w, _family_residual(self.spec, self.mode, u, w, self.v)

    def low_w_end(self) -> tuple[float, float]:
        """(w, residual) at the large-u window edge; w = 0 when that edge is cutoff."""
        if self.u_hi < self.v:
            u = self.u_hi
            w = math.sqrt((self.v - u) * (self.v + u))
        else:
            u, w = self.v, 0.0
        return w, _family_residual(self.spec, self.mode, u, w, self.v)

    def guided(self) -> bool:
        if self.v <= self.u_lo:
            return False
        return self.high_w_end()[1] * self.low_w_end()[1] < 0.0


def _solve_w(spec: WaveguideSpec, mode: ModeId, radius: float) -> tuple[float, float]:
    v = spec.v_number(radius)
    prob = _ModeProblem(spec, mode, v)
    if not prob.guided():
        raise BelowCutoff(f"{mode} is not guided at radius {radius:.6g} m (V = {v:.6g})")
    w_hi, f_hi = prob.high_w_end()
    w_lo, _ = prob.low_w_end()
    if w_lo == 0.0:
        # Walk towards cutoff until the bracket closes; l = 1 and TE/TM roots
        # shrink like exp(-1/(V - Vc)) and may fall below any float.
        for e in _W_FLOOR_EXPONENTS:
            trial = v * 10.0**-e
            if prob.f(trial) * f_hi < 0.0:
                w_lo = trial
                break
        else:
            return 0.0, v
    try:
        w = brentq(prob.f, w_lo, w_hi, xtol=1e-300, rtol=4 * np.finfo(float).eps,
                   maxiter=500)
    except (ValueError, RuntimeError) as exc:
        raise NoConvergence(f"{mode} at radius {radius:.6g} m: {exc}") from exc
    return w, math.sqrt((v - w) * (v + w))


def solve_neff(spec: WaveguideSpec, mode, radius: float) -> float:
    """Effective index of ``mode`` at core radius ``radius`` [m].

    Raises :class:`BelowCutoff` when the mode is not guided. At radii within
    float resolution of cutoff the returned value equals ``n_clad``.
    """
    mode = as_mode(mode)
    if not radius > 0:
        raise specfun.DomainError(f"radius must be > 0, got {radius}")
    w, u = _solve_w(spec, mode, radius)
    return _neff_from_uw(spec, radius, u, w)


def is_guided(spec: WaveguideSpec, mode, radius: float) -> bool:
    mode = as_mode(mode)
    return _ModeProblem(spec, mode, spec.v_number(radius)).guided()


@functools.lru_cache(maxsize=256)
def cutoff_radius(spec: WaveguideSpec, mode) -> float | None:
    """Smallest guided radius [m] by bisection on guidedness; None for HE11."""
    mode = as_mode(mode)
    if mode.is_fundamental:
        return None
    u_lo, u_hi = _window(mode)
    lo, hi = spec.radius_for_v(u_lo), spec.radius_for_v(u_hi) * 1.001
    if not is_guided(spec, mode, hi):  # pragma: no cover - window edges always bracket
        raise NoConvergence(f"cannot bracket the cutoff of {mode}")
    while hi - lo > 1e-6 * 1e-9 and hi - lo > 4 * np.finfo(float).eps * hi:
        mid = 0.5 * (lo + hi)
        if is_guided(spec, mode, mid):
            hi = mid
        else:
            lo = mid
    return hi


# ---------------------------------------------------------------------------
# Dispersion curves
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DispersionCurve:
    """Sampled effective index of one mode versus core radius.

    ``neff`` and ``dneff_dr`` interpolate with a monotone cubic Hermite of
    ``u`` against ``ln V``, with knot slopes from implicit differentiation of
    the characteristic function. The interpolant's knots are the samples plus, when the
    mode has a cutoff, the cutoff point ``u = V`` and any solver points passed
    in ``extra_knots`` as ``(V, u)`` arrays; :func:`trace_curve` adds a
    geometric cluster just above cutoff, where l = 1 and TE/TM curves are too
    flat for a plain cubic. Below cutoff both methods return NaN.
    """

    mode: ModeId
    spec: WaveguideSpec
    radii: np.ndarray
    n_eff: np.ndarray
    cutoff_radius: float | None = None
    extra_knots: tuple = ()
    _interp: CubicHermiteSpline = field(init=False, repr=False)

    def __post_init__(self):
        radii = np.asarray(self.radii, dtype=float)
        n_eff = np.asarray(self.n_eff, dtype=float)
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "n_eff", n_eff)
        if radii.ndim != 1 or radii.shape != n_eff.shape or radii.size < 2:
            raise ValidationError("radii and n_eff must be 1-D arrays of equal length >= 2")
        if np.any(np.diff(radii) <= 0):
            raise ValidationError("radii must be strictly increasing")
        if np.any(n_eff <= self.spec.n_clad) or np.any(n_eff >= self.spec.n_core):
            raise ValidationError("every n_eff must lie strictly between n_clad and n_core")
        if np.any(np.diff(n_eff) <= 0):
            raise ValidationError("n_eff must increase strictly with radius")
        if self.cutoff_radius is not None and radii[0] < self.cutoff_radius:
            raise ValidationError("first sample lies below the cutoff radius")

        kr = self.spec.k0 * radii
        v = list(self.spec.v_number(radii))
        u = list(kr * np.sqrt((self.spec.n_core - n_eff) * (self.spec.n_core + n_eff)))
        if self.cutoff_radius is not None:
            vc = self.spec.v_number(self.cutoff_radius)
            v.append(vc)
            u.append(vc)
        if self.extra_knots:
            v.extend(np.asarray(self.extra_knots[0], dtype=float))
            u.extend(np.asarray(self.extra_knots[1], dtype=float))
        v_arr, idx = np.unique(np.asarray(v), return_index=True)
        u_arr = np.asarray(u)[idx]
        x = np.log(v_arr)
        slopes = _monotone_slopes(x, u_arr, _knot_slopes(self.spec, self.mode, v_arr, u_arr, x))
        object.__setattr__(self, "_interp", CubicHermiteSpline(x, u_arr, slopes, extrapolate=False))

    @property
    def r_min(self) -> float:
        return self.cutoff_radius if self.cutoff_radius is not None else float(self.radii[0])

    @property
    def r_max(self) -> float:
        return float(self.radii[-1])

    def _u(self, r, nu=0):
        return self._interp(np.log(self.spec.v_number(r)), nu)

    def neff(self, r):
        r = np.asarray(r, dtype=float)
        u = self._u(r)
        kr = self.spec.k0 * r
        return np.sqrt(self.spec.n_core**2 - (u / kr) ** 2)

    def dneff_dr(self, r):
        r = np.asarray(r, dtype=float)
        u = self._u(r)
        du = self._u(r, 1)
        n = np.sqrt(self.spec.n_core**2 - (u / (self.spec.k0 * r)) ** 2)
        return u * (u - du) / (n * self.spec.k0**2 * r**3)

    def knots(self) -> np.ndarray:
        """Radii of the interpolant's breakpoints (cutoff anchor included)."""
        return self.spec.radius_for_v(np.exp(self._interp.x))

    def to_rows(self):
        return list(zip(self.radii.tolist(), self.n_eff.tolist()))


def _implicit_du_dv(spec: WaveguideSpec, mode: ModeId, v: float, u: float) -> float:
    """du/dV along the mode branch from F(u, V) = 0, by central differences."""
    gap = v - u
    if gap < 1e-7 * v:
        return math.nan
    hu = min(1e-6 * u, 0.25 * gap)
    hv = min(1e-6 * v, 0.25 * gap)

    def f(uu, vv):
        return _family_residual(spec, mode, uu, math.sqrt((vv - uu) * (vv + uu)), vv)

    f_u = (f(u + hu, v) - f(u - hu, v)) / (2 * hu)
    f_v = (f(u, v + hv) - f(u, v - hv)) / (2 * hv)
    if f_u == 0.0:
        return math.nan
    return -f_v / f_u


def _knot_slopes(spec, mode, v, u, x) -> np.ndarray:
    """du/dlnV at every knot; PCHIP estimates where the implicit one is unusable."""
    fallback = PchipInterpolator(x, u).derivative()(x)
    out = np.empty_like(u)
    for i, (vi, ui) in enumerate(zip(v, u)):
        d = _implicit_du_dv(spec, mode, float(vi), float(ui)) * vi
        out[i] = d if math.isfinite(d) and d >= 0 else fallback[i]
    return out


def _monotone_slopes(x: np.ndarray, y: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Fritsch-Carlson limiting of Hermite slopes for increasing data."""
    d = d.copy()
    delta = np.diff(y) / np.diff(x)
    for k, dk in enumerate(delta):
        if dk <= 0:
            d[k] = d[k + 1] = 0.0
            continue
        a, b = d[k] / dk, d[k + 1] / dk
        if a < 0:
            d[k], a = 0.0, 0.0
        if b < 0:
            d[k + 1], b = 0.0, 0.0
        norm = math.hypot(a, b)
        if norm > 3.0:
            tau = 3.0 / norm
            d[k], d[k + 1] = tau * a * dk, tau * b * dk
    return d


def _check_continuity(radii: np.ndarray, n_eff: np.ndarray, mode: ModeId) -> None:
    if n_eff.size < 4:
        return
    dr = np.diff(radii)
    dn = np.diff(n_eff)
    slope = dn / dr
    # interior intervals: step must be explained by the neighbouring slopes
    bound = 3.0 * np.maximum(np.abs(slope[:-2]), np.abs(slope[2:])) * dr[1:-1]
    bad = np.nonzero(np.abs(dn[1:-1]) > bound)[0]
    if bad.size:
        i = int(bad[0]) + 1
        raise NoConvergence(
            f"{mode}: branch jump between r={radii[i]:.6g} and r={radii[i + 1]:.6g}")


def log_grid(r_min: float, r_max: float, n_points: int) -> np.ndarray:
    return np.geomspace(r_min, r_max, n_points)


def trace_curve(spec: WaveguideSpec, mode, r_min: float, r_max: float,
                n_points: int = 400) -> DispersionCurve:
    """Sample ``mode`` on a log-spaced radius grid, dropping points below cutoff.

    Points whose index is numerically indistinguishable from ``n_clad``
    (possible just above an l = 1 cutoff) count as below cutoff too.
    """
    mode = as_mode(mode)
    if not 0 < r_min < r_max:
        raise ValidationError(f"need 0 < r_min < r_max, got {r_min}, {r_max}")
    if n_points < 2:
        raise ValidationError(f"n_points must be >= 2, got {n_points}")
    rc = cutoff_radius(spec, mode)
    radii, values = [], []
    for r in log_grid(r_min, r_max, n_points):
        if rc is not None and r < rc:
            continue
        try:
            n = solve_neff(spec, mode, float(r))
        except BelowCutoff:
            continue
        if n <= spec.n_clad:
            continue
        if values and n <= values[-1]:
            raise NoConvergence(f"{mode}: non-monotone index at r={r:.6g}")
        radii.append(float(r))
        values.append(n)
    if len(radii) < 2:
        raise EmptyCurve(f"{mode}: fewer than two guided samples in [{r_min:.4g}, {r_max:.4g}] m")
    radii_a, values_a = np.array(radii), np.array(values)
    _check_continuity(radii_a, values_a, mode)
    extra = _cutoff_knots(spec, mode, rc, radii_a[-1]) if rc is not None else ()
    return DispersionCurve(mode, spec, radii_a, values_a, rc, extra)


def _cutoff_knots(spec: WaveguideSpec, mode: ModeId, rc: float, r_max: float,
                  n_knots: int = 64, span: float = 0.6) -> tuple[np.ndarray, np.ndarray]:
    """(V, u) solver points clustered geometrically towards the cutoff.

    Covers ``Vc < V < (1 + span) Vc`` (clipped at ``r_max``).
    """
    vc = spec.v_number(rc)
    v_top = min(vc * (1.0 + span), spec.v_number(r_max))
    if v_top <= vc:
        return ()
    vs, us = [], []
    for t in np.geomspace(1e-6, 1.0, n_knots):
        v = vc + t * (v_top - vc)
        try:
            _, u = _solve_w(spec, mode, spec.radius_for_v(v))
        except BelowCutoff:
            continue
        vs.append(v)
        us.append(u)
    return np.array(vs), np.array(us)


def default_mode_set(max_l: int = 2, max_m: int = 2) -> list[ModeId]:
    """HE/EH/TE/TM modes with l <= max_l and m <= max_m, HE11 first."""
    modes = []
    for m in range(1, max_m + 1):
        for l in range(1, max_l + 1):
            modes.append(ModeId(Family.HE, l, m))
            modes.append(ModeId(Family.EH, l, m))
        modes.append(ModeId(Family.TE, 0, m))
        modes.append(ModeId(Family.TM, 0, m))
    modes.sort(key=lambda md: (not md.is_fundamental, str(md)))
    return modes
