"""Single-parameter hot-zone fit of spectrogram ridges."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from fibertaper.beats import BeatModel, CurvePair, _k_unchecked
from fibertaper.errors import AmbiguousFit, NoGuidedCandidate, ValidationError
from fibertaper.taper import waist_at
from fibertaper.waveguide import HE11, as_mode

DEFAULT_H_BOUNDS = (1e-3, 12e-3)


@dataclass
class HotZoneFit:
    """Result of :func:`fit_hot_zone`.

    ``assignment[i]`` is the label of the pair chosen for ridge ``i``;
    ``rms`` is in normalised frequency units (``K lambda / 2 pi``).
    """

    h: float
    assignment: list
    rms: float
    per_ridge_rms: list
    runner_up: dict | None = None

    def __iter__(self):
        # allows ``h, pairs, rms = fit_hot_zone(...)``
        return iter((self.h, self.assignment, self.rms))

    def to_dict(self) -> dict:
        return {"h_m": self.h, "pair_assignment": self.assignment, "rms_residual": self.rms,
                "per_ridge_rms": self.per_ridge_rms, "runner_up": self.runner_up}


def _pair_label(pair) -> str:
    if isinstance(pair, BeatModel):
        return getattr(pair, "label", type(pair).__name__)
    a, b = (as_mode(m) for m in pair)
    return f"{a}-{b}"


def _normalise_pairs(candidate_pairs):
    out = []
    for p in candidate_pairs:
        if isinstance(p, BeatModel):
            out.append(p)
        elif isinstance(p, str) or len(p) == 1:
            out.append((HE11, as_mode(p if isinstance(p, str) else p[0])))
        else:
            out.append(tuple(as_mode(m) for m in p))
    return out


class _Problem:
    def __init__(self, ridges, spec, r0, pairs):
        self.spec, self.r0 = spec, r0
        self.labels = [_pair_label(p) for p in pairs]
        self.models = [p if isinstance(p, BeatModel) else CurvePair(spec, p, r0) for p in pairs]
        self.ridges = [(np.asarray(r.L, float), np.asarray(r.K_norm, float)) for r in ridges]
        self.n_points = sum(L.size for L, _ in self.ridges)
        self.scale = spec.wavelength / (2 * math.pi)

    def ss_table(self, h: float) -> np.ndarray:
        """Sum of squared residuals, shape (n_ridges, n_pairs)."""
        table = np.empty((len(self.ridges), len(self.models)))
        for i, (L, K) in enumerate(self.ridges):
            w = waist_at(self.r0, h, L)
            for j, m in enumerate(self.models):
                pred = _k_unchecked(m, w) * self.scale
                table[i, j] = np.sum((K - pred) ** 2)
        return table

    def objective(self, h: float) -> float:
        return float(np.sum(self.ss_table(h).min(axis=1)))


def fit_hot_zone(ridges, spec, r0: float, candidate_pairs, *, h_bounds=DEFAULT_H_BOUNDS,
                 n_grid: int = 111, ambiguity: float = 0.05) -> HotZoneFit:
    """Fit the hot-zone length ``h`` to ridge frequencies.

    Every ridge point ``(L, K_obs)`` is compared with the beat frequency of a
    candidate pair at the waist ``r0 exp(-L/2h)``; pairs not guided there
    predict zero. For each ``h`` each ridge takes its best pair, and ``h``
    minimises the total squared error (grid search, then bounded Brent).

    Parameters
    ----------
    ridges : list of RidgeTrack
    spec : WaveguideSpec
    r0 : float
        Initial fibre radius [m].
    candidate_pairs : list
        Mode pairs ``(HE11, X)``, bare modes ``X`` (paired with HE11), or
        :class:`~fibertaper.beats.BeatModel` instances.
    h_bounds : (float, float)
        Search interval for ``h`` [m].
    ambiguity : float
        Relative RMS margin below which a different assignment counts as a tie.

    Raises
    ------
    NoGuidedCandidate
        No candidate pair is guided anywhere in the taper.
    AmbiguousFit
        Another assignment fits within ``ambiguity`` of the best one.
    """
    if not ridges:
        raise ValidationError("need at least one ridge")
    pairs = _normalise_pairs(candidate_pairs)
    if not pairs:
        raise ValidationError("need at least one candidate pair")
    lo, hi = h_bounds
    if not 0 < lo < hi:
        raise ValidationError(f"invalid h bounds {h_bounds}")
    prob = _Problem(ridges, spec, r0, pairs)
    if all(m.cutoff >= r0 for m in prob.models):
        raise NoGuidedCandidate("no candidate pair is guided below the initial radius")

    grid = np.geomspace(lo, hi, n_grid)
    values = np.array([prob.objective(h) for h in grid])
    i = int(np.argmin(values))
    a, b = grid[max(i - 1, 0)], grid[min(i + 1, n_grid - 1)]
    res = minimize_scalar(prob.objective, bounds=(a, b), method="bounded",
                          options={"xatol": 1e-9 * b})
    h_best = float(res.x) if res.fun <= values[i] else float(grid[i])

    table = prob.ss_table(h_best)
    choice = table.argmin(axis=1)
    best_ss = float(table[np.arange(len(choice)), choice].sum())
    rms = math.sqrt(best_ss / prob.n_points)
    per_ridge = [math.sqrt(table[k, c] / prob.ridges[k][0].size) for k, c in enumerate(choice)]
    assignment = [prob.labels[c] for c in choice]

    runner_up = None
    if len(pairs) > 1:
        ordered = np.sort(table, axis=1)
        penalty = ordered[:, 1] - ordered[:, 0]
        k = int(np.argmin(penalty))
        alt_ss = best_ss + float(penalty[k])
        alt_rms = math.sqrt(alt_ss / prob.n_points)
        alt_choice = int(np.argsort(table[k])[1])
        alt_assignment = list(assignment)
        alt_assignment[k] = prob.labels[alt_choice]
        runner_up = {"pair_assignment": alt_assignment, "rms_residual": alt_rms}
        if alt_rms <= (1.0 + ambiguity) * rms:
            raise AmbiguousFit(
                f"ridge {k}: {assignment[k]} and {alt_assignment[k]} fit within "
                f"{100 * ambiguity:g}% (rms {rms:.3g} vs {alt_rms:.3g})",
                options=[{"h_m": h_best, "pair_assignment": assignment, "rms_residual": rms},
                         {"h_m": h_best, **runner_up}])
    return HotZoneFit(h_best, assignment, rms, per_ridge, runner_up)
