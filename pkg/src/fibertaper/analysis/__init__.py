"""Inverse analysis of transmittance traces and near-field scans."""

from fibertaper.analysis.cutoffs import CutoffEvent, detect_cutoffs, pp_envelope
from fibertaper.analysis.hotzone import HotZoneFit, fit_hot_zone
from fibertaper.analysis.scan import (
    DEFAULT_CANDIDATES,
    EXTENDED_CANDIDATES,
    ModeAssignment,
    ScanComponent,
    ScanTrace,
    analyze_scan,
    identify_modes,
)
from fibertaper.analysis.spectral import RidgeTrack, Spectrogram, extract_ridges, spectrogram

__all__ = [
    "CutoffEvent",
    "DEFAULT_CANDIDATES",
    "EXTENDED_CANDIDATES",
    "HotZoneFit",
    "ModeAssignment",
    "RidgeTrack",
    "ScanComponent",
    "ScanTrace",
    "Spectrogram",
    "analyze_scan",
    "detect_cutoffs",
    "extract_ridges",
    "fit_hot_zone",
    "identify_modes",
    "pp_envelope",
    "spectrogram",
]
