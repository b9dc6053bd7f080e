"""Mode solver, pulling model and beat analysis for sub-wavelength fibre tapers."""

__version__ = "0.1.0"
