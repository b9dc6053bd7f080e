import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fibertaper import beats as bt  # noqa: E402
from fibertaper.waveguide import WaveguideSpec  # noqa: E402

# filled by test_acceptance; printed once at the end of the session.
# ``ok`` is None for criteria that carry no executable check.
ACCEPTANCE_RESULTS: dict[int, tuple[bool | None, str]] = {}

UM, MM = 1e-6, 1e-3
R0 = 62.5 * UM
FOUR_MODES = {"HE11": 0.875, "HE12": 0.08, "HE21": 0.03, "TE01": 0.015}


def synth(h, amplitudes, L_max, dL=0.5 * UM):
    amps = bt.ModeAmplitudeSet.from_mapping(amplitudes)
    return bt.synthesize_transmittance(WaveguideSpec(), R0, h, amps, L_max, dL)


@pytest.fixture(scope="session")
def four_mode_trace():
    """HE11/HE12/HE21/TE01 trace at h = 3.05 mm, past the last cutoff."""
    return synth(3.05 * MM, FOUR_MODES, 36 * MM)


@pytest.fixture(scope="session")
def he12_trace():
    """HE11 + HE12 only, h = 3.05 mm, past the HE12 cutoff."""
    return synth(3.05 * MM, {"HE11": 0.9, "HE12": 0.1}, 33 * MM)


@pytest.fixture(scope="session")
def h7_trace():
    return synth(7 * MM, FOUR_MODES, 80 * MM)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[number]
        status = "N/A " if ok is None else ("PASS" if ok else "FAIL")
        terminalreporter.write_line(f"criterion {number}: {status}  {detail}")
