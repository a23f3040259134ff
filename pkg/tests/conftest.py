import hypothesis.strategies as st
import pytest
from hypothesis import HealthCheck, settings

from faces.model import EnergyRequest, EnergyService, make_scenario

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def intervals(draw, lo, hi):
    a = draw(st.integers(lo, hi - 1))
    b = draw(st.integers(a + 1, hi))
    return a, b


@st.composite
def scenarios(draw, max_services=4, max_requests=4, horizon=60, integer_energy=False,
              min_requests=0):
    """Small random scenarios on a [0, horizon] window."""
    n_s = draw(st.integers(0, max_services))
    n_r = draw(st.integers(min_requests, max_requests))
    services = []
    for k in range(n_s):
        a, b = draw(intervals(0, horizon))
        if integer_energy:
            dec = float(draw(st.integers(0, 6)) * (b - a))
        else:
            dec = draw(st.floats(0, 500, allow_nan=False))
        services.append(EnergyService(f"S{k}", f"P{k}", a, b, dec))
    requests = []
    for k in range(n_r):
        a, b = draw(intervals(0, horizon))
        if integer_energy:
            re = float(draw(st.integers(1, 60)))
        else:
            re = draw(st.floats(1, 400, allow_nan=False))
        requests.append(EnergyRequest(f"R{k}", a, b, re, k))
    return make_scenario((0, horizon), services, requests)


@pytest.fixture
def overlap_scenario():
    """Two requests overlapping on [320, 330) under one hour-long service."""
    return make_scenario(
        (300, 360),
        [EnergyService("S1", "P1", 300, 360, 600.0)],
        [EnergyRequest("R1", 300, 330, 200.0, 0), EnergyRequest("R2", 320, 360, 300.0, 1)],
    )


# one line per acceptance criterion, collected by tests/test_acceptance.py
ACCEPTANCE_LINES: dict[str, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES, key=lambda k: (int(k.rstrip("abcd")), k)):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
