from fractions import Fraction

import pytest
from hypothesis import settings, strategies as st

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")

PRIMES = (2, 3, 5)

primes = st.sampled_from(PRIMES)


@st.composite
def rationals(draw, nonzero=False, max_den_exp=4):
    """Rationals with a mix of p-power and other small denominators."""
    num = draw(st.integers(-10**4, 10**4).filter(lambda n: n != 0 or not nonzero))
    den = draw(st.sampled_from([1, 2, 3, 4, 5, 6, 7, 8, 9, 25, 27, 32, 49, 125]))
    return Fraction(num, den)


_acceptance = {}


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    _acceptance[name] = (report.outcome, report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, (outcome, duration) in sorted(_acceptance.items(), key=lambda kv: _criterion_key(kv[0])):
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{name}: {verdict} ({duration:.2f}s)")


def _criterion_key(name):
    digits = "".join(c for c in name.split("_")[2] if c.isdigit()) if name.count("_") >= 2 else ""
    return (int(digits) if digits else 99, name)


@pytest.fixture
def tree2():
    from pslzp.tree import BruhatTitsTree

    return BruhatTitsTree(2)
