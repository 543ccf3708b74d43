import math

import pytest
from scipy import integrate

from backscatter_sched.outage import composite_pdf

ACCEPTANCE_LINES = []


def record(criterion, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


@pytest.fixture
def acceptance():
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def pdf_mass(f, s_lo=-80.0, s_hi=30.0):
    """Total probability of the composite density, integrated over log-SNR.

    Uses the density path (not the incomplete-gamma path) so it is an
    independent check of the outage engine.
    """
    def integrand(s):
        g = math.exp(s)
        return composite_pdf(g, f) * g

    val, _ = integrate.quad(integrand, s_lo, s_hi, epsabs=1e-11, epsrel=1e-10, limit=400)
    return val
