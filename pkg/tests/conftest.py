import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
FIXTURES = os.path.join(ROOT, "fixtures")

settings.register_profile("default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# criterion id -> (status, detail); filled by tests/test_acceptance.py
ACCEPTANCE = {}


@pytest.fixture
def fixtures_dir():
    return FIXTURES


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: int(k[1:])):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{key} {ok}: {detail}")


@pytest.fixture
def record_criterion():
    def record(key, ok, detail):
        # ok=None marks a criterion that could not run here
        ACCEPTANCE[key] = ("SKIP" if ok is None else "PASS" if ok else "FAIL", detail)
        return ok

    return record
