import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=40, derandomize=True)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE: dict[int, str] = {}


def record_acceptance(number: int, title: str, ok: bool, detail: str) -> str:
    line = f"CRITERION {number} {'PASS' if ok else 'FAIL'}: {title} ({detail})"
    ACCEPTANCE[number] = line
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
