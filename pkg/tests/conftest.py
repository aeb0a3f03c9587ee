import os
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from sqikit.synthetic import synthetic_ecg  # noqa: E402


@pytest.fixture
def clean_ecg():
    sig, truth = synthetic_ecg(10.0, 500.0, 72.0)
    return sig, truth


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def data_dir(name):
    root = os.environ.get("SQIKIT_DATA")
    if not root:
        return None
    p = Path(root) / name
    return p if p.is_dir() else None


# one verdict line per acceptance criterion, printed after the run
ACCEPTANCE_LINES = {}


def verdict(number, ok, detail):
    ACCEPTANCE_LINES[number] = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(ACCEPTANCE_LINES[number])
    return ok


def skipped(number, reason):
    ACCEPTANCE_LINES[number] = f"criterion {number:>2}: SKIP  {reason}"
    pytest.skip(reason)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
