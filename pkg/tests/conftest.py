import os
from pathlib import Path

import pytest

_LINES = []

ROOT = Path(__file__).resolve().parents[1]


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line for an acceptance criterion.

    Lines are echoed immediately and repeated in the terminal summary, so
    they show up whether or not output capture is on.
    """

    def record(criterion, ok, detail):
        line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'} {detail}"
        _LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)


def flags_path():
    """Location of the Flags benchmark, or None when it is not on disk."""
    env = os.environ.get("CAMCF_FLAGS")
    candidates = [Path(env)] if env else []
    candidates += [ROOT / "data" / "flags.arff", ROOT / "data" / "flags.csv"]
    for p in candidates:
        if p.is_file():
            return p
    return None
