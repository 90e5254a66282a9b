import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

# (criterion number, title, passed, detail) rows filled by test_acceptance
ACCEPTANCE: list[tuple[int, str, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    grouped: dict[int, list] = {}
    for row in ACCEPTANCE:
        grouped.setdefault(row[0], []).append(row)
    for num, rows in sorted(grouped.items()):
        ok = all(r[2] for r in rows)
        titles = list(dict.fromkeys(r[1] for r in rows))
        details = [r[3] for r in rows if r[3]]
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {num:2d}: {'; '.join(titles)}"
        if details:
            line += f"  ({'; '.join(details)})"
        terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def m_example():
    return np.array([[1.0, 2.0], [2.0, 1.0]])
