import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)


def pytest_terminal_summary(terminalreporter):
    from helpers import ACCEPTANCE_RESULTS

    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        status, title, elapsed, detail = ACCEPTANCE_RESULTS[number]
        line = f"criterion {number:2d}: {status}  ({elapsed:6.2f} s)  {title}"
        if detail:
            line += f"  [{detail.splitlines()[0]}]"
        terminalreporter.write_line(line)
