import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from eqstop.backend import available_backends, get_backend  # noqa: E402

ACCEPTANCE_LINES = []


@pytest.fixture(params=available_backends())
def kernel_backend(request):
    return get_backend(request.param)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
