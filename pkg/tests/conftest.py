import os
import sys

# Sparsity assertions in every TensorOp constructor; must be set before import.
os.environ.setdefault("CHNLAB_DEBUG", "1")
sys.path.insert(0, os.path.dirname(__file__))

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
