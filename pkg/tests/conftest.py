import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

#: (criterion, status, detail) lines recorded by the acceptance suite
ACCEPTANCE: list[tuple[str, str, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, status, detail in sorted(ACCEPTANCE, key=lambda r: int(r[0].split()[0])):
        terminalreporter.write_line(f"{status}  {name}: {detail}")
