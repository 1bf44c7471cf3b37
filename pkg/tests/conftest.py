import os

from hypothesis import settings

settings.register_profile("default", max_examples=40, deadline=None)
settings.register_profile("ci", max_examples=15, deadline=None, derandomize=True)
settings.register_profile("seeded", max_examples=40, deadline=None, derandomize=True)
# MINORKIT_SEED pins every random choice made by the tests
default_profile = "seeded" if "MINORKIT_SEED" in os.environ else "default"
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", default_profile))

ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
