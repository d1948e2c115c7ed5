import pytest
from hypothesis import HealthCheck, settings

from diversity_ea.bitstring import BitString, RandomSource

settings.register_profile(
    "repo",
    deadline=None,
    derandomize=True,
    max_examples=100,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")


@pytest.fixture
def rng():
    return RandomSource(12345)


def bs(text: str) -> BitString:
    return BitString.from_str(text)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
