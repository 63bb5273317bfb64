import pytest

from jchom.core import JcParams

VERDICTS = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[VERDICTS] = []


@pytest.fixture(params=[-2.0, 0.0, 2.0], ids=lambda d: f"delta={d:g}")
def fig_params(request) -> JcParams:
    """kappa/g = 0.1 at the detunings used throughout the figures."""
    return JcParams.from_detuning(request.param, 0.1)


@pytest.fixture
def verdict(request):
    """Record and print one PASS/FAIL line for an acceptance criterion, then assert it."""
    log = request.config.stash[VERDICTS]

    def record(number: int, title: str, passed: bool, detail: str) -> None:
        line = f"{'PASS' if passed else 'FAIL'} [{number:2d}] {title}: {detail}"
        log.append((number, line))
        print(line)
        assert passed, line
    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(VERDICTS, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
