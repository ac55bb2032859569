import numpy as np
import pytest

from marginloss import _backend
from marginloss.datagen import GenConfig, generate

BETA0 = (0.5, -1.0, 0.25)

BACKENDS = [pytest.param(_backend.python_kernels, id="python")]
if _backend.compiled_kernels is not None:
    BACKENDS.append(pytest.param(_backend.compiled_kernels, id="compiled"))


@pytest.fixture(params=BACKENDS)
def kernels(request):
    return request.param


@pytest.fixture(scope="session")
def logistic_data():
    """The seeded n = 20000 logistic dataset used by the consistency checks."""
    return generate(GenConfig(n=20000, beta0=BETA0, seed=7))


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(12345))


# -- acceptance reporting ------------------------------------------------------

_ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): numbered acceptance criterion")
    config.stash[_ACCEPTANCE] = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None or not (rep.when == "call" or (rep.when == "setup" and not rep.passed)):
        return
    number, title = mark.args
    detail = "; ".join(str(v) for k, v in item.user_properties if k == "check")
    verdict = "PASS" if rep.passed else ("SKIP" if rep.skipped else "FAIL")
    item.config.stash[_ACCEPTANCE].append((number, title, verdict, detail))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    rows = sorted(config.stash[_ACCEPTANCE])
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, verdict, detail in rows:
        terminalreporter.write_line(f"[{verdict}] {number:>2}. {title}: {detail}")
