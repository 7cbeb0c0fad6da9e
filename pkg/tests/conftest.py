import numpy as np
import pytest

from circulant_robustness.graph import Digraph

_ACCEPTANCE: list[tuple[str, str, str]] = []


def random_digraph(rng: np.random.Generator, n: int, p: float) -> Digraph:
    edges = [(i, j) for i in range(n) for j in range(n) if i != j and rng.random() < p]
    return Digraph(n, edges)


def random_digraphs(seed: int, count: int, n_min: int = 2, n_max: int = 8) -> list[Digraph]:
    rng = np.random.default_rng(seed)
    return [
        random_digraph(rng, int(rng.integers(n_min, n_max + 1)), float(rng.uniform(0.1, 0.9)))
        for _ in range(count)
    ]


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(name): exit criterion reported in the summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or report.when != "call":
        return
    detail = ""
    if report.failed and call.excinfo is not None:
        detail = str(call.excinfo.value).splitlines()[0][:160]
    _ACCEPTANCE.append((marker.args[0], "PASS" if report.passed else "FAIL", detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, status, detail in _ACCEPTANCE:
        line = f"{status}  {name}"
        if detail:
            line += f"  -- {detail}"
        terminalreporter.write_line(line)
