import numpy as np
import pytest

from subgraph_test.models import gen_er


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_graphs(count, n_max=60, seed=0, n_min=3):
    """``count`` ER graphs with n in [n_min, n_max] and p cycling over 0.05..0.95."""
    gen = np.random.default_rng(seed)
    ps = np.round(np.arange(0.05, 0.96, 0.05), 2)
    for k in range(count):
        n = int(gen.integers(n_min, n_max + 1))
        yield gen_er(n, float(ps[k % ps.size]), gen)


# -- acceptance summary ------------------------------------------------------

_ACCEPTANCE: dict[str, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        name = report.nodeid.split("::")[-1]
        detail = "; ".join(str(v) for k, v in report.user_properties if k == "detail")
        _ACCEPTANCE[name] = ("PASS" if report.outcome == "passed" else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE, key=lambda s: int(s.split("_")[2])):
        status, detail = _ACCEPTANCE[name]
        _, _, number, *words = name.split("[")[0].split("_")
        label = f"criterion {number}: {' '.join(words)}" + (f" [{name.split('[')[1]}" if "[" in name else "")
        terminalreporter.write_line(f"{status}  {label}" + (f"  [{detail}]" if detail else ""))
