import numpy as np
import pytest

from diraccoulomb.core import Channel, Couplings

_criteria: dict[int, list[tuple[str, str]]] = {}


def within_ulps(a, b, n=4, scale=1.0):
    """|a - b| <= n ulps of max(|a|, |b|, scale), elementwise."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    ref = np.maximum(np.maximum(np.abs(a), np.abs(b)), scale)
    return bool(np.all(np.abs(a - b) <= n * np.spacing(ref)))


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion the test belongs to")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _criteria.setdefault(marker.args[0], []).append((item.name, rep.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        results = _criteria[n]
        ok = all(outcome == "passed" for _, outcome in results)
        failed = [name for name, outcome in results if outcome != "passed"]
        detail = f" (failing: {', '.join(failed)})" if failed else ""
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'} [{len(results)} checks]{detail}")


@pytest.fixture
def sommerfeld():
    return Couplings(a1=0.5), Channel.from_kappa(-1)


def round_trip_scale(mix, g, f):
    """Magnitude whose ulps bound the transform/untransform round trip.

    Each pass multiplies rounding errors by at most |a| + |b|, so two passes
    amplify by (|a| + |b|)^2 = cosh + |sinh|.
    """
    return np.maximum(np.abs(g), np.abs(f)) * (abs(mix.a) + abs(mix.b)) ** 2
