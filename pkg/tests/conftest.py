"""Shared fixtures and the acceptance summary printed at the end of a run."""

from __future__ import annotations

import socket

import numpy as np
import pytest
from scipy.ndimage import gaussian_filter

from ratkern.resample import ImageF

# criterion number -> list of (test name, outcome)
_ACCEPTANCE: dict[int, list[tuple[str, str]]] = {}

CRITERIA = {
    1: "kernel identity suite",
    2: "derivative at t=1",
    3: "approximation orders",
    4: "degeneration matrix",
    5: "C2/C3 parameter formulas",
    6: "resampler oracle",
    7: "metric sanity",
    8: "plane arithmetic",
    9: "table reproduction and smoke sweep",
    10: "property suite independence",
}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    n = int(props["criterion"])
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _ACCEPTANCE.setdefault(n, []).append((report.nodeid.split("::")[-1], report.outcome))


@pytest.hookimpl(tryfirst=True)
def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            item.user_properties.append(("criterion", m.args[0]))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n, title in CRITERIA.items():
        results = _ACCEPTANCE.get(n)
        if not results:
            tr.write_line(f"criterion {n:2d}: NOT RUN  {title}")
            continue
        outcomes = {o for _, o in results}
        if "failed" in outcomes:
            status = "FAIL"
        elif outcomes == {"skipped"}:
            status = "SKIP"
        else:
            status = "PASS"
        detail = ", ".join(f"{name}={o}" for name, o in results if o != "passed")
        tr.write_line(f"criterion {n:2d}: {status:4s}  {title}" + (f"  ({detail})" if detail else ""))


def acceptance_outcomes() -> dict[int, list[tuple[str, str]]]:
    return _ACCEPTANCE


@pytest.fixture
def no_network(monkeypatch):
    """Make any socket creation fail for the duration of a test."""

    def refuse(*args, **kwargs):
        raise RuntimeError("network access attempted")

    monkeypatch.setattr(socket, "socket", refuse)
    monkeypatch.setattr(socket, "create_connection", refuse)
    monkeypatch.delenv("RATKERN_CORPUS", raising=False)
    yield


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def smooth_image(rng, shape=(64, 64), sigma=1.5) -> ImageF:
    """Random texture blurred and stretched to [0, 255], then rounded."""
    x = gaussian_filter(rng.uniform(0, 255, shape), sigma)
    x = (x - x.min()) / (x.max() - x.min()) * 255.0
    return ImageF(np.round(x))


@pytest.fixture
def smooth(rng):
    return smooth_image(rng)


@pytest.fixture
def corpus(rng):
    return {f"img{i}": smooth_image(rng) for i in range(2)}
