from __future__ import annotations

import numpy as np
import pytest

from abfode.solver import RHS_REGISTRY, RhsDefinition, register_rhs


def _zero(t, y, p):
    return np.zeros_like(y)


def _stiff(t, y, p):
    return -1.0e6 * y


def _diag2(t, y, p):
    # two identical decoupled copies of g = lam * y
    return p["lam"] * y


for _definition in (
    RhsDefinition("test_zero", 1, _zero, state_dependent=False, description="g = 0"),
    RhsDefinition("test_stiff", 1, _stiff, description="g = -1e6 y"),
    RhsDefinition("test_diag2", 2, _diag2, defaults={"lam": 1.0}, description="g = lam y"),
):
    if _definition.name not in RHS_REGISTRY:
        register_rhs(_definition)


ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


@pytest.fixture
def record():
    def _record(criterion: str, ok: bool, detail: str) -> None:
        ACCEPTANCE_RESULTS.append((criterion, bool(ok), detail))
        print(f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}")

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, ok, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}")
