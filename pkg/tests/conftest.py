from __future__ import annotations

import itertools

import pytest

from cayleymenger.polyring import Polynomial

ACCEPTANCE_KEY = "acceptance"


def leibniz_det(rows):
    """Determinant as the signed sum over all permutations (test oracle)."""
    m = len(rows)
    total = Polynomial()
    for perm in itertools.permutations(range(m)):
        inversions = sum(1 for a in range(m) for b in range(a + 1, m) if perm[a] > perm[b])
        term = Polynomial.constant(-1 if inversions % 2 else 1)
        for r, c in enumerate(perm):
            term = term * rows[r][c]
            if not term:
                break
        total = total + term
    return total


@pytest.fixture
def record_criterion(request):
    """Attach an acceptance criterion label to the running test."""

    def record(label: str):
        request.node.user_properties.append((ACCEPTANCE_KEY, label))

    return record


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            if getattr(rep, "when", None) != "call" and outcome == "passed":
                continue
            for key, label in getattr(rep, "user_properties", ()):
                if key == ACCEPTANCE_KEY:
                    lines.append((label, "PASS" if outcome == "passed" else "FAIL"))
    if not lines:
        return
    terminalreporter.section("acceptance criteria")

    def order(item):
        head = item[0].split(".", 1)[0]
        return (int(head) if head.isdigit() else 99, item[0])

    for label, verdict in sorted(lines, key=order):
        terminalreporter.write_line(f"[{verdict}] {label}")
