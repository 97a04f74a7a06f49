import math
import sys

import numpy as np
import pytest

from geoent.qstate import PureState, random_state
from geoent.symmetric import SymmetricFamily, build_state

R2 = 1 / math.sqrt(2)


def bell():
    return PureState((2, 2), [R2, 0, 0, R2])


def ghz(q, p=0.5):
    return build_state(SymmetricFamily("ghz", q, p))


def w(q):
    return build_state(SymmetricFamily("w", q))


def corpus():
    """(name, state) pairs shared by the invariant tests."""
    rng = np.random.default_rng(2024)
    states = [
        ("bell", bell()),
        ("ghz3", ghz(3)),
        ("ghz4_p03", ghz(4, 0.3)),
        ("w3", w(3)),
        ("w4", w(4)),
        ("ring4", build_state(SymmetricFamily("ring", 4))),
        ("ring5", build_state(SymmetricFamily("ring", 5))),
        ("dicke42", build_state(SymmetricFamily("dicke", 4, 2))),
        ("zero3", PureState.basis((2, 2, 2), (0, 0, 0))),
        ("bell_x_bell", PureState((2, 2, 2, 2), np.kron(bell().amplitudes, bell().amplitudes))),
    ]
    for k, dims in enumerate([(2, 3), (3, 3), (2, 2, 2), (2, 3, 2), (3, 2, 2, 2)]):
        states.append((f"random{k}", random_state(dims, rng)))
    return states


@pytest.fixture
def rng():
    return np.random.default_rng(7)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
