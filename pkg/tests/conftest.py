"""Shared fixtures: hand-built networks, bundled benchmark files, and the
acceptance-summary terminal hook."""
from importlib import resources

import numpy as np
import pytest

from hlcd import Network, NodeSpec, load_network


def make_node(name, states, parents, rows) -> NodeSpec:
    return NodeSpec(
        name=name,
        states=tuple(states),
        parents=tuple(parents),
        cpt=np.array(rows, dtype=np.float64),
    )


def binary_node(name, parents=(), rows=((0.5, 0.5),)) -> NodeSpec:
    return make_node(name, ("0", "1"), parents, rows)


COPY_ROWS = ((0.9, 0.1), (0.1, 0.9))
# saturating combination: each cause shifts the effect alone, together they
# overshoot the additive prediction, so the pair collides detectably
SATURATING_ROWS = ((0.95, 0.05), (0.60, 0.40), (0.60, 0.40), (0.10, 0.90))
XOR_ROWS = ((0.9, 0.1), (0.1, 0.9), (0.1, 0.9), (0.9, 0.1))


@pytest.fixture(scope="session")
def chain_net() -> Network:
    """X0 -> X1 -> X2, strong copies."""
    return Network(
        [
            binary_node("X0"),
            binary_node("X1", (0,), COPY_ROWS),
            binary_node("X2", (1,), COPY_ROWS),
        ]
    )


@pytest.fixture(scope="session")
def collider_net() -> Network:
    """X0 -> X2 <- X1 with marginally visible wings."""
    return Network(
        [
            binary_node("X0"),
            binary_node("X1"),
            binary_node("X2", (0, 1), SATURATING_ROWS),
        ]
    )


@pytest.fixture(scope="session")
def xor_net() -> Network:
    """X0 -> X2 <- X1 where each wing is marginally invisible."""
    return Network(
        [
            binary_node("X0"),
            binary_node("X1"),
            binary_node("X2", (0, 1), XOR_ROWS),
        ]
    )


@pytest.fixture(scope="session")
def hand5_net() -> Network:
    """Visible collider X0 -> X2 <- X1 plus a detached pair X3 -> X4."""
    return Network(
        [
            binary_node("X0"),
            binary_node("X1"),
            binary_node("X2", (0, 1), SATURATING_ROWS),
            binary_node("X3"),
            binary_node("X4", (3,), COPY_ROWS),
        ]
    )


def _bundled(name: str) -> Network:
    path = resources.files("hlcd").joinpath("data", name)
    with resources.as_file(path) as concrete:
        return load_network(concrete)


@pytest.fixture(scope="session")
def alarm_net() -> Network:
    return _bundled("alarm.bif")


@pytest.fixture(scope="session")
def child_net() -> Network:
    return _bundled("child.json")


# -- acceptance criteria summary ----------------------------------------------

ACCEPTANCE_RESULTS = []


@pytest.fixture
def criterion():
    """Record one acceptance-criterion outcome and assert it."""

    def check(name: str, passed: bool, detail: str) -> None:
        ACCEPTANCE_RESULTS.append((name, bool(passed), detail))
        assert passed, f"{name}: {detail}"

    return check


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in ACCEPTANCE_RESULTS:
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"{status} {name}: {detail}")
