import numpy as np
import pytest

from riscomp.channel import ChannelRealization
from riscomp.topology import build_topology


@pytest.fixture(scope="session")
def default_topology():
    return build_topology()


def fixed_realization(center, edge, bs_ris=None, ris_edge=None):
    """Single-trial realization from explicit channel values."""
    edge = np.asarray(edge, dtype=complex)
    I = edge.shape[-1]
    if bs_ris is None:
        bs_ris = np.zeros((I, 0), dtype=complex)
        ris_edge = np.zeros((I, 0), dtype=complex)
    return ChannelRealization(
        np.asarray(center, dtype=complex), edge,
        np.asarray(bs_ris, dtype=complex), np.asarray(ris_edge, dtype=complex),
        np.array([0]),
    )


def random_instance(rng, I, K):
    def cn(*shape):
        return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * rng.uniform(1e-7, 1e-5)
    return cn(I, I), cn(I), cn(I, K), cn(I, K)


# one line per acceptance criterion, printed after the run
ACCEPTANCE: dict[int, str] = {}


def record_criterion(number: int, name: str, ok: bool, detail: str) -> None:
    ACCEPTANCE[number] = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {name}: {detail}"


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
