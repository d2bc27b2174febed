import numpy as np
import pytest

_ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def report():
    """Record one pass/fail line per acceptance criterion."""

    def _report(number, title, passed, detail=""):
        status = "PASS" if passed else "FAIL"
        _ACCEPTANCE_LINES.append(f"[{status}] criterion {number}: {title} -- {detail}")
        print(_ACCEPTANCE_LINES[-1])
        return passed

    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_hermitian(rng, n, scale=1.0):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * 0.5 * (a + a.conj().T)


def random_density_matrix(rng, n):
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_model(rng, dim=None):
    """Random Hamiltonian plus a fully connected set of jump channels."""
    from nvhyperpol.lindblad import CollapseSpec

    dim = int(rng.integers(2, 7)) if dim is None else dim
    h = random_hermitian(rng, dim, scale=rng.uniform(0.1, 5.0))
    specs = [
        CollapseSpec(float(rng.uniform(0.05, 3.0)), i, j)
        for i in range(dim)
        for j in range(dim)
        if i != j
    ]
    return h, specs
