import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_hermitian
from nvhyperpol.exceptions import DomainError, SingularMatrixError
from nvhyperpol.spin import eig_hermitian, is_hermitian, kron, solve_linear, spin_operators

spins = st.integers(min_value=1, max_value=15).map(lambda k: k / 2)


def test_spin_half_is_pauli_over_two():
    ops = spin_operators(0.5)
    np.testing.assert_allclose(ops.sz, np.diag([0.5, -0.5]))
    np.testing.assert_allclose(ops.sx, [[0, 0.5], [0.5, 0]])
    np.testing.assert_allclose(ops.sy, [[0, -0.5j], [0.5j, 0]])


def test_spin_one_ordering():
    np.testing.assert_allclose(spin_operators(1).sz, np.diag([1.0, 0.0, -1.0]))


@given(spins)
def test_su2_algebra(s):
    ops = spin_operators(s)
    sx, sy, sz = ops.cartesian()
    comm = lambda a, b: a @ b - b @ a
    assert np.max(np.abs(comm(sx, sy) - 1j * sz)) < 1e-12
    assert np.max(np.abs(comm(sy, sz) - 1j * sx)) < 1e-12
    assert np.max(np.abs(comm(sz, sx) - 1j * sy)) < 1e-12
    np.testing.assert_allclose(ops.s_plus, sx + 1j * sy, atol=1e-15)
    np.testing.assert_allclose(ops.s_minus, sx - 1j * sy, atol=1e-15)
    for op in (sx, sy, sz):
        assert is_hermitian(op, 1e-12)
        assert abs(np.trace(op)) < 1e-12
    assert np.trace(sz) == 0
    np.testing.assert_array_equal(np.diag(sz).real, s - np.arange(int(2 * s) + 1))


@pytest.mark.parametrize("s", [0.5, 1])
def test_casimir(s):
    sx, sy, sz = spin_operators(s).cartesian()
    casimir = sx @ sx + sy @ sy + sz @ sz
    assert np.max(np.abs(casimir - s * (s + 1) * np.eye(int(2 * s + 1)))) < 1e-12


@pytest.mark.parametrize("bad", [0, -0.5, 0.3, 1.25, 8, float("nan")])
def test_spin_domain(bad):
    with pytest.raises(DomainError):
        spin_operators(bad)


def test_kron_examples():
    np.testing.assert_array_equal(kron(np.eye(2), np.eye(3)), np.eye(6))
    np.testing.assert_array_equal(kron(np.diag([1, 0, -1]), np.eye(2)), np.diag([1, 1, 0, 0, -1, -1]))


def _random_complex(rng, shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def test_kron_mixed_product_against_explicit_blocks(rng):
    a, c = _random_complex(rng, (2, 2)), _random_complex(rng, (2, 2))
    b, d = _random_complex(rng, (3, 3)), _random_complex(rng, (3, 3))
    # oracle: block (i, j) of kron(x, y) is x[i, j] * y
    def explicit(x, y):
        out = np.zeros((x.shape[0] * y.shape[0], x.shape[1] * y.shape[1]), dtype=complex)
        for i in range(x.shape[0]):
            for j in range(x.shape[1]):
                out[i * y.shape[0]:(i + 1) * y.shape[0], j * y.shape[1]:(j + 1) * y.shape[1]] = x[i, j] * y
        return out
    np.testing.assert_allclose(kron(a, b), explicit(a, b), atol=1e-12)
    assert np.max(np.abs(kron(a, b) @ kron(c, d) - kron(a @ c, b @ d))) < 1e-12
    e = _random_complex(rng, (2, 3))
    assert np.max(np.abs(kron(kron(a, b), e) - kron(a, kron(b, e)))) < 1e-12


def test_eig_examples():
    w, _ = eig_hermitian(np.diag([3.0, 1.0, 2.0]))
    np.testing.assert_allclose(w, [1, 2, 3])
    w, _ = eig_hermitian([[0, 1], [1, 0]])
    np.testing.assert_allclose(w, [-1, 1])


def test_eig_reconstruction_and_phase(rng):
    m = random_hermitian(rng, 6)
    w, v = eig_hermitian(m)
    assert np.all(np.diff(w) >= 0)
    assert np.max(np.abs(v @ np.diag(w) @ v.conj().T - m)) < 1e-10
    assert np.max(np.abs(v.conj().T @ v - np.eye(6))) < 1e-10
    assert abs(w.sum() - np.trace(m).real) < 1e-10
    lead = v[np.argmax(np.abs(v), axis=0), np.arange(6)]
    np.testing.assert_allclose(lead.imag, 0, atol=1e-14)
    assert np.all(lead.real > 0)


def test_eig_phase_is_reproducible(rng):
    m = random_hermitian(rng, 5)
    u = np.diag(np.exp(1j * rng.uniform(0, 2 * np.pi, 5)))
    _, v1 = eig_hermitian(m)
    # same matrix in a permuted-phase representation gives phase-fixed vectors
    _, v2 = eig_hermitian(u @ m @ u.conj().T)
    np.testing.assert_allclose(np.abs(u @ v1), np.abs(v2), atol=1e-10)


def test_eig_rejects_non_hermitian():
    with pytest.raises(DomainError):
        eig_hermitian([[0, 1], [0, 0]])


def test_solve_linear_examples():
    b = np.array([1.0, 2.0, 3.0])
    x, res = solve_linear(np.eye(3), b)
    np.testing.assert_allclose(x, b)
    assert res < 1e-14
    x, _ = solve_linear(np.diag([2.0, 4.0]), [2.0, 8.0])
    np.testing.assert_allclose(x, [1.0, 2.0])


def test_solve_linear_residual(rng):
    q, _ = np.linalg.qr(_random_complex(rng, (36, 36)))
    a = q @ np.diag(np.linspace(1, 10, 36)) @ q.conj().T
    b = _random_complex(rng, 36)
    x, res = solve_linear(a, b)
    assert np.linalg.norm(a @ x - b) / np.linalg.norm(b) < 1e-10
    assert res == pytest.approx(np.linalg.norm(a @ x - b))


def test_solve_linear_overdetermined(rng):
    a = _random_complex(rng, (8, 3))
    x_true = _random_complex(rng, 3)
    x, res = solve_linear(a, a @ x_true)
    np.testing.assert_allclose(x, x_true, atol=1e-12)


def test_solve_linear_singular():
    with pytest.raises(SingularMatrixError) as err:
        solve_linear([[1.0, 1.0], [1.0, 1.0]], [1.0, 2.0])
    assert err.value.condition > 1e12
