"""Dense complex linear algebra and angular-momentum operators.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``. Joint
electron-nucleus operators use the ordering electron (x) nucleus, with the
electron index running over m_s = +1, 0, -1 and the nucleus over (up, down).
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, SingularMatrixError

MAX_SPIN_DIM = 16


def as_complex_matrix(m):
    """Return ``m`` as a 2-D complex array (no copy if already one)."""
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2:
        raise DomainError(f"expected a 2-D matrix, got shape {arr.shape}")
    return arr


def is_hermitian(m, tol=1e-12):
    m = as_complex_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise DomainError("Hermiticity is only defined for square matrices")
    return bool(np.max(np.abs(m - m.conj().T), initial=0.0) <= tol)


@dataclass(frozen=True)
class SpinOperators:
    """Cartesian and ladder operators for a single spin, in units of hbar."""

    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray
    s_plus: np.ndarray
    s_minus: np.ndarray

    @property
    def dim(self):
        return self.sz.shape[0]

    def cartesian(self):
        return (self.sx, self.sy, self.sz)


def spin_operators(s):
    """Build spin-``s`` operators in the |m = s, s-1, ..., -s> basis.

    Parameters
    ----------
    s : float
        Positive integer or half-integer spin quantum number.

    Returns
    -------
    SpinOperators
    """
    two_s = 2 * s
    if not np.isfinite(two_s) or two_s <= 0 or abs(two_s - round(two_s)) > 1e-12:
        raise DomainError(f"spin must be a positive half-integer, got {s!r}")
    dim = int(round(two_s)) + 1
    if dim > MAX_SPIN_DIM:
        raise DomainError(f"spin {s} exceeds the supported dimension {MAX_SPIN_DIM}")
    s = (dim - 1) / 2
    m = s - np.arange(dim)
    s_plus = np.zeros((dim, dim), dtype=np.complex128)
    # <m+1|S+|m> sits just above the diagonal because m decreases with index
    for k in range(1, dim):
        s_plus[k - 1, k] = np.sqrt(s * (s + 1) - m[k] * (m[k] + 1))
    s_minus = s_plus.conj().T.copy()
    sx = 0.5 * (s_plus + s_minus)
    sy = -0.5j * (s_plus - s_minus)
    sz = np.diag(m).astype(np.complex128)
    for op in (sx, sy, sz, s_plus, s_minus):
        op.setflags(write=False)
    return SpinOperators(sx, sy, sz, s_plus, s_minus)


def kron(a, b):
    """Kronecker product ``a (x) b``."""
    return np.kron(as_complex_matrix(a), as_complex_matrix(b))


def eig_hermitian(m, tol=1e-10):
    """Eigen-decomposition of a Hermitian matrix.

    Eigenvalues come back ascending. Each eigenvector is rotated so that its
    largest-magnitude component is real and positive, which makes the output
    reproducible across LAPACK builds.

    Parameters
    ----------
    m : array_like, shape (n, n)
    tol : float
        Allowed ``max|m - m^H|``, relative to ``max(1, max|m|)``.

    Returns
    -------
    eigenvalues : ndarray, shape (n,)
    eigenvectors : ndarray, shape (n, n)
        Columns are the eigenvectors.
    """
    m = as_complex_matrix(m)
    scale = max(1.0, float(np.max(np.abs(m), initial=0.0)))
    if m.shape[0] != m.shape[1] or not is_hermitian(m, tol * scale):
        raise DomainError("eig_hermitian requires a square Hermitian matrix")
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    lead = np.argmax(np.abs(v), axis=0)
    pivot = v[lead, np.arange(v.shape[1])]
    v = v * (np.abs(pivot) / pivot)[np.newaxis, :]
    return w, v


def solve_linear(a, b, rcond=None):
    """Least-squares solution of ``a @ x = b``.

    Square and over-determined systems are both accepted.

    Returns
    -------
    x : ndarray
    residual : float
        ``||a @ x - b||_2``.

    Raises
    ------
    SingularMatrixError
        If ``a`` is numerically rank deficient.
    """
    a = as_complex_matrix(a)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape[0] < a.shape[1]:
        raise DomainError("solve_linear needs a square or over-determined system")
    if b.shape[0] != a.shape[0]:
        raise DomainError(f"right-hand side has {b.shape[0]} rows, matrix has {a.shape[0]}")
    if rcond is None:
        rcond = max(a.shape) * np.finfo(float).eps
    x, _, rank, sv = np.linalg.lstsq(a, b, rcond=rcond)
    if rank < a.shape[1]:
        cond = sv[0] / sv[-1] if sv[-1] > 0 else float("inf")
        raise SingularMatrixError(
            f"matrix is rank deficient (rank {rank} < {a.shape[1]}, cond ~ {cond:.3g})",
            condition=cond,
        )
    residual = float(np.linalg.norm(a @ x - b))
    return x, residual
