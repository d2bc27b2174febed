"""NV excited-state + single 13C spin Hamiltonian.

Units: frequencies in MHz, fields in mT, gyromagnetic ratios in MHz/T.
"""

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .exceptions import DomainError
from .spin import eig_hermitian, kron, spin_operators

ELECTRON = spin_operators(1)
NUCLEUS = spin_operators(0.5)
_E3 = np.eye(3, dtype=np.complex128)
_E2 = np.eye(2, dtype=np.complex128)

# joint-space operators, electron (x) nucleus
S_JOINT = tuple(kron(op, _E2) for op in ELECTRON.cartesian())
I_JOINT = tuple(kron(_E3, op) for op in NUCLEUS.cartesian())
_SZ2 = kron(ELECTRON.sz @ ELECTRON.sz, _E2)
_SI = tuple(tuple(kron(si, ij) for ij in NUCLEUS.cartesian()) for si in ELECTRON.cartesian())

REFERENCE_TENSOR = np.array(
    [
        [5.0, -6.3, -2.9],
        [-6.3, 4.2, -2.3],
        [-2.9, -2.3, 8.2],
    ]
)
"""Hyperfine tensor (MHz) of a 13C three lattice sites from the NV."""


def _index(ms, up):
    return {1: 0, 0: 1, -1: 2}[ms] * 2 + (0 if up else 1)


def basis_index(ms, nuclear_up):
    """Position of |m_s, up/down> in the 6-dim joint basis."""
    if ms not in (1, 0, -1):
        raise DomainError(f"m_s must be one of +1, 0, -1, got {ms!r}")
    return _index(ms, bool(nuclear_up))


@dataclass(frozen=True)
class SpinSystemParams:
    d_es: float = 1420.0
    d_gs: float = 2870.0
    gamma_nv: float = 2.8e4
    gamma_c13: float = 10.0

    def __post_init__(self):
        for name in ("d_es", "d_gs", "gamma_nv", "gamma_c13"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be finite and positive, got {value!r}")


def rotation_matrix(alpha, beta, gamma):
    """Active z-y-z Euler rotation ``Rz(alpha) @ Ry(beta) @ Rz(gamma)``."""

    def rz(a):
        c, s = np.cos(a), np.sin(a)
        return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])

    cb, sb = np.cos(beta), np.sin(beta)
    ry = np.array([[cb, 0.0, sb], [0.0, 1.0, 0.0], [-sb, 0.0, cb]])
    return rz(alpha) @ ry @ rz(gamma)


@dataclass(frozen=True)
class HyperfineTensor:
    """Real symmetric 3x3 hyperfine coupling (MHz) plus its z-y-z orientation."""

    a: np.ndarray = field(default_factory=lambda: REFERENCE_TENSOR.copy())
    euler: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        a = np.array(self.a, dtype=float)
        if a.shape != (3, 3):
            raise DomainError(f"hyperfine tensor must be 3x3, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise DomainError("hyperfine tensor has non-finite entries")
        if np.max(np.abs(a - a.T)) > 1e-9:
            raise DomainError("hyperfine tensor must be symmetric")
        a.setflags(write=False)
        object.__setattr__(self, "a", a)
        euler = tuple(float(x) for x in self.euler)
        if len(euler) != 3:
            raise DomainError("euler must be an (alpha, beta, gamma) triple")
        object.__setattr__(self, "euler", euler)

    def scaled(self, factor):
        return HyperfineTensor(self.a * factor, self.euler)

    def oriented(self, euler):
        return HyperfineTensor(self.a, euler)

    def with_max_eigenvalue(self, magnitude):
        """Rescale so the largest-magnitude eigenvalue equals ``magnitude`` (MHz)."""
        largest = np.max(np.abs(np.linalg.eigvalsh(self.a)))
        if largest == 0:
            raise DomainError("cannot rescale a zero tensor")
        return self.scaled(magnitude / largest)


@dataclass(frozen=True)
class FieldVector:
    """Magnetic field in mT, NV frame (z along the NV axis)."""

    bx: float = 0.0
    by: float = 0.0
    bz: float = 0.0

    def __post_init__(self):
        if not np.all(np.isfinite(self.as_array())):
            raise DomainError("field components must be finite")

    @classmethod
    def axial(cls, bz):
        return cls(0.0, 0.0, float(bz))

    @classmethod
    def from_tesla(cls, bx, by, bz):
        return cls(1e3 * bx, 1e3 * by, 1e3 * bz)

    def as_array(self):
        return np.array([self.bx, self.by, self.bz], dtype=float)

    @property
    def magnitude(self):
        return float(np.linalg.norm(self.as_array()))


def rotate_tensor(t):
    """Return ``R a R^T`` for the tensor's Euler angles."""
    r = rotation_matrix(*t.euler)
    out = r @ t.a @ r.T
    return 0.5 * (out + out.T)


def load_tensor(path):
    """Read a hyperfine tensor from a text file.

    The file holds nine numbers in MHz, row-major, separated by whitespace
    or commas. Text after ``#`` on a line is ignored.
    """
    path = Path(path)
    numbers = []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        for token in line.split("#", 1)[0].replace(",", " ").split():
            try:
                numbers.append(float(token))
            except ValueError:
                raise DomainError(f"{path}:{lineno}: not a number: {token!r}") from None
    if len(numbers) != 9:
        raise DomainError(f"{path}: expected 9 tensor entries, found {len(numbers)}")
    return np.array(numbers).reshape(3, 3)


def build_hamiltonian(p, t, b):
    """Joint 6x6 Hamiltonian in MHz.

    ``D_ES Sz^2 + (gamma_NV S + gamma_13C I) . B + S . A . I`` with the
    hyperfine tensor rotated by its Euler angles.

    Parameters
    ----------
    p : SpinSystemParams
    t : HyperfineTensor
    b : FieldVector or float
        A bare number is taken as an axial field in mT.
    """
    if not isinstance(b, FieldVector):
        b = FieldVector.axial(b)
    b_tesla = 1e-3 * b.as_array()
    a = rotate_tensor(t)
    h = p.d_es * _SZ2
    for k in range(3):
        if b_tesla[k] != 0.0:
            h = h + b_tesla[k] * (p.gamma_nv * S_JOINT[k] + p.gamma_c13 * I_JOINT[k])
    for i in range(3):
        for j in range(3):
            if a[i, j] != 0.0:
                h = h + a[i, j] * _SI[i][j]
    return 0.5 * (h + h.conj().T)


def lac_field(p):
    """Electron-only excited-state crossing field ``D_ES / gamma_NV`` in mT."""
    return 1e3 * p.d_es / p.gamma_nv


def level_diagram(p, t, b_grid):
    """Sorted eigenvalues (MHz) of the joint Hamiltonian at each axial field.

    Returns
    -------
    ndarray, shape (len(b_grid), 6)
    """
    b_grid = np.atleast_1d(np.asarray(b_grid, dtype=float))
    if b_grid.size == 0:
        raise DomainError("field grid is empty")
    return np.array([eig_hermitian(build_hamiltonian(p, t, bz))[0] for bz in b_grid])
