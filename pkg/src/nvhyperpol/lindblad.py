"""Liouvillian assembly, steady states and time propagation.

Density matrices are vectorised by column stacking (Fortran order), so that
``vec(A X B) = (B^T (x) A) vec(X)``. The Hamiltonian enters the generator as
``-i [H, rho]`` with H in MHz and time in microseconds; collapse rates are
population-transfer rates in 1/us.
"""

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import expm

from .exceptions import (
    DomainError,
    NonUniqueSteadyStateError,
    PropagationWarning,
    SolverError,
)
from .hamiltonian import ELECTRON, basis_index
from .spin import is_hermitian, kron

US_PER_S = 1e6
NULLITY_RTOL = 64 * np.finfo(float).eps
SPECTRAL_COND_LIMIT = 1e10


@dataclass(frozen=True)
class CollapseSpec:
    """Incoherent jump ``from_state -> to_state`` at population rate ``rate`` (1/us)."""

    rate: float
    from_state: int
    to_state: int

    def __post_init__(self):
        if not (np.isfinite(self.rate) and self.rate >= 0):
            raise DomainError(f"collapse rate must be >= 0, got {self.rate!r}")
        if self.from_state == self.to_state:
            raise DomainError("collapse spec needs distinct from/to states")
        if min(self.from_state, self.to_state) < 0:
            raise DomainError("basis indices must be non-negative")


@dataclass(frozen=True)
class PumpModel:
    """Optical pumping and relaxation channels of the excited-state model.

    Rates are in MHz (1/us); relaxation times in seconds. ``None`` disables
    the corresponding T1 channel.
    """

    pump_rate_to_0: float = 10.0
    leak_rate_to_pm1: float = 0.5
    nuclear_t1: Optional[float] = 100.0
    electron_t1: Optional[float] = None
    dephasing_rate: float = 0.0
    cross_leak: bool = False

    def __post_init__(self):
        for name in ("pump_rate_to_0", "leak_rate_to_pm1", "dephasing_rate"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value >= 0):
                raise DomainError(f"{name} must be finite and >= 0, got {value!r}")
        for name in ("nuclear_t1", "electron_t1"):
            value = getattr(self, name)
            if value is not None and not value > 0:
                raise DomainError(f"{name} must be positive or None, got {value!r}")


def build_collapse_ops(p):
    """Expand a :class:`PumpModel` into jump channels on the 6-dim joint basis.

    Zero-rate channels are dropped.
    """
    specs = []

    def add(rate, frm, to):
        if rate > 0:
            specs.append(CollapseSpec(float(rate), frm, to))

    for up in (True, False):
        for ms in (1, -1):
            add(p.pump_rate_to_0, basis_index(ms, up), basis_index(0, up))
        for ms in (1, -1):
            add(p.leak_rate_to_pm1, basis_index(0, up), basis_index(ms, up))
        if p.cross_leak:
            add(p.leak_rate_to_pm1, basis_index(1, up), basis_index(-1, up))
            add(p.leak_rate_to_pm1, basis_index(-1, up), basis_index(1, up))
    if p.nuclear_t1 is not None:
        rate = 1.0 / (2.0 * p.nuclear_t1 * US_PER_S)
        for ms in (1, 0, -1):
            add(rate, basis_index(ms, True), basis_index(ms, False))
            add(rate, basis_index(ms, False), basis_index(ms, True))
    if p.electron_t1 is not None:
        rate = 1.0 / (3.0 * p.electron_t1 * US_PER_S)
        for up in (True, False):
            for a in (1, 0, -1):
                for b in (1, 0, -1):
                    if a != b:
                        add(rate, basis_index(a, up), basis_index(b, up))
    return specs


@dataclass(frozen=True)
class Liouvillian:
    matrix: np.ndarray
    dim: int

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.complex128)
        if m.shape != (self.dim**2, self.dim**2):
            raise DomainError(f"Liouvillian shape {m.shape} does not match dim {self.dim}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def trace_row(self):
        return np.eye(self.dim).reshape(-1, order="F")

    def trace_defect(self):
        """``max |vec(I)^H L|``; zero for a trace-preserving generator."""
        return float(np.max(np.abs(self.trace_row() @ self.matrix)))


def vec(rho):
    return np.asarray(rho, dtype=np.complex128).reshape(-1, order="F")


def unvec(v, dim):
    return np.asarray(v).reshape(dim, dim, order="F")


def build_liouvillian(h, cs, dephasing_rate=0.0):
    """Assemble the Lindblad generator for Hamiltonian ``h`` and jump list ``cs``.

    Each spec contributes the jump operator ``sqrt(rate) |to><from|``.
    ``dephasing_rate`` adds electron pure dephasing ``sqrt(rate) S_z (x) 1``
    and requires the 6-dim joint basis.
    """
    h = np.asarray(h, dtype=np.complex128)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DomainError("Hamiltonian must be square")
    scale = max(1.0, float(np.max(np.abs(h), initial=0.0)))
    if not is_hermitian(h, 1e-10 * scale):
        raise DomainError("Hamiltonian is not Hermitian")
    d = h.shape[0]
    eye = np.eye(d)
    L = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for c in cs:
        if max(c.from_state, c.to_state) >= d:
            raise DomainError(f"collapse spec {c} out of range for dimension {d}")
        if c.rate == 0:
            continue
        f, t = c.from_state, c.to_state
        # C rho C^dag = rate rho_ff |t><t|
        L[t + d * t, f + d * f] += c.rate
        # -1/2 {C^dag C, rho} with C^dag C = rate |f><f|
        for k in range(d):
            L[f + d * k, f + d * k] -= 0.5 * c.rate
            L[k + d * f, k + d * f] -= 0.5 * c.rate
    if dephasing_rate:
        if d != 6:
            raise DomainError("electron dephasing needs the 6-dim joint basis")
        L += dephasing_rate * _dissipator(kron(ELECTRON.sz, np.eye(2)))
    return Liouvillian(L, d)


def _dissipator(c):
    d = c.shape[0]
    eye = np.eye(d)
    cdc = c.conj().T @ c
    return np.kron(c.conj(), c) - 0.5 * np.kron(eye, cdc) - 0.5 * np.kron(cdc.T, eye)


def model_liouvillian(h, pump):
    """Generator for ``h`` under the channels of a :class:`PumpModel`."""
    return build_liouvillian(h, build_collapse_ops(pump), pump.dephasing_rate)


def stationary_nullity(l, rtol=NULLITY_RTOL):
    """Numerical dimension of the null space of ``l``."""
    sv = np.linalg.svd(l.matrix, compute_uv=False)
    return int(np.sum(sv <= rtol * sv[0])) if sv[0] > 0 else l.dim**2


def steady_state(l, check_unique=True):
    """Stationary density matrix of ``l``.

    Solved as the least-squares problem of ``L`` stacked with the unit-trace
    row, after scaling every row to unit max-norm. The result is Hermitian-symmetrised and normalised to trace one.

    Raises
    ------
    NonUniqueSteadyStateError
        If the stationary subspace is more than one-dimensional.
    SolverError
        If the solution does not annihilate ``L`` to ``1e-9 ||L||``.
    """
    d = l.dim
    L = l.matrix
    if check_unique:
        nullity = stationary_nullity(l)
        if nullity > 1:
            raise NonUniqueSteadyStateError(
                f"stationary subspace has dimension {nullity}; "
                "add a relaxation channel (e.g. a finite nuclear_t1)",
                nullity,
            )
    a = np.vstack([L, l.trace_row()[np.newaxis, :]])
    b = np.zeros(d * d + 1, dtype=np.complex128)
    b[-1] = 1.0
    # row equilibration keeps MHz-scale precession rows from swamping the
    # slow nuclear-relaxation balance in the population rows
    scale = np.max(np.abs(a), axis=1)
    scale[scale == 0] = 1.0
    x = np.linalg.lstsq(a / scale[:, np.newaxis], b / scale, rcond=None)[0]
    rho = unvec(x, d)
    rho = 0.5 * (rho + rho.conj().T)
    rho /= np.trace(rho).real
    residual = float(np.linalg.norm(L @ vec(rho)))
    if residual > 1e-9 * max(np.linalg.norm(L), 1e-300):
        raise SolverError(f"steady-state residual {residual:.3g} exceeds tolerance")
    return rho


def propagate(l, rho0, t):
    """Evolve ``rho0`` for ``t`` seconds under ``l``.

    Uses the eigen-decomposition of ``L`` so that second-scale times with
    MHz-scale generators cost the same as short ones. Eigenvalues with a
    spurious positive real part are clamped to the imaginary axis. When the
    eigenvector matrix is too ill-conditioned the routine falls back to
    :func:`scipy.linalg.expm` and emits a :class:`PropagationWarning`.
    """
    return propagate_many(l, rho0, [t])[0]


def propagate_many(l, rho0, times):
    """Like :func:`propagate` for a sequence of times (seconds), sharing one decomposition."""
    d = l.dim
    rho0 = np.asarray(rho0, dtype=np.complex128)
    if rho0.shape != (d, d):
        raise DomainError(f"rho0 has shape {rho0.shape}, expected {(d, d)}")
    if not is_hermitian(rho0, 1e-9):
        raise DomainError("rho0 must be Hermitian")
    if abs(np.trace(rho0) - 1) > 1e-8:
        raise DomainError("rho0 must have unit trace")
    if np.linalg.eigvalsh(0.5 * (rho0 + rho0.conj().T))[0] < -1e-8:
        raise DomainError("rho0 must be positive semidefinite")
    times = np.asarray(times, dtype=float)
    if np.any(times < 0):
        raise DomainError("propagation times must be non-negative")
    t_us = times * US_PER_S
    L = l.matrix
    v0 = vec(rho0)
    out = np.empty((len(t_us), d, d), dtype=np.complex128)

    w, V = np.linalg.eig(L)
    cond = np.linalg.cond(V)
    if np.isfinite(cond) and cond < SPECTRAL_COND_LIMIT:
        norm = max(float(np.max(np.abs(L), initial=0.0)), 1.0)
        w = np.where(np.abs(w) < 1e-13 * norm, 0.0, w)
        w = np.minimum(w.real, 0.0) + 1j * w.imag
        c = np.linalg.solve(V, v0)
        for k, t in enumerate(t_us):
            out[k] = unvec(V @ (np.exp(w * t) * c), d) if t > 0 else rho0
    else:
        warnings.warn(
            f"Liouvillian eigenbasis is ill-conditioned (cond ~ {cond:.3g}); "
            "using scaling-and-squaring matrix exponential",
            PropagationWarning,
            stacklevel=2,
        )
        for k, t in enumerate(t_us):
            out[k] = unvec(expm(L * t) @ v0, d) if t > 0 else rho0
    moved = t_us > 0
    out[moved] = 0.5 * (out[moved] + np.conj(np.swapaxes(out[moved], 1, 2)))
    return out
