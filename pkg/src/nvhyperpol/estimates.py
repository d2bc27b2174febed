"""Closed-form estimates: enhancement factor, defect spacing, diffusion length."""

from dataclasses import dataclass

import numpy as np
from scipy.constants import N_A

from .exceptions import DomainError

NM_PER_CM = 1e7


@dataclass(frozen=True)
class EnhancementInputs:
    """Integrated signals (arbitrary units), transient counts and masses (mg).

    ``op`` is the optically pumped sample, ``ref`` the thermal reference.
    """

    s_op: float
    s_ref: float
    nt_op: float = 1
    nt_ref: float = 1
    m_op: float = 1.0
    m_ref: float = 1.0
    sigma_s_op: float = 0.0
    sigma_s_ref: float = 0.0

    def __post_init__(self):
        for name in ("s_op", "nt_op", "nt_ref", "m_op", "m_ref"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        if self.s_ref == 0:
            raise DomainError("reference signal is zero")
        if not self.s_ref > 0:
            raise DomainError("s_ref must be positive")
        if self.sigma_s_op < 0 or self.sigma_s_ref < 0:
            raise DomainError("uncertainties must be non-negative")

    def swapped(self):
        return EnhancementInputs(
            self.s_ref, self.s_op, self.nt_ref, self.nt_op,
            self.m_ref, self.m_op, self.sigma_s_ref, self.sigma_s_op,
        )


def enhancement_factor(inp):
    """Signal enhancement normalised by mass and number of transients.

    Only the signal uncertainties propagate into the error (first order).

    Returns
    -------
    eta, sigma_eta : float
    """
    eta = (inp.s_op * np.sqrt(inp.nt_ref) * inp.m_ref) / (
        inp.s_ref * np.sqrt(inp.nt_op) * inp.m_op
    )
    rel = np.hypot(inp.sigma_s_op / inp.s_op, inp.sigma_s_ref / inp.s_ref)
    return float(eta), float(eta * rel)


@dataclass(frozen=True)
class MaterialParams:
    c_nv: float = 10e-6
    aligned_fraction: float = 0.25
    c_13c: float = 0.011
    rho: float = 3.52  # g/cm^3
    molar_mass: float = 12.01  # g/mol
    d_coeff: float = 6.7e-15  # cm^2/s

    def __post_init__(self):
        for name in ("c_nv", "aligned_fraction", "c_13c"):
            v = getattr(self, name)
            if not 0 < v <= 1:
                raise DomainError(f"{name} must lie in (0, 1], got {v!r}")
        for name in ("rho", "molar_mass"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        if self.d_coeff < 0:
            raise DomainError("d_coeff must be non-negative")


def avg_defect_distance(mp):
    """Mean spacing (nm) between the NV centers that take part in pumping.

    ``(N_A rho / M * c_nv * aligned_fraction)^(-1/3)``; use
    ``aligned_fraction=1`` for the spacing of all NV centers.
    """
    if not mp.c_nv > 0:
        raise DomainError("c_nv must be positive")
    per_cm3 = N_A * mp.rho / mp.molar_mass * mp.c_nv * mp.aligned_fraction
    return float(per_cm3 ** (-1.0 / 3.0) * NM_PER_CM)


def diffusion_length(d_coeff, tau):
    """Spin-diffusion length ``sqrt(D tau)`` in nm (D in cm^2/s, tau in s)."""
    if d_coeff < 0 or tau < 0:
        raise DomainError("diffusion coefficient and time must be non-negative")
    return float(np.sqrt(d_coeff * tau) * NM_PER_CM)


def polarized_ratio(c_13c, p_13c, c_nv, aligned_fraction=0.25):
    """Number of polarized 13C per participating NV center."""
    if c_nv <= 0 or aligned_fraction <= 0:
        raise DomainError("c_nv and aligned_fraction must be positive")
    if c_13c < 0 or p_13c < 0:
        raise DomainError("c_13c and p_13c must be non-negative")
    return float(c_13c * p_13c / (aligned_fraction * c_nv))
