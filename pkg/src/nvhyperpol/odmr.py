"""Ground-state ODMR lines of the four NV orientations, for crystal alignment."""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import DomainError
from .hamiltonian import ELECTRON, FieldVector, SpinSystemParams

TETRAHEDRAL_ANGLE = float(np.arccos(-1.0 / 3.0))
# angle between the field and the three other axes when one axis is aligned
NON_ALIGNED_THETA = float(np.pi - TETRAHEDRAL_ANGLE)

_SZ = ELECTRON.sz
_SX = ELECTRON.sx
_SZ2 = _SZ @ _SZ


def _default_axes():
    axes = np.array([[1, 1, 1], [-1, 1, 1], [1, -1, 1], [1, 1, -1]], dtype=float)
    return axes / np.sqrt(3.0)


@dataclass(frozen=True)
class CrystalFrame:
    """Unit vectors of the NV symmetry axes in the lab frame."""

    nv_axes: np.ndarray = field(default_factory=_default_axes)

    def __post_init__(self):
        axes = np.atleast_2d(np.asarray(self.nv_axes, dtype=float))
        if axes.ndim != 2 or axes.shape[1] != 3:
            raise DomainError("nv_axes must be an (n, 3) array")
        norms = np.linalg.norm(axes, axis=1)
        if np.any(np.abs(norms - 1) > 1e-12):
            raise DomainError("nv_axes must be unit vectors")
        axes = axes.copy()
        axes.setflags(write=False)
        object.__setattr__(self, "nv_axes", axes)


def _frequencies(b_mag, theta, p):
    b = 1e-3 * b_mag
    h = p.d_gs * _SZ2 + p.gamma_nv * b * (np.cos(theta) * _SZ + np.sin(theta) * _SX)
    w, v = np.linalg.eigh(h)
    ref = int(np.argmax(np.abs(v[1, :]) ** 2))
    f = np.sort(np.delete(w, ref) - w[ref])
    return float(f[0]), float(f[1])


def transition_frequencies(b_mag, theta, p=None):
    """ODMR lines (MHz) out of the m_s=0-like level for field ``b_mag`` (mT) at angle ``theta``.

    Returns ``(f_minus, f_plus)`` ascending. The reference level is the
    eigenstate with the largest m_s = 0 weight, not the lowest energy.
    """
    p = SpinSystemParams() if p is None else p
    if b_mag < 0:
        raise DomainError("field magnitude must be non-negative")
    if not 0 <= theta <= np.pi:
        raise DomainError("theta must lie in [0, pi]")
    return _frequencies(b_mag, theta, p)


def axis_angles(b_vec, cf=None):
    """Angle (rad) between the field and each NV axis."""
    cf = CrystalFrame() if cf is None else cf
    b = b_vec.as_array() if isinstance(b_vec, FieldVector) else np.asarray(b_vec, dtype=float)
    mag = np.linalg.norm(b)
    if not mag > 0:
        raise DomainError("field vector must be non-zero")
    return np.arccos(np.clip(cf.nv_axes @ b / mag, -1.0, 1.0))


def alignment_spread(b_vec, cf=None, p=None):
    """Spread of the m_s=0 -> -1 lines over the non-aligned orientations.

    The axis closest to the field line (largest ``|cos theta|``) is treated
    as aligned and left out.

    Returns
    -------
    spread : float
        ``max - min`` of ``f_minus`` over the remaining axes (MHz).
    per_axis : ndarray, shape (n_axes, 2)
        ``(f_minus, f_plus)`` for every axis in input order.
    """
    p = SpinSystemParams() if p is None else p
    b = b_vec.as_array() if isinstance(b_vec, FieldVector) else np.asarray(b_vec, dtype=float)
    thetas = axis_angles(b, cf)
    mag = float(np.linalg.norm(b))
    per_axis = np.array([_frequencies(mag, th, p) for th in thetas])
    # an axis is a line, so theta and pi - theta are equally aligned;
    # ties between equivalent axes must not depend on float noise
    aligned = int(np.argmax(np.round(np.abs(np.cos(thetas)), 12)))
    others = np.delete(per_axis[:, 0], aligned)
    return float(others.max() - others.min()), per_axis


def angular_sensitivity(b_mag, theta0, p=None, step_deg=0.01):
    """Central-difference slopes ``(df_minus/dtheta, df_plus/dtheta)`` in MHz/degree."""
    p = SpinSystemParams() if p is None else p
    if not b_mag > 0:
        raise DomainError("field magnitude must be positive")
    h = np.radians(step_deg)
    lo = _frequencies(b_mag, theta0 - h, p)
    hi = _frequencies(b_mag, theta0 + h, p)
    return tuple((hi[k] - lo[k]) / (2 * step_deg) for k in range(2))


def angle_scan(b_mag, thetas, p=None):
    """``(f_minus, f_plus)`` for each angle in ``thetas`` (rad); shape (n, 2)."""
    p = SpinSystemParams() if p is None else p
    return np.array([transition_frequencies(b_mag, th, p) for th in np.atleast_1d(thetas)])
