"""Steady-state field sweeps, orientation averaging and build-up timescales."""

import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import curve_fit

from .exceptions import DomainError, NVHyperpolError, SolverError
from .hamiltonian import (
    I_JOINT,
    HyperfineTensor,
    SpinSystemParams,
    build_hamiltonian,
    lac_field,
)
from .lindblad import PumpModel, model_liouvillian, propagate_many, steady_state

ZERO_GATE = 1e-6

_IZ = I_JOINT[2]


def nuclear_polarization(rho):
    """``p_up - p_down = 2 tr(rho (1 (x) I_z))`` of the 13C spin."""
    rho = np.asarray(rho)
    return float(2.0 * np.real(np.trace(rho @ _IZ)))


def random_orientations(n, seed):
    """Draw ``n`` Haar-uniform z-y-z Euler triples.

    alpha and gamma are uniform on [0, 2 pi) and cos(beta) uniform on [-1, 1].
    """
    if n < 1:
        raise DomainError("need at least one orientation")
    if seed is None:
        raise DomainError("random orientations require a seed")
    u = np.random.default_rng(seed).random((n, 3))
    return np.column_stack([2 * np.pi * u[:, 0], np.arccos(1 - 2 * u[:, 1]), 2 * np.pi * u[:, 2]])


def field_grid(start, stop, step):
    """Inclusive, evenly spaced axial-field grid in mT."""
    if step <= 0:
        raise DomainError("field step must be positive")
    n = int(np.floor((stop - start) / step + 1e-9)) + 1
    if n < 1:
        raise DomainError("field grid is empty")
    return np.round(start + step * np.arange(n), 10)


@dataclass(frozen=True)
class SweepConfig:
    """Everything needed for an orientation-averaged field sweep.

    Give either explicit ``orientations`` (Euler triples, radians) or
    ``n_orientations`` together with ``seed``.
    """

    field_grid: tuple
    orientations: Optional[np.ndarray] = None
    n_orientations: int = 1
    seed: Optional[int] = None
    pump: PumpModel = field(default_factory=PumpModel)
    tensor: HyperfineTensor = field(default_factory=HyperfineTensor)
    hyperfine_scale: float = 1.0
    params: SpinSystemParams = field(default_factory=SpinSystemParams)

    def __post_init__(self):
        grid = np.atleast_1d(np.asarray(self.field_grid, dtype=float))
        if grid.size == 0:
            raise DomainError("field grid is empty")
        if not np.all(np.isfinite(grid)):
            raise DomainError("field grid has non-finite values")
        if grid.size > 1 and np.any(np.diff(grid) <= 0):
            raise DomainError("field grid must be strictly increasing")
        object.__setattr__(self, "field_grid", tuple(float(b) for b in grid))
        if self.orientations is None:
            if self.n_orientations == 1 and self.seed is None:
                eul = np.zeros((1, 3))
            else:
                eul = random_orientations(self.n_orientations, self.seed)
        else:
            eul = np.atleast_2d(np.asarray(self.orientations, dtype=float))
            if eul.ndim != 2 or eul.shape[1] != 3 or eul.shape[0] < 1:
                raise DomainError("orientations must be an (n, 3) array of Euler angles")
        eul = eul.copy()
        eul.setflags(write=False)
        object.__setattr__(self, "orientations", eul)
        object.__setattr__(self, "n_orientations", eul.shape[0])
        if not np.isfinite(self.hyperfine_scale):
            raise DomainError("hyperfine_scale must be finite")

    def tensor_for(self, k):
        return HyperfineTensor(self.tensor.a * self.hyperfine_scale, tuple(self.orientations[k]))


@dataclass(frozen=True)
class SweepResult:
    fields: np.ndarray
    per_orientation: np.ndarray
    mean: np.ndarray
    zero_crossings: np.ndarray
    orientations: np.ndarray

    def to_csv(self):
        n = self.per_orientation.shape[0]
        cols = ["field_mT"] + [f"P_orient_{k + 1}" for k in range(n)] + ["P_mean"]
        buf = io.StringIO()
        buf.write(",".join(cols) + "\n")
        for j, b in enumerate(self.fields):
            row = [b, *self.per_orientation[:, j], self.mean[j]]
            buf.write(",".join(_fmt(x) for x in row) + "\n")
        return buf.getvalue()


@dataclass(frozen=True)
class BuildupResult:
    hyperfine_magnitudes: np.ndarray
    timescales: np.ndarray
    fit_residuals: np.ndarray
    fields: np.ndarray
    steady_polarizations: np.ndarray
    converged: np.ndarray

    def to_csv(self):
        buf = io.StringIO()
        buf.write("A_kHz,tau_s,residual\n")
        for a, tau, res in zip(self.hyperfine_magnitudes, self.timescales, self.fit_residuals):
            buf.write(f"{_fmt(a)},{_fmt(tau)},{_fmt(res)}\n")
        return buf.getvalue()


def _fmt(x):
    return f"{float(x):.12g}"


def steady_polarization(params, tensor, pump, bz):
    """Nuclear polarization of the steady state at axial field ``bz`` (mT)."""
    h = build_hamiltonian(params, tensor, bz)
    return nuclear_polarization(steady_state(model_liouvillian(h, pump)))


def _orientation_row(cfg, k):
    tensor = cfg.tensor_for(k)
    row = np.empty(len(cfg.field_grid))
    for j, bz in enumerate(cfg.field_grid):
        try:
            row[j] = steady_polarization(cfg.params, tensor, cfg.pump, bz)
        except NVHyperpolError as exc:
            raise SolverError(str(exc), tag=(k + 1, bz)) from exc
    return row


def field_sweep(cfg, n_jobs=1):
    """Steady-state polarization for every (orientation, field) pair.

    Rows are computed independently and reassembled in orientation order, so
    the result does not depend on ``n_jobs``.
    """
    n = cfg.n_orientations
    if n_jobs is None or n_jobs <= 1 or n == 1:
        rows = [_orientation_row(cfg, k) for k in range(n)]
    else:
        with ThreadPoolExecutor(max_workers=min(n_jobs, n)) as pool:
            rows = list(pool.map(lambda k: _orientation_row(cfg, k), range(n)))
    per = np.vstack(rows)
    mean = per.mean(axis=0)
    fields = np.asarray(cfg.field_grid)
    crossings = find_zero_crossings(fields, mean) if fields.size >= 2 else np.array([])
    return SweepResult(fields, per, mean, crossings, cfg.orientations)


def find_zero_crossings(fields, values, gate=ZERO_GATE):
    """Fields where ``values`` changes sign, by linear interpolation.

    Values with ``|v| < gate`` count as zero. A run of zeros separating
    opposite signs is reported once, at the middle of the run; a run touching
    zero without a sign change is not a crossing.
    """
    fields = np.asarray(fields, dtype=float)
    values = np.asarray(values, dtype=float)
    if fields.shape != values.shape or fields.size < 2:
        raise DomainError("need equal-length field/value arrays with at least 2 points")
    nonzero = np.flatnonzero(np.abs(values) >= gate)
    out = []
    for i, j in zip(nonzero[:-1], nonzero[1:]):
        if np.sign(values[i]) == np.sign(values[j]):
            continue
        if j == i + 1:
            f = values[i] / (values[i] - values[j])
            out.append(fields[i] + f * (fields[j] - fields[i]))
        else:
            out.append(0.5 * (fields[i + 1] + fields[j - 1]))
    return np.array(out)


def optimal_field(cfg, grid=None):
    """Field of maximal |steady-state P| for the first orientation of ``cfg``."""
    grid = np.asarray(cfg.field_grid if grid is None else grid, dtype=float)
    tensor = cfg.tensor_for(0)
    p = [abs(steady_polarization(cfg.params, tensor, cfg.pump, b)) for b in grid]
    return float(grid[int(np.argmax(p))])


def buildup_curve(cfg, t_grid, bz=None):
    """Polarization vs time (s) starting from the maximally mixed state.

    The field defaults to ``cfg.field_grid[0]``; curves are averaged over the
    orientations of ``cfg``.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.size == 0 or t_grid[0] != 0 or np.any(np.diff(t_grid) <= 0):
        raise DomainError("t_grid must be increasing and start at 0")
    bz = cfg.field_grid[0] if bz is None else bz
    rho0 = np.eye(6, dtype=np.complex128) / 6
    curves = []
    for k in range(cfg.n_orientations):
        h = build_hamiltonian(cfg.params, cfg.tensor_for(k), bz)
        rhos = propagate_many(model_liouvillian(h, cfg.pump), rho0, t_grid)
        curves.append([nuclear_polarization(r) for r in rhos])
    return np.mean(curves, axis=0)


def default_time_grid(pump, n=240):
    """Log-spaced times (s) from 1 ns to ten nuclear T1, with a leading 0."""
    horizon = 10 * (pump.nuclear_t1 if pump.nuclear_t1 is not None else 100.0)
    return np.concatenate([[0.0], np.logspace(-9, np.log10(horizon), n)])


def _exp_model(t, p_ss, log_tau):
    return p_ss * (1 - np.exp(-t / np.exp(log_tau)))


def fit_buildup(t, p):
    """Least-squares fit of ``P_ss (1 - exp(-t/tau))``.

    Returns
    -------
    p_ss, tau, residual, converged
        ``residual`` is the RMS misfit relative to ``|P_ss|``.
    """
    t = np.asarray(t, dtype=float)
    p = np.asarray(p, dtype=float)
    p_end = p[-1]
    if abs(p_end) < ZERO_GATE:
        return float(p_end), float("nan"), float("nan"), False
    # first guess: time at which 1 - 1/e of the final value is reached
    reached = np.flatnonzero(p / p_end >= 1 - np.exp(-1))
    tau0 = t[reached[0]] if reached.size and t[reached[0]] > 0 else t[-1] / 10
    try:
        popt, _ = curve_fit(_exp_model, t, p, p0=[p_end, np.log(tau0)], maxfev=10000)
    except (RuntimeError, ValueError):
        return float(p_end), float("nan"), float("nan"), False
    p_ss, tau = float(popt[0]), float(np.exp(popt[1]))
    residual = float(np.sqrt(np.mean((_exp_model(t, *popt) - p) ** 2)) / abs(p_ss))
    return p_ss, tau, residual, bool(np.isfinite(tau) and tau > 0)


def buildup_timescales(magnitudes, cfg, bz=None, scan_grid=None, t_grid=None):
    """Build-up time constant versus hyperfine strength.

    Parameters
    ----------
    magnitudes : sequence of float
        Largest-magnitude tensor eigenvalue in kHz for each point.
    cfg : SweepConfig
        Supplies the reference tensor (first orientation), pump and spin
        parameters.
    bz : float, optional
        Fixed field in mT. By default each magnitude uses its own optimal
        field found on ``scan_grid``.
    scan_grid : array_like, optional
        Fields searched for the optimum; defaults to +-1 mT around the
        anti-crossing in 5 uT steps.
    t_grid : array_like, optional
        Times in seconds; defaults to :func:`default_time_grid`.
    """
    mags = np.asarray(magnitudes, dtype=float)
    if mags.size == 0 or np.any(mags <= 0):
        raise DomainError("hyperfine magnitudes must be positive")
    if scan_grid is None:
        centre = lac_field(cfg.params)
        scan_grid = field_grid(round(centre - 1.0, 3), round(centre + 1.0, 3), 0.005)
    t_grid = default_time_grid(cfg.pump) if t_grid is None else np.asarray(t_grid, dtype=float)
    taus, residuals, fields, p_ss, ok = [], [], [], [], []
    for mag in mags:
        tensor = cfg.tensor.with_max_eigenvalue(mag * 1e-3).oriented(tuple(cfg.orientations[0]))
        point = SweepConfig(
            field_grid=(0.0,),
            orientations=cfg.orientations[:1],
            pump=cfg.pump,
            tensor=tensor,
            params=cfg.params,
        )
        b = optimal_field(point, scan_grid) if bz is None else float(bz)
        curve = buildup_curve(point, t_grid, b)
        amp, tau, res, conv = fit_buildup(t_grid, curve)
        taus.append(tau)
        residuals.append(res)
        fields.append(b)
        p_ss.append(amp)
        ok.append(conv)
    return BuildupResult(
        hyperfine_magnitudes=mags,
        timescales=np.array(taus),
        fit_residuals=np.array(residuals),
        fields=np.array(fields),
        steady_polarizations=np.array(p_ss),
        converged=np.array(ok),
    )
