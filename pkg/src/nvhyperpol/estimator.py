"""scikit-learn style wrapper around the steady-state polarization model.

Features are axial fields in mT (one column). ``predict`` returns the
orientation-averaged 13C polarization, ``transform`` the per-orientation
values, so the model drops into pipelines, ``clone`` and parameter grids.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .hamiltonian import REFERENCE_TENSOR, HyperfineTensor, SpinSystemParams
from .lindblad import PumpModel
from .sweep import SweepConfig, field_sweep, random_orientations


class ESLACPolarization(TransformerMixin, BaseEstimator):
    """Steady-state 13C polarization near the excited-state anti-crossing.

    Parameters
    ----------
    hyperfine_tensor : array_like of shape (3, 3), optional
        Coupling in MHz; defaults to the three-site reference tensor.
    hyperfine_scale : float
        Multiplier applied to the tensor.
    n_orientations : int
        Number of random orientations drawn at ``fit`` time.
    euler_angles : array_like of shape (n, 3), optional
        Explicit z-y-z orientations; overrides ``n_orientations``.
    random_state : int, optional
        Seed for the orientation draw.
    pump_rate_to_0, leak_rate_to_pm1, dephasing_rate : float
        Rates in MHz.
    nuclear_t1, electron_t1 : float or None
        Relaxation times in seconds.
    d_es, gamma_nv, gamma_c13 : float
        Spin-system constants (MHz, MHz/T).
    n_jobs : int
        Worker threads for the sweep.

    Attributes
    ----------
    orientations_ : ndarray of shape (n_orientations, 3)
    n_features_in_ : int
    """

    def __init__(
        self,
        hyperfine_tensor=None,
        hyperfine_scale=1.0,
        n_orientations=6,
        euler_angles=None,
        random_state=None,
        pump_rate_to_0=10.0,
        leak_rate_to_pm1=0.5,
        nuclear_t1=100.0,
        electron_t1=None,
        dephasing_rate=0.0,
        d_es=1420.0,
        gamma_nv=2.8e4,
        gamma_c13=10.0,
        n_jobs=1,
    ):
        self.hyperfine_tensor = hyperfine_tensor
        self.hyperfine_scale = hyperfine_scale
        self.n_orientations = n_orientations
        self.euler_angles = euler_angles
        self.random_state = random_state
        self.pump_rate_to_0 = pump_rate_to_0
        self.leak_rate_to_pm1 = leak_rate_to_pm1
        self.nuclear_t1 = nuclear_t1
        self.electron_t1 = electron_t1
        self.dephasing_rate = dephasing_rate
        self.d_es = d_es
        self.gamma_nv = gamma_nv
        self.gamma_c13 = gamma_c13
        self.n_jobs = n_jobs

    def fit(self, X=None, y=None):
        """Resolve orientations; ``X`` only fixes the feature count."""
        if X is not None:
            check_array(X, ensure_2d=True)
        if self.euler_angles is not None:
            eul = check_array(self.euler_angles, ensure_2d=True)
            if eul.shape[1] != 3:
                raise ValueError("euler_angles must have shape (n, 3)")
        else:
            seed = self.random_state
            if seed is None:
                seed = np.random.SeedSequence().entropy
            eul = random_orientations(self.n_orientations, seed)
        self.orientations_ = eul
        self.n_features_in_ = 1
        return self

    def _config(self, fields):
        tensor = REFERENCE_TENSOR if self.hyperfine_tensor is None else self.hyperfine_tensor
        return SweepConfig(
            field_grid=tuple(fields),
            orientations=self.orientations_,
            pump=PumpModel(
                pump_rate_to_0=self.pump_rate_to_0,
                leak_rate_to_pm1=self.leak_rate_to_pm1,
                nuclear_t1=self.nuclear_t1,
                electron_t1=self.electron_t1,
                dephasing_rate=self.dephasing_rate,
            ),
            tensor=HyperfineTensor(np.asarray(tensor, dtype=float)),
            hyperfine_scale=self.hyperfine_scale,
            params=SpinSystemParams(d_es=self.d_es, gamma_nv=self.gamma_nv, gamma_c13=self.gamma_c13),
        )

    def _per_orientation(self, X):
        check_is_fitted(self, "orientations_")
        X = check_array(X, ensure_2d=True)
        if X.shape[1] != 1:
            raise ValueError(f"expected one feature (field in mT), got {X.shape[1]}")
        fields = X[:, 0]
        order = np.argsort(fields, kind="stable")
        uniq, inverse = np.unique(fields[order], return_inverse=True)
        res = field_sweep(self._config(uniq), n_jobs=self.n_jobs)
        out = np.empty((len(fields), res.per_orientation.shape[0]))
        out[order] = res.per_orientation.T[inverse]
        return out

    def transform(self, X):
        """Polarization per orientation, shape (n_samples, n_orientations)."""
        return self._per_orientation(X)

    def predict(self, X):
        """Orientation-averaged polarization, shape (n_samples,)."""
        return self._per_orientation(X).mean(axis=1)
