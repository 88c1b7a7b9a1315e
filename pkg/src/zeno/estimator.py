"""scikit-learn style wrapper around the jump-probability engines.

The model (system, drive, pointer) is fixed at construction; rows of ``X``
are schedules ``[T, tau]`` or ``[T, tau, t0]``.  ``fit`` validates the model
and caches the derived pointer quantities, so the estimator can sit in a
pipeline or be cloned with ``sklearn.base.clone``.

>>> from zeno import DetectorModel, two_level_system, two_level_drive
>>> est = JumpProbabilityEstimator(two_level_system(1.0), two_level_drive(0.02, 1.0),
...                                DetectorModel.gaussian(1.0, 1e3)).fit()
>>> est.predict([[1.0, 0.01]]).round(8)
array([9.826e-05])
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import detector as _det
from . import perturbation
from .exceptions import InvalidModelError
from .oracle import Oracle
from .system import Schedule

OUTPUT_COLUMNS = ("w_free", "w_meas", "w_interf", "w_total")


class JumpProbabilityEstimator(TransformerMixin, BaseEstimator):
    """Per-cycle jump probabilities for a batch of schedules.

    Parameters
    ----------
    system : LevelSystem
    drive : Drive
    detector : DetectorModel
    initial : tuple, optional
        Monitored state; defaults to ``system.states[0]``.
    engine : {"perturbative", "oracle"}
        ``"oracle"`` returns only ``w_total``; the components are NaN.
    """

    def __init__(self, system=None, drive=None, detector=None, initial=None, engine="perturbative"):
        self.system = system
        self.drive = drive
        self.detector = detector
        self.initial = initial
        self.engine = engine

    def fit(self, X=None, y=None):
        if self.system is None or self.drive is None or self.detector is None:
            raise InvalidModelError("system, drive and detector are required")
        if self.engine not in ("perturbative", "oracle"):
            raise InvalidModelError(f"engine must be 'perturbative' or 'oracle', got {self.engine!r}")
        self.initial_ = tuple(self.initial) if self.initial is not None else self.system.states[0]
        self.channels_ = self.drive.channels(self.system, self.initial_)
        self.width_ = _det.width_C(self.detector)
        self.lambda_eff_ = _det.lambda_eff(self.detector)
        if X is not None:
            self._schedules(X)
        return self

    def _schedules(self, X):
        X = check_array(X, dtype=float)
        if X.shape[1] not in (2, 3):
            raise ValueError(f"X must have columns [T, tau] or [T, tau, t0]; got {X.shape[1]} columns")
        t0 = X[:, 2] if X.shape[1] == 3 else np.zeros(len(X))
        return [Schedule(tau=tau, T=T, t0=s) for T, tau, s in zip(X[:, 0], X[:, 1], t0)]

    def _row(self, sched):
        if self.engine == "oracle":
            pops = Oracle(self.system, self.drive, self.detector, sched).transition_probabilities(self.initial_)
            total = sum(p for state, p in pops.items() if state != self.initial_)
            return (np.nan, np.nan, np.nan, total)
        res = perturbation.total_jump(self.system, self.drive, sched, self.detector, self.initial_)
        return (res.w_free, res.w_meas, res.w_interf, res.w_total)

    def transform(self, X):
        """Array of shape ``(n, 4)``: ``w_free, w_meas, w_interf, w_total``."""
        check_is_fitted(self, "channels_")
        return np.array([self._row(s) for s in self._schedules(X)], dtype=float).reshape(-1, 4)

    def predict(self, X):
        """Total per-cycle jump probability for each schedule."""
        return self.transform(X)[:, 3]

    def decay_rate(self, X):
        X = check_array(X, dtype=float)
        return self.predict(X) / X[:, 0]

    def get_feature_names_out(self, input_features=None):
        return np.asarray(OUTPUT_COLUMNS, dtype=object)
