"""Quantum Zeno effect with finite-duration pointer measurements.

Second-order jump probabilities (free, in-measurement and interference
parts), survival probabilities and measurement-modified decay rates, with an
exact system-plus-pointer propagator to check them against.
"""

from .detector import DetectorModel, characteristic_function, lambda_eff, load_table, width_C
from .estimator import JumpProbabilityEstimator
from .exceptions import (
    IntegrationAccuracyError,
    InvalidModelError,
    LookupFailure,
    OracleIntegrationError,
    PerturbationValidityError,
    ZenoError,
)
from .oracle import Oracle, PointerGrid, jump_probability_exact, repeated_cycles
from .perturbation import (
    JumpResult,
    decay_rate,
    jump_probability,
    survival,
    survival_after_N,
    w_free,
    w_interf,
    w_meas,
)
from .system import (
    Drive,
    LevelSystem,
    Schedule,
    Transition,
    omega_fi,
    omega_full,
    two_level_drive,
    two_level_system,
)
from .twolevel import TwoLevelParams

__version__ = "0.1.0"
