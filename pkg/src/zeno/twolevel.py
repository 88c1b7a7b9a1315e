"""Driven two-level system: closed, semi-closed and asymptotic jump probabilities.

Levels ``|0>`` and ``|1>`` sit at ``-omega/2`` and ``+omega/2``; the drive is
``(v sigma_+ + v* sigma_-) cos(omega_L t)``.  In the rotating-wave picture the
jump amplitude is ``v/2`` at the detuning ``delta = omega - omega_L``, which
is where the factors of one half below come from.  Formulas are written as
literal single or double integrals in ``t`` so they can be compared with the
generic engine in :mod:`zeno.perturbation`.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

from . import detector as _det
from ._quad import quad_complex
from .perturbation import phase_integral, sinc
from .system import Schedule, Transition, two_level_drive, two_level_system

UP = Transition(0, 0, 1, 0)


@dataclass(frozen=True)
class TwoLevelParams:
    """Parameters of the measured two-level system.

    Parameters
    ----------
    omega : float
        Level splitting, > 0.
    v : complex
        Drive amplitude.
    omega_L : float
        Carrier frequency.
    det : DetectorModel
    sched : Schedule
    """

    omega: float
    v: complex
    omega_L: float
    det: _det.DetectorModel
    sched: Schedule

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError(f"level splitting omega must be > 0, got {self.omega}")

    @property
    def delta(self):
        return self.omega - self.omega_L

    @property
    def v2(self):
        return abs(self.v) ** 2

    @property
    def Lambda_omega(self):
        return _det.lambda_eff(self.det) * self.omega

    def generic(self):
        """Equivalent ``(system, drive, transition)`` for the generic engine."""
        return two_level_system(self.omega), two_level_drive(self.v, self.omega_L), UP

    def replace(self, **changes):
        fields = {k: getattr(self, k) for k in ("omega", "v", "omega_L", "det", "sched")}
        fields.update(changes)
        return TwoLevelParams(**fields)


class ResultApprox(NamedTuple):
    """Two-term jump probability for ``T >> tau`` and ``delta T << 1``."""

    total: float
    instantaneous: float
    correction: float


def wf_closed(p):
    """``|v|^2 sin^2(delta (T - tau) / 2) / delta^2``."""
    length = p.sched.free_duration
    return p.v2 * (0.5 * length * sinc(0.5 * p.delta * length)) ** 2


def wm_semiclosed(p):
    tau = p.sched.tau
    if tau == 0:
        return 0.0
    rate = p.det.lam * p.omega
    F = _det.scalar_function(p.det)
    delta = p.delta

    def integrand(t):
        return F(rate * t) * complex(math.cos(delta * t), math.sin(delta * t)) * (1.0 - t / tau)

    splits = ()
    if rate > 0:
        splits = (10.0 * _det.width_C(p.det) / rate,) + tuple(x / rate for x in _det.kinks(p.det))
    value = quad_complex(integrand, 0.0, tau, breakpoints=splits)
    return 0.5 * tau * p.v2 * value.real


def wint_semiclosed(p):
    """Interference term as the product of a quadrature and an analytic factor.

    The double integral over ``t1 in [0, tau]``, ``t2 in [tau, T]`` factorises;
    the ``t2`` factor is done in closed form.
    """
    tau, T = p.sched.tau, p.sched.T
    if tau == 0 or tau == T:
        return 0.0
    rate = p.det.lam * p.omega
    F = _det.scalar_function(p.det)
    delta = p.delta

    def integrand(t1):
        return complex(math.cos(delta * t1), math.sin(delta * t1)) * F(rate * (t1 - tau))

    splits = ()
    if rate > 0:
        splits = (tau - 10.0 * _det.width_C(p.det) / rate,) + tuple(tau + x / rate for x in _det.kinks(p.det))
    a = quad_complex(integrand, 0.0, tau, breakpoints=splits)
    shift = complex(math.cos(delta * tau), -math.sin(delta * tau))
    b = shift * phase_integral(delta, T - tau).conjugate()
    return 0.5 * p.v2 * (a * b).real


def wm_asymptotic(p):
    """Large-coupling limit ``tau |v|^2 / (2 Lambda omega)``."""
    return p.sched.tau * p.v2 / (2.0 * p.Lambda_omega)


def wint_asymptotic(p):
    """Large-coupling limit ``|v|^2 sin(delta (T - tau)) / (2 Lambda omega delta)``."""
    length = p.sched.free_duration
    return p.v2 * length * sinc(p.delta * length) / (2.0 * p.Lambda_omega)


def w_result_approx(p):
    """Instantaneous-measurement term plus finite-duration correction.

    Intended for ``T >> tau`` and ``delta T << 1``; the regime is not checked.
    The correction vanishes at ``tau = 1 / (Lambda omega)``.
    """
    T = p.sched.T
    inst = p.v2 * T * T / 4.0
    corr = p.v2 * T / 2.0 * (1.0 / p.Lambda_omega - p.sched.tau)
    return ResultApprox(inst + corr, inst, corr)


def w_total_semiclosed(p):
    return wf_closed(p) + wm_semiclosed(p) + wint_semiclosed(p)


def w_total_asymptotic(p):
    return wf_closed(p) + wm_asymptotic(p) + wint_asymptotic(p)
