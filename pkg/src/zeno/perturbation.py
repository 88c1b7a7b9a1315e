"""Second-order jump probabilities for one measurement-plus-free-evolution cycle.

A cycle starts with a measurement of duration ``tau`` (system coupled to the
pointer) followed by free evolution for ``T - tau``.  To second order in the
drive the probability of a jump ``i -> f`` splits into

* ``w_free``   -- jump during the free evolution,
* ``w_meas``   -- jump during the measurement,
* ``w_interf`` -- cross term between the two amplitudes.

All three are evaluated for RWA drives, where the matrix element is
``(v/2) exp(-i s omega_L t)`` and every double time integral reduces to one
dimension: the measurement kernel depends on ``t1 - t2`` only, and the
interference integrand factorises.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import detector as _det
from ._quad import quad_complex
from .exceptions import InvalidModelError, PerturbationValidityError
from .system import RWA, omega_fi

_SERIES_BELOW = 1e-6
_SPLIT_FACTOR = 10.0


@dataclass(frozen=True)
class JumpResult:
    """Decomposed per-cycle jump probability."""

    w_free: float
    w_meas: float
    w_interf: float

    @property
    def w_total(self):
        return self.w_free + self.w_meas + self.w_interf

    def as_dict(self):
        return {"w_free": self.w_free, "w_meas": self.w_meas, "w_interf": self.w_interf, "w_total": self.w_total}

    def __add__(self, other):
        return JumpResult(self.w_free + other.w_free, self.w_meas + other.w_meas, self.w_interf + other.w_interf)


ZERO = JumpResult(0.0, 0.0, 0.0)


class SurvivalAfterN(NamedTuple):
    exact: float
    exponential: float


def sinc(x):
    """``sin(x)/x`` with its Taylor series near zero."""
    if abs(x) < _SERIES_BELOW:
        return 1.0 - x * x / 6.0
    return math.sin(x) / x


def phase_integral(delta, length):
    """``integral_0^length exp(i delta u) du`` without a 0/0 at resonance."""
    half = 0.5 * delta * length
    return length * sinc(half) * complex(math.cos(half), math.sin(half))


def _require_rwa(drive):
    if drive.convention != RWA:
        raise InvalidModelError("the perturbative engine evaluates RWA drives only; use the oracle for full_cosine")


def _coupling(drive, tr):
    """``|v_eff|^2`` with ``v_eff = v/2``."""
    return 0.25 * abs(drive.amplitude(tr)) ** 2


def _breakpoints(det, rate, length):
    """Split points marking where ``F(rate * s)`` has decayed."""
    if rate == 0:
        return ()
    # compare arguments before dividing so a tiny rate cannot overflow
    reach = abs(rate) * length
    args = {_SPLIT_FACTOR * _det.width_C(det), _det.support_scale(det)}
    # table nodes, reached at s = x / rate
    args.update(x * math.copysign(1.0, rate) for x in _det.kinks(det))
    return tuple(sorted(a / abs(rate) for a in args if 0 < a < reach))


def _check(system, drive, sched, tr):
    _require_rwa(drive)
    system.check_transition(tr)


def w_free(system, drive, sched, tr):
    """Jump probability accumulated during the free evolution ``T - tau``."""
    _check(system, drive, sched, tr)
    g = _coupling(drive, tr)
    if g == 0:
        return 0.0
    return g * abs(phase_integral(drive.rwa_detuning(system, tr), sched.free_duration)) ** 2


def measurement_kernel_integral(system, drive, sched, det, tr):
    """``integral_0^tau (tau - s) exp(i delta s) F(lam omega_fi s) ds`` (no drive prefactor)."""
    tau = sched.tau
    if tau == 0:
        return 0j
    delta = drive.rwa_detuning(system, tr)
    rate = det.lam * omega_fi(system, tr)
    F = _det.scalar_function(det)

    def integrand(s):
        return (tau - s) * complex(math.cos(delta * s), math.sin(delta * s)) * F(rate * s)

    return quad_complex(integrand, 0.0, tau, breakpoints=_breakpoints(det, rate, tau))


def w_meas(system, drive, sched, det, tr):
    """Jump probability accumulated while the pointer is coupled."""
    _check(system, drive, sched, tr)
    g = _coupling(drive, tr)
    if g == 0 or sched.tau == 0:
        return 0.0
    return 2.0 * g * measurement_kernel_integral(system, drive, sched, det, tr).real


def interference_factors(system, drive, sched, det, tr):
    """Measurement-side and free-side factors of the interference term.

    Returns ``(A, B)`` with
    ``A = integral_0^tau exp(i delta t) F(lam omega_if (tau - t)) dt`` and
    ``B = integral_tau^T exp(-i delta t) dt``.
    """
    tau, length = sched.tau, sched.free_duration
    delta = drive.rwa_detuning(system, tr)
    rate = det.lam * omega_fi(system, tr)
    F = _det.scalar_function(det)

    # u = tau - t; F(lam omega_if u) = F(-rate u)
    def integrand(u):
        return complex(math.cos(delta * u), -math.sin(delta * u)) * F(-rate * u)

    inner = quad_complex(integrand, 0.0, tau, breakpoints=_breakpoints(det, rate, tau))
    shift = complex(math.cos(delta * tau), math.sin(delta * tau))
    a = shift * inner
    b = shift.conjugate() * phase_integral(delta, length).conjugate()
    return a, b


def w_interf(system, drive, sched, det, tr):
    """Cross term between measurement-time and free-time jump amplitudes."""
    _check(system, drive, sched, tr)
    g = _coupling(drive, tr)
    if g == 0 or sched.tau == 0 or sched.tau == sched.T:
        return 0.0
    a, b = interference_factors(system, drive, sched, det, tr)
    return 2.0 * g * (a * b).real


def jump_probability(system, drive, sched, det, tr):
    """All three second-order contributions for one transition."""
    return JumpResult(
        w_free(system, drive, sched, tr),
        w_meas(system, drive, sched, det, tr),
        w_interf(system, drive, sched, det, tr),
    )


def channel_results(system, drive, sched, det, initial):
    """``{transition: JumpResult}`` for every driven channel out of ``initial``."""
    return {tr: jump_probability(system, drive, sched, det, tr) for tr in drive.channels(system, initial)}


def total_jump(system, drive, sched, det, initial):
    """Summed jump probability over all channels, as a :class:`JumpResult`."""
    out = ZERO
    for res in channel_results(system, drive, sched, det, initial).values():
        out = out + res
    return out


def survival(system, drive, sched, det, initial):
    """Probability of remaining in ``initial`` after one cycle."""
    p = 1.0 - total_jump(system, drive, sched, det, initial).w_total
    if p < 0:
        raise PerturbationValidityError(
            f"survival probability {p:.3g} < 0: parameters are outside the second-order regime"
        )
    return p


def decay_rate(system, drive, sched, det, initial):
    """Measurement-modified decay rate ``sum_f W(i -> f) / T``."""
    if sched.T <= 0:
        raise InvalidModelError(f"decay rate needs a positive period, got T={sched.T}")
    return total_jump(system, drive, sched, det, initial).w_total / sched.T


def survival_after_N(system, drive, sched, det, initial):
    """Survival after ``sched.N`` cycles, exact power and ``exp(-R N T)``."""
    p = survival(system, drive, sched, det, initial)
    rate = (1.0 - p) / sched.T if sched.T > 0 else 0.0
    return SurvivalAfterN(p ** sched.N, float(np.exp(-rate * sched.N * sched.T)))
