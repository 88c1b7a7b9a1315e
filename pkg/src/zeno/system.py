"""Measured system: level structure, periodic drive and measurement schedule.

Units: hbar = 1 throughout, so energies are angular frequencies and
``|v|^2 / hbar^2`` is simply ``|v|^2``.

States are labelled ``(n, alpha)``: ``n`` indexes the eigenvalues of ``H0``
and ``alpha`` the remaining quantum numbers carried by ``H1``.  When no
auxiliary energies are given, ``H1 = 0`` and every level has the single
state ``(n, 0)``.
"""

from dataclasses import dataclass
from typing import Hashable, NamedTuple

import numpy as np

from .exceptions import InvalidModelError, LookupFailure

RWA = "rwa"
FULL_COSINE = "full_cosine"
CONVENTIONS = (RWA, FULL_COSINE)


class Transition(NamedTuple):
    """Jump ``|i alpha> -> |f alpha1>``."""

    i: Hashable
    alpha: Hashable
    f: Hashable
    alpha1: Hashable

    @property
    def initial(self):
        return (self.i, self.alpha)

    @property
    def final(self):
        return (self.f, self.alpha1)

    def reversed(self):
        return Transition(self.f, self.alpha1, self.i, self.alpha)


class LevelSystem:
    """Discrete spectrum of ``H0`` plus optional ``H1`` eigenvalues.

    Parameters
    ----------
    levels : mapping or iterable of (n, E_n)
    aux : mapping or iterable of (n, alpha, E1), optional
    """

    def __init__(self, levels, aux=()):
        pairs = levels.items() if hasattr(levels, "items") else levels
        self._levels = {}
        for n, energy in pairs:
            energy = float(energy)
            if n in self._levels:
                raise InvalidModelError(f"duplicate level index {n!r}")
            if not np.isfinite(energy):
                raise InvalidModelError(f"level {n!r} has non-finite energy")
            self._levels[n] = energy
        if not self._levels:
            raise InvalidModelError("a level system needs at least one level")

        triples = ((n, a, e) for (n, a), e in aux.items()) if hasattr(aux, "items") else aux
        self._aux = {}
        for n, alpha, e1 in triples:
            if n not in self._levels:
                raise InvalidModelError(f"auxiliary entry ({n!r}, {alpha!r}) references unknown level")
            if (n, alpha) in self._aux:
                raise InvalidModelError(f"duplicate auxiliary entry ({n!r}, {alpha!r})")
            e1 = float(e1)
            if not np.isfinite(e1):
                raise InvalidModelError(f"auxiliary entry ({n!r}, {alpha!r}) is not finite")
            self._aux[(n, alpha)] = e1

        if self._aux:
            self.states = tuple(self._aux)
        else:
            self.states = tuple((n, 0) for n in self._levels)
        self._index = {s: k for k, s in enumerate(self.states)}

    def __repr__(self):
        return f"LevelSystem(levels={self._levels!r}, aux={self._aux!r})"

    def __eq__(self, other):
        return isinstance(other, LevelSystem) and self._levels == other._levels and self._aux == other._aux

    @property
    def levels(self):
        return dict(self._levels)

    @property
    def aux(self):
        return dict(self._aux)

    @property
    def dim(self):
        return len(self.states)

    def energy(self, n):
        try:
            return self._levels[n]
        except KeyError:
            raise LookupFailure(f"unknown level {n!r}") from None

    def aux_energy(self, n, alpha):
        if not self._aux:
            self.energy(n)
            return 0.0
        try:
            return self._aux[(n, alpha)]
        except KeyError:
            raise LookupFailure(f"no auxiliary energy for state ({n!r}, {alpha!r})") from None

    def index(self, state):
        try:
            return self._index[tuple(state)]
        except KeyError:
            raise LookupFailure(f"unknown state {state!r}") from None

    def check_transition(self, tr):
        self.index(tr.initial)
        self.index(tr.final)
        if tr.initial == tr.final:
            raise InvalidModelError(f"transition {tr} starts and ends in the same state")

    def h0_diagonal(self):
        """``E_n`` for every state, in :attr:`states` order."""
        return np.array([self._levels[n] for n, _ in self.states])

    def h1_diagonal(self):
        return np.array([self.aux_energy(n, a) for n, a in self.states])


def omega_fi(system, tr):
    """Bare transition frequency ``E_f - E_i``."""
    return system.energy(tr.f) - system.energy(tr.i)


def omega_full(system, tr):
    """Transition frequency including the ``H1`` shift."""
    # difference of totals keeps omega_full(i->f) == -omega_full(f->i) exactly
    e_f = system.energy(tr.f) + system.aux_energy(tr.f, tr.alpha1)
    e_i = system.energy(tr.i) + system.aux_energy(tr.i, tr.alpha)
    return e_f - e_i


class Drive:
    """Periodic perturbation ``V(t)`` between states.

    ``elements`` maps ``(f, alpha1, i, alpha)`` to the complex amplitude ``v``.
    Missing conjugate partners are filled in; a partner that is present but
    not the complex conjugate is rejected.

    With ``convention="full_cosine"`` the matrix element is
    ``v cos(omega_L t)``.  Under the rotating-wave approximation (the default)
    the counter-rotating half is dropped, leaving ``(v/2) exp(-i omega_L t)``
    on upward transitions and its conjugate on downward ones.
    """

    def __init__(self, elements, omega_L=0.0, convention=RWA):
        omega_L = float(omega_L)
        if not np.isfinite(omega_L) or omega_L < 0:
            raise InvalidModelError(f"carrier frequency omega_L must be >= 0, got {omega_L}")
        if convention not in CONVENTIONS:
            raise InvalidModelError(f"drive convention must be one of {CONVENTIONS}, got {convention!r}")
        self.omega_L = omega_L
        self.convention = convention

        items = elements.items() if hasattr(elements, "items") else elements
        herm = {}
        for key, v in items:
            key = tuple(key)
            if len(key) != 4:
                raise InvalidModelError(f"drive element key must be (f, alpha1, i, alpha), got {key!r}")
            if key[:2] == key[2:]:
                raise InvalidModelError(f"diagonal drive element {key!r} is not a jump")
            v = complex(v)
            partner = key[2:] + key[:2]
            for k, val in ((key, v), (partner, v.conjugate())):
                if k in herm and herm[k] != val:
                    raise InvalidModelError(f"drive elements {key!r} and {partner!r} are not Hermitian conjugates")
                herm[k] = val
        self.elements = herm

    def __repr__(self):
        return f"Drive(elements={self.elements!r}, omega_L={self.omega_L!r}, convention={self.convention!r})"

    def __eq__(self, other):
        return (
            isinstance(other, Drive)
            and self.elements == other.elements
            and self.omega_L == other.omega_L
            and self.convention == other.convention
        )

    def amplitude(self, tr):
        """Amplitude ``v`` for the transition, zero if undriven."""
        return self.elements.get(tuple(tr), 0j)

    def scaled(self, factor):
        """Copy with every amplitude multiplied by ``factor``."""
        return Drive({k: factor * v for k, v in self.elements.items()}, self.omega_L, self.convention)

    def with_carrier(self, omega_L):
        return Drive(self.elements, omega_L, self.convention)

    def channels(self, system, initial):
        """Transitions out of ``initial`` with a nonzero amplitude, in state order."""
        initial = tuple(initial)
        system.index(initial)
        out = []
        for state in system.states:
            tr = Transition(initial[0], initial[1], state[0], state[1])
            if state != initial and self.amplitude(tr) != 0:
                out.append(tr)
        return out

    def rotation_sign(self, system, tr):
        """Sign of the carrier phase kept under RWA (+1 upward, -1 downward)."""
        w = omega_full(system, tr)
        if w == 0:
            raise InvalidModelError(f"RWA drive on the degenerate transition {tr} is ambiguous")
        return 1 if w > 0 else -1

    def rwa_detuning(self, system, tr):
        """Residual frequency ``omega_full - s * omega_L`` seen in the rotating frame."""
        return omega_full(system, tr) - self.rotation_sign(system, tr) * self.omega_L

    def matrix(self, system, t):
        """Lab-frame ``V(t)`` as a dense matrix in ``system.states`` order."""
        out = np.zeros((system.dim, system.dim), dtype=complex)
        for (f, a1, i, a), v in self.elements.items():
            tr = Transition(i, a, f, a1)
            m, n = system.index(tr.final), system.index(tr.initial)
            if self.convention == FULL_COSINE:
                out[m, n] = v * np.cos(self.omega_L * t)
            else:
                s = self.rotation_sign(system, tr)
                out[m, n] = 0.5 * v * np.exp(-1j * s * self.omega_L * t)
        return out


@dataclass(frozen=True)
class Schedule:
    """Measurement of duration ``tau`` followed by free evolution up to period ``T``.

    The cycle repeats ``N`` times starting at ``t0``.
    """

    tau: float
    T: float
    N: int = 1
    t0: float = 0.0

    def __post_init__(self):
        tau, T, t0 = float(self.tau), float(self.T), float(self.t0)
        if not all(np.isfinite([tau, T, t0])):
            raise InvalidModelError("schedule entries must be finite")
        if tau < 0:
            raise InvalidModelError(f"schedule: measurement duration tau must be >= 0, got {tau}")
        if tau > T:
            raise InvalidModelError(f"schedule: require 0 <= tau <= T, got tau={tau} > T={T}")
        if int(self.N) != self.N or self.N < 1:
            raise InvalidModelError(f"schedule: repetition count N must be an integer >= 1, got {self.N}")
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "t0", t0)
        object.__setattr__(self, "N", int(self.N))

    @property
    def free_duration(self):
        return self.T - self.tau

    def replace(self, **changes):
        values = {"tau": self.tau, "T": self.T, "N": self.N, "t0": self.t0}
        values.update(changes)
        return Schedule(**values)


def two_level_system(omega):
    """Levels ``0`` and ``1`` at ``-omega/2`` and ``+omega/2``."""
    return LevelSystem([(0, -omega / 2), (1, omega / 2)])


def two_level_drive(v, omega_L, convention=RWA):
    """``V(t) = (v sigma_+ + v* sigma_-) cos(omega_L t)`` on a two-level system."""
    return Drive({(1, 0, 0, 0): v}, omega_L, convention)
