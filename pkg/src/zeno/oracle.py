"""Exact system-plus-pointer propagation, used as ground truth.

Without a detector Hamiltonian the pointer coordinate ``q`` is conserved, so
the joint evolution during a measurement splits into independent system
evolutions, one per pointer grid point ``q_k``, each under

    H_k(t) = (1 + lam q_k) H0 + H1 + V(t + t0).

Tracing out the pointer is then a weighted sum over grid points.

Two propagators are available:

``"rotating"``
    For RWA drives whose carrier phases can be absorbed by a frame
    ``exp(-i omega_L K t)`` with integer ``K`` per state (always true for two
    levels and for ladders).  The rotating-frame Hamiltonian is constant, so
    each segment is a single exact matrix exponential.
``"stepper"``
    Fourth-order Magnus integrator with piecewise exact exponentials; works
    for any drive including ``full_cosine``.
"""

import csv
import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .detector import GAUSSIAN
from .exceptions import InvalidModelError, OracleIntegrationError
from .system import RWA, Transition

DEFAULT_POINTS = 1024
DEFAULT_SPAN = 8.0
NORM_TOL = 1e-10
_ALIAS_MARGIN = 10.0


@dataclass(frozen=True)
class PointerGrid:
    """Uniform grid over the pointer coordinate with normalised ``|Phi|^2`` weights."""

    q: np.ndarray
    weights: np.ndarray
    sigma: float

    @property
    def n_points(self):
        return self.q.size

    @property
    def q_min(self):
        return float(self.q[0])

    @property
    def q_max(self):
        return float(self.q[-1])

    @classmethod
    def gaussian(cls, sigma, n_points=DEFAULT_POINTS, span=DEFAULT_SPAN):
        """Grid on ``[-span sigma, span sigma]`` for a Gaussian ``|Phi(q)|^2``."""
        if n_points < 3:
            raise InvalidModelError("pointer grid needs at least 3 points")
        q = np.linspace(-span * sigma, span * sigma, int(n_points))
        w = np.exp(-0.5 * (q / sigma) ** 2)
        return cls(q, w / w.sum(), float(sigma))

    @classmethod
    def for_detector(cls, det, max_phase, n_points=None, span=DEFAULT_SPAN):
        """Grid fine enough that pointer phases up to ``max_phase`` do not alias.

        On a uniform grid the discrete characteristic function repeats with
        period ``2 pi / h``; the spacing is chosen so the first alias lies many
        widths beyond ``max_phase``.
        """
        if det.kind != GAUSSIAN:
            raise InvalidModelError("the exact oracle needs a Gaussian pointer (|Phi|^2 is not recoverable from a table)")
        sigma = det.sigma
        needed = math.ceil(2 * span * sigma * (abs(max_phase) + _ALIAS_MARGIN / sigma) / (2 * math.pi)) + 1
        n = max(DEFAULT_POINTS, needed) if n_points is None else int(n_points)
        return cls.gaussian(sigma, n, span)

    def characteristic(self, x):
        """Discrete ``sum_k w_k exp(i x q_k)``."""
        return np.sum(self.weights * np.exp(1j * np.multiply.outer(x, self.q)), axis=-1)


@dataclass
class JointState:
    """System amplitudes ``psi[k]`` attached to pointer grid point ``q_k`` at lab time ``time``."""

    grid: PointerGrid
    psi: np.ndarray
    time: float = 0.0

    @classmethod
    def product(cls, grid, system_state, time=0.0):
        psi = np.broadcast_to(np.asarray(system_state, dtype=complex), (grid.n_points, len(system_state)))
        return cls(grid, psi.copy(), float(time))

    def norm(self):
        return float(np.sum(self.grid.weights * np.sum(np.abs(self.psi) ** 2, axis=1)))

    def populations(self):
        """Pointer-traced populations of every system state."""
        return self.grid.weights @ (np.abs(self.psi) ** 2)

    def reduced_density_matrix(self):
        return np.einsum("k,ki,kj->ij", self.grid.weights, self.psi, self.psi.conj())


def _hermitian_expm(h, dt):
    """``exp(-i h dt)`` for a batch of Hermitian matrices ``h``."""
    evals, evecs = np.linalg.eigh(h)
    phases = np.exp(-1j * evals * dt)
    return np.einsum("...ij,...j,...kj->...ik", evecs, phases, evecs.conj())


class Propagator:
    """Segment propagators for one system and drive.

    Parameters
    ----------
    system : LevelSystem
    drive : Drive
    method : {"auto", "rotating", "stepper"}
    max_step : float, optional
        Upper bound on the Magnus step; the default follows the fastest
        frequency present.
    """

    def __init__(self, system, drive, method="auto", max_step=None):
        self.system = system
        self.drive = drive
        self.labels = self._frame_labels()
        if method == "auto":
            method = "rotating" if self.labels is not None else "stepper"
        if method == "rotating" and self.labels is None:
            raise InvalidModelError("drive has no constant rotating frame; use method='stepper'")
        if method not in ("rotating", "stepper"):
            raise InvalidModelError(f"unknown propagation method {method!r}")
        self.method = method
        self.max_step = max_step
        self._h0 = system.h0_diagonal()
        self._h1 = system.h1_diagonal()

    def _frame_labels(self):
        """Integer ``K_n`` with ``K_m - K_n = s_mn`` on every driven pair, or None."""
        if self.drive.convention != RWA:
            return None
        system = self.system
        adj = {k: [] for k in range(system.dim)}
        for (f, a1, i, a), _ in self.drive.elements.items():
            tr = Transition(i, a, f, a1)
            m, n = system.index(tr.final), system.index(tr.initial)
            adj[n].append((m, self.drive.rotation_sign(system, tr)))
        labels = [None] * system.dim
        for root in range(system.dim):
            if labels[root] is not None:
                continue
            labels[root] = 0
            todo = deque([root])
            while todo:
                n = todo.popleft()
                for m, s in adj[n]:
                    if labels[m] is None:
                        labels[m] = labels[n] + s
                        todo.append(m)
                    elif labels[m] != labels[n] + s:
                        return None
        return np.array(labels, dtype=float)

    def diagonal(self, lam_q=None):
        """Unperturbed energies, shape ``(branches, dim)``; ``lam_q`` scales ``H0``."""
        if lam_q is None:
            return (self._h0 + self._h1)[None, :]
        return (1.0 + np.asarray(lam_q))[:, None] * self._h0[None, :] + self._h1[None, :]

    def segment(self, diag, t_start, duration):
        """Lab-frame propagators ``U(t_start + duration, t_start)``, shape ``(branches, dim, dim)``."""
        nb, d = diag.shape
        if duration == 0:
            return np.broadcast_to(np.eye(d, dtype=complex), (nb, d, d)).copy()
        if self.method == "rotating":
            return self._rotating_segment(diag, t_start, duration)
        return self._magnus_segment(diag, t_start, duration)

    def _rotating_segment(self, diag, t_start, duration):
        wl, K = self.drive.omega_L, self.labels
        coupling = self.drive.matrix(self.system, 0.0)
        h = coupling[None, :, :] + np.einsum("bi,ij->bij", diag - wl * K[None, :], np.eye(K.size))
        u = _hermitian_expm(h, duration)
        t_end = t_start + duration
        left = np.exp(-1j * wl * K * t_end)
        right = np.exp(1j * wl * K * t_start)
        return left[None, :, None] * u * right[None, None, :]

    def step_size(self, diag, duration):
        spread = float(np.max(diag.max(axis=1) - diag.min(axis=1)))
        fastest = spread + self.drive.omega_L
        vmax = max((abs(v) for v in self.drive.elements.values()), default=0.0)
        bounds = [duration / 100.0]
        if fastest > 0:
            bounds.append(0.01 / fastest)
        if vmax > 0:
            bounds.append(0.01 / vmax)
        if self.max_step is not None:
            bounds.append(self.max_step)
        return min(bounds)

    def _magnus_segment(self, diag, t_start, duration):
        nb, d = diag.shape
        n_steps = max(1, math.ceil(duration / self.step_size(diag, duration)))
        h = duration / n_steps
        c = math.sqrt(3.0) / 6.0
        D = np.einsum("bi,ij->bij", diag, np.eye(d))
        u = np.broadcast_to(np.eye(d, dtype=complex), (nb, d, d)).copy()
        for step in range(n_steps):
            t = t_start + step * h
            h1 = D + self.drive.matrix(self.system, t + (0.5 - c) * h)[None]
            h2 = D + self.drive.matrix(self.system, t + (0.5 + c) * h)[None]
            # Omega = -i h (H1 + H2)/2 - (sqrt3/12) h^2 [H2, H1]  =:  -i h G
            comm = h2 @ h1 - h1 @ h2
            g = 0.5 * (h1 + h2) - 1j * (math.sqrt(3.0) / 12.0) * h * comm
            u = _hermitian_expm(g, h) @ u
        return u


def _check_norm(before, after, where):
    drift = abs(after - before)
    if drift > NORM_TOL:
        raise OracleIntegrationError(f"{where}: norm drift {drift:.3e} exceeds {NORM_TOL:g}")
    return drift


def evolve_measurement(state, system, drive, det, t0, tau, propagator=None):
    """Propagate through a measurement of duration ``tau`` starting at lab time ``t0``."""
    prop = propagator or Propagator(system, drive)
    diag = prop.diagonal(det.lam * state.grid.q)
    u = prop.segment(diag, t0, tau)
    psi = np.einsum("kij,kj->ki", u, state.psi)
    out = JointState(state.grid, psi, t0 + tau)
    _check_norm(state.norm(), out.norm(), "measurement segment")
    return out


def evolve_free(state_or_rho, system, drive, t0, duration, propagator=None):
    """System-only propagation; accepts a :class:`JointState` or a density matrix."""
    prop = propagator or Propagator(system, drive)
    u = prop.segment(prop.diagonal(), t0, duration)[0]
    if isinstance(state_or_rho, JointState):
        psi = state_or_rho.psi @ u.T
        out = JointState(state_or_rho.grid, psi, t0 + duration)
        _check_norm(state_or_rho.norm(), out.norm(), "free segment")
        return out
    rho = np.asarray(state_or_rho)
    out = u @ rho @ u.conj().T
    _check_norm(np.trace(rho).real, np.trace(out).real, "free segment")
    return out


def max_pointer_phase(system, det, tau):
    """Largest pointer-phase argument ``lam |E_m - E_n| tau`` reached in a measurement."""
    h0 = system.h0_diagonal()
    return det.lam * float(h0.max() - h0.min()) * tau


class Oracle:
    """Exact jump and survival probabilities for one configuration.

    Parameters
    ----------
    system, drive, det, sched
        Model description; ``det`` must be a Gaussian pointer.
    n_points : int, optional
        Pointer grid size; default is at least 1024 and large enough to avoid
        aliasing of the fastest pointer phase.
    method, max_step
        Forwarded to :class:`Propagator`.
    """

    def __init__(self, system, drive, det, sched, n_points=None, method="auto", max_step=None):
        self.system, self.drive, self.det, self.sched = system, drive, det, sched
        self.grid = PointerGrid.for_detector(det, max_pointer_phase(system, det, sched.tau), n_points)
        self.propagator = Propagator(system, drive, method=method, max_step=max_step)
        self.norm_drift = 0.0

    def _cycle_unitaries(self, start):
        """Per-branch measurement propagators and the shared free propagator for one cycle."""
        prop, sched = self.propagator, self.sched
        um = prop.segment(prop.diagonal(self.det.lam * self.grid.q), start, sched.tau)
        uf = prop.segment(prop.diagonal(), start + sched.tau, sched.free_duration)[0]
        return um, uf

    def final_state(self, initial):
        """Joint state after one cycle from ``|initial> (x) |Phi>``."""
        psi0 = np.zeros(self.system.dim, dtype=complex)
        psi0[self.system.index(initial)] = 1.0
        state = JointState.product(self.grid, psi0, self.sched.t0)
        state = evolve_measurement(
            state, self.system, self.drive, self.det, self.sched.t0, self.sched.tau, self.propagator
        )
        return evolve_free(
            state, self.system, self.drive, self.sched.t0 + self.sched.tau, self.sched.free_duration, self.propagator
        )

    def jump_probability(self, tr):
        self.system.check_transition(tr)
        final = self.final_state(tr.initial)
        self.norm_drift = max(self.norm_drift, abs(final.norm() - 1.0))
        return float(final.populations()[self.system.index(tr.final)])

    def transition_probabilities(self, initial):
        """Populations of every state after one cycle from ``initial``."""
        final = self.final_state(initial)
        return dict(zip(self.system.states, final.populations()))

    def repeated_cycles(self, initial, n_cycles=None):
        """Survival probability after each of ``N`` cycles.

        The pointer is traced out after every cycle and a fresh ``|Phi>`` is
        attached for the next one, so the system is carried as a density
        matrix.
        """
        n_cycles = self.sched.N if n_cycles is None else int(n_cycles)
        k0 = self.system.index(initial)
        rho = np.zeros((self.system.dim, self.system.dim), dtype=complex)
        rho[k0, k0] = 1.0
        w = self.grid.weights
        out = np.empty(n_cycles)
        for c in range(n_cycles):
            um, uf = self._cycle_unitaries(self.sched.t0 + c * self.sched.T)
            before = np.trace(rho).real
            rho = np.einsum("k,kij,jl,kml->im", w, um, rho, um.conj())
            rho = uf @ rho @ uf.conj().T
            self.norm_drift = max(self.norm_drift, _check_norm(before, np.trace(rho).real, f"cycle {c + 1}"))
            out[c] = rho[k0, k0].real
        return out


def jump_probability_exact(system, drive, det, sched, tr, **options):
    """Exact single-cycle probability of ``tr``; see :class:`Oracle` for options."""
    return Oracle(system, drive, det, sched, **options).jump_probability(tr)


def repeated_cycles(system, drive, det, sched, initial, **options):
    return Oracle(system, drive, det, sched, **options).repeated_cycles(initial)


def fitted_decay_rate(survivals, T):
    """Least-squares slope of ``-log S_N`` against elapsed time ``N T``."""
    survivals = np.asarray(survivals, dtype=float)
    elapsed = T * np.arange(1, survivals.size + 1)
    slope, _ = np.polyfit(elapsed, -np.log(survivals), 1)
    return float(slope)


def write_survival_csv(fh, sequences):
    """Write ``cycle,survival,exact_or_perturbative`` rows.

    ``sequences`` maps a label (``"exact"`` or ``"perturbative"``) to a survival
    sequence.
    """
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["cycle", "survival", "exact_or_perturbative"])
    for label, seq in sequences.items():
        for c, s in enumerate(seq, start=1):
            writer.writerow([c, f"{float(s):.17g}", label])


__all__ = [
    "JointState",
    "Oracle",
    "PointerGrid",
    "Propagator",
    "evolve_free",
    "evolve_measurement",
    "fitted_decay_rate",
    "jump_probability_exact",
    "repeated_cycles",
    "write_survival_csv",
]
