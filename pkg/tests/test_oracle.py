import io
import math

import numpy as np
import pytest

from zeno.detector import DetectorModel
from zeno.exceptions import InvalidModelError
from zeno.oracle import (
    JointState,
    Oracle,
    PointerGrid,
    Propagator,
    evolve_free,
    evolve_measurement,
    fitted_decay_rate,
    jump_probability_exact,
    repeated_cycles,
    write_survival_csv,
)
from zeno.perturbation import decay_rate, jump_probability, total_jump
from zeno.system import FULL_COSINE, Drive, LevelSystem, Schedule, Transition, two_level_drive, two_level_system

UP = Transition(0, 0, 1, 0)
S = two_level_system(1.0)

# oracle at (omega=1, delta=0, |v|=1e-3, T=0.1, tau=0.01, sigma=1, lam=1e3), frozen
FROZEN_EXACT = 2.087165705397315e-09


def ground():
    rho = np.zeros((2, 2), dtype=complex)
    rho[0, 0] = 1
    return rho


def test_pointer_grid_is_normalised_and_reproduces_F():
    grid = PointerGrid.gaussian(1.0)
    assert grid.weights.sum() == pytest.approx(1.0, rel=1e-15)
    assert grid.characteristic(1.3) == pytest.approx(math.exp(-0.5 * 1.3**2), abs=1e-12)


def test_grid_grows_with_pointer_phase():
    det = DetectorModel.gaussian(1.0, 1e4)
    small = PointerGrid.for_detector(det, 1.0)
    big = PointerGrid.for_detector(det, 1e4)
    assert small.n_points == 1024
    assert big.n_points > 1024
    # no alias of F out to the largest phase reached
    assert abs(big.characteristic(1e4)) < 1e-12


def test_tabulated_pointer_rejected():
    det = DetectorModel.tabulated([-1, -1, 1, 1], [0, 1, 1, 0], lam=1.0)
    with pytest.raises(InvalidModelError, match="Gaussian"):
        Oracle(S, two_level_drive(0.01, 1.0), det, Schedule(0.1, 1.0))


def test_measurement_without_drive_keeps_magnitudes():
    grid = PointerGrid.gaussian(1.0, 65)
    state = JointState.product(grid, np.array([0.6, 0.8j]))
    out = evolve_measurement(state, S, two_level_drive(0.0, 1.0), DetectorModel.gaussian(1.0, 50.0), 0.0, 0.7)
    np.testing.assert_allclose(np.abs(out.psi), np.abs(state.psi), atol=1e-14)


def test_free_evolution_zero_duration_is_identity():
    rho = np.array([[0.3, 0.1 + 0.2j], [0.1 - 0.2j, 0.7]])
    out = evolve_free(rho, S, two_level_drive(0.1, 0.9), 0.4, 0.0)
    np.testing.assert_array_equal(out, rho)


def test_free_evolution_without_drive_keeps_populations():
    rho = np.diag([0.25, 0.75]).astype(complex)
    out = evolve_free(rho, S, two_level_drive(0.0, 1.0), 0.0, 3.0)
    np.testing.assert_allclose(np.diag(out).real, [0.25, 0.75], atol=1e-14)


@pytest.mark.parametrize("method", ["rotating", "stepper"])
@pytest.mark.parametrize("delta", [0.0, 0.03])
def test_rabi_formula(method, delta):
    v, t = 0.05, 40.0
    drive = two_level_drive(v, 1.0 - delta)
    prop = Propagator(S, drive, method=method)
    out = evolve_free(ground(), S, drive, 0.0, t, prop)
    rabi = math.hypot(v, delta)
    expected = (v / rabi) ** 2 * math.sin(rabi * t / 2) ** 2
    assert out[1, 1].real == pytest.approx(expected, abs=1e-8)


def test_rabi_is_independent_of_start_time_under_rwa():
    drive = two_level_drive(0.05, 1.0)
    a = evolve_free(ground(), S, drive, 0.0, 10.0)
    b = evolve_free(ground(), S, drive, 2.7, 10.0)
    assert a[1, 1].real == pytest.approx(b[1, 1].real, abs=1e-13)


def test_full_cosine_depends_on_start_time():
    drive = two_level_drive(0.3, 1.0, FULL_COSINE)
    a = evolve_free(ground(), S, drive, 0.0, 2.0)
    b = evolve_free(ground(), S, drive, 1.0, 2.0)
    assert abs(a[1, 1] - b[1, 1]) > 1e-4


def test_segment_unitarity():
    drive = two_level_drive(0.02 + 0.01j, 0.9)
    det = DetectorModel.gaussian(1.0, 1e3)
    for method in ("rotating", "stepper"):
        prop = Propagator(S, drive, method=method)
        grid = PointerGrid.gaussian(1.0, 33)
        u = prop.segment(prop.diagonal(det.lam * grid.q), 0.3, 0.01)
        eye = np.eye(2)
        err = np.abs(np.einsum("bij,bkj->bik", u, u.conj()) - eye).max()
        assert err < 1e-10


def test_stepper_matches_rotating_frame():
    drive = two_level_drive(0.02, 0.9)
    det = DetectorModel.gaussian(1.0, 100.0)
    sched = Schedule(0.05, 0.5)
    a = jump_probability_exact(S, drive, det, sched, UP, method="rotating")
    b = jump_probability_exact(S, drive, det, sched, UP, method="stepper")
    assert b == pytest.approx(a, rel=1e-9)


def test_triangle_coupling_needs_stepper():
    system = LevelSystem([(0, 0.0), (1, 1.0), (2, 1.5)])
    drive = Drive({(1, 0, 0, 0): 0.01, (2, 0, 1, 0): 0.01, (2, 0, 0, 0): 0.01}, omega_L=1.0)
    assert Propagator(system, drive).method == "stepper"
    with pytest.raises(InvalidModelError):
        Propagator(system, drive, method="rotating")


def test_zero_drive_gives_zero_jump():
    p = jump_probability_exact(S, two_level_drive(0.0, 1.0), DetectorModel.gaussian(1.0, 1e3), Schedule(0.1, 1.0), UP)
    assert p == 0.0


def test_no_coupling_is_free_evolution_over_the_period():
    drive = two_level_drive(0.05, 0.97)
    p = jump_probability_exact(S, drive, DetectorModel.gaussian(1.0, 0.0), Schedule(0.6, 2.0), UP)
    free = evolve_free(ground(), S, drive, 0.0, 2.0)[1, 1].real
    assert p == pytest.approx(free, rel=1e-12)


def test_frozen_regression_value():
    drive = two_level_drive(1e-3, 1.0)
    det = DetectorModel.gaussian(1.0, 1e3)
    sched = Schedule(0.01, 0.1)
    exact = jump_probability_exact(S, drive, det, sched, UP)
    assert exact == pytest.approx(FROZEN_EXACT, rel=1e-10)
    pert = jump_probability(S, drive, sched, det, UP).w_total
    assert pert == pytest.approx(exact, rel=1e-6)


def test_grid_doubling():
    drive = two_level_drive(0.02, 0.9)
    det = DetectorModel.gaussian(1.0, 1e3)
    sched = Schedule(0.05, 1.0)
    base = Oracle(S, drive, det, sched)
    fine = Oracle(S, drive, det, sched, n_points=2 * base.grid.n_points)
    a, b = base.jump_probability(UP), fine.jump_probability(UP)
    assert abs(a - b) / a < 1e-8


def test_step_halving():
    drive = two_level_drive(0.02, 0.9)
    det = DetectorModel.gaussian(1.0, 30.0)
    sched = Schedule(0.1, 0.5)
    coarse = jump_probability_exact(S, drive, det, sched, UP, method="stepper", max_step=2e-3)
    fine = jump_probability_exact(S, drive, det, sched, UP, method="stepper", max_step=1e-3)
    assert abs(coarse - fine) / fine < 1e-9


def test_full_cosine_close_to_rwa_far_from_resonance_scale():
    # delta = 0, omega / |v| = 1e3; counter-rotating corrections fall off like 1 / (omega T)
    det = DetectorModel.gaussian(1.0, 0.1)
    sched = Schedule(2.0, 200.0)
    rwa = jump_probability_exact(S, two_level_drive(1e-3, 1.0), det, sched, UP)
    full = jump_probability_exact(S, two_level_drive(1e-3, 1.0, FULL_COSINE), det, sched, UP)
    assert abs(full - rwa) / rwa < 0.01


def test_probabilities_sum_to_one():
    system = LevelSystem([(0, 0.0), (1, 1.0), (2, 2.3)])
    drive = Drive({(1, 0, 0, 0): 0.02, (2, 0, 0, 0): 0.03j}, omega_L=1.1)
    oracle = Oracle(system, drive, DetectorModel.gaussian(1.0, 300.0), Schedule(0.05, 1.0))
    probs = oracle.transition_probabilities((0, 0))
    assert sum(probs.values()) == pytest.approx(1.0, abs=1e-12)
    pert = total_jump(system, drive, Schedule(0.05, 1.0), DetectorModel.gaussian(1.0, 300.0), (0, 0))
    assert 1 - probs[(0, 0)] == pytest.approx(pert.w_total, rel=1e-3)


def test_single_cycle_survival_matches_jump():
    drive = two_level_drive(0.02, 0.95)
    det = DetectorModel.gaussian(1.0, 1e3)
    sched = Schedule(0.02, 1.0, N=1)
    surv = repeated_cycles(S, drive, det, sched, (0, 0))
    assert surv.shape == (1,)
    assert surv[0] == pytest.approx(1 - jump_probability_exact(S, drive, det, sched, UP), abs=1e-14)


def test_no_drive_survives_every_cycle():
    surv = repeated_cycles(S, two_level_drive(0.0, 1.0), DetectorModel.gaussian(1.0, 10.0), Schedule(0.1, 1.0, N=5), (0, 0))
    np.testing.assert_allclose(surv, np.ones(5), rtol=0, atol=1e-14)


def test_repeated_cycles_rate():
    drive = two_level_drive(0.02, 1.0)
    det = DetectorModel.gaussian(1.0, 1e4)
    sched = Schedule(0.01, 1.0, N=20)
    oracle = Oracle(S, drive, det, sched)
    surv = oracle.repeated_cycles((0, 0))
    assert oracle.norm_drift < 1e-10
    assert np.all(np.diff(surv) < 0)
    rate = fitted_decay_rate(surv, sched.T)
    assert rate == pytest.approx(decay_rate(S, drive, sched, det, (0, 0)), rel=0.02)


def test_survival_csv():
    buf = io.StringIO()
    write_survival_csv(buf, {"exact": [0.9, 0.81], "perturbative": [0.9]})
    assert buf.getvalue().splitlines() == [
        "cycle,survival,exact_or_perturbative",
        "1,0.90000000000000002,exact",
        "2,0.81000000000000005,exact",
        "1,0.90000000000000002,perturbative",
    ]


def test_aux_shift_phase_uses_full_frequency_pointer_uses_bare():
    # H1 moves the resonance to omega_full = 1.3 while the pointer still sees omega_fi = 1
    system = LevelSystem([(0, 0.0), (1, 1.0)], aux=[(0, 0, 0.0), (1, 0, 0.3)])
    drive = Drive({(1, 0, 0, 0): 0.01}, omega_L=1.25)
    det = DetectorModel.gaussian(1.0, 300.0)
    sched = Schedule(0.05, 1.0)
    exact = jump_probability_exact(system, drive, det, sched, UP)
    pert = jump_probability(system, drive, sched, det, UP).w_total
    assert pert == pytest.approx(exact, rel=1e-3)
