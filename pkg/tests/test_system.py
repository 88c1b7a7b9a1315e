import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from zeno.exceptions import InvalidModelError, LookupFailure
from zeno.system import (
    FULL_COSINE,
    Drive,
    LevelSystem,
    Schedule,
    Transition,
    omega_fi,
    omega_full,
    two_level_drive,
    two_level_system,
)


def test_two_level_frequency():
    assert omega_fi(two_level_system(2.5), Transition(0, 0, 1, 0)) == 2.5


def test_omega_fi_subtraction_and_self():
    s = LevelSystem([(0, 1.0), (1, 3.5)])
    assert omega_fi(s, Transition(0, 0, 1, 0)) == 2.5
    assert omega_fi(s, Transition(1, 0, 1, 0)) == 0


def test_omega_full_without_aux_is_bare():
    s = LevelSystem([(0, 1.0), (1, 3.5)])
    assert omega_full(s, Transition(0, 0, 1, 0)) == omega_fi(s, Transition(0, 0, 1, 0))


def test_omega_full_with_aux():
    s = LevelSystem([(0, 0.0), (1, 1.0)], aux=[(0, "a", 0.1), (1, "b", 0.2)])
    tr = Transition(0, "a", 1, "b")
    assert omega_full(s, tr) == pytest.approx(1.1, abs=1e-15)
    assert omega_full(s, tr.reversed()) == -omega_full(s, tr)


def test_unknown_level_and_missing_aux():
    s = LevelSystem([(0, 0.0), (1, 1.0)], aux=[(0, 0, 0.0), (1, 0, 0.0)])
    with pytest.raises(LookupFailure):
        omega_fi(s, Transition(0, 0, 7, 0))
    with pytest.raises(LookupFailure):
        omega_full(s, Transition(0, 0, 1, 5))


levels = st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=5, unique=True)


@given(energies=levels, data=st.data())
def test_omega_full_antisymmetric(energies, data):
    aux = [(n, a, data.draw(st.floats(-10, 10))) for n in range(len(energies)) for a in (0, 1)]
    s = LevelSystem(list(enumerate(energies)), aux)
    i, f = data.draw(st.sampled_from(s.states)), data.draw(st.sampled_from(s.states))
    tr = Transition(*i, *f)
    assert omega_full(s, tr) == -omega_full(s, tr.reversed())


def test_level_system_validation():
    with pytest.raises(InvalidModelError):
        LevelSystem([(0, 0.0), (0, 1.0)])
    with pytest.raises(InvalidModelError):
        LevelSystem([(0, float("inf"))])
    with pytest.raises(InvalidModelError):
        LevelSystem([(0, 0.0)], aux=[(3, 0, 0.0)])


def test_states_follow_aux():
    s = LevelSystem([(0, 0.0), (1, 1.0)], aux=[(1, 0, 0.0), (1, 1, 0.5), (0, 0, 0.0)])
    assert s.states == ((1, 0), (1, 1), (0, 0))
    assert two_level_system(1.0).states == ((0, 0), (1, 0))


def test_drive_hermiticity_filled_and_idempotent():
    d = Drive({(1, 0, 0, 0): 0.3 + 0.4j}, omega_L=2.0)
    assert d.elements[(0, 0, 1, 0)] == 0.3 - 0.4j
    again = Drive(d.elements, 2.0)
    assert again.elements == d.elements
    assert again == d


def test_drive_rejects_non_hermitian():
    with pytest.raises(InvalidModelError, match="Hermitian"):
        Drive({(1, 0, 0, 0): 1.0, (0, 0, 1, 0): 2.0})
    with pytest.raises(InvalidModelError):
        Drive({(0, 0, 0, 0): 1.0})
    with pytest.raises(InvalidModelError):
        Drive({}, omega_L=-1)
    with pytest.raises(InvalidModelError):
        Drive({}, convention="square")


def test_drive_matrix_conventions():
    s = two_level_system(1.0)
    v = 0.2 + 0.1j
    t = 0.37
    rwa = two_level_drive(v, 0.8).matrix(s, t)
    assert rwa[1, 0] == pytest.approx(0.5 * v * np.exp(-0.8j * t))
    assert rwa[0, 1] == pytest.approx(np.conj(rwa[1, 0]))
    full = two_level_drive(v, 0.8, FULL_COSINE).matrix(s, t)
    assert full[1, 0] == pytest.approx(v * np.cos(0.8 * t))
    np.testing.assert_allclose(full, full.conj().T)


def test_channels_out_of_state():
    s = LevelSystem([(0, 0.0), (1, 1.0), (2, 2.0)])
    d = Drive({(2, 0, 0, 0): 1.0, (2, 0, 1, 0): 1.0})
    assert d.channels(s, (0, 0)) == [Transition(0, 0, 2, 0)]
    assert d.channels(s, (2, 0)) == [Transition(2, 0, 0, 0), Transition(2, 0, 1, 0)]


@pytest.mark.parametrize("tau, T, N", [(-0.1, 1.0, 1), (2.0, 1.0, 1), (0.1, 1.0, 0), (0.1, 1.0, 1.5)])
def test_schedule_validation(tau, T, N):
    with pytest.raises(InvalidModelError):
        Schedule(tau, T, N)


def test_schedule_message_names_constraint():
    with pytest.raises(InvalidModelError, match="tau <= T"):
        Schedule(2.0, 1.0)


def test_transition_must_move():
    s = two_level_system(1.0)
    with pytest.raises(InvalidModelError):
        s.check_transition(Transition(0, 0, 0, 0))
