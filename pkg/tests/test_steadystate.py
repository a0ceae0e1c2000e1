import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tripod_eit.atom_model import AtomSpec, DriveConfig, angular, build_liouvillian, vec
from tripod_eit.errors import DegenerateSteadyState, SolveFailure
from tripod_eit.steadystate import (_check_residual, solve_steady_states, steady_state,
                                    steady_state_svd, validate_density)


def two_level(gamma, omega, delta):
    # the idle levels 2 and 3 relax into 1 so the steady state is unique
    atom = AtomSpec(decay={(4, 1): gamma, (2, 1): 1.0, (3, 1): 1.0})
    return build_liouvillian(atom, DriveConfig(omega_p=omega, delta_p=delta))


@pytest.mark.parametrize("omega,delta", [(0.5, 0.0), (3.0, -2.0), (10.0, 7.0)])
def test_two_level_closed_form(omega, delta):
    gamma = 2.0
    rho = steady_state(two_level(gamma, omega, delta))
    excited = (omega**2 / 4) / (delta**2 + gamma**2 / 4 + omega**2 / 2)
    assert rho.population(4) == pytest.approx(excited, rel=1e-12)
    coherence = 1j * omega * (rho.population(1) - rho.population(4)) / (gamma - 2j * delta)
    assert rho.coherence(1, 4) == pytest.approx(coherence, rel=1e-12)


def test_undriven_atom_relaxes_to_lowest_level():
    rho = steady_state(build_liouvillian(AtomSpec.rb87(), DriveConfig()))
    assert np.allclose(rho.matrix, np.diag([1, 0, 0, 0]), atol=1e-14)


def test_bordered_and_svd_agree(atom, reference_drives):
    liou = build_liouvillian(atom, reference_drives)
    assert np.allclose(steady_state(liou).matrix, steady_state_svd(liou).matrix, atol=1e-10)


def test_batched_solve_matches_single(atom, reference_drives):
    dp = angular(np.linspace(-20, 20, 7))
    batch = solve_steady_states(build_liouvillian(atom, reference_drives.replace(delta_p=dp)).matrix)
    for k, x in enumerate(dp):
        single = steady_state(build_liouvillian(atom, reference_drives.replace(delta_p=x)))
        assert np.allclose(batch[k], single.matrix, atol=1e-12)


def test_no_relaxation_is_degenerate():
    liou = build_liouvillian(AtomSpec(), DriveConfig(omega_p=1.0))
    with pytest.raises(DegenerateSteadyState):
        steady_state(liou)
    with pytest.raises(DegenerateSteadyState):
        steady_state_svd(liou)


def test_tripod_without_ground_relaxation_is_degenerate():
    # two dark superpositions of the ground states survive
    atom = AtomSpec(decay={(4, 1): 1.0, (4, 2): 1.0, (4, 3): 1.0})
    liou = build_liouvillian(atom, DriveConfig(omega_p=1.0, omega_c=2.0, omega_s=1.5))
    with pytest.raises(DegenerateSteadyState):
        steady_state(liou)


def test_large_residual_is_reported():
    liou = two_level(1.0, 1.0, 0.0)
    bad = vec(np.diag([0.5, 0, 0, 0.5]).astype(complex))
    with pytest.raises(SolveFailure):
        _check_residual(liou.matrix, bad)


def test_steady_state_requires_single_matrix(atom, reference_drives):
    liou = build_liouvillian(atom, reference_drives.replace(delta_p=np.zeros(3)))
    with pytest.raises(ValueError):
        steady_state(liou)


def test_validate_density_flags_problems():
    good = validate_density(np.diag([0.5, 0.5, 0, 0]))
    assert good.passed
    assert not validate_density(np.diag([0.5, 0.4, 0, 0])).trace_ok
    assert not validate_density(np.diag([1.2, -0.2, 0, 0])).positive_ok
    m = np.diag([0.5, 0.5, 0, 0]).astype(complex)
    m[0, 1] = 0.1
    assert not validate_density(m).hermitian_ok


@settings(max_examples=60, deadline=None)
@given(g4=st.floats(1.0, 200.0), g2=st.floats(1e-3, 5.0), g3=st.floats(1e-3, 5.0),
       op=st.floats(0.0, 100.0), oc=st.floats(0.0, 200.0), os_=st.floats(0.0, 100.0),
       dp=st.floats(-200, 200), dc=st.floats(-200, 200), ds=st.floats(-200, 200))
def test_steady_state_is_physical(g4, g2, g3, op, oc, os_, dp, dc, ds):
    atom = AtomSpec.rb87(gamma4=g4, gamma2=g2, gamma3=g3)
    drives = DriveConfig(omega_p=op, omega_c=oc, omega_s=os_, delta_p=dp, delta_c=dc, delta_s=ds)
    liou = build_liouvillian(atom, drives)
    rho = steady_state(liou)
    assert validate_density(rho).passed
    assert np.abs(liou.apply(rho.matrix)).max() <= 1e-10 * max(1.0, np.abs(liou.matrix).max())
