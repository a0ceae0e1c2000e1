import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tripod_eit.atom_model import (AtomSpec, DriveConfig, angular, build_hamiltonian,
                                   build_liouvillian, dissipator, hamiltonian_superoperator,
                                   ordinary, unvec, vec)

rates = st.floats(0.0, 50.0, allow_nan=False)
detuning = st.floats(-200.0, 200.0, allow_nan=False)


def random_hermitian(rng, n=4):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return a + a.conj().T


def test_angular_round_trip():
    assert angular(1.0) == pytest.approx(2 * np.pi)
    assert ordinary(angular(18.0)) == pytest.approx(18.0)


def test_vec_matches_kron_identity():
    rng = np.random.default_rng(0)
    a, b, rho = (random_hermitian(rng) for _ in range(3))
    assert np.allclose(vec(a @ rho @ b), np.kron(b.T, a) @ vec(rho))
    assert np.array_equal(unvec(vec(rho)), rho)


def test_default_rates():
    atom = AtomSpec.rb87()
    assert atom.gamma4 == pytest.approx(angular(18.0))
    assert atom.gamma2 == pytest.approx(angular(0.04))
    assert atom.gamma3 == pytest.approx(angular(0.01))
    assert atom.hierarchy_ok()
    assert atom.calibration_rate() == pytest.approx(atom.gamma4)


def test_dephasing_counted_once_in_total_rate():
    atom = AtomSpec.rb87().with_dephasing({4: 1.0, 2: 0.5})
    assert atom.gamma4 == pytest.approx(angular(18.0) + 1.0)
    assert atom.gamma2 == pytest.approx(angular(0.04) + 0.5)
    # radiative calibration is unaffected by extra dephasing
    assert atom.calibration_rate() == pytest.approx(angular(18.0))


@pytest.mark.parametrize("decay", [{(4, 1): -1.0}, {(1, 4): 1.0}, {(4, 4): 1.0}])
def test_invalid_decay_rejected(decay):
    with pytest.raises(ValueError):
        AtomSpec(decay=decay)


def test_invalid_branching_rejected():
    with pytest.raises(ValueError):
        AtomSpec.rb87(branching=(0.5, 0.5, 0.5))


@pytest.mark.parametrize("field", ["omega_p", "omega_c", "omega_s", "width_p"])
@pytest.mark.parametrize("value", [-1.0, np.nan, np.inf])
def test_drive_validation(field, value):
    with pytest.raises(ValueError):
        DriveConfig(**{field: value})


def test_hamiltonian_zero_fields():
    d = DriveConfig(delta_p=3.0, delta_c=1.0, delta_s=-2.0)
    h = build_hamiltonian(AtomSpec.rb87(), d)
    assert np.array_equal(h, np.diag([0, 2.0, 5.0, 3.0]).astype(complex))


def test_hamiltonian_couplings_and_hermiticity():
    d = DriveConfig(omega_p=1.0, omega_c=2.0, omega_s=3.0, delta_p=0.7)
    h = build_hamiltonian(AtomSpec.rb87(), d)
    assert np.allclose(h, h.conj().T)
    assert h[3, 0] == 0.5 and h[3, 1] == 1.0 and h[3, 2] == 1.5
    assert h[0, 1] == 0 and h[1, 2] == 0


def test_shifted_preserves_two_photon_detunings():
    d = DriveConfig(delta_p=1.0, delta_c=-2.0, delta_s=4.0)
    s = d.shifted(0.3)
    assert s.delta_p == pytest.approx(0.7)
    assert (s.delta_pc, s.delta_ps, s.delta_sc) == pytest.approx((d.delta_pc, d.delta_ps, d.delta_sc))


def test_batched_liouvillian_matches_pointwise():
    atom = AtomSpec.rb87()
    dp = np.array([[-3.0], [0.0], [5.0]])
    dc = np.array([[0.1, -0.4]])
    d = DriveConfig(omega_p=2.0, omega_c=20.0, omega_s=5.0, delta_p=dp, delta_c=dc, delta_s=1.5)
    batch = build_liouvillian(atom, d).matrix
    assert batch.shape == (3, 2, 16, 16)
    for i in range(3):
        for j in range(2):
            single = build_liouvillian(atom, d.replace(delta_p=float(dp[i, 0]),
                                                       delta_c=float(dc[0, j]))).matrix
            assert np.array_equal(batch[i, j], single)


def test_two_level_decay_of_coherence_and_population():
    atom = AtomSpec(decay={(4, 1): 3.0})
    rho = np.zeros((4, 4), complex)
    rho[3, 3] = 0.4
    rho[0, 0] = 0.6
    rho[0, 3] = rho[3, 0] = 0.2
    drho = unvec(dissipator(atom) @ vec(rho))
    assert drho[3, 3] == pytest.approx(-3.0 * 0.4)
    assert drho[0, 0] == pytest.approx(3.0 * 0.4)
    assert drho[0, 3] == pytest.approx(-1.5 * 0.2)


def test_commutator_superoperator():
    rng = np.random.default_rng(1)
    h, rho = random_hermitian(rng), random_hermitian(rng)
    expected = -1j * (h @ rho - rho @ h)
    assert np.allclose(unvec(hamiltonian_superoperator(h) @ vec(rho)), expected)


@settings(max_examples=100, deadline=None)
@given(g4=st.floats(0.1, 200.0), g2=rates, g3=rates, phi=rates,
       op=rates, oc=rates, os_=rates, dp=detuning, dc=detuning, ds=detuning,
       seed=st.integers(0, 2**32 - 1))
def test_liouvillian_is_trace_preserving(g4, g2, g3, phi, op, oc, os_, dp, dc, ds, seed):
    atom = AtomSpec.rb87(gamma4=g4, gamma2=g2, gamma3=g3).with_dephasing({3: phi})
    drives = DriveConfig(omega_p=op, omega_c=oc, omega_s=os_, delta_p=dp, delta_c=dc, delta_s=ds)
    liou = build_liouvillian(atom, drives)
    rho = random_hermitian(np.random.default_rng(seed))
    drho = liou.apply(rho)
    scale = max(1.0, np.abs(liou.matrix).max()) * np.abs(rho).max()
    assert abs(np.trace(drho)) <= 1e-12 * scale
    assert np.allclose(drho, drho.conj().T, atol=1e-12 * scale)
