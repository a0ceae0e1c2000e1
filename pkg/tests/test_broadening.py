import numpy as np
import pytest
from scipy.integrate import quad

from tripod_eit.atom_model import angular
from tripod_eit.broadening import (DopplerSettings, apply_laser_linewidths, doppler_average,
                                   velocity_nodes)
from tripod_eit.errors import QuadratureNotConverged
from tripod_eit.response import channel_drives, chi_values, sweep


def test_no_linewidths_leaves_atom_unchanged(atom, reference_drives):
    assert apply_laser_linewidths(atom, reference_drives) is atom


def test_linewidths_map_to_level_dephasing(atom, reference_drives):
    drives = reference_drives.replace(width_p=0.1, width_c=0.2, width_s=0.3)
    broad = apply_laser_linewidths(atom, drives)
    assert broad.dephasing == pytest.approx({4: 0.1, 2: 0.2, 3: 0.3})
    assert broad.gamma4 == pytest.approx(atom.gamma4 + 0.1)
    assert broad.gamma2 == pytest.approx(atom.gamma2 + 0.2)
    assert broad.gamma3 == pytest.approx(atom.gamma3 + 0.3)


def test_linewidths_raise_first_window_absorption(atom, reference_drives, broadened_drives):
    center = reference_drives.replace(delta_p=0.0)
    bare = chi_values(atom, center, "probe")
    broad = chi_values(atom, broadened_drives.replace(delta_p=0.0), "probe")
    assert broad.imag > bare.imag


def test_sweep_tags_linewidth_broadening(atom, broadened_drives):
    assert sweep(atom, broadened_drives, "probe", [0.0, 1.0]).broadening == "linewidth"


@pytest.mark.parametrize("kwargs", [{"temperature": -1.0}, {"temperature": 300, "nodes": 7},
                                    {"temperature": 300, "nodes": 9},
                                    {"temperature": 300, "rule": "simpson"},
                                    {"temperature": np.inf}])
def test_settings_validation(kwargs):
    with pytest.raises(ValueError):
        DopplerSettings(**kwargs)


def test_thermal_speed():
    s = DopplerSettings(300.0)
    assert s.most_probable_speed == pytest.approx(239.6, rel=1e-3)
    assert s.doppler_width / (2 * np.pi) == pytest.approx(301.3, rel=1e-3)


@pytest.mark.parametrize("rule", ["trapezoid", "gauss-hermite"])
def test_weights_normalised(rule):
    v, w = velocity_nodes(DopplerSettings(300.0, nodes=64, rule=rule))
    assert w.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(v, -v[::-1])


def test_zero_temperature_returns_bare_spectrum(atom, reference_drives):
    grid = angular(np.linspace(-20, 20, 41))
    bare = sweep(atom, reference_drives, "probe", grid)
    cold = doppler_average(atom, reference_drives, "probe", grid, DopplerSettings(0.0))
    assert np.array_equal(cold.values, bare.values)
    assert cold.broadening == "doppler"


def test_vanishing_temperature_limit(atom, reference_drives):
    grid = angular(np.linspace(-20, 20, 41))
    bare = sweep(atom, reference_drives, "probe", grid).values
    cold = doppler_average(atom, reference_drives, "probe", grid, DopplerSettings(1e-12, nodes=64))
    assert np.max(np.abs(cold.values - bare)) < 1e-10


def test_gauss_hermite_agrees_with_trapezoid_when_cold(atom, reference_drives):
    grid = angular(np.linspace(-15, 15, 31))
    gh = doppler_average(atom, reference_drives, "probe", grid,
                         DopplerSettings(0.01, nodes=64, rule="gauss-hermite"))
    tr = doppler_average(atom, reference_drives, "probe", grid, DopplerSettings(0.01, nodes=1024),
                         check=False)
    assert np.max(np.abs(gh.values - tr.values) / np.abs(tr.values)) < 1e-4


def test_sparse_quadrature_is_flagged_at_room_temperature(atom, reference_drives):
    grid = angular(np.linspace(-15, 15, 31))
    with pytest.raises(QuadratureNotConverged):
        doppler_average(atom, reference_drives, "probe", grid,
                        DopplerSettings(300.0, nodes=64, rule="gauss-hermite"))


def test_room_temperature_average_against_adaptive_quadrature(atom, reference_drives):
    settings = DopplerSettings(300.0)
    ku = settings.doppler_width
    grid = angular(np.array([0.0, 9.0, 20.0]))
    averaged = doppler_average(atom, reference_drives, "probe", grid, settings, check=False).values
    for x0, value in zip(grid, averaged):
        def integrand(x, part):
            moved = channel_drives(reference_drives, "probe", np.array([x0])).shifted(ku * x)
            chi = chi_values(atom, moved, "probe")[0]
            return getattr(chi, part) * np.exp(-x**2) / np.sqrt(np.pi)
        features = (x0 - angular(np.array([-9.0, 0.0, 9.0]))) / ku
        kw = dict(points=sorted(np.clip(features, -5, 5)), limit=1000, epsabs=1e-12, epsrel=1e-10)
        ref = quad(integrand, -6, 6, args=("real",), **kw)[0] \
            + 1j * quad(integrand, -6, 6, args=("imag",), **kw)[0]
        assert abs(value - ref) / abs(ref) < 1e-4


def test_doppler_average_independent_of_threads(atom, reference_drives):
    grid = angular(np.linspace(-15, 15, 121))
    s = DopplerSettings(300.0, nodes=512)  # several evaluation blocks
    one = doppler_average(atom, reference_drives, "probe", grid, s, check=False, threads=1)
    two = doppler_average(atom, reference_drives, "probe", grid, s, check=False, threads=3)
    assert np.array_equal(one.values, two.values)


def test_room_temperature_quadrature_converged(broadened_spectrum):
    assert broadened_spectrum.metadata["doubling_change"] <= 1e-3
    assert broadened_spectrum.broadening == "doppler"
