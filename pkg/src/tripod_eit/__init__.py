"""Double-double electromagnetically induced transparency in a tripod atom.

Steady-state Lindblad solutions, closed-form linear susceptibilities, dressed
channel decomposition, laser-linewidth and Doppler broadening, transparency
window analysis and probe/signal group-velocity matching.
"""

from .analysis import MatchResult, WindowReport, find_windows, match_velocities
from .atom_model import AtomSpec, DriveConfig, Liouvillian, angular, build_liouvillian, ordinary
from .broadening import DopplerSettings, apply_laser_linewidths, doppler_average
from .config import RunConfig, load_config
from .dressed import DressedFrame, dressed_components, dressed_frame, transform_density
from .errors import TripodError
from .response import (LinearResponse, Spectrum, chi_numeric, group_velocity,
                       probe_chi_analytic, signal_chi_analytic, sweep, zeroth_order_state)
from .steadystate import DensityMatrix, steady_state, validate_density

__all__ = [
    "MatchResult", "WindowReport", "find_windows", "match_velocities",
    "RunConfig", "load_config",
    "AtomSpec", "DriveConfig", "Liouvillian", "angular", "build_liouvillian", "ordinary",
    "DopplerSettings", "apply_laser_linewidths", "doppler_average",
    "DressedFrame", "dressed_components", "dressed_frame", "transform_density",
    "TripodError", "LinearResponse", "Spectrum", "chi_numeric", "group_velocity",
    "probe_chi_analytic", "signal_chi_analytic", "sweep", "zeroth_order_state",
    "DensityMatrix", "steady_state", "validate_density",
]
