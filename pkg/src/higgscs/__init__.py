"""Nonlinear coherent states of the 2D harmonic oscillator on flat space and on a sphere."""
from .algebra import (
    SurfaceSpec,
    energy_flat,
    energy_sphere,
    f_flat,
    f_sphere,
    g_deform,
    h_residuals,
    h_su2,
    phi_flat,
    phi_sphere,
)
from .fock import FockVector, OperatorMatrix, build_boson_ladder, build_ladder, build_su2, expectation
from .states import (
    CoherentState,
    QuadratureSpec,
    coherent_flat,
    coherent_sphere,
    deformed_binomial,
    fidelity,
    g_factorial,
    sphere_moment_report,
    verify_identity_flat,
)
from .statistics import mandel, mean_photon, photon_distribution, squeeze_deformed, squeeze_nondeformed

__version__ = "0.1.0"
