"""Photon-number statistics and quadrature squeezing of the coherent states.

Quadratures for a lowering operator ``b`` (either the truncated boson ``a`` or
the deformed ``A``) at phase ``phi``::

    X1 = (b e^{i phi} + b^dag e^{-i phi}) / 2
    X2 = (b e^{i phi} - b^dag e^{-i phi}) / (2i)

Nondeformed index: ``S_ia = 4 Var(X_i) - 1``.
Deformed index: ``S_iA = 4 Var(X_i) - <[A, A^dag]>``, where the commutator
expectation is ``sum_n P(n) (Phi(n+1) - Phi(n))`` with ``Phi(N+1) = 0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import algebra
from .algebra import SurfaceSpec
from .fock import build_boson_ladder, build_ladder, expectation, number_operator
from .states import CoherentState, g_factorial

DEFAULT_PHI_POINTS = 721


class MandelUndefinedError(ValueError):
    """The Mandel parameter has no value when <n> = 0 (the vacuum)."""


@dataclass(frozen=True, eq=False)
class SqueezeCurve:
    phi_grid: np.ndarray
    s1: np.ndarray
    s2: np.ndarray
    kind: str  # "nondeformed" or "deformed"
    var1: np.ndarray
    var2: np.ndarray
    commutator: float  # <[b, b^dag]> from the matrices actually used

    @property
    def min_s1(self) -> float:
        return float(self.s1.min())

    @property
    def min_s2(self) -> float:
        return float(self.s2.min())


@dataclass(frozen=True, eq=False)
class StatsReport:
    pn: np.ndarray
    mean_n: float
    variance_n: float
    mandel_m: float | None  # None for the vacuum
    spec: SurfaceSpec
    mu: complex
    flavor: str
    truncation_weight: float


def default_phi_grid(points: int = DEFAULT_PHI_POINTS) -> np.ndarray:
    if points < 2:
        raise ValueError("need at least two phase points")
    return np.linspace(0.0, 2.0 * np.pi, points)


def photon_distribution(state: CoherentState) -> np.ndarray:
    return np.abs(state.amplitudes) ** 2


def photon_distribution_closed_form(mu: complex, spec: SurfaceSpec, flavor: str) -> np.ndarray:
    """P_f or P_s straight from the printed binomial expressions (no state vector)."""
    N = spec.n_max
    x = abs(complex(mu)) ** 2
    if algebra.check_flavor(flavor) == "flat":
        return np.array([math.comb(N, n) * x**n for n in range(N + 1)]) / (1.0 + x) ** N
    w = np.array([math.comb(N, n) * g_factorial(spec, n) ** 2 * x**n for n in range(N + 1)])
    return w / math.fsum(w)


def _moments(state):
    nop = number_operator(state.spec)
    mean = expectation(state, nop).real
    second = expectation(state, nop @ nop).real
    return mean, max(second - mean * mean, 0.0)


def mean_photon(state: CoherentState) -> float:
    return expectation(state, number_operator(state.spec)).real


def photon_variance(state: CoherentState) -> float:
    return _moments(state)[1]


def mandel(state: CoherentState) -> float:
    """(Var n - <n>) / <n>; negative means sub-Poissonian."""
    mean, var = _moments(state)
    if mean <= 0:
        raise MandelUndefinedError("undefined (vacuum)")
    return (var - mean) / mean


def truncation_weight(state: CoherentState) -> float:
    """(N+1) P(N): the part of <a a^dag> lost by truncating a^dag at |N>."""
    return float((state.spec.n_max + 1) * photon_distribution(state)[-1])


def stats_report(state: CoherentState) -> StatsReport:
    mean, var = _moments(state)
    m = (var - mean) / mean if mean > 0 else None
    return StatsReport(
        pn=photon_distribution(state),
        mean_n=mean,
        variance_n=var,
        mandel_m=m,
        spec=state.spec,
        mu=state.mu,
        flavor=state.flavor,
        truncation_weight=truncation_weight(state),
    )


def deformed_commutator_expectation(state: CoherentState) -> float:
    """<(n+1) f^2(n+1)> - <n f^2(n)> from the structure function table."""
    phi = algebra.structure_table(state.spec, state.flavor)
    return float(np.dot(photon_distribution(state), phi[1:] - phi[:-1]))


def _quadrature_variances(state, b, phi_grid):
    psi = state.amplitudes
    bm = b.entries
    bdag = bm.conj().T
    mean_b = np.vdot(psi, bm @ psi)
    mean_b2 = np.vdot(psi, bm @ (bm @ psi))
    sym = np.vdot(psi, bm @ (bdag @ psi)).real + np.vdot(psi, bdag @ (bm @ psi)).real
    phase = np.exp(1j * np.asarray(phi_grid, dtype=float))
    z = mean_b * phase
    cross = 2.0 * (mean_b2 * phase**2).real
    var1 = 0.25 * (sym + cross) - z.real**2
    var2 = 0.25 * (sym - cross) - z.imag**2
    comm = np.vdot(psi, bm @ (bdag @ psi)).real - np.vdot(psi, bdag @ (bm @ psi)).real
    return var1, var2, float(comm)


def squeeze_nondeformed(state: CoherentState, phi_grid=None) -> SqueezeCurve:
    phi_grid = default_phi_grid() if phi_grid is None else np.asarray(phi_grid, dtype=float)
    a, _ = build_boson_ladder(state.spec)
    var1, var2, comm = _quadrature_variances(state, a, phi_grid)
    return SqueezeCurve(phi_grid, 4.0 * var1 - 1.0, 4.0 * var2 - 1.0, "nondeformed", var1, var2, comm)


def squeeze_deformed(state: CoherentState, phi_grid=None) -> SqueezeCurve:
    phi_grid = default_phi_grid() if phi_grid is None else np.asarray(phi_grid, dtype=float)
    A, _ = build_ladder(state.spec, state.flavor)
    var1, var2, comm_matrix = _quadrature_variances(state, A, phi_grid)
    comm = deformed_commutator_expectation(state)
    return SqueezeCurve(phi_grid, 4.0 * var1 - comm, 4.0 * var2 - comm, "deformed", var1, var2, comm_matrix)


def uncertainty_margin(curve: SqueezeCurve) -> np.ndarray:
    """Var(X1) Var(X2) - |<[X1, X2]>|^2 / 4, which must be >= 0.

    ``[X1, X2] = (i/2) [b, b^dag]`` so the bound equals ``<[b, b^dag]>^2 / 16``.
    For the truncated boson the commutator is ``1 - (N+1) P(N)``, not 1.
    """
    return curve.var1 * curve.var2 - curve.commutator**2 / 16.0
