"""Finite-dimensional nonlinear coherent states on flat space and on a sphere.

Both families are ``C exp(mu A^dag)|0>`` truncated at ``|N>``:

    flat:    c_n = (1 + |mu|^2)^(-N/2) sqrt(binom(N, n)) mu^n
    sphere:  c_n = C sqrt(binom(N, n)) [g]!_n mu^n

with ``[g]!_n = g(1) g(2) ... g(n)``. Amplitudes are assembled in
log-magnitude + phase so large ``N`` or ``|mu|`` cannot overflow.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import algebra
from .algebra import SurfaceSpec
from .fock import FockVector, build_ladder


class QuadratureError(RuntimeError):
    """Raised when a radial integral fails to converge to the requested tolerance."""


@dataclass(frozen=True, eq=False)
class CoherentState:
    vector: FockVector
    mu: complex
    flavor: str
    spec: SurfaceSpec

    @property
    def amplitudes(self) -> np.ndarray:
        return self.vector.amplitudes


def log_g_factorial(spec: SurfaceSpec, n: int) -> float:
    if not 0 <= n <= spec.n_max:
        raise ValueError(f"n={n} outside [0, {spec.n_max}]")
    if n == 0 or spec.lam == 0:
        return 0.0
    return math.fsum(np.log(algebra.g_deform(spec, np.arange(1, n + 1))))


def g_factorial(spec: SurfaceSpec, n: int) -> float:
    """g(lam, 1) g(lam, 2) ... g(lam, n); the empty product is 1."""
    return math.exp(log_g_factorial(spec, n))


def _log_binom(N, n):
    return math.lgamma(N + 1) - math.lgamma(n + 1) - math.lgamma(N - n + 1)


def deformed_binomial(spec: SurfaceSpec, n: int) -> float:
    """binom(N, n) ([g]!_n)^2, which is binom(N, n) on flat space."""
    if spec.lam == 0:
        return float(math.comb(spec.n_max, n))
    return math.comb(spec.n_max, n) * math.exp(2.0 * log_g_factorial(spec, n))


def deformed_binomial_series(spec: SurfaceSpec, x: float) -> float:
    """sum_n binom_lam(N, n) x^n; reduces to (1 + x)^N on flat space."""
    return math.fsum(deformed_binomial(spec, n) * x**n for n in range(spec.n_max + 1))


def _log_weights(spec: SurfaceSpec, r: float, deformed: bool) -> np.ndarray:
    """log |c_n| before normalization."""
    N = spec.n_max
    out = np.empty(N + 1)
    log_g = 0.0
    g = algebra.g_deform(spec, np.arange(N + 1)) if deformed else None
    for n in range(N + 1):
        if deformed and n > 0:
            log_g += math.log(g[n])
        out[n] = 0.5 * _log_binom(N, n) + log_g + n * math.log(r)
    return out


def _assemble(log_mag, theta):
    n = np.arange(log_mag.size)
    return np.exp(log_mag) * np.exp(1j * theta * n)


def _vacuum(spec):
    return FockVector.basis(spec, 0)


def coherent_flat(mu: complex, N: int) -> CoherentState:
    spec = SurfaceSpec(0.0, N)
    mu = complex(mu)
    if mu == 0:
        return CoherentState(_vacuum(spec), mu, "flat", spec)
    r, theta = cmath.polar(mu)
    log_mag = _log_weights(spec, r, deformed=False) - 0.5 * N * math.log1p(r * r)
    return CoherentState(FockVector(_assemble(log_mag, theta), spec), mu, "flat", spec)


def coherent_sphere(mu: complex, spec: SurfaceSpec) -> CoherentState:
    mu = complex(mu)
    if mu == 0:
        return CoherentState(_vacuum(spec), mu, "sphere", spec)
    r, theta = cmath.polar(mu)
    log_mag = _log_weights(spec, r, deformed=spec.lam != 0)
    top = log_mag.max()
    log_norm = top + 0.5 * math.log(math.fsum(np.exp(2.0 * (log_mag - top))))
    return CoherentState(FockVector(_assemble(log_mag - log_norm, theta), spec), mu, "sphere", spec)


def coherent_state(mu: complex, spec: SurfaceSpec, flavor: str) -> CoherentState:
    if algebra.check_flavor(flavor) == "flat":
        st = coherent_flat(mu, spec.n_max)
        return CoherentState(st.vector, st.mu, "flat", spec)
    return coherent_sphere(mu, spec)


def coherent_by_series(mu: complex, spec: SurfaceSpec, flavor: str) -> FockVector:
    """Normalized exp(mu A^dag)|0>, summing the series term by term.

    The series stops by itself at order N because A^dag kills |N>.
    """
    _, Adag = build_ladder(spec, flavor)
    term = np.zeros(spec.dim, dtype=complex)
    term[0] = 1.0
    total = term.copy()
    for k in range(1, spec.dim):
        term = (complex(mu) / k) * (Adag.entries @ term)
        total = total + term
    return FockVector(total, spec).normalized()


def fidelity(s1, s2) -> float:
    """|<s1|s2>|^2 for normalized states of equal dimension."""
    a, b = s1.amplitudes, s2.amplitudes
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    return float(min(1.0, abs(np.vdot(a, b)) ** 2))


@dataclass(frozen=True)
class QuadratureSpec:
    """Composite Gauss-Legendre rule in ``u = log(1 + |mu|^2)`` on ``[0, u_max]``.

    With ``adaptive`` the panel count doubles until two successive estimates
    agree to ``rtol``; ``max_panels`` bounds the refinement.
    """

    u_max: float = 60.0
    panels: int = 8
    order: int = 16
    rtol: float = 1e-13
    max_panels: int = 4096
    adaptive: bool = True

    def __post_init__(self):
        if self.u_max <= 0 or self.panels < 1 or self.order < 1 or self.rtol <= 0:
            raise ValueError(f"invalid quadrature settings: {self}")


def _radial_integrand(N, n, u):
    # x^n (1+x)^-(N+2) dx with x = e^u - 1
    return np.exp(n * np.log(np.expm1(u)) - (N + 1) * u)


def _composite_gl(N, n, u_max, panels, order):
    nodes, weights = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, u_max, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    u = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    w = (half[:, None] * weights[None, :]).ravel()
    return math.fsum(w * _radial_integrand(N, n, u))


def radial_moment(N: int, n: int, quad: QuadratureSpec = QuadratureSpec()) -> float:
    """Integral of x^n / (1 + x)^(N + 2) over x in [0, inf).

    This is the flat resolution-of-identity moment once the angular integral
    has been done analytically.
    """
    if not 0 <= n <= N:
        raise ValueError(f"n={n} outside [0, {N}]")
    tail = math.exp(-quad.u_max * (N + 1 - n)) / (N + 1 - n)
    panels = quad.panels
    value = _composite_gl(N, n, quad.u_max, panels, quad.order)
    if quad.adaptive:
        while True:
            if panels * 2 > quad.max_panels:
                raise QuadratureError(
                    f"moment n={n}, N={N} did not converge to rtol={quad.rtol} within {quad.max_panels} panels"
                )
            panels *= 2
            refined = _composite_gl(N, n, quad.u_max, panels, quad.order)
            done = abs(refined - value) <= quad.rtol * abs(refined)
            value = refined
            if done:
                break
    if tail > quad.rtol * abs(value):
        raise QuadratureError(f"cutoff u_max={quad.u_max} leaves tail {tail:.3e} for n={n}, N={N}")
    return value


def identity_moments_flat(N: int, quad: QuadratureSpec = QuadratureSpec()) -> np.ndarray:
    return np.array([radial_moment(N, n, quad) for n in range(N + 1)])


def identity_operator_flat(N: int, quad: QuadratureSpec = QuadratureSpec()) -> np.ndarray:
    """(N+1)/pi integral of |mu><mu| / (1+|mu|^2)^2 d^2mu, angular part done exactly.

    The angular integral removes every off-diagonal element, so the result is
    diagonal with entries (N + 1) binom(N, n) * moment_n.
    """
    moments = identity_moments_flat(N, quad)
    binom = np.array([math.comb(N, n) for n in range(N + 1)], dtype=float)
    return np.diag((N + 1) * binom * moments)


def verify_identity_flat(N: int, quad: QuadratureSpec = QuadratureSpec()) -> float:
    """Max-norm distance between the integrated projector sum and the identity."""
    op = identity_operator_flat(N, quad)
    return float(np.max(np.abs(op - np.eye(N + 1))))


def sphere_moment_report(spec: SurfaceSpec) -> dict:
    """Moments any sphere measure must reproduce; nothing is integrated here.

    Columns: ``n``, ``binomial``, ``deformed_binomial`` and ``target_moment`` =
    1 / (pi binom_lam(N, n)). At lam = 0 the targets are the flat ones.
    """
    N = spec.n_max
    n = np.arange(N + 1)
    binom = np.array([math.comb(N, k) for k in n], dtype=float)
    dbinom = np.array([deformed_binomial(spec, k) for k in n])
    return {
        "n": n,
        "binomial": binom,
        "deformed_binomial": dbinom,
        "target_moment": 1.0 / (math.pi * dbinom),
    }
