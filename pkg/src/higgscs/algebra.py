"""Spectra, structure functions and deformation functions of the 2D oscillator.

Units are hbar = m = omega = 1. The flat-space oscillator at fixed energy level
``N`` behaves as a one-mode deformed oscillator with structure function
``phi_flat(N, n) = n (N + 1 - n)``; the oscillator on a sphere of curvature
``lam = 1/R**2`` multiplies this by ``g(lam, n)**2``.

All functions accept integer ``n`` or integer numpy arrays and validate
``0 <= n <= N + 1``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

FLAVORS = ("flat", "sphere")


@dataclass(frozen=True)
class SurfaceSpec:
    """Curvature ``lam >= 0`` and top occupation number ``n_max`` (dimension n_max + 1)."""

    lam: float
    n_max: int

    def __post_init__(self):
        lam = float(self.lam)
        if not np.isfinite(lam) or lam < 0:
            raise ValueError(f"curvature must be finite and >= 0, got {self.lam!r}")
        if int(self.n_max) != self.n_max or self.n_max < 0:
            raise ValueError(f"n_max must be a non-negative integer, got {self.n_max!r}")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "n_max", int(self.n_max))

    @property
    def dim(self) -> int:
        return self.n_max + 1

    def flat(self) -> "SurfaceSpec":
        return SurfaceSpec(0.0, self.n_max)


def check_flavor(flavor: str) -> str:
    if flavor not in FLAVORS:
        raise ValueError(f"flavor must be one of {FLAVORS}, got {flavor!r}")
    return flavor


def _check_level(N):
    if int(N) != N or N < 0:
        raise ValueError(f"level N must be a non-negative integer, got {N!r}")
    return int(N)


def _check_n(N, n):
    arr = np.asarray(n)
    if arr.dtype.kind not in "iu" and not np.all(np.equal(np.mod(arr, 1), 0)):
        raise ValueError(f"occupation number must be integer, got {n!r}")
    if np.any(arr < 0) or np.any(arr > N + 1):
        raise ValueError(f"occupation number out of range [0, {N + 1}]: {n!r}")
    return arr


def _root(lam):
    return np.sqrt(1.0 + lam * lam / 4.0)


def energy_flat(N: int) -> float:
    return float(_check_level(N) + 1)


def energy_sphere(N: int, lam: float) -> float:
    N = _check_level(N)
    if lam < 0:
        raise ValueError("negative curvature is not supported")
    return float(_root(lam) * (N + 1) + 0.5 * lam * (N + 1) ** 2)


def phi_flat(N: int, n):
    N = _check_level(N)
    n = _check_n(N, n)
    out = n * (N + 1 - n)
    return float(out) if out.ndim == 0 else out.astype(float)


def g_deform(spec: SurfaceSpec, n):
    """Curvature deformation factor; identically 1 on flat space.

    Symmetric under ``n -> N + 1 - n``.
    """
    N = spec.n_max
    n = _check_n(N, n).astype(float)
    lam = spec.lam
    s = _root(lam)
    out = np.sqrt((lam * (N + 1 - n) + s) * (lam * n + s))
    return float(out) if out.ndim == 0 else out


def phi_sphere(spec: SurfaceSpec, n):
    g = g_deform(spec, n)
    return phi_flat(spec.n_max, n) * g * g


def phi_sphere_product(spec: SurfaceSpec, n):
    """Four-factor product form of the sphere structure function (no shared g code)."""
    N, lam = spec.n_max, spec.lam
    n = _check_n(N, n).astype(float)
    s = _root(lam)
    out = n * (N + 1 - n) * (lam * (N + 1 - n) + s) * (lam * n + s)
    return float(out) if out.ndim == 0 else out


def f_flat(N: int, n):
    N = _check_level(N)
    n = _check_n(N, n)
    out = np.sqrt((N + 1 - n).astype(float))
    return float(out) if out.ndim == 0 else out


def f_sphere(spec: SurfaceSpec, n):
    return f_flat(spec.n_max, n) * g_deform(spec, n)


def structure_function(spec: SurfaceSpec, flavor: str, n):
    """Phi(n) for the requested flavor; flat ignores ``spec.lam``."""
    if check_flavor(flavor) == "flat":
        return phi_flat(spec.n_max, n)
    return phi_sphere(spec, n)


def structure_table(spec: SurfaceSpec, flavor: str) -> np.ndarray:
    """Phi(0), ..., Phi(N + 1) as a float array (both ends are zero)."""
    return np.asarray(structure_function(spec, flavor, np.arange(spec.n_max + 2)), dtype=float)


def h_su2(spec: SurfaceSpec, j0):
    """Deformed su(2) bracket factor, evaluated exactly as printed.

    Note the ``sqrt(1 + lam/4)`` here, unlike the ``sqrt(1 + lam**2/4)`` that
    appears in the spectrum; see :func:`h_residuals` for the consistency gap.
    """
    N, lam = spec.n_max, spec.lam
    j0 = np.asarray(j0, dtype=float)
    out = 1.0 + lam * np.sqrt(1.0 + lam / 4.0) * (N + 1) - lam**2 * (2.0 * j0**2 - N * (N / 2.0 + 1.0) - 0.25)
    return float(out) if out.ndim == 0 else out


def h_residuals(spec: SurfaceSpec) -> np.ndarray:
    """|Phi_s(n) - Phi_s(n+1) - 2 (n - N/2) h(n - N/2)| for n = 0..N."""
    N = spec.n_max
    n = np.arange(N + 1)
    table = structure_table(spec, "sphere")
    exact = table[n] - table[n + 1]
    j0 = n - N / 2.0
    return np.abs(exact - 2.0 * j0 * h_su2(spec, j0))
