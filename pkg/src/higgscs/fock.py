"""Dense matrices on the truncated Fock space {|0>, ..., |N>}.

Convention: the deformed annihilator acts as ``A|n> = sqrt(Phi(n)) |n-1>``,
i.e. ``A = a f(n)`` with real non-negative ``f``. The plain boson ``a`` is
truncated, so ``a^dag |N> = 0`` and ``a a^dag`` differs from ``n + 1`` in its
last diagonal entry.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import algebra
from .algebra import SurfaceSpec

HERMITIAN_TOL = 1e-12
# exact products of Phi overflow past this level
LOG_FACTORIAL_THRESHOLD = 150


def _frozen(arr, dtype=complex):
    out = np.array(arr, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class FockVector:
    amplitudes: np.ndarray
    spec: SurfaceSpec

    def __post_init__(self):
        amps = _frozen(self.amplitudes)
        if amps.shape != (self.spec.dim,):
            raise ValueError(f"expected {self.spec.dim} amplitudes, got shape {amps.shape}")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "FockVector":
        nrm = self.norm
        if nrm == 0:
            raise ValueError("cannot normalize the zero vector")
        return FockVector(self.amplitudes / nrm, self.spec)

    @classmethod
    def basis(cls, spec: SurfaceSpec, n: int) -> "FockVector":
        if not 0 <= n <= spec.n_max:
            raise ValueError(f"basis index {n} outside [0, {spec.n_max}]")
        amps = np.zeros(spec.dim, dtype=complex)
        amps[n] = 1.0
        return cls(amps, spec)


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    entries: np.ndarray
    spec: SurfaceSpec
    label: str
    hermitian: bool = False

    def __post_init__(self):
        m = _frozen(self.entries)
        d = self.spec.dim
        if m.shape != (d, d):
            raise ValueError(f"{self.label}: expected shape {(d, d)}, got {m.shape}")
        if self.hermitian and np.max(np.abs(m - m.conj().T), initial=0.0) > HERMITIAN_TOL:
            raise ValueError(f"{self.label} is labeled hermitian but is not")
        object.__setattr__(self, "entries", m)

    @property
    def dag(self) -> "OperatorMatrix":
        return OperatorMatrix(self.entries.conj().T, self.spec, self.label + "^dag", self.hermitian)

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        _same_space(self.spec, other.spec)
        return OperatorMatrix(self.entries @ other.entries, self.spec, f"{self.label}*{other.label}")

    def apply(self, vec: FockVector) -> FockVector:
        _same_space(self.spec, vec.spec)
        return FockVector(self.entries @ vec.amplitudes, self.spec)


def _same_space(s1: SurfaceSpec, s2: SurfaceSpec):
    if s1.dim != s2.dim:
        raise ValueError(f"dimension mismatch: {s1.dim} vs {s2.dim}")


def _lowering(values, label, spec):
    m = np.zeros((spec.dim, spec.dim), dtype=complex)
    idx = np.arange(1, spec.dim)
    m[idx - 1, idx] = values
    return OperatorMatrix(m, spec, label)


def build_ladder(spec: SurfaceSpec, flavor: str):
    """Deformed pair (A, A^dag) with ``A[n-1, n] = sqrt(Phi(n))``."""
    phi = algebra.structure_table(spec, flavor)[1 : spec.dim]
    A = _lowering(np.sqrt(phi), f"A_{flavor}", spec)
    return A, OperatorMatrix(A.entries.conj().T, spec, f"A_{flavor}^dag")


def build_boson_ladder(spec: SurfaceSpec):
    a = _lowering(np.sqrt(np.arange(1, spec.dim, dtype=float)), "a", spec)
    return a, OperatorMatrix(a.entries.conj().T, spec, "a^dag")


def number_operator(spec: SurfaceSpec) -> OperatorMatrix:
    return OperatorMatrix(np.diag(np.arange(spec.dim, dtype=float)), spec, "n", hermitian=True)


def build_su2(spec: SurfaceSpec, flavor: str):
    """(J+, J-, J0) identified with (A^dag, A, n - N/2)."""
    A, Adag = build_ladder(spec, flavor)
    j0 = np.diag(np.arange(spec.dim, dtype=float) - spec.n_max / 2.0)
    return (
        OperatorMatrix(Adag.entries, spec, "J+"),
        OperatorMatrix(A.entries, spec, "J-"),
        OperatorMatrix(j0, spec, "J0", hermitian=True),
    )


def _diagonal(m):
    d = np.diag(m)
    return d if np.array_equal(m, np.diag(d)) else None


def commutator(x: OperatorMatrix, y: OperatorMatrix) -> np.ndarray:
    """[x, y] as a dense array.

    A diagonal operand uses ``[D, M]_ij = (d_i - d_j) M_ij``, which avoids the
    cancellation in ``D M - M D`` when the entries of ``M`` are large.
    """
    _same_space(x.spec, y.spec)
    d = _diagonal(x.entries)
    if d is not None:
        return (d[:, None] - d[None, :]) * y.entries
    d = _diagonal(y.entries)
    if d is not None:
        return -(d[:, None] - d[None, :]) * x.entries
    return x.entries @ y.entries - y.entries @ x.entries


def _amplitudes(state) -> np.ndarray:
    amps = getattr(state, "amplitudes", None)
    if amps is None:
        amps = state.vector.amplitudes
    return amps


def expectation(state, M: OperatorMatrix) -> complex:
    """<psi|M|psi> for a FockVector or CoherentState."""
    psi = _amplitudes(state)
    if psi.shape[0] != M.spec.dim:
        raise ValueError(f"dimension mismatch: state {psi.shape[0]} vs operator {M.spec.dim}")
    val = complex(np.vdot(psi, M.entries @ psi))
    if M.hermitian:
        return complex(val.real, 0.0)
    return val


def log_structure_factorial(spec: SurfaceSpec, flavor: str, n: int) -> float:
    """log of Phi(n) Phi(n-1) ... Phi(1); zero for n = 0."""
    if not 0 <= n <= spec.n_max:
        raise ValueError(f"n={n} outside [0, {spec.n_max}]")
    phi = algebra.structure_table(spec, flavor)[1 : n + 1]
    return math.fsum(np.log(phi))


def structure_factorial(spec: SurfaceSpec, flavor: str, n: int) -> float:
    if n > LOG_FACTORIAL_THRESHOLD:
        return math.exp(log_structure_factorial(spec, flavor, n))
    if not 0 <= n <= spec.n_max:
        raise ValueError(f"n={n} outside [0, {spec.n_max}]")
    return math.prod(algebra.structure_table(spec, flavor)[1 : n + 1].tolist())
