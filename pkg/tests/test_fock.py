import math

import numpy as np
import pytest

from higgscs.algebra import SurfaceSpec, phi_sphere, structure_table
from higgscs.fock import (
    FockVector,
    OperatorMatrix,
    build_boson_ladder,
    build_ladder,
    build_su2,
    commutator,
    expectation,
    log_structure_factorial,
    number_operator,
    structure_factorial,
)
from higgscs.states import coherent_flat

FLAVORS = ["flat", "sphere"]
LAMBDAS = [0.0, 0.05, 0.1, 1.0]


class TestLadder:
    def test_flat_two_level(self):
        A, Adag = build_ladder(SurfaceSpec(0.0, 1), "flat")
        expected = np.array([[0, 1], [0, 0]], dtype=complex)
        np.testing.assert_array_equal(A.entries, expected)
        np.testing.assert_array_equal(Adag.entries, expected.T)

    @pytest.mark.parametrize("flavor", FLAVORS)
    def test_annihilates_ends(self, flavor):
        spec = SurfaceSpec(0.4, 6)
        A, Adag = build_ladder(spec, flavor)
        assert np.all(A.apply(FockVector.basis(spec, 0)).amplitudes == 0)
        assert np.all(Adag.apply(FockVector.basis(spec, 6)).amplitudes == 0)

    def test_sphere_entries_match_structure_function(self):
        spec = SurfaceSpec(1.0, 2)
        A, _ = build_ladder(spec, "sphere")
        for n in (1, 2):
            assert A.entries[n - 1, n] == pytest.approx(math.sqrt(phi_sphere(spec, n)), rel=1e-15)
        assert np.count_nonzero(A.entries) == 2

    def test_adjoint(self):
        A, Adag = build_ladder(SurfaceSpec(0.2, 5), "sphere")
        np.testing.assert_array_equal(Adag.entries, A.entries.conj().T)

    def test_flat_limit_matrices_identical(self):
        for N in (0, 3, 17):
            spec = SurfaceSpec(0.0, N)
            np.testing.assert_array_equal(build_ladder(spec, "sphere")[0].entries, build_ladder(spec, "flat")[0].entries)


class TestBoson:
    def test_two_level(self):
        a, _ = build_boson_ladder(SurfaceSpec(0.0, 1))
        assert a.entries[0, 1] == 1

    def test_number_operator(self):
        a, adag = build_boson_ladder(SurfaceSpec(0.0, 7))
        np.testing.assert_allclose(np.diag((adag @ a).entries).real, np.arange(8), atol=1e-14)

    def test_truncation_artifact(self):
        N = 7
        a, adag = build_boson_ladder(SurfaceSpec(0.0, N))
        prod = (a @ adag).entries
        assert prod[N, N] == 0
        np.testing.assert_allclose(np.diag(prod)[:N].real, np.arange(1, N + 1), atol=1e-14)


@pytest.mark.parametrize("lam", LAMBDAS)
@pytest.mark.parametrize("flavor", FLAVORS)
def test_closed_algebra(lam, flavor):
    for N in range(0, 51, 5):
        spec = SurfaceSpec(lam, N)
        A, Adag = build_ladder(spec, flavor)
        nop = number_operator(spec)
        phi = structure_table(spec, flavor)
        assert np.max(np.abs(commutator(nop, Adag) - Adag.entries), initial=0) < 1e-12
        assert np.max(np.abs(commutator(nop, A) + A.entries), initial=0) < 1e-12
        diff = commutator(A, Adag) - np.diag(phi[1:] - phi[:-1])
        assert np.max(np.abs(diff)) < 1e-10 * max(1.0, phi.max())


class TestSu2:
    @pytest.mark.parametrize("N", range(0, 51))
    def test_flat_relations(self, N):
        jp, jm, j0 = build_su2(SurfaceSpec(0.0, N), "flat")
        assert np.max(np.abs(commutator(jp, jm) - 2 * j0.entries)) < 1e-12
        assert np.max(np.abs(commutator(j0, jp) - jp.entries)) < 1e-12
        assert np.max(np.abs(commutator(j0, jm) + jm.entries)) < 1e-12

    def test_j0_diagonal(self):
        _, _, j0 = build_su2(SurfaceSpec(0.0, 4), "flat")
        np.testing.assert_array_equal(np.diag(j0.entries).real, [-2, -1, 0, 1, 2])

    @pytest.mark.parametrize("lam", [0.05, 0.1, 1.0])
    def test_sphere_bracket_diagonal(self, lam):
        spec = SurfaceSpec(lam, 9)
        jp, jm, _ = build_su2(spec, "sphere")
        n = np.arange(10)
        expected = phi_sphere(spec, n) - phi_sphere(spec, n + 1)
        np.testing.assert_allclose(np.diag(commutator(jp, jm)).real, expected, rtol=1e-12, atol=1e-10)


class TestExpectation:
    def test_basis_states(self):
        spec = SurfaceSpec(0.0, 6)
        nop = number_operator(spec)
        for n in range(7):
            assert expectation(FockVector.basis(spec, n), nop) == n

    def test_flat_cs_mean(self):
        st = coherent_flat(1.0, 10)
        assert expectation(st, number_operator(st.spec)).real == pytest.approx(5.0, abs=1e-10)

    def test_hermitian_real(self):
        spec = SurfaceSpec(0.3, 5)
        st = FockVector(np.exp(1j * np.arange(6)) / math.sqrt(6), spec)
        val = expectation(st, number_operator(spec))
        assert val.imag == 0

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            expectation(FockVector.basis(SurfaceSpec(0.0, 3), 0), number_operator(SurfaceSpec(0.0, 4)))


class TestContainers:
    def test_vector_length_checked(self):
        with pytest.raises(ValueError):
            FockVector(np.ones(3), SurfaceSpec(0.0, 3))

    def test_hermitian_label_checked(self):
        spec = SurfaceSpec(0.0, 1)
        with pytest.raises(ValueError):
            OperatorMatrix(np.array([[0, 1], [0, 0]]), spec, "bad", hermitian=True)

    def test_immutable(self):
        A, _ = build_ladder(SurfaceSpec(0.0, 2), "flat")
        with pytest.raises(ValueError):
            A.entries[0, 1] = 5


@pytest.mark.parametrize("flavor", FLAVORS)
@pytest.mark.parametrize("lam", LAMBDAS)
def test_fock_construction(flavor, lam):
    spec = SurfaceSpec(lam, 15)
    _, Adag = build_ladder(spec, flavor)
    vec = FockVector.basis(spec, 0)
    for n in range(spec.dim):
        np.testing.assert_allclose(vec.amplitudes / math.sqrt(structure_factorial(spec, flavor, n)),
                                   FockVector.basis(spec, n).amplitudes, atol=1e-10)
        vec = Adag.apply(vec)


def test_structure_factorial_log_path():
    spec = SurfaceSpec(0.0, 200)
    # [Phi_f]!_n = n! N! / (N - n)!
    for n in (0, 5, 140, 151, 200):
        exact = math.lgamma(n + 1) + math.lgamma(201) - math.lgamma(201 - n)
        assert log_structure_factorial(spec, "flat", n) == pytest.approx(exact, rel=1e-12)
    assert structure_factorial(spec, "flat", 10) == pytest.approx(math.exp(math.lgamma(11) + math.lgamma(201) - math.lgamma(191)), rel=1e-12)


def test_diagonal_commutator_matches_matmul():
    spec = SurfaceSpec(0.3, 9)
    A, Adag = build_ladder(spec, "sphere")
    nop = number_operator(spec)
    for x, y in ((nop, Adag), (A, nop), (A, Adag)):
        dense = x.entries @ y.entries - y.entries @ x.entries
        np.testing.assert_allclose(commutator(x, y), dense, atol=1e-12)
