import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from orthoclone.errors import InvalidArgumentError
from orthoclone.qstate import (
    DensityMatrix,
    Ket,
    Spectrum,
    Unitary,
    apply_unitary,
    basis_ket,
    diagonal_state,
    fidelity,
    make_orthogonal_pair,
    matrix_from_json,
    matrix_to_json,
    maximally_mixed,
    partial_trace,
    pure_state,
    spectrum,
    tensor,
    trace_distance,
    von_neumann_entropy,
)

from conftest import random_density, random_unitary

seeds = st.integers(min_value=0, max_value=2**32 - 1)
dims = st.sampled_from([2, 3, 4])


def brute_partial_trace_first(m, da, db):
    """Tr_B by an explicit sum over the basis of B."""
    out = np.zeros((da, da), dtype=complex)
    for i in range(da):
        for j in range(da):
            out[i, j] = sum(m[i * db + k, j * db + k] for k in range(db))
    return out


def oracle_spectrum(m):
    # general (non-Hermitian) eigensolver, independent of eigvalsh
    return np.sort(scipy.linalg.eigvals(m).real)[::-1]


class TestOrthogonalPair:
    def test_example_values(self):
        pair = make_orthogonal_pair(0.7, 0.6)
        np.testing.assert_allclose(pair.rho0.entries, np.diag([0.7, 0, 0.3, 0]), atol=1e-15)
        np.testing.assert_allclose(pair.rho1.entries, np.diag([0, 0.6, 0, 0.4]), atol=1e-15)
        assert pair.q == pytest.approx(0.3) and pair.s == pytest.approx(0.4)
        assert np.max(np.abs(pair.rho0.entries @ pair.rho1.entries)) == 0

    def test_pure_case(self):
        pair = make_orthogonal_pair(1, 1)
        np.testing.assert_array_equal(pair.rho0.entries, pure_state(basis_ket(0, 4)).entries)
        np.testing.assert_array_equal(pair.rho1.entries, pure_state(basis_ket(1, 4)).entries)

    def test_symmetric_case(self):
        pair = make_orthogonal_pair(0.5, 0.5)
        assert spectrum(pair.rho0).nonzero() == (0.5, 0.5)
        assert spectrum(pair.rho1).nonzero() == (0.5, 0.5)

    @pytest.mark.parametrize("p,r", [(-0.1, 0.5), (1.2, 0.5), (0.5, 1.0001), (0.5, float("nan"))])
    def test_out_of_range(self, p, r):
        with pytest.raises(InvalidArgumentError):
            make_orthogonal_pair(p, r)

    def test_state_index(self):
        with pytest.raises(InvalidArgumentError):
            make_orthogonal_pair(0.5, 0.5).state(2)


class TestTypes:
    def test_rejects_non_hermitian(self):
        with pytest.raises(InvalidArgumentError):
            DensityMatrix(np.array([[0.5, 0.1], [0.0, 0.5]]))

    def test_rejects_bad_trace(self):
        with pytest.raises(InvalidArgumentError):
            DensityMatrix(np.diag([0.5, 0.6]))

    def test_rejects_negative(self):
        with pytest.raises(InvalidArgumentError):
            DensityMatrix(np.diag([1.1, -0.1]))

    def test_rejects_bad_subsystem_dims(self):
        with pytest.raises(InvalidArgumentError):
            DensityMatrix(np.eye(4) / 4, (3, 2))

    def test_entries_read_only(self):
        rho = maximally_mixed(2)
        with pytest.raises(ValueError):
            rho.entries[0, 0] = 1.0

    def test_ket(self):
        assert Ket(np.array([0.6, 0.8j])).dim == 2
        with pytest.raises(InvalidArgumentError):
            Ket(np.array([1.0, 1.0]))

    def test_unitary_check(self):
        with pytest.raises(InvalidArgumentError):
            Unitary(np.array([[1.0, 1.0], [0.0, 1.0]]))

    def test_spectrum_clipping(self):
        s = Spectrum((0.5, -5e-11, 0.5))
        assert s.values == (0.5, 0.5, 0.0)
        with pytest.raises(InvalidArgumentError):
            Spectrum((1.1, -0.1))

    def test_json_round_trip(self, rng):
        rho = random_density(rng, 3)
        back = matrix_from_json(matrix_to_json(rho.entries))
        np.testing.assert_array_equal(back, rho.entries)
        assert rho.to_json()["entries"][0][1] == [rho.entries[0, 1].real, rho.entries[0, 1].imag]


class TestTensorAndPartialTrace:
    def test_two_copies_weights(self):
        rho0 = make_orthogonal_pair(0.7, 0.6).rho0
        t = tensor(rho0, rho0)
        assert t.dim == 16 and t.subsystem_dims == (4, 4)
        diag = np.diag(t.entries).real
        support = sorted(diag[diag > 0], reverse=True)
        np.testing.assert_allclose(support, [0.49, 0.21, 0.21, 0.09], atol=1e-15)
        np.testing.assert_allclose(oracle_spectrum(t.entries)[:4], [0.49, 0.21, 0.21, 0.09], atol=1e-12)

    def test_round_trip_with_pure_blank(self, rng):
        rho = random_density(rng, 4)
        back = partial_trace(tensor(rho, pure_state(basis_ket(0, 4))), {0})
        np.testing.assert_allclose(back.entries, rho.entries, atol=1e-12)

    def test_pure_times_pure_is_pure(self):
        t = tensor(pure_state(basis_ket(1, 2)), pure_state(Ket(np.array([0.6, 0.8]))))
        assert np.linalg.matrix_rank(t.entries) == 1

    def test_product_marginals(self, rng):
        a, b = random_density(rng, 2), random_density(rng, 3)
        ab = tensor(a, b)
        np.testing.assert_allclose(partial_trace(ab, {0}).entries, a.entries, atol=1e-12)
        np.testing.assert_allclose(partial_trace(ab, {1}).entries, b.entries, atol=1e-12)
        assert partial_trace(ab, {0, 1}).subsystem_dims == (2, 3)

    def test_correlated_marginal(self):
        m = np.zeros((4, 4))
        m[0, 0] = m[3, 3] = 0.5
        rho = DensityMatrix(m, (2, 2))
        np.testing.assert_allclose(partial_trace(rho, {0}).entries, brute_partial_trace_first(m, 2, 2))
        np.testing.assert_allclose(partial_trace(rho, {0}).entries, np.diag([0.5, 0.5]))

    def test_against_brute_force(self, rng):
        rho = random_density(rng, 12)
        rho = DensityMatrix(rho.entries, (3, 4))
        np.testing.assert_allclose(
            partial_trace(rho, [0]).entries, brute_partial_trace_first(rho.entries, 3, 4), atol=1e-14
        )

    def test_three_factors(self, rng):
        a, b, c = (random_density(rng, d) for d in (2, 3, 2))
        abc = tensor(tensor(a, b), c)
        np.testing.assert_allclose(partial_trace(abc, {1}).entries, b.entries, atol=1e-12)
        np.testing.assert_allclose(partial_trace(abc, {0, 2}).entries, tensor(a, c).entries, atol=1e-12)

    @pytest.mark.parametrize("keep", [set(), {2}, {-1}])
    def test_bad_keep(self, keep):
        with pytest.raises(InvalidArgumentError):
            partial_trace(DensityMatrix(np.eye(4) / 4, (2, 2)), keep)


class TestSpectrumAndMeasures:
    def test_diagonal(self):
        assert spectrum(diagonal_state([0.7, 0, 0.3, 0])).values == (0.7, 0.3, 0.0, 0.0)

    def test_two_copies(self):
        rho0 = make_orthogonal_pair(0.7, 0.6).rho0
        expected = np.array([0.49, 0.21, 0.21, 0.09] + [0] * 12)
        np.testing.assert_allclose(spectrum(tensor(rho0, rho0)).as_array(), expected, atol=1e-12)

    def test_entropy_examples(self):
        assert von_neumann_entropy(pure_state(basis_ket(2, 4))) == 0.0
        assert von_neumann_entropy(diagonal_state([0.5, 0.5])) == pytest.approx(1.0, abs=1e-15)
        binary = -0.7 * np.log2(0.7) - 0.3 * np.log2(0.3)
        assert von_neumann_entropy(diagonal_state([0.7, 0, 0.3, 0])) == pytest.approx(binary, abs=1e-12)
        assert binary == pytest.approx(0.8813, abs=5e-5)

    def test_fidelity_examples(self):
        pair = make_orthogonal_pair(0.7, 0.6)
        assert fidelity(pair.rho0, pair.rho0) == pytest.approx(1.0, abs=1e-12)
        assert fidelity(pair.rho0, pair.rho1) == 0.0
        a, b = diagonal_state([0.7, 0.3]), diagonal_state([0.6, 0.4])
        closed_form = (np.sqrt(0.7 * 0.6) + np.sqrt(0.3 * 0.4)) ** 2
        sa = scipy.linalg.sqrtm(a.entries)
        oracle = np.trace(scipy.linalg.sqrtm(sa @ b.entries @ sa)).real ** 2
        assert closed_form == pytest.approx(oracle, abs=1e-12)
        assert fidelity(a, b) == pytest.approx(closed_form, abs=1e-12)
        assert closed_form == pytest.approx(0.98900, abs=5e-6)

    def test_fidelity_general_against_sqrtm(self, rng):
        for _ in range(20):
            a, b = random_density(rng, 4), random_density(rng, 4)
            sa = scipy.linalg.sqrtm(a.entries)
            oracle = np.trace(scipy.linalg.sqrtm(sa @ b.entries @ sa)).real ** 2
            assert fidelity(a, b) == pytest.approx(oracle, abs=1e-9)

    def test_trace_distance_examples(self):
        pair = make_orthogonal_pair(0.7, 0.6)
        assert trace_distance(pair.rho0, pair.rho0) == 0.0
        assert trace_distance(pair.rho0, pair.rho1) == pytest.approx(1.0, abs=1e-15)
        assert trace_distance(diagonal_state([0.7, 0.3]), diagonal_state([0.6, 0.4])) == pytest.approx(
            0.5 * (abs(0.7 - 0.6) + abs(0.3 - 0.4)), abs=1e-15
        )

    def test_dim_mismatch(self):
        with pytest.raises(InvalidArgumentError):
            fidelity(maximally_mixed(2), maximally_mixed(4))
        with pytest.raises(InvalidArgumentError):
            trace_distance(maximally_mixed(2), maximally_mixed(4))
        with pytest.raises(InvalidArgumentError):
            apply_unitary(Unitary(np.eye(2)), maximally_mixed(4))


class TestApplyUnitary:
    def test_identity(self, rng):
        rho = random_density(rng, 4)
        np.testing.assert_allclose(apply_unitary(Unitary(np.eye(4)), rho).entries, rho.entries)

    def test_cnot_example(self):
        cnot = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
        one, zero = pure_state(basis_ket(1, 2)), pure_state(basis_ket(0, 2))
        out = apply_unitary(Unitary(cnot), tensor(one, zero))
        np.testing.assert_array_equal(out.entries, tensor(one, one).entries)
        assert out.subsystem_dims == (2, 2)

    def test_spectrum_invariance_many(self, rng):
        rho = random_density(rng, 4)
        ref = spectrum(rho).as_array()
        for _ in range(100):
            out = apply_unitary(random_unitary(rng, 4), rho)
            np.testing.assert_allclose(spectrum(out).as_array(), ref, atol=1e-9)


# property tests -------------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(seed=seeds, dim=st.sampled_from([2, 4, 16]))
def test_conjugation_preserves_spectrum(seed, dim):
    rng = np.random.default_rng(seed)
    rho = random_density(rng, dim, rank=int(rng.integers(1, dim + 1)))
    out = apply_unitary(random_unitary(rng, dim), rho)
    np.testing.assert_allclose(spectrum(out).as_array(), spectrum(rho).as_array(), atol=1e-9)


@settings(max_examples=60, deadline=None)
@given(seed=seeds, da=dims, db=dims)
def test_invariants_of_returned_states(seed, da, db):
    rng = np.random.default_rng(seed)
    a, b = random_density(rng, da), random_density(rng, db)
    u = random_unitary(rng, da * db)
    for rho in (tensor(a, b), partial_trace(tensor(a, b), {1}), apply_unitary(u, tensor(a, b))):
        m = rho.entries
        assert np.max(np.abs(m - m.conj().T)) <= 1e-12
        assert abs(np.trace(m) - 1) <= 1e-10
        assert np.linalg.eigvalsh(m)[0] >= -1e-10


@settings(max_examples=60, deadline=None)
@given(seed=seeds, da=dims, db=dims)
def test_tensor_spectrum_law(seed, da, db):
    rng = np.random.default_rng(seed)
    a, b = random_density(rng, da), random_density(rng, db)
    products = np.sort(np.outer(spectrum(a).as_array(), spectrum(b).as_array()).ravel())[::-1]
    np.testing.assert_allclose(spectrum(tensor(a, b)).as_array(), products, atol=1e-9)


@settings(max_examples=60, deadline=None)
@given(seed=seeds, da=dims, db=dims)
def test_partial_trace_of_product(seed, da, db):
    rng = np.random.default_rng(seed)
    a, b = random_density(rng, da), random_density(rng, db)
    np.testing.assert_allclose(partial_trace(tensor(a, b), {0}).entries, a.entries, atol=1e-10)


@settings(max_examples=60, deadline=None)
@given(seed=seeds, da=dims, db=dims)
def test_entropy_additive(seed, da, db):
    rng = np.random.default_rng(seed)
    a, b = random_density(rng, da), random_density(rng, db)
    total = von_neumann_entropy(tensor(a, b))
    assert total == pytest.approx(von_neumann_entropy(a) + von_neumann_entropy(b), abs=1e-9)
    assert 0 <= total <= np.log2(da * db) + 1e-12


@settings(max_examples=100, deadline=None)
@given(seed=seeds, dim=dims, ra=st.integers(1, 4), rb=st.integers(1, 4))
def test_fuchs_van_de_graaf(seed, dim, ra, rb):
    # squared-fidelity form of the band: 1 - sqrt(F) <= D <= sqrt(1 - F)
    rng = np.random.default_rng(seed)
    a = random_density(rng, dim, rank=min(ra, dim))
    b = random_density(rng, dim, rank=min(rb, dim))
    f, d = fidelity(a, b), trace_distance(a, b)
    assert 0.0 <= f <= 1.0
    assert f == pytest.approx(fidelity(b, a), abs=1e-9)
    assert 1 - np.sqrt(f) <= d + 1e-9
    assert d <= np.sqrt(1 - f) + 1e-9
