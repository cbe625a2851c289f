import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from entlab import quantum_state as qs


def basis_state(d_l, d_r, a=0, b=0):
    c = np.zeros((d_l, d_r), dtype=complex)
    c[a, b] = 1.0
    return qs.BipartiteState(c)


def bell_state():
    return qs.BipartiteState(np.eye(2) / np.sqrt(2.0))


state_dims = st.tuples(st.integers(2, 10), st.integers(2, 10), st.integers(0, 10_000))


# --- construction -------------------------------------------------------------

def test_state_is_normalized():
    state = qs.BipartiteState(np.full((3, 3), 2.0 + 1.0j))
    assert abs(np.linalg.norm(state.coeff) - 1.0) <= 1e-12


def test_state_rejects_zero_and_nonfinite():
    with pytest.raises(ValueError):
        qs.BipartiteState(np.zeros((2, 2)))
    with pytest.raises(ValueError):
        qs.BipartiteState(np.array([[np.inf, 0.0], [0.0, 1.0]]))


def test_density_matrix_validation():
    with pytest.raises(ValueError):
        qs.DensityMatrix(np.array([[0.5, 0.2], [0.3, 0.5]]))  # not Hermitian
    with pytest.raises(ValueError):
        qs.DensityMatrix(np.diag([0.7, 0.7]))  # bad trace
    with pytest.raises(ValueError):
        qs.DensityMatrix(np.diag([1.5, -0.5]))  # negative eigenvalue


# --- reduced density matrices ---------------------------------------------------

def test_product_state_reduces_to_pure_projector():
    state = basis_state(2, 2)
    rho = qs.reduced_density_right(state)
    assert np.allclose(rho.entries, np.diag([1.0, 0.0]))
    assert qs.von_neumann_entropy(rho) <= 1e-12
    rho_l = qs.reduced_density_left(state)
    assert np.allclose(rho_l.entries, np.diag([1.0, 0.0]))


def test_bell_state_reduces_to_maximally_mixed():
    rho_r = qs.reduced_density_right(bell_state())
    rho_l = qs.reduced_density_left(bell_state())
    assert np.allclose(rho_r.entries, np.eye(2) / 2.0)
    assert np.allclose(rho_l.entries, np.eye(2) / 2.0)


def test_diagonal_state_eigenvalues_match_direct_product():
    weights = np.array([0.5, 0.3, 0.2])
    state = qs.BipartiteState(np.diag(np.sqrt(weights)).astype(complex))
    rho = qs.reduced_density_right(state)
    direct = state.coeff.conj().T @ state.coeff  # the defining product
    assert np.abs(rho.entries - direct).max() <= 1e-12
    assert np.allclose(np.sort(np.linalg.eigvalsh(rho.entries)), np.sort(weights))


@given(state_dims)
@settings(max_examples=50, deadline=None)
def test_left_right_spectra_agree(dims):
    d_l, d_r, seed = dims
    state = qs.random_state(d_l, d_r, np.random.default_rng(seed))
    left = np.linalg.eigvalsh(qs.reduced_density_left(state).entries)[::-1]
    right = np.linalg.eigvalsh(qs.reduced_density_right(state).entries)[::-1]
    k = min(d_l, d_r)
    assert np.abs(left[:k] - right[:k]).max() <= 1e-10


# --- entropy -------------------------------------------------------------------

def test_entropy_of_pure_and_maximally_mixed():
    assert qs.von_neumann_entropy(qs.DensityMatrix(np.diag([1.0, 0.0]))) == 0.0
    s = qs.von_neumann_entropy(qs.DensityMatrix(np.eye(2) / 2.0))
    assert abs(s - np.log(2.0)) <= 1e-12


def test_entropy_matches_direct_summation():
    p = np.array([0.5, 0.3, 0.2])
    s = qs.von_neumann_entropy(qs.DensityMatrix(np.diag(p)))
    assert abs(s - (-(p * np.log(p)).sum())) <= 1e-12


@given(state_dims)
@settings(max_examples=60, deadline=None)
def test_symmetry_theorem(dims):
    d_l, d_r, seed = dims
    state = qs.random_state(d_l, d_r, np.random.default_rng(seed))
    s_l = qs.von_neumann_entropy(qs.reduced_density_left(state))
    s_r = qs.von_neumann_entropy(qs.reduced_density_right(state))
    assert abs(s_l - s_r) <= 1e-9
    assert -1e-10 <= s_l <= np.log(min(d_l, d_r)) + 1e-10


# --- Schmidt decomposition -------------------------------------------------------

def test_schmidt_of_product_and_bell():
    dec = qs.schmidt(basis_state(3, 4))
    assert abs(dec.coefficients[0] - 1.0) <= 1e-12
    assert np.abs(dec.coefficients[1:]).max() <= 1e-12
    dec = qs.schmidt(bell_state())
    assert np.abs(dec.coefficients - 1 / np.sqrt(2.0)).max() <= 1e-12


def test_schmidt_reconstruction_and_spectrum():
    state = qs.random_state(4, 6, np.random.default_rng(3))
    dec = qs.schmidt(state)
    assert abs((dec.coefficients ** 2).sum() - 1.0) <= 1e-12
    rebuilt = sum(
        c * np.outer(dec.left_vectors[:, k], dec.right_vectors[:, k].conj())
        for k, c in enumerate(dec.coefficients))
    assert np.abs(rebuilt - state.coeff).max() <= 1e-10
    rho_eigs = np.linalg.eigvalsh(qs.reduced_density_left(state).entries)[::-1]
    assert np.abs(dec.coefficients ** 2 - rho_eigs[: dec.coefficients.size]).max() <= 1e-10


# --- fidelity --------------------------------------------------------------------

def test_fidelity_basics():
    state = qs.random_state(3, 3, np.random.default_rng(4))
    assert abs(qs.fidelity(state, state) - 1.0) <= 1e-12
    assert qs.fidelity(basis_state(2, 2, 0, 0), basis_state(2, 2, 1, 1)) == 0.0
    with pytest.raises(ValueError):
        qs.fidelity(basis_state(2, 2), basis_state(2, 3))


@given(state_dims)
@settings(max_examples=30, deadline=None)
def test_fidelity_symmetric_and_bounded(dims):
    d_l, d_r, seed = dims
    rng = np.random.default_rng(seed)
    a, b = qs.random_state(d_l, d_r, rng), qs.random_state(d_l, d_r, rng)
    f = qs.fidelity(a, b)
    assert 0.0 <= f <= 1.0
    assert abs(f - qs.fidelity(b, a)) <= 1e-12


def test_fidelity_of_truncation_equals_kept_weight():
    state = qs.random_state(6, 6, np.random.default_rng(7))
    reduced, weight = qs.truncate(state, 3)
    assert abs(qs.fidelity(state, reduced) - (1.0 - weight)) <= 1e-10


# --- truncation ------------------------------------------------------------------

def test_truncate_full_rank_is_identity():
    state = qs.random_state(4, 4, np.random.default_rng(8))
    reduced, weight = qs.truncate(state, 4)
    assert weight <= 1e-14
    assert abs(qs.fidelity(state, reduced) - 1.0) <= 1e-12


def test_truncate_bell_to_product():
    reduced, weight = qs.truncate(bell_state(), 1)
    assert abs(weight - 0.5) <= 1e-12
    assert abs(qs.schmidt(reduced).coefficients[0] - 1.0) <= 1e-12


def test_truncate_out_of_range():
    with pytest.raises(ValueError):
        qs.truncate(bell_state(), 0)
    with pytest.raises(ValueError):
        qs.truncate(bell_state(), 3)


def test_truncation_distance_basics():
    a = basis_state(2, 2, 0, 0)
    b = basis_state(2, 2, 1, 1)
    assert qs.truncation_distance(a, a) == 0.0
    assert abs(qs.truncation_distance(a, b) - 2.0) <= 1e-12


def test_projection_distance_equals_schmidt_tail():
    state = qs.random_state(6, 6, np.random.default_rng(9))
    dec = qs.schmidt(state)
    m = 3
    projector = dec.left_vectors[:, :m] @ dec.left_vectors[:, :m].conj().T
    distance = qs.truncation_distance(state, projector @ state.coeff)
    tail = (dec.coefficients[m:] ** 2).sum()
    assert abs(distance - tail) <= 1e-10


def test_kept_projection_beats_random_projections():
    rng = np.random.default_rng(10)
    state = qs.random_state(6, 6, rng)
    dec = qs.schmidt(state)
    keep = dec.left_vectors[:, :3] @ dec.left_vectors[:, :3].conj().T
    best = qs.truncation_distance(state, keep @ state.coeff)
    for _ in range(200):
        g = rng.standard_normal((6, 3)) + 1j * rng.standard_normal((6, 3))
        q, _ = np.linalg.qr(g)
        assert best <= qs.truncation_distance(state, q @ q.conj().T @ state.coeff) + 1e-12


# --- unitary evolution of product states ------------------------------------------

def test_evolve_identity_preserves_entropies():
    rng = np.random.default_rng(11)
    rho_l = _random_mixed(3, rng)
    rho_r = _random_mixed(3, rng)
    out_l, out_r = qs.evolve_product(rho_l, rho_r, np.eye(9))
    assert abs(qs.von_neumann_entropy(out_l) - qs.von_neumann_entropy(rho_l)) <= 1e-10
    assert abs(qs.von_neumann_entropy(out_r) - qs.von_neumann_entropy(rho_r)) <= 1e-10


def _random_mixed(dim, rng):
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = g @ g.conj().T
    return qs.DensityMatrix(rho / np.trace(rho).real)


def _pure_density(dim, rng):
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    v /= np.linalg.norm(v)
    return qs.DensityMatrix(np.outer(v, v.conj()))


def test_pure_product_inputs_keep_entropies_equal():
    rng = np.random.default_rng(12)
    for _ in range(10):
        rho_l = _pure_density(3, rng)
        rho_r = _pure_density(3, rng)
        assert qs.von_neumann_entropy(rho_l) <= 1e-10  # pure inputs start at zero
        u = qs.random_unitary(9, rng)
        out_l, out_r = qs.evolve_product(rho_l, rho_r, u)
        s_l, s_r = qs.von_neumann_entropy(out_l), qs.von_neumann_entropy(out_r)
        assert abs(s_l - s_r) <= 1e-9


def test_entropy_growth_inequality():
    rng = np.random.default_rng(13)
    for _ in range(50):
        rho_l = _random_mixed(3, rng)
        rho_r = _random_mixed(3, rng)
        s_in = qs.von_neumann_entropy(rho_l) + qs.von_neumann_entropy(rho_r)
        out_l, out_r = qs.evolve_product(rho_l, rho_r, qs.random_unitary(9, rng))
        s_out = qs.von_neumann_entropy(out_l) + qs.von_neumann_entropy(out_r)
        assert s_out - s_in >= -1e-9


def test_evolve_rejects_non_unitary():
    rng = np.random.default_rng(14)
    rho = _random_mixed(2, rng)
    bad = np.eye(4) * 1.001
    with pytest.raises(ValueError, match="defect"):
        qs.evolve_product(rho, rho, bad)
    with pytest.raises(ValueError):
        qs.evolve_product(rho, rho, np.eye(5))
