import itertools
import math

import numpy as np
import pytest

from conftest import rel
from qtoroidal import kernels as K
from qtoroidal.errors import DomainError, EnvelopeError
from qtoroidal.params import make_rng, sample_params
from qtoroidal.special import central_difference, eta, theta_u
from qtoroidal.thetaspace import build_basis


@pytest.fixture(scope="module")
def setup2():
    p = sample_params(80, 2)
    return p, build_basis(p)


@pytest.fixture(scope="module")
def setup1():
    return sample_params(81, 1)


def alpha_for(p, seed=0):
    rng = make_rng(seed, "alpha")
    return complex(rng.uniform(0, 1)) + rng.uniform(-0.2, 0.2) * p.tau


def grid(p, n, M, N, alpha=None, seed=0, **kw):
    return K.sample_grid(make_rng(seed, "grid", n, M, N), n, M, N, p, alpha, **kw).u


def brute_lhs_n1(u, M, alpha, p):
    """Direct one-row left side with constant thetas."""
    th = lambda w: theta_u(w, p)
    g = p.gamma
    total = 0j
    L = len(u)
    for I in itertools.combinations(range(L), M):
        J = [b for b in range(L) if b not in I]
        term = 1 + 0j
        for a in I:
            for b in J:
                x = u[a] - u[b]
                term *= th(x - alpha) * th(-x - alpha + g) / (th(x) * th(x - g))
        total += term
    return total


def test_partition_count_and_envelope():
    assert K.partition_count(2, 2, 1) == 9
    assert K.check_envelope(3, 2, 3) == 10**3
    with pytest.raises(EnvelopeError, match="3200000"):
        K.check_envelope(5, 3, 3)


def test_side_sum_term_count(setup2):
    p, basis = setup2
    a = alpha_for(p)
    u = grid(p, 2, 2, 1, a)
    terms = K.side_terms(K.LEFT, u, 2, K.as_theta(basis[0], p), K.as_theta(basis[1], p), a, p)
    assert len(terms) == math.comb(3, 2) ** 2


def test_side_sum_matches_brute_force_n1(setup1):
    p = setup1
    a = alpha_for(p, 1)
    u = grid(p, 1, 2, 1, a, seed=1)
    one = K.as_theta(None, p)
    lhs = K.side_sum(K.LEFT, u, 2, one, one, a, p)
    assert rel(lhs.value, brute_lhs_n1(u[0], 2, a, p)) < 1e-12


@pytest.mark.parametrize("M,N", [(1, 1), (2, 1), (1, 2), (2, 2)])
def test_phi_vanishes_n1(setup1, M, N):
    p = setup1
    a = alpha_for(p, 2)
    u = grid(p, 1, M, N, a, seed=2)
    lhs, rhs = K.phi_components(1, M, N, a, u, None, None, p)
    assert abs(lhs.value - rhs.value) < 1e-9 * max(lhs.scale, rhs.scale)


def test_phi_vanishes_n2_all_basis_pairs(setup2):
    p, basis = setup2
    a = alpha_for(p, 3)
    u = grid(p, 2, 1, 1, a, seed=3)
    for t1, t2 in itertools.product(basis, repeat=2):
        lhs, rhs = K.phi_components(2, 1, 1, a, u, t1, t2, p)
        assert abs(lhs.value - rhs.value) < 1e-8 * max(lhs.scale, rhs.scale)
        assert abs(K.phi_residual(2, 1, 1, a, u, t1, t2, p)) < 1e-8 * max(lhs.scale, rhs.scale)


def test_phi_perturbed_alpha_control(setup2):
    p, basis = setup2
    a = alpha_for(p, 4)
    u = grid(p, 2, 1, 1, a, seed=4)
    lhs, rhs = K.phi_components(2, 1, 1, a + 0.01, u, basis[0], basis[1], p, alpha_rhs=a)
    assert abs(lhs.value - rhs.value) > 1e-3 * max(lhs.scale, rhs.scale)


def test_phi_zero_groups(setup2):
    p, basis = setup2
    u = grid(p, 2, 2, 0)
    lhs, rhs = K.phi_components(2, 2, 0, 0.3, u, basis[0], basis[1], p)
    assert lhs.value == rhs.value == 0


def test_phi_row_permutation_symmetry(setup2):
    p, basis = setup2
    a = alpha_for(p, 5)
    u = grid(p, 2, 2, 1, a, seed=5)
    perm = u.copy()
    perm[1] = perm[1][[2, 0, 1]]
    for side in K.SIDES:
        base = K.side_sum(side, u, 2, K.as_theta(basis[0], p), K.as_theta(basis[1], p), a, p)
        moved = K.side_sum(side, perm, 2, K.as_theta(basis[0], p), K.as_theta(basis[1], p), a, p)
        assert abs(moved.value - base.value) < 1e-10 * base.scale


def test_phi_quasi_periodicity(setup2):
    p, basis = setup2
    a = alpha_for(p, 6)
    u = grid(p, 2, 1, 1, a, seed=6)
    for side in K.SIDES:
        for row in range(2):
            r1, r2 = K.quasi_periodicity_check(side, 2, 1, 1, u, basis[0], basis[1], a, p, row=row, col=1)
            assert r1 < 1e-8 and r2 < 1e-8


def test_wrong_grid_shape_rejected(setup2):
    p, basis = setup2
    with pytest.raises(ValueError):
        K.phi_components(2, 1, 1, 0.3, np.zeros((2, 3)), basis[0], basis[1], p)


def test_kernel_h_swap_ratio(setup2):
    p, basis = setup2
    u = grid(p, 2, 2, 0, seed=7)
    h = K.kernel_h(2, u, basis[1], p)
    swapped = u.copy()
    swapped[0] = swapped[0][::-1]
    x = u[0, 0] - u[0, 1]
    expected = theta_u(x + p.gamma, p) / theta_u(x - p.gamma, p)
    assert rel(K.kernel_h(2, swapped, basis[1], p) / h, expected) < 1e-10


def test_kernel_h_rank_one_formula(setup1):
    p = setup1
    u = grid(p, 1, 2, 0, seed=8)
    x = u[0, 0] - u[0, 1]
    th = lambda w: theta_u(w, p)
    b, g = p.beta, p.gamma
    expected = th(x) * th(x - g) / (th(x - b - g / 2) * th(x + b - g / 2))
    assert rel(K.kernel_h(2, u, None, p), expected) < 1e-12


def test_kernel_h_single_column(setup2):
    p, basis = setup2
    u = grid(p, 2, 1, 0, seed=9)
    th = lambda w: theta_u(w, p)
    b, g = p.beta, p.gamma
    expected = basis[0](u[:, 0]) / (th(u[0, 0] - u[1, 0] - b - g / 2) * th(u[1, 0] - u[0, 0] - b + g / 2))
    assert rel(K.kernel_h(1, u, basis[0], p), expected) < 1e-12


def test_kernel_k_single_column(setup2):
    p, basis = setup2
    u = grid(p, 2, 1, 0, seed=10)
    expected = basis[1](u[:, 0]) / (eta(u[0, 0] - u[1, 0], p) * eta(u[1, 0] - u[0, 0], p))
    assert rel(K.kernel_k(1, u, basis[1], p), expected) < 1e-12


def test_kernel_k_needs_rank_two(setup1):
    with pytest.raises(DomainError):
        K.kernel_k(1, np.zeros((1, 1)), None, setup1)


def test_h_over_k_independent_of_theta():
    p = sample_params(82, 3)
    basis = build_basis(p)
    u = grid(p, 3, 2, 0, seed=11)
    ratios = [K.kernel_h(2, u, t, p) / K.kernel_k(2, u, t, p) for t in basis]
    assert max(rel(r, ratios[0]) for r in ratios) < 1e-12


def test_T_prime_is_T_with_roles_exchanged(setup2):
    p, basis = setup2
    u = grid(p, 2, 2, 1, seed=12)
    left, right = u[:, :2], u[:, 2:]
    tp = K.Tprime_func(left, right, basis[0], basis[1], p)
    t = K.T_func(right, left, basis[1], basis[0], p)
    assert rel(tp, t) < 1e-12


def test_T_rank_one_four_theta_ratio(setup1):
    p = setup1
    u, v = 0.21 + 0.05 * p.tau, 0.64 - 0.1 * p.tau
    th = lambda w: theta_u(w, p)
    b, g = p.beta, p.gamma
    expected = th(u - v - g / 2 - b) * th(v - u + g / 2 - b) / (th(u - v) * th(u - v - g))
    assert rel(K.T_func(np.array([[u]]), np.array([[v]]), None, None, p), expected) < 1e-12


def test_T_is_one_periodic(setup2):
    p, basis = setup2
    u = grid(p, 2, 1, 1, seed=13)
    base = K.T_func(u[:, :1], u[:, 1:], basis[0], basis[1], p)
    shifted = u.copy()
    shifted[1, 0] += 1
    assert rel(K.T_func(shifted[:, :1], shifted[:, 1:], basis[0], basis[1], p), base) < 1e-10


def test_symmetrized_T_matches_sides(setup2):
    p, basis = setup2
    ks = p.beta + p.gamma / 2
    u = grid(p, 2, 1, 1, ks, seed=14)
    sym_t = K.symmetrized(K.T_func, u, 1, basis[0], basis[1], p)
    sym_tp = K.symmetrized(K.Tprime_func, u, 1, basis[0], basis[1], p)
    lhs, rhs = K.phi_components(2, 1, 1, ks, u, basis[0], basis[1], p)
    scale = max(lhs.scale, rhs.scale)
    assert abs(sym_t - lhs.value) < 1e-10 * scale
    assert abs(sym_tp - rhs.value) < 1e-10 * scale
    assert abs(sym_t - sym_tp) < 1e-8 * scale


def test_residue_constant(setup1):
    p = setup1
    numeric = 1 / (theta_u(p.gamma, p) * central_difference(lambda w: theta_u(w, p), 0))
    A = K.residue_constant(p)
    assert rel(A, numeric) < 1e-8


@pytest.mark.parametrize("M,N", [(1, 1), (2, 1), (2, 2)])
def test_n1_closed_form(setup1, M, N):
    p = setup1
    a = alpha_for(p, 15)
    diff, scale = K.n1_constant_check(M, N, a, p)
    assert abs(diff) < 1e-9 * scale
    u = np.array([(k + 1) * a for k in range(M + N)])
    assert rel(brute_lhs_n1(u, M, a, p), K.n1_closed_form(M, N, a, p)) < 1e-9


@pytest.mark.parametrize("M,N", [(1, 1), (2, 1), (2, 2)])
def test_n1_ellipticity(setup1, M, N):
    p = setup1
    a = alpha_for(p, 16)
    diff, scale = K.ellipticity_check(M, N, a, grid(p, 1, M, N, a, seed=16), p)
    assert abs(diff) < 1e-8 * scale


@pytest.mark.parametrize("n,M,N", [(1, 1, 1), (1, 2, 1), (2, 1, 1)])
@pytest.mark.parametrize("side", K.SIDES)
def test_iterated_residue(n, M, N, side):
    p = sample_params(83 + n, n)
    basis = build_basis(p)
    a = alpha_for(p, 17)
    u = grid(p, n, M, N, a, seed=17, min_distance=K.RESIDUE_SAFE_DISTANCE)
    diff, scale = K.iterated_residue_check(n, M, N, u, basis[0], basis[-1], a, p, side)
    assert abs(diff) < 1e-6 * scale


def test_iterated_residue_empty_group(setup1):
    assert K.iterated_residue_check(1, 0, 2, np.zeros((1, 2)), None, None, 0.3, setup1) == (0j, 1.0)


@pytest.mark.parametrize("variant", ("alpha", "alpha-gamma"))
@pytest.mark.parametrize("i", (0, 1))
def test_row_merging(setup2, variant, i):
    p, basis = setup2
    a = alpha_for(p, 18)
    u = grid(p, 2, 1, 1, a, seed=18)
    res, _ = K.specialization_check(2, 1, 1, i, variant, u, basis[0], basis[1], a, p)
    assert res < 1e-8
    wrong, _ = K.specialization_check(2, 1, 1, i, variant, u, basis[0], basis[1], a, p, sign=1)
    assert wrong > 1e-3


def test_row_merging_three_rows():
    p = sample_params(85, 3)
    basis = build_basis(p)
    a = alpha_for(p, 19)
    u = grid(p, 3, 1, 1, a, seed=19)
    for i in range(3):
        res, _ = K.specialization_check(3, 1, 1, i, "alpha", u, basis[1], basis[2], a, p)
        assert res < 1e-8


def test_row_merging_needs_two_rows(setup1):
    with pytest.raises(DomainError):
        K.specialization_check(1, 1, 1, 0, "alpha", np.zeros((1, 2)), None, None, 0.3, setup1)


def test_xi_eta_relations():
    p = sample_params(86, 3)
    rng = make_rng(0, "xi-eta-test")
    for _ in range(20):
        u = complex(rng.uniform(0, 1)) + rng.uniform(-0.3, 0.3) * p.tau
        assert max(K.xi_eta_relations(u, 1, p).values()) < 1e-9


def test_generic_grid_detection(setup2):
    p, _ = setup2
    u = grid(p, 2, 1, 1)
    assert K.is_generic_grid(u, p)
    bad = u.copy()
    bad[0, 1] = bad[0, 0] + p.gamma
    assert not K.is_generic_grid(bad, p)
