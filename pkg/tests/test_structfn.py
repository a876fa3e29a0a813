import pytest

from conftest import random_z, rel
from qtoroidal.errors import PoleError
from qtoroidal.params import TruncationConfig, sample_params
from qtoroidal.special import theta_u
from qtoroidal.structfn import (
    EQUAL,
    FAR,
    NEXT,
    OTHER,
    PREV,
    G,
    G_tilde,
    LinearRational,
    check_fusion_identities,
    d_factor,
    fusion_products,
    g,
    lambda0,
    lambda0_factors,
    lambda_elliptic,
    relation,
    serre_X_n1,
)


def test_relation_classes():
    assert relation(0, 0, 5) == EQUAL
    assert relation(0, 1, 5) == NEXT
    assert relation(0, 4, 5) == PREV
    assert relation(0, 2, 5) == FAR
    assert relation(1, 0, 2) == OTHER
    assert relation(0, 0, 1) == EQUAL


def test_far_pair_G_is_one(rng):
    p = sample_params(1, 5)
    for _ in range(5):
        assert G(0, 2, random_z(rng), p) == 1


def test_G_diagonal_at_origin(params3):
    assert G(1, 1, 0, params3) == params3.q2


@pytest.mark.parametrize("n", (1, 2, 3, 5))
def test_exchange_and_inversion_all_classes(n, rng):
    p = sample_params(20 + n, n)
    for i in range(n):
        for j in range(n):
            for _ in range(20):
                z, w = random_z(rng), random_z(rng)
                lhs = G(i, j, w / z, p)
                rhs = -g(j, i, w, z, p) / (d_factor(i, j, p) * g(i, j, z, w, p))
                assert rel(lhs, rhs) < 1e-12
                assert abs(G(i, j, w / z, p) * G(j, i, z / w, p) - 1) < 1e-12


def test_G_raises_at_pole(params3):
    with pytest.raises(PoleError):
        G(0, 0, 1 / params3.q2, params3)


def test_linear_rational_order_and_inverse():
    f = LinearRational(2.0, (0.5, 0.5), (0.5, 3.0))
    assert f.order_at(2.0) == 1
    assert f.order_at(1 / 3) == -1
    assert abs(f(0.7) * f.inverse()(0.7) - 1) < 1e-15


def test_lambda0_far_pair_is_one(rng):
    p = sample_params(2, 5)
    assert lambda0(0, 2, random_z(rng), p) == 1


def test_lambda0_diagonal_at_origin(params3):
    assert lambda0(0, 0, 0, params3) == 1


def test_lambda0_diagonal_vanishes_at_numerator_roots(params3):
    f = lambda0_factors(0, 0, params3)
    for a in f.zeros:
        scale = max(abs(f(1.1 / a)), 1.0)
        assert abs(f(1 / a)) < 1e-12 * scale


def test_lambda_diagonal_inversion(params3, rng):
    p, gam = params3, params3.gamma
    for _ in range(30):
        u = complex(rng.uniform(0, 1)) + rng.uniform(-0.3, 0.3) * p.tau
        ratio = lambda_elliptic(0, 0, -u, p) / lambda_elliptic(0, 0, u, p)
        assert rel(ratio, theta_u(u + gam, p) / theta_u(u - gam, p)) < 1e-9


@pytest.mark.parametrize("s", (1, -1))
def test_lambda_adjacent_inversion(params3, rng, s):
    p, gam, b = params3, params3.gamma, params3.beta
    for _ in range(30):
        u = complex(rng.uniform(0, 1)) + rng.uniform(-0.3, 0.3) * p.tau
        ratio = lambda_elliptic(0, (-s) % 3, -u, p) / lambda_elliptic(0, s % 3, u, p)
        expected = p.q_pow(2 * s * b) * theta_u(u + s * b - gam / 2, p) / theta_u(u + s * b + gam / 2, p)
        assert rel(ratio, expected) < 1e-9


def test_lambda_elliptic_first_order_in_p(rng):
    p = sample_params(8, 3)
    trunc = TruncationConfig(product_order=1)
    for j, power in ((0, -p.gamma), (1, p.gamma / 2), (2, p.gamma / 2)):
        u = complex(rng.uniform(0, 1)) + 0.1 * p.tau
        x = p.p_pow(u)
        reduced = lambda_elliptic(0, j, u, p, trunc) / p.p_pow(power * u)
        assert rel(reduced, lambda0(0, j, x, p)) < abs(p.p) * 50


def test_G_tilde_factorizes_G(rng):
    for n in (1, 2, 3, 5):
        p = sample_params(30 + n, n)
        for j in range(n):
            for _ in range(10):
                x = random_z(rng)
                assert rel(G_tilde(0, j, x, p) * G_tilde(0, j, x / p.q, p), G(0, j, x, p)) < 1e-12


def test_G_tilde_values(rng):
    p = sample_params(4, 5)
    assert G_tilde(0, 2, random_z(rng), p) == 1
    assert abs(G_tilde(1, 1, 0, p) - p.q) < 1e-15


def test_fusion_identities_at_origin(params3):
    first, second = fusion_products(0, 0, params3)
    assert abs(first - 1) < 1e-14 and abs(second - 1) < 1e-14


def test_fusion_report_and_control(params3):
    report = check_fusion_identities(params3, samples=100, seed=5)
    assert report.all_passed
    assert report.max_residual() < 1e-11
    assert report.max_residual(control=True) > 1e-3


def test_fusion_needs_rank_three(params2):
    with pytest.raises(ValueError):
        check_fusion_identities(params2)


def brute_X(z1, z2, z3, p):
    def Gd(x):
        q2 = p.q2
        return (1 - x / p.q1) * (1 - x / q2) * (1 - x / p.q3) / ((1 - p.q1 * x) * (1 - q2 * x) * (1 - p.q3 * x))

    s1 = (z1 + z2) * (z3**2 - z1 * z2) / (z1 * z2 * z3) * Gd(z2 / z3)
    s2 = (z2 + z3) * (z1**2 - z2 * z3) / (z1 * z2 * z3) * Gd(z1 / z2)
    s3 = (z3 + z1) * (z2**2 - z3 * z1) / (z1 * z2 * z3)
    return s1 + s2 + s3


def test_serre_X_rank_one(params1, rng):
    assert rel(serre_X_n1(1, 1, 1, params1), brute_X(1, 1, 1, params1)) < 1e-14
    z = [random_z(rng) for _ in range(3)]
    value = serre_X_n1(*z, params1)
    assert rel(value, brute_X(*z, params1)) < 1e-12
    c = random_z(rng)
    assert rel(serre_X_n1(*(c * v for v in z), params1), value) < 1e-12
    assert rel(serre_X_n1(z[2], z[1], z[0], params1), value) > 1e-6
