import cmath
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qtoroidal.errors import RegionError
from qtoroidal.params import (
    DEFAULT_TRUNC,
    ParameterSet,
    TruncationConfig,
    build_params,
    make_rng,
    region_violations,
    sample_params,
)


def test_rank_one_zero_mu_accepted():
    p = build_params(1, cmath.rect(0.8, 0.3), cmath.rect(1.0, 0.7), 1.5j, [0])
    assert p.n == 1 and p.mu == (0j,)


def test_q_squared_outside_unit_disc_rejected():
    with pytest.raises(RegionError):
        build_params(2, 1.05, 1.0, 1.5j, [0.1, -0.1])


def test_nonzero_mu_sum_rejected():
    with pytest.raises(RegionError, match="sum"):
        build_params(2, 0.8, 1.0, 1.5j, [0.1, 0.2])


def test_lower_half_plane_tau_rejected():
    with pytest.raises(RegionError):
        build_params(1, 0.8, 1.0, -1.5j, [0])


def test_non_im_context_needs_C():
    with pytest.raises(ValueError):
        build_params(1, 0.8, 1.0, 1.5j, [0], im_context=False)


def test_im_context_C_squared_is_p_q_squared():
    p = sample_params(5, 3)
    assert abs(p.C2 - p.p * p.q2) < 1e-14 * abs(p.C2)


def test_log_p_branch_makes_p_to_tau_one():
    p = sample_params(6, 2)
    assert abs(p.p_pow(p.tau) - 1) < 1e-12


def test_derived_exponents():
    p = sample_params(7, 3)
    assert abs(p.p_pow(p.gamma) - p.q2) < 1e-12
    assert abs(p.p_pow(p.beta) - p.d) < 1e-12


@pytest.mark.parametrize("seed", range(40))
def test_q1_q2_q3_product_is_one(seed):
    p = sample_params(seed, 1 + seed % 4)
    assert abs(p.q1 * p.q2 * p.q3 - 1) < 1e-14


def test_sampling_is_deterministic():
    assert sample_params(1, 3) == sample_params(1, 3)
    assert sample_params(1, 3).q_half != sample_params(2, 3).q_half


def test_sampled_sets_pass_validation():
    for seed in range(1000):
        p = sample_params(seed, 1 + seed % 5, im_context=bool(seed % 2))
        assert region_violations(p) == []
        assert abs(p.p) <= 0.5


def test_round_trip_through_dict():
    for im in (True, False):
        p = sample_params(9, 3, im_context=im)
        assert ParameterSet.from_dict(p.to_dict()).fingerprint() == p.fingerprint()


def test_fingerprint_changes_with_C():
    p = sample_params(9, 3, im_context=False)
    assert p.with_C(p.C * 1.1).fingerprint() != p.fingerprint()


def test_rng_streams_are_independent_and_reproducible():
    a = make_rng(3, "grid", 2).uniform(size=4)
    assert (a == make_rng(3, "grid", 2).uniform(size=4)).all()
    assert not (a == make_rng(3, "grid", 3).uniform(size=4)).all()


def test_rng_rejects_out_of_range_seed():
    with pytest.raises(ValueError):
        make_rng(-1)
    with pytest.raises(ValueError):
        make_rng(2**64)


def test_truncation_validation():
    with pytest.raises(ValueError):
        TruncationConfig(product_order=0)
    with pytest.raises(ValueError):
        TruncationConfig(residue_epsilon=0)


def test_truncation_tail_check():
    p = sample_params(4, 2)
    DEFAULT_TRUNC.check_against(p)
    with pytest.raises(ValueError, match="tail"):
        TruncationConfig(product_order=2).check_against(p)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**64 - 1), n=st.integers(min_value=1, max_value=5))
def test_any_seed_samples_a_valid_set(seed, n):
    p = sample_params(seed, n)
    assert region_violations(p) == []
    assert math.isclose(abs(sum(p.mu)), 0.0, abs_tol=1e-12)
