"""Verification campaigns: which checks run for a seed, and their records.

Each campaign is a function ``(seed, options) -> VerificationReport``.
Options carry the user's size restrictions and truncation; anything left
unset falls back to the desk-scale defaults below.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import kernels as K
from .errors import PoleError
from .freefield import make_example_module, run_boundary_campaign, run_wheel_campaign
from .params import DEFAULT_TRUNC, ParameterSet, TruncationConfig, make_rng, sample_params
from .report import CheckRecord, VerificationReport, digest, normalized, timed
from .special import central_difference, theta_u
from .structfn import G, check_fusion_identities, d_factor, g, random_ratio
from .thetaspace import (
    basis_matrix,
    build_basis,
    check_quasiperiodicity,
    diagonal_invariance_residual,
    numerical_rank,
    random_torus_point,
)

THETA_IDENTITY_SIZES = ((1, 1, 1), (1, 2, 1), (1, 2, 2), (2, 1, 1), (2, 2, 1), (3, 1, 1))
N1_CONSTANT_SIZES = ((1, 1), (2, 1), (2, 2))
STRUCTFN_NS = (1, 2, 3, 5)
THETASPACE_NS = (1, 2, 3)
THETA_PARAM_SETS = 10
POINTS = 100
GRIDS_PER_SEED = 3
ALPHA_PERTURBATION = 0.01


@dataclass(frozen=True)
class CampaignOptions:
    n: int | None = None
    M: int | None = None
    N: int | None = None
    ell: int = 3
    trunc: TruncationConfig = DEFAULT_TRUNC

    @property
    def explicit_size(self) -> bool:
        return not (self.n is None and self.M is None and self.N is None)

    @property
    def grids(self) -> int:
        """Grids per seed: one for an explicit size, several for the default sweep."""
        return 1 if self.explicit_size else GRIDS_PER_SEED

    def identity_sizes(self) -> tuple[tuple[int, int, int], ...]:
        if not self.explicit_size:
            return THETA_IDENTITY_SIZES
        return ((self.n or 1, self.M or 1, self.N or 1),)


def _record(name, anchor, params, inputs, scale, residual, tolerance, seed, detail="", wall=0.0, control=False):
    return CheckRecord(
        name=name,
        anchor=anchor,
        fingerprint=params.fingerprint() if params is not None else "",
        inputs_digest=digest(*inputs),
        scale=scale,
        residual=residual,
        tolerance=tolerance,
        control=control,
        seed=seed,
        detail=detail,
        wall_time=wall,
    )


def _random_u(rng: np.random.Generator, params: ParameterSet, spread: float = 0.3) -> complex:
    return complex(rng.uniform(0, 1), 0) + rng.uniform(-spread, spread) * params.tau


# ---------------------------------------------------------------- special functions


def run_special(seed: int, opts: CampaignOptions) -> VerificationReport:
    """Theta period rules on several parameter sets and the lambda/xi/eta relations."""
    report = VerificationReport()
    trunc = opts.trunc
    for k in range(THETA_PARAM_SETS):
        params = sample_params(seed * THETA_PARAM_SETS + k, opts.n or 1)
        rng = make_rng(seed, "theta-period", k)
        worst_one = worst_tau = 0.0
        with timed() as clock:
            for _ in range(POINTS):
                u = _random_u(rng, params)
                base = theta_u(u, params, trunc)
                shifted = theta_u(u + 1, params, trunc)
                worst_one = max(worst_one, abs(shifted + base) / abs(base))
                expected = -cmath.exp(-2j * math.pi * u - 1j * math.pi * params.tau) * base
                worst_tau = max(worst_tau, abs(theta_u(u + params.tau, params, trunc) - expected) / abs(expected))
        for name, value, rule in (
            ("theta-shift-one", worst_one, "theta(u+1) = -theta(u)"),
            ("theta-shift-tau", worst_tau, "theta(u+tau) = -exp(-2 pi i u - pi i tau) theta(u)"),
        ):
            report.add(_record(name, rule, params, (seed, k), 1.0, value, 1e-9, seed,
                               f"parameter set {k}, {POINTS} points", clock[0] / 2))
    params = sample_params(seed, 3)
    rng = make_rng(seed, "xi-eta")
    worst: dict[str, float] = {}
    with timed() as clock:
        for _ in range(POINTS):
            u = _random_u(rng, params)
            try:
                values = K.xi_eta_relations(u, int(rng.integers(3)), params, trunc)
            except PoleError:
                continue
            for key, val in values.items():
                worst[key] = max(worst.get(key, 0.0), val)
    for key in sorted(worst):
        report.add(_record(key, "exchange function against xi, eta and theta", params, (seed, key),
                           1.0, worst[key], 1e-9, seed, f"{POINTS} points", clock[0] / len(worst)))
    return report


# ---------------------------------------------------------------- structure functions


def run_structfn(seed: int, opts: CampaignOptions) -> VerificationReport:
    """Exchange and inversion relations of G and g for every colour pair."""
    report = VerificationReport()
    for n in ((opts.n,) if opts.n else STRUCTFN_NS):
        params = sample_params(seed, n)
        rng = make_rng(seed, "structfn", n)
        for j in range(n):
            worst_ex = worst_inv = 0.0
            with timed() as clock:
                for _ in range(POINTS):
                    z = random_ratio(rng)
                    w = random_ratio(rng)
                    try:
                        lhs = G(0, j, w / z, params) * d_factor(0, j, params) * g(0, j, z, w, params)
                        rhs = g(j, 0, w, z, params)
                        inv = G(0, j, w / z, params) * G(j, 0, z / w, params)
                    except PoleError:
                        continue
                    worst_ex = max(worst_ex, abs(lhs + rhs) / max(abs(lhs), abs(rhs)))
                    worst_inv = max(worst_inv, abs(inv - 1))
            report.add(_record("structfn-exchange", "G d g(z,w) + g(w,z) = 0", params, (seed, n, j),
                               1.0, worst_ex, 1e-11, seed, f"n={n}, pair (0,{j})", clock[0] / 2))
            report.add(_record("structfn-inversion", "G_ij(w/z) G_ji(z/w) = 1", params, (seed, n, j),
                               1.0, worst_inv, 1e-11, seed, f"n={n}, pair (0,{j})", clock[0] / 2))
    return report


def run_fusion(seed: int, opts: CampaignOptions) -> VerificationReport:
    return check_fusion_identities(sample_params(seed, max(opts.n or 3, 3)), samples=POINTS, seed=seed)


# ---------------------------------------------------------------- theta space


def run_thetaspace(seed: int, opts: CampaignOptions) -> VerificationReport:
    """Period rules, diagonal invariance and rank of the constructed basis."""
    report = VerificationReport()
    for n in ((opts.n,) if opts.n else THETASPACE_NS):
        params = sample_params(seed, n)
        with timed() as clock:
            basis = build_basis(params, opts.trunc)
        for elem in basis:
            report.extend(check_quasiperiodicity(elem, params, seed=seed))
            with timed() as c2:
                res = diagonal_invariance_residual(elem, params, seed=seed)
            report.add(_record("theta-diagonal-invariance", "invariance under a common shift of all arguments",
                               params, (seed, n, elem.coset_label), 1.0, res, 1e-8, seed,
                               f"n={n}, coset {elem.coset_label}", c2[0]))
        rng = make_rng(seed, "theta-rank", n)
        points = [random_torus_point(rng, n, params.tau, spread=0.15) for _ in range(max(8, 2 * n))]
        rank, sv = numerical_rank(basis_matrix(basis, points))
        report.add(_record("theta-rank", "dimension of the theta space", params, (seed, n),
                           1.0, float(n - rank), 0.0, seed,
                           f"n={n}, rank {rank}, sigma_min/sigma_max {sv[-1] / sv[0]:.3e}", clock[0]))
    return report


# ---------------------------------------------------------------- free fields


def run_wheel(seed: int, opts: CampaignOptions) -> VerificationReport:
    params = sample_params(seed, max(opts.n or 3, 3), im_context=False)
    rng = make_rng(seed, "spectral", opts.ell)
    spectral = [complex(cmath.rect(rng.uniform(0.5, 2.0), rng.uniform(-math.pi, math.pi))) for _ in range(opts.ell)]
    family = make_example_module(opts.ell, spectral, params)
    return run_wheel_campaign(family, seed, trunc=opts.trunc)


def run_boundary(seed: int, opts: CampaignOptions) -> VerificationReport:
    params = sample_params(seed, max(opts.n or 3, 3), im_context=False)
    return run_boundary_campaign(params, seed, opts.trunc)


# ---------------------------------------------------------------- theta identities


def _alpha(rng: np.random.Generator, params: ParameterSet) -> complex:
    return complex(rng.uniform(0, 1)) + rng.uniform(-0.2, 0.2) * params.tau


def run_theta_identity(seed: int, opts: CampaignOptions) -> VerificationReport:
    """The symmetrization identity over all basis pairs, plus controls and symmetries."""
    report = VerificationReport()
    trunc = opts.trunc
    for n, M, N in opts.identity_sizes():
        K.check_envelope(n, M, N)
        params = sample_params(seed, n)
        basis = build_basis(params, trunc)
        rng = make_rng(seed, "theta-identity", n, M, N)
        for gidx in range(opts.grids):
            alpha = _alpha(rng, params)
            grid = K.sample_grid(rng, n, M, N, params, alpha).u
            size = f"(n,M,N)=({n},{M},{N}), grid {gidx}"
            for a, t1 in enumerate(basis):
                for b, t2 in enumerate(basis):
                    with timed() as clock:
                        lhs, rhs = K.phi_components(n, M, N, alpha, grid, t1, t2, params, trunc)
                    scale = max(lhs.scale, rhs.scale)
                    report.add(_record("theta-identity", "symmetrization identity of theta functions", params,
                                       (grid, alpha, a, b), scale, normalized(lhs.value - rhs.value, scale),
                                       1e-8, seed, f"{size}, basis pair ({a},{b})", clock[0]))
            t1, t2 = basis[0], basis[-1]
            with timed() as clock:
                lhs, rhs = K.phi_components(n, M, N, alpha + ALPHA_PERTURBATION, grid, t1, t2, params, trunc,
                                            alpha_rhs=alpha)
            scale = max(lhs.scale, rhs.scale)
            report.add(_record("theta-identity-perturbed-alpha", "negative control: alpha shifted on one side",
                               params, (grid, alpha), scale, normalized(lhs.value - rhs.value, scale),
                               1e-8, seed, size, clock[0], control=True))
            with timed() as clock:
                ks = params.beta + params.gamma / 2
                sym_t = K.symmetrized(K.T_func, grid, M, t1, t2, params, trunc)
                sym_tp = K.symmetrized(K.Tprime_func, grid, M, t1, t2, params, trunc)
                lhs, rhs = K.phi_components(n, M, N, ks, grid, t1, t2, params, trunc)
                scale = max(lhs.scale, rhs.scale)
                res = max(normalized(sym_t - sym_tp, scale), normalized(sym_t - lhs.value, scale),
                          normalized(sym_tp - rhs.value, scale))
            report.add(_record("sym-T-identity", "Sym T = Sym T' and its match with both sides", params,
                               (grid,), scale, res, 1e-8, seed, size, clock[0]))
            with timed() as clock:
                worst = 0.0
                for side in K.SIDES:
                    worst = max(worst, *K.quasi_periodicity_check(side, n, M, N, grid, t1, t2, alpha, params,
                                                                  row=n - 1, col=M + N - 1, trunc=trunc))
            report.add(_record("phi-quasi-periodicity", "unit and tau shifts of each side", params, (grid, alpha),
                               1.0, worst, 1e-8, seed, size, clock[0]))
            with timed() as clock:
                perm = grid.copy()
                perm[0] = perm[0][::-1]
                worst = 0.0
                for side in K.SIDES:
                    base = K.side_sum(side, grid, M, K.as_theta(t1, params), K.as_theta(t2, params), alpha, params, trunc)
                    moved = K.side_sum(side, perm, M, K.as_theta(t1, params), K.as_theta(t2, params), alpha, params, trunc)
                    worst = max(worst, normalized(moved.value - base.value, base.scale))
            report.add(_record("phi-permutation-symmetry", "each side is symmetric within a row", params, (grid, alpha),
                               1.0, worst, 1e-10, seed, size, clock[0]))
    return report


def run_residue_lemmas(seed: int, opts: CampaignOptions) -> VerificationReport:
    """Residue constant, closed form at u_a = a alpha, iterated residues and row merging."""
    report = VerificationReport()
    trunc = opts.trunc
    p1 = sample_params(seed, 1)
    rng = make_rng(seed, "residue-lemmas")
    with timed() as clock:
        A = K.residue_constant(p1, trunc)
        numeric = 1 / (theta_u(p1.gamma, p1, trunc) * central_difference(lambda u: theta_u(u, p1, trunc), 0))
    report.add(_record("residue-constant", "A = 1/(theta(gamma) theta'(0)) against a numerical derivative",
                       p1, (seed,), abs(A), normalized(A - numeric, abs(A)), 1e-8, seed, wall=clock[0]))
    alpha = _alpha(rng, p1)
    for M, N in N1_CONSTANT_SIZES:
        with timed() as clock:
            diff, scale = K.n1_constant_check(M, N, alpha, p1, trunc)
        report.add(_record("n1-closed-form", "one-row identity at u_a = a alpha", p1, (alpha, M, N),
                           scale, normalized(diff, scale), 1e-9, seed, f"(M,N)=({M},{N})", clock[0]))
        with timed() as clock:
            grid = K.sample_grid(rng, 1, M, N, p1, alpha).u
            diff, scale = K.ellipticity_check(M, N, alpha, grid, p1, trunc)
        report.add(_record("n1-ellipticity", "the one-row difference is the same constant everywhere", p1,
                           (alpha, M, N, grid), scale, normalized(diff, scale), 1e-8, seed, f"(M,N)=({M},{N})", clock[0]))
    for n, M, N in ((1, 1, 1), (1, 2, 1), (2, 1, 1)):
        params = sample_params(seed, n)
        basis = build_basis(params, trunc)
        grid = K.sample_grid(rng, n, M, N, params, alpha, min_distance=K.RESIDUE_SAFE_DISTANCE).u
        for side in K.SIDES:
            with timed() as clock:
                diff, scale = K.iterated_residue_check(n, M, N, grid, basis[0], basis[-1], alpha, params, side, trunc)
            report.add(_record("iterated-residue", "nested residues reduce each side to the smaller system",
                               params, (grid, alpha, side), scale, normalized(diff, scale), 1e-6, seed,
                               f"(n,M,N)=({n},{M},{N}), side {side}", clock[0]))
    params = sample_params(seed, 2)
    basis = build_basis(params, trunc)
    for M, N in ((1, 1), (2, 1)):
        grid = K.sample_grid(rng, 2, M, N, params, alpha).u
        for variant in ("alpha", "alpha-gamma"):
            for i in range(2):
                with timed() as clock:
                    res, scale = K.specialization_check(2, M, N, i, variant, grid, basis[0], basis[1], alpha, params, trunc)
                report.add(_record("row-merging", "specializing a row to its neighbour shifted by alpha",
                                   params, (grid, alpha, variant, i), scale, res, 1e-8, seed,
                                   f"(M,N)=({M},{N}), variant {variant}, row {i}", clock[0]))
            with timed() as clock:
                res, scale = K.specialization_check(2, M, N, 0, variant, grid, basis[0], basis[1], alpha, params,
                                                    trunc, sign=-((-1) ** (M * N)))
            report.add(_record("row-merging-wrong-sign", "negative control: flipped sign factor", params,
                               (grid, alpha, variant), scale, res, 1e-8, seed,
                               f"(M,N)=({M},{N}), variant {variant}", clock[0], control=True))
    return report


CAMPAIGNS: dict[str, Callable[[int, CampaignOptions], VerificationReport]] = {
    "special": run_special,
    "structfn": run_structfn,
    "fusion": run_fusion,
    "thetaspace": run_thetaspace,
    "wheel": run_wheel,
    "boundary": run_boundary,
    "theta-identity": run_theta_identity,
    "residue-lemmas": run_residue_lemmas,
}
ALL = "all"
CAMPAIGN_NAMES = (ALL, *CAMPAIGNS)


def expand(campaign: str) -> list[str]:
    if campaign == ALL:
        return list(CAMPAIGNS)
    if campaign not in CAMPAIGNS:
        raise KeyError(campaign)
    return [campaign]


EXPLAIN: dict[str, str] = {
    "all": "Runs every campaign below for each seed.",
    "special": (
        "Theta function period rules: theta(u+1) = -theta(u) and "
        "theta(u+tau) = -exp(-2 pi i u - pi i tau) theta(u), checked on ten parameter sets at 100 points "
        "each, plus the four relations tying the elliptic exchange function lambda to xi, eta and theta. "
        "Tolerance 1e-9 relative: direct evaluation of 64-factor products is accurate to ~1e-14."
    ),
    "structfn": (
        "Structure-function exchange relation G_ij(w/z) d_ij g_ij(z,w) + g_ji(w,z) = 0 and inversion "
        "G_ij(w/z) G_ji(z/w) = 1 for every relation class, n in {1, 2, 3, 5}. Tolerance 1e-11: rational "
        "functions in double precision."
    ),
    "fusion": (
        "Both three-factor products of G with shifted arguments equal one at random points (n = 3); a wrong "
        "shift is the negative control. Tolerance 1e-11."
    ),
    "thetaspace": (
        "The basis of the n-variable theta space: unit and tau quasi-periodicity of the raw Fourier series, "
        "invariance under a common shift of all arguments, and numerical rank n. Tolerance 1e-8 reflects "
        "the Fourier truncation."
    ),
    "wheel": (
        "The wheel conditions for the Fock tensor-product module: the prefactor of "
        "Lambda_{i,a}(z1) Lambda_{i,b}(z2) Lambda_{i+-1,c}(w) times the rational bracket vanishes at the three "
        "specializations for all slot triples and both signs. Tolerance 1e-9 relative to the prefactor size "
        "at nearby generic points; a perturbed specialization is the negative control."
    ),
    "boundary": (
        "Bilinear boundary module: the quadratic residue condition at w = C^2 z, the boundary Serre factor at "
        "both wheel specializations, and g_ii(z, q^-2 z) = 0 for the trivial boundary module. Tolerance 1e-10."
    ),
    "theta-identity": (
        "Symmetrization identity of theta functions: for every pair of theta-space basis elements the sum "
        "over row-wise splittings of the left-hand products equals that of the right-hand products. Also "
        "checks Sym T = Sym T', quasi-periodicity and row symmetry. Tolerance 1e-8 relative to the largest "
        "summand; a one-sided alpha shift is the negative control."
    ),
    "residue-lemmas": (
        "Ingredients of the identity's proof: the residue constant A, the one-row closed form at u_a = a alpha "
        "and constancy of the difference, nested residues reducing (M, N) to (M-1, N-1) on each side "
        "(tolerance 1e-6 for nested limits), and row merging at u_{i+1} = u_i - alpha or u_i - alpha + gamma "
        "(tolerance 1e-8, flipped sign as the negative control)."
    ),
}
