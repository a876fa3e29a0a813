"""Kernel functions of the integrals of motion and the symmetrization identity.

Variables are stored as an ``n x L`` complex array ``u`` (one row per
colour).  A *side sum* is one side of the symmetrization identity: a sum over
all ``n``-tuples of splittings ``I_i | J_i`` of ``{0, ..., L-1}`` with
``|I_i| = M``.  Writing

* ``L0[i][x, y] = theta(u[i, x] - u[i+1, y] - alpha_i)``
* ``L1[i][x, y] = theta(u[i, x] - u[i+1, y] - alpha_i + gamma)``
* ``D[i][x, y]  = theta(u[i, x] - u[i, y]) theta(u[i, x] - u[i, y] - gamma)``

(rows are cyclic, so for ``n = 1`` the next row is the same row), a term is
``theta1(sum_I) theta2(sum_J)`` times

* left side:  ``prod L0[i][I_i, J_{i+1}] L1[i][J_i, I_{i+1}] / prod D[i][I_i, J_i]``
* right side: ``prod L0[i][J_i, I_{i+1}] L1[i][I_i, J_{i+1}] / prod D[i][J_i, I_i]``

``alpha`` may differ from link to link; merging two rows produces such links.
Theta arguments ``theta1, theta2`` are plain callables on the vector of row
sums, so shifted or composed functions can be passed directly.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, EnvelopeError, PoleError
from .params import DEFAULT_TRUNC, ParameterSet, TruncationConfig
from .special import eta, guard_pole, residue_at, theta_prime0, theta_u, xi
from .structfn import lambda_elliptic
from .thetaspace import ThetaElement, evaluate

ThetaFunction = Callable[[Sequence[complex]], complex]
LEFT, RIGHT = "lhs", "rhs"
SIDES = (LEFT, RIGHT)
ENVELOPE_LIMIT = 10**6
GENERIC_DISTANCE = 1e-6
RESIDUE_SAFE_DISTANCE = 0.1
# Nested residues use a tighter circle: singularities at distance ~0.1 would
# otherwise leave a 4th-order discrepancy near the estimator's agreement bound.
NESTED_RESIDUE_EPSILON = 1e-4


# ---------------------------------------------------------------- inputs


def as_theta(theta: ThetaElement | ThetaFunction | complex | None, params: ParameterSet) -> ThetaFunction:
    """Wrap a basis element, a callable or a constant as a callable on row sums."""
    if theta is None:
        return lambda v: 1.0
    if isinstance(theta, ThetaElement):
        return lambda v: evaluate(theta, v, params)
    if callable(theta):
        return theta
    value = complex(theta)
    return lambda v: value


def partition_count(n: int, M: int, N: int) -> int:
    return math.comb(M + N, M) ** n


def check_envelope(n: int, M: int, N: int, limit: int = ENVELOPE_LIMIT) -> int:
    """Number of terms per side; raises EnvelopeError above ``limit``."""
    if n < 1 or M < 0 or N < 0:
        raise ValueError(f"invalid sizes n={n}, M={M}, N={N}")
    count = partition_count(n, M, N)
    if count > limit:
        raise EnvelopeError(
            f"(n, M, N) = ({n}, {M}, {N}) needs {count} terms per side "
            f"(binomial({M + N}, {M})^{n}); the limit is {limit}"
        )
    return count


def lattice_distance(w: complex, tau: complex) -> float:
    """Distance from ``w`` to the nearest point of ``Z + Z tau``."""
    b = round(w.imag / tau.imag)
    r = w - b * tau
    r -= round(r.real)
    return min(abs(r), abs(r - 1), abs(r + 1), abs(r - tau), abs(r + tau))


def is_generic_grid(
    u: np.ndarray, params: ParameterSet, alpha: complex | None = None, min_distance: float = GENERIC_DISTANCE
) -> bool:
    """No two entries differ by ``0``, ``+-gamma`` (or ``+-alpha``, ``+-(alpha-gamma)``) modulo the lattice.

    ``min_distance`` is how far every difference must stay from those points.
    """
    shifts = [0.0, params.gamma, -params.gamma]
    if alpha is not None:
        shifts += [alpha, -alpha, alpha - params.gamma, params.gamma - alpha]
    flat = u.ravel()
    for x, y in itertools.combinations(range(flat.size), 2):
        diff = flat[x] - flat[y]
        if any(lattice_distance(diff - s, params.tau) < min_distance for s in shifts):
            return False
    return True


@dataclass(frozen=True)
class VariableGrid:
    """``n x (M + N)`` variables; the first ``M`` columns play the first group's role."""

    n: int
    M: int
    N: int
    u: np.ndarray

    def __post_init__(self) -> None:
        if self.u.shape != (self.n, self.M + self.N):
            raise ValueError(f"grid shape {self.u.shape} does not match n={self.n}, M+N={self.M + self.N}")


def sample_grid(
    rng: np.random.Generator,
    n: int,
    M: int,
    N: int,
    params: ParameterSet,
    alpha: complex | None = None,
    spread: float = 0.15,
    attempts: int = 1000,
    min_distance: float = GENERIC_DISTANCE,
) -> VariableGrid:
    """Random generic grid with entries ``a + b tau``, ``a`` in ``[0, 1)``, ``|b| <= spread``.

    Residue checks need ``min_distance`` well above the residue radius so
    that no other singularity spoils the circle average.
    """
    for _ in range(attempts):
        a = rng.uniform(0.0, 1.0, size=(n, M + N))
        b = rng.uniform(-spread, spread, size=(n, M + N))
        u = a + b * params.tau
        if is_generic_grid(u, params, alpha, min_distance):
            return VariableGrid(n, M, N, u)
    raise DomainError("could not sample a generic grid")


def _alphas(alpha: complex | Sequence[complex], n: int) -> np.ndarray:
    if np.ndim(alpha) == 0:
        return np.full(n, complex(alpha))
    out = np.asarray(alpha, dtype=complex)
    if out.shape != (n,):
        raise ValueError(f"need one alpha per link, got {out.shape} for n={n}")
    return out


# ---------------------------------------------------------------- side sums


@dataclass(frozen=True)
class SideSum:
    value: complex
    scale: float
    terms: int


def _fsum_complex(values: Sequence[complex]) -> complex:
    return complex(math.fsum(v.real for v in values), math.fsum(v.imag for v in values))


def _tables(u: np.ndarray, alphas: np.ndarray, params: ParameterSet, trunc: TruncationConfig):
    n, L = u.shape
    g_ = params.gamma
    th = lambda w: theta_u(w, params, trunc)
    L0, L1, D = [], [], []
    for i in range(n):
        nxt = u[(i + 1) % n]
        L0.append(np.array([[th(u[i, x] - nxt[y] - alphas[i]) for y in range(L)] for x in range(L)], dtype=complex).reshape(L, L))
        L1.append(np.array([[th(u[i, x] - nxt[y] - alphas[i] + g_) for y in range(L)] for x in range(L)], dtype=complex).reshape(L, L))
        d = np.ones((L, L), dtype=complex)
        for x in range(L):
            for y in range(L):
                if x != y:
                    d[x, y] = th(u[i, x] - u[i, y]) * th(u[i, x] - u[i, y] - g_)
        D.append(d)
    return L0, L1, D


def side_terms(
    side: str,
    u: np.ndarray,
    M: int,
    theta1: ThetaFunction,
    theta2: ThetaFunction,
    alpha: complex | Sequence[complex],
    params: ParameterSet,
    trunc: TruncationConfig = DEFAULT_TRUNC,
) -> list[complex]:
    """All summands of one side, in lexicographic order of the splittings."""
    if side not in SIDES:
        raise ValueError(f"side must be one of {SIDES}")
    u = np.asarray(u, dtype=complex)
    n, L = u.shape
    check_envelope(n, M, L - M)
    alphas = _alphas(alpha, n)
    L0, L1, D = _tables(u, alphas, params, trunc)
    row_sums = u.sum(axis=1)
    splits = []
    for I in itertools.combinations(range(L), M):
        J = tuple(b for b in range(L) if b not in I)
        splits.append((np.array(I, dtype=int), np.array(J, dtype=int)))
    terms = []
    for choice in itertools.product(splits, repeat=n):
        num = 1.0 + 0j
        den = 1.0 + 0j
        for i in range(n):
            I, J = choice[i]
            In, Jn = choice[(i + 1) % n]
            if side == LEFT:
                num *= np.prod(L0[i][np.ix_(I, Jn)]) * np.prod(L1[i][np.ix_(J, In)])
                den *= np.prod(D[i][np.ix_(I, J)])
            else:
                num *= np.prod(L0[i][np.ix_(J, In)]) * np.prod(L1[i][np.ix_(I, Jn)])
                den *= np.prod(D[i][np.ix_(J, I)])
        guard_pole(den, 1.0, "side sum denominator")
        sum_I = np.array([u[i, choice[i][0]].sum() for i in range(n)], dtype=complex)
        sum_J = row_sums - sum_I
        terms.append(complex(theta1(sum_I) * theta2(sum_J) * num / den))
    return terms


def side_sum(
    side: str,
    u: np.ndarray,
    M: int,
    theta1: ThetaFunction,
    theta2: ThetaFunction,
    alpha: complex | Sequence[complex],
    params: ParameterSet,
    trunc: TruncationConfig = DEFAULT_TRUNC,
) -> SideSum:
    """Compensated sum of one side; ``scale`` is the largest summand magnitude."""
    terms = side_terms(side, u, M, theta1, theta2, alpha, params, trunc)
    scale = max((abs(t) for t in terms), default=0.0)
    return SideSum(_fsum_complex(terms), scale, len(terms))


def phi_components(
    n: int,
    M: int,
    N: int,
    alpha: complex | Sequence[complex],
    u_grid: np.ndarray,
    theta1,
    theta2,
    params: ParameterSet,
    trunc: TruncationConfig = DEFAULT_TRUNC,
    alpha_rhs: complex | Sequence[complex] | None = None,
) -> tuple[SideSum, SideSum]:
    """Both sides of the identity; ``alpha_rhs`` overrides alpha on the right side only."""
    u = np.asarray(u_grid, dtype=complex)
    if u.shape != (n, M + N):
        raise ValueError(f"grid shape {u.shape} does not match n={n}, M+N={M + N}")
    if M == 0 or N == 0:
        zero = SideSum(0j, 0.0, 0)
        return zero, zero
    t1, t2 = as_theta(theta1, params), as_theta(theta2, params)
    lhs = side_sum(LEFT, u, M, t1, t2, alpha, params, trunc)
    rhs = side_sum(RIGHT, u, M, t1, t2, alpha if alpha_rhs is None else alpha_rhs, params, trunc)
    return lhs, rhs


def phi_residual(
    n: int,
    M: int,
    N: int,
    alpha: complex | Sequence[complex],
    u_grid: np.ndarray,
    theta1,
    theta2,
    params: ParameterSet,
    trunc: TruncationConfig = DEFAULT_TRUNC,
) -> complex:
    """``LHS - RHS`` of the symmetrization identity (zero when either group is empty)."""
    lhs, rhs = phi_components(n, M, N, alpha, u_grid, theta1, theta2, params, trunc)
    return lhs.value - rhs.value


# ---------------------------------------------------------------- kernels


def _row_products(u: np.ndarray, f: Callable[[complex], complex], pairs) -> complex:
    out = 1.0 + 0j
    for a, b in pairs:
        out *= f(u[a] - u[b])
    return out


def kernel_h(M: int, u_grid: np.ndarray, theta, params: ParameterSet, trunc: TruncationConfig = DEFAULT_TRUNC) -> complex:
    """Kernel ``h_M`` of the integrals of motion (with the dedicated ``n = 1`` form)."""
    u = np.asarray(u_grid, dtype=complex)
    n = params.n
    if u.shape != (n, M):
        raise ValueError(f"grid shape {u.shape} does not match n={n}, M={M}")
    th = lambda w: theta_u(w, params, trunc)
    g_, b_ = params.gamma, params.beta
    t = as_theta(theta, params)(u.sum(axis=1))
    if n == 1:
        row = u[0]
        out = complex(t)
        for a, b in itertools.combinations(range(M), 2):
            x = row[a] - row[b]
            den = th(x - b_ - g_ / 2) * th(x + b_ - g_ / 2)
            guard_pole(den, 1.0, "h_M denominator")
            out *= th(x) * th(x - g_) / den
        return out
    num = complex(t)
    for i in range(n):
        for a, b in itertools.combinations(range(M), 2):
            x = u[i, a] - u[i, b]
            num *= th(x) * th(x - g_)
    den = 1.0 + 0j
    for i in range(n):
        shift = b_ + g_ / 2 if i < n - 1 else b_ - g_ / 2
        nxt = u[(i + 1) % n]
        for a in range(M):
            for b in range(M):
                den *= th(u[i, a] - nxt[b] - shift)
    guard_pole(den, 1.0, "h_M denominator")
    return num / den


def kernel_k(M: int, u_grid: np.ndarray, theta, params: ParameterSet, trunc: TruncationConfig = DEFAULT_TRUNC) -> complex:
    """Kernel ``k_M`` (theta times xi over eta products); defined for ``n >= 2``."""
    u = np.asarray(u_grid, dtype=complex)
    n = params.n
    if n < 2:
        raise DomainError("k_M needs n >= 2: for n = 1 it contains eta(0)")
    if u.shape != (n, M):
        raise ValueError(f"grid shape {u.shape} does not match n={n}, M={M}")
    out = complex(as_theta(theta, params)(u.sum(axis=1)))
    for i in range(n):
        for a in range(M):
            for b in range(M):
                if a != b:
                    out *= xi(u[i, a] - u[i, b], params, trunc)
    for i in range(n):
        nxt = u[(i + 1) % n]
        for a in range(M):
            for b in range(M):
                out /= eta(u[i, a] - nxt[b], params, trunc)
    return out


def _T_generic(first: np.ndarray, second: np.ndarray, t_first, t_second, params, trunc) -> complex:
    """``t_first(sums of first) t_second(sums of second)`` times the T-type product.

    Numerator ``theta(f_i - s_{i+1} - g/2 - b) theta(s_i - f_{i+1} + g/2 - b)``,
    denominator ``theta(f_i - s_i) theta(f_i - s_i - g)``.
    """
    n = first.shape[0]
    th = lambda w: theta_u(w, params, trunc)
    g_, b_ = params.gamma, params.beta
    out = complex(t_first(first.sum(axis=1)) * t_second(second.sum(axis=1)))
    for i in range(n):
        j = (i + 1) % n
        for a in range(first.shape[1]):
            for b in range(second.shape[1]):
                den = th(first[i, a] - second[i, b]) * th(first[i, a] - second[i, b] - g_)
                guard_pole(den, 1.0, "T denominator")
                out *= th(first[i, a] - second[j, b] - g_ / 2 - b_) * th(second[i, b] - first[j, a] + g_ / 2 - b_) / den
    return out


def T_func(u: np.ndarray, v: np.ndarray, theta1, theta2, params: ParameterSet, trunc: TruncationConfig = DEFAULT_TRUNC) -> complex:
    """The integrand factor ``T(u | v)`` with ``u`` of shape ``n x M`` and ``v`` of shape ``n x N``."""
    u, v = np.asarray(u, dtype=complex), np.asarray(v, dtype=complex)
    return _T_generic(u, v, as_theta(theta1, params), as_theta(theta2, params), params, trunc)


def Tprime_func(u: np.ndarray, v: np.ndarray, theta1, theta2, params: ParameterSet, trunc: TruncationConfig = DEFAULT_TRUNC) -> complex:
    """The reversed-order factor ``T'(u | v)``, written out directly."""
    u, v = np.asarray(u, dtype=complex), np.asarray(v, dtype=complex)
    n = u.shape[0]
    th = lambda w: theta_u(w, params, trunc)
    g_, b_ = params.gamma, params.beta
    t1, t2 = as_theta(theta1, params), as_theta(theta2, params)
    out = complex(t1(u.sum(axis=1)) * t2(v.sum(axis=1)))
    for i in range(n):
        j = (i + 1) % n
        for a in range(u.shape[1]):
            for b in range(v.shape[1]):
                den = th(v[i, b] - u[i, a]) * th(v[i, b] - u[i, a] - g_)
                guard_pole(den, 1.0, "T' denominator")
                out *= th(v[i, b] - u[j, a] - g_ / 2 - b_) * th(u[i, a] - v[j, b] + g_ / 2 - b_) / den
    return out


def symmetrized(
    func: Callable, w: np.ndarray, M: int, theta1, theta2, params: ParameterSet, trunc: TruncationConfig = DEFAULT_TRUNC
) -> complex:
    """Sum of ``func(w_I | w_J)`` over all row-wise splittings with ``|I_i| = M``."""
    w = np.asarray(w, dtype=complex)
    n, L = w.shape
    check_envelope(n, M, L - M)
    splits = [(I, tuple(b for b in range(L) if b not in I)) for I in itertools.combinations(range(L), M)]
    terms = []
    for choice in itertools.product(splits, repeat=n):
        u = np.array([w[i, list(choice[i][0])] for i in range(n)]).reshape(n, M)
        v = np.array([w[i, list(choice[i][1])] for i in range(n)]).reshape(n, L - M)
        terms.append(func(u, v, theta1, theta2, params, trunc))
    return _fsum_complex(terms)


# ---------------------------------------------------------------- closed forms and lemmas


def residue_constant(params: ParameterSet, trunc: TruncationConfig = DEFAULT_TRUNC) -> complex:
    """``A = 1 / (theta(gamma) theta'(0))`` with the closed-form derivative."""
    return 1 / (theta_u(params.gamma, params, trunc) * theta_prime0(params, trunc))


def n1_closed_form(M: int, N: int, alpha: complex, params: ParameterSet, trunc: TruncationConfig = DEFAULT_TRUNC) -> complex:
    """``(-1)^(MN) F(M) F(N) / F(M + N)`` with ``F(K) = prod_{a<=K} theta((a-1) alpha + gamma) / theta(a alpha)``."""
    th = lambda w: theta_u(w, params, trunc)

    def F(K: int) -> complex:
        out = 1.0 + 0j
        for a in range(1, K + 1):
            den = th(a * alpha)
            guard_pole(den, 1.0, "closed form denominator")
            out *= th((a - 1) * alpha + params.gamma) / den
        return out

    return (-1) ** (M * N) * F(M) * F(N) / F(M + N)


def n1_constant_check(
    M: int, N: int, alpha: complex, params: ParameterSet, trunc: TruncationConfig = DEFAULT_TRUNC
) -> tuple[complex, float]:
    """Left side at ``u_a = a alpha`` minus its closed form; returns (difference, scale).

    Only the splitting ``I = {1..M}`` survives; ``scale`` is the larger of the
    largest summand and the closed-form magnitude.
    """
    u = np.array([[(a + 1) * alpha for a in range(M + N)]], dtype=complex)
    one = lambda v: 1.0
    lhs = side_sum(LEFT, u, M, one, one, alpha, params, trunc)
    closed = n1_closed_form(M, N, alpha, params, trunc)
    return lhs.value - closed, max(lhs.scale, abs(closed))


def ellipticity_check(
    M: int, N: int, alpha: complex, u_grid: np.ndarray, params: ParameterSet, trunc: TruncationConfig = DEFAULT_TRUNC
) -> tuple[complex, float]:
    """``Phi`` at a generic grid minus ``Phi`` at ``u_a = a alpha`` (n = 1, constant thetas).

    The left side alone has poles at ``u_a = u_b +- gamma``; only the
    difference of the two sides is a pole-free elliptic function, so it is
    the difference that must take the same value at both grids.
    """
    one = lambda v: 1.0
    special = np.array([[(a + 1) * alpha for a in range(M + N)]], dtype=complex)
    lg, rg = phi_components(1, M, N, alpha, u_grid, one, one, params, trunc)
    ls, rs = phi_components(1, M, N, alpha, special, one, one, params, trunc)
    scale = max(lg.scale, rg.scale, ls.scale, rs.scale)
    return (lg.value - rg.value) - (ls.value - rs.value), scale


def _shifted_theta(theta: ThetaFunction, shift: np.ndarray) -> ThetaFunction:
    return lambda v: theta(np.asarray(v, dtype=complex) + shift)


def residue_prefactor(u: np.ndarray, alpha: complex, params: ParameterSet, trunc: TruncationConfig = DEFAULT_TRUNC) -> complex:
    """The theta ratio multiplying ``A^n`` after the iterated residue.

    Columns are 0-based: the residue variable is column 0, its partner
    column 1.  The ratio is
    ``prod_i prod_{a>=1} theta(u[i,a] - u[i+1,1] - alpha) theta(u[i,1] - u[i+1,a] - alpha + gamma)``
    over ``prod_i prod_{a>=2} theta(u[i,a] - u[i,1]) theta(u[i,a] - u[i,1] - gamma)``.
    Both sides share it: on the right side the oddness of theta turns the
    mirrored factors back into these.
    """
    n, L = u.shape
    th = lambda w: theta_u(w, params, trunc)
    g_ = params.gamma
    out = 1.0 + 0j
    for i in range(n):
        nxt = u[(i + 1) % n]
        for a in range(1, L):
            out *= th(u[i, a] - nxt[1] - alpha) * th(u[i, 1] - nxt[a] - alpha + g_)
        for a in range(2, L):
            out /= th(u[i, a] - u[i, 1]) * th(u[i, a] - u[i, 1] - g_)
    return out


def iterated_residue(
    side: str,
    n: int,
    M: int,
    N: int,
    u_grid: np.ndarray,
    theta1,
    theta2,
    alpha: complex,
    params: ParameterSet,
    trunc: TruncationConfig = DEFAULT_TRUNC,
) -> complex:
    """Nested residues of one side at ``u[i,0] = u[i,1] + gamma``, row by row."""
    u0 = np.array(u_grid, dtype=complex)
    t1, t2 = as_theta(theta1, params), as_theta(theta2, params)

    def nested(row: int, u: np.ndarray) -> complex:
        if row == n:
            return side_sum(side, u, M, t1, t2, alpha, params, trunc).value

        def f(w: complex) -> complex:
            v = u.copy()
            v[row, 0] = w
            return nested(row + 1, v)

        return residue_at(f, u[row, 1] + params.gamma, trunc, min(trunc.residue_epsilon, NESTED_RESIDUE_EPSILON))

    return nested(0, u0)


def iterated_residue_check(
    n: int,
    M: int,
    N: int,
    u_grid: np.ndarray,
    theta1,
    theta2,
    alpha: complex,
    params: ParameterSet,
    side: str = LEFT,
    trunc: TruncationConfig = DEFAULT_TRUNC,
) -> tuple[complex, float]:
    """Residue of one side minus ``A^n`` times prefactor times the reduced side.

    The reduced side has ``M-1, N-1`` and uses the thetas shifted by column 1
    of each row; with both groups empty it is the product of the shifted
    thetas at zero, which the side sum produces by itself.  Returns (difference, magnitude of the closed form).
    """
    if M < 1 or N < 1:
        return 0j, 1.0
    u = np.array(u_grid, dtype=complex)
    if u.shape != (n, M + N):
        raise ValueError(f"grid shape {u.shape} does not match n={n}, M+N={M + N}")
    t1, t2 = as_theta(theta1, params), as_theta(theta2, params)
    res = iterated_residue(side, n, M, N, u, t1, t2, alpha, params, trunc)
    shift = u[:, 1]
    s1, s2 = _shifted_theta(t1, shift), _shifted_theta(t2, shift)
    rest = u[:, 2:]
    reduced = side_sum(side, rest, M - 1, s1, s2, alpha, params, trunc).value
    closed = residue_constant(params, trunc) ** n * residue_prefactor(u, alpha, params, trunc) * reduced
    return res - closed, abs(closed)


def merge_rows(
    n: int, i: int, s: complex, alpha: complex | Sequence[complex], M: int, N: int, theta1: ThetaFunction, theta2: ThetaFunction
):
    """Row bookkeeping for the specialization ``u[i+1] = u[i] - s``.

    Returns the kept row indices (cyclic order), the per-link alphas of the
    reduced system and the composed thetas on ``n - 1`` row sums.
    """
    alphas = _alphas(alpha, n)
    dropped = (i + 1) % n
    keep = [r for r in range(n) if r != dropped]
    new_alphas = []
    for r in keep:
        new_alphas.append(alphas[dropped] + s if (r + 1) % n == dropped else alphas[r])

    def compose(theta: ThetaFunction, K: int) -> ThetaFunction:
        def composed(v):
            full = np.empty(n, dtype=complex)
            for pos, r in enumerate(keep):
                full[r] = v[pos]
            full[dropped] = full[i] - K * s
            return theta(full)

        return composed

    return keep, np.array(new_alphas), compose(theta1, M), compose(theta2, N)


def specialization_check(
    n: int,
    M: int,
    N: int,
    i: int,
    variant: str,
    u_grid: np.ndarray,
    theta1,
    theta2,
    alpha: complex,
    params: ParameterSet,
    trunc: TruncationConfig = DEFAULT_TRUNC,
    sign: int | None = None,
) -> tuple[float, float]:
    """Row-merging reduction of both sides at ``u[i+1] = u[i] - s``.

    ``variant`` is ``"alpha"`` (``s = alpha``) or ``"alpha-gamma"``
    (``s = alpha - gamma``).  Each side must equal ``(-1)^(MN)`` times the
    same side of the ``n - 1`` row system with the merged link and composed
    thetas; ``sign`` overrides that factor (negative control).  Returns the
    larger normalized difference and the scale used.
    """
    if n < 2:
        raise DomainError("row merging needs n >= 2")
    s = {"alpha": alpha, "alpha-gamma": alpha - params.gamma}.get(variant)
    if s is None:
        raise ValueError("variant must be 'alpha' or 'alpha-gamma'")
    factor = (-1) ** (M * N) if sign is None else sign
    u = np.array(u_grid, dtype=complex)
    dropped = (i + 1) % n
    u[dropped] = u[i % n] - s
    t1, t2 = as_theta(theta1, params), as_theta(theta2, params)
    keep, new_alphas, c1, c2 = merge_rows(n, i % n, s, alpha, M, N, t1, t2)
    reduced_grid = u[keep]
    worst, worst_scale = 0.0, 0.0
    for side in SIDES:
        full = side_sum(side, u, M, t1, t2, alpha, params, trunc)
        reduced = side_sum(side, reduced_grid, M, c1, c2, new_alphas, params, trunc)
        scale = max(full.scale, reduced.scale)
        resid = abs(full.value - factor * reduced.value) / scale if scale > 0 else abs(full.value)
        if resid >= worst:
            worst, worst_scale = resid, scale
    return worst, worst_scale


def quasi_periodicity_check(
    side: str,
    n: int,
    M: int,
    N: int,
    u_grid: np.ndarray,
    theta1,
    theta2,
    alpha: complex,
    params: ParameterSet,
    row: int = 0,
    col: int = 0,
    trunc: TruncationConfig = DEFAULT_TRUNC,
) -> tuple[float, float]:
    """Relative residuals of the unit and tau shifts of one side in ``u[row, col]``.

    For ``n >= 2`` the tau shift multiplies by
    ``exp(-2 pi i (2 s_i - s_{i-1} - s_{i+1} - mu_i + tau))`` in the row sums
    ``s``; for ``n = 1`` both shifts are periods.
    """
    u = np.array(u_grid, dtype=complex)
    t1, t2 = as_theta(theta1, params), as_theta(theta2, params)
    base = side_sum(side, u, M, t1, t2, alpha, params, trunc)
    one = u.copy()
    one[row, col] += 1
    by_one = side_sum(side, one, M, t1, t2, alpha, params, trunc)
    tau = u.copy()
    tau[row, col] += params.tau
    by_tau = side_sum(side, tau, M, t1, t2, alpha, params, trunc)
    if n == 1:
        factor = 1.0
    else:
        s = u.sum(axis=1)
        factor = cmath.exp(
            -2j * math.pi * (2 * s[row] - s[(row - 1) % n] - s[(row + 1) % n] - params.mu[row] + params.tau)
        )
    scale = max(base.scale, abs(base.value))
    r1 = abs(by_one.value - base.value) / scale
    r2 = abs(by_tau.value - factor * base.value) / max(scale * abs(factor), by_tau.scale)
    return r1, r2


# ---------------------------------------------------------------- exchange-function relations


def xi_eta_relations(u: complex, i: int, params: ParameterSet, trunc: TruncationConfig = DEFAULT_TRUNC) -> dict[str, float]:
    """Relative residuals of the four relations between lambda, xi, eta and theta.

    Needs ``n >= 3`` so that ``i - 1``, ``i`` and ``i + 1`` are distinct colours.
    """
    n = params.n
    if n < 3:
        raise DomainError("the adjacent-colour relations need n >= 3")
    th = lambda w: theta_u(w, params, trunc)
    lam = lambda a, b, w: lambda_elliptic(a % n, b % n, w, params, trunc)
    g_, b_, lp = params.gamma, params.beta, params.log_p

    def rel(lhs: complex, rhs: complex) -> float:
        return abs(lhs - rhs) / max(abs(lhs), abs(rhs))

    out = {}
    out["lambda-diagonal-inversion"] = rel(lam(i, i, -u) / lam(i, i, u), th(u + g_) / th(u - g_))
    worst = 0.0
    for s in (1, -1):
        lhs = lam(i, i - s, -u) / lam(i, i + s, u)
        rhs = params.q_pow(2 * s * b_) * th(u + s * b_ - g_ / 2) / th(u + s * b_ + g_ / 2)
        worst = max(worst, rel(lhs, rhs))
    out["lambda-adjacent-inversion"] = worst
    lhs = lam(i, i, u) * xi(u, params, trunc) * xi(-u, params, trunc)
    rhs = -cmath.exp(lp * (-g_ * g_ / 2 - 3 * g_ / 2 - 1)) * th(u) * th(u - g_)
    out["lambda-xi-theta"] = rel(lhs, rhs)
    worst = 0.0
    for s in (1, -1):
        lhs = lam(i, i + s, -s * u) * th(u + s * g_ / 2 - b_)
        rhs = cmath.exp(lp * ((g_ / 2 - s * b_) ** 2 / 2 - (g_ / 2 - b_) / 2)) * eta(u, params, trunc)
        worst = max(worst, rel(lhs, rhs))
    out["lambda-eta-theta"] = worst
    return out
