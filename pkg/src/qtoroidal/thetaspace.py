"""The n-dimensional space of quasi-periodic theta functions in n variables.

An element is stored as a lattice Fourier series

    theta(u) = sum_k c_k exp(2 pi i k.u),   k in Z^n,  sum(k) = 0.

Integer ``k`` gives period 1 in each variable and ``sum(k) = 0`` gives
invariance under diagonal shifts.  Comparing Fourier coefficients of both
sides of the tau-shift rule in direction ``e_i`` yields

    c_{k + a_i} = c_k exp(2 pi i tau k_i) exp(-2 pi i (mu_i - tau)),

with ``a_i = 2 e_i - e_{i-1} - e_{i+1}`` (cyclic).  The vectors ``a_i`` span
a sublattice of index ``n`` in ``{sum(k) = 0}``; the cosets are labelled by
``sum_j j k_j mod n``.  Propagating the recursion from ``j (e_1 - e_0)``
and normalizing the dominant coefficient of the coset to 1 gives one basis
element per coset.  For ``n = 1`` the space is the constants.
"""

from __future__ import annotations

import cmath
import math
from collections import deque
from dataclasses import dataclass, replace
from typing import Any, Sequence

import numpy as np

from .errors import ConstructionError, StaleElementError
from .params import DEFAULT_TRUNC, ParameterSet, TruncationConfig, make_rng
from .report import CheckRecord, VerificationReport, digest, timed

TWO_PI_I = 2j * math.pi
SLOW_DECAY_LIMIT = 1 - 1e-6
COCYCLE_RTOL = 1e-9
TAIL_LIMIT = 1e-16
DIRECT_SERIES_LIMIT = 0.75
NEGLIGIBLE = 1e-250


@dataclass(frozen=True)
class ThetaElement:
    """Truncated Fourier series of one basis element.

    ``support`` is an ``(m, n)`` integer array and ``coeffs`` the matching
    complex coefficients.  ``tau`` and ``mu`` are kept so that evaluation far
    from the real torus can use the quasi-periodicity to move back.
    """

    n: int
    coset_label: int
    support: np.ndarray
    coeffs: np.ndarray
    params_fingerprint: str
    tau: complex
    mu: tuple[complex, ...]

    @property
    def coefficients(self) -> dict[tuple[int, ...], complex]:
        return {tuple(int(v) for v in k): complex(c) for k, c in zip(self.support, self.coeffs)}

    def __call__(self, u: Sequence[complex]) -> complex:
        return evaluate(self, u)

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "coset_label": self.coset_label,
            "params_fingerprint": self.params_fingerprint,
            "support": self.support.tolist(),
            "coefficients": [[c.real, c.imag] for c in self.coeffs.tolist()],
        }

    def with_coefficient(self, index: int, value: complex) -> "ThetaElement":
        """Copy with one coefficient replaced (used by falsification tests)."""
        coeffs = self.coeffs.copy()
        coeffs[index] = value
        return replace(self, coeffs=coeffs)


def root_vector(i: int, n: int) -> np.ndarray:
    a = np.zeros(n, dtype=np.int64)
    a[i] += 2
    a[(i - 1) % n] -= 1
    a[(i + 1) % n] -= 1
    return a


def coset_of(k: Sequence[int], n: int) -> int:
    return int(sum(j * int(v) for j, v in enumerate(k))) % n


def coset_representative(label: int, n: int) -> np.ndarray:
    rep = np.zeros(n, dtype=np.int64)
    if n > 1:
        rep[0] -= label
        rep[1] += label
    return rep


def _step_factor(k: np.ndarray, i: int, tau: complex, mu: Sequence[complex]) -> complex:
    """Ratio ``c_{k + a_i} / c_k``."""
    return cmath.exp(TWO_PI_I * tau * int(k[i]) - TWO_PI_I * (mu[i] - tau))


def _constant(params: ParameterSet) -> ThetaElement:
    return ThetaElement(
        n=1,
        coset_label=0,
        support=np.zeros((1, 1), dtype=np.int64),
        coeffs=np.ones(1, dtype=complex),
        params_fingerprint=params.fingerprint(),
        tau=params.tau,
        mu=params.mu,
    )


def _build_coset(label: int, params: ParameterSet, radius: int) -> ThetaElement:
    n, tau, mu = params.n, params.tau, params.mu
    roots = [root_vector(i, n) for i in range(n)]
    start = coset_representative(label, n)
    values: dict[tuple[int, ...], complex] = {tuple(start): 1.0 + 0j}
    queue = deque([start])
    while queue:
        k = queue.popleft()
        ck = values[tuple(k)]
        for i, a in enumerate(roots):
            for sign in (1, -1):
                nb = k + sign * a
                if np.abs(nb).max() > radius:
                    continue
                if sign > 0:
                    value = ck * _step_factor(k, i, tau, mu)
                else:
                    value = ck / _step_factor(nb, i, tau, mu)
                key = tuple(nb)
                if key in values:
                    old = values[key]
                    ref = max(abs(old), abs(value))
                    if ref > NEGLIGIBLE and abs(old - value) > COCYCLE_RTOL * ref:
                        raise ConstructionError(
                            f"inconsistent Fourier recursion at k={key}: {old} vs {value}"
                        )
                    continue
                values[key] = value
                queue.append(nb)
    support = np.array(sorted(values), dtype=np.int64)
    coeffs = np.array([values[tuple(k)] for k in support], dtype=complex)
    peak = np.abs(coeffs).max()
    boundary = np.abs(support).max(axis=1) == radius
    if boundary.any() and np.abs(coeffs[boundary]).max() > TAIL_LIMIT * peak:
        raise ConstructionError(
            f"Fourier tail not negligible at cutoff {radius}; increase fourier_cutoff"
        )
    # Normalize at the dominant lattice point of the coset, which serves as
    # its representative; this keeps the basis elements comparable in size.
    coeffs = coeffs / coeffs[int(np.abs(coeffs).argmax())]
    keep = np.abs(coeffs) > NEGLIGIBLE
    return ThetaElement(
        n=n,
        coset_label=label,
        support=support[keep],
        coeffs=coeffs[keep],
        params_fingerprint=params.fingerprint(),
        tau=tau,
        mu=params.mu,
    )


def build_basis(params: ParameterSet, trunc: TruncationConfig = DEFAULT_TRUNC) -> list[ThetaElement]:
    """One element per coset of the root lattice; the constant 1 for ``n = 1``.

    Raises:
        ConstructionError: ``tau`` too close to the real axis, an inconsistent
            recursion, or a non-negligible tail at the cutoff.
    """
    if params.n == 1:
        return [_constant(params)]
    nome = abs(cmath.exp(TWO_PI_I * params.tau))
    if nome >= SLOW_DECAY_LIMIT:
        raise ConstructionError(
            f"|exp(2 pi i tau)| = {nome:.8f}: tau is too close to the real axis"
        )
    return [_build_coset(label, params, trunc.fourier_cutoff) for label in range(params.n)]


def series(elem: ThetaElement, u: Sequence[complex]) -> complex:
    """Raw truncated Fourier sum at ``u`` (no argument reduction)."""
    u = np.asarray(u, dtype=complex)
    if u.shape != (elem.n,):
        raise ValueError(f"expected {elem.n} coordinates, got shape {u.shape}")
    phases = np.exp(TWO_PI_I * (elem.support @ u))
    return complex(elem.coeffs @ phases)


def tau_multiplier_log(u: np.ndarray, i: int, tau: complex, mu: Sequence[complex]) -> complex:
    """Logarithm of the factor picked up by ``theta(u + tau e_i) / theta(u)``."""
    n = len(u)
    return -TWO_PI_I * (2 * u[i] - u[(i - 1) % n] - u[(i + 1) % n] - mu[i] + tau)


def evaluate(
    elem: ThetaElement, u: Sequence[complex], params: ParameterSet | None = None
) -> complex:
    """Value of ``elem`` at ``u``.

    Coordinates are first centred (diagonal invariance).  If some coordinate
    still lies far from the real torus, it is moved back by whole multiples
    of ``tau`` using the quasi-periodicity, so the truncated series is only
    summed where it converges quickly.
    """
    if params is not None and params.fingerprint() != elem.params_fingerprint:
        raise StaleElementError("theta element was built for a different parameter set")
    u = np.asarray(u, dtype=complex)
    if u.shape != (elem.n,):
        raise ValueError(f"expected {elem.n} coordinates, got shape {u.shape}")
    if elem.n == 1:
        return complex(elem.coeffs[0])
    v = u - u.mean()
    shifts = np.rint(v.imag / elem.tau.imag).astype(int)
    if np.abs(v.imag / elem.tau.imag).max() <= DIRECT_SERIES_LIMIT or not shifts.any():
        return series(elem, v)
    log_factor = 0j
    for i, m in enumerate(shifts):
        step = -1 if m > 0 else 1
        for _ in range(abs(int(m))):
            # theta(v) = M_i(v - tau e_i) theta(v - tau e_i) and its inverse.
            if step < 0:
                v[i] -= elem.tau
                log_factor += tau_multiplier_log(v, i, elem.tau, elem.mu)
            else:
                log_factor -= tau_multiplier_log(v, i, elem.tau, elem.mu)
                v[i] += elem.tau
    return cmath.exp(log_factor) * series(elem, v)


def random_torus_point(rng: np.random.Generator, n: int, tau: complex, spread: float = 0.5) -> np.ndarray:
    """Random ``u`` with coordinates ``a + b tau``, ``a in [0,1)``, ``|b| <= spread``."""
    a = rng.uniform(0.0, 1.0, size=n)
    b = rng.uniform(-spread, spread, size=n)
    return a + b * tau


def _relative(lhs: complex, rhs: complex) -> float:
    ref = max(abs(lhs), abs(rhs))
    return abs(lhs - rhs) / ref if ref > 0 else 0.0


def check_quasiperiodicity(
    elem: ThetaElement,
    params: ParameterSet,
    trials: int = 50,
    seed: int = 0,
    tolerance: float = 1e-8,
) -> VerificationReport:
    """Compare the raw series on both sides of both period rules.

    Records the maximum relative residual over ``trials`` random points and
    all directions, separately for the 1-shift and the tau-shift.  For
    ``n = 1`` both periods are exact.
    """
    if params.fingerprint() != elem.params_fingerprint:
        raise StaleElementError("theta element was built for a different parameter set")
    rng = make_rng(seed, "theta-quasiperiodicity", elem.n, elem.coset_label)
    fp = params.fingerprint()
    worst_one = worst_tau = 0.0
    with timed() as clock:
        for _ in range(trials):
            u = random_torus_point(rng, elem.n, params.tau)
            base = series(elem, u)
            for i in range(elem.n):
                e = np.zeros(elem.n)
                e[i] = 1.0
                worst_one = max(worst_one, _relative(series(elem, u + e), base))
                if elem.n == 1:
                    expected = base
                else:
                    expected = cmath.exp(tau_multiplier_log(u, i, params.tau, params.mu)) * base
                worst_tau = max(worst_tau, _relative(series(elem, u + params.tau * e), expected))
    report = VerificationReport()
    for name, value in (("theta-period-one", worst_one), ("theta-period-tau", worst_tau)):
        report.add(
            CheckRecord(
                name=name,
                anchor="theta-space period rules",
                fingerprint=fp,
                inputs_digest=digest(elem.n, elem.coset_label, trials, seed),
                scale=1.0,
                residual=value,
                tolerance=tolerance,
                seed=seed,
                detail=f"n={elem.n}, coset {elem.coset_label}, {trials} trials",
                wall_time=clock[0] / 2,
            )
        )
    return report


def diagonal_invariance_residual(
    elem: ThetaElement, params: ParameterSet, trials: int = 20, seed: int = 0
) -> float:
    """Max relative change of the raw series under random diagonal shifts."""
    rng = make_rng(seed, "theta-diagonal", elem.n, elem.coset_label)
    worst = 0.0
    for _ in range(trials):
        u = random_torus_point(rng, elem.n, params.tau)
        c = complex(rng.uniform(-1, 1), rng.uniform(-0.2, 0.2) * params.tau.imag)
        worst = max(worst, _relative(series(elem, u + c), series(elem, u)))
    return worst


def basis_matrix(basis: Sequence[ThetaElement], points: Sequence[Sequence[complex]]) -> np.ndarray:
    """Matrix of basis values, one row per point."""
    return np.array([[evaluate(e, pt) for e in basis] for pt in points], dtype=complex)


def numerical_rank(matrix: np.ndarray, ratio: float = 1e-6) -> tuple[int, np.ndarray]:
    """Rank counting singular values above ``ratio * sigma_max``."""
    sv = np.linalg.svd(matrix, compute_uv=False)
    if sv.size == 0 or sv[0] == 0:
        return 0, sv
    return int((sv / sv[0] > ratio).sum()), sv
