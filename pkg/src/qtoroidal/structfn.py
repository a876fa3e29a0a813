"""Structure functions and the closed-form identities among them.

Rational structure functions are represented as :class:`LinearRational`
objects (a constant times products of linear factors ``1 - a x``), so that
callers can inspect zeros and poles as well as evaluate.  Every evaluator
dispatches on the rank stored in the parameter set: ``n >= 3``, ``n == 2``
and ``n == 1`` use different formulas.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import PoleError
from .params import DEFAULT_TRUNC, ParameterSet, TruncationConfig, make_rng
from .report import CheckRecord, VerificationReport, digest, normalized, timed
from .special import POLE_THRESHOLD, guard_pole, qpochhammer

EQUAL, NEXT, PREV, FAR, OTHER = "equal", "next", "prev", "far", "other"


def relation(i: int, j: int, n: int) -> str:
    """Relation class of colours ``i``, ``j`` modulo ``n``.

    ``n >= 3``: one of equal / next (j = i+1) / prev (j = i-1) / far.
    ``n == 2``: equal or other.  ``n == 1``: always equal.
    """
    if n < 1:
        raise ValueError("n must be positive")
    delta = (j - i) % n
    if delta == 0:
        return EQUAL
    if n == 2:
        return OTHER
    if delta == 1:
        return NEXT
    if delta == n - 1:
        return PREV
    return FAR


@dataclass(frozen=True)
class LinearRational:
    """``const * prod(1 - a x for a in zeros) / prod(1 - b x for b in poles)``."""

    const: complex = 1.0
    zeros: tuple[complex, ...] = ()
    poles: tuple[complex, ...] = ()

    def __call__(self, x: complex) -> complex:
        x = complex(x)
        value = complex(self.const)
        for a in self.zeros:
            value *= 1 - a * x
        for b in self.poles:
            den = 1 - b * x
            if abs(den) <= POLE_THRESHOLD * max(1.0, abs(b * x)):
                raise PoleError(f"pole at x = {1 / b}")
            value /= den
        return value

    def __mul__(self, other: "LinearRational") -> "LinearRational":
        return LinearRational(
            self.const * other.const, self.zeros + other.zeros, self.poles + other.poles
        )

    def inverse(self) -> "LinearRational":
        return LinearRational(1 / self.const, self.poles, self.zeros)

    def order_at(self, x0: complex, rtol: float = 1e-8) -> int:
        """Net order (zeros minus poles) of the factor list at ``x0``."""
        def hits(values: Sequence[complex]) -> int:
            return sum(1 for a in values if abs(1 - a * x0) <= rtol * max(1.0, abs(a * x0)))

        return hits(self.zeros) - hits(self.poles)


ONE = LinearRational()


def _adjacent_sign(rel: str) -> int:
    return 1 if rel == NEXT else -1


# ---------------------------------------------------------------- g, G, d


def g(i: int, j: int, z: complex, w: complex, params: ParameterSet) -> complex:
    """Polynomial structure function ``g_{i,j}(z, w)``."""
    n = params.n
    q1, q2, q3 = params.q1, params.q2, params.q3
    if n == 1:
        return (z - q1 * w) * (z - q2 * w) * (z - q3 * w)
    rel = relation(i, j, n)
    if rel == EQUAL:
        return z - q2 * w
    if rel == OTHER:
        return (z - q1 * w) * (z - q3 * w)
    if rel == NEXT:
        return z - q1 * w
    if rel == PREV:
        return z - q3 * w
    return z - w


def G_factors(i: int, j: int, params: ParameterSet) -> LinearRational:
    """``G_{i,j}`` as a linear-factor rational function of ``x``."""
    n = params.n
    q, q1, q2, q3 = params.q, params.q1, params.q2, params.q3
    if n == 1:
        return LinearRational(1.0, (1 / q1, 1 / q2, 1 / q3), (q1, q2, q3))
    rel = relation(i, j, n)
    if rel == EQUAL:
        return LinearRational(q2, (1 / q2,), (q2,))
    if rel == OTHER:
        return LinearRational(1 / q2, (1 / q1, 1 / q3), (q1, q3))
    if rel == NEXT:
        return LinearRational(1 / q, (1 / q3,), (q1,))
    if rel == PREV:
        return LinearRational(1 / q, (1 / q1,), (q3,))
    return ONE


def G(i: int, j: int, x: complex, params: ParameterSet) -> complex:
    """Rational structure function ``G_{i,j}(x)``; raises PoleError at poles."""
    return G_factors(i, j, params)(x)


def d_factor(i: int, j: int, params: ParameterSet) -> complex:
    """Sign/twist factor ``d_{i,j}``: ``d`` for ``j = i-1``, ``1/d`` for ``j = i+1``."""
    n = params.n
    if n == 1:
        return 1.0
    rel = relation(i, j, n)
    if rel == OTHER:
        return -1.0
    if rel == PREV:
        return params.d
    if rel == NEXT:
        return 1 / params.d
    return 1.0


# ---------------------------------------------------------------- lambda^0 and elliptic lambda


def lambda0_factors(i: int, j: int, params: ParameterSet) -> LinearRational:
    """Rational exchange function ``lambda^0_{i,j}`` (uses the set's ``C``)."""
    n = params.n
    C2 = params.C2
    q1, q2, q3 = params.q1, params.q2, params.q3
    if n == 1:
        return LinearRational(1.0, (C2, 1 / C2, q1, q2, q3), (1.0,) * 5)
    rel = relation(i, j, n)
    if rel == EQUAL:
        return LinearRational(1.0, (C2, 1 / C2, q2), (1.0, 1.0, 1.0))
    if rel == OTHER:
        return LinearRational(1.0, (q1, q3), (1.0, 1.0))
    if rel in (NEXT, PREV):
        s = _adjacent_sign(rel)
        return LinearRational(params.d_pow(-s / 2), (q1 if s > 0 else q3,), (1.0,))
    return ONE


def lambda0(i: int, j: int, x: complex, params: ParameterSet) -> complex:
    return lambda0_factors(i, j, params)(x)


def _poch_ratio(
    tops: Sequence[complex], bottoms: Sequence[complex], params: ParameterSet, trunc: TruncationConfig
) -> complex:
    den = qpochhammer(bottoms, params, trunc)
    guard_pole(den, 1.0, "q-Pochhammer denominator")
    return qpochhammer(tops, params, trunc) / den


def lambda_elliptic(
    i: int, j: int, u: complex, params: ParameterSet, trunc: TruncationConfig = DEFAULT_TRUNC
) -> complex:
    """Elliptic exchange function ``lambda_{i,j}(p**u)``.

    The power ``x**w`` is taken as ``exp(w u log p)``.
    """
    n = params.n
    u = complex(u)
    x = params.p_pow(u)
    q, d = params.q, params.d
    q1, q2, q3 = params.q1, params.q2, params.q3
    if n == 1:
        base = lambda0_factors(i, j, params)(x)
        return base * _poch_ratio(
            (x / q1, x / q2, x / q3), (q1 * x, q2 * x, q3 * x), params, trunc
        )
    rel = relation(i, j, n)
    if rel == FAR:
        return 1.0
    base = lambda0_factors(i, j, params)(x)
    g_ = params.gamma
    if rel == EQUAL:
        power = cmath.exp(-g_ * u * params.log_p)
        return power * base * _poch_ratio((x / q2,), (q2 * x,), params, trunc)
    if rel == OTHER:
        power = cmath.exp(g_ * u * params.log_p)
        return power * base * _poch_ratio((x / q1, x / q3), (q1 * x, q3 * x), params, trunc)
    s = _adjacent_sign(rel)
    ds = d if s > 0 else 1 / d
    power = cmath.exp(g_ / 2 * u * params.log_p)
    return power * base * _poch_ratio((q * ds * x,), (ds / q * x,), params, trunc)


# ---------------------------------------------------------------- square-root factor of G


def G_tilde_factors(i: int, j: int, params: ParameterSet) -> LinearRational:
    """Factor ``G~_{i,j}`` with ``G(x) = G~(x) G~(x/q)``.

    For ``n == 2`` the off-diagonal factor is the product of the two adjacent
    forms, and for ``n == 1`` the product of the diagonal and both adjacent
    forms, mirroring how ``G`` itself is assembled in those ranks.
    """
    n = params.n
    q, d = params.q, params.d
    diag = LinearRational(q, (1 / q, q), (1.0, q * q))
    plus = LinearRational(params.q_pow(-0.5), (q * d,), (d,))
    minus = LinearRational(params.q_pow(-0.5), (q / d,), (1 / d,))
    if n == 1:
        return diag * plus * minus
    rel = relation(i, j, n)
    if rel == EQUAL:
        return diag
    if rel == OTHER:
        return plus * minus
    if rel == NEXT:
        return plus
    if rel == PREV:
        return minus
    return ONE


def G_tilde(i: int, j: int, x: complex, params: ParameterSet) -> complex:
    return G_tilde_factors(i, j, params)(x)


# ---------------------------------------------------------------- rank-specific extras


def serre_X_n1(z1: complex, z2: complex, z3: complex, params: ParameterSet) -> complex:
    """Rank-one Serre kernel ``X(z1, z2, z3)`` (homogeneous of degree 0)."""
    if params.n != 1:
        raise ValueError("serre_X_n1 requires a rank-one parameter set")
    prod = z1 * z2 * z3
    return (
        (z1 + z2) * (z3 * z3 - z1 * z2) / prod * G(0, 0, z2 / z3, params)
        + (z2 + z3) * (z1 * z1 - z2 * z3) / prod * G(0, 0, z1 / z2, params)
        + (z3 + z1) * (z2 * z2 - z3 * z1) / prod
    )


def serre_coefficients_n2(
    z1: complex, z2: complex, w: complex, params: ParameterSet, swap: bool = False
) -> tuple[complex, complex, complex]:
    """Coefficients of the three orderings in the rank-two cubic Serre relation.

    Returns the polynomials multiplying ``E_i(z1)E_i(z2)E_{1-i}(w)``,
    ``E_i(z1)E_{1-i}(w)E_i(z2)`` and ``E_{1-i}(w)E_i(z1)E_i(z2)``.  With
    ``swap`` the roles of ``q1`` and ``q3`` are exchanged.
    """
    q1, q2, q3 = params.q1, params.q2, params.q3
    if swap:
        q1, q3 = q3, q1
    return (
        q1 * (z1 - q3 * w) * (z2 - q3 * w),
        -(1 + 1 / q2) * (z1 - q3 * w) * (q1 * z2 - w),
        q3 * (q1 * z1 - w) * (q1 * z2 - w),
    )


# ---------------------------------------------------------------- fusion identities


def fusion_products(i: int, x: complex, params: ParameterSet) -> tuple[complex, complex]:
    """The two three-factor G products that equal one identically."""
    q1, q3 = params.q1, params.q3
    n = params.n
    first = G(i, (i - 1) % n, q1 * x, params) * G(i, i, x, params) * G(i, (i + 1) % n, x / q1, params)
    second = G((i - 1) % n, i, q3 * x, params) * G(i, i, x, params) * G(i, (i + 1) % n, x / q1, params)
    return first, second


def fusion_wrong_shift(i: int, x: complex, params: ParameterSet) -> complex:
    """Falsification product with the shift of the first factor replaced."""
    n = params.n
    return (
        G(i, (i - 1) % n, params.q3 * x, params)
        * G(i, i, x, params)
        * G(i, (i + 1) % n, x / params.q1, params)
    )


def random_ratio(rng: np.random.Generator) -> complex:
    """A random ratio argument with modulus in [0.2, 2] and random phase."""
    return complex(cmath.rect(rng.uniform(0.2, 2.0), rng.uniform(-np.pi, np.pi)))


def check_fusion_identities(
    params: ParameterSet,
    samples: int = 100,
    seed: int = 0,
    tolerance: float = 1e-11,
) -> VerificationReport:
    """Evaluate both fusion products at random points for every colour.

    Adds one record per colour and identity (max ``|product - 1|``) and one
    negative control per colour with a wrong shift.
    """
    if params.n < 3:
        raise ValueError("fusion identities are checked for n >= 3")
    report = VerificationReport()
    rng = make_rng(seed, "fusion", params.n)
    fp = params.fingerprint()
    for i in range(params.n):
        points: list[complex] = []
        while len(points) < samples:
            x = random_ratio(rng)
            try:
                fusion_products(i, x, params)
                fusion_wrong_shift(i, x, params)
            except PoleError:
                continue
            points.append(x)
        for k, name in enumerate(("fusion-forward", "fusion-backward")):
            with timed() as clock:
                residual = max(abs(fusion_products(i, x, params)[k] - 1) for x in points)
            report.add(
                CheckRecord(
                    name=name,
                    anchor="three-factor G product equals one",
                    fingerprint=fp,
                    inputs_digest=digest(i, points),
                    scale=1.0,
                    residual=residual,
                    tolerance=tolerance,
                    seed=seed,
                    detail=f"colour {i}, {samples} points",
                    wall_time=clock[0],
                )
            )
        with timed() as clock:
            residual = max(abs(fusion_wrong_shift(i, x, params) - 1) for x in points)
        report.add(
            CheckRecord(
                name="fusion-wrong-shift",
                anchor="negative control for the fusion products",
                fingerprint=fp,
                inputs_digest=digest(i, points),
                scale=1.0,
                residual=normalized(residual, 1.0),
                tolerance=1e-3,
                control=True,
                seed=seed,
                detail=f"colour {i}",
                wall_time=clock[0],
            )
        )
    return report
