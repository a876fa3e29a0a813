"""Truncated q-Pochhammer products, theta functions and residue helpers.

All theta-type functions take the additive coordinate ``u`` and form
``x = p**u`` internally from the stored ``log p``, so prefactors such as
``p**(u*u/2)`` are single valued.  No argument reduction is performed:
values are always computed directly from the defining products, which keeps
the quasi-periodicity checks honest.
"""

from __future__ import annotations

import cmath
from functools import lru_cache
from typing import Callable, Iterable

import numpy as np

from .errors import DomainError, PoleError, ResidueError
from .params import DEFAULT_TRUNC, ParameterSet, TruncationConfig

POLE_THRESHOLD = 1e-13


def guard_pole(denominator: complex, reference: float, what: str) -> None:
    """Raise :class:`PoleError` when ``denominator`` is numerically zero."""
    if abs(denominator) <= POLE_THRESHOLD * max(1.0, reference):
        raise PoleError(f"pole of {what}")


@lru_cache(maxsize=512)
def _powers(p: complex, order: int) -> np.ndarray:
    return np.power(complex(p), np.arange(order))


def qpochhammer(
    z: complex | Iterable[complex],
    params: ParameterSet,
    trunc: TruncationConfig = DEFAULT_TRUNC,
) -> complex:
    """``(z_1, ..., z_r; p)_inf`` truncated to ``trunc.product_order`` factors each."""
    powers = _powers(params.p, trunc.product_order)
    zs = np.atleast_1d(np.asarray(z, dtype=complex))
    return complex(np.prod(1.0 - np.multiply.outer(zs, powers)))


def theta_big(z: complex, params: ParameterSet, trunc: TruncationConfig = DEFAULT_TRUNC) -> complex:
    """``Theta_p(z) = (z, p/z, p; p)_inf``."""
    z = complex(z)
    if z == 0:
        raise DomainError("Theta_p is undefined at z = 0")
    return qpochhammer((z, params.p / z, params.p), params, trunc)


def theta_u(u: complex, params: ParameterSet, trunc: TruncationConfig = DEFAULT_TRUNC) -> complex:
    """Additive theta function ``p**(u^2/2 - u/2) * Theta_p(p**u)``.

    It is odd, vanishes on ``Z + Z tau`` and obeys ``theta(u+1) = -theta(u)``.
    """
    u = complex(u)
    x = params.p_pow(u)
    return cmath.exp(params.log_p * (u * u / 2 - u / 2)) * theta_big(x, params, trunc)


def theta_prime0(params: ParameterSet, trunc: TruncationConfig = DEFAULT_TRUNC) -> complex:
    """Closed form of ``theta'(0) = -log(p) * (p; p)_inf**3``."""
    return -params.log_p * qpochhammer(params.p, params, trunc) ** 3


def xi(u: complex, params: ParameterSet, trunc: TruncationConfig = DEFAULT_TRUNC) -> complex:
    """Weight ``p**(u^2/2) (1-x) (x, p^2 q^2 x, p; p)_inf`` with ``x = p**u``."""
    u = complex(u)
    x = params.p_pow(u)
    p2q2 = cmath.exp(2 * params.log_p + 2 * params.log_q)
    prods = qpochhammer((x, p2q2 * x, params.p), params, trunc)
    return cmath.exp(params.log_p * u * u / 2) * (1 - x) * prods


def eta(u: complex, params: ParameterSet, trunc: TruncationConfig = DEFAULT_TRUNC) -> complex:
    """Weight ``p**(u^2/2-(beta+1/2)u) d**(-1/2) / (1 - 1/x) * (q x/d, q d/x, p; p)_inf``."""
    u = complex(u)
    x = params.p_pow(u)
    den = 1 - 1 / x
    guard_pole(den, 1.0, "eta at x = 1")
    q, d = params.q, params.d
    prods = qpochhammer((q / d * x, q * d / x, params.p), params, trunc)
    pref = cmath.exp(params.log_p * (u * u / 2 - (params.beta + 0.5) * u) - params.log_d / 2)
    return pref * prods / den


def central_difference(f: Callable[[complex], complex], u: complex, h: float = 1e-5) -> complex:
    """Fourth-order central difference approximation of ``f'(u)``."""
    return (-f(u + 2 * h) + 8 * f(u + h) - 8 * f(u - h) + f(u - 2 * h)) / (12 * h)


def residue_at(
    f: Callable[[complex], complex],
    u0: complex,
    trunc: TruncationConfig = DEFAULT_TRUNC,
    epsilon: float | None = None,
) -> complex:
    """Residue of ``f`` at a simple pole ``u0`` by averaging on a small circle.

    The mean of ``(u - u0) f(u)`` over ``N`` equally spaced points of radius
    ``epsilon`` equals the residue up to terms of order ``epsilon**N``.  The
    4-point and 8-point means must agree, and the ``(u - u0)**-2`` Laurent
    coefficient must be negligible; otherwise :class:`ResidueError` is raised.
    A function regular at ``u0`` yields a residue of (numerically) zero.
    """
    r = trunc.residue_epsilon if epsilon is None else epsilon
    u0 = complex(u0)
    offsets = r * np.exp(2j * np.pi * np.arange(8) / 8)
    weighted = np.array([h * f(u0 + h) for h in offsets])
    est8 = complex(weighted.mean())
    est4 = complex(weighted[::2].mean())
    second = complex((weighted * offsets).mean())
    reference = float(np.abs(weighted).max())
    bound = 10 * trunc.tolerance_rel * reference
    if abs(est4 - est8) > bound:
        raise ResidueError(
            f"4- and 8-point residue estimates disagree at u0={u0}: {est4} vs {est8}"
        )
    if abs(second) > bound * r:
        raise ResidueError(f"not a simple pole at u0={u0}: second-order coefficient {second}")
    return est8
