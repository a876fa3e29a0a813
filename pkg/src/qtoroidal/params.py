"""Global parameters, their derived quantities and the admissible region.

Every fractional power used anywhere in the package is computed as
``exp(w * log)`` from one of the three logarithms stored on a
:class:`ParameterSet` (``log_p``, ``log_q``, ``log_d``).  Other modules must
never take logarithms of products of parameters themselves; this keeps all
multivalued expressions on one coherent branch.

``log_p`` is fixed to ``-2*pi*i/tau`` so that ``p**tau == 1`` holds on the
chosen branch, which is what makes ``theta(u + tau)`` well defined.
``log_q`` and ``log_d`` are twice the principal logarithms of the supplied
square roots ``q_half`` and ``d_half``.
"""

from __future__ import annotations

import cmath
import hashlib
import json
import math
import zlib
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Sequence

import numpy as np

from .errors import RegionError, SamplingError

GENERICITY_RANGE = 6
GENERICITY_THRESHOLD = 1e-6
MAX_SAMPLING_ATTEMPTS = 10_000
SAMPLED_P_BOUND = 0.5


@dataclass(frozen=True)
class TruncationConfig:
    """Numerical truncation and tolerance settings.

    Attributes:
        product_order: number of factors kept in every q-Pochhammer product.
        fourier_cutoff: box radius of the lattice support of theta elements.
        tolerance_abs: absolute tolerance; also bounds the dropped product tail.
        tolerance_rel: relative tolerance used by contour estimates.
        residue_epsilon: circle radius used for limit-based residues.
    """

    product_order: int = 64
    fourier_cutoff: int = 8
    tolerance_abs: float = 1e-14
    tolerance_rel: float = 1e-9
    residue_epsilon: float = 1e-3

    def __post_init__(self) -> None:
        if self.product_order < 1:
            raise ValueError("product_order must be at least 1")
        if self.fourier_cutoff < 1:
            raise ValueError("fourier_cutoff must be at least 1")
        if not (self.tolerance_abs > 0 and self.tolerance_rel > 0):
            raise ValueError("tolerances must be positive")
        if not self.residue_epsilon > 0:
            raise ValueError("residue_epsilon must be positive")

    def check_against(self, params: "ParameterSet") -> None:
        """Raise if the product tail ``|p|**product_order`` is not negligible."""
        tail = abs(params.p) ** self.product_order
        if tail >= self.tolerance_abs:
            raise ValueError(
                f"product_order={self.product_order} leaves a tail |p|^order={tail:.3e} "
                f"above tolerance_abs={self.tolerance_abs:.1e}"
            )

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


DEFAULT_TRUNC = TruncationConfig()


def _pair(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _unpair(v: Sequence[float]) -> complex:
    return complex(v[0], v[1])


@dataclass(frozen=True)
class ParameterSet:
    """Validated global parameters plus derived quantities.

    Build instances with :func:`build_params` or :func:`sample_params`;
    the constructor does no validation of its own.
    """

    n: int
    q_half: complex
    d_half: complex
    tau: complex
    C: complex
    mu: tuple[complex, ...]
    im_context: bool
    log_p: complex
    log_q: complex
    log_d: complex
    p: complex = field(init=False)
    q: complex = field(init=False)
    d: complex = field(init=False)
    gamma: complex = field(init=False)
    beta: complex = field(init=False)
    q1: complex = field(init=False)
    q2: complex = field(init=False)
    q3: complex = field(init=False)

    def __post_init__(self) -> None:
        set_ = object.__setattr__
        set_(self, "p", cmath.exp(self.log_p))
        set_(self, "q", cmath.exp(self.log_q))
        set_(self, "d", cmath.exp(self.log_d))
        set_(self, "gamma", 2 * self.log_q / self.log_p)
        set_(self, "beta", self.log_d / self.log_p)
        set_(self, "q1", cmath.exp(self.log_d - self.log_q))
        set_(self, "q2", cmath.exp(2 * self.log_q))
        set_(self, "q3", cmath.exp(-self.log_d - self.log_q))

    def p_pow(self, w: complex) -> complex:
        return cmath.exp(w * self.log_p)

    def q_pow(self, w: complex) -> complex:
        return cmath.exp(w * self.log_q)

    def d_pow(self, w: complex) -> complex:
        return cmath.exp(w * self.log_d)

    @property
    def C2(self) -> complex:
        return self.C * self.C

    def with_C(self, C: complex) -> "ParameterSet":
        """Copy with an explicit central scalar (leaves the IM context)."""
        return replace(self, C=complex(C), im_context=False)

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "q_half": _pair(self.q_half),
            "d_half": _pair(self.d_half),
            "tau": _pair(self.tau),
            "C": _pair(self.C),
            "C_branch": "principal sqrt of p*q^2" if self.im_context else "explicit",
            "mu": [_pair(m) for m in self.mu],
            "im_context": self.im_context,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ParameterSet":
        return build_params(
            data["n"],
            _unpair(data["q_half"]),
            _unpair(data["d_half"]),
            _unpair(data["tau"]),
            [_unpair(m) for m in data["mu"]],
            im_context=data["im_context"],
            C=None if data["im_context"] else _unpair(data["C"]),
        )

    def fingerprint(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def region_violations(params: ParameterSet) -> list[str]:
    """Names of the region inequalities that fail (empty when admissible)."""
    p, q, d = params.p, params.q, params.d
    checks = [
        ("|p|<1", abs(p)),
        ("|q^2|<1", abs(q * q)),
        ("|q d|<1", abs(q * d)),
        ("|q d^-1|<1", abs(q / d)),
        ("|p q^-2|<1", abs(p / (q * q))),
        ("|p q^-1 d|<1", abs(p * d / q)),
        ("|p q^-1 d^-1|<1", abs(p / (q * d))),
    ]
    return [name for name, value in checks if not value < 1.0]


def build_params(
    n: int,
    q_half: complex,
    d_half: complex,
    tau: complex,
    mu: Sequence[complex],
    im_context: bool = True,
    C: complex | None = None,
) -> ParameterSet:
    """Validate raw inputs and derive every dependent quantity.

    In the integrals-of-motion context ``C`` is the principal square root of
    ``p q^2``; otherwise it must be supplied.

    Raises:
        RegionError: a region inequality fails (the message names it),
            ``Im tau <= 0``, or ``sum(mu) != 0``.
        ValueError: malformed arguments.
    """
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    tau = complex(tau)
    if not tau.imag > 0:
        raise RegionError(f"Im tau must be positive, got tau={tau}")
    mu = tuple(complex(m) for m in mu)
    if len(mu) != n:
        raise ValueError(f"mu must have length n={n}, got {len(mu)}")
    mu_scale = max(1.0, sum(abs(m) for m in mu))
    if abs(sum(mu)) > 1e-12 * mu_scale:
        raise RegionError(f"sum(mu) must vanish, got {sum(mu)}")
    q_half, d_half = complex(q_half), complex(d_half)
    if q_half == 0 or d_half == 0:
        raise RegionError("q and d must be nonzero")

    log_p = -2j * math.pi / tau
    log_q = 2 * cmath.log(q_half)
    log_d = 2 * cmath.log(d_half)
    if im_context:
        C_value = cmath.exp((log_p + 2 * log_q) / 2)
        if C is not None and abs(complex(C) - C_value) > 1e-12 * abs(C_value):
            raise ValueError("explicit C conflicts with C^2 = p q^2 in the IM context")
    else:
        if C is None:
            raise ValueError("C must be supplied outside the IM context")
        C_value = complex(C)
        if C_value == 0:
            raise RegionError("C must be nonzero")

    params = ParameterSet(
        n=n,
        q_half=q_half,
        d_half=d_half,
        tau=tau,
        C=C_value,
        mu=mu,
        im_context=bool(im_context),
        log_p=log_p,
        log_q=log_q,
        log_d=log_d,
    )
    failed = region_violations(params)
    if failed:
        raise RegionError("parameter region violated: " + ", ".join(failed))
    return params


def _stream_key(part: Any) -> int:
    if isinstance(part, (int, np.integer)):
        return int(part) & 0xFFFFFFFF
    return zlib.crc32(str(part).encode())


def make_rng(seed: int, *stream: Any) -> np.random.Generator:
    """Independent deterministic generator for ``seed`` and a named stream.

    Streams are children of one ``SeedSequence`` per seed, so each consumer
    (parameters, grids, test points, ...) draws from its own reproducible
    substream and no global state is involved.
    """
    if int(seed) < 0 or int(seed) >= 2**64:
        raise ValueError(f"seed must be a 64-bit unsigned value, got {seed}")
    key = tuple(_stream_key(s) for s in stream)
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=key))


def is_generic(q1: complex, q2: complex) -> bool:
    """True unless ``q1**i * q2**j`` is within the threshold of 1 for small i, j."""
    r = GENERICITY_RANGE
    for i in range(-r, r + 1):
        for j in range(-r, r + 1):
            if (i, j) == (0, 0):
                continue
            if abs(q1**i * q2**j - 1) < GENERICITY_THRESHOLD:
                return False
    return True


def _draw(rng: np.random.Generator, n: int, im_context: bool) -> ParameterSet:
    tau = complex(rng.uniform(-0.5, 0.5), rng.uniform(1.2, 3.0))
    q_abs = rng.uniform(0.55, 0.85)
    q_arg = rng.uniform(-math.pi, math.pi)
    q_half = cmath.rect(math.sqrt(q_abs), q_arg / 2)
    d_log_abs = rng.uniform(-0.8, 0.8) * (-math.log(q_abs))
    d_arg = rng.uniform(-math.pi, math.pi)
    d_half = cmath.rect(math.exp(d_log_abs / 2), d_arg / 2)
    raw_mu = rng.normal(scale=0.2, size=n) + 1j * rng.normal(scale=0.2, size=n)
    mu = [complex(m) for m in raw_mu - raw_mu.mean()]
    if n == 1:
        mu = [0j]
    C = None
    if not im_context:
        C = cmath.rect(rng.uniform(0.6, 1.5), rng.uniform(-math.pi, math.pi))
    return build_params(n, q_half, d_half, tau, mu, im_context=im_context, C=C)


def sample_params(seed: int, n: int, im_context: bool = True) -> ParameterSet:
    """Deterministic pseudo-random parameters strictly inside the region.

    The draw keeps ``|p| <= 0.5`` and rejects accidental relations
    ``q1**i q2**j == 1`` for ``|i|, |j| <= 6``.
    """
    rng = make_rng(seed, "params", n, int(bool(im_context)))
    last_error = "no attempt made"
    for _ in range(MAX_SAMPLING_ATTEMPTS):
        try:
            params = _draw(rng, n, im_context)
        except RegionError as exc:
            last_error = str(exc)
            continue
        if abs(params.p) > SAMPLED_P_BOUND:
            last_error = f"|p|={abs(params.p):.3f} above {SAMPLED_P_BOUND}"
            continue
        if not is_generic(params.q1, params.q2):
            last_error = "accidental relation q1^i q2^j = 1"
            continue
        return params
    raise SamplingError(
        f"no admissible parameters after {MAX_SAMPLING_ATTEMPTS} attempts "
        f"(seed={seed}, n={n}); last rejection: {last_error}"
    )
