"""Contraction calculus for free-field currents.

Operator products are represented only by their scalar prefactors: the
product of pairwise oscillator contractions times caller-supplied rational
multipliers.  Every pairwise factor is a :class:`LinearRational` in the
ratio ``x = w / z`` of the later and the earlier point, so coincident zeros
and poles can be detected from the factor lists.  When a pair is evaluated
exactly where a zero of one factor meets a pole of another, its value is
obtained as a limit: the average over a small circle around the point
(at two radii, Richardson-combined).  A pole that no zero cancels, in its
own pair or through a vanishing hyperplane of another pair, raises
:class:`PoleError` naming the pair.

Zero modes never vanish, so they are tracked as an exponent record and a
sign but do not enter any vanishing test.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import PoleError
from .params import DEFAULT_TRUNC, ParameterSet, TruncationConfig, make_rng
from .report import CheckRecord, VerificationReport, digest, normalized, timed
from .structfn import (
    EQUAL,
    FAR,
    NEXT,
    ONE,
    PREV,
    G_tilde_factors,
    LinearRational,
    g,
    lambda0_factors,
    relation,
)

COINCIDENCE_RTOL = 1e-8
LIMIT_POINTS = 8
PERTURBATION = 0.05
SCALE_SAMPLES = 6
WRONG_SPECIALIZATION_STRETCH = 1.25
CASES = ("i", "ii", "iii")
BOUNDARY_B = "boundaryB"
BOUNDARY_TAGS = (BOUNDARY_B, "Kplus", "Kminus")


# ---------------------------------------------------------------- slots and current kinds


@dataclass(frozen=True)
class Slot:
    """Element of the ordered set ``1 < 2 < ... < ell < ell' < ... < 1'``.

    ``index`` is the integer label ``k`` and ``barred`` selects ``k'``
    (written ``k̄`` in the usual notation).
    """

    index: int
    barred: bool
    ell: int

    def __post_init__(self) -> None:
        if not 1 <= self.index <= self.ell:
            raise ValueError(f"slot index {self.index} outside 1..{self.ell}")

    @property
    def position(self) -> int:
        return 2 * self.ell + 1 - self.index if self.barred else self.index

    def bar(self) -> "Slot":
        return Slot(self.index, not self.barred, self.ell)

    def __lt__(self, other: "Slot") -> bool:
        return self.position < other.position

    def __str__(self) -> str:
        return f"{self.index}{'b' if self.barred else ''}"


def ordered_slots(ell: int) -> list[Slot]:
    unbarred = [Slot(k, False, ell) for k in range(1, ell + 1)]
    barred = [Slot(k, True, ell) for k in range(ell, 0, -1)]
    return unbarred + barred


@dataclass(frozen=True)
class CurrentKind:
    """A free-field current: a colour, a slot (or boundary tag) and a coefficient."""

    color: int
    slot: Slot | str
    coefficient: complex

    def __post_init__(self) -> None:
        if isinstance(self.slot, str) and self.slot not in BOUNDARY_TAGS:
            raise ValueError(f"unknown boundary tag {self.slot!r}")
        if self.coefficient == 0:
            raise ValueError("current coefficient must be nonzero")

    @property
    def is_boundary(self) -> bool:
        return isinstance(self.slot, str)


@dataclass(frozen=True)
class CurrentFamily:
    """Currents of one module, grouped by colour, with the module's parameters."""

    params: ParameterSet
    kinds: dict[int, tuple[CurrentKind, ...]]
    ell: int = 0

    def kind(self, color: int, slot: Slot | str) -> CurrentKind:
        for k in self.kinds[color % self.params.n]:
            if k.slot == slot:
                return k
        raise KeyError(f"no current with colour {color} and slot {slot}")


def make_example_module(ell: int, u_spectral: Sequence[complex], params: ParameterSet) -> CurrentFamily:
    """Currents of a tensor product of ``ell`` Fock modules and the trivial boundary.

    Each colour carries ``2 ell`` vertex operators with coefficients
    ``-q**(k-ell) u_k`` (unbarred) and ``q**(ell-k-1) / u_k`` (barred).
    The central scalar is overwritten to ``C = q**(ell-1)``.
    """
    if ell < 3:
        raise ValueError(f"the example module needs ell >= 3, got {ell}")
    if params.n < 3:
        raise ValueError("the contraction table distinguishes i+1 from i-1; n >= 3 required")
    u_spectral = [complex(u) for u in u_spectral]
    if len(u_spectral) != ell or any(u == 0 for u in u_spectral):
        raise ValueError("need ell nonzero spectral parameters")
    module_params = params.with_C(params.q_pow(ell - 1))
    kinds = {}
    for color in range(params.n):
        row = []
        for slot in ordered_slots(ell):
            k = slot.index
            u = u_spectral[k - 1]
            if slot.barred:
                coef = params.q_pow(ell - k - 1) / u
            else:
                coef = -params.q_pow(k - ell) * u
            row.append(CurrentKind(color, slot, coef))
        kinds[color] = tuple(row)
    return CurrentFamily(module_params, kinds, ell)


def boundary_k(params: ParameterSet) -> complex:
    """``k = 1 / (q^(1/2) - q^(-1/2))``."""
    return 1 / (params.q_pow(0.5) - params.q_pow(-0.5))


def make_boundary_module(params: ParameterSet, C: complex | None = None) -> CurrentFamily:
    """One bilinear boundary current per colour, with ``C = q^(1/2)`` by default."""
    module_params = params.with_C(params.q_pow(0.5) if C is None else C)
    k = boundary_k(params)
    kinds = {c: (CurrentKind(c, BOUNDARY_B, k),) for c in range(params.n)}
    return CurrentFamily(module_params, kinds)


# ---------------------------------------------------------------- contractions


def _swap13(params: ParameterSet, rel: str) -> tuple[complex, complex]:
    return (params.q1, params.q3) if rel == NEXT else (params.q3, params.q1)


def contraction_factors(kind_a: CurrentKind, kind_b: CurrentKind, params: ParameterSet) -> LinearRational:
    """Oscillator contraction of ``kind_a(z) kind_b(w)`` as a function of ``x = w/z``."""
    n = params.n
    rel = relation(kind_a.color, kind_b.color, n)
    if kind_a.is_boundary or kind_b.is_boundary:
        if kind_a.slot != BOUNDARY_B or kind_b.slot != BOUNDARY_B:
            raise ValueError("only bilinear boundary currents can be contracted")
        gt = G_tilde_factors(kind_a.color, kind_b.color, params)
        q = params.q
        return LinearRational(gt.const, tuple(a / q for a in gt.zeros), tuple(b / q for b in gt.poles))
    if n < 3:
        raise ValueError("the contraction table is defined for n >= 3")
    if rel == FAR:
        return ONE
    a, b = kind_a.slot, kind_b.slot
    C2, q2 = params.C2, params.q2
    partner = b == a.bar()
    if rel == EQUAL:
        if a == b:
            return LinearRational(1.0, (1.0, 1 / q2), ())
        if b < a:
            if partner:
                bi = b.index
                return LinearRational(1.0, (), (q2**bi / C2, q2 ** (bi - 1) / C2))
            return ONE
        if partner:
            # Poles at x = C^-2 q2^a and C^-2 q2^(a-1), mirroring the reversed-order column.
            ai = a.index
            return LinearRational(1.0, (1 / q2,), (q2, C2 * q2 ** (-ai), C2 * q2 ** (1 - ai)))
        return LinearRational(1.0, (1 / q2,), (q2,))
    q1, q3 = _swap13(params, rel)
    if a == b:
        return LinearRational(1.0, (), (q1,))
    if b < a:
        if partner:
            return LinearRational(1.0, (q2 ** (b.index - 1) / (C2 * q3),), ())
        return ONE
    if partner:
        return LinearRational(1.0, (1 / q3, C2 * q2 ** (1 - a.index) * q1), (q1,))
    return LinearRational(1.0, (1 / q3,), (q1,))


def contract(
    kind_a: CurrentKind,
    u_a: complex,
    kind_b: CurrentKind,
    u_b: complex,
    params: ParameterSet,
    trunc: TruncationConfig = DEFAULT_TRUNC,
) -> complex:
    """Tabulated contraction at ``x = p**(u_b - u_a)``; raises PoleError at poles."""
    x = params.p_pow(complex(u_b) - complex(u_a))
    return contraction_factors(kind_a, kind_b, params)(x)


def zero_mode_exponent(kind_a: CurrentKind, kind_b: CurrentKind, params: ParameterSet) -> int:
    """Exponent of the earlier variable produced by the zero modes of a pair.

    Vertex operators in the same tensor factor exchange ``z**(+-a_ij)``
    (Cartan entry ``a_ij``); the power ``-1`` of an unbarred operator flips
    the sign.  Pairs in different tensor factors give no monomial.
    """
    if kind_a.is_boundary or kind_b.is_boundary:
        return 0
    if kind_a.slot.index != kind_b.slot.index:
        return 0
    rel = relation(kind_a.color, kind_b.color, params.n)
    cartan = {EQUAL: 2, NEXT: -1, PREV: -1}.get(rel, 0)
    sa = 1 if kind_a.slot.barred else -1
    sb = 1 if kind_b.slot.barred else -1
    return sa * sb * cartan


# ---------------------------------------------------------------- product prefactors


@dataclass
class ProductPrefactor:
    """Scalar prefactor of an ordered product plus its bookkeeping."""

    scalar: complex
    zero_mode_monomial: dict[int, int] = field(default_factory=dict)
    zero_mode_sign: int = 1
    pole_flags: list[str] = field(default_factory=list)


def pair_value(f: LinearRational, x0: complex, trunc: TruncationConfig, label: str) -> tuple[complex, str | None]:
    """Value of ``f`` at ``x0``, resolving zero/pole coincidences by a limit.

    Returns the value and a bookkeeping note when a limit was needed.
    """
    hits_pole = [b for b in f.poles if abs(1 - b * x0) <= COINCIDENCE_RTOL * max(1.0, abs(b * x0))]
    if not hits_pole:
        return f(x0), None
    order = f.order_at(x0, COINCIDENCE_RTOL)
    if order < 0:
        raise PoleError(f"unmatched pole in pair {label} at x = {x0}")
    radius = trunc.residue_epsilon * max(1.0, abs(x0))
    value = _richardson_circle(lambda h: f(x0 + h), radius)
    return value, f"{label}: {len(hits_pole)} pole(s) cancelled, net order {order}"


Multiplier = tuple[int, int, LinearRational]


def _pair_functions(
    terms: Sequence[tuple[CurrentKind, complex]],
    multipliers: Sequence[Multiplier],
    params: ParameterSet,
) -> dict[tuple[int, int], LinearRational]:
    extra: dict[tuple[int, int], LinearRational] = {}
    for r, s, f in multipliers:
        if not 0 <= r < s < len(terms):
            raise ValueError(f"multiplier indices ({r}, {s}) out of order or range")
        extra[(r, s)] = extra.get((r, s), ONE) * f
    return {
        (r, s): contraction_factors(terms[r][0], terms[s][0], params) * extra.get((r, s), ONE)
        for r in range(len(terms))
        for s in range(r + 1, len(terms))
    }


def _richardson_circle(evaluate, radius: float) -> complex:
    def mean(rad: float) -> complex:
        offsets = rad * np.exp(2j * np.pi * np.arange(LIMIT_POINTS) / LIMIT_POINTS)
        return complex(np.mean([evaluate(h) for h in offsets]))

    weight = 2.0**LIMIT_POINTS
    return (weight * mean(radius / 2) - mean(radius)) / (weight - 1)


def product_prefactor(
    terms: Sequence[tuple[CurrentKind, complex]],
    multipliers: Sequence[Multiplier],
    params: ParameterSet,
    trunc: TruncationConfig = DEFAULT_TRUNC,
    _nested: bool = False,
) -> ProductPrefactor:
    """Prefactor of an ordered product of currents at multiplicative points.

    ``terms`` lists ``(kind, z)`` in operator order.  Each multiplier
    ``(r, s, f)`` with ``r < s`` contributes ``f(z_s / z_r)`` and is grouped
    with the contraction of the same pair, so that a multiplier zero can
    cancel a contraction pole at the evaluation point.

    A pole left over inside one pair may still be cancelled by a zero of a
    different pair.  The value is then the iterated limit that first
    restricts to the zero hyperplane and then approaches the pole: one point
    of the pole pair that is not in the zero pair is moved on a small circle
    while the zero pair stays exactly on its hyperplane.
    """
    pairs = _pair_functions(terms, multipliers, params)
    zs = [complex(z) for _, z in terms]
    orders = {rs: f.order_at(zs[rs[1]] / zs[rs[0]], COINCIDENCE_RTOL) for rs, f in pairs.items()}
    unmatched = [rs for rs, o in orders.items() if o < 0]
    if unmatched:
        vanishing = [rs for rs, o in orders.items() if o > 0]
        if _nested or not vanishing or sum(orders.values()) < 0:
            raise PoleError(f"unmatched pole in pair {unmatched[0]} at points {zs}")
        pole, zero = unmatched[0], vanishing[0]
        mover = next(v for v in pole if v not in zero)

        def moved(h: complex) -> complex:
            shifted = list(terms)
            kind, z = shifted[mover]
            shifted[mover] = (kind, z * (1 + h))
            return product_prefactor(shifted, multipliers, params, trunc, _nested=True).scalar

        result = product_prefactor(
            [(k, z * (1 + 0.5 * trunc.residue_epsilon) if i == mover else z) for i, (k, z) in enumerate(terms)],
            multipliers, params, trunc, _nested=True,
        )
        result.scalar = _richardson_circle(moved, trunc.residue_epsilon)
        result.pole_flags.append(
            f"pole of pair {pole} cancelled by the zero of pair {zero} (iterated limit)"
        )
        return result
    result = ProductPrefactor(scalar=1.0 + 0j)
    for kind, _ in terms:
        result.scalar *= kind.coefficient
    for (r, s), f in pairs.items():
        value, note = pair_value(f, zs[s] / zs[r], trunc, f"({r},{s})")
        result.scalar *= value
        if note:
            result.pole_flags.append(note)
        e = zero_mode_exponent(terms[r][0], terms[s][0], params)
        if e:
            result.zero_mode_monomial[r] = result.zero_mode_monomial.get(r, 0) + e
    return result


# ---------------------------------------------------------------- wheel conditions


def wheel_multipliers(sign: int, params: ParameterSet) -> list[Multiplier]:
    """Rational bracket multiplying ``E_i(z1) E_i(z2) E_{i+-1}(w)``."""
    qs = params.q1 if sign > 0 else params.q3
    C2, q2 = params.C2, params.q2
    return [
        (0, 1, LinearRational(1.0, (C2, 1 / C2, q2), (1.0, 1.0, 1.0))),
        (0, 2, LinearRational(1.0, (qs,), (1.0,))),
        (1, 2, LinearRational(1.0, (qs,), (1.0,))),
    ]


def wheel_ratios(case: str, sign: int, params: ParameterSet) -> tuple[complex, complex]:
    """``(z2/z1, w/z1)`` at the requested specialization."""
    C2, q2 = params.C2, params.q2
    q1, q3 = (params.q1, params.q3) if sign > 0 else (params.q3, params.q1)
    if case == "i":
        return q2, 1 / q1
    if case == "ii":
        return C2, C2 * q3
    if case == "iii":
        return 1 / C2, 1 / (C2 * q1)
    if case == "wrong":
        return q2, WRONG_SPECIALIZATION_STRETCH / q1
    raise ValueError(f"unknown specialization {case!r}; expected one of {CASES}")


def _wheel_terms(family: CurrentFamily, i: int, sign: int, a: Slot, b: Slot, c: Slot, z: Sequence[complex]):
    n = family.params.n
    return [
        (family.kind(i, a), z[0]),
        (family.kind(i, b), z[1]),
        (family.kind((i + sign) % n, c), z[2]),
    ]


def wheel_prefactor(
    family: CurrentFamily,
    i: int,
    sign: int,
    a: Slot,
    b: Slot,
    c: Slot,
    points: Sequence[complex],
    trunc: TruncationConfig = DEFAULT_TRUNC,
) -> ProductPrefactor:
    params = family.params
    return product_prefactor(
        _wheel_terms(family, i, sign, a, b, c, points), wheel_multipliers(sign, params), params, trunc
    )


def wheel_points(case: str, sign: int, base_u: complex, params: ParameterSet) -> tuple[complex, complex, complex]:
    z = params.p_pow(base_u)
    r2, r3 = wheel_ratios(case, sign, params)
    return z, r2 * z, r3 * z


def wheel_scale(
    family: CurrentFamily,
    i: int,
    sign: int,
    a: Slot,
    b: Slot,
    c: Slot,
    points: Sequence[complex],
    rng: np.random.Generator,
    trunc: TruncationConfig = DEFAULT_TRUNC,
) -> float:
    """Mean magnitude of the prefactor at small generic perturbations of ``points``."""
    values = []
    while len(values) < SCALE_SAMPLES:
        bumps = 1 + PERTURBATION * np.exp(2j * np.pi * rng.uniform(size=3))
        try:
            pf = wheel_prefactor(family, i, sign, a, b, c, np.asarray(points) * bumps, trunc)
        except PoleError:
            continue
        values.append(abs(pf.scalar))
    return float(np.mean(values))


def wheel_check(
    i: int,
    sign: int,
    a: Slot,
    b: Slot,
    c: Slot,
    base_u: complex,
    case: str,
    family: CurrentFamily,
    trunc: TruncationConfig = DEFAULT_TRUNC,
) -> complex:
    """Prefactor of ``E_{i,i,i+-1}`` at a wheel specialization (expected zero)."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    points = wheel_points(case, sign, base_u, family.params)
    return wheel_prefactor(family, i, sign, a, b, c, points, trunc).scalar


def run_wheel_campaign(
    family: CurrentFamily,
    seed: int,
    tolerance: float = 1e-9,
    control_tolerance: float = 1e-3,
    trunc: TruncationConfig = DEFAULT_TRUNC,
    color: int = 0,
) -> VerificationReport:
    """All slot triples, cases and signs for one colour, plus the negative control."""
    params = family.params
    rng = make_rng(seed, "wheel", family.ell)
    base_u = complex(rng.uniform(0, 1), rng.uniform(-0.3, 0.3) * params.tau.imag)
    fp = params.fingerprint()
    slots = ordered_slots(family.ell)
    report = VerificationReport()
    for sign in (1, -1):
        for case in CASES:
            for a in slots:
                for b in slots:
                    for c in slots:
                        with timed() as clock:
                            points = wheel_points(case, sign, base_u, params)
                            value = wheel_prefactor(family, color, sign, a, b, c, points, trunc).scalar
                            scale = wheel_scale(family, color, sign, a, b, c, points, rng, trunc)
                        report.add(
                            CheckRecord(
                                name="wheel",
                                anchor="wheel conditions for the Fock tensor product",
                                fingerprint=fp,
                                inputs_digest=digest(sign, case, str(a), str(b), str(c), base_u),
                                scale=scale,
                                residual=normalized(value, scale),
                                tolerance=tolerance,
                                seed=seed,
                                detail=f"case {case}, sign {sign:+d}, slots ({a},{b},{c})",
                                wall_time=clock[0],
                            )
                        )
        with timed() as clock:
            worst = 0.0
            skipped = 0
            points = wheel_points("wrong", sign, base_u, params)
            for a in slots:
                for b in slots:
                    for c in slots:
                        try:
                            value = wheel_prefactor(family, color, sign, a, b, c, points, trunc).scalar
                        except PoleError:
                            skipped += 1
                            continue
                        scale = wheel_scale(family, color, sign, a, b, c, points, rng, trunc)
                        worst = max(worst, normalized(value, scale))
        report.add(
            CheckRecord(
                name="wheel-wrong-specialization",
                anchor="negative control: perturbed specialization",
                fingerprint=fp,
                inputs_digest=digest(sign, "wrong", base_u),
                scale=1.0,
                residual=worst,
                tolerance=control_tolerance,
                control=True,
                seed=seed,
                detail=f"sign {sign:+d}, max over slot triples, {skipped} at poles skipped",
                wall_time=clock[0],
            )
        )
    return report


# ---------------------------------------------------------------- boundary modules


def quadres_check_boundaryB(
    i: int, u: complex, params: ParameterSet, trunc: TruncationConfig = DEFAULT_TRUNC
) -> tuple[complex, float]:
    """Residual of the quadratic residue condition for the bilinear boundary module.

    ``params.C`` is used as given (``q^(1/2)`` for the genuine module).  The
    left side is ``k^2 lambda0_ii(x) <B(z) B(w)>`` at ``w = C^2 z``, computed
    through the generic pair machinery; the right side is the closed form
    ``(1 + C^2)(1 - q^2 C^2) / ((q - 1/q)(1 - C^2)^2)``.  Returns the
    difference and the magnitude of the right side.
    """
    kind = CurrentKind(i % params.n, BOUNDARY_B, boundary_k(params))
    z = params.p_pow(u)
    pf = product_prefactor(
        [(kind, z), (kind, params.C2 * z)], [(0, 1, lambda0_factors(i, i, params))], params, trunc
    )
    C2, q = params.C2, params.q
    rhs = (1 + C2) * (1 - q * q * C2) / ((q - 1 / q) * (1 - C2) ** 2)
    return pf.scalar - rhs, abs(rhs)


def boundary_serre_scalar(sign: int, z1: complex, z2: complex, w: complex, params: ParameterSet) -> complex:
    """Rational factor of ``E_{i,i,i+-1}`` on the bilinear boundary module."""
    q2 = params.q2
    ds = params.d if sign > 0 else 1 / params.d
    x = z2 / z1
    return (
        (1 - x / q2) * (1 - q2 * x) / (1 - x) ** 2
        * (1 - ds * w / z1) / (1 - w / z1)
        * (1 - ds * w / z2) / (1 - w / z2)
    )


def boundary_wheel_u(case: int, sign: int, u: complex, params: ParameterSet) -> tuple[complex, complex, complex]:
    """Additive points of the two boundary wheel specializations (``C^2 = q``).

    ``case == 1``: ``(z, q^2 z, q d^-+1 z)``; ``case == 2``: ``(z, C^2 z, C^2 q^-1 d^-+1 z)``.
    """
    g_, b_ = params.gamma, params.beta
    if case == 1:
        return u, u + g_, u + g_ / 2 - sign * b_
    if case == 2:
        return u, u + g_ / 2, u - sign * b_
    raise ValueError("boundary wheel case must be 1 or 2")


def serre_check_boundaryB(
    i: int,
    sign: int,
    u1: complex,
    u2: complex,
    w: complex,
    params: ParameterSet,
    trunc: TruncationConfig = DEFAULT_TRUNC,
) -> complex:
    """The boundary Serre factor at additive points ``(u1, u2, w)``."""
    del i, trunc  # the scalar factor does not depend on the colour
    return boundary_serre_scalar(sign, params.p_pow(u1), params.p_pow(u2), params.p_pow(w), params)


def boundary_serre_scale(
    sign: int, points_u: Sequence[complex], params: ParameterSet, rng: np.random.Generator
) -> float:
    zs = np.array([params.p_pow(u) for u in points_u])
    values = []
    while len(values) < SCALE_SAMPLES:
        bumps = 1 + PERTURBATION * np.exp(2j * np.pi * rng.uniform(size=3))
        z1, z2, w = zs * bumps
        try:
            values.append(abs(boundary_serre_scalar(sign, z1, z2, w, params)))
        except ZeroDivisionError:
            continue
    return float(np.mean(values))


def fd_check(i: int, u: complex, params: ParameterSet) -> float:
    """``|g_ii(z, C^2 z)| / |z|`` at ``C = 1/q`` (trivial boundary module)."""
    z = params.p_pow(u)
    C2 = params.with_C(1 / params.q).C2
    return abs(g(i, i, z, C2 * z, params)) / abs(z)


def run_boundary_campaign(params: ParameterSet, seed: int, trunc: TruncationConfig = DEFAULT_TRUNC) -> VerificationReport:
    """Quadratic residue, both Serre specializations and the trivial-module check."""
    rng = make_rng(seed, "boundary", params.n)
    module = make_boundary_module(params)
    bp = module.params
    fp = bp.fingerprint()
    u = complex(rng.uniform(0, 1), rng.uniform(-0.3, 0.3) * params.tau.imag)
    report = VerificationReport()
    with timed() as clock:
        diff, scale = quadres_check_boundaryB(0, u, bp, trunc)
    report.add(CheckRecord("boundary-quadres", "quadratic residue on the bilinear boundary module",
                           fp, digest(u), scale, normalized(diff, scale), 1e-10, seed=seed,
                           wall_time=clock[0]))
    wrong = bp.with_C(bp.C * cmath.exp(0.3j))
    with timed() as clock:
        diff, scale = quadres_check_boundaryB(0, u, wrong, trunc)
    report.add(CheckRecord("boundary-quadres-wrong-C", "negative control: C off q^(1/2)",
                           fp, digest(u, wrong.C), scale, normalized(diff, scale), 1e-10,
                           control=True, seed=seed, wall_time=clock[0]))
    for sign in (1, -1):
        for case in (1, 2):
            with timed() as clock:
                pts = boundary_wheel_u(case, sign, u, bp)
                value = serre_check_boundaryB(0, sign, *pts, bp, trunc)
                scale = boundary_serre_scale(sign, pts, bp, rng)
            report.add(CheckRecord("boundary-serre", "boundary Serre factor at wheel points",
                                   fp, digest(case, sign, u), scale, normalized(value, scale), 1e-10,
                                   seed=seed, detail=f"case {case}, sign {sign:+d}",
                                   wall_time=clock[0]))
    with timed() as clock:
        residual = fd_check(0, u, params)
    report.add(CheckRecord("trivial-boundary", "g_ii(z, C^2 z) = 0 at C = 1/q",
                           params.fingerprint(), digest(u), 1.0, residual, 1e-12, seed=seed,
                           wall_time=clock[0]))
    return report
