"""Evaluable expression trees for meromorphic functions of (z, lambda, hbar).

The atoms are theta factors of integer linear forms

    <a, z> + <b, lambda> + c*hbar,      a in X^*, b in X_*, c in Z,

closed under sum, product, quotient, and negation.  Trees are immutable and
are never rewritten: every identity in this package is certified by
evaluating both sides at generic points of the universal cover, with the
Weyl twist acting on the coefficient vectors of the linear forms.

Numerical residues along a divisor {form = 0} and log-log regularity slopes
are computed on a one-parameter slice through a generic base point, moving
in the fixed rational direction d with form(d) = 1.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .roots import WeylElement, mat_vec
from .theta import ThetaParams, theta

#: Genericity threshold: a sampled point is accepted only when every guard
#: form's theta value exceeds this.
GUARD_THRESHOLD = 1e-3

#: Stricter genericity demanded of residue/regularity slice bases: the
#: extrapolation error grows like a power of (step / nearest-wall distance),
#: so bases must keep every other denominator wall at a safe distance.
SLICE_GUARD_THRESHOLD = 3e-2

#: Near-divisor floor for quotients during evaluation.  Deliberately far
#: below GUARD_THRESHOLD so residue and slope probes at form values around
#: 1e-4 .. 1e-6 stay evaluable.
DIV_FLOOR = 1e-12

#: Default outer step for residue extrapolation and slope fits.
EPS0 = 1e-4

#: Number of dyadic refinements in a regularity slope fit.
SLOPE_STEPS = 6


class NearDivisorError(ArithmeticError):
    """Evaluation hit a denominator below the near-divisor floor."""

    def __init__(self, forms: tuple["LinearForm", ...], point: "EvalPoint"):
        self.forms = forms
        self.point = point
        super().__init__(f"near-divisor evaluation; denominator forms {forms}")


class HigherOrderPoleError(ArithmeticError):
    """Residue extrapolation did not stabilize: pole of order >= 2 or worse."""


@dataclass(frozen=True)
class LinearForm:
    """Integer linear form in (z, lambda, hbar); coefficients are exact."""

    z_coeffs: tuple[int, ...]
    lam_coeffs: tuple[int, ...]
    h_coeff: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "z_coeffs", tuple(int(c) for c in self.z_coeffs))
        object.__setattr__(self, "lam_coeffs", tuple(int(c) for c in self.lam_coeffs))
        if len(self.z_coeffs) != len(self.lam_coeffs):
            raise ValueError("z and lambda coefficient vectors must share the rank")

    @property
    def rank(self) -> int:
        return len(self.z_coeffs)

    def value_at(self, p: "EvalPoint") -> complex:
        total = self.h_coeff * p.h
        for c, zi in zip(self.z_coeffs, p.z, strict=True):
            total += c * zi
        for c, li in zip(self.lam_coeffs, p.lam, strict=True):
            total += c * li
        return total

    def __add__(self, other: "LinearForm") -> "LinearForm":
        return LinearForm(
            tuple(a + b for a, b in zip(self.z_coeffs, other.z_coeffs, strict=True)),
            tuple(a + b for a, b in zip(self.lam_coeffs, other.lam_coeffs, strict=True)),
            self.h_coeff + other.h_coeff,
        )

    def __neg__(self) -> "LinearForm":
        return LinearForm(
            tuple(-a for a in self.z_coeffs),
            tuple(-a for a in self.lam_coeffs),
            -self.h_coeff,
        )

    def __sub__(self, other: "LinearForm") -> "LinearForm":
        return self + (-other)

    def __str__(self) -> str:
        parts = []
        for name, coeffs in (("z", self.z_coeffs), ("l", self.lam_coeffs)):
            for i, c in enumerate(coeffs):
                if c:
                    parts.append(f"{c:+d}*{name}{i}")
        if self.h_coeff:
            parts.append(f"{self.h_coeff:+d}*h")
        return "".join(parts).lstrip("+") or "0"


def z_linear(coeffs, rank: int | None = None) -> LinearForm:
    coeffs = tuple(coeffs)
    n = rank if rank is not None else len(coeffs)
    return LinearForm(coeffs, (0,) * n)


def lam_linear(coeffs, rank: int | None = None) -> LinearForm:
    coeffs = tuple(coeffs)
    n = rank if rank is not None else len(coeffs)
    return LinearForm((0,) * n, coeffs)


def h_linear(rank: int, coeff: int = 1) -> LinearForm:
    return LinearForm((0,) * rank, (0,) * rank, coeff)


@dataclass(frozen=True)
class EvalPoint:
    """A point of the universal cover: z, lambda in C^n plus the shift hbar."""

    z: tuple[complex, ...]
    lam: tuple[complex, ...]
    h: complex

    def __post_init__(self) -> None:
        object.__setattr__(self, "z", tuple(complex(v) for v in self.z))
        object.__setattr__(self, "lam", tuple(complex(v) for v in self.lam))
        object.__setattr__(self, "h", complex(self.h))


class MeroExpr:
    """Base node; subclasses form a closed, immutable expression algebra."""

    __slots__ = ()

    def __add__(self, other: "MeroExpr") -> "MeroExpr":
        return Sum((self, other))

    def __sub__(self, other: "MeroExpr") -> "MeroExpr":
        return Sum((self, Neg(other)))

    def __mul__(self, other: "MeroExpr") -> "MeroExpr":
        return Prod((self, other))

    def __truediv__(self, other: "MeroExpr") -> "MeroExpr":
        return Quot(self, other)

    def __neg__(self) -> "MeroExpr":
        return Neg(self)


@dataclass(frozen=True)
class Const(MeroExpr):
    value: complex

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", complex(self.value))


@dataclass(frozen=True)
class ThetaOf(MeroExpr):
    form: LinearForm


@dataclass(frozen=True)
class Sum(MeroExpr):
    terms: tuple[MeroExpr, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", tuple(self.terms))


@dataclass(frozen=True)
class Prod(MeroExpr):
    factors: tuple[MeroExpr, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "factors", tuple(self.factors))


@dataclass(frozen=True)
class Quot(MeroExpr):
    num: MeroExpr
    den: MeroExpr


@dataclass(frozen=True)
class Neg(MeroExpr):
    child: MeroExpr


def evaluate(
    e: MeroExpr,
    p: EvalPoint,
    params: ThetaParams,
    *,
    div_floor: float = DIV_FLOOR,
    cache: dict[complex, complex] | None = None,
) -> complex:
    """Recursive evaluation at a point of the universal cover.

    ``cache`` maps theta arguments to theta values; pass one dictionary per
    (point, params) pair to share work across expressions.
    """
    if cache is None:
        cache = {}
    return _eval(e, p, params, div_floor, cache)


def _eval(e, p, params, floor, cache):
    if isinstance(e, Const):
        return e.value
    if isinstance(e, ThetaOf):
        arg = e.form.value_at(p)
        val = cache.get(arg)
        if val is None:
            val = theta(arg, params)
            cache[arg] = val
        return val
    if isinstance(e, Neg):
        return -_eval(e.child, p, params, floor, cache)
    if isinstance(e, Sum):
        return sum(_eval(t, p, params, floor, cache) for t in e.terms)
    if isinstance(e, Prod):
        out = 1 + 0j
        for f in e.factors:
            out *= _eval(f, p, params, floor, cache)
        return out
    if isinstance(e, Quot):
        den = _eval(e.den, p, params, floor, cache)
        if abs(den) < floor:
            raise NearDivisorError(tuple(denominator_forms(e.den) or theta_forms(e.den)), p)
        return _eval(e.num, p, params, floor, cache) / den
    raise TypeError(f"not a MeroExpr node: {e!r}")


def twist(e: MeroExpr, w: WeylElement, v: WeylElement) -> MeroExpr:
    """Weyl twist: substitute (z, lambda) -> (w^{-1} z, v^{-1} lambda).

    On a linear form this replaces the z coefficients a by w.a and the
    lambda coefficients b by v.b; the hbar coefficient never moves.  It is
    a left group action: twist(twist(e, w, v), w2, v2) = twist(e, w2 w, v2 v).
    """
    return _twist(e, w.mat_on_star, v.mat_on_costar)


def _twist(e, star_mat, costar_mat):
    if isinstance(e, Const):
        return e
    if isinstance(e, ThetaOf):
        form = e.form
        if form.rank != len(star_mat):
            raise ValueError(
                f"rank mismatch: form of rank {form.rank}, Weyl action of rank {len(star_mat)}"
            )
        return ThetaOf(
            LinearForm(
                mat_vec(star_mat, form.z_coeffs),
                mat_vec(costar_mat, form.lam_coeffs),
                form.h_coeff,
            )
        )
    if isinstance(e, Neg):
        return Neg(_twist(e.child, star_mat, costar_mat))
    if isinstance(e, Sum):
        return Sum(tuple(_twist(t, star_mat, costar_mat) for t in e.terms))
    if isinstance(e, Prod):
        return Prod(tuple(_twist(f, star_mat, costar_mat) for f in e.factors))
    if isinstance(e, Quot):
        return Quot(_twist(e.num, star_mat, costar_mat), _twist(e.den, star_mat, costar_mat))
    raise TypeError(f"not a MeroExpr node: {e!r}")


def transform_point(p: EvalPoint, w: WeylElement, v: WeylElement) -> EvalPoint:
    """The point (w.z, v.lambda); inverse substitution partner of twist."""
    return EvalPoint(mat_vec(w.mat_on_costar, p.z), mat_vec(v.mat_on_star, p.lam), p.h)


def theta_forms(e: MeroExpr) -> frozenset[LinearForm]:
    """Every linear form appearing under a theta anywhere in the tree."""
    out: set[LinearForm] = set()
    _collect(e, False, out, out)
    return frozenset(out)


def denominator_forms(e: MeroExpr) -> frozenset[LinearForm]:
    """Every linear form appearing under a theta inside some denominator."""
    dens: set[LinearForm] = set()
    _collect(e, False, set(), dens)
    return frozenset(dens)


def _collect(e, in_den, all_out, den_out):
    if isinstance(e, ThetaOf):
        all_out.add(e.form)
        if in_den:
            den_out.add(e.form)
    elif isinstance(e, Neg):
        _collect(e.child, in_den, all_out, den_out)
    elif isinstance(e, Sum):
        for t in e.terms:
            _collect(t, in_den, all_out, den_out)
    elif isinstance(e, Prod):
        for f in e.factors:
            _collect(f, in_den, all_out, den_out)
    elif isinstance(e, Quot):
        _collect(e.num, in_den, all_out, den_out)
        _collect(e.den, True, all_out, den_out)


def proportional(f1: LinearForm, f2: LinearForm) -> bool:
    """Whether two forms cut the same divisor (rationally proportional)."""
    c1 = f1.z_coeffs + f1.lam_coeffs + (f1.h_coeff,)
    c2 = f2.z_coeffs + f2.lam_coeffs + (f2.h_coeff,)
    m = len(c1)
    return all(c1[i] * c2[j] == c1[j] * c2[i] for i in range(m) for j in range(i + 1, m))


def slice_direction(form: LinearForm) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """The canonical rational direction d with form(d) = 1, hbar held fixed."""
    norm = sum(c * c for c in form.z_coeffs) + sum(c * c for c in form.lam_coeffs)
    if norm == 0:
        raise ValueError(f"form {form} has no z or lambda dependence; no slice exists")
    return (
        tuple(c / norm for c in form.z_coeffs),
        tuple(c / norm for c in form.lam_coeffs),
    )


def slice_point(form: LinearForm, base: EvalPoint, t: complex) -> EvalPoint:
    """The point on the slice through ``base`` where the form's value is t."""
    dz, dl = slice_direction(form)
    shift = form.value_at(base) - t
    return EvalPoint(
        tuple(zi - shift * di for zi, di in zip(base.z, dz, strict=True)),
        tuple(li - shift * di for li, di in zip(base.lam, dl, strict=True)),
        base.h,
    )


def residue_along(
    e: MeroExpr,
    form: LinearForm,
    base: EvalPoint,
    params: ThetaParams,
    *,
    eps: float = EPS0,
    div_floor: float = DIV_FLOOR,
) -> complex:
    """Numerical residue of ``e`` along the divisor {form = 0}.

    The residue convention multiplies by theta of the form before taking the
    limit, so a function c/theta(form) has residue c on the divisor.  The
    limit is taken along the canonical slice through ``base``: theta(t)*e is
    evaluated at form values eps, eps/2, eps/4 and Richardson extrapolated
    at second order, which keeps the truncation error O(eps^3) even when
    another denominator wall passes moderately close to the slice.
    Disagreement with the first-order extrapolation of the two finest
    samples signals a pole of order two or worse.
    """

    def probe(t: float) -> complex:
        p = slice_point(form, base, t)
        return theta(t, params) * evaluate(e, p, params, div_floor=div_floor)

    f1 = probe(eps)
    f2 = probe(eps / 2.0)
    f4 = probe(eps / 4.0)
    first_order = 2.0 * f4 - f2
    second_order = (f1 - 6.0 * f2 + 8.0 * f4) / 3.0
    scale = max(1.0, abs(first_order), abs(second_order))
    if abs(first_order - second_order) > 1e-2 * scale:
        raise HigherOrderPoleError(
            f"residue extrapolation unstable along {form}: "
            f"{first_order!r} vs {second_order!r}"
        )
    return second_order


@dataclass(frozen=True)
class RegularityResult:
    regular: bool
    slope: float
    values: tuple[float, ...]

    def __bool__(self) -> bool:
        return self.regular


def is_regular_along(
    e: MeroExpr,
    form: LinearForm,
    base: EvalPoint,
    params: ThetaParams,
    *,
    eps0: float = EPS0,
    steps: int = SLOPE_STEPS,
    slope_floor: float = -0.1,
    div_floor: float = DIV_FLOOR,
) -> RegularityResult:
    """Diagnostic log-log slope of |e| approaching the divisor {form = 0}.

    Samples |e| at form values eps0 * 2^-k for k = 0..steps and fits the
    slope of log|e| against log eps by least squares.  Slope near 0 means
    regular, near -1 a simple pole, near +1 a simple zero; the verdict is
    regular iff slope >= slope_floor.
    """
    values = []
    logs_x = []
    logs_y = []
    for k in range(steps + 1):
        t = eps0 * 2.0 ** (-k)
        p = slice_point(form, base, t)
        mag = abs(evaluate(e, p, params, div_floor=div_floor))
        values.append(mag)
        logs_x.append(math.log(t))
        logs_y.append(math.log(max(mag, 1e-300)))
    if max(values) < 1e-250:
        # Identically tiny along the slice: nothing singular to report.
        return RegularityResult(True, 0.0, tuple(values))
    mean_x = sum(logs_x) / len(logs_x)
    mean_y = sum(logs_y) / len(logs_y)
    var = sum((x - mean_x) ** 2 for x in logs_x)
    cov = sum((x - mean_x) * (y - mean_y) for x, y in zip(logs_x, logs_y))
    slope = cov / var
    return RegularityResult(slope >= slope_floor, slope, tuple(values))


class GuardRejectionError(RuntimeError):
    """Generic-point sampling exhausted its rejection budget."""


def sample_generic_point(
    rank: int,
    guards,
    seed: int,
    params: ThetaParams,
    h: complex,
    *,
    guard_threshold: float = GUARD_THRESHOLD,
    box: tuple[float, float] = (0.05, 0.95),
    max_tries: int = 500,
) -> EvalPoint:
    """Draw a point of the fundamental box generic for every guard form.

    Coordinates are a + b*tau with a, b uniform in ``box``; candidates are
    rejected until |theta(form)| exceeds the guard threshold for every guard.
    """
    rng = random.Random(seed)
    tau = params.tau
    lo, hi = box
    guards = tuple(guards)
    for _ in range(max_tries):
        z = tuple(rng.uniform(lo, hi) + rng.uniform(lo, hi) * tau for _ in range(rank))
        lam = tuple(rng.uniform(lo, hi) + rng.uniform(lo, hi) * tau for _ in range(rank))
        p = EvalPoint(z, lam, h)
        if all(abs(theta(g.value_at(p), params)) > guard_threshold for g in guards):
            return p
    raise GuardRejectionError(
        f"no generic point found in {max_tries} tries for {len(guards)} guards"
    )
