"""Twisted group-algebra elements, two-term operators, and identity checks.

An element is a finite map (w, v) -> coefficient over the double Weyl group,
written sum a_{w,v} delta_w delta_v^d, where delta_w shifts the z variables
and delta_v^d the dynamical lambda variables.  The product twists the right
coefficient by the left key:

    a_{w,v} delta_w delta_v^d . b_{x,y} delta_x delta_y^d
        = a_{w,v} (twist of b_{x,y} by (w, v)) delta_{wx} delta_{vy}^d.

The two-term operator attached to a simple root alpha is

    T_alpha = theta(h) theta(z_a - l_a) / (theta(z_a) theta(h - l_a)) delta_a^d
            + theta(l_a) theta(h - z_a) / (theta(z_a) theta(h - l_a)) delta_a delta_a^d

with z_a the root coordinate and l_a the coroot coordinate; its mirror for
the dual datum swaps z_a with l_a and negates h.  Everything here is checked
numerically: coefficients are never simplified, and two elements count as
equal when their coefficients agree pointwise at generic sample points.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Callable, Mapping

from .expr import (
    SLICE_GUARD_THRESHOLD,
    Const,
    EvalPoint,
    LinearForm,
    MeroExpr,
    Prod,
    Quot,
    RegularityResult,
    Sum,
    ThetaOf,
    denominator_forms,
    evaluate,
    is_regular_along,
    proportional,
    residue_along,
    sample_generic_point,
    slice_point,
    twist,
)
from .roots import (
    RootDatum,
    WeylElement,
    braid_order,
    inversion_set,
    positive_root_pairs,
    weyl_group,
)
from .theta import ThetaParams, theta

Key = tuple[WeylElement, WeylElement]


class NonReducedWordError(ValueError):
    """A word handed to an ordered operator product was not reduced."""


@dataclass(frozen=True, eq=False)
class HeckeElement:
    """Finite sum a_{w,v} delta_w delta_v^d with expression-tree coefficients."""

    datum: RootDatum
    coeffs: Mapping[Key, MeroExpr]

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeffs", MappingProxyType(dict(self.coeffs)))

    def keys(self) -> tuple[Key, ...]:
        return tuple(self.coeffs)

    def __repr__(self) -> str:
        body = ", ".join(f"({w!r},{v!r})" for w, v in self.coeffs)
        return f"HeckeElement[{self.datum.label}: {body}]"


def identity_element(rd: RootDatum) -> HeckeElement:
    e = weyl_group(rd).identity
    return HeckeElement(rd, {(e, e): Const(1)})


def zero_element(rd: RootDatum) -> HeckeElement:
    return HeckeElement(rd, {})


def add(a: HeckeElement, b: HeckeElement) -> HeckeElement:
    if a.datum != b.datum:
        raise ValueError("cannot add elements over different root data")
    out: dict[Key, MeroExpr] = dict(a.coeffs)
    for key, expr in b.coeffs.items():
        out[key] = Sum((out[key], expr)) if key in out else expr
    return HeckeElement(a.datum, out)


def scale(a: HeckeElement, factor: MeroExpr) -> HeckeElement:
    return HeckeElement(a.datum, {k: Prod((factor, c)) for k, c in a.coeffs.items()})


def multiply(a: HeckeElement, b: HeckeElement) -> HeckeElement:
    """Twisted product; associative up to pointwise tolerance."""
    if a.datum != b.datum:
        raise ValueError("cannot multiply elements over different root data")
    group = weyl_group(a.datum)
    buckets: dict[Key, list[MeroExpr]] = {}
    for (w, v), ac in a.coeffs.items():
        for (x, y), bc in b.coeffs.items():
            key = (group.product(w, x), group.product(v, y))
            buckets.setdefault(key, []).append(Prod((ac, twist(bc, w, v))))
    out = {
        key: terms[0] if len(terms) == 1 else Sum(tuple(terms))
        for key, terms in buckets.items()
    }
    return HeckeElement(a.datum, out)


def _root_forms(rd: RootDatum, i: int) -> tuple[LinearForm, LinearForm]:
    n = rd.rank
    zeros = (0,) * n
    z_a = LinearForm(rd.simple_roots[i], zeros, 0)
    l_a = LinearForm(zeros, rd.simple_coroots[i], 0)
    return z_a, l_a


def dl_dynamical(i: int, rd: RootDatum, sign_of_h: int = 1) -> HeckeElement:
    """The two-term operator of the i-th simple root.

    Keys are (e, s_i) and (s_i, s_i); ``sign_of_h`` = -1 builds the variant
    of the negated-shift algebra by flipping every hbar coefficient.
    """
    if not 0 <= i < rd.rank:
        raise ValueError(f"simple root index {i} out of range for rank {rd.rank}")
    if sign_of_h not in (1, -1):
        raise ValueError("sign_of_h must be +1 or -1")
    group = weyl_group(rd)
    e, s = group.identity, group.simple[i]
    z_a, l_a = _root_forms(rd, i)
    hh = LinearForm((0,) * rd.rank, (0,) * rd.rank, sign_of_h)
    p = Quot(
        Prod((ThetaOf(hh), ThetaOf(z_a - l_a))),
        Prod((ThetaOf(z_a), ThetaOf(hh - l_a))),
    )
    q = Quot(
        Prod((ThetaOf(l_a), ThetaOf(hh - z_a))),
        Prod((ThetaOf(z_a), ThetaOf(hh - l_a))),
    )
    return HeckeElement(rd, {(e, s): p, (s, s): q})


def dl_dual_langlands(i: int, rd: RootDatum) -> HeckeElement:
    """The mirror two-term operator of the dual system at negated shift.

    Obtained from dl_dynamical by swapping the root and coroot coordinates
    and negating hbar; keys are (s_i, e) and (s_i, s_i).  Together with
    dl_dynamical it satisfies the two inverse identities checked by
    verify_adjunction_identity.
    """
    if not 0 <= i < rd.rank:
        raise ValueError(f"simple root index {i} out of range for rank {rd.rank}")
    group = weyl_group(rd)
    e, s = group.identity, group.simple[i]
    z_a, l_a = _root_forms(rd, i)
    hh = LinearForm((0,) * rd.rank, (0,) * rd.rank, 1)
    p_dual = Quot(
        Prod((ThetaOf(hh), ThetaOf(l_a - z_a))),
        Prod((ThetaOf(l_a), ThetaOf(hh + z_a))),
    )
    q_dual = Quot(
        Prod((ThetaOf(z_a), ThetaOf(hh + l_a))),
        Prod((ThetaOf(l_a), ThetaOf(hh + z_a))),
    )
    return HeckeElement(rd, {(s, e): p_dual, (s, s): q_dual})


_TW_CACHE: dict[tuple[RootDatum, WeylElement, int], HeckeElement] = {}


def t_w(
    word,
    rd: RootDatum,
    sign_of_h: int = 1,
    *,
    use_cache: bool = True,
    factory: Callable[[int, RootDatum, int], HeckeElement] = dl_dynamical,
) -> HeckeElement:
    """Ordered product of two-term operators along a reduced word.

    The result depends only on the group element (braid relations), so it is
    cached by element.  Pass ``use_cache=False`` to force an honest product,
    e.g. when comparing two different reduced words of the same element.
    """
    word = tuple(word)
    group = weyl_group(rd)
    element = group.identity
    for step, i in enumerate(word):
        nxt = group.product(element, group.simple[i])
        if nxt.length != element.length + 1:
            raise NonReducedWordError(
                f"word {word} is not reduced: length drops at position {step}"
            )
        element = nxt
    cache_key = (rd, element, sign_of_h)
    if use_cache and factory is dl_dynamical and cache_key in _TW_CACHE:
        return _TW_CACHE[cache_key]
    out = identity_element(rd)
    for i in word:
        out = multiply(out, factory(i, rd, sign_of_h))
    if use_cache and factory is dl_dynamical:
        _TW_CACHE[cache_key] = out
    return out


def act_on_section(h_el: HeckeElement, f: MeroExpr) -> MeroExpr:
    """The module action: sum of a_{w,v} times the (w, v)-twist of f."""
    terms = tuple(
        Prod((coeff, twist(f, w, v))) for (w, v), coeff in h_el.coeffs.items()
    )
    if not terms:
        return Const(0)
    return terms[0] if len(terms) == 1 else Sum(terms)


def psi_act(h_el: HeckeElement, g: MeroExpr, f: MeroExpr) -> MeroExpr:
    """Coproduct action on a pair: each term twists g by (w, v) but f by w only.

    This realizes a_{w,v} delta_w delta_v^d tensor delta_w applied to g tensor f,
    with the product map collapsing the pair to an ordinary expression.
    """
    group = weyl_group(h_el.datum)
    e = group.identity
    terms = tuple(
        Prod((coeff, twist(g, w, v), twist(f, w, e)))
        for (w, v), coeff in h_el.coeffs.items()
    )
    if not terms:
        return Const(0)
    return terms[0] if len(terms) == 1 else Sum(terms)


def gkv_dual_generator(i: int, rd: RootDatum) -> HeckeElement:
    """Canonical two-term generator of the dual-side residue algebra.

    sigma_i = theta(l_a + h)/theta(l_a) delta_e
            + theta(l_a - h)/theta(l_a) delta_i^d.

    Both coefficients depend on lambda only; the residues along the coroot
    wall are theta(h) and theta(-h) = -theta(h), which cancel, and the second
    coefficient vanishes on the shifted wall l_a = h.
    """
    if not 0 <= i < rd.rank:
        raise ValueError(f"simple root index {i} out of range for rank {rd.rank}")
    group = weyl_group(rd)
    e, s = group.identity, group.simple[i]
    _, l_a = _root_forms(rd, i)
    hh = LinearForm((0,) * rd.rank, (0,) * rd.rank, 1)
    coeff_e = Quot(ThetaOf(l_a + hh), ThetaOf(l_a))
    coeff_s = Quot(ThetaOf(l_a - hh), ThetaOf(l_a))
    return HeckeElement(rd, {(e, e): coeff_e, (e, s): coeff_s})


def gamma(sigma: HeckeElement, sign_of_h: int = 1) -> HeckeElement:
    """Map a dual-side element sum a_v delta_v^d to sum a_v T_v.

    Each dynamical delta is replaced by the ordered operator product along
    the canonical reduced word of v; coefficients multiply in from the left.
    Raises if the support is not purely dual-side.
    """
    rd = sigma.datum
    group = weyl_group(rd)
    e = group.identity
    out = zero_element(rd)
    for (w, v), coeff in sigma.coeffs.items():
        if w != e:
            raise ValueError(f"support not purely dual-side: found key with w = {w!r}")
        term = multiply(HeckeElement(rd, {(e, e): coeff}), t_w(v.word, rd, sign_of_h))
        out = add(out, term)
    return out


# ---------------------------------------------------------------------------
# sampling and pointwise comparison helpers


def _derive_seed(*parts: int) -> int:
    out = 0
    for p in parts:
        out = (out * 1_000_003 + p + 7) % (2**63)
    return out


def element_guards(*elements: HeckeElement) -> frozenset[LinearForm]:
    guards: set[LinearForm] = set()
    for el in elements:
        for coeff in el.coeffs.values():
            guards |= denominator_forms(coeff)
    return frozenset(guards)


def sample_points(
    rd: RootDatum,
    guards,
    count: int,
    seed: int,
    params: ThetaParams,
    h: complex,
) -> list[EvalPoint]:
    return [
        sample_generic_point(rd.rank, guards, _derive_seed(seed, k), params, h)
        for k in range(count)
    ]


def coefficient_residual(
    a: HeckeElement,
    b: HeckeElement,
    points,
    params: ThetaParams,
) -> tuple[float, dict | None]:
    """Worst pointwise coefficient difference; missing keys count as zero."""
    keys = sorted(
        set(a.coeffs) | set(b.coeffs), key=lambda k: (k[0].word, k[1].word)
    )
    zero = Const(0)
    worst = 0.0
    witness = None
    for p in points:
        cache: dict[complex, complex] = {}
        for key in keys:
            va = evaluate(a.coeffs.get(key, zero), p, params, cache=cache)
            vb = evaluate(b.coeffs.get(key, zero), p, params, cache=cache)
            diff = abs(va - vb)
            if diff > worst:
                worst = diff
                witness = {"point": p, "key": key, "difference": diff}
    return worst, witness


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class IdentityReport:
    """Outcome of one sampled identity check."""

    name: str
    max_residual: float
    threshold: float
    passed: bool
    witness: dict | None = None
    details: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ResidueCheck:
    tag: str
    key: Key | None
    label: str
    kind: str  # "residual" or "slope"
    value: float
    passed: bool


@dataclass(frozen=True)
class ResidueReport:
    """Per-condition outcomes of the residue membership test.

    Tags: "i" pole orders along the root and coroot walls, "ii" residue
    pairing across each root wall, "ii'" residue pairing across each coroot
    wall, "iii" shifted-wall regularity on inversion-set coefficients.
    """

    checks: Mapping[str, tuple[ResidueCheck, ...]]

    def __post_init__(self) -> None:
        object.__setattr__(self, "checks", MappingProxyType(dict(self.checks)))

    def tag_passed(self, tag: str) -> bool:
        return all(c.passed for c in self.checks[tag])

    @property
    def passed(self) -> bool:
        return all(self.tag_passed(tag) for tag in self.checks)

    def worst(self, tag: str, kind: str | None = None) -> float:
        vals = [
            abs(c.value)
            for c in self.checks[tag]
            if kind is None or c.kind == kind
        ]
        return max(vals, default=0.0)

    def failures(self) -> tuple[ResidueCheck, ...]:
        return tuple(c for tag in self.checks for c in self.checks[tag] if not c.passed)

    def slopes(self, tag: str) -> tuple[float, ...]:
        return tuple(c.value for c in self.checks[tag] if c.kind == "slope")


def _slice_bases(
    form: LinearForm,
    guards,
    rd: RootDatum,
    count: int,
    seed: int,
    params: ThetaParams,
    h: complex,
) -> list[EvalPoint]:
    """Generic base points already shifted onto the divisor slice.

    Guards proportional to the probed form are skipped (they are meant to be
    small there); the rest are re-checked at the shifted point.
    """
    others = [g for g in guards if not proportional(g, form)]
    bases: list[EvalPoint] = []
    attempt = 0
    while len(bases) < count:
        if attempt > 50 * count + 200:
            raise RuntimeError(f"could not find {count} usable slice bases for {form}")
        p0 = sample_generic_point(
            rd.rank, (), _derive_seed(seed, attempt), params, h
        )
        p_star = slice_point(form, p0, 0.0)
        attempt += 1
        if all(
            abs(theta(g.value_at(p_star), params)) > SLICE_GUARD_THRESHOLD for g in others
        ):
            bases.append(p_star)
    return bases


def verify_residue_conditions(
    h_el: HeckeElement,
    params: ThetaParams,
    h: complex,
    *,
    samples: int = 3,
    seed: int = 0,
    residual_tol: float = 1e-6,
    slope_floor: float = -0.1,
    order_floor: float = -1.1,
) -> ResidueReport:
    """Check the four residue membership conditions at sampled slice points.

    i)   every coefficient has pole order at most 1 along each root wall
         z_a = 0 and each coroot wall l_a = 0 (log-log slope >= order_floor);
    ii)  residues along each root wall cancel between the keys (w, v) and
         (s_a w, v);
    ii') residues along each coroot wall cancel between (w, v) and (w, s_a v);
    iii) for each root a in the inversion set of w, the coefficient times
         theta(z_a)/theta(h - z_a) stays regular on the shifted wall z_a = h.

    Pole orders are probed along the unshifted root and coroot walls only;
    the shifted dual walls lie outside the certified domain of the two-term
    generators and are deliberately not probed.
    """
    rd = h_el.datum
    group = weyl_group(rd)
    n = rd.rank
    zeros = (0,) * n
    guards = element_guards(h_el)
    keys = sorted(h_el.coeffs, key=lambda k: (k[0].word, k[1].word))
    checks: dict[str, list[ResidueCheck]] = {"i": [], "ii": [], "ii'": [], "iii": []}

    pair_salt = 0
    for root, coroot in positive_root_pairs(rd):
        s_alpha = group.reflection(root, coroot)
        z_form = LinearForm(root, zeros, 0)
        l_form = LinearForm(zeros, coroot, 0)
        for tag, form, partner in (
            ("ii", z_form, lambda w, v: (group.product(s_alpha, w), v)),
            ("ii'", l_form, lambda w, v: (w, group.product(s_alpha, v))),
        ):
            seen: set[frozenset[Key]] = set()
            for w, v in keys:
                other = partner(w, v)
                pair_id = frozenset(((w, v), other))
                if pair_id in seen:
                    continue
                seen.add(pair_id)
                pair_salt += 1
                present = [h_el.coeffs[k] for k in ((w, v), other) if k in h_el.coeffs]
                expr = present[0] if len(present) == 1 else Sum(tuple(present))
                bases = _slice_bases(
                    form, guards, rd, samples, _derive_seed(seed, 1, pair_salt), params, h
                )
                value = max(
                    abs(residue_along(expr, form, base, params)) for base in bases
                )
                checks[tag].append(
                    ResidueCheck(
                        tag,
                        (w, v),
                        f"{tag} pair across {form}",
                        "residual",
                        value,
                        value < residual_tol,
                    )
                )

        for k_idx, key in enumerate(keys):
            coeff = h_el.coeffs[key]
            for f_idx, form in enumerate((z_form, l_form)):
                bases = _slice_bases(
                    form,
                    guards,
                    rd,
                    samples,
                    _derive_seed(seed, 2, pair_salt, k_idx, f_idx),
                    params,
                    h,
                )
                slope = min(
                    is_regular_along(
                        coeff, form, base, params, slope_floor=order_floor
                    ).slope
                    for base in bases
                )
                checks["i"].append(
                    ResidueCheck(
                        "i",
                        key,
                        f"order along {form}",
                        "slope",
                        slope,
                        slope >= order_floor,
                    )
                )
        pair_salt += 1

    for k_idx, (w, v) in enumerate(keys):
        coeff = h_el.coeffs[(w, v)]
        for r_idx, root in enumerate(sorted(inversion_set(w, rd))):
            z_form = LinearForm(root, zeros, 0)
            shifted = LinearForm(root, zeros, -1)
            probe = Prod((coeff, Quot(ThetaOf(z_form), ThetaOf(-shifted))))
            bases = _slice_bases(
                shifted,
                guards | {z_form},
                rd,
                samples,
                _derive_seed(seed, 3, k_idx, r_idx),
                params,
                h,
            )
            slope = min(
                is_regular_along(probe, shifted, base, params, slope_floor=slope_floor).slope
                for base in bases
            )
            checks["iii"].append(
                ResidueCheck(
                    "iii",
                    (w, v),
                    f"shifted regularity along {shifted}",
                    "slope",
                    slope,
                    slope >= slope_floor,
                )
            )
    return ResidueReport({tag: tuple(items) for tag, items in checks.items()})


def canonical_failing_element(rd: RootDatum, i: int = 0) -> HeckeElement:
    """1/theta(z_a) on the lone key (s_a, e): breaks the pairing condition.

    Its residue along the root wall is 1 with no partner to cancel it, so
    verify_residue_conditions must reject it with residual ~ 1.
    """
    group = weyl_group(rd)
    z_a, _ = _root_forms(rd, i)
    return HeckeElement(
        rd, {(group.simple[i], group.identity): Quot(Const(1), ThetaOf(z_a))}
    )


# ---------------------------------------------------------------------------
# identity suites


def _alternating(i: int, j: int, count: int) -> tuple[int, ...]:
    return tuple(i if k % 2 == 0 else j for k in range(count))


def verify_braid(
    i: int,
    j: int,
    rd: RootDatum,
    params: ThetaParams,
    h: complex,
    *,
    samples: int = 20,
    seed: int = 0,
    tol: float = 1e-7,
    factory: Callable[[int, RootDatum, int], HeckeElement] = dl_dynamical,
) -> IdentityReport:
    """Alternating products of length m_ij agree coefficientwise."""
    if i == j:
        raise ValueError("braid check needs two distinct simple indices")
    m = braid_order(rd, i, j)
    left = identity_element(rd)
    right = identity_element(rd)
    for k in _alternating(i, j, m):
        left = multiply(left, factory(k, rd, 1))
    for k in _alternating(j, i, m):
        right = multiply(right, factory(k, rd, 1))
    points = sample_points(
        rd, element_guards(left, right), samples, seed, params, h
    )
    residual, witness = coefficient_residual(left, right, points, params)
    return IdentityReport(
        f"braid s{i + 1} s{j + 1} (order {m})",
        residual,
        tol,
        residual < tol,
        witness,
    )


def verify_quadratic(
    i: int,
    rd: RootDatum,
    params: ThetaParams,
    h: complex,
    *,
    samples: int = 20,
    seed: int = 0,
    tol: float = 1e-7,
    factory: Callable[[int, RootDatum, int], HeckeElement] = dl_dynamical,
) -> IdentityReport:
    """The square of each two-term operator is the identity."""
    t_op = factory(i, rd, 1)
    square = multiply(t_op, t_op)
    ident = identity_element(rd)
    points = sample_points(rd, element_guards(square), samples, seed, params, h)
    residual, witness = coefficient_residual(square, ident, points, params)
    return IdentityReport(
        f"quadratic s{i + 1}", residual, tol, residual < tol, witness
    )


def reduced_words_of(w: WeylElement, rd: RootDatum) -> tuple[tuple[int, ...], ...]:
    """All reduced words of an element, by descent recursion."""
    group = weyl_group(rd)
    if w.length == 0:
        return ((),)
    words: list[tuple[int, ...]] = []
    for i in range(rd.rank):
        shorter = group.product(w, group.simple[i])
        if shorter.length == w.length - 1:
            words.extend(prefix + (i,) for prefix in reduced_words_of(shorter, rd))
    return tuple(sorted(words))


def verify_word_independence(
    rd: RootDatum,
    params: ThetaParams,
    h: complex,
    *,
    samples: int = 20,
    seed: int = 0,
    tol: float = 1e-7,
    factory: Callable[[int, RootDatum, int], HeckeElement] = dl_dynamical,
) -> IdentityReport:
    """Two distinct reduced words of the longest element give equal products."""
    group = weyl_group(rd)
    w0 = group.longest()
    words = reduced_words_of(w0, rd)
    if len(words) < 2:
        return IdentityReport(
            "word independence", 0.0, tol, True, None, {"note": "single reduced word"}
        )
    first, second = words[0], words[-1]
    left = t_w(first, rd, use_cache=False, factory=factory)
    right = t_w(second, rd, use_cache=False, factory=factory)
    points = sample_points(rd, element_guards(left, right), samples, seed, params, h)
    residual, witness = coefficient_residual(left, right, points, params)
    return IdentityReport(
        f"word independence {list(first)} vs {list(second)}",
        residual,
        tol,
        residual < tol,
        witness,
    )


def verify_psi_compat(
    i: int,
    g: MeroExpr,
    f: MeroExpr,
    rd: RootDatum,
    params: ThetaParams,
    h: complex,
    *,
    samples: int = 20,
    seed: int = 0,
    tol: float = 1e-7,
    factory: Callable[[int, RootDatum, int], HeckeElement] = dl_dynamical,
) -> IdentityReport:
    """Coproduct action on g tensor f equals the plain action on f*g.

    Requires f to depend on z only; a lambda-dependent f breaks the identity
    (that failure is itself checked as a negative control elsewhere).
    """
    for form in _expr_forms(f):
        if any(form.lam_coeffs):
            raise ValueError(f"f must be z-only; found lambda dependence in {form}")
    t_op = factory(i, rd, 1)
    lhs = psi_act(t_op, g, f)
    rhs = act_on_section(t_op, Prod((f, g)))
    guards = denominator_forms(lhs) | denominator_forms(rhs)
    points = [
        sample_generic_point(rd.rank, guards, _derive_seed(seed, k), params, h)
        for k in range(samples)
    ]
    worst = 0.0
    witness = None
    for p in points:
        cache: dict[complex, complex] = {}
        diff = abs(
            evaluate(lhs, p, params, cache=cache) - evaluate(rhs, p, params, cache=cache)
        )
        if diff > worst:
            worst, witness = diff, {"point": p, "difference": diff}
    return IdentityReport(
        f"coproduct compatibility s{i + 1}", worst, tol, worst < tol, witness
    )


def _expr_forms(e: MeroExpr) -> frozenset[LinearForm]:
    from .expr import theta_forms

    return theta_forms(e)


def verify_adjunction_identity(
    i: int,
    rd: RootDatum,
    params: ThetaParams,
    h: complex,
    *,
    samples: int = 20,
    seed: int = 0,
    tol: float = 1e-7,
    factory: Callable[[int, RootDatum, int], HeckeElement] = dl_dynamical,
    dual_factory: Callable[[int, RootDatum], HeckeElement] = dl_dual_langlands,
) -> IdentityReport:
    """The two scalar inverse identities tying an operator to its mirror.

    With T = p delta^d + q delta delta^d and its mirror T' = p' delta +
    q' delta delta^d, the twisted combinations satisfy

        p + q . (twist of p' by (s, s)) = 0,
        q . (twist of q' by (s, s)) = 1.
    """
    group = weyl_group(rd)
    s = group.simple[i]
    e = group.identity
    t_op = factory(i, rd, 1)
    t_dual = dual_factory(i, rd)
    p = t_op.coeffs[(e, s)]
    q = t_op.coeffs[(s, s)]
    p_dual = t_dual.coeffs[(s, e)]
    q_dual = t_dual.coeffs[(s, s)]
    vanish = Sum((p, Prod((q, twist(p_dual, s, s)))))
    unit = Prod((q, twist(q_dual, s, s)))
    guards = denominator_forms(vanish) | denominator_forms(unit)
    points = [
        sample_generic_point(rd.rank, guards, _derive_seed(seed, k), params, h)
        for k in range(samples)
    ]
    worst = 0.0
    witness = None
    vanish_worst = 0.0
    unit_worst = 0.0
    for p_pt in points:
        cache: dict[complex, complex] = {}
        r1 = abs(evaluate(vanish, p_pt, params, cache=cache))
        r2 = abs(evaluate(unit, p_pt, params, cache=cache) - 1.0)
        vanish_worst = max(vanish_worst, r1)
        unit_worst = max(unit_worst, r2)
        local = max(r1, r2)
        if local > worst:
            worst, witness = local, {"point": p_pt, "difference": local}
    return IdentityReport(
        f"inverse identities s{i + 1}",
        worst,
        tol,
        worst < tol,
        witness,
        {"vanishing": vanish_worst, "unit": unit_worst},
    )


def verify_pole_cancellation(
    i: int,
    f: MeroExpr,
    rd: RootDatum,
    params: ThetaParams,
    h: complex,
    *,
    samples: int = 3,
    seed: int = 0,
    slope_floor: float = -0.1,
    factory: Callable[[int, RootDatum, int], HeckeElement] = dl_dynamical,
) -> IdentityReport:
    """Acting on a regular section cancels the root-wall pole.

    Both coefficients of the two-term operator blow up along z_a = 0, but
    their residues cancel against the matching twists of f, so the action
    stays regular there: the fitted slope must not drop below slope_floor.
    """
    t_op = factory(i, rd, 1)
    acted = act_on_section(t_op, f)
    z_a, _ = _root_forms(rd, i)
    guards = denominator_forms(acted)
    bases = _slice_bases(z_a, guards, rd, samples, seed, params, h)
    slope = min(
        is_regular_along(acted, z_a, base, params, slope_floor=slope_floor).slope
        for base in bases
    )
    return IdentityReport(
        f"pole cancellation s{i + 1}",
        max(0.0, slope_floor - slope),
        abs(slope_floor),
        slope >= slope_floor,
        None,
        {"slope": slope},
    )
