"""Batch identity suites: the catalog and the per-suite runners.

Each runner turns library verifiers into flat report records.  Records carry
worst-case residuals over every configured (seed, hbar) combination, so a
pass certifies the identity at all of them.  The negative-control mode
replaces the two-term generator by a deliberately damaged copy (one
coefficient rescaled); sign flips alone would leave the quadratic relation
intact, so a scale corruption is used.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Iterable

from .expr import (
    Const,
    LinearForm,
    Prod,
    ThetaOf,
    evaluate,
    sample_generic_point,
)
from .hecke import (
    HeckeElement,
    IdentityReport,
    canonical_failing_element,
    dl_dual_langlands,
    dl_dynamical,
    gamma,
    gkv_dual_generator,
    multiply,
    scale,
    verify_adjunction_identity,
    verify_braid,
    verify_pole_cancellation,
    verify_psi_compat,
    verify_quadratic,
    verify_residue_conditions,
    verify_word_independence,
    coefficient_residual,
    sample_points,
    element_guards,
    _derive_seed,
)
from .roots import RootDatum, weyl_group
from .theta import ThetaParams, theta, theta_derivative_at_zero

SUITE_NAMES = ("theta", "weyl", "residue", "gamma", "psi", "inverse")


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    suite: str
    anchor: str
    threshold: float


#: Stable catalog of every identity family the runner can certify.  The
#: anchor strings describe what each check establishes.
CATALOG: tuple[CatalogEntry, ...] = (
    CatalogEntry(
        "theta:derivative-at-zero",
        "theta",
        "unit derivative of the odd theta factor at the origin",
        1e-8,
    ),
    CatalogEntry("theta:oddness", "theta", "antisymmetry under x -> -x", 1e-8),
    CatalogEntry("theta:period-one", "theta", "sign flip under x -> x + 1", 1e-8),
    CatalogEntry(
        "theta:quasi-period",
        "theta",
        "exponential cocycle under x -> x + tau",
        1e-8,
    ),
    CatalogEntry(
        "theta:truncation",
        "theta",
        "doubling the product truncation moves values below tol_abs",
        1e-9,
    ),
    CatalogEntry(
        "weyl:quadratic",
        "weyl",
        "each two-term operator squares to the identity",
        1e-7,
    ),
    CatalogEntry(
        "weyl:braid",
        "weyl",
        "rank-2 braid relations of the two-term operators",
        1e-7,
    ),
    CatalogEntry(
        "weyl:word-independence",
        "weyl",
        "longest-element products agree across reduced words",
        1e-7,
    ),
    CatalogEntry(
        "residue:generator",
        "residue",
        "pole-order, residue-pairing, and shifted-wall checks on each generator",
        1e-6,
    ),
    CatalogEntry(
        "residue:closure",
        "residue",
        "a product of two generators still passes the residue checks",
        1e-6,
    ),
    CatalogEntry(
        "residue:reject-control",
        "residue",
        "the checker flags the canonical bad element with unit residual",
        0.1,
    ),
    CatalogEntry(
        "residue:pole-cancellation",
        "residue",
        "operator action on regular sections cancels the root-wall pole",
        0.1,
    ),
    CatalogEntry(
        "gamma:generator",
        "gamma",
        "the dual-side delta maps onto the two-term operator exactly",
        1e-9,
    ),
    CatalogEntry(
        "gamma:dual-generator",
        "gamma",
        "the image of the canonical dual generator passes the residue checks",
        1e-6,
    ),
    CatalogEntry(
        "gamma:multiplicative",
        "gamma",
        "the map respects twisted products of dual-side elements",
        1e-7,
    ),
    CatalogEntry(
        "psi:module-compat",
        "psi",
        "coproduct action matches plain action on z-only multipliers",
        1e-7,
    ),
    CatalogEntry(
        "psi:negative-control",
        "psi",
        "a lambda-dependent multiplier breaks compatibility by >= 100x",
        1e-7,
    ),
    CatalogEntry(
        "inverse:vanishing",
        "inverse",
        "mixed product of mirror coefficients cancels the plain one",
        1e-7,
    ),
    CatalogEntry(
        "inverse:unit",
        "inverse",
        "product of mirror co-coefficients equals one",
        1e-7,
    ),
    CatalogEntry(
        "inverse:dual-quadratic",
        "inverse",
        "mirror operators square to the identity",
        1e-7,
    ),
)


def catalog_entries() -> tuple[CatalogEntry, ...]:
    return CATALOG


def _corrupted_factory(i: int, rd: RootDatum, sign_of_h: int = 1) -> HeckeElement:
    """Generator with the double-shift coefficient rescaled by 1.1."""
    group = weyl_group(rd)
    s = group.simple[i]
    honest = dl_dynamical(i, rd, sign_of_h)
    coeffs = dict(honest.coeffs)
    coeffs[(s, s)] = Prod((Const(1.1), coeffs[(s, s)]))
    return HeckeElement(rd, coeffs)


@dataclass
class Record:
    """One flattened suite record heading into the JSON report."""

    name: str
    anchor: str
    max_residual: float
    threshold: float
    passed: bool
    witness: str | None = None
    error: str | None = None


def _anchor(name_prefix: str) -> str:
    for entry in CATALOG:
        if name_prefix.startswith(entry.name):
            return entry.anchor
    return ""


def _from_identity_report(name: str, rep: IdentityReport) -> Record:
    witness = None
    if not rep.passed and rep.witness is not None:
        witness = _format_witness(rep.witness)
    return Record(name, _anchor(name), rep.max_residual, rep.threshold, rep.passed, witness)


def _format_witness(witness: dict) -> str:
    parts = []
    point = witness.get("point")
    if point is not None:
        parts.append(f"z={[str(c) for c in point.z]} lam={[str(c) for c in point.lam]} h={point.h}")
    key = witness.get("key")
    if key is not None:
        parts.append(f"key=({key[0]!r},{key[1]!r})")
    if "difference" in witness:
        parts.append(f"difference={witness['difference']:.6e}")
    return "; ".join(parts)


def _worst(records: Iterable[Record]) -> Record:
    recs = list(records)
    top = max(recs, key=lambda r: r.max_residual / max(r.threshold, 1e-300))
    return top


def _merge(name: str, reports: list[tuple[IdentityReport, str]]) -> Record:
    """Collapse per-(seed, h) reports of one identity into a single record."""
    worst_rep, _ = max(reports, key=lambda pair: pair[0].max_residual)
    passed = all(rep.passed for rep, _ in reports)
    witness = None
    if not passed and worst_rep.witness is not None:
        witness = _format_witness(worst_rep.witness)
    return Record(
        name, _anchor(name), worst_rep.max_residual, worst_rep.threshold, passed, witness
    )


def _sweep(config, fn) -> list[tuple[IdentityReport, str]]:
    """Run an identity over every (seed, h) pair of the configuration."""
    out = []
    for seed in config.seeds:
        for h in config.h_values:
            out.append((fn(seed, h), f"seed={seed} h={h}"))
    return out


# ---------------------------------------------------------------------------
# suite runners; each yields Record objects


def run_theta_suite(config, params: ThetaParams) -> list[Record]:
    tol = config.tol or 1e-8
    records = []

    deriv = abs(theta_derivative_at_zero(params) - 1.0)
    records.append(
        Record("theta:derivative-at-zero", _anchor("theta:derivative-at-zero"), deriv, tol, deriv < tol)
    )

    worst_odd = worst_per = worst_quasi = worst_trunc = 0.0
    import cmath
    import dataclasses
    import math

    doubled = dataclasses.replace(params, truncation=2 * params.truncation)
    for seed in config.seeds:
        rng = random.Random(_derive_seed(seed, 11))
        for _ in range(config.samples_per_identity):
            x = rng.uniform(0.05, 0.95) + rng.uniform(0.05, 0.95) * params.tau
            tx = theta(x, params)
            scale_ref = max(abs(tx), 1e-30)
            worst_odd = max(worst_odd, abs(theta(-x, params) + tx) / scale_ref)
            worst_per = max(worst_per, abs(theta(x + 1, params) + tx) / scale_ref)
            factor = -cmath.exp(-1j * math.pi * params.tau - 2j * math.pi * x)
            worst_quasi = max(
                worst_quasi, abs(theta(x + params.tau, params) - factor * tx) / scale_ref
            )
            worst_trunc = max(worst_trunc, abs(theta(x, doubled) - tx))
    records.append(Record("theta:oddness", _anchor("theta:oddness"), worst_odd, tol, worst_odd < tol))
    records.append(
        Record("theta:period-one", _anchor("theta:period-one"), worst_per, tol, worst_per < tol)
    )
    records.append(
        Record("theta:quasi-period", _anchor("theta:quasi-period"), worst_quasi, tol, worst_quasi < tol)
    )
    records.append(
        Record(
            "theta:truncation",
            _anchor("theta:truncation"),
            worst_trunc,
            params.tol_abs,
            worst_trunc < params.tol_abs,
        )
    )
    return records


def run_weyl_suite(config, params: ThetaParams, rd: RootDatum) -> list[Record]:
    tol = config.tol or 1e-7
    factory = _corrupted_factory if config.negative_control else dl_dynamical
    records = []
    for i in range(rd.rank):
        reports = _sweep(
            config,
            lambda seed, h, i=i: verify_quadratic(
                i, rd, params, h,
                samples=config.samples_per_identity, seed=seed, tol=tol, factory=factory,
            ),
        )
        records.append(_merge(f"weyl:quadratic:s{i + 1}", reports))
    for i in range(rd.rank):
        for j in range(i + 1, rd.rank):
            reports = _sweep(
                config,
                lambda seed, h, i=i, j=j: verify_braid(
                    i, j, rd, params, h,
                    samples=config.samples_per_identity, seed=seed, tol=tol, factory=factory,
                ),
            )
            records.append(_merge(f"weyl:braid:s{i + 1}s{j + 1}", reports))
    if rd.rank >= 2:
        reports = _sweep(
            config,
            lambda seed, h: verify_word_independence(
                rd, params, h,
                samples=config.samples_per_identity, seed=seed, tol=tol, factory=factory,
            ),
        )
        records.append(_merge("weyl:word-independence", reports))
    return records


def _residue_record(name: str, report, residual_tol: float) -> Record:
    residual = max(report.worst("ii"), report.worst("ii'"))
    witness = None
    if not report.passed:
        fails = report.failures()
        witness = f"{len(fails)} failing checks; first: {fails[0].label} = {fails[0].value:.3e}"
    return Record(name, _anchor(name), residual, residual_tol, report.passed, witness)


def run_residue_suite(config, params: ThetaParams, rd: RootDatum) -> list[Record]:
    tol = config.tol or 1e-6
    factory = _corrupted_factory if config.negative_control else dl_dynamical
    records = []
    seed0 = config.seeds[0]
    h0 = config.h_values[0]
    for i in range(rd.rank):
        report = verify_residue_conditions(
            factory(i, rd, 1), params, h0, samples=3, seed=seed0, residual_tol=tol
        )
        records.append(_residue_record(f"residue:generator:s{i + 1}", report, tol))
    if rd.rank >= 2:
        adjacent = next(
            ((i, j) for i in range(rd.rank) for j in range(i + 1, rd.rank) if rd.cartan[i][j] != 0),
            (0, 1),
        )
        product = multiply(factory(adjacent[0], rd, 1), factory(adjacent[1], rd, 1))
        report = verify_residue_conditions(
            product, params, h0, samples=3, seed=seed0, residual_tol=tol
        )
        records.append(_residue_record("residue:closure", report, tol))

    bad = canonical_failing_element(rd, 0)
    bad_report = verify_residue_conditions(
        bad, params, h0, samples=3, seed=seed0, residual_tol=tol
    )
    residual = bad_report.worst("ii")
    rejected = (not bad_report.passed) and abs(residual - 1.0) < 0.1
    records.append(
        Record(
            "residue:reject-control",
            _anchor("residue:reject-control"),
            abs(residual - 1.0),
            0.1,
            rejected,
        )
    )

    n = rd.rank
    rng = random.Random(_derive_seed(seed0, 23))
    worst_slope = 0.0
    passed = True
    for k in range(5):
        coeffs_z = tuple(rng.choice((-1, 0, 1)) for _ in range(n))
        coeffs_l = tuple(rng.choice((-1, 0, 1)) for _ in range(n))
        f = ThetaOf(LinearForm(coeffs_z, coeffs_l, rng.choice((0, 1))))
        rep = verify_pole_cancellation(
            0, f, rd, params, h0, samples=2, seed=_derive_seed(seed0, 29, k)
        )
        worst_slope = max(worst_slope, rep.max_residual)
        passed = passed and rep.passed
    records.append(
        Record(
            "residue:pole-cancellation",
            _anchor("residue:pole-cancellation"),
            worst_slope,
            0.1,
            passed,
        )
    )
    return records


def run_gamma_suite(config, params: ThetaParams, rd: RootDatum) -> list[Record]:
    tol = config.tol or 1e-7
    exact_tol = 1e-9
    records = []
    seed0 = config.seeds[0]
    h0 = config.h_values[0]
    group = weyl_group(rd)
    e = group.identity

    for i in range(rd.rank):
        delta = HeckeElement(rd, {(e, group.simple[i]): Const(1)})
        image = gamma(delta)
        t_op = dl_dynamical(i, rd)
        keys_match = set(image.coeffs) == set(t_op.coeffs)
        points = sample_points(
            rd, element_guards(image, t_op), config.samples_per_identity, seed0, params, h0
        )
        residual, _ = coefficient_residual(image, t_op, points, params)
        ok = keys_match and residual < exact_tol
        records.append(
            Record(
                f"gamma:generator:s{i + 1}",
                _anchor("gamma:generator"),
                residual,
                exact_tol,
                ok,
                None if keys_match else "key sets differ",
            )
        )

    for i in range(rd.rank):
        sigma = gkv_dual_generator(i, rd)
        report = verify_residue_conditions(
            gamma(sigma), params, h0, samples=3, seed=seed0, residual_tol=config.tol or 1e-6
        )
        records.append(
            _residue_record(f"gamma:dual-generator:s{i + 1}", report, config.tol or 1e-6)
        )

    j = 1 if rd.rank >= 2 else 0
    sigma_a = gkv_dual_generator(0, rd)
    sigma_b = gkv_dual_generator(j, rd)
    lhs = gamma(multiply(sigma_a, sigma_b))
    rhs = multiply(gamma(sigma_a), gamma(sigma_b))
    points = sample_points(
        rd, element_guards(lhs, rhs), config.samples_per_identity, seed0, params, h0
    )
    residual, witness = coefficient_residual(lhs, rhs, points, params)
    records.append(
        Record(
            "gamma:multiplicative",
            _anchor("gamma:multiplicative"),
            residual,
            tol,
            residual < tol,
            _format_witness(witness) if witness and residual >= tol else None,
        )
    )
    return records


def _psi_probes(rd: RootDatum) -> tuple:
    z_a = LinearForm(rd.simple_roots[0], (0,) * rd.rank, 0)
    l_a = LinearForm((0,) * rd.rank, rd.simple_coroots[0], 0)
    g = ThetaOf(z_a - l_a + LinearForm((0,) * rd.rank, (0,) * rd.rank, 1))
    f_good = ThetaOf(z_a)
    f_bad = ThetaOf(l_a)
    return g, f_good, f_bad


def run_psi_suite(config, params: ThetaParams, rd: RootDatum) -> list[Record]:
    tol = config.tol or 1e-7
    factory = _corrupted_factory if config.negative_control else dl_dynamical
    g, f_good, f_bad = _psi_probes(rd)
    reports = _sweep(
        config,
        lambda seed, h: verify_psi_compat(
            0, g, f_good, rd, params, h,
            samples=config.samples_per_identity, seed=seed, tol=tol, factory=factory,
        ),
    )
    records = [_merge("psi:module-compat", reports)]

    # The control swaps in a lambda-dependent multiplier by evaluating the
    # same two sides directly; it must miss by a wide factor.
    from .hecke import act_on_section, psi_act

    seed0 = config.seeds[0]
    h0 = config.h_values[0]
    t_op = dl_dynamical(0, rd)
    lhs = psi_act(t_op, g, f_bad)
    rhs = act_on_section(t_op, Prod((f_bad, g)))
    from .expr import denominator_forms

    guards = denominator_forms(lhs) | denominator_forms(rhs)
    worst = 0.0
    for k in range(config.samples_per_identity):
        p = sample_generic_point(rd.rank, guards, _derive_seed(seed0, 31, k), params, h0)
        cache: dict[complex, complex] = {}
        worst = max(
            worst,
            abs(evaluate(lhs, p, params, cache=cache) - evaluate(rhs, p, params, cache=cache)),
        )
    records.append(
        Record(
            "psi:negative-control",
            _anchor("psi:negative-control"),
            worst,
            100.0 * tol,
            worst > 100.0 * tol,
        )
    )
    return records


def run_inverse_suite(config, params: ThetaParams, rd: RootDatum) -> list[Record]:
    tol = config.tol or 1e-7
    factory = _corrupted_factory if config.negative_control else dl_dynamical
    records = []

    vanish_reports = []
    unit_reports = []
    for seed in config.seeds:
        for h in config.h_values:
            rep = verify_adjunction_identity(
                0, rd, params, h,
                samples=config.samples_per_identity, seed=seed, tol=tol, factory=factory,
            )
            vanish_reports.append(rep.details["vanishing"])
            unit_reports.append(rep.details["unit"])
    worst_vanish = max(vanish_reports)
    worst_unit = max(unit_reports)
    records.append(
        Record(
            "inverse:vanishing", _anchor("inverse:vanishing"),
            worst_vanish, tol, worst_vanish < tol,
        )
    )
    records.append(
        Record("inverse:unit", _anchor("inverse:unit"), worst_unit, tol, worst_unit < tol)
    )

    dual = dl_dual_langlands(0, rd)
    square = multiply(dual, dual)
    from .hecke import identity_element

    ident = identity_element(rd)
    worst = 0.0
    passed = True
    for seed in config.seeds:
        points = sample_points(
            rd,
            element_guards(square),
            config.samples_per_identity,
            seed,
            params,
            config.h_values[0],
        )
        residual, _ = coefficient_residual(square, ident, points, params)
        worst = max(worst, residual)
        passed = passed and residual < tol
    records.append(
        Record(
            "inverse:dual-quadratic",
            _anchor("inverse:dual-quadratic"),
            worst,
            tol,
            passed,
        )
    )
    return records


SUITE_RUNNERS: dict[str, Callable] = {
    "theta": lambda config, params, rd: run_theta_suite(config, params),
    "weyl": run_weyl_suite,
    "residue": run_residue_suite,
    "gamma": run_gamma_suite,
    "psi": run_psi_suite,
    "inverse": run_inverse_suite,
}
