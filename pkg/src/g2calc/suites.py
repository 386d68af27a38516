"""Randomised verification campaigns with deterministic, serialisable reports.

Each suite re-certifies one family of claims on freshly drawn data.  A
campaign fixes the seed, the sample count and the tolerances; running the
same campaign twice produces byte-identical output.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import comb, pi, sqrt

import numpy as np

from .ddt import (
    cartan_solutions,
    cartan_solve,
    cartan_two_form,
    cube_norm_bound,
    ddt_residual,
    ddt_residual_decomposed,
    graph_map,
    linearization_density,
    norm_bound_check,
    reformulation_residual,
    solution_report,
    wedge_injectivity,
)
from .dhym import (
    dhym_report,
    j_duality_residual,
    normal_form,
    pq_project,
    random_unitary_rotation,
    standard_kahler,
    symbol_bound,
)
from .forms import (
    KForm,
    Metric,
    euclidean_metric,
    flat,
    form_inner,
    form_norm,
    hodge,
    interior,
    pullback,
    rel_residual,
    wedge,
)
from .g2 import G2Data, g2_bundle, identity_battery, standard_g2
from .product import correspondence_check, standard_su3, zero_phase_flux
from .torus import adjoint_check, harmonic_dim

SUITE_IDS: dict[str, int] = {
    "appendixA": 1,
    "appendixB": 2,
    "thmC1": 3,
    "propD1": 4,
    "corD2": 5,
    "dhym": 6,
    "product": 7,
    "torus": 8,
}

MAX_WITNESSES = 5


def _plain(value):
    if isinstance(value, KForm):
        return value.to_dict()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    return value


@dataclass(frozen=True)
class Report:
    """Outcome of one suite: counts, the worst residual seen, failure data."""

    suite: str
    passed: int
    failed: int
    worst_residual: float
    witnesses: tuple[dict, ...]
    details: dict

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "passed": self.passed,
            "failed": self.failed,
            "worst_residual": self.worst_residual,
            "witnesses": [dict(w) for w in self.witnesses],
            "details": dict(self.details),
        }


class _Recorder:
    """Accumulates check outcomes for one suite."""

    def __init__(self, suite: str):
        self.suite = suite
        self.passed = 0
        self.failed = 0
        self.worst = 0.0
        self.witnesses: list[dict] = []
        self.details: dict = {}

    def _fail(self, entry: dict) -> None:
        self.failed += 1
        if len(self.witnesses) < MAX_WITNESSES:
            self.witnesses.append({k: _plain(v) for k, v in entry.items()})

    def check(self, label: str, residual: float, tol: float, **info) -> None:
        residual = float(residual)
        self.worst = max(self.worst, residual)
        if residual <= tol:
            self.passed += 1
        else:
            self._fail({"check": label, "residual": residual, "tolerance": tol, **info})

    def expect(self, label: str, ok: bool, **info) -> None:
        if ok:
            self.passed += 1
        else:
            self._fail({"check": label, **info})

    def report(self) -> Report:
        return Report(
            suite=self.suite,
            passed=self.passed,
            failed=self.failed,
            worst_residual=self.worst,
            witnesses=tuple(self.witnesses),
            details=self.details,
        )


def _random_metric(rng: np.random.Generator, n: int) -> Metric:
    a = rng.standard_normal((n, n))
    return Metric(n, a @ a.T + 0.5 * np.eye(n))


def _random_two_form(rng: np.random.Generator, n: int, scale: float = 1.0) -> KForm:
    return KForm(n, 2, scale * rng.standard_normal(comb(n, 2)))


def _zero_sum_weights(rng: np.random.Generator, bound: float = 3.0):
    l1, l2 = rng.uniform(-bound, bound, size=2)
    return float(l1), float(l2), float(-l1 - l2)


def _run_appendix_a(campaign: Campaign, rng: np.random.Generator) -> Report:
    rec = _Recorder("appendixA")
    dims = (6, 7, 8)
    for i in range(campaign.samples):
        n = dims[i % 3]
        m = _random_metric(rng, n) if i % 3 == 0 else euclidean_metric(n)
        k = int(rng.integers(0, n + 1))
        a = KForm(n, k, rng.standard_normal(comb(n, k)))
        b = KForm(n, k, rng.standard_normal(comb(n, k)))
        v = rng.standard_normal(n)
        vb = flat(v, m)

        twice = hodge(hodge(a, m), m)
        rec.check(
            "double star sign",
            rel_residual(twice.coeffs, ((-1) ** (k * (n - k))) * a.coeffs),
            campaign.tol_rel,
            sample=i, dim=n, grade=k, form=a,
        )
        inner = form_inner(a, b, m)
        rec.check(
            "star isometry",
            abs(form_inner(hodge(a, m), hodge(b, m), m) - inner)
            / max(1.0, abs(inner)),
            campaign.tol_rel,
            sample=i, dim=n, grade=k, form=a,
        )
        lhs = interior(v, hodge(a, m))
        rhs = ((-1) ** k) * hodge(wedge(vb, a), m)
        rec.check(
            "contraction of star",
            rel_residual(lhs.coeffs, rhs.coeffs),
            campaign.tol_rel,
            sample=i, dim=n, grade=k, form=a, vector=v,
        )
        if k >= 1:
            lhs = hodge(interior(v, a), m)
            rhs = ((-1) ** (k + 1)) * wedge(vb, hodge(a, m))
            rec.check(
                "star of contraction",
                rel_residual(lhs.coeffs, rhs.coeffs),
                campaign.tol_rel,
                sample=i, dim=n, grade=k, form=a, vector=v,
            )
    rec.details = {"dimensions": list(dims), "trials": campaign.samples}
    return rec.report()


def _run_appendix_b(campaign: Campaign, rng: np.random.Generator) -> Report:
    rec = _Recorder("appendixB")
    data = standard_g2()

    traces = (
        ("two-form 7-part trace", data.proj2_7, 7.0),
        ("two-form 14-part trace", data.proj2_14, 14.0),
        ("three-form 1-part trace", data.proj3_1, 1.0),
        ("three-form 7-part trace", data.proj3_7, 7.0),
        ("three-form 27-part trace", data.proj3_27, 27.0),
    )
    for label, mat, expected in traces:
        rec.check(label, abs(float(np.trace(mat)) - expected), campaign.tol_rel)
    pair_sums = (
        ("two-form projectors resolve identity",
         data.proj2_7 + data.proj2_14, np.eye(21)),
        ("three-form projectors resolve identity",
         data.proj3_1 + data.proj3_7 + data.proj3_27, np.eye(35)),
    )
    for label, total, expected in pair_sums:
        rec.check(label, rel_residual(total, expected), campaign.tol_rel)
    for label, mat in (("7-part idempotent", data.proj2_7),
                       ("14-part idempotent", data.proj2_14)):
        rec.check(label, rel_residual(mat @ mat, mat), campaign.tol_rel)
    rec.check(
        "projectors annihilate each other",
        float(np.abs(data.proj2_7 @ data.proj2_14).max()),
        campaign.tol_rel,
    )
    rec.check(
        "structure form has norm seven",
        abs(form_inner(data.phi, data.phi, data.metric) - 7.0),
        campaign.tol_rel,
    )

    flux = KForm.monomial(7, (1, 2)) - KForm.monomial(7, (3, 4))
    rank, cube = wedge_injectivity(flux, data)
    rec.expect("degenerate flux drops rank", rank <= 20 and cube == 0.0,
               rank=rank, cube_norm=cube)
    witness = KForm.monomial(7, (1, 3)) + KForm.monomial(7, (2, 4))
    rec.expect("kernel witness wedges to zero",
               not np.any(wedge(flux, witness).coeffs))
    rec.details["degenerate_rank"] = int(rank)

    for i in range(campaign.samples):
        u = rng.standard_normal(7)
        beta = KForm(7, 2, data.proj2_14 @ rng.standard_normal(21))
        rec.check("contraction battery", identity_battery(u, beta, data),
                  campaign.tol_rel, sample=i, vector=u, form=beta)
    rec.details["battery_trials"] = campaign.samples
    return rec.report()


def _run_thm_c1(campaign: Campaign, rng: np.random.Generator) -> Report:
    rec = _Recorder("thmC1")
    data = standard_g2()
    draws = max(67, campaign.samples // 5)
    certified = 0
    for i in range(draws):
        weights = _zero_sum_weights(rng)
        solutions = cartan_solutions(*weights)
        for f in solutions:
            rep = solution_report(f, data)
            rec.check("transport agrees with algebraic dual",
                      rep.lhs_minus_rhs_norm, campaign.tol_identity,
                      sample=i, flux=f)
            rec.check("conformal normalisation is a structure",
                      rep.conformal_residual, campaign.tol_identity,
                      sample=i, flux=f)
            rec.expect("factor stays away from zero",
                       abs(rep.scalar_factor) > 1e-6,
                       sample=i, factor=rep.scalar_factor, flux=f)
            rec.expect("orientation sign matches factor",
                       rep.sign_C == (1 if rep.scalar_factor > 0 else -1),
                       sample=i, factor=rep.scalar_factor, sign=rep.sign_C,
                       flux=f)
            certified += 1
        direction = _random_two_form(rng, 7)
        try:
            linearization_density(solutions[0], direction, data,
                                  tol_identity=campaign.tol_identity)
            rec.expect("linearised density routes agree", True)
        except ValueError as err:
            rec.expect("linearised density routes agree", False,
                       sample=i, error=str(err), flux=solutions[0],
                       form=direction)
    rec.details = {"solutions_certified": certified, "families": draws}
    return rec.report()


def _run_prop_d1(campaign: Campaign, rng: np.random.Generator) -> Report:
    rec = _Recorder("propD1")
    data = standard_g2()
    for i in range(campaign.samples):
        scale = float(10.0 ** rng.uniform(-1.0, 1.0))
        f = _random_two_form(rng, 7, scale)
        direct = ddt_residual(f, data)
        split = ddt_residual_decomposed(f, data)
        rec.check("type split reassembles the residual",
                  rel_residual(split.coeffs, direct.coeffs),
                  campaign.tol_rel, sample=i, scale=scale, flux=f)
    rec.details = {"fluxes_checked": campaign.samples}
    return rec.report()


def _run_cor_d2(campaign: Campaign, rng: np.random.Generator) -> Report:
    rec = _Recorder("corD2")
    data = standard_g2()

    roots = np.sort(cartan_solve(0.0, 0.0, 0.0))
    rec.check("pure contraction roots",
              rel_residual(roots, np.array([-sqrt(3.0), 0.0, sqrt(3.0)])),
              campaign.tol_rel)
    extremal = cartan_two_form(sqrt(3.0), (0.0, 0.0, 0.0))
    lhs, rhs, ok = norm_bound_check(extremal, data)
    rec.expect("bound saturates on the extremal solution",
               ok and abs(lhs - 3.0) < campaign.tol_identity
               and abs(rhs - 3.0) < campaign.tol_identity,
               lhs=lhs, rhs=rhs)

    draws = max(67, campaign.samples // 5)
    solutions = 0
    for i in range(draws):
        weights = _zero_sum_weights(rng)
        for f in cartan_solutions(*weights):
            solutions += 1
            lhs, rhs, ok = norm_bound_check(f, data)
            rec.expect("7-part bound holds on solutions", ok,
                       sample=i, lhs=lhs, rhs=rhs, flux=f)
            rank, cube = wedge_injectivity(f, data)
            if cube > campaign.tol_identity:
                rec.expect("wedge map has full rank", rank == 21,
                           sample=i, rank=rank, cube_norm=cube, flux=f)
            scale = max(1.0, form_norm(f, data.metric) ** 3)
            rec.check("first-order reformulation vanishes",
                      reformulation_residual(f, data) / scale,
                      campaign.tol_identity, sample=i, flux=f)
        beta = KForm(7, 2, data.proj2_14 @ rng.standard_normal(21))
        cube_lhs, cube_rhs = cube_norm_bound(beta, data)
        rec.expect("14-part cube bound",
                   cube_lhs <= cube_rhs * (1.0 + campaign.tol_rel) + 1e-12,
                   sample=i, lhs=cube_lhs, rhs=cube_rhs, form=beta)
    rec.details = {"solutions_checked": solutions, "families": draws}
    return rec.report()


def _run_dhym(campaign: Campaign, rng: np.random.Generator) -> Report:
    rec = _Recorder("dhym")
    point2 = standard_kahler(2)
    golden = dhym_report(point2, point2.omega)
    rec.check("fundamental form radius",
              abs(golden.r - 2.0), campaign.tol_rel)
    rec.check("fundamental form angle",
              abs(golden.theta - pi / 2.0), campaign.tol_rel)

    for i in range(campaign.samples):
        n = (1, 2, 3)[i % 3]
        point = standard_kahler(n)
        f = _random_two_form(rng, 2 * n)
        rep = dhym_report(point, f)
        rec.check("rotated top power is real",
                  rep.im_residual, campaign.tol_rel, sample=i, n=n, form=f)
        rec.check("volume ratio identity",
                  rep.vol_identity_residual, campaign.tol_rel,
                  sample=i, n=n, form=f)
        rec.check("lower power reproduction",
                  rep.im_identity_residual, campaign.tol_rel,
                  sample=i, n=n, form=f)
        rec.expect("radius at least one", rep.r >= 1.0 - campaign.tol_rel,
                   sample=i, n=n, r=rep.r, form=f)

        p02 = pq_project(point, f, 0, 2)
        p20 = pq_project(point, f, 2, 0)
        invariant = KForm(2 * n, 2, np.real(f.coeffs - p02.coeffs - p20.coeffs))
        nf = normal_form(point, invariant)
        xi = KForm(2 * n, 1, rng.standard_normal(2 * n))
        try:
            sigma, floor = symbol_bound(point, nf, xi,
                                        tol_identity=campaign.tol_identity)
            rec.expect("symbol dominates its floor",
                       sigma >= floor - campaign.tol_rel,
                       sample=i, n=n, sigma=sigma, floor=floor,
                       form=invariant, covector=xi)
        except ValueError as err:
            rec.expect("symbol dominates its floor", False,
                       sample=i, n=n, error=str(err),
                       form=invariant, covector=xi)
        rec.check("duality against the complex structure",
                  j_duality_residual(point, xi),
                  campaign.tol_rel, sample=i, n=n, covector=xi)

        if n >= 2:
            rotation = random_unitary_rotation(rng, point)
            rotated = normal_form(point, pullback(rotation, invariant))
            rec.check("eigenvalues invariant under rotation",
                      rel_residual(np.sort(rotated.lambdas),
                                   np.sort(nf.lambdas)),
                      campaign.tol_identity, sample=i, n=n, form=invariant)
    rec.details = {"complex_dimensions": [1, 2, 3]}
    return rec.report()


def _run_product(campaign: Campaign, rng: np.random.Generator) -> Report:
    rec = _Recorder("product")
    su3 = standard_su3()
    solved_both = 0
    solved_neither = 0
    for i in range(campaign.samples):
        branch = i % 3
        if branch == 0:
            f = zero_phase_flux(rng, su3)
        elif branch == 1:
            f = _random_two_form(rng, 6, 1.5)
        else:
            f = _random_two_form(rng, 6, 0.3)
        rep = correspondence_check(su3, f, tol=campaign.tol_identity)
        rec.expect("classifications agree", rep.agree, sample=i,
                   branch=branch, flux=f, **rep.to_dict())
        if branch == 0:
            rec.expect("engineered flux solves both sides",
                       rep.ddt_solves and rep.su3_solves,
                       sample=i, flux=f, **rep.to_dict())
        if rep.ddt_solves and rep.su3_solves:
            solved_both += 1
        elif not rep.ddt_solves and not rep.su3_solves:
            solved_neither += 1
    rec.details = {"solved_both": solved_both, "solved_neither": solved_neither}
    return rec.report()


def _run_torus(campaign: Campaign, rng: np.random.Generator) -> Report:
    rec = _Recorder("torus")
    summary = None
    for cutoff in (1, 2, 3):
        summary = harmonic_dim(cutoff)
        rec.expect(
            f"dimension counts at cutoff {cutoff}",
            (summary.dim_check_H1, summary.dim_H2, summary.b1) == (7, 0, 7),
            **summary.to_dict(),
        )
    rec.details.update(summary.to_dict())

    rescaled = harmonic_dim(1, c=-2.0)
    rec.expect("counts ignore the coupling scale",
               (rescaled.dim_check_H1, rescaled.dim_H2, rescaled.b1) == (7, 0, 7),
               **rescaled.to_dict())

    perturbation = KForm(7, 2, 0.1 * rng.standard_normal(21))
    base = standard_g2()
    moved = g2_bundle(pullback(graph_map(perturbation, base), base.phi))
    perturbed = harmonic_dim(1, moved)
    rec.expect("counts survive a structure perturbation",
               (perturbed.dim_check_H1, perturbed.dim_H2, perturbed.b1)
               == (7, 0, 7),
               **perturbed.to_dict())

    modes = min(campaign.samples, 100)
    for i in range(modes):
        k = rng.integers(-4, 5, size=7)
        rec.check("middle operator self-adjointness",
                  adjoint_check(tuple(int(v) for v in k)),
                  1e-10, sample=i, mode=[int(v) for v in k])
    for i in range(10):
        k = rng.integers(-4, 5, size=7)
        rec.check("self-adjointness on the perturbed structure",
                  adjoint_check(tuple(int(v) for v in k), moved),
                  1e-10, sample=i, mode=[int(v) for v in k])
    rec.details["modes_checked"] = modes + 10
    return rec.report()


_RUNNERS = {
    "appendixA": _run_appendix_a,
    "appendixB": _run_appendix_b,
    "thmC1": _run_thm_c1,
    "propD1": _run_prop_d1,
    "corD2": _run_cor_d2,
    "dhym": _run_dhym,
    "product": _run_product,
    "torus": _run_torus,
}


@dataclass(frozen=True)
class Campaign:
    """A reproducible run plan: seed, sample counts, tolerances, suite list.

    Suites always execute in canonical order with per-suite generators
    seeded from (seed, suite id), so a subset run reproduces exactly the
    reports the full run would have produced for those suites.
    """

    seed: int
    samples: int = 1000
    tol_rel: float = 1e-9
    tol_identity: float = 1e-8
    suites: tuple[str, ...] = tuple(SUITE_IDS)

    def __post_init__(self):
        unknown = sorted(set(self.suites) - set(SUITE_IDS))
        if unknown:
            raise ValueError(
                f"unknown suites: {', '.join(unknown)}; "
                f"valid names are {', '.join(SUITE_IDS)}"
            )
        if self.samples < 1:
            raise ValueError("samples must be positive")
        ordered = tuple(sorted(set(self.suites), key=SUITE_IDS.__getitem__))
        object.__setattr__(self, "suites", ordered)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "samples": self.samples,
            "tol_rel": self.tol_rel,
            "tol_identity": self.tol_identity,
            "suites": list(self.suites),
        }

    def run(self) -> list[Report]:
        return [
            _RUNNERS[name](self, np.random.default_rng([self.seed, SUITE_IDS[name]]))
            for name in self.suites
        ]


def all_passed(reports) -> bool:
    return all(r.failed == 0 for r in reports)


def emit(reports, fmt: str = "json", campaign: Campaign | None = None) -> bytes:
    """Serialise reports; identical inputs give identical bytes.

    The json payload is the array of report objects.  The text rendering
    prepends a campaign header when one is supplied.
    """
    if fmt == "json":
        payload = [r.to_dict() for r in reports]
        return (json.dumps(payload, sort_keys=True, indent=2) + "\n").encode()
    if fmt == "text":
        lines = []
        if campaign is not None:
            lines.append(
                f"campaign seed={campaign.seed} samples={campaign.samples} "
                f"tol_rel={campaign.tol_rel:g} tol_identity={campaign.tol_identity:g}"
            )
        for rep in reports:
            lines.append(
                f"suite {rep.suite}: passed={rep.passed} failed={rep.failed} "
                f"worst={rep.worst_residual:.3e}"
            )
            for witness in rep.witnesses:
                lines.append(f"  witness {json.dumps(witness, sort_keys=True)}")
        status = "PASS" if all_passed(reports) else "FAIL"
        lines.append(f"overall: {status}")
        return ("\n".join(lines) + "\n").encode()
    raise ValueError(f"unknown format {fmt!r}; use 'json' or 'text'")
