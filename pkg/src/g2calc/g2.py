"""The standard G2 package on R^7: associative form, induced metric, projections.

The positive 3-form phi used throughout is

    phi = e123 + e145 + e167 + e246 - e257 - e347 - e356

with coassociative dual

    star(phi) = e4567 + e2367 + e2345 + e1357 - e1346 - e1256 - e1247.

Any 3-form in the same open orbit induces a metric through the bilinear
form B(u, v) vol = (1/6) i(u)phi ^ i(v)phi ^ phi, normalised by the ninth
root of its determinant so that phi has unit comass.  Two-forms split into
a 7-dimensional piece {i(u)phi} and a 14-dimensional piece annihilated by
wedging with star(phi); three-forms split as 1 + 7 + 27.  Projections are
assembled from the wedge operator's integer spectrum, never from an
eigensolver.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .forms import (
    KForm,
    Metric,
    euclidean_metric,
    form_inner,
    form_norm,
    hodge,
    interior,
    rel_residual,
    wedge,
)

PHI_MONOMIALS = (
    ((0, 1, 2), 1.0),
    ((0, 3, 4), 1.0),
    ((0, 5, 6), 1.0),
    ((1, 3, 5), 1.0),
    ((1, 4, 6), -1.0),
    ((2, 3, 6), -1.0),
    ((2, 4, 5), -1.0),
)

STAR_PHI_MONOMIALS = (
    ((3, 4, 5, 6), 1.0),
    ((1, 2, 5, 6), 1.0),
    ((1, 2, 3, 4), 1.0),
    ((0, 2, 4, 6), 1.0),
    ((0, 2, 3, 5), -1.0),
    ((0, 1, 4, 5), -1.0),
    ((0, 1, 3, 6), -1.0),
)


def _from_monomials(grade: int, monomials) -> KForm:
    total = KForm.zero(7, grade)
    for indices, c in monomials:
        total = total + KForm.monomial(7, indices, c)
    return total


@dataclass(frozen=True)
class TwoFormSplit:
    """A 2-form written as i(u)phi plus a piece in the 14-dimensional part."""

    u: np.ndarray
    f14: KForm


@dataclass(frozen=True)
class G2Data:
    """A G2 package: forms, induced metric, and type-decomposition projectors."""

    phi: KForm
    star_phi: KForm
    metric: Metric
    proj2_7: np.ndarray
    proj2_14: np.ndarray
    proj3_1: np.ndarray
    proj3_7: np.ndarray
    proj3_27: np.ndarray
    basis2_7: np.ndarray  # columns i(e_i)phi, 21 x 7
    basis3_7: np.ndarray  # columns i(e_i)star_phi, 35 x 7
    _cache: dict = field(default_factory=dict, repr=False, compare=False)


def metric_from_three_form(phi: KForm) -> Metric:
    """Recover the metric (and orientation) a positive 3-form induces.

    Raises ValueError when the intermediate bilinear form is not definite,
    which is the algebraic meaning of "not a G2 structure".
    """
    if (phi.dim, phi.grade) != (7, 3):
        raise ValueError("expected a 3-form on R^7")
    basis = np.eye(7)
    contractions = [interior(basis[i], phi) for i in range(7)]
    raw = np.empty((7, 7))
    for i in range(7):
        for j in range(i, 7):
            top = wedge(wedge(contractions[i], contractions[j]), phi)
            raw[i, j] = raw[j, i] = top.coeffs[0] / 6.0
    eigs = np.linalg.eigvalsh(raw)
    if eigs.min() * eigs.max() <= 0 or abs(eigs).min() < 1e-12 * abs(eigs).max():
        raise ValueError("not a G2 structure: induced bilinear form is not definite")
    det = float(np.linalg.det(raw))
    ninth_root = np.copysign(abs(det) ** (1.0 / 9.0), det)
    return Metric(7, raw / ninth_root, orientation=1 if det > 0 else -1)


def g2_bundle(phi: KForm) -> G2Data:
    """Assemble metric, dual form and projections for a positive 3-form."""
    metric = metric_from_three_form(phi)
    star_phi = hodge(phi, metric)

    basis = np.eye(7)
    basis2_7 = np.column_stack([interior(basis[i], phi).coeffs for i in range(7)])
    basis3_7 = np.column_stack([interior(basis[i], star_phi).coeffs for i in range(7)])

    # alpha -> star(phi ^ alpha) on 2-forms has eigenvalue 2 on the 7-part
    # and -1 on the 14-part, so both projections are linear in the operator.
    wedge_op = np.column_stack(
        [
            hodge(wedge(phi, KForm(7, 2, col)), metric).coeffs
            for col in np.eye(21)
        ]
    )
    eye2 = np.eye(21)
    proj2_7 = (wedge_op + eye2) / 3.0
    proj2_14 = (2.0 * eye2 - wedge_op) / 3.0

    gram3 = metric.gram_on_forms(3)
    phi_norm2 = float(phi.coeffs @ gram3 @ phi.coeffs)
    proj3_1 = np.outer(phi.coeffs, gram3 @ phi.coeffs) / phi_norm2
    normal = basis3_7.T @ gram3 @ basis3_7
    proj3_7 = basis3_7 @ np.linalg.solve(normal, basis3_7.T @ gram3)
    proj3_27 = np.eye(35) - proj3_1 - proj3_7

    return G2Data(
        phi=phi,
        star_phi=star_phi,
        metric=metric,
        proj2_7=proj2_7,
        proj2_14=proj2_14,
        proj3_1=proj3_1,
        proj3_7=proj3_7,
        proj3_27=proj3_27,
        basis2_7=basis2_7,
        basis3_7=basis3_7,
    )


_STANDARD: list[G2Data] = []


def standard_g2() -> G2Data:
    """The shared package for the standard flat structure."""
    if not _STANDARD:
        _STANDARD.append(g2_bundle(_from_monomials(3, PHI_MONOMIALS)))
    return _STANDARD[0]


def standard_star_phi() -> KForm:
    """Frozen coefficients of star(phi) for golden comparisons."""
    return _from_monomials(4, STAR_PHI_MONOMIALS)


def _require_two_form(f: KForm) -> None:
    if (f.dim, f.grade) != (7, 2):
        raise ValueError("expected a 2-form on R^7")


def project2(f: KForm, data: G2Data | None = None) -> TwoFormSplit:
    """Split a 2-form into i(u)phi and its 14-part."""
    if data is None:
        data = standard_g2()
    _require_two_form(f)
    part7 = data.proj2_7 @ f.coeffs
    cols = data.basis2_7
    u = np.linalg.solve(cols.T @ cols, cols.T @ part7)
    f14 = KForm(7, 2, f.coeffs - cols @ u)
    return TwoFormSplit(u=u, f14=f14)


def assemble2(split: TwoFormSplit, data: G2Data | None = None) -> KForm:
    """Inverse of project2."""
    if data is None:
        data = standard_g2()
    return interior(split.u, data.phi) + split.f14


def project3(gamma: KForm, data: G2Data | None = None) -> tuple[KForm, KForm, KForm]:
    """Split a 3-form into its 1, 7 and 27 dimensional components."""
    if data is None:
        data = standard_g2()
    if (gamma.dim, gamma.grade) != (7, 3):
        raise ValueError("expected a 3-form on R^7")
    return (
        KForm(7, 3, data.proj3_1 @ gamma.coeffs),
        KForm(7, 3, data.proj3_7 @ gamma.coeffs),
        KForm(7, 3, data.proj3_27 @ gamma.coeffs),
    )


def lambda14_wedge_norm(beta: KForm, data: G2Data | None = None) -> float:
    """Norm of beta ^ star(phi); zero exactly on the 14-dimensional part."""
    if data is None:
        data = standard_g2()
    _require_two_form(beta)
    return form_norm(wedge(beta, data.star_phi), data.metric)


def identity_battery(u: np.ndarray, beta: KForm, data: G2Data | None = None) -> float:
    """Max relative residual over six contraction identities.

    The first three hold for every vector u; the last three additionally
    need beta to lie in the 14-dimensional part of the 2-forms.
    """
    if data is None:
        data = standard_g2()
    _require_two_form(beta)
    u = np.asarray(u, dtype=float)
    m = data.metric
    phi, star_phi = data.phi, data.star_phi

    ub = KForm(7, 1, m.gram @ u)
    star_ub = hodge(ub, m)
    iu_phi = interior(u, phi)
    iu_star_phi = interior(u, star_phi)
    u_norm2 = float(u @ m.gram @ u)
    beta_norm2 = form_inner(beta, beta, m)

    residuals = [
        rel_residual(wedge(phi, iu_star_phi).coeffs, -4.0 * star_ub.coeffs),
        rel_residual(wedge(star_phi, iu_phi).coeffs, 3.0 * star_ub.coeffs),
        rel_residual(wedge(phi, iu_phi).coeffs, 2.0 * hodge(iu_phi, m).coeffs),
        rel_residual(
            wedge(wedge(iu_phi, iu_phi), iu_phi).coeffs,
            6.0 * u_norm2 * star_ub.coeffs,
        ),
        rel_residual(
            wedge(wedge(iu_phi, iu_phi), beta).coeffs,
            2.0 * wedge(wedge(star_phi, ub), interior(u, beta)).coeffs,
        ),
        rel_residual(
            wedge(iu_phi, wedge(beta, beta)).coeffs,
            (-beta_norm2 * star_ub + wedge(phi, interior(u, wedge(beta, beta)))).coeffs,
        ),
    ]
    return max(residuals)
