"""Dimensional reduction between a Kahler threefold and a seven dimensional cone point.

A threefold carries a fundamental two-form omega and a holomorphic volume
form Omega normalised so that Omega ^ conj(Omega) = -8i omega^3 / 6.  The
product with a line carries the three-form dx ^ omega + Re(Omega), whose
deformed equation splits into the component along dx and the component
without it.  The first vanishes exactly when the curvature has no
antiholomorphic part, the second exactly when Im((omega + iF)^3) = 0, and
the classification of solutions on the two sides must always agree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb

import numpy as np

from .forms import (
    KForm,
    form_norm,
    multi_indices,
    pullback,
    rel_residual,
    wedge,
)
from .g2 import G2Data, g2_bundle
from .ddt import ddt_residual, is_solution
from .dhym import (
    HermitianPoint,
    NormalForm,
    pq_project,
    random_unitary_rotation,
    standard_kahler,
    _wedge_power,
)

PRODUCT_TOL = 1e-8


def lift(a: KForm, with_dx: bool = False) -> KForm:
    """Embed a form on the threefold into seven dimensions, spanning index 0.

    The embedding shifts every coordinate index up by one; with_dx wedges
    the result with the covector of the new first coordinate.
    """
    if a.dim != 6:
        raise ValueError(f"expected a form on R^6, got R^{a.dim}")
    k = a.grade
    pos7 = {idx: i for i, idx in enumerate(multi_indices(7, k))}
    out = np.zeros(comb(7, k), dtype=a.coeffs.dtype)
    for pos, idx in enumerate(multi_indices(6, k)):
        out[pos7[tuple(i + 1 for i in idx)]] = a.coeffs[pos]
    lifted = KForm(7, k, out)
    if with_dx:
        return wedge(KForm.monomial(7, (0,)), lifted)
    return lifted


def dx_split(a: KForm) -> tuple[KForm, KForm]:
    """Write a form on R^7 as dx ^ lift(first) + lift(second)."""
    if a.dim != 7:
        raise ValueError(f"expected a form on R^7, got R^{a.dim}")
    k = a.grade
    if not 1 <= k <= 6:
        raise ValueError(f"grade must lie in 1..6 to split, got {k}")
    pos_low = {idx: i for i, idx in enumerate(multi_indices(6, k - 1))}
    pos_same = {idx: i for i, idx in enumerate(multi_indices(6, k))}
    low = np.zeros(comb(6, k - 1), dtype=a.coeffs.dtype)
    same = np.zeros(comb(6, k), dtype=a.coeffs.dtype)
    for pos, idx in enumerate(multi_indices(7, k)):
        if idx[0] == 0:
            low[pos_low[tuple(i - 1 for i in idx[1:])]] = a.coeffs[pos]
        else:
            same[pos_same[tuple(i - 1 for i in idx)]] = a.coeffs[pos]
    return KForm(6, k - 1, low), KForm(6, k, same)


@dataclass(frozen=True)
class SU3Point:
    """A Hermitian point together with a normalised holomorphic volume form."""

    point: HermitianPoint
    holo: KForm
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.point.n != 3:
            raise ValueError("the reduction needs complex dimension three")
        if (self.holo.dim, self.holo.grade) != (6, 3):
            raise ValueError("the volume form must be a 3-form on R^6")
        omega = self.point.omega
        if form_norm(wedge(omega, self.holo), self.point.metric) > PRODUCT_TOL:
            raise ValueError("volume form does not annihilate the fundamental form")
        pure = pq_project(self.point, self.holo, 3, 0)
        if rel_residual(pure.coeffs, self.holo.coeffs) > PRODUCT_TOL:
            raise ValueError("volume form is not of type (3,0)")
        vol = (1.0 / 6.0) * _wedge_power(omega, 3)
        pairing = wedge(self.holo, KForm(6, 3, self.holo.coeffs.conj()))
        if rel_residual(pairing.coeffs, -8.0j * vol.coeffs) > PRODUCT_TOL:
            raise ValueError("volume form is not normalised to -8i times the volume")

    @property
    def omega(self) -> KForm:
        return self.point.omega

    @property
    def re_holo(self) -> KForm:
        return KForm(6, 3, self.holo.coeffs.real)

    @property
    def im_holo(self) -> KForm:
        return KForm(6, 3, self.holo.coeffs.imag)


@lru_cache(maxsize=None)
def standard_su3() -> SU3Point:
    """The flat threefold with dz^1 ^ dz^2 ^ dz^3 as volume form."""
    point = standard_kahler(3)
    holo = KForm(6, 0, np.ones(1, dtype=complex))
    for j in range(3):
        coeffs = np.zeros(6, dtype=complex)
        coeffs[2 * j] = 1.0
        coeffs[2 * j + 1] = 1.0j
        holo = wedge(holo, KForm(6, 1, coeffs))
    return SU3Point(point, holo)


def product_phi(su3: SU3Point) -> KForm:
    """The positive three-form dx ^ omega + Re(Omega) of the product."""
    return lift(su3.omega, with_dx=True) + lift(su3.re_holo)


def product_psi(su3: SU3Point) -> KForm:
    """The dual four-form omega^2 / 2 - dx ^ Im(Omega) of the product."""
    return 0.5 * lift(wedge(su3.omega, su3.omega)) - lift(su3.im_holo, with_dx=True)


def product_g2(su3: SU3Point) -> G2Data:
    """Bundle of the product structure; its dual form must match product_psi."""
    if "bundle" not in su3._cache:
        data = g2_bundle(product_phi(su3))
        if rel_residual(data.star_phi.coeffs, product_psi(su3).coeffs) > PRODUCT_TOL:
            raise ValueError("induced dual form disagrees with the product formula")
        su3._cache["bundle"] = data
    return su3._cache["bundle"]


@dataclass(frozen=True)
class ProductReport:
    """Solution classification of one curvature on both ends of the reduction."""

    ddt_residual_norm: float
    phase_residual_norm: float
    antiholo_norm: float
    p02_norm: float
    ddt_solves: bool
    su3_solves: bool

    @property
    def agree(self) -> bool:
        return self.ddt_solves == self.su3_solves

    def to_dict(self) -> dict:
        return {
            "ddt_residual_norm": self.ddt_residual_norm,
            "phase_residual_norm": self.phase_residual_norm,
            "antiholo_norm": self.antiholo_norm,
            "p02_norm": self.p02_norm,
            "ddt_solves": self.ddt_solves,
            "su3_solves": self.su3_solves,
            "agree": self.agree,
        }


def correspondence_check(su3: SU3Point, f: KForm, tol: float = PRODUCT_TOL) -> ProductReport:
    """Classify a curvature on the threefold and on the product independently.

    The threefold side tests the phase condition Im((omega + iF)^3) = 0 and
    the absence of a (0,2) component; the product side tests the deformed
    equation of the lifted flux.  Thresholds scale with the flux size.
    """
    if (f.dim, f.grade) != (6, 2):
        raise ValueError("expected a 2-form on R^6")
    if np.iscomplexobj(f.coeffs):
        raise ValueError("curvature representative must be real")
    metric = su3.point.metric
    data = product_g2(su3)
    residual = ddt_residual(lift(f), data)
    ddt_norm = form_norm(residual, data.metric)
    rho = KForm(6, 2, su3.omega.coeffs + 1j * f.coeffs)
    phase = KForm(6, 6, (1.0 / 6.0) * np.imag(_wedge_power(rho, 3).coeffs))
    phase_norm = form_norm(phase, metric)
    antiholo_norm = form_norm(wedge(f, su3.im_holo), metric)
    p02_norm = form_norm(pq_project(su3.point, f, 0, 2), metric)
    size = form_norm(f, metric)
    cubic_scale = max(1.0, size**3)
    return ProductReport(
        ddt_residual_norm=ddt_norm,
        phase_residual_norm=phase_norm,
        antiholo_norm=antiholo_norm,
        p02_norm=p02_norm,
        ddt_solves=is_solution(lift(f), data, tol),
        su3_solves=bool(
            phase_norm <= tol * cubic_scale and p02_norm <= tol * max(1.0, size)
        ),
    )


def zero_phase_flux(rng: np.random.Generator, su3: SU3Point,
                    bound: float = 2.0) -> KForm:
    """A random (1,1) curvature whose eigenvalue angles sum to zero exactly.

    Two eigenvalues are drawn freely and the third is forced through the
    arctangent addition law, which is exact while the drawn product stays
    below one in magnitude.
    """
    while True:
        l1, l2 = rng.uniform(-bound, bound, size=2)
        if abs(l1 * l2) < 0.99:
            break
    l3 = -(l1 + l2) / (1.0 - l1 * l2)
    base = NormalForm(su3.point, np.zeros(3), su3.point.frame)
    diag = KForm.zero(6, 2)
    for i, lam in enumerate((l1, l2, l3)):
        diag = diag + lam * wedge(base.u_form(i), base.v_form(i))
    rotation = random_unitary_rotation(rng, su3.point)
    return pullback(rotation, diag)
