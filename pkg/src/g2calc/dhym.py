"""Constant Kahler structures and the normal form of a deformed curvature.

A point of a Kahler manifold is modelled by its tangent space: an even
dimensional inner-product space together with a compatible complex
structure J and the associated two-form omega = g(J., .).  A real (1,1)
curvature representative F admits a unitary frame in which it is
diagonal, F = sum_i lambda_i u^i ^ v^i with v_i = J u_i; every closed
form identity of the deformed equation is a statement about those
eigenvalues and is certified here against direct wedge arithmetic.

The radius r = prod sqrt(1 + lambda_i^2) and angle theta =
sum arctan(lambda_i) encode the complex volume ratio
(omega + iF)^n = r e^{i theta} omega^n.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb, factorial

import numpy as np
import scipy.linalg

from .forms import (
    ABS_FLOOR,
    KForm,
    LinearMap,
    Metric,
    euclidean_metric,
    form_norm,
    hodge,
    multi_indices,
    pullback,
    rel_residual,
    wedge,
)

ONE_ONE_TOL = 1e-8
FRAME_TOL = 1e-10


def _wedge_power(a: KForm, k: int) -> KForm:
    if k == 0:
        return KForm(a.dim, 0, np.ones(1))
    out = a
    for _ in range(k - 1):
        out = wedge(out, a)
    return out


def _skew_matrix(f: KForm) -> np.ndarray:
    mat = np.zeros((f.dim, f.dim), dtype=f.coeffs.dtype)
    for pos, (i, j) in enumerate(multi_indices(f.dim, 2)):
        mat[i, j] = f.coeffs[pos]
        mat[j, i] = -f.coeffs[pos]
    return mat


def _wrap_angle(theta: float) -> float:
    return float((theta + np.pi) % (2.0 * np.pi) - np.pi)


@dataclass(frozen=True)
class HermitianPoint:
    """An inner-product space with a compatible constant complex structure."""

    n: int
    metric: Metric
    j_map: LinearMap
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if not 1 <= self.n <= 4:
            raise ValueError(f"complex dimension must lie in 1..4, got {self.n}")
        if self.metric.dim != 2 * self.n:
            raise ValueError("metric dimension must be twice the complex dimension")
        jm = self.j_map.matrix
        if np.iscomplexobj(jm):
            raise ValueError("the complex structure must be a real matrix")
        g = self.metric.gram
        if rel_residual(jm @ jm, -np.eye(2 * self.n)) > FRAME_TOL:
            raise ValueError("matrix does not square to minus the identity")
        if rel_residual(jm.T @ g @ jm, g) > FRAME_TOL:
            raise ValueError("complex structure is not an isometry of the metric")
        omega = KForm(2 * self.n, 2, np.array(
            [(jm.T @ g)[i, j] for i, j in multi_indices(2 * self.n, 2)]
        ))
        top = _wedge_power(omega, self.n)
        vol = float(factorial(self.n)) * self.metric.volume_form()
        if rel_residual(top.coeffs, vol.coeffs) > ONE_ONE_TOL:
            raise ValueError("orientation does not match the complex structure")
        self._cache["omega"] = omega

    @property
    def omega(self) -> KForm:
        """The fundamental two-form g(J., .)."""
        return self._cache["omega"]

    @property
    def frame(self) -> np.ndarray:
        """Orthonormal columns u_1, v_1, ..., u_n, v_n with v_i = J u_i."""
        if "frame" not in self._cache:
            g = self.metric.gram
            jm = self.j_map.matrix
            cols: list[np.ndarray] = []
            for cand in np.eye(2 * self.n):
                w = cand.copy()
                for q in cols:
                    w -= q * (q @ g @ w)
                norm = float(np.sqrt(w @ g @ w))
                if norm < 1e-8:
                    continue
                u = w / norm
                v = jm @ u
                for q in cols + [u]:
                    v -= q * (q @ g @ v)
                v /= float(np.sqrt(v @ g @ v))
                cols.extend([u, v])
                if len(cols) == 2 * self.n:
                    break
            mat = np.column_stack(cols)
            mat.flags.writeable = False
            self._cache["frame"] = mat
        return self._cache["frame"]

    def _holomorphic_change(self) -> tuple[np.ndarray, np.ndarray]:
        # Columns dual to the coframe (dz^1..dz^n, dzbar^1..dzbar^n).
        if "holo" not in self._cache:
            q = self.frame
            u, v = q[:, 0::2], q[:, 1::2]
            t = np.hstack([(u - 1j * v) / 2.0, (u + 1j * v) / 2.0])
            self._cache["holo"] = (t, np.linalg.inv(t))
        return self._cache["holo"]


@lru_cache(maxsize=None)
def standard_kahler(n: int) -> HermitianPoint:
    """The flat structure pairing coordinates (x_1, y_1, ..., x_n, y_n)."""
    jm = np.zeros((2 * n, 2 * n))
    for j in range(n):
        jm[2 * j + 1, 2 * j] = 1.0
        jm[2 * j, 2 * j + 1] = -1.0
    return HermitianPoint(n, euclidean_metric(2 * n), LinearMap(2 * n, jm))


def one_one_residual(point: HermitianPoint, f: KForm) -> float:
    """Deviation of a two-form from J-invariance, relative to its size."""
    if (f.dim, f.grade) != (2 * point.n, 2):
        raise ValueError(f"expected a 2-form on R^{2 * point.n}")
    return rel_residual(pullback(point.j_map, f).coeffs, f.coeffs)


def pq_project(point: HermitianPoint, a: KForm, p: int, q: int) -> KForm:
    """Component of a form with p holomorphic and q antiholomorphic factors."""
    if a.dim != 2 * point.n:
        raise ValueError(f"expected a form on R^{2 * point.n}")
    if p < 0 or q < 0 or p + q != a.grade:
        raise ValueError(f"type ({p},{q}) does not match grade {a.grade}")
    t, t_inv = point._holomorphic_change()
    pulled = pullback(LinearMap(a.dim, t), a)
    keep = np.array(
        [sum(1 for i in idx if i < point.n) == p for idx in multi_indices(a.dim, a.grade)]
    )
    masked = KForm(a.dim, a.grade, np.where(keep, pulled.coeffs, 0.0))
    return pullback(LinearMap(a.dim, t_inv), masked)


@dataclass(frozen=True)
class NormalForm:
    """A unitary frame diagonalising a (1,1) form over a Hermitian point.

    The frame columns are ordered u_1, v_1, ..., u_n, v_n; the form equals
    sum_i lambdas[i] u^i ^ v^i in the dual coframe, eigenvalues descending.
    """

    point: HermitianPoint
    lambdas: np.ndarray
    frame: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        lam = np.asarray(self.lambdas, dtype=np.float64).copy()
        mat = np.asarray(self.frame, dtype=np.float64).copy()
        if lam.shape != (self.point.n,):
            raise ValueError(f"need {self.point.n} eigenvalues, got shape {lam.shape}")
        if mat.shape != (2 * self.point.n,) * 2:
            raise ValueError("frame must be a square matrix of the ambient dimension")
        lam.flags.writeable = False
        mat.flags.writeable = False
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "frame", mat)

    @property
    def coframe(self) -> np.ndarray:
        """Rows are the coframe covectors u^1, v^1, ..., u^n, v^n."""
        if "coframe" not in self._cache:
            w = self.frame.T @ self.point.metric.gram
            w.flags.writeable = False
            self._cache["coframe"] = w
        return self._cache["coframe"]

    def u_form(self, i: int) -> KForm:
        return KForm(2 * self.point.n, 1, self.coframe[2 * i])

    def v_form(self, i: int) -> KForm:
        return KForm(2 * self.point.n, 1, self.coframe[2 * i + 1])

    @property
    def omega_nabla(self) -> KForm:
        """The descendant two-form sum_i (1 + lambda_i^2) u^i ^ v^i."""
        if "omega_nabla" not in self._cache:
            out = KForm.zero(2 * self.point.n, 2)
            for i, lam in enumerate(self.lambdas):
                out = out + (1.0 + lam * lam) * wedge(self.u_form(i), self.v_form(i))
            self._cache["omega_nabla"] = out
        return self._cache["omega_nabla"]

    @property
    def eta(self) -> Metric:
        """The descendant inner product g(., .) + g(F# ., F# .)."""
        if "eta" not in self._cache:
            w = self.coframe
            weights = np.repeat(1.0 + np.square(self.lambdas), 2)
            self._cache["eta"] = Metric(2 * self.point.n, w.T @ (weights[:, None] * w))
        return self._cache["eta"]

    def rescaled(self) -> KForm | None:
        """Conformal multiple of omega_nabla whose (n-1) power has unit radius.

        Undefined for n = 1, where no rescaling can absorb the radius.
        """
        if self.point.n == 1:
            return None
        r, _ = radius_angle(self.lambdas)
        return r ** (-1.0 / (self.point.n - 1)) * self.omega_nabla


def normal_form(point: HermitianPoint, f: KForm | None = None,
                tol: float = ONE_ONE_TOL) -> NormalForm:
    """Diagonalise a real (1,1) form in a unitary frame, eigenvalues descending.

    With no form this returns the zero normal form over an adapted frame.
    Raises ValueError when the input is not J-invariant at the tolerance.
    """
    n = point.n
    if f is None:
        return NormalForm(point, np.zeros(n), point.frame)
    if np.iscomplexobj(f.coeffs):
        raise ValueError("normal form expects a real representative")
    if one_one_residual(point, f) > tol:
        raise ValueError("form is not of type (1,1) at this tolerance")
    q = point.frame
    a = _skew_matrix(f)
    af = q.T @ a @ q
    idx = np.arange(n)
    h = af[2 * idx[:, None], 2 * idx[None, :] + 1] + 1j * af[2 * idx[:, None], 2 * idx[None, :]]
    h = 0.5 * (h + h.conj().T)
    _, u = np.linalg.eigh(h)
    jm = point.j_map.matrix
    pairs = []
    for col in range(n):
        vec = np.zeros(2 * n)
        vec[0::2] = u[:, col].real
        vec[1::2] = u[:, col].imag
        uvec = q @ vec
        vvec = jm @ uvec
        pairs.append((float(uvec @ a @ vvec), uvec, vvec))
    pairs.sort(key=lambda item: -item[0])
    lambdas = np.array([lam for lam, _, _ in pairs])
    frame = np.column_stack([vec for _, uvec, vvec in pairs for vec in (uvec, vvec)])
    nf = NormalForm(point, lambdas, frame)
    want = KForm.zero(2 * n, 2)
    for i, lam in enumerate(lambdas):
        want = want + lam * wedge(nf.u_form(i), nf.v_form(i))
    if rel_residual(want.coeffs, f.coeffs) > tol:
        raise ValueError("normal form reconstruction failed at this tolerance")
    return nf


def radius_angle(lambdas: np.ndarray) -> tuple[float, float]:
    """Polar form of prod (1 + i lambda_i); the angle is left unreduced."""
    lam = np.asarray(lambdas, dtype=np.float64)
    r = float(np.prod(np.sqrt(1.0 + np.square(lam))))
    theta = float(np.sum(np.arctan(lam)))
    return r, theta


@dataclass(frozen=True)
class DhymReport:
    """Certificates for one curvature representative at one point."""

    r: float
    theta: float
    p02_norm: float
    im_residual: float
    vol_identity_residual: float
    im_identity_residual: float

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "theta": _wrap_angle(self.theta),
            "p02_norm": self.p02_norm,
            "im_residual": self.im_residual,
        }


def dhym_report(point: HermitianPoint, f: KForm, tol: float = ONE_ONE_TOL) -> DhymReport:
    """Certify the volume-ratio identities of a real curvature representative.

    The (0,2) component is measured and removed first, so the eigenvalue
    data always refers to the J-invariant part.  Residuals certify, in
    order: the vanishing of Im(e^{-i theta} (omega + iF)^n), the volume
    identity omega_nabla^n = r^2 omega^n, and the reproduction of
    omega_nabla^{n-1} by Im(i e^{-i theta} (omega + iF)^{n-1}).
    """
    n = point.n
    if np.iscomplexobj(f.coeffs):
        raise ValueError("curvature representative must be real")
    p02 = pq_project(point, f, 0, 2)
    p20 = pq_project(point, f, 2, 0)
    p02_norm = form_norm(p02, point.metric)
    f11 = KForm(2 * n, 2, np.real(f.coeffs - p02.coeffs - p20.coeffs))
    nf = normal_form(point, f11, tol=tol)
    r, theta = radius_angle(nf.lambdas)
    rho = KForm(2 * n, 2, point.omega.coeffs + 1j * f11.coeffs)
    rho_top = _wedge_power(rho, n)
    rotated = np.exp(-1j * theta) * rho_top.coeffs
    scale = max(float(np.linalg.norm(rotated)), ABS_FLOOR)
    im_residual = float(np.linalg.norm(np.imag(rotated))) / scale
    omega_top = _wedge_power(point.omega, n)
    vol_identity = rel_residual(
        _wedge_power(nf.omega_nabla, n).coeffs, r * r * omega_top.coeffs
    )
    rho_low = _wedge_power(rho, n - 1)
    lhs = np.imag(1j * np.exp(-1j * theta) * rho_low.coeffs)
    rhs = (1.0 / r) * _wedge_power(nf.omega_nabla, n - 1).coeffs
    im_identity = rel_residual(lhs, rhs)
    return DhymReport(r, theta, p02_norm, im_residual, vol_identity, im_identity)


def symbol_bound(point: HermitianPoint, f: KForm | NormalForm, xi: KForm,
                 tol_identity: float = ONE_ONE_TOL) -> tuple[float, float]:
    """Principal symbol of the linearised operator at a covector, with its floor.

    Returns (sigma, bound) where sigma = sum_i (xi(u_i)^2 + xi(v_i)^2)
    / (1 + lambda_i^2) and bound = |xi|^2 / (1 + max lambda_i^2), so
    ellipticity is the statement sigma >= bound.  The eigenvalue route is
    checked against the ratio n omega_nabla^{n-1} ^ xi ^ J^{-1} xi over
    omega_nabla^n before returning.
    """
    nf = f if isinstance(f, NormalForm) else normal_form(point, f)
    if (xi.dim, xi.grade) != (2 * point.n, 1):
        raise ValueError(f"expected a 1-form on R^{2 * point.n}")
    n = point.n
    weights = 1.0 + np.square(nf.lambdas)
    comps = nf.frame.T @ xi.coeffs
    sigma = float(np.sum((comps[0::2] ** 2 + comps[1::2] ** 2) / weights))
    j_xi = pullback(LinearMap(2 * n, -point.j_map.matrix), xi)
    numer = float(n) * wedge(_wedge_power(nf.omega_nabla, n - 1), wedge(xi, j_xi))
    denom = _wedge_power(nf.omega_nabla, n)
    sigma_wedge = float(numer.coeffs[0] / denom.coeffs[0])
    if rel_residual(np.array([sigma]), np.array([sigma_wedge])) > tol_identity:
        raise ValueError("symbol routes disagree beyond tolerance")
    norm_sq = float(xi.coeffs @ point.metric.gram_inv @ xi.coeffs)
    return sigma, norm_sq / float(weights.max())


def j_duality_residual(point: HermitianPoint, alpha: KForm) -> float:
    """Residual of omega^{n-1} ^ alpha = (n-1)! star(J* alpha) for 1-forms."""
    if (alpha.dim, alpha.grade) != (2 * point.n, 1):
        raise ValueError(f"expected a 1-form on R^{2 * point.n}")
    lhs = wedge(_wedge_power(point.omega, point.n - 1), alpha)
    rhs = float(factorial(point.n - 1)) * hodge(
        pullback(point.j_map, alpha), point.metric
    )
    return rel_residual(lhs.coeffs, rhs.coeffs)


def random_unitary_rotation(rng: np.random.Generator, point: HermitianPoint,
                            magnitude: float = 0.6, tol: float = 1e-9,
                            attempts: int = 5) -> LinearMap:
    """A random isometry commuting with J, drawn from the exponential chart."""
    n = point.n
    q = point.frame
    q_inv = q.T @ point.metric.gram
    for _ in range(attempts):
        x = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        x = magnitude * 0.5 * (x - x.conj().T)
        real = np.zeros((2 * n, 2 * n))
        real[0::2, 0::2] = x.real
        real[0::2, 1::2] = -x.imag
        real[1::2, 0::2] = x.imag
        real[1::2, 1::2] = x.real
        rot = LinearMap(2 * n, q @ scipy.linalg.expm(real) @ q_inv)
        if rel_residual(pullback(rot, point.omega).coeffs, point.omega.coeffs) < tol:
            return rot
    raise ValueError("could not draw a unitary rotation")
