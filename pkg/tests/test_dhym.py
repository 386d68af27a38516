"""Unit tests for the Hermitian normal-form module."""

from math import comb

import numpy as np
import pytest

from g2calc.forms import (
    KForm,
    LinearMap,
    Metric,
    form_norm,
    pullback,
    rel_residual,
    sharp2,
    wedge,
)
from g2calc.dhym import (
    DhymReport,
    HermitianPoint,
    dhym_report,
    j_duality_residual,
    normal_form,
    one_one_residual,
    pq_project,
    radius_angle,
    random_unitary_rotation,
    standard_kahler,
    symbol_bound,
)


def wedge_power(a, k):
    if k == 0:
        return KForm(a.dim, 0, np.ones(1))
    out = a
    for _ in range(k - 1):
        out = wedge(out, a)
    return out


def one_one_part(point, f):
    p02 = pq_project(point, f, 0, 2)
    p20 = pq_project(point, f, 2, 0)
    return KForm(f.dim, 2, np.real(f.coeffs - p02.coeffs - p20.coeffs))


def random_one_one(rng, point):
    raw = KForm(2 * point.n, 2, rng.standard_normal(comb(2 * point.n, 2)))
    return one_one_part(point, raw)


@pytest.fixture(scope="module")
def transported_point():
    rng = np.random.default_rng(90)
    s = np.eye(6) + 0.2 * rng.standard_normal((6, 6))
    std = standard_kahler(3)
    metric = Metric(6, s.T @ s)
    j = LinearMap(6, np.linalg.solve(s, std.j_map.matrix @ s))
    return s, HermitianPoint(3, metric, j)


class TestStandardStructure:
    def test_omega_pairs_coordinates(self):
        point = standard_kahler(2)
        assert point.omega.coefficient((0, 1)) == 1.0
        assert point.omega.coefficient((2, 3)) == 1.0
        assert np.count_nonzero(point.omega.coeffs) == 2

    def test_flat_frame_is_identity(self):
        assert np.array_equal(standard_kahler(3).frame, np.eye(6))

    def test_omega_is_j_invariant(self):
        point = standard_kahler(3)
        assert one_one_residual(point, point.omega) == 0.0

    def test_top_power_is_volume(self):
        point = standard_kahler(4)
        top = wedge_power(point.omega, 4)
        assert top.coeffs[-1] == pytest.approx(24.0)

    def test_incompatible_structure_rejected(self):
        j = np.zeros((4, 4))
        j[1, 0] = j[3, 2] = 1.0
        j[0, 1] = j[2, 3] = -1.0
        with pytest.raises(ValueError, match="isometry"):
            HermitianPoint(2, Metric(4, np.diag([1.0, 2.0, 1.0, 1.0])), LinearMap(4, j))

    def test_non_square_root_rejected(self):
        with pytest.raises(ValueError, match="square"):
            HermitianPoint(2, Metric(4, np.eye(4)), LinearMap.identity(4))


class TestTypeDecomposition:
    def test_parts_sum_to_whole(self):
        rng = np.random.default_rng(91)
        point = standard_kahler(3)
        f = KForm(6, 2, rng.standard_normal(15))
        total = KForm.zero(6, 2)
        for p in range(3):
            total = total + KForm(6, 2, pq_project(point, f, p, 2 - p).coeffs)
        assert rel_residual(total.coeffs, f.coeffs) < 1e-12

    def test_real_two_zero_plus_zero_two(self):
        point = standard_kahler(2)
        f = KForm.monomial(4, (0, 2)) - KForm.monomial(4, (1, 3))
        assert form_norm(pq_project(point, f, 1, 1)) < 1e-14
        assert form_norm(pq_project(point, f, 0, 2)) == pytest.approx(1.0, rel=1e-12)
        assert form_norm(pq_project(point, f, 2, 0)) == pytest.approx(1.0, rel=1e-12)

    def test_conjugate_symmetry_for_real_forms(self):
        rng = np.random.default_rng(92)
        point = standard_kahler(3)
        f = KForm(6, 2, rng.standard_normal(15))
        p02 = pq_project(point, f, 0, 2)
        p20 = pq_project(point, f, 2, 0)
        assert rel_residual(p20.coeffs, p02.coeffs.conj()) < 1e-12

    def test_projection_is_idempotent(self):
        rng = np.random.default_rng(93)
        point = standard_kahler(2)
        f = KForm(4, 2, rng.standard_normal(6))
        once = pq_project(point, f, 1, 1)
        twice = pq_project(point, once, 1, 1)
        assert rel_residual(once.coeffs, twice.coeffs) < 1e-12

    def test_three_forms_split(self):
        point = standard_kahler(3)
        f = KForm.monomial(6, (0, 2, 4))
        parts = [pq_project(point, f, p, 3 - p) for p in range(4)]
        total = KForm.zero(6, 3)
        for part in parts:
            total = total + KForm(6, 3, part.coeffs)
        assert rel_residual(total.coeffs, f.coeffs) < 1e-12

    def test_type_must_match_grade(self):
        point = standard_kahler(2)
        with pytest.raises(ValueError):
            pq_project(point, point.omega, 2, 1)


class TestNormalForm:
    def test_diagonal_golden(self):
        point = standard_kahler(2)
        f = KForm.monomial(4, (0, 1), 2.0) - KForm.monomial(4, (2, 3))
        nf = normal_form(point, f)
        assert np.allclose(nf.lambdas, [2.0, -1.0], atol=1e-12)

    def test_mixed_golden(self):
        point = standard_kahler(2)
        f = KForm.monomial(4, (0, 2)) + KForm.monomial(4, (1, 3))
        nf = normal_form(point, f)
        assert np.allclose(nf.lambdas, [1.0, -1.0], atol=1e-12)

    def test_frame_is_orthonormal_and_adapted(self):
        rng = np.random.default_rng(94)
        point = standard_kahler(3)
        nf = normal_form(point, random_one_one(rng, point))
        assert rel_residual(nf.frame.T @ nf.frame, np.eye(6)) < 1e-12
        jm = point.j_map.matrix
        for i in range(3):
            assert np.allclose(jm @ nf.frame[:, 2 * i], nf.frame[:, 2 * i + 1], atol=1e-12)

    def test_reconstruction(self):
        rng = np.random.default_rng(95)
        point = standard_kahler(3)
        for _ in range(25):
            f = random_one_one(rng, point)
            nf = normal_form(point, f)
            rebuilt = KForm.zero(6, 2)
            for i, lam in enumerate(nf.lambdas):
                rebuilt = rebuilt + lam * wedge(nf.u_form(i), nf.v_form(i))
            assert rel_residual(rebuilt.coeffs, f.coeffs) < 1e-12

    def test_degenerate_eigenvalues(self):
        point = standard_kahler(2)
        nf = normal_form(point, KForm(4, 2, point.omega.coeffs))
        assert np.allclose(nf.lambdas, [1.0, 1.0], atol=1e-14)

    def test_none_gives_adapted_frame(self):
        point = standard_kahler(2)
        nf = normal_form(point)
        assert np.array_equal(nf.lambdas, np.zeros(2))
        assert np.array_equal(nf.frame, np.eye(4))

    def test_rejects_non_one_one(self):
        point = standard_kahler(2)
        f = KForm.monomial(4, (0, 2)) - KForm.monomial(4, (1, 3))
        with pytest.raises(ValueError, match=r"\(1,1\)"):
            normal_form(point, f)

    def test_multiset_invariant_under_unitary_rotation(self):
        rng = np.random.default_rng(96)
        point = standard_kahler(3)
        f = random_one_one(rng, point)
        base = np.sort(normal_form(point, f).lambdas)
        for _ in range(5):
            rot = random_unitary_rotation(rng, point)
            rotated = np.sort(normal_form(point, pullback(rot, f)).lambdas)
            assert np.allclose(rotated, base, atol=1e-10)

    def test_eta_metric_dual_route(self):
        rng = np.random.default_rng(97)
        point = standard_kahler(3)
        for _ in range(20):
            f = random_one_one(rng, point)
            nf = normal_form(point, f)
            m = sharp2(f, point.metric).matrix
            assert rel_residual(nf.eta.gram, np.eye(6) + m.T @ m) < 1e-12

    def test_eta_golden_for_omega(self):
        point = standard_kahler(2)
        nf = normal_form(point, KForm(4, 2, point.omega.coeffs))
        assert rel_residual(nf.eta.gram, 2.0 * np.eye(4)) < 1e-14
        assert rel_residual(nf.omega_nabla.coeffs, 2.0 * point.omega.coeffs) < 1e-14


class TestRadiusAngle:
    def test_unit_pair(self):
        r, theta = radius_angle([1.0, 1.0])
        assert r == pytest.approx(2.0, rel=1e-12)
        assert theta == pytest.approx(np.pi / 2, rel=1e-12)

    def test_unit_triple(self):
        r, theta = radius_angle([1.0, 1.0, 1.0])
        assert r == pytest.approx(2.0 * np.sqrt(2.0), rel=1e-12)
        assert theta == pytest.approx(3.0 * np.pi / 4, rel=1e-12)

    def test_angle_is_unreduced(self):
        _, theta = radius_angle([10.0, 10.0, 10.0, 10.0])
        assert theta > np.pi

    def test_opposite_weights_cancel(self):
        r, theta = radius_angle([2.5, -2.5])
        assert theta == 0.0
        assert r == pytest.approx(1.0 + 2.5**2, rel=1e-12)


class TestReport:
    def test_golden_omega(self):
        point = standard_kahler(2)
        rep = dhym_report(point, KForm(4, 2, point.omega.coeffs))
        assert rep.r == pytest.approx(2.0, rel=1e-12)
        assert rep.theta == pytest.approx(np.pi / 2, rel=1e-12)
        assert rep.p02_norm < 1e-14
        assert rep.im_residual < 1e-12
        assert rep.vol_identity_residual < 1e-12
        assert rep.im_identity_residual < 1e-12

    def test_serialised_fields(self):
        point = standard_kahler(2)
        payload = dhym_report(point, KForm.zero(4, 2)).to_dict()
        assert set(payload) == {"r", "theta", "p02_norm", "im_residual"}
        assert payload["r"] == 1.0
        assert payload["theta"] == 0.0

    def test_serialised_angle_is_wrapped(self):
        point = standard_kahler(4)
        f = KForm.zero(8, 2)
        for j in range(4):
            f = f + KForm.monomial(8, (2 * j, 2 * j + 1), 10.0)
        rep = dhym_report(point, f)
        assert rep.theta > np.pi
        wrapped = rep.to_dict()["theta"]
        assert -np.pi <= wrapped < np.pi
        assert wrapped == pytest.approx(rep.theta - 2.0 * np.pi, rel=1e-12)

    def test_identities_hold_for_random_input(self):
        rng = np.random.default_rng(98)
        for n in (1, 2, 3, 4):
            point = standard_kahler(n)
            for _ in range(15):
                f = KForm(2 * n, 2, rng.standard_normal(comb(2 * n, 2)))
                rep = dhym_report(point, f)
                assert rep.im_residual < 1e-12
                assert rep.vol_identity_residual < 1e-12
                assert rep.im_identity_residual < 1e-12
                assert rep.r >= 1.0

    def test_line_case_reduces_to_cosine(self):
        point = standard_kahler(1)
        rep = dhym_report(point, KForm.monomial(2, (0, 1), 3.0))
        assert rep.r == pytest.approx(np.sqrt(10.0), rel=1e-12)
        assert rep.theta == pytest.approx(np.arctan(3.0), rel=1e-12)
        assert rep.im_identity_residual < 1e-12

    def test_p02_norm_reported(self):
        point = standard_kahler(2)
        f = KForm.monomial(4, (0, 2)) - KForm.monomial(4, (1, 3))
        rep = dhym_report(point, f)
        assert rep.p02_norm == pytest.approx(1.0, rel=1e-12)
        assert rep.r == pytest.approx(1.0, rel=1e-12)

    def test_rejects_complex_input(self):
        point = standard_kahler(2)
        with pytest.raises(ValueError, match="real"):
            dhym_report(point, KForm(4, 2, np.zeros(6, dtype=complex)))


class TestRescaled:
    def test_power_identity(self):
        rng = np.random.default_rng(99)
        for n in (2, 3, 4):
            point = standard_kahler(n)
            f = random_one_one(rng, point)
            nf = normal_form(point, f)
            r, _ = radius_angle(nf.lambdas)
            tilde = nf.rescaled()
            lhs = wedge_power(tilde, n - 1)
            rhs = (1.0 / r) * wedge_power(nf.omega_nabla, n - 1)
            assert rel_residual(lhs.coeffs, rhs.coeffs) < 1e-12

    def test_line_case_has_no_rescaling(self):
        point = standard_kahler(1)
        assert normal_form(point, KForm.monomial(2, (0, 1))).rescaled() is None


class TestSymbol:
    def test_line_golden(self):
        point = standard_kahler(1)
        sigma, bound = symbol_bound(
            point, KForm.monomial(2, (0, 1), 2.0), KForm.monomial(2, (0,))
        )
        assert sigma == pytest.approx(0.2, rel=1e-12)
        assert bound == pytest.approx(0.2, rel=1e-12)

    def test_flat_symbol_is_norm(self):
        point = standard_kahler(2)
        xi = KForm(4, 1, np.array([1.0, 2.0, 0.0, -1.0]))
        sigma, bound = symbol_bound(point, KForm.zero(4, 2), xi)
        assert sigma == pytest.approx(6.0, rel=1e-12)
        assert bound == pytest.approx(6.0, rel=1e-12)

    def test_ellipticity_bound(self):
        rng = np.random.default_rng(100)
        for n in (2, 3):
            point = standard_kahler(n)
            for _ in range(40):
                f = random_one_one(rng, point)
                xi = KForm(2 * n, 1, rng.standard_normal(2 * n))
                sigma, bound = symbol_bound(point, f, xi)
                assert sigma >= bound - 1e-12
                assert sigma > 0.0

    def test_accepts_prepared_normal_form(self):
        rng = np.random.default_rng(101)
        point = standard_kahler(3)
        nf = normal_form(point, random_one_one(rng, point))
        xi = KForm(6, 1, rng.standard_normal(6))
        direct = symbol_bound(point, nf, xi)
        assert direct[0] > 0.0


class TestJduality:
    def test_plane_golden(self):
        point = standard_kahler(2)
        assert j_duality_residual(point, KForm.monomial(4, (0,))) == 0.0

    def test_all_dimensions(self):
        rng = np.random.default_rng(102)
        for n in (1, 2, 3, 4):
            point = standard_kahler(n)
            for _ in range(15):
                alpha = KForm(2 * n, 1, rng.standard_normal(2 * n))
                assert j_duality_residual(point, alpha) < 1e-13


class TestTransportedPoint:
    def test_frame_orthonormal(self, transported_point):
        _, point = transported_point
        q = point.frame
        assert rel_residual(q.T @ point.metric.gram @ q, np.eye(6)) < 1e-12

    def test_eigenvalues_transport(self, transported_point):
        s, point = transported_point
        rng = np.random.default_rng(103)
        std = standard_kahler(3)
        f = random_one_one(rng, std)
        moved = pullback(LinearMap(6, s), f)
        assert rel_residual(
            np.sort(normal_form(point, moved).lambdas),
            np.sort(normal_form(std, f).lambdas),
        ) < 1e-10

    def test_report_identities(self, transported_point):
        _, point = transported_point
        rng = np.random.default_rng(104)
        f = KForm(6, 2, rng.standard_normal(15))
        rep = dhym_report(point, f)
        assert rep.im_residual < 1e-12
        assert rep.vol_identity_residual < 1e-12
        assert rep.im_identity_residual < 1e-12

    def test_j_duality(self, transported_point):
        _, point = transported_point
        rng = np.random.default_rng(105)
        alpha = KForm(6, 1, rng.standard_normal(6))
        assert j_duality_residual(point, alpha) < 1e-12
