from math import exp, log, pi, sqrt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isowidth import (
    DiscreteSphericalMeasure,
    MCConfig,
    NotEven,
    NotIsotropic,
    ReferenceBody,
    Subspace,
    VPolytope,
    ball_barthe_check,
    equality_case_detect,
    gaussian_mass,
    mean_width_reference,
    moment_bound_check,
    polar_v,
    random_even_isotropic,
    random_subspace,
    section_polytope,
    simplex_vertices,
    transport_bound_check,
    verify_projection_cross,
    verify_projection_simplex,
    verify_section_cube,
)

SQ2 = sqrt(2.0)


class TestProjectionSimplex:
    def test_full_space_is_equality(self, simplex2, cfg_small):
        rep = verify_projection_simplex(simplex2, Subspace.full(2), cfg_small)
        assert rep.holds and rep.equality
        assert rep.rhs == pytest.approx(mean_width_reference(ReferenceBody("simplex", 2)))
        assert rep.lhs.within(rep.rhs)

    def test_axis_projection_strict(self, simplex2, cfg_small):
        # the apex projects into the interior: [-sqrt(3)/2, sqrt(3)/2], width sqrt(3)
        rep = verify_projection_simplex(simplex2, Subspace(2, [[1.0, 0.0]]), cfg_small)
        assert rep.holds and not rep.equality
        assert rep.lhs.within(sqrt(3.0))

    def test_height_projection_hand_value(self, simplex2, cfg_small):
        # projecting onto the apex axis gives [-1/2, 1], width 3/2
        rep = verify_projection_simplex(simplex2, Subspace(2, [[0.0, 1.0]]), cfg_small)
        assert rep.holds and not rep.equality
        assert rep.lhs.within(1.5)
        assert rep.rhs == pytest.approx(sqrt(0.5) * 2.0, abs=1e-10)

    def test_cross_input_against_simplex_bound(self, cross3, cfg_small):
        rep = verify_projection_simplex(cross3, Subspace(3, np.eye(3)[:2]), cfg_small)
        assert rep.holds and not rep.equality
        assert rep.lhs.within(4.0 * SQ2 / pi)

    def test_requires_isotropic(self, cfg_small):
        skew = DiscreteSphericalMeasure(2, [[1.0, 0.0], [0.0, 1.0]], [2.0, 1.0])
        with pytest.raises(NotIsotropic):
            verify_projection_simplex(skew, Subspace.full(2), cfg_small)


class TestProjectionCross:
    def test_diagonal_equality(self, cross2, cfg_small):
        H = Subspace(2, [[1 / SQ2, 1 / SQ2]])
        rep = verify_projection_cross(cross2, H, cfg_small)
        assert rep.holds and rep.equality
        assert rep.rhs == pytest.approx(SQ2, abs=1e-12)
        assert rep.lhs.within(SQ2)

    def test_coordinate_plane_strict(self, cross3, cfg_small):
        rep = verify_projection_cross(cross3, Subspace(3, np.eye(3)[:2]), cfg_small)
        assert rep.holds and not rep.equality

    def test_full_space_equality(self, cross2, cfg_small):
        rep = verify_projection_cross(cross2, Subspace.full(2), cfg_small)
        assert rep.holds and rep.equality

    def test_requires_even(self, simplex2, cfg_small):
        with pytest.raises(NotEven):
            verify_projection_cross(simplex2, Subspace.full(2), cfg_small)


class TestSectionCube:
    def test_coordinate_plane_strict(self, cross3, cfg_small):
        rep = verify_section_cube(cross3, Subspace(3, np.eye(3)[:2]), cfg_small)
        assert rep.holds and not rep.equality
        assert rep.lhs.within(8.0 / pi)
        assert rep.rhs == pytest.approx(sqrt(1.5) * 8.0 / pi, abs=1e-10)

    def test_full_space_equality(self, cross2, cfg_small):
        rep = verify_section_cube(cross2, Subspace.full(2), cfg_small)
        assert rep.holds and rep.equality

    def test_line_section_strict(self, cross2, cfg_small):
        # the section is [-1, 1] but the bound allows sqrt(2) * 2: strict
        rep = verify_section_cube(cross2, Subspace(2, [[1.0, 0.0]]), cfg_small)
        assert rep.holds and not rep.equality
        assert rep.lhs.within(2.0)

    def test_requires_even(self, simplex2, cfg_small):
        with pytest.raises(NotEven):
            verify_section_cube(simplex2, Subspace(2, [[1.0, 0.0]]), cfg_small)


class TestBallBarthe:
    def test_hand_instance(self, simplex2):
        res = ball_barthe_check(simplex2, np.array([4.0, 1.0, 1.0]))
        assert res.lhs == pytest.approx(3.0, abs=1e-12)
        assert res.rhs == pytest.approx(4.0 ** (2.0 / 3.0), abs=1e-12)
        assert res.holds and not res.equality

    def test_brute_force_oracle(self, simplex2):
        # independent 2x2 determinant assembled entry by entry
        f = np.array([4.0, 1.0, 1.0])
        m = np.zeros((2, 2))
        for (u, c, fi) in zip(simplex2.units, simplex2.weights, f):
            for a in range(2):
                for b in range(2):
                    m[a, b] += c * fi * u[a] * u[b]
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        res = ball_barthe_check(simplex2, f)
        assert res.lhs == pytest.approx(det, abs=1e-12)
        assert res.rhs == pytest.approx(
            exp(sum(c * log(fi) for c, fi in zip(simplex2.weights, f))), abs=1e-12
        )

    def test_paired_weights_equality(self, cross2):
        a, b = 3.0, 0.2
        res = ball_barthe_check(cross2, np.array([a, a, b, b]))
        assert res.lhs == pytest.approx(a * b, abs=1e-12)
        assert res.equality

    def test_constant_f_equality(self, cross2):
        res = ball_barthe_check(cross2, np.ones(4))
        assert res.equality and res.holds

    def test_random_instances_hold(self):
        rng = np.random.default_rng(0)
        for trial in range(100):
            k = 2 + trial % 3
            nu = random_even_isotropic(k + 1 + trial % 3, k, trial)
            f = np.exp(rng.normal(size=nu.num_atoms))
            res = ball_barthe_check(nu, f)
            assert res.holds
            assert not res.equality  # generic f is not constant on atom tuples

    def test_requires_isotropic(self):
        skew = DiscreteSphericalMeasure(2, [[1.0, 0.0], [0.0, 1.0]], [2.0, 1.0])
        with pytest.raises(NotIsotropic):
            ball_barthe_check(skew, np.ones(2))

    def test_positive_f_required(self, cross2):
        with pytest.raises(ValueError):
            ball_barthe_check(cross2, np.array([1.0, 1.0, 0.0, 1.0]))


class TestMomentBound:
    @settings(max_examples=40, deadline=None)
    @given(
        seed=st.integers(min_value=0, max_value=200),
        raw=st.lists(st.floats(min_value=-5.0, max_value=5.0), min_size=6, max_size=6),
    )
    def test_holds_on_random_inputs(self, seed, raw):
        nu = random_even_isotropic(3, 2, seed)
        res = moment_bound_check(nu, np.asarray(raw))
        assert res.holds

    def test_constant_on_even_gives_zero(self, cross2):
        res = moment_bound_check(cross2, np.full(4, 0.7))
        assert res.lhs == pytest.approx(0.0, abs=1e-15)
        assert res.holds

    def test_single_atom(self, simplex2):
        res = moment_bound_check(simplex2, np.array([1.0, 0.0, 0.0]))
        assert res.lhs == pytest.approx(2.0 / 3.0, abs=1e-15)
        assert res.rhs == pytest.approx(sqrt(2.0 / 3.0), abs=1e-15)
        assert res.holds

    def test_linear_functional_is_tight(self, simplex2):
        theta = np.array([0.6, 0.8])
        f = simplex2.units @ theta
        res = moment_bound_check(simplex2, f)
        assert res.lhs == pytest.approx(1.0, abs=1e-12)
        assert res.rhs == pytest.approx(1.0, abs=1e-12)


class TestTransport:
    def test_neutral_shift_closed_form(self, cross2, cfg_small):
        # at the neutral shift every atom factor is sqrt(pi/2)
        n, k = 2, 1
        rep = transport_bound_check(cross2, Subspace(2, [[1.0, 0.0]]), sqrt(3.0), cfg_small)
        assert rep.rhs == pytest.approx(
            (2.0 * pi) ** (-k / 2.0) * (pi / 2.0) ** ((k + 1) / 2.0), abs=1e-12
        )
        assert rep.holds

    @pytest.mark.parametrize("lam", [-2.0, 0.0, 2.0])
    def test_simplex_line(self, simplex2, lam, cfg_small):
        rep = transport_bound_check(simplex2, Subspace(2, [[1.0, 0.0]]), lam, cfg_small)
        assert rep.holds
        assert rep.beta <= sqrt(3.0) + 1e-8
        assert rep.rhs > 0

    def test_beta_bound_various(self, cfg_small):
        for seed in range(4):
            n = 2 + seed % 2
            mu = random_even_isotropic(n + 1, n, seed)
            H = random_subspace(n, 1 + seed % n, seed + 7)
            rep = transport_bound_check(mu, H, 0.5, cfg_small)
            assert rep.beta <= sqrt(n + 1.0) + 1e-8
            assert rep.holds

    def test_quadrature_oracle_for_line_section(self, cross2):
        # for the coordinate-line section of the cross hull's polar the mass
        # is 2 Phi(r / sqrt(2)) - 1 in closed form, so the whole left side has
        # an adaptive-quadrature oracle
        from scipy.integrate import quad
        from scipy.special import ndtr

        lam = 0.0
        n = 2
        shift = lam - sqrt(n + 1.0)
        oracle, _ = quad(
            lambda r: np.exp(-0.5 * r * r + shift * r) * (2.0 * ndtr(r / sqrt(2.0)) - 1.0),
            0.0,
            40.0,
            limit=200,
        )
        rep = transport_bound_check(
            cross2, Subspace(2, [[1.0, 0.0]]), lam, MCConfig(samples=200_000, seed=6)
        )
        assert rep.lhs.value == pytest.approx(oracle, abs=3.0 * rep.lhs.stderr + 1e-4)

    def test_matches_per_node_gaussian_mass(self, cross2):
        # the suffix-sum evaluation must equal explicit per-node mass estimates
        cfg = MCConfig(samples=4_000, seed=13)
        H = Subspace(2, [[1.0, 0.0]])
        lam, r_steps = 0.7, 60
        n = 2
        r_max = sqrt(n) * (8.0 + abs(lam))
        section = section_polytope(polar_v(VPolytope(2, cross2.units)), H)
        member = lambda x: section.contains(x, tol=0.0)
        nodes = np.linspace(0.0, r_max, r_steps)
        shift = lam - sqrt(n + 1.0)
        masses = np.array(
            [gaussian_mass(member, 1, t / sqrt(n), cfg).value for t in nodes]
        )
        weights = np.full(r_steps, nodes[1] - nodes[0])
        weights[0] = weights[-1] = weights[1] / 2.0
        manual = float(np.sum(weights * np.exp(-0.5 * nodes**2 + shift * nodes) * masses))
        rep = transport_bound_check(cross2, H, lam, cfg, r_max=r_max, r_steps=r_steps)
        assert rep.lhs.value == pytest.approx(manual, rel=1e-10)


class TestEqualityDetect:
    def test_diagonal_segment(self):
        seg = VPolytope(1, [[-1 / SQ2], [1 / SQ2]])
        assert equality_case_detect(seg, ReferenceBody("cross", 1), 1 / SQ2)

    def test_wrong_scale(self):
        body = VPolytope(2, np.vstack([np.eye(2), -np.eye(2)]))
        assert not equality_case_detect(body, ReferenceBody("cross", 2), sqrt(2.0 / 3.0))

    def test_scaled_simplex(self):
        s = sqrt(2.0 / 3.0)
        body = VPolytope(2, s * simplex_vertices(2))
        assert equality_case_detect(body, ReferenceBody("simplex", 2), s)

    def test_rotation_invariant(self):
        from conftest import random_rotation

        q = random_rotation(2, 5)
        body = VPolytope(2, (0.5 * simplex_vertices(2)) @ q.T)
        assert equality_case_detect(body, ReferenceBody("simplex", 2), 0.5)

    def test_cardinality_mismatch(self):
        body = VPolytope(2, np.vstack([np.eye(2), -np.eye(2)]))
        assert not equality_case_detect(body, ReferenceBody("simplex", 2), 1.0)


class TestMonotoneStrengthening:
    @pytest.mark.parametrize("eps", [0.05, 0.3])
    def test_dilated_hull_dominates(self, cross3, cfg_small, eps):
        # any body containing the hull projects to a wider shadow, so the
        # hull-based bound transfers to it
        from isowidth import mean_width_mc, project_polytope

        H = random_subspace(3, 2, 6)
        hull = VPolytope(3, cross3.units)
        base_cloud = project_polytope(hull, H)
        big_cloud = project_polytope(VPolytope(3, (1 + eps) * hull.vertices), H)
        base = mean_width_mc(base_cloud.support, 2, cfg_small)
        big = mean_width_mc(big_cloud.support, 2, cfg_small)
        assert big.value >= base.value - 3.0 * (base.stderr + big.stderr)
        rep = verify_projection_cross(cross3, H, cfg_small)
        assert big.value >= rep.rhs - 3.0 * big.stderr


class TestStatistics:
    def test_more_samples_shrink_stderr_and_keep_verdict(self, cross3):
        H = random_subspace(3, 2, 3)
        small = verify_projection_cross(cross3, H, MCConfig(samples=20_000, seed=5))
        big = verify_projection_cross(cross3, H, MCConfig(samples=80_000, seed=5))
        assert big.lhs.stderr < 0.7 * small.lhs.stderr
        assert small.holds == big.holds

    def test_report_margin_consistency(self, cross3, cfg_small):
        rep = verify_section_cube(cross3, Subspace(3, np.eye(3)[:2]), cfg_small)
        assert rep.margin == pytest.approx(rep.lhs.value - rep.rhs, abs=1e-15)
        assert rep.holds == (rep.margin <= 3.0 * rep.lhs.stderr)
