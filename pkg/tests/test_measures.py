import numpy as np
import pytest

from isowidth import (
    DiscreteSphericalMeasure,
    NotCentered,
    NotIsotropic,
    Subspace,
    canonical_measure,
    isotropy_check,
    lift_measure,
    project_measure,
    random_even_isotropic,
    random_subspace,
    simplex_vertices,
)

from conftest import random_rotation

SQ2 = np.sqrt(2.0)


class TestIsotropyCheck:
    def test_cross2(self, cross2):
        rep = isotropy_check(cross2)
        assert rep.frobenius_defect == 0.0
        assert rep.centroid_norm == 0.0
        assert rep.mass == 2.0

    def test_single_atom(self):
        m = DiscreteSphericalMeasure(2, [[1.0, 0.0]], [2.0])
        rep = isotropy_check(m)
        assert rep.frobenius_defect == pytest.approx(SQ2, abs=1e-15)
        assert rep.mass == 2.0

    def test_simplex_triple(self, simplex2):
        rep = isotropy_check(simplex2)
        assert rep.frobenius_defect <= 1e-12
        assert rep.centroid_norm <= 1e-12
        assert rep.mass == pytest.approx(2.0, abs=1e-14)

    def test_trace_bound(self):
        # any measure passing at tol has |mass - n| <= n * tol
        for seed in range(6):
            m = random_even_isotropic(5, 3, seed)
            rep = isotropy_check(m)
            tol = max(rep.frobenius_defect, 1e-15)
            assert abs(rep.mass - 3.0) <= 3.0 * tol + 1e-12


class TestCanonical:
    def test_cross3(self, cross3):
        assert cross3.num_atoms == 6
        assert cross3.mass == 3.0
        assert cross3.even

    def test_simplex1_is_pm_one(self):
        m = canonical_measure("simplex", 1)
        assert sorted(m.units.ravel()) == [-1.0, 1.0]
        np.testing.assert_allclose(m.weights, 0.5)

    def test_simplex2_geometry(self, simplex2):
        gram = simplex2.units @ simplex2.units.T
        off = gram[~np.eye(3, dtype=bool)]
        np.testing.assert_allclose(off, -0.5, atol=1e-15)
        np.testing.assert_allclose(simplex2.weights, 2.0 / 3.0)

    def test_first_vertex_on_last_axis(self):
        for n in (2, 3, 4, 7):
            v = simplex_vertices(n)
            assert v[0, -1] == 1.0
            assert np.abs(v[0, :-1]).max() == 0.0

    @pytest.mark.parametrize("kind", ["cross", "simplex"])
    @pytest.mark.parametrize("n", [1, 2, 3, 5, 8])
    def test_isotropic_to_machine_precision(self, kind, n):
        rep = isotropy_check(canonical_measure(kind, n))
        assert rep.frobenius_defect <= 1e-12
        assert rep.centroid_norm <= 1e-12

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            canonical_measure("octahedron", 3)


class TestRandomEvenIsotropic:
    def test_contract(self):
        m = random_even_isotropic(4, 2, 7)
        assert m.num_atoms == 8
        assert m.even
        rep = isotropy_check(m)
        assert rep.frobenius_defect <= 1e-9
        assert rep.mass == pytest.approx(2.0, abs=1e-10)

    def test_deterministic(self):
        a = random_even_isotropic(4, 2, 7)
        b = random_even_isotropic(4, 2, 7)
        assert np.array_equal(a.units, b.units)
        assert np.array_equal(a.weights, b.weights)

    def test_minimal_pairs_give_orthobasis(self):
        # m = n forces an orthogonal frame with pair weights 1/2 at the fixed point
        for n, seed in [(2, 0), (3, 5), (4, 9)]:
            m = random_even_isotropic(n, n, seed)
            pos = m.units[:n]
            gram = pos @ pos.T
            assert np.abs(gram - np.eye(n)).max() <= 1e-8
            np.testing.assert_allclose(m.weights, 0.5, atol=1e-8)

    def test_too_few_pairs(self):
        with pytest.raises(ValueError):
            random_even_isotropic(2, 3, 0)


class TestProjectMeasure:
    def test_cross3_coordinate_plane(self, cross3):
        out = project_measure(cross3, Subspace(3, np.eye(3)[:2]))
        assert out.num_atoms == 4  # +-e3 dropped
        assert out.mass == pytest.approx(2.0, abs=1e-12)
        assert isotropy_check(out).frobenius_defect <= 1e-12

    def test_cross2_diagonal_merges(self, cross2):
        out = project_measure(cross2, Subspace(2, [[1 / SQ2, 1 / SQ2]]))
        assert out.num_atoms == 2
        np.testing.assert_allclose(np.sort(out.units.ravel()), [-1.0, 1.0])
        np.testing.assert_allclose(out.weights, 0.5, atol=1e-15)
        assert out.mass == pytest.approx(1.0, abs=1e-12)

    def test_simplex_axis(self, simplex2):
        # the apex projects to zero and is dropped; mass k and defect 0 remain
        out = project_measure(simplex2, Subspace(2, [[1.0, 0.0]]))
        assert out.mass == pytest.approx(1.0, abs=1e-12)
        assert isotropy_check(out).frobenius_defect <= 1e-12

    @pytest.mark.parametrize("seed", range(8))
    def test_projected_mass_is_k(self, seed):
        n = 3 + seed % 3
        m = random_even_isotropic(n + 1, n, seed)
        k = 1 + seed % (n - 1)
        out = project_measure(m, random_subspace(n, k, seed + 100))
        assert abs(out.mass - k) <= 1e-8
        assert isotropy_check(out).frobenius_defect <= 1e-8
        assert out.even

    def test_requires_isotropy(self):
        skew = DiscreteSphericalMeasure(2, [[1.0, 0.0], [0.0, 1.0]], [2.0, 1.0])
        with pytest.raises(NotIsotropic):
            project_measure(skew, Subspace(2, [[1.0, 0.0]]))

    def test_orthogonal_equivariance(self):
        m = random_even_isotropic(5, 3, 4)
        H = random_subspace(3, 2, 8)
        q = random_rotation(3, 15)
        rotated = DiscreteSphericalMeasure(3, m.units @ q.T, m.weights, even=True)
        H_rot = Subspace(3, H.basis @ q.T)
        a = project_measure(m, H)
        b = project_measure(rotated, H_rot)
        # same frame coordinates on both sides, up to float noise
        np.testing.assert_allclose(a.units, b.units, atol=1e-12)
        np.testing.assert_allclose(a.weights, b.weights, atol=1e-12)


class TestLiftMeasure:
    def test_hand_instance(self, cross2):
        out = lift_measure(cross2, Subspace(2, [[1.0, 0.0]]))
        s = np.sqrt(2.0 / 3.0)
        expected = {
            (-s, 1 / np.sqrt(3)): 0.75,
            (s, 1 / np.sqrt(3)): 0.75,
            (0.0, 1.0): 0.5,
        }
        assert out.units.shape == (3, 2)
        for u, w in zip(out.units, out.weights):
            key = min(expected, key=lambda e: np.hypot(e[0] - u[0], e[1] - u[1]))
            assert np.linalg.norm(np.array(key) - u) <= 1e-12
            assert w == pytest.approx(expected[key], abs=1e-12)

    def test_lifted_isotropy_and_mass(self):
        for seed in range(6):
            n = 2 + seed % 4
            m = random_even_isotropic(n + 2, n, seed)
            k = 1 + seed % n
            H = Subspace.full(n) if k == n else random_subspace(n, k, seed + 31)
            out = lift_measure(m, H)
            assert abs(out.mass - (k + 1)) <= 1e-10
            assert np.abs(out.moment_matrix() - np.eye(k + 1)).max() <= 1e-8
            assert out.axis_moment_residual() <= 1e-8
            assert (out.units[:, -1] > 0).all()

    def test_requires_centered(self):
        # isotropic but not centered: two orthogonal atoms of weight 1
        m = DiscreteSphericalMeasure(2, [[1.0, 0.0], [0.0, 1.0]], [1.0, 1.0])
        assert isotropy_check(m).frobenius_defect == 0.0
        with pytest.raises(NotCentered):
            lift_measure(m, Subspace(2, [[1.0, 0.0]]))


class TestValidation:
    def test_even_claim_checked(self):
        with pytest.raises(ValueError):
            DiscreteSphericalMeasure(2, [[1.0, 0.0], [0.0, 1.0]], [1.0, 1.0], even=True)

    def test_unit_norm_checked(self):
        with pytest.raises(ValueError):
            DiscreteSphericalMeasure(2, [[0.5, 0.0]], [1.0])

    def test_positive_weights(self):
        with pytest.raises(ValueError):
            DiscreteSphericalMeasure(2, [[1.0, 0.0]], [0.0])
