import numpy as np
import pytest

from kinkstab import linalg
from kinkstab.discretize import (
    GridSpec,
    PAPER_Z_GRID,
    assemble_Lminus_weighted,
    assemble_Lpm_x,
    assemble_LR_z,
    build_flux_operator,
)
from kinkstab.errors import ValidationError
from kinkstab.profiles import NonlinearityParams, build_general_profile, cubic_quintic_profile

PROF = cubic_quintic_profile()


class TestGridSpec:
    def test_paper_grid(self):
        assert PAPER_Z_GRID.h == pytest.approx(5e-4, abs=1e-18)
        assert PAPER_Z_GRID.node_count == 20001
        assert PAPER_Z_GRID.var == "z"

    def test_extent_identity(self):
        g = GridSpec(-3.0, 5.0, 1000, var="x")
        assert abs(g.h * g.n - 8.0) < 1e-12

    def test_rejects_small_or_bad(self):
        with pytest.raises(ValidationError):
            GridSpec(0.0, 1.0, 8)
        with pytest.raises(ValidationError):
            GridSpec(1.0, 0.0, 100)
        with pytest.raises(ValidationError):
            GridSpec(0.0, 1.0, 100, var="t")


class TestFluxForm:
    def test_interior_row_sums_vanish_constant_coefficient(self):
        g = GridSpec(0.0, 1.0, 64, var="x")
        op = build_flux_operator(
            g, np.full(64, 1.7), np.zeros(65), np.ones(65), bc_left="dirichlet", bc_right="dirichlet"
        )
        rows = op.diag.copy()
        rows[:-1] += op.off
        rows[1:] += op.off
        assert np.max(np.abs(rows[1:-1])) < 1e-12

    def test_interior_row_sums_ghost_fold_style(self):
        g = GridSpec(-1.0, 0.0, 32, var="z")
        op = build_flux_operator(g, np.full(32, 0.8), np.zeros(33), np.ones(33))
        rows = op.diag.copy()
        rows[:-1] += op.off
        rows[1:] += op.off
        assert np.max(np.abs(rows[1:-1])) < 1e-12

    def test_weight_positivity_enforced(self):
        g = GridSpec(0.0, 1.0, 32, var="x")
        with pytest.raises(ValidationError):
            build_flux_operator(g, np.ones(32), np.zeros(33), np.zeros(33))

    def test_symmetry_is_structural(self):
        g = GridSpec(0.0, 1.0, 32, var="x")
        op = build_flux_operator(g, np.ones(32), np.zeros(33), np.ones(33))
        assert op.off.shape[0] == op.diag.shape[0] - 1


class TestAssembleLRz:
    def test_rejects_out_of_range_transition(self):
        grid = GridSpec(-10.0, 0.0, 2000, var="z")
        with pytest.raises(ValidationError):
            assemble_LR_z(-12.0, grid)  # z_R < z_min
        with pytest.raises(ValidationError):
            assemble_LR_z(0.2, GridSpec(-10.0, -1.0, 2000, var="z"))

    def test_exactly_one_negative_eigenvalue_at_R02(self):
        op = assemble_LR_z(0.2, GridSpec(-10.0, 0.0, 2000, var="z"))
        assert linalg.sturm_count(op, 0.0) == 1

    def test_weights_finite_positive_up_to_the_endpoint(self):
        op = assemble_LR_z(0.2, GridSpec(-10.0, 0.0, 2000, var="z"))
        assert np.all(np.isfinite(op.weight))
        assert np.all(op.weight > 0.0)
        assert np.all(np.isfinite(op.diag))

    def test_junction_node_carries_branch_average(self):
        grid = GridSpec(-10.0, 0.0, 2000, var="z")
        from kinkstab.profiles import z_of_x

        op = assemble_LR_z(0.2, grid)
        z_R = float(z_of_x(0.2))
        j = int(round((z_R - grid.left) / grid.h))
        nodes = grid.nodes()
        v_eff = op.diag.copy()
        # strip the second-difference part to recover the potential samples
        a_mid = -np.expm1(2.0 * (nodes[:-1] + 0.5 * grid.h))
        v_eff[1:-1] -= (a_mid[:-1] + a_mid[1:]) / grid.h**2
        from kinkstab.profiles import PotentialSet

        pots = PotentialSet(PROF, 0.2)
        v_left = float(pots.tilde_v_R(z_R - 1e-9))
        v_right = float(pots.tilde_v_R(z_R + 1e-9))
        assert min(v_left, v_right) - 1e-6 <= v_eff[j] <= max(v_left, v_right) + 1e-6

    def test_grid_refinement_is_second_order(self):
        lams = []
        for n in (5000, 10000, 20000):
            op = assemble_LR_z(0.2, GridSpec(-10.0, 0.0, n, var="z"))
            lams.append(linalg.lowest_eigenpairs(op, 1)[0].value)
        ratio = (lams[0] - lams[1]) / (lams[1] - lams[2])
        assert 3.4 <= ratio <= 4.6

    def test_similarity_and_pencil_eigenvalues_agree(self):
        op = assemble_LR_z(-1.0, GridSpec(-10.0, 0.0, 2000, var="z"))
        pencil = [p.value for p in linalg.lowest_eigenpairs(op, 3)]
        d, e = op.similarity_entries()
        sim = linalg._bisect_all(d, e, max_iter=200)[:3]
        np.testing.assert_allclose(pencil, sim, atol=1e-10)


class TestAssembleLminusWeighted:
    def test_kernel_is_near_zero_at_paper_resolution(self):
        op = assemble_Lminus_weighted(0.2, PAPER_Z_GRID)
        pairs = linalg.lowest_eigenpairs(op, 2)
        assert abs(pairs[0].value) < 1e-4
        assert pairs[1].value >= 0.0

    def test_ground_vector_is_the_kink(self):
        op = assemble_Lminus_weighted(0.2, PAPER_Z_GRID)
        ground = linalg.lowest_eigenpairs(op, 1)[0]
        phi_z = np.exp(PAPER_Z_GRID.nodes())
        w = op.weight
        overlap = abs(float(ground.vector @ (w * phi_z))) / np.sqrt(float(phi_z @ (w * phi_z)))
        assert overlap > 0.9999

    def test_x_form_general_case(self):
        profile = build_general_profile(NonlinearityParams(2.0, 5.0))
        grid = GridSpec(-15.0, 15.0, 3000, var="x")
        op = assemble_Lminus_weighted(1.0, grid, profile=profile)
        pairs = linalg.lowest_eigenpairs(op, 2)
        # kernel element phi survives truncation to a small eigenvalue
        assert abs(pairs[0].value) < 1e-3
        phi = profile.phi(op.nodes)
        overlap = abs(float(pairs[0].vector @ (op.weight * phi))) / np.sqrt(float(phi @ (op.weight * phi)))
        assert overlap > 0.999


class TestAssembleLpm:
    def test_kernel_stencil_residuals_second_order(self):
        ratios = {"plus": [], "minus": []}
        sups = {"plus": [], "minus": []}
        for n in (1000, 2000, 4000):
            grid = GridSpec(-20.0, 20.0, n, var="x")
            x = grid.nodes()
            h = grid.h
            for which, func in (("plus", PROF.phi_prime), ("minus", PROF.phi)):
                params = PROF.params
                v = params.v_plus(PROF.phi(x)) if which == "plus" else params.v_minus(PROF.phi(x))
                f = func(x)
                resid = -(f[2:] - 2 * f[1:-1] + f[:-2]) / h**2 + v[1:-1] * f[1:-1]
                sups[which].append(np.max(np.abs(resid)))
        for which in ("plus", "minus"):
            s = sups[which]
            assert s[0] / s[1] >= 3.4
            assert s[1] / s[2] >= 3.4

    def test_unweighted_and_interior(self):
        grid = GridSpec(-20.0, 20.0, 500, var="x")
        op = assemble_Lpm_x("minus", grid=grid)
        assert np.all(op.weight == 1.0)
        assert op.size == grid.node_count - 2
        assert op.bc_left == "dirichlet" and op.bc_right == "dirichlet"

    def test_which_validation(self):
        with pytest.raises(ValidationError):
            assemble_Lpm_x("both")
