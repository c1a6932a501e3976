import numpy as np
import pytest

from becflow.initial import (
    Profile,
    RegularizationError,
    concentration_family,
    field_from_profile,
    regularize_initial_data,
    standard_bump,
)
from becflow.mesh import build_grid, weighted_integral

# int_{-1}^{1} exp(1 - 1/(1-s^2)) ds, frozen from an independent scipy.integrate.quad run
BUMP_SHAPE_INTEGRAL = 1.2069003224378743


class TestStandardBump:
    def test_peak_value_at_center(self):
        assert standard_bump(0.5, 0.5, 0.2, 3.0) == 3.0

    def test_vanishes_at_support_edges(self):
        assert standard_bump(0.3, 0.5, 0.2, 3.0) == 0.0
        assert standard_bump(0.7, 0.5, 0.2, 3.0) == 0.0
        assert standard_bump(0.9, 0.5, 0.2, 3.0) == 0.0

    def test_integral_against_frozen_quadrature(self):
        grid = build_grid(2048, 1.0, 1.0)
        vals = standard_bump(grid.centers, 0.5, 0.2, 1.5)
        integral = weighted_integral(vals, grid)
        assert integral == pytest.approx(1.5 * 0.2 * BUMP_SHAPE_INTEGRAL, rel=1e-6)
        assert integral > 0.4 * 1.5 * 0.2

    def test_rejects_support_touching_boundary(self):
        with pytest.raises(ValueError):
            standard_bump(0.1, 0.1, 0.2, 1.0)  # touches x = 0
        with pytest.raises(ValueError):
            standard_bump(0.9, 0.9, 0.2, 1.0, domain_length=1.0)  # touches x = L

    def test_nonnegative_everywhere(self):
        x = np.linspace(0.0, 1.0, 501)
        assert np.all(standard_bump(x, 0.4, 0.15, 2.0) >= 0.0)


class TestConcentrationFamily:
    @pytest.fixture()
    def phi(self):
        return Profile(kind="bump", center=0.5, width=0.25, height=1.0)

    def test_k_one_is_plain_superposition(self, grid256, physical, phi):
        u = concentration_family(grid256, 0.3, 1, 1.3, phi, physical)
        expected = 0.3 + standard_bump(grid256.centers, 0.5, 0.25, 1.0)
        np.testing.assert_array_equal(u.values, expected)

    def test_theta_window_enforced(self, grid256, physical, phi):
        # admissible window is (beta+1-kappa, beta+1) = (1.1, 1.5)
        for theta in (1.05, 1.5, 1.7):
            with pytest.raises(ValueError):
                concentration_family(grid256, 0.3, 4, theta, phi, physical)
        concentration_family(grid256, 0.3, 4, 1.3, phi, physical)

    def test_default_theta_is_window_midpoint(self, grid256, physical, phi):
        u_default = concentration_family(grid256, 0.3, 4, None, phi, physical)
        u_mid = concentration_family(grid256, 0.3, 4, 1.3, phi, physical)
        np.testing.assert_array_equal(u_default.values, u_mid.values)

    def test_added_moment_scale_identity(self, physical, phi):
        # int x^w k^theta phi(kx) dx = k^(theta-w-1) int y^w phi(y) dy
        grid = build_grid(512, 2.0, 1.0)
        theta = 1.3
        base = np.full(grid.n_cells, 0.5)
        ref_grid = build_grid(4096, 1.0, 1.0)
        for w in (physical.beta, physical.beta - physical.kappa):
            ref = weighted_integral(
                standard_bump(ref_grid.centers, 0.5, 0.25, 1.0), ref_grid, w
            )
            for k in (2, 8):
                uk = concentration_family(grid, 0.5, k, theta, phi, physical)
                added = weighted_integral(uk.values - base, grid, w)
                assert added == pytest.approx(k ** (theta - w - 1.0) * ref, rel=1e-4)

    def test_moment_diverges_and_mass_converges(self, physical, phi):
        grid = build_grid(512, 2.0, 1.0)
        ks = [2, 4, 8, 16, 32]
        base = np.full(grid.n_cells, 0.5)
        moments, masses = [], []
        for k in ks:
            uk = concentration_family(grid, 0.5, k, 1.3, phi, physical)
            moments.append(weighted_integral(uk, grid, physical.beta - physical.kappa))
            masses.append(weighted_integral(uk, grid, physical.beta))
        base_mass = weighted_integral(base, grid, physical.beta)
        assert np.all(np.diff(moments) > 0.0)
        # perturbation mass decays like k^(theta-beta-1) = k^(-0.2)
        gaps = np.array(masses) - base_mass
        assert np.all(np.diff(gaps) < 0.0)

    def test_log_integral_monotone_special_case(self, physical, phi):
        # with u0 >= 1 everywhere, ln_+(1/u) vanishes identically, so the
        # log-integral is (trivially) nonincreasing in k; for u0 < 1 it only
        # converges to the base value, which is the actual limit statement
        grid = build_grid(512, 2.0, 1.0)
        ds = []
        for k in (1, 2, 4, 8, 16):
            uk = concentration_family(grid, 1.0, k, 1.3, phi, physical)
            ds.append(weighted_integral(
                np.maximum(0.0, -np.log(uk.values)), grid, physical.beta
            ))
        assert all(d == 0.0 for d in ds)

        base = np.full(grid.n_cells, 0.5)
        d_base = weighted_integral(np.maximum(0.0, -np.log(base)), grid, physical.beta)
        gaps = []
        for k in (4, 16, 64):
            uk = concentration_family(grid, 0.5, k, 1.3, phi, physical)
            dk = weighted_integral(np.maximum(0.0, -np.log(uk.values)), grid, physical.beta)
            gaps.append(abs(dk - d_base))
        assert gaps[0] > gaps[1] > gaps[2]

    def test_warns_when_support_underresolved(self, physical, phi):
        grid = build_grid(64, 1.0, 1.0)  # uniform, coarse
        with pytest.warns(UserWarning, match="cells"):
            concentration_family(grid, 0.3, 40, 1.3, phi, physical)


class TestProfiles:
    def test_constant(self, grid256, physical):
        f = field_from_profile(Profile(kind="constant", c=0.7), grid256, physical)
        np.testing.assert_array_equal(f.values, 0.7)

    def test_bump_with_baseline(self, grid256, physical):
        prof = Profile(kind="bump", center=0.5, width=0.2, height=1.0, baseline=0.25)
        f = field_from_profile(prof, grid256, physical)
        assert f.values.min() == 0.25
        assert f.values.max() == pytest.approx(1.25, abs=1e-3)

    def test_custom_table_interpolates(self, tmp_path, grid256, physical):
        xs = np.linspace(0.0, 1.0, 11)
        table = tmp_path / "table.txt"
        np.savetxt(table, np.column_stack([xs, 1.0 + xs]))
        prof = Profile(kind="custom_table", table_path=str(table))
        f = field_from_profile(prof, grid256, physical)
        np.testing.assert_allclose(f.values, 1.0 + grid256.centers, rtol=1e-12)

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            Profile(kind="gaussian")


@pytest.fixture(scope="module")
def rough():
    # piecewise-linear profile with interior kinks, flat near both walls
    grid = build_grid(512, 2.0, 1.0)
    nodes_x = np.array([0.0, 0.15, 0.3, 0.45, 0.55, 0.7, 0.85, 1.0])
    nodes_y = np.array([0.8, 0.8, 1.6, 0.4, 1.2, 0.6, 0.9, 0.9])
    return grid, np.interp(grid.centers, nodes_x, nodes_y)


class TestRegularization:
    EPS_SEQ = np.array([1e-1, 3e-2, 1e-2, 3e-3, 1e-3])

    def test_constant_profile_gets_exact_pedestal(self, grid256):
        u = np.full(grid256.n_cells, 0.9)
        members, sched = regularize_initial_data(grid256, u, self.EPS_SEQ, gamma=0.5, beta=0.5)
        for field, delta in zip(members, sched.delta):
            assert delta > 0.0  # beta > 0 branch keeps the pedestal positive
            np.testing.assert_array_equal(field.values, u + delta)

    def test_schedule_invariants(self, rough):
        grid, u = rough
        members, sched = regularize_initial_data(grid, u, self.EPS_SEQ, gamma=0.5, beta=0.5)
        assert np.all(sched.delta >= 4.0 * sched.eta)
        m = sched.sup_bound
        floor = 2.0 * m * np.exp(-self.EPS_SEQ ** (-0.5))
        assert np.all(sched.delta >= floor - 1e-15)
        assert np.all(np.diff(sched.delta) < 0.0)

    def test_pedestal_sandwich_every_member(self, rough):
        grid, u = rough
        members, sched = regularize_initial_data(grid, u, self.EPS_SEQ, gamma=0.5, beta=0.5)
        for field, delta in zip(members, sched.delta):
            diff = field.values - u
            assert np.all(diff >= 0.5 * delta * (1.0 - 1e-9))
            assert np.all(diff <= 1.5 * delta * (1.0 + 1e-9))

    def test_sup_convergence_along_sequence(self, rough):
        grid, u = rough
        members, sched = regularize_initial_data(grid, u, self.EPS_SEQ, gamma=0.5, beta=0.5)
        sups = [np.max(np.abs(f.values - u)) for f in members]
        assert np.all(np.diff(sups) < 0.0)
        assert sups[-1] <= 1.5 * sched.delta[-1] * (1.0 + 1e-9)

    def test_weighted_gradient_energy_identity_and_tracking(self, rough):
        # by construction the member's weighted slope equals the mollified
        # gradient, so the energies agree exactly; they converge to the
        # rough profile's energy as the schedule tightens
        grid, u = rough
        members, sched = regularize_initial_data(grid, u, self.EPS_SEQ, gamma=0.5, beta=0.5)
        x = grid.centers
        mids = 0.5 * (x[:-1] + x[1:])
        gaps = np.diff(x)
        ref = float(np.dot(mids ** 0.5 * ((u[1:] - u[:-1]) / gaps) ** 2, gaps))
        rels = []
        for field, eps in zip(members, sched.eps_sequence):
            slopes = (field.values[1:] - field.values[:-1]) / gaps
            energy = float(np.dot((mids + eps) ** 0.5 * slopes ** 2, gaps))
            rels.append(abs(energy - ref) / ref)
        assert rels[-1] < 0.02

    def test_unreachable_tolerance_reports_error(self, grid256):
        # gamma = 0 and beta <= 0 force delta = 4*eta = 0, an impossible
        # L2 target for any profile with nonvanishing gradient
        u = 1.0 + grid256.centers
        with pytest.raises(RegularizationError) as err:
            regularize_initial_data(grid256, u, np.array([1e-2]), gamma=0.0, beta=0.0)
        assert err.value.achieved > err.value.required

    def test_input_validation(self, grid256):
        u = np.ones(grid256.n_cells)
        with pytest.raises(ValueError):
            regularize_initial_data(grid256, u, np.array([1e-2, 1e-2]), gamma=0.5, beta=0.5)
        with pytest.raises(ValueError):
            regularize_initial_data(grid256, u, np.array([1e-2]), gamma=1.5, beta=0.5)
        with pytest.raises(ValueError):
            regularize_initial_data(grid256, -u, np.array([1e-2]), gamma=0.5, beta=0.5)
