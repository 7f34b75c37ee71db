import math

import numpy as np
import pytest

from diraccoulomb.core import Branch, Channel, Couplings, gamma, spectrum
from diraccoulomb.errors import ImaginaryGamma, NoBoundLevel, NoRoot, NoStateInWindow
from diraccoulomb.grid import RadialGrid, sign_changes
from diraccoulomb.oracles import (
    BoundState,
    RootConfig,
    ShootingConfig,
    compare_report,
    default_fd_grid,
    dirac_shoot,
    schrodinger_fd_eigen,
    selfconsistent_energies,
    selfconsistent_energy,
)


def _sommerfeld(a, n_r, K=-1):
    g = math.sqrt(K * K - a * a)
    return (1 + a * a / (n_r + g) ** 2) ** -0.5


class TestGrid:
    def test_validation(self):
        with pytest.raises(ValueError):
            RadialGrid(0.0, 1.0)
        with pytest.raises(ValueError):
            RadialGrid(1.0, 0.5)
        with pytest.raises(ValueError):
            RadialGrid(1e-3, 1.0, 10)

    def test_refined_keeps_points(self):
        grid = RadialGrid(1e-3, 10.0, 101)
        fine = grid.refined()
        assert fine.n_points == 201 and np.allclose(fine.r[::2], grid.r, rtol=1e-14)

    def test_integrate_exponential(self):
        grid = RadialGrid(1e-8, 60.0, 4001)
        assert grid.integrate(np.exp(-grid.r)) == pytest.approx(1.0, abs=1e-6)

    def test_sign_changes(self):
        x = np.linspace(0.1, 10, 1000)
        assert sign_changes(np.sin(x)) == 3


class TestShooting:
    def test_sommerfeld_ground(self, sommerfeld):
        c, ch = sommerfeld
        states = dirac_shoot(c, ch, ShootingConfig(energy_window=(0.5, 0.9)))
        assert states[0].energy_over_m == pytest.approx(0.8660254038, abs=1e-8)

    def test_pure_vector_tower(self, sommerfeld):
        """Oracle vs the analytic Sommerfeld tower, not the closed-form module."""
        c, ch = sommerfeld
        states = dirac_shoot(c, ch, ShootingConfig(energy_window=(0.5, 0.99)))
        want = [_sommerfeld(0.5, k) for k in range(len(states))]
        assert len(states) >= 3
        assert [s.energy_over_m for s in states] == pytest.approx(want, rel=1e-8)
        assert [s.upper_nodes for s in states[:3]] == [0, 1, 2]

    def test_free_has_no_state(self):
        with pytest.raises(NoStateInWindow):
            dirac_shoot(Couplings(), Channel.from_kappa(-1))

    def test_pure_scalar_ground_only_plus(self):
        states = dirac_shoot(Couplings(a2=0.5), Channel.from_kappa(-1), ShootingConfig(energy_window=(-0.95, 0.95)))
        energies = [s.energy_over_m for s in states]
        assert any(abs(e - 0.894427191) < 1e-8 for e in energies)
        assert not any(abs(e + 0.894427191) < 1e-3 for e in energies)

    def test_positive_kappa_nodeless_state(self):
        states = dirac_shoot(Couplings(a2=0.5), Channel.from_kappa(1), ShootingConfig(energy_window=(-0.95, -0.8)))
        assert [s.energy_over_m for s in states] == pytest.approx([-0.894427191], abs=1e-8)

    def test_supercritical(self):
        with pytest.raises(ImaginaryGamma):
            dirac_shoot(Couplings(a1=1.2), Channel.from_kappa(-1))

    def test_equal_coupling_negative_energy_state_exists(self):
        """For a1 = a2 = A and ntilde^2 < A^2 the negative root is a genuine bound state."""
        A, nt = 10.0, 1.0
        expected = (nt * nt - A * A) / (nt * nt + A * A)
        states = dirac_shoot(Couplings(A, A), Channel.from_kappa(-1), ShootingConfig(energy_window=(-0.99, -0.97)))
        assert any(abs(s.energy_over_m - expected) < 1e-7 * abs(expected) for s in states)

    def test_normalization_and_sign(self, sommerfeld):
        c, ch = sommerfeld
        st = dirac_shoot(c, ch, ShootingConfig(energy_window=(0.5, 0.9)))[0]
        assert st.grid.integrate(st.g_values**2 + st.f_values**2) == pytest.approx(1.0, abs=1e-8)
        assert st.g_values[np.argmax(np.abs(st.g_values))] > 0
        assert not st.g_values.flags.writeable

    @pytest.mark.parametrize("m", [0.5, 3.0])
    def test_mass_scaling(self, m):
        base = dirac_shoot(Couplings(0.2, 0.5), Channel.from_kappa(-2), ShootingConfig(energy_window=(0.6, 0.98)))
        scaled = dirac_shoot(Couplings(0.2, 0.5, m), Channel.from_kappa(-2), ShootingConfig(energy_window=(0.6, 0.98)))
        assert [s.energy_over_m for s in scaled] == pytest.approx([s.energy_over_m for s in base], rel=1e-8)

    def test_grid_robustness(self):
        c, ch = Couplings(0.2, 0.5), Channel.from_kappa(1)
        window = (0.6, 0.97)
        a = dirac_shoot(c, ch, ShootingConfig(energy_window=window))
        b = dirac_shoot(c, ch, ShootingConfig(energy_window=window, n_points=8000, n_scan=600))
        assert [s.energy for s in a] == pytest.approx([s.energy for s in b], rel=1e-9)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            ShootingConfig(energy_window=(0.5, 1.0))
        with pytest.raises(ValueError):
            ShootingConfig(root_tolerance=0)


class TestFiniteDifference:
    def test_hydrogen_like(self):
        assert schrodinger_fd_eigen(1.0, 1.0, 1)[0] == pytest.approx(-0.25, abs=1e-6)

    def test_hydrogen_tower(self):
        levels = schrodinger_fd_eigen(0.0 + 1.0, 1.0, 4)
        assert levels == pytest.approx([-1 / (k + 2) ** 2 for k in range(4)], abs=1e-7)

    def test_noninteger_gamma(self):
        g = math.sqrt(0.75)
        # -z^2 / (k + gamma + 1)^2 with z = 0.45
        assert schrodinger_fd_eigen(g, 0.45, 1)[0] == pytest.approx(-0.45**2 / (g + 1) ** 2, abs=1e-7)

    def test_repulsive(self):
        with pytest.raises(NoBoundLevel):
            schrodinger_fd_eigen(1.0, -0.3, 1)

    def test_rejects_uniform_grid(self):
        with pytest.raises(ValueError):
            schrodinger_fd_eigen(1.0, 1.0, 1, RadialGrid(1e-3, 50, 500, "uniform"))

    def test_grid_convergence(self):
        g = 1.3
        grid = default_fd_grid(g, 0.7, 3)
        coarse = schrodinger_fd_eigen(g, 0.7, 3, grid)
        fine = schrodinger_fd_eigen(g, 0.7, 3, grid.refined())
        assert coarse == pytest.approx(fine, abs=1e-7)


class TestSelfConsistent:
    def test_pure_vector_second_level(self, sommerfeld):
        c, ch = sommerfeld
        assert selfconsistent_energy(c, ch, 0) == pytest.approx(_sommerfeld(0.5, 1), abs=1e-8)
        assert selfconsistent_energy(c, ch, 0) == pytest.approx(0.9659258263, abs=1e-8)

    def test_pure_scalar_pair(self):
        c, ch = Couplings(a2=1.0), Channel.from_kappa(-1)
        lo, hi = selfconsistent_energies(c, ch, 0)
        # E^2 = m^2 (1 - a2^2 / (1 + gamma)^2), gamma = sqrt(2)
        want = math.sqrt(1 - 1 / (1 + math.sqrt(2)) ** 2)
        assert (lo, hi) == pytest.approx((-want, want), abs=1e-8)
        assert want == pytest.approx(0.9101797211, abs=1e-10)
        assert selfconsistent_energy(c, ch, 0, Branch.MINUS) == lo

    def test_pure_vector_has_no_minus_root(self, sommerfeld):
        c, ch = sommerfeld
        with pytest.raises(NoRoot):
            selfconsistent_energy(c, ch, 0, "minus")

    def test_free(self):
        with pytest.raises(NoRoot):
            selfconsistent_energy(Couplings(), Channel.from_kappa(-1), 0)

    def test_mixed_matches_shooting(self):
        c, ch = Couplings(0.5, 0.2), Channel.from_kappa(-1)
        states = dirac_shoot(c, ch, ShootingConfig(energy_window=(0.5, 0.97)))
        e = selfconsistent_energy(c, ch, 0, cfg=RootConfig())
        # second oracle state is the first level beyond the nodeless one
        assert e == pytest.approx(states[1].energy, rel=1e-7)


def _state(E, m=1.0):
    grid = RadialGrid(1e-3, 1.0, 100)
    z = np.zeros(100)
    return BoundState(E, m, 0, 0, grid, z, z)


class TestCompareReport:
    def test_all_matched(self, sommerfeld):
        c, ch = sommerfeld
        lines = [ln for ln in spectrum(c, ch, 2) if ln.physical]
        rep = compare_report(lines, [_state(ln.energy * (1 + 1e-9)) for ln in lines], 1e-7)
        assert rep.passed and len(rep.matches) == 2
        assert rep.max_deviation == pytest.approx(1e-9, rel=1e-3)

    def test_missing_line_fails(self, sommerfeld):
        c, ch = sommerfeld
        lines = [ln for ln in spectrum(c, ch, 2) if ln.physical]
        rep = compare_report(lines, [_state(lines[0].energy)], 1e-7)
        assert not rep.passed and rep.unmatched_closed == (lines[1],)

    def test_extra_oracle_state_fails(self, sommerfeld):
        c, ch = sommerfeld
        lines = [ln for ln in spectrum(c, ch, 1) if ln.physical]
        rep = compare_report(lines, [_state(lines[0].energy), _state(0.2)], 1e-7)
        assert not rep.passed and len(rep.unmatched_oracle) == 1

    def test_deviation_over_tolerance_fails(self, sommerfeld):
        c, ch = sommerfeld
        lines = [ln for ln in spectrum(c, ch, 1) if ln.physical]
        rep = compare_report(lines, [_state(lines[0].energy * (1 + 1e-6))], 1e-7)
        assert len(rep.matches) == 1 and not rep.passed

    def test_unphysical_unmatched_lines_are_fine(self):
        lines = spectrum(Couplings(a1=0.5), Channel.from_kappa(-1), 1)
        rep = compare_report(lines, [_state(0.8660254037844386)], 1e-7)
        assert rep.passed


class TestNodeLaw:
    @pytest.mark.parametrize("K", [-2, -1])
    def test_negative_kappa(self, K):
        c, ch = Couplings(0.3, 0.4), Channel.from_kappa(K)
        lines = [ln for ln in spectrum(c, ch, abs(K) + 3) if ln.physical]
        states = dirac_shoot(c, ch, ShootingConfig(energy_window=(0.5, 0.995)))
        rep = compare_report(lines, states, 1e-7)
        assert rep.matches
        for pair in rep.matches:
            assert pair.state.upper_nodes == pair.line.level.n - abs(K)

    def test_positive_kappa_vector_dominated(self):
        c, ch = Couplings(0.5, 0.2), Channel.from_kappa(1)
        lines = [ln for ln in spectrum(c, ch, 4) if ln.physical]
        rep = compare_report(lines, dirac_shoot(c, ch, ShootingConfig(energy_window=(0.5, 0.995))), 1e-7)
        assert rep.matches
        for pair in rep.matches:
            assert pair.state.upper_nodes == pair.line.level.n_r
