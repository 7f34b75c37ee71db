"""Brute-force numerical solvers used to cross-check the closed-form spectrum.

Two routes, neither of which knows about the effective principal number:

* ``dirac_shoot`` integrates the untransformed radial Dirac system for
  u = r g, w = r f,

      u' = -(K/r) u + (E + m + (a1 - a2)/r) w
      w' =  (K/r) w - (E - m + (a1 + a2)/r) u,

  (potentials -a1/r vector, -a2/r scalar).  It works with the Pruefer
  variables u = rho cos(phi), w = rho sin(phi) in x = ln r, where the phase
  obeys a bounded first-order equation and the amplitude drops out.  The
  phase mismatch at the matching radius is a decreasing function of E, so
  eigenvalues are located by counting multiples of pi on a coarse scan and
  then polished with safeguarded Newton steps.

* ``schrodinger_fd_eigen`` discretizes the Coulomb-like radial operator
  -D^2 + gamma(gamma+1)/r^2 - 2 z/r on a logarithmic grid, and
  ``selfconsistent_energies`` solves E^2 - m^2 = eps_k(z(E)) for E.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq, minimize_scalar

from .core import Branch, Channel, Couplings, SpectrumLine, gamma as core_gamma
from .errors import NoBoundLevel, NonConvergent, NoRoot, NoStateInWindow
from .grid import RadialGrid, sign_changes


@dataclass(frozen=True)
class ShootingConfig:
    """Search settings for :func:`dirac_shoot`.

    ``energy_window`` is given in units of m; ``match_radius`` (absolute r)
    defaults to a point near the minimum of the effective potential.
    """

    energy_window: tuple[float, float] = (-0.999, 0.999)
    match_radius: float | None = None
    ode_tolerance: float = 1e-10
    root_tolerance: float = 1e-9
    max_bisections: int = 60
    n_scan: int = 400
    n_points: int = 4000
    grid_r_min: float = 1e-6
    r_start: float = 1e-8

    def __post_init__(self) -> None:
        lo, hi = (float(v) for v in self.energy_window)
        object.__setattr__(self, "energy_window", (lo, hi))
        if not -1.0 < lo < hi < 1.0:
            raise ValueError(f"energy window must satisfy -1 < lo < hi < 1 (units of m), got {self.energy_window}")
        if self.ode_tolerance <= 0 or self.root_tolerance <= 0:
            raise ValueError("tolerances must be positive")
        if self.match_radius is not None and self.match_radius <= 0:
            raise ValueError("match_radius must be positive")
        if self.max_bisections < 1 or self.n_scan < 2:
            raise ValueError("max_bisections >= 1 and n_scan >= 2 required")
        if not 0 < self.r_start < self.grid_r_min:
            raise ValueError("need 0 < r_start < grid_r_min")


@dataclass(frozen=True, eq=False)
class BoundState:
    """One converged eigenstate; (g_values, f_values) hold u = r g and w = r f,
    normalized so that the integral of u^2 + w^2 over r is 1."""

    energy: float
    mass: float
    upper_nodes: int
    lower_nodes: int
    grid: RadialGrid = field(repr=False)
    g_values: np.ndarray = field(repr=False)
    f_values: np.ndarray = field(repr=False)

    @property
    def energy_over_m(self) -> float:
        return self.energy / self.mass


class _Problem:
    """Radial system for one (couplings, channel), vectorized over energies."""

    def __init__(self, c: Couplings, channel: Channel, cfg: ShootingConfig):
        self.c, self.K, self.cfg = c, channel.K, cfg
        self.gamma = core_gamma(channel, c)
        a1, a2, g, K = c.a1, c.a2, self.gamma, channel.K
        # leading series coefficients of (u, w) ~ r^gamma
        u0, w0 = (g - K, -(a1 + a2)) if K < 0 else (a1 - a2, g + K)
        self.phi0 = math.atan2(w0, u0)

    def radii(self, E: np.ndarray):
        m, g = self.c.m, self.gamma
        lam = np.sqrt((m - E) * (m + E))
        if self.cfg.match_radius is not None:
            rm = np.full_like(E, self.cfg.match_radius)
        else:
            z = m * self.c.a2 + self.c.a1 * E
            rm = g * (g + 1) / np.maximum(z, 0.02 * m)
        rmax = np.maximum(40.0 / lam, 3.0 * rm)
        return lam, rm, rmax

    def _phase_rhs(self, E, xa, xb):
        m, a1, a2, K = self.c.m, self.c.a1, self.c.a2, self.K
        span = xb - xa

        def rhs(t, phi):
            r = np.exp(xa + t * span)
            cs, sn = np.cos(phi), np.sin(phi)
            P = (E - m) * r + a1 + a2
            Q = (E + m) * r + a1 - a2
            return span * (-P * cs * cs + 2 * K * sn * cs - Q * sn * sn)

        return rhs

    def _integrate(self, rhs, y0):
        tol = self.cfg.ode_tolerance
        sol = solve_ivp(rhs, (0.0, 1.0), y0, method="DOP853", rtol=tol, atol=tol * 1e-2)
        if not sol.success:
            raise NonConvergent(f"phase integration failed: {sol.message}")
        return sol.y[:, -1]

    def mismatch(self, E) -> np.ndarray:
        """phi_out - phi_in at the matching radius, vectorized over E."""
        E = np.atleast_1d(np.asarray(E, dtype=float))
        lam, rm, rmax = self.radii(E)
        x0 = np.full(E.size, math.log(self.cfg.r_start))
        xm, xmax = np.log(rm), np.log(rmax)
        out = self._integrate(self._phase_rhs(E, x0, xm), np.full(E.size, self.phi0))
        inn = self._integrate(self._phase_rhs(E, xmax, xm), np.arctan2(-lam, E + self.c.m))
        return out - inn

    def refine(self, lo, hi, f_lo, f_hi, targets):
        """Solve mismatch(E) = targets inside brackets [lo, hi].

        f_lo and f_hi are mismatch - target at the bracket ends.  Starts at
        the secant point, then takes Newton steps with a forward-difference
        slope, bisecting whenever a step leaves the shrinking bracket.
        """
        cfg, m = self.cfg, self.c.m
        lo, hi = lo.copy(), hi.copy()
        x = (lo * f_hi - hi * f_lo) / (f_hi - f_lo)
        active = np.ones(x.size, dtype=bool)
        accept = 0.1 * cfg.root_tolerance * m
        h = 1e-7 * m
        for _ in range(cfg.max_bisections):
            idx = np.flatnonzero(active)
            k = idx.size
            both = self.mismatch(np.concatenate([x[idx], x[idx] + h]))
            f = both[:k] - targets[idx]
            slope = (both[k:] - both[:k]) / h
            # mismatch decreases with E: f > 0 puts the root above x
            new_lo = np.where(f > 0, x[idx], lo[idx])
            new_hi = np.where(f > 0, hi[idx], x[idx])
            step = np.where(slope < 0, f / slope, np.inf)
            x_new = x[idx] - step
            done = np.abs(step) < accept
            outside = ~((x_new > new_lo) & (x_new < new_hi)) & ~done
            x_new = np.where(outside, 0.5 * (new_lo + new_hi), x_new)
            done |= (new_hi - new_lo) < accept
            lo[idx], hi[idx], x[idx] = new_lo, new_hi, x_new
            active[idx[done]] = False
            if not active.any():
                return x
        raise NonConvergent(
            f"{int(active.sum())} root(s) not converged after {cfg.max_bisections} refinement steps"
        )

    def state(self, E: float) -> BoundState:
        """Reconstruct normalized (u, w) at an eigenvalue on the output grid."""
        cfg, m = self.cfg, self.c.m
        Ea = np.array([E])
        lam, rm, rmax = (float(v[0]) for v in self.radii(Ea))
        grid = RadialGrid(cfg.grid_r_min, rmax, cfg.n_points)
        x = np.log(grid.r)
        xs, xm, xmax = math.log(cfg.r_start), math.log(rm), math.log(rmax)
        inner = x <= xm

        phi_out, lr_out = self._amplitude_leg(Ea, xs, xm, self.phi0, (x[inner] - xs) / (xm - xs))
        phi_in, lr_in = self._amplitude_leg(
            Ea, xmax, xm, math.atan2(-lam, E + m), ((x[~inner] - xmax) / (xm - xmax))[::-1]
        )
        phi_in, lr_in = phi_in[::-1], lr_in[::-1]
        # the last sample of each leg is the matching point
        turns = round((phi_out[-1] - phi_in[0]) / math.pi)
        lr_in = lr_in + (lr_out[-1] - lr_in[0])
        phi_in = phi_in + turns * math.pi

        phi = np.concatenate([phi_out[:-1], phi_in[1:]])
        log_rho = np.concatenate([lr_out[:-1], lr_in[1:]])
        rho = np.exp(log_rho - log_rho.max())
        u, w = rho * np.cos(phi), rho * np.sin(phi)
        norm = math.sqrt(grid.integrate(u * u + w * w))
        u, w = u / norm, w / norm
        if _leading_sign(u) < 0:
            u, w = -u, -w
        u.flags.writeable = False
        w.flags.writeable = False
        return BoundState(E, m, sign_changes(u), sign_changes(w), grid, u, w)

    def _amplitude_leg(self, E, xa, xb, phi_start, t_eval):
        m, a1, a2, K = self.c.m, self.c.a1, self.c.a2, self.K
        e = float(E[0])
        span = xb - xa

        def rhs(t, y):
            r = math.exp(xa + t * span)
            cs, sn = math.cos(y[0]), math.sin(y[0])
            P = (e - m) * r + a1 + a2
            Q = (e + m) * r + a1 - a2
            dphi = -P * cs * cs + 2 * K * sn * cs - Q * sn * sn
            dlr = -K * (cs * cs - sn * sn) + 2 * (m * r - a2) * sn * cs
            return [span * dphi, span * dlr]

        t_eval = np.append(t_eval, 1.0)
        tol = self.cfg.ode_tolerance
        sol = solve_ivp(
            rhs, (0.0, 1.0), [phi_start, 0.0], method="DOP853", t_eval=t_eval, rtol=tol, atol=tol * 1e-2
        )
        if not sol.success:
            raise NonConvergent(f"amplitude integration failed: {sol.message}")
        return sol.y[0], sol.y[1]


def dirac_shoot(c: Couplings, channel: Channel, cfg: ShootingConfig | None = None) -> list[BoundState]:
    """All bound states of the radial Dirac system with energy inside the
    configured window, ordered by energy."""
    return list(_dirac_shoot_cached(c, channel, cfg or ShootingConfig()))


@lru_cache(maxsize=256)
def _dirac_shoot_cached(c: Couplings, channel: Channel, cfg: ShootingConfig) -> tuple[BoundState, ...]:
    problem = _Problem(c, channel, cfg)
    lo, hi = cfg.energy_window
    energies = c.m * np.linspace(lo, hi, cfg.n_scan)
    scan = problem.mismatch(energies)
    turns = np.floor(scan / math.pi).astype(int)
    brackets = []
    for i in range(cfg.n_scan - 1):
        # every multiple of pi crossed between neighbours is one eigenvalue
        for j in range(turns[i + 1] + 1, turns[i] + 1):
            brackets.append((energies[i], energies[i + 1], scan[i] - j * math.pi, scan[i + 1] - j * math.pi, j * math.pi))
    if not brackets:
        raise NoStateInWindow(
            f"no bound state for K={channel.K}, a1={c.a1}, a2={c.a2} with E/m in [{lo}, {hi}]"
        )
    b_lo, b_hi, f_lo, f_hi, targets = (np.array(v) for v in zip(*brackets))
    roots = np.sort(problem.refine(b_lo, b_hi, f_lo, f_hi, targets))
    return tuple(problem.state(float(E)) for E in roots)


def schrodinger_fd_eigen(
    gamma: float, z_eff: float, n_levels: int, grid: RadialGrid | None = None
) -> list[float]:
    """Lowest eigenvalues of -D^2 + gamma(gamma+1)/r^2 - 2 z_eff/r.

    With u = sqrt(r) v and x = ln r the problem becomes the generalized
    symmetric one -v'' + (gamma+1/2)^2 v - 2 z r v = eps r^2 v, which is
    central-differenced and symmetrized into a tridiagonal matrix.  The
    result is Richardson-extrapolated from the grid and its refinement.
    """
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    if n_levels < 1:
        raise ValueError("n_levels must be >= 1")
    if not z_eff > 0:
        raise NoBoundLevel(f"effective charge z_eff = {z_eff:.6g} <= 0 binds nothing")
    if grid is None:
        grid = default_fd_grid(gamma, z_eff, n_levels)
    if grid.spacing != "logarithmic":
        raise ValueError("the finite-difference oracle needs a logarithmic grid")
    coarse = _fd_levels(gamma, z_eff, n_levels, grid)
    fine = _fd_levels(gamma, z_eff, n_levels, grid.refined())
    levels = (4.0 * fine - coarse) / 3.0
    if not np.all(levels < 0):
        raise NoBoundLevel(f"only {int(np.sum(levels < 0))} bound level(s) resolved on this grid")
    return [float(v) for v in levels]


def default_fd_grid(gamma: float, z_eff: float, n_levels: int, n_points: int = 1200) -> RadialGrid:
    """Logarithmic grid in units of the Bohr-like radius 1/z_eff."""
    size = n_levels + gamma + 1
    return RadialGrid(1e-6 / z_eff, size * (60.0 + 4.0 * size) / z_eff, n_points)


def _fd_levels(gamma, z, n_levels, grid: RadialGrid) -> np.ndarray:
    h = grid.step
    r = grid.r[1:-1]  # Dirichlet ends
    diag = (2.0 / h**2 + (gamma + 0.5) ** 2 - 2.0 * z * r) / r**2
    off = -1.0 / (h**2 * r[:-1] * r[1:])
    # stebz with an absolute tolerance far below the default, which is
    # relative to the matrix norm and swamps the small bound levels
    return eigh_tridiagonal(
        diag, off, eigvals_only=True, select="i", select_range=(0, n_levels - 1),
        lapack_driver="stebz", tol=1e-300,
    )


@dataclass(frozen=True)
class RootConfig:
    xtol: float = 1e-13
    max_iter: int = 200
    n_points: int = 1200


def selfconsistent_energies(
    c: Couplings, channel: Channel, k: int, cfg: RootConfig | None = None
) -> tuple[float, ...]:
    """Energies E in (-m, m) with E^2 - m^2 equal to the k-th eigenvalue of
    the reduced operator at z_eff = m a2 + a1 E, ascending.

    g(E) = E^2 - m^2 - eps_k(z(E)) is convex on the admissible domain z > 0,
    so there are at most two roots, separated by its minimum.
    """
    return _selfconsistent_cached(c, channel, int(k), cfg or RootConfig())


def selfconsistent_energy(
    c: Couplings, channel: Channel, k: int, branch: Branch | str = Branch.PLUS, cfg: RootConfig | None = None
) -> float:
    """The larger (plus) or smaller (minus) self-consistent root.

    A lone root is always the upper one: it only occurs when z vanishes
    inside (-m, m), which leaves the admissible set bounded from below.
    """
    branch = Branch(branch)
    roots = selfconsistent_energies(c, channel, k, cfg)
    if branch is Branch.PLUS:
        return roots[-1]
    if len(roots) < 2:
        raise NoRoot(f"no minus-branch root for K={channel.K}, k={k}, a1={c.a1}, a2={c.a2}")
    return roots[0]


@lru_cache(maxsize=512)
def _selfconsistent_cached(c: Couplings, channel: Channel, k: int, cfg: RootConfig) -> tuple[float, ...]:
    if k < 0:
        raise ValueError("k must be >= 0")
    g = core_gamma(channel, c)
    m = c.m

    def z_of(E):
        return m * c.a2 + c.a1 * E

    def resid(E):
        z = z_of(E)
        eps = schrodinger_fd_eigen(g, z, k + 1, default_fd_grid(g, z, k + 1, cfg.n_points))[k]
        return E * E - m * m - eps

    # admissible energies: |E| < m and z(E) > 0
    e_low = -m if c.a1 == 0 else max(-m, -m * c.a2 / c.a1)
    span = m - e_low
    lo, hi = e_low + 1e-9 * span, m * (1 - 1e-12)
    if not z_of(hi) > 0:
        raise NoRoot(f"z_eff = m a2 + a1 E is never positive for a1={c.a1}, a2={c.a2}")
    if z_of(lo) <= 0:
        raise NoRoot("empty admissible energy interval")
    f_hi = resid(hi)
    opt = minimize_scalar(resid, bounds=(lo, hi), method="bounded", options={"xatol": 1e-7 * m})
    e_min, f_min = float(opt.x), float(opt.fun)
    if f_min >= 0:
        raise NoRoot(f"no self-consistent level k={k} for K={channel.K}, a1={c.a1}, a2={c.a2}")
    roots = []
    f_lo = resid(lo)
    if f_lo > 0:
        roots.append(_brent(resid, lo, e_min, cfg))
    if f_hi > 0:
        roots.append(_brent(resid, e_min, hi, cfg))
    if not roots:
        raise NoRoot(f"no sign change bracketing a level k={k} for K={channel.K}")
    return tuple(roots)


def _brent(f, a, b, cfg: RootConfig) -> float:
    root, info = brentq(f, a, b, xtol=cfg.xtol, maxiter=cfg.max_iter, full_output=True, disp=False)
    if not info.converged:
        raise NonConvergent(f"self-consistent root search stopped: {info.flag}")
    return float(root)


@dataclass(frozen=True)
class MatchedPair:
    line: SpectrumLine
    state: BoundState
    deviation: float


@dataclass(frozen=True)
class ComparisonReport:
    matches: tuple[MatchedPair, ...]
    unmatched_closed: tuple[SpectrumLine, ...]
    unmatched_oracle: tuple[BoundState, ...]
    max_deviation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        """Every physical line found, no extra oracle state, all deviations within tolerance."""
        return (
            not any(ln.physical for ln in self.unmatched_closed)
            and not self.unmatched_oracle
            and self.max_deviation < self.tolerance
        )


def compare_report(
    closed: list[SpectrumLine], oracle: list[BoundState], tol: float, pair_window: float = 1e-3
) -> ComparisonReport:
    """Pair closed-form lines with oracle states, nearest energies first.

    Deviations are relative to the closed-form energy.  Candidates further
    apart than ``pair_window`` (relative) stay unmatched.
    """
    candidates = []
    for i, ln in enumerate(closed):
        for j, st in enumerate(oracle):
            dev = _relative(ln.energy, st.energy)
            if dev <= pair_window:
                candidates.append((dev, i, j))
    candidates.sort()
    used_c, used_o, matches = set(), set(), []
    for dev, i, j in candidates:
        if i in used_c or j in used_o:
            continue
        used_c.add(i)
        used_o.add(j)
        matches.append(MatchedPair(closed[i], oracle[j], dev))
    matches.sort(key=lambda p: p.line.energy)
    return ComparisonReport(
        matches=tuple(matches),
        unmatched_closed=tuple(ln for i, ln in enumerate(closed) if i not in used_c),
        unmatched_oracle=tuple(st for j, st in enumerate(oracle) if j not in used_o),
        max_deviation=max((p.deviation for p in matches), default=0.0),
        tolerance=tol,
    )


def _relative(reference: float, value: float) -> float:
    if reference == value:
        return 0.0
    return abs(value - reference) / max(abs(reference), np.finfo(float).tiny)


def _leading_sign(values: np.ndarray) -> float:
    peak = np.max(np.abs(values))
    first = np.flatnonzero(np.abs(values) > 1e-6 * peak)[0]
    return math.copysign(1.0, values[first])
