"""Closed-form radial wavefunctions.

After the similarity transformation one transformed component solves the
hydrogen-like equation

    -u'' + gamma(gamma+1)/r^2 u - 2 z/r u = -lambda^2 u,   z = m a2 + a1 E,

with noninteger angular momentum gamma, so u is a Laguerre function
(``phi_solution``).  Which component that is depends on the channel: R (as
phi = r R) for K > 0, Q (as q = r Q) for K < 0.  The other component
follows from a first-order relation (``partner_component``), and the
original (g, f) from undoing the transformation (``build_spinor``).

Nodeless levels are the exception.  There the component that is *not*
covered by the second-order route carries r^gamma e^(-lambda r) and its
partner vanishes.

All arrays are u-type (r times the radial function).  Derivatives are
carried analytically so that residuals of the radial equations can be
checked to rounding level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import Channel, Couplings, SpectrumLine, gamma as core_gamma
from .errors import SingularXi
from .grid import RadialGrid, sign_changes
from .transform import hyperbolics, mixer, untransform_components, xi_factors

COMPONENTS = ("phi", "q", "g", "f")
XI_ZERO = 1e-12


@dataclass(frozen=True)
class LaguerreParams:
    n: int
    alpha: float

    def __post_init__(self) -> None:
        if self.n < 0 or int(self.n) != self.n:
            raise ValueError(f"degree must be a non-negative integer, got {self.n}")
        if not self.alpha > -1:
            raise ValueError(f"order must exceed -1, got {self.alpha}")


def laguerre(p: LaguerreParams, x):
    """Generalized Laguerre polynomial L_n^(alpha)(x) by upward recurrence."""
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if p.n == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 + p.alpha - x
    for k in range(1, p.n):
        prev, cur = cur, ((2 * k + 1 + p.alpha - x) * cur - (k + p.alpha) * prev) / (k + 1)
    return cur if cur.ndim else float(cur)


def laguerre_derivative(p: LaguerreParams, x):
    """d/dx L_n^(alpha) = -L_{n-1}^(alpha+1)."""
    if p.n == 0:
        return np.zeros_like(np.asarray(x, dtype=float))
    return -laguerre(LaguerreParams(p.n - 1, p.alpha + 1), x)


@dataclass(frozen=True, eq=False)
class RadialSolution:
    grid: RadialGrid = field(repr=False)
    values: np.ndarray = field(repr=False)
    component: str
    n_r: int
    lam: float
    derivative: np.ndarray | None = field(default=None, repr=False)
    second_derivative: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.component not in COMPONENTS:
            raise ValueError(f"component must be one of {COMPONENTS}, got {self.component!r}")
        for arr in (self.values, self.derivative, self.second_derivative):
            if arr is not None:
                arr.flags.writeable = False


def phi_values(n_r: int, gamma: float, z_eff: float, r: np.ndarray):
    """u = N (2 lam r)^(gamma+1) e^(-lam r) L_{n_r}^(2gamma+1)(2 lam r) and u'.

    N makes the integral of u^2 over (0, inf) equal to one:
    N^2 = 2 lam n_r! / (Gamma(n_r + 2gamma + 2) (2 n_r + 2gamma + 2)).
    """
    if n_r < 0:
        raise ValueError(f"n_r must be >= 0, got {n_r}")
    if not z_eff > 0:
        raise ValueError(f"z_eff must be positive, got {z_eff}")
    alpha = 2 * gamma + 1
    lam = z_eff / (n_r + gamma + 1)
    log_norm = 0.5 * (
        math.log(2 * lam) + math.lgamma(n_r + 1) - math.lgamma(n_r + alpha + 1) - math.log(2 * n_r + alpha + 1)
    )
    rho = 2 * lam * np.asarray(r, dtype=float)
    p = LaguerreParams(n_r, alpha)
    envelope = np.exp(log_norm + (gamma + 1) * np.log(rho) - 0.5 * rho)
    u = envelope * laguerre(p, rho)
    du = u * ((gamma + 1) / r - lam) + envelope * 2 * lam * laguerre_derivative(p, rho)
    return u, du, lam


def phi_solution(n_r: int, gamma: float, z_eff: float, grid: RadialGrid, component: str = "phi") -> RadialSolution:
    """Normalized Laguerre solution of the reduced Coulomb-like equation."""
    r = grid.r
    u, du, lam = phi_values(n_r, gamma, z_eff, r)
    # the equation itself supplies u''
    d2u = (gamma * (gamma + 1) / (r * r) - 2 * z_eff / r + lam * lam) * u
    return RadialSolution(grid, u, component, n_r, lam, du, d2u)


def nodeless_solution(gamma: float, lam: float, grid: RadialGrid, component: str) -> RadialSolution:
    """Normalized r^gamma e^(-lam r), the solution of u' = (gamma/r - lam) u."""
    if not lam > 0:
        raise ValueError(f"decay constant must be positive, got {lam}")
    r = grid.r
    log_norm = -0.5 * (math.lgamma(2 * gamma + 1) - (2 * gamma + 1) * math.log(2 * lam))
    u = np.exp(log_norm + gamma * np.log(r) - lam * r)
    slope = gamma / r - lam
    return RadialSolution(grid, u, component, 0, lam, slope * u, (slope * slope - gamma / (r * r)) * u)


def partner_component(u: RadialSolution, channel: Channel, c: Couplings, E: float) -> RadialSolution:
    """The other transformed component, from the first-order relations

        xi1 q = phi' + mix phi / r + E sinh phi
        xi2 phi = q' - mix q / r - E sinh q,        mix = K cosh + a1 sinh,

    where xi1, xi2 are the (at most 1/r-dependent) channel factors.
    """
    if u.component not in ("phi", "q"):
        raise ValueError(f"partner of a {u.component!r} component is undefined")
    g = core_gamma(channel, c)
    h = hyperbolics(channel, c, g)
    sh = h.sinh_theta
    mix = channel.K * h.cosh_theta + c.a1 * sh
    xi1, xi2 = xi_factors(channel, c, E, h)
    if u.component == "phi":
        xi, s, target = xi1, 1.0, "q"
    else:
        xi, s, target = xi2, -1.0, "phi"
    if abs(xi.inv_r_coeff) < XI_ZERO * c.m and abs(xi.const_coeff) < XI_ZERO * c.m:
        raise SingularXi(f"the xi factor for the {target} component vanishes at E = {E!r}")

    r = u.grid.r
    v = u.values
    dv = u.derivative if u.derivative is not None else np.gradient(v, r)
    coeff = s * (mix / r + E * sh)
    numerator = dv + coeff * v
    xi_r = xi.inv_r_coeff / r + xi.const_coeff
    values = numerator / xi_r
    derivative = None
    if u.second_derivative is not None:
        d_num = u.second_derivative + coeff * dv - s * mix * v / (r * r)
        d_xi = -xi.inv_r_coeff / (r * r)
        derivative = (d_num * xi_r - numerator * d_xi) / (xi_r * xi_r)
    return RadialSolution(u.grid, values, target, u.n_r, u.lam, derivative)


def is_nodeless(level: SpectrumLine) -> bool:
    return level.level.n == abs(level.channel.K)


def transformed_pair(level: SpectrumLine, c: Couplings, grid: RadialGrid) -> tuple[RadialSolution, RadialSolution]:
    """(phi, q) for a level, unnormalized jointly."""
    channel, E = level.channel, level.energy
    g = core_gamma(channel, c)
    if is_nodeless(level):
        lam = math.sqrt((c.m - E) * (c.m + E))
        primary = nodeless_solution(g, lam, grid, "phi" if channel.K < 0 else "q")
        # the partner vanishes identically; evaluating it would divide rounding
        # noise by an xi factor that changes sign at r = 2 a2 / (m + E cosh)
        zero = np.zeros_like(primary.values)
        partner = RadialSolution(grid, zero, "q" if primary.component == "phi" else "phi", 0, lam, zero.copy())
    else:
        k = level.level.n - abs(channel.K) - 1
        primary = phi_solution(k, g, c.m * c.a2 + c.a1 * E, grid, "phi" if channel.K > 0 else "q")
        partner = partner_component(primary, channel, c, E)
    return (primary, partner) if primary.component == "phi" else (partner, primary)


def build_spinor(level: SpectrumLine, c: Couplings, grid: RadialGrid) -> tuple[RadialSolution, RadialSolution]:
    """Original components (u_g, u_f) = r (g, f), normalized jointly to one."""
    if not level.physical:
        raise ValueError(f"level is not a bound state: {level.rejection_reason}")
    if level.mass != c.m:
        raise ValueError("level and couplings disagree on the mass")
    phi, q = transformed_pair(level, c, grid)
    g = core_gamma(level.channel, c)
    mix = mixer(hyperbolics(level.channel, c, g))
    u_g, u_f = untransform_components(phi.values, q.values, mix)
    norm = math.sqrt(grid.integrate(u_g * u_g + u_f * u_f))
    du_g = du_f = None
    if phi.derivative is not None and q.derivative is not None:
        du_g, du_f = untransform_components(phi.derivative, q.derivative, mix)
        du_g, du_f = du_g / norm, du_f / norm
    n_r = level.level.n_r
    return (
        RadialSolution(grid, u_g / norm, "g", n_r, phi.lam, du_g),
        RadialSolution(grid, u_f / norm, "f", n_r, phi.lam, du_f),
    )


def dirac_residual(g: RadialSolution, f: RadialSolution, channel: Channel, c: Couplings, E: float) -> np.ndarray:
    """Pointwise residuals of the untransformed radial system, stacked (2, n)."""
    if g.derivative is None or f.derivative is None:
        raise ValueError("residual needs analytic derivatives")
    r, K, m = g.grid.r, channel.K, c.m
    res_g = g.derivative + K / r * g.values - (E + m + (c.a1 - c.a2) / r) * f.values
    res_f = f.derivative - K / r * f.values + (E - m + (c.a1 + c.a2) / r) * g.values
    return np.vstack([res_g, res_f])


def count_nodes(s: RadialSolution) -> int:
    return sign_changes(s.values)

