"""Closed-form bound-state spectrum of the Dirac equation with Coulomb-type
vector (-a1/r) and scalar (-a2/r) couplings.

Units: hbar = c = 1. The couplings a1, a2 are dimensionless, so every energy
is proportional to the mass m.

Quantum-number bookkeeping
--------------------------
A radial channel is labelled by K = omega_tilde * (j + 1/2), where
omega_tilde = -1 for l = j - 1/2 and +1 for l = j + 1/2 (K < 0 is the
s_{1/2}-like family).  Levels carry the principal number n and the radial
number n_r, related by

    K > 0:  n = n_r + |K| + 1
    K < 0:  n = n_r + |K|

The effective principal number entering the energy formula is

    ntilde = n - |K| + gamma,   gamma = sqrt(K^2 - a1^2 + a2^2)

for both signs of K ("standard" convention).  The uniform rule
ntilde = n_r + gamma + 1 ("paper-literal") is kept selectable only to show
that it loses the K < 0 ground state.

Levels with ntilde = gamma (n = |K|) are nodeless: they solve a first-order
equation in which the lower-to-upper component ratio f/g is r-independent.
Exactly one root of the energy quadratic is such a solution, and it is
normalizable only when that ratio is negative.  For K < 0 this is the
familiar ground state.  For K > 0 it exists only when a2 > a1, lies at
negative energy, and sits one step below the n >= |K| + 1 range (its n_r
is therefore reported as -1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .errors import CaseMismatch, ImaginaryGamma, NoRealRoot

STANDARD = "standard"
PAPER_LITERAL = "paper-literal"
CONVENTIONS = (STANDARD, PAPER_LITERAL)

REASON_CONTINUUM = "|E| >= m"
REASON_REPULSIVE = "m*a2 + a1*E <= 0"
REASON_NOT_NORMALIZABLE = "nodeless solution not normalizable (f/g >= 0)"


class Branch(str, Enum):
    PLUS = "plus"
    MINUS = "minus"


class SpecialCase(str, Enum):
    SCALAR_ONLY = "scalar-only"
    VECTOR_ONLY = "vector-only"
    EQUAL = "equal"


@dataclass(frozen=True)
class Couplings:
    """Vector strength a1, scalar strength a2 and mass m."""

    a1: float = 0.0
    a2: float = 0.0
    m: float = 1.0

    def __post_init__(self) -> None:
        for name in ("a1", "a2", "m"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if self.m <= 0:
            raise ValueError(f"m must be positive, got {self.m}")
        if self.a1 < 0 or self.a2 < 0:
            raise ValueError("coupling strengths must be non-negative")

    def with_mass(self, m: float) -> Couplings:
        return Couplings(self.a1, self.a2, m)


@dataclass(frozen=True)
class Channel:
    """One radial sector, identified by (j, omega_tilde)."""

    j: Fraction
    omega_tilde: int

    def __post_init__(self) -> None:
        j = Fraction(self.j)
        if j < Fraction(1, 2) or j.denominator != 2:
            raise ValueError(f"j must be a positive half-integer, got {j}")
        if self.omega_tilde not in (1, -1):
            raise ValueError(f"omega_tilde must be +1 or -1, got {self.omega_tilde}")
        object.__setattr__(self, "j", j)

    @classmethod
    def from_kappa(cls, K: int) -> Channel:
        K = int(K)
        if K == 0:
            raise ValueError("K = 0 is not an allowed channel")
        return cls(Fraction(2 * abs(K) - 1, 2), 1 if K > 0 else -1)

    @property
    def K(self) -> int:
        return int(self.omega_tilde * (self.j + Fraction(1, 2)))

    @property
    def l(self) -> int:
        # omega_tilde = -1 <-> l = j - 1/2
        return int(self.j + Fraction(self.omega_tilde, 2))


@dataclass(frozen=True)
class LevelIndex:
    n: int
    n_r: int


@dataclass(frozen=True)
class SpectrumLine:
    channel: Channel
    level: LevelIndex
    gamma: float
    ntilde: float
    energy: float
    mass: float
    branch: Branch
    physical: bool
    rejection_reason: str | None = None

    @property
    def energy_over_m(self) -> float:
        return self.energy / self.mass


def gamma(channel: Channel, c: Couplings) -> float:
    g2 = channel.K**2 - c.a1**2 + c.a2**2
    if g2 <= 0:
        raise ImaginaryGamma(
            f"bound states require K^2 > a1^2 - a2^2 "
            f"(K^2 = {channel.K**2}, a1^2 - a2^2 = {c.a1**2 - c.a2**2:.15g})"
        )
    return math.sqrt(g2)


def min_principal(channel: Channel, convention: str = STANDARD) -> int:
    """Smallest n carried by the channel."""
    _check_convention(convention)
    k = abs(channel.K)
    if convention == PAPER_LITERAL and channel.K > 0:
        return k + 1
    return k


def level_index(channel: Channel, n: int) -> LevelIndex:
    k = abs(channel.K)
    n_r = n - k - 1 if channel.K > 0 else n - k
    return LevelIndex(n, n_r)


def ntilde(level: LevelIndex, channel: Channel, gamma: float, convention: str = STANDARD) -> float:
    _check_convention(convention)
    if convention == PAPER_LITERAL:
        return level.n_r + gamma + 1
    return level.n - abs(channel.K) + gamma


def energy_roots(ntilde: float, c: Couplings) -> tuple[float, float]:
    """Both roots (E_plus >= E_minus) of

        (ntilde^2 + a1^2) E^2 + 2 m a1 a2 E - m^2 (ntilde^2 - a2^2) = 0,

    i.e. E^2 - m^2 = -(m a2 + a1 E)^2 / ntilde^2 after squaring.
    """
    if ntilde <= 0:
        raise ValueError(f"ntilde must be positive, got {ntilde}")
    m, a1, a2 = c.m, c.a1, c.a2
    n2 = ntilde * ntilde
    qa = n2 + a1 * a1
    half_b = m * a1 * a2
    qc = -m * m * (n2 - a2 * a2)
    # discriminant / 4 = m^2 ntilde^2 (ntilde^2 + a1^2 - a2^2), formed without cancellation
    inner = n2 + (a1 - a2) * (a1 + a2)
    if inner < 0:
        raise NoRealRoot(
            f"ntilde^2 + a1^2 - a2^2 < 0 (ntilde = {ntilde:.15g}, a1 = {a1}, a2 = {a2})"
        )
    sqrt_disc = m * ntilde * math.sqrt(inner)
    q = -(half_b + math.copysign(sqrt_disc, half_b))
    if q == 0.0:
        r1 = r2 = -half_b / qa
    else:
        r1, r2 = q / qa, qc / q
    return (max(r1, r2), min(r1, r2))


def physical_filter(E: float, c: Couplings) -> tuple[bool, str | None]:
    """A root is a bound state iff |E| < m and m a2 + a1 E > 0."""
    if abs(E) >= c.m:
        return False, REASON_CONTINUUM
    if c.m * c.a2 + c.a1 * E <= 0:
        return False, REASON_REPULSIVE
    return True, None


def special_case_energy(case: SpecialCase | str, ntilde: float, c: Couplings):
    """Energy formula of one of the three special coupling patterns.

    Scalar-only returns the (+, -) pair; vector-only and equal couplings
    return the single admissible value.
    """
    case = SpecialCase(case)
    m, n2 = c.m, ntilde * ntilde
    if case is SpecialCase.SCALAR_ONLY:
        if c.a1 != 0:
            raise CaseMismatch(f"scalar-only case requires a1 = 0, got a1 = {c.a1}")
        arg = 1.0 - c.a2 * c.a2 / n2
        if arg < 0:
            raise NoRealRoot(f"a2 > ntilde ({c.a2} > {ntilde})")
        e = m * math.sqrt(arg)
        return (e, -e)
    if case is SpecialCase.VECTOR_ONLY:
        if c.a2 != 0:
            raise CaseMismatch(f"vector-only case requires a2 = 0, got a2 = {c.a2}")
        return m / math.sqrt(1.0 + c.a1 * c.a1 / n2)
    if c.a1 != c.a2:
        raise CaseMismatch(f"equal case requires a1 = a2, got {c.a1} != {c.a2}")
    a2_ = c.a1 * c.a1
    return m * (1.0 - 2.0 * a2_ / (n2 + a2_))


def nodeless_ratio(channel: Channel, c: Couplings, gamma: float) -> float:
    """Constant f/g of the first-order (ntilde = gamma) solution g, f ~ r^gamma e^(-lambda r).

    Substituting that ansatz into the radial system near r = 0 gives two
    equivalent expressions; the one with a non-vanishing denominator is used.
    Returns -inf/+inf when g vanishes identically.
    """
    K = channel.K
    if K < 0:
        return -(c.a1 + c.a2) / (gamma - K)
    if c.a1 == c.a2:
        return -math.inf
    return (gamma + K) / (c.a1 - c.a2)


def nodeless_energy(channel: Channel, c: Couplings, gamma: float) -> tuple[float, bool]:
    """Energy of the nodeless level and whether it is normalizable.

    With f = rho g the first-order system forces rho * lambda = E - m and
    lambda = -rho (E + m), hence E = m (1 - rho^2) / (1 + rho^2) and lambda > 0
    requires rho < 0.
    """
    rho = nodeless_ratio(channel, c, gamma)
    if math.isinf(rho):
        return -c.m, False
    r2 = rho * rho
    return c.m * (1.0 - r2) / (1.0 + r2), rho < 0


def spectrum(
    c: Couplings, channel: Channel, n_max: int, convention: str = STANDARD
) -> list[SpectrumLine]:
    """Every (level, branch) line with n <= n_max, sorted by energy."""
    n_min = min_principal(channel, convention)
    if n_max < n_min:
        raise ValueError(f"n_max = {n_max} is below the channel minimum n = {n_min}")
    g = gamma(channel, c)
    lines: list[SpectrumLine] = []
    for n in range(n_min, n_max + 1):
        level = level_index(channel, n)
        nt = ntilde(level, channel, g, convention)
        e_plus, e_minus = energy_roots(nt, c)
        roots = {Branch.PLUS: e_plus, Branch.MINUS: e_minus}
        if convention == STANDARD and n == abs(channel.K):
            # Only the first-order solution lives at ntilde = gamma.
            e_node, normalizable = nodeless_energy(channel, c, g)
            branch = min(roots, key=lambda b: abs(roots[b] - e_node))
            ok, reason = physical_filter(roots[branch], c)
            if ok and not normalizable:
                ok, reason = False, REASON_NOT_NORMALIZABLE
            lines.append(SpectrumLine(channel, level, g, nt, roots[branch], c.m, branch, ok, reason))
            continue
        for branch, e in roots.items():
            ok, reason = physical_filter(e, c)
            lines.append(SpectrumLine(channel, level, g, nt, e, c.m, branch, ok, reason))
    lines.sort(key=lambda ln: (ln.energy, ln.level.n, ln.branch.value))
    return lines


def _check_convention(convention: str) -> None:
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown ntilde convention {convention!r}; expected one of {CONVENTIONS}")
