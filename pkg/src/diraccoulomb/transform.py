"""Similarity transformation S = a + i b beta alpha.r_hat and the radial
operator algebra used to decouple the transformed equations.

Radial operators here have coefficients that are polynomials in 1/r of
fixed, small shape.  The classes only use +, -, * and / on their
coefficients, so they work unchanged with floats, ``fractions.Fraction`` or
sympy expressions (the tests exploit this for exact checks).

Component conventions: (g, f) are the original upper/lower radial functions
and (R, Q) the transformed ones, related by

    R = a g + b f,    Q = b g + a f,    a^2 - b^2 = 1,

with cosh(theta) = a^2 + b^2 and sinh(theta) = 2 a b.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from .core import Channel, Couplings, gamma as core_gamma
from .errors import DegenerateDenominator, InvalidCosh, SingularElimination

EPS_DENOMINATOR = 1e-9
XI_ZERO = 1e-12


@dataclass(frozen=True)
class HyperbolicPair:
    sinh_theta: float
    cosh_theta: float


@dataclass(frozen=True)
class MixerPair:
    a: float
    b: float


@dataclass(frozen=True)
class FirstOrderOp:
    """d_coeff * d/dr + inv_r_coeff / r + const_coeff.

    With d_coeff = 0 this doubles as a multiplicative factor c0 + c1/r.
    """

    d_coeff: Any = 0
    inv_r_coeff: Any = 0
    const_coeff: Any = 0

    def compose(self, inner: FirstOrderOp) -> SecondOrderForm:
        """self o inner, acting on a function R."""
        a1, b1, c1 = self.d_coeff, self.inv_r_coeff, self.const_coeff
        a2, b2, c2 = inner.d_coeff, inner.inv_r_coeff, inner.const_coeff
        # d/dr (b2 R / r) = b2 R'/r - b2 R / r^2
        return SecondOrderForm(
            d2=a1 * a2,
            d1_over_r=a1 * b2 + b1 * a2,
            inv_r2=b1 * b2 - a1 * b2,
            inv_r=b1 * c2 + c1 * b2,
            const=c1 * c2,
            d1=a1 * c2 + c1 * a2,
        )

    def times(self, other: FirstOrderOp) -> SecondOrderForm:
        """Pointwise product of two multiplicative factors."""
        if self.d_coeff != 0 or other.d_coeff != 0:
            raise ValueError("times() multiplies derivative-free factors only")
        return SecondOrderForm(
            inv_r2=self.inv_r_coeff * other.inv_r_coeff,
            inv_r=self.const_coeff * other.inv_r_coeff + self.inv_r_coeff * other.const_coeff,
            const=self.const_coeff * other.const_coeff,
        )

    def apply(self, u, du, r):
        return self.d_coeff * du + (self.inv_r_coeff / r + self.const_coeff) * u

    def value(self, r):
        """Value of a derivative-free factor at r."""
        return self.inv_r_coeff / r + self.const_coeff


@dataclass(frozen=True)
class SecondOrderForm:
    """d2 D^2 + d1_over_r (1/r) D + d1 D + inv_r2 / r^2 + inv_r / r + const."""

    d2: Any = 0
    d1_over_r: Any = 0
    inv_r2: Any = 0
    inv_r: Any = 0
    const: Any = 0
    d1: Any = 0

    _FIELDS = ("d2", "d1_over_r", "inv_r2", "inv_r", "const", "d1")

    def coefficients(self) -> tuple:
        return tuple(getattr(self, k) for k in self._FIELDS)

    def __add__(self, other: SecondOrderForm) -> SecondOrderForm:
        return SecondOrderForm(*(x + y for x, y in zip(self.coefficients(), other.coefficients())))

    def __sub__(self, other: SecondOrderForm) -> SecondOrderForm:
        return SecondOrderForm(*(x - y for x, y in zip(self.coefficients(), other.coefficients())))

    def scale(self, k) -> SecondOrderForm:
        return SecondOrderForm(*(k * x for x in self.coefficients()))

    def to_u_representation(self) -> SecondOrderForm:
        """Rewrite L[R] = 0 for u = r R, i.e. return the form of r L[u / r]."""
        c2, c1r, cm2, cm1, c0, c1 = self.coefficients()
        return SecondOrderForm(
            d2=c2,
            d1_over_r=c1r - 2 * c2,
            inv_r2=cm2 + 2 * c2 - c1r,
            inv_r=cm1 - c1,
            const=c0,
            d1=c1,
        )

    def apply(self, u, du, d2u, r):
        return (
            self.d2 * d2u
            + (self.d1_over_r / r + self.d1) * du
            + (self.inv_r2 / (r * r) + self.inv_r / r + self.const) * u
        )

    def max_abs_diff(self, other: SecondOrderForm) -> float:
        return max(abs(float(x - y)) for x, y in zip(self.coefficients(), other.coefficients()))


@dataclass(frozen=True)
class EliminationTrace:
    xi1: FirstOrderOp
    xi2: FirstOrderOp
    eliminated: str  # the component expressed through the other: "Q" or "R"
    composed: SecondOrderForm


@dataclass(frozen=True)
class IdentityResiduals:
    hyperbolic: float
    xi_scalar: float
    xi_gamma: float

    def max(self) -> float:
        return max(self.hyperbolic, self.xi_scalar, self.xi_gamma)


def hyperbolics(channel: Channel, c: Couplings, gamma: float) -> HyperbolicPair:
    """sinh/cosh of the transformation angle that removes the first-derivative
    couplings of the potentials:

        sinh = (|K| a2 - w a1 gamma) / (K^2 - a1^2)
        cosh = (|K| gamma - w a1 a2) / (K^2 - a1^2)
    """
    K, w = channel.K, channel.omega_tilde
    den = K * K - c.a1 * c.a1
    if abs(den) < EPS_DENOMINATOR:
        raise DegenerateDenominator(f"|K^2 - a1^2| = {abs(den):.3g} < {EPS_DENOMINATOR}")
    return HyperbolicPair(
        sinh_theta=(abs(K) * c.a2 - w * c.a1 * gamma) / den,
        cosh_theta=(abs(K) * gamma - w * c.a1 * c.a2) / den,
    )


def mixer(h: HyperbolicPair) -> MixerPair:
    """Half-angle parameters (a, b) of S, normalized to a^2 - b^2 = 1."""
    ch = h.cosh_theta
    if not ch >= 1.0:
        if ch > 1.0 - 4 * np.finfo(float).eps:
            ch = 1.0
        else:
            raise InvalidCosh(f"cosh(theta) = {h.cosh_theta!r} < 1")
    a = math.sqrt((ch + 1.0) / 2.0)
    if ch < 2.0:
        # near theta = 0, cosh - 1 cancels; sinh = 2ab carries b accurately
        b = h.sinh_theta / (2.0 * a)
    else:
        b = math.copysign(math.sqrt((ch - 1.0) / 2.0), h.sinh_theta)
    return MixerPair(a, b)


def identity_residuals(channel: Channel, c: Couplings) -> IdentityResiduals:
    """|cosh^2 - sinh^2 - 1|, |a1 cosh + K sinh - w a2|, |K cosh + a1 sinh - w gamma|.

    The last two are what collapse the general xi factors to the simple
    channel forms.
    """
    g = core_gamma(channel, c)
    h = hyperbolics(channel, c, g)
    sh, ch = h.sinh_theta, h.cosh_theta
    K, w = channel.K, channel.omega_tilde
    return IdentityResiduals(
        hyperbolic=abs((ch - sh) * (ch + sh) - 1.0),
        xi_scalar=abs(c.a1 * ch + K * sh - w * c.a2),
        xi_gamma=abs(K * ch + c.a1 * sh - w * g),
    )


def radial_operators(channel: Channel, c: Couplings, E, h: HyperbolicPair) -> tuple[FirstOrderOp, FirstOrderOp]:
    """Operators L+ and L- with xi1 Q = L+ R and xi2 R = L- Q.

    They follow from the transformed 2x2 system by taking
    sinh * (first row) - cosh * (second row) and vice versa.
    """
    K, sh, ch = channel.K, h.sinh_theta, h.cosh_theta
    mix = K * ch + c.a1 * sh
    l_plus = FirstOrderOp(1, 1 + mix, E * sh)
    l_minus = FirstOrderOp(1, 1 - mix, -E * sh)
    return l_plus, l_minus


def xi_factors(channel: Channel, c: Couplings, E, h: HyperbolicPair) -> tuple[FirstOrderOp, FirstOrderOp]:
    K, sh, ch = channel.K, h.sinh_theta, h.cosh_theta
    coulomb = c.a1 * ch + K * sh
    xi1 = FirstOrderOp(0, -c.a2 + coulomb, c.m + E * ch)
    xi2 = FirstOrderOp(0, -c.a2 - coulomb, c.m - E * ch)
    return xi1, xi2


def reduce_pair(
    first: FirstOrderOp, second: FirstOrderOp, xi_first: FirstOrderOp, xi_second: FirstOrderOp
) -> SecondOrderForm:
    """Second-order equation for the component X, given

        xi_first Y = first X,    xi_second X = second Y,

    with xi_first independent of r.  The result is normalized to a leading
    -D^2 in the u = r X representation.
    """
    if _numerically_zero(xi_first.const_coeff):
        raise SingularElimination("the r-independent xi factor vanishes at this energy")
    # second[first X] / xi_first = xi_second X
    form = second.compose(first) - xi_first.times(xi_second)
    return form.to_u_representation().scale(-1)


def eliminate_to_second_order(channel: Channel, c: Couplings, E: float) -> EliminationTrace:
    g = core_gamma(channel, c)
    h = hyperbolics(channel, c, g)
    l_plus, l_minus = radial_operators(channel, c, E, h)
    xi1, xi2 = xi_factors(channel, c, E, h)
    if channel.omega_tilde == 1:
        composed = reduce_pair(l_plus, l_minus, xi1, xi2)
        eliminated = "Q"
    else:
        composed = reduce_pair(l_minus, l_plus, xi2, xi1)
        eliminated = "R"
    return EliminationTrace(xi1, xi2, eliminated, composed)


def reduced_coulomb_form(gamma, z_eff, E, m) -> SecondOrderForm:
    """-D^2 + gamma(gamma+1)/r^2 - 2 z_eff / r - (E^2 - m^2)."""
    return SecondOrderForm(d2=-1, inv_r2=gamma * (gamma + 1), inv_r=-2 * z_eff, const=m * m - E * E)


def transform_components(g, f, mix: MixerPair):
    return mix.a * g + mix.b * f, mix.b * g + mix.a * f


def untransform_components(R, Q, mix: MixerPair):
    return mix.a * R - mix.b * Q, -mix.b * R + mix.a * Q


def _numerically_zero(x) -> bool:
    try:
        return abs(complex(x)) < XI_ZERO
    except TypeError:  # symbolic coefficient
        return False
