from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

UNIFORM = "uniform"
LOGARITHMIC = "logarithmic"


@dataclass(frozen=True)
class RadialGrid:
    r_min: float
    r_max: float
    n_points: int = 4000
    spacing: str = LOGARITHMIC

    def __post_init__(self) -> None:
        if not (0 < self.r_min < self.r_max) or not math.isfinite(self.r_max):
            raise ValueError(f"need 0 < r_min < r_max, got ({self.r_min}, {self.r_max})")
        if self.n_points < 100:
            raise ValueError(f"n_points must be >= 100, got {self.n_points}")
        if self.spacing not in (UNIFORM, LOGARITHMIC):
            raise ValueError(f"unknown spacing {self.spacing!r}")

    @cached_property
    def r(self) -> np.ndarray:
        if self.spacing == LOGARITHMIC:
            r = np.exp(np.linspace(math.log(self.r_min), math.log(self.r_max), self.n_points))
            r[0], r[-1] = self.r_min, self.r_max
        else:
            r = np.linspace(self.r_min, self.r_max, self.n_points)
        r.flags.writeable = False
        return r

    @property
    def step(self) -> float:
        """Spacing in r (uniform) or in ln r (logarithmic)."""
        if self.spacing == LOGARITHMIC:
            return math.log(self.r_max / self.r_min) / (self.n_points - 1)
        return (self.r_max - self.r_min) / (self.n_points - 1)

    def refined(self) -> RadialGrid:
        """Same interval with the step halved."""
        return RadialGrid(self.r_min, self.r_max, 2 * self.n_points - 1, self.spacing)

    def scaled(self, factor: float) -> RadialGrid:
        return RadialGrid(self.r_min * factor, self.r_max * factor, self.n_points, self.spacing)

    def integrate(self, values: np.ndarray) -> float:
        """Trapezoid rule; in ln r for logarithmic grids, where it converges
        much faster for integrands that vanish at both ends."""
        values = np.asarray(values)
        if self.spacing == LOGARITHMIC:
            return float(np.trapezoid(values * self.r, dx=self.step))
        return float(np.trapezoid(values, self.r))


def sign_changes(values: np.ndarray, floor: float = 1e-12, skip: int = 2) -> int:
    """Strict sign changes of a sampled function.

    Samples below ``floor`` times the peak are treated as zero and dropped,
    as are ``skip`` cells at either end, where truncation can flip signs.
    """
    v = np.asarray(values, dtype=float)
    if skip:
        v = v[skip:-skip]
    if v.size == 0:
        return 0
    peak = np.max(np.abs(v))
    if peak == 0:
        return 0
    s = np.sign(v[np.abs(v) > floor * peak])
    return int(np.count_nonzero(s[1:] != s[:-1]))
