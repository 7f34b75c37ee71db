"""Table building behind the command-line front end.

Each ``*_rows`` function returns plain dicts of already formatted strings,
so the CLI only has to pick an output format.  Numbers use 15 significant
digits, which round-trips doubles closely enough for diffing runs.
"""

from __future__ import annotations

import csv
import io
import math
import shlex
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import transform
from .core import (
    STANDARD,
    Branch,
    Channel,
    Couplings,
    SpectrumLine,
    gamma as core_gamma,
    spectrum,
)
from .errors import DegenerateDenominator, DiracCoulombError, ImaginaryGamma, NoStateInWindow
from .grid import RadialGrid
from .oracles import (
    ShootingConfig,
    compare_report,
    dirac_shoot,
    selfconsistent_energy,
)
from .wavefunctions import build_spinor, count_nodes

SPECTRUM_COLUMNS = (
    "j", "omega_tilde", "K", "n", "n_r", "gamma", "ntilde", "branch", "energy_over_m", "physical", "rejection_reason",
)
VERIFY_COLUMNS = (
    "a1", "a2", "K", "n", "branch", "closed", "oracle", "method", "deviation", "status",
)
IDENTITY_COLUMNS = ("identity", "max_residual", "samples", "skipped_degenerate", "status")
WAVEFUNCTION_COLUMNS = ("r", "u_g", "u_f")

DEFAULT_VERIFY_COUPLINGS = (0.0, 0.2, 0.5)
DEFAULT_VERIFY_KAPPAS = (-2, -1, 1, 2)
IDENTITY_LIMIT = 1e-12
ADMISSIBLE_MARGIN = 0.01


@dataclass(frozen=True)
class RunConfig:
    couplings: Couplings
    channels: tuple[Channel, ...]
    n_max: int = 4
    tolerance: float = 1e-6
    output_format: str = "csv"
    seed: int = 0
    convention: str = STANDARD

    def __post_init__(self) -> None:
        if not self.tolerance > 0:
            raise ValueError(f"tolerance must be positive, got {self.tolerance}")
        if self.n_max < 1:
            raise ValueError(f"n_max must be >= 1, got {self.n_max}")
        if self.output_format not in ("csv", "records"):
            raise ValueError(f"unknown output format {self.output_format!r}")


def fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".15g")
    if x is None:
        return ""
    return str(x)


def render(rows: Iterable[dict], columns: Sequence[str], output_format: str, preamble: Sequence[str] = ()) -> str:
    """CSV with a header row, or one ``key=value`` record per line."""
    buf = io.StringIO()
    for line in preamble:
        buf.write(f"# {line}\n")
    if output_format == "csv":
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([row[c] for c in columns])
    else:
        for row in rows:
            buf.write(" ".join(f"{c}={shlex.quote(row[c]) if row[c] else ''}" for c in columns) + "\n")
    return buf.getvalue()


def line_row(ln: SpectrumLine) -> dict:
    ch = ln.channel
    return {
        "j": fmt(ch.j),
        "omega_tilde": fmt(ch.omega_tilde),
        "K": fmt(ch.K),
        "n": fmt(ln.level.n),
        "n_r": fmt(ln.level.n_r),
        "gamma": fmt(ln.gamma),
        "ntilde": fmt(ln.ntilde),
        "branch": ln.branch.value,
        "energy_over_m": fmt(ln.energy_over_m),
        "physical": fmt(ln.physical),
        "rejection_reason": fmt(ln.rejection_reason),
    }


def spectrum_rows(cfg: RunConfig) -> tuple[list[dict], list[str]]:
    """Rows for every channel in order, plus one diagnostic per failed channel."""
    rows, failures = [], []
    for ch in cfg.channels:
        try:
            lines = spectrum(cfg.couplings, ch, cfg.n_max, cfg.convention)
        except ImaginaryGamma as exc:
            failures.append(f"K={ch.K}: {exc}")
            continue
        except ValueError:
            continue  # n_max below the channel's first level: nothing to list
        rows.extend(line_row(ln) for ln in lines)
    return rows, failures


def verification_window(c: Couplings, channel: Channel, n_max: int, convention: str = STANDARD) -> tuple[float, float]:
    """Energy window (units of m) holding the physical lines with n <= n_max
    and excluding those with n = n_max + 1.

    Edges sit halfway to the first excluded line; without one, the window
    extends to the continuum (upper side) or to -0.999 m (lower side).
    """
    try:
        lines = spectrum(c, channel, n_max + 1, convention)
    except ValueError:
        return (-0.999, 0.999)
    inside = [ln.energy_over_m for ln in lines if ln.physical and ln.level.n <= n_max]
    outside = [ln.energy_over_m for ln in lines if ln.physical and ln.level.n == n_max + 1]
    if not inside:
        return (-0.999, 0.999)
    top, bottom = max(inside), min(inside)
    above = [e for e in outside if e > top]
    below = [e for e in outside if e < bottom]
    hi = 0.5 * (top + min(above)) if above else 0.5 * (top + 1.0)
    lo = 0.5 * (bottom + max(below)) if below else -0.999
    return (lo, hi)


@dataclass
class VerifyOutcome:
    rows: list[dict] = field(default_factory=list)
    failures: int = 0
    skipped: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.failures == 0


def verify_point(c: Couplings, channel: Channel, n_max: int, tol: float, convention: str = STANDARD) -> VerifyOutcome:
    """Closed form against both oracles for one coupling point and channel."""
    out = VerifyOutcome()
    try:
        lines = spectrum(c, channel, n_max, convention)
    except ImaginaryGamma as exc:
        out.skipped.append(f"a1={fmt(c.a1)} a2={fmt(c.a2)} K={channel.K}: {exc}")
        return out
    except ValueError:
        return out
    physical = [ln for ln in lines if ln.physical]
    cfg = ShootingConfig(energy_window=verification_window(c, channel, n_max, convention))
    try:
        states = dirac_shoot(c, channel, cfg)
    except NoStateInWindow:
        states = []
    report = compare_report(physical, states, tol)

    def add(ln, value, method, deviation, ok):
        out.rows.append({
            "a1": fmt(c.a1), "a2": fmt(c.a2), "K": fmt(channel.K),
            "n": fmt(ln.level.n) if ln else "", "branch": ln.branch.value if ln else "",
            "closed": fmt(ln.energy_over_m) if ln else "",
            "oracle": fmt(value), "method": method, "deviation": fmt(deviation),
            "status": "ok" if ok else "FAIL",
        })
        if not ok:
            out.failures += 1

    for pair in report.matches:
        add(pair.line, pair.state.energy_over_m, "shooting", pair.deviation, pair.deviation < tol)
    for ln in report.unmatched_closed:
        add(ln, None, "shooting", None, False)
    for st in report.unmatched_oracle:
        add(None, st.energy_over_m, "shooting", None, False)

    g = core_gamma(channel, c)
    for ln in physical:
        k = round(ln.ntilde - g - 1)
        if ln.ntilde < g + 1 - 1e-9:
            continue  # first-order levels are invisible to the reduced equation
        try:
            e = selfconsistent_energy(c, channel, k, ln.branch)
        except DiracCoulombError:
            add(ln, None, "finite-difference", None, False)
            continue
        dev = abs(e - ln.energy) / max(abs(ln.energy), np.finfo(float).tiny)
        add(ln, e / c.m, "finite-difference", dev, dev < tol)
    return out


def verify_rows(couplings: Iterable[Couplings], channels: Sequence[Channel], n_max: int, tol: float,
                convention: str = STANDARD) -> VerifyOutcome:
    total = VerifyOutcome()
    for c in couplings:
        for ch in channels:
            part = verify_point(c, ch, n_max, tol, convention)
            total.rows.extend(part.rows)
            total.failures += part.failures
            total.skipped.extend(part.skipped)
    return total


@dataclass(frozen=True)
class IdentityPoint:
    K: int
    a1: float
    a2: float
    E: float = 0.5

    def describe(self) -> str:
        return f"K={self.K},a1={fmt(self.a1)},a2={fmt(self.a2)},E={fmt(self.E)}"


def parse_point(text: str) -> IdentityPoint:
    """'K=1,a1=0.999[,a2=0][,E=0.5]' -> IdentityPoint."""
    values = {}
    for part in text.split(","):
        key, sep, val = part.partition("=")
        key = key.strip()
        if not sep or key not in ("K", "a1", "a2", "E"):
            raise ValueError(f"bad point component {part!r}; expected K=, a1=, a2=, E=")
        values[key] = int(val) if key == "K" else float(val)
    if "K" not in values or values["K"] == 0:
        raise ValueError("a forced point needs a non-zero K")
    return IdentityPoint(values["K"], values.get("a1", 0.0), values.get("a2", 0.0), values.get("E", 0.5))


def random_points(samples: int, seed: int) -> list[IdentityPoint]:
    """Admissible points: |K| in 1..4, a1, a2 in [0, 0.9|K|], E in (-1, 1)."""
    rng = np.random.default_rng(seed)
    points = []
    while len(points) < samples:
        k = int(rng.integers(1, 5)) * int(rng.choice([-1, 1]))
        a1, a2 = rng.uniform(0, 0.9 * abs(k), size=2)
        E = float(rng.uniform(-1, 1))
        p = IdentityPoint(k, float(a1), float(a2), E)
        if is_admissible(p):
            points.append(p)
    return points


def is_admissible(p: IdentityPoint) -> bool:
    K2 = p.K * p.K
    if K2 - p.a1**2 + p.a2**2 <= ADMISSIBLE_MARGIN or abs(K2 - p.a1**2) <= ADMISSIBLE_MARGIN:
        return False
    ch = Channel.from_kappa(p.K)
    c = Couplings(p.a1, p.a2)
    h = transform.hyperbolics(ch, c, core_gamma(ch, c))
    xi_const = 1.0 + p.E * h.cosh_theta if p.K > 0 else 1.0 - p.E * h.cosh_theta
    return abs(xi_const) > 1e-6


@dataclass
class IdentityOutcome:
    maxima: dict
    evaluated: int
    skipped: list[IdentityPoint]
    worst: dict

    @property
    def passed(self) -> bool:
        return all(v < IDENTITY_LIMIT for v in self.maxima.values())

    def rows(self) -> list[dict]:
        return [
            {
                "identity": name,
                "max_residual": fmt(value),
                "samples": fmt(self.evaluated),
                "skipped_degenerate": fmt(len(self.skipped)),
                "status": "ok" if value < IDENTITY_LIMIT else "FAIL",
            }
            for name, value in self.maxima.items()
        ]


def reduction_residual(p: IdentityPoint) -> float:
    """Largest coefficient difference between the eliminated operator and
    the expected Coulomb-like form."""
    ch = Channel.from_kappa(p.K)
    c = Couplings(p.a1, p.a2)
    g = core_gamma(ch, c)
    trace = transform.eliminate_to_second_order(ch, c, p.E)
    expected = transform.reduced_coulomb_form(g, c.m * c.a2 + c.a1 * p.E, p.E, c.m)
    return trace.composed.max_abs_diff(expected)


def identity_sweep(samples: int, seed: int, forced: Sequence[IdentityPoint] = ()) -> IdentityOutcome:
    names = ("hyperbolic", "xi_scalar", "xi_gamma", "reduction")
    maxima = dict.fromkeys(names, 0.0)
    worst: dict = {}
    skipped = []
    evaluated = 0
    for p in list(random_points(samples, seed)) + list(forced):
        if not is_admissible(p):
            skipped.append(p)
            continue
        try:
            res = transform.identity_residuals(Channel.from_kappa(p.K), Couplings(p.a1, p.a2))
            values = {
                "hyperbolic": res.hyperbolic,
                "xi_scalar": res.xi_scalar,
                "xi_gamma": res.xi_gamma,
                "reduction": reduction_residual(p),
            }
        except (DegenerateDenominator, ImaginaryGamma):
            skipped.append(p)
            continue
        evaluated += 1
        for name, v in values.items():
            if not v <= maxima[name]:
                maxima[name] = v if math.isfinite(v) else math.inf
                worst[name] = p
    return IdentityOutcome(maxima, evaluated, skipped, worst)


def find_line(c: Couplings, channel: Channel, n: int, branch: Branch | None, convention: str = STANDARD) -> SpectrumLine:
    lines = [ln for ln in spectrum(c, channel, n, convention) if ln.level.n == n]
    if branch is not None:
        lines = [ln for ln in lines if ln.branch is branch]
    elif len(lines) > 1:
        physical = [ln for ln in lines if ln.physical]
        lines = physical if len(physical) == 1 else lines
    if len(lines) != 1:
        raise LookupError(
            f"no unique level n={n} branch={branch.value if branch else 'any'} for K={channel.K}"
        )
    return lines[0]


def wavefunction_table(line: SpectrumLine, c: Couplings, grid: RadialGrid) -> tuple[list[str], list[dict]]:
    g, f = build_spinor(line, c, grid)
    meta = [
        f"K={line.channel.K} n={line.level.n} n_r={line.level.n_r} branch={line.branch.value}",
        f"energy_over_m={fmt(line.energy_over_m)} gamma={fmt(line.gamma)} ntilde={fmt(line.ntilde)}",
        f"nodes_g={count_nodes(g)} nodes_f={count_nodes(f)}",
    ]
    rows = [
        {"r": fmt(r), "u_g": fmt(ug), "u_f": fmt(uf)}
        for r, ug, uf in zip(grid.r.tolist(), g.values.tolist(), f.values.tolist())
    ]
    return meta, rows


def default_wave_grid(line: SpectrumLine, r_min: float, r_max: float | None, points: int) -> RadialGrid:
    if r_max is None:
        lam = math.sqrt((line.mass - line.energy) * (line.mass + line.energy))
        r_max = 40.0 / lam
    return RadialGrid(r_min, r_max, points)
