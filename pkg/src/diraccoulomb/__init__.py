"""Exact and numerical bound-state spectra of the Dirac equation with
Coulomb-type vector and scalar couplings."""

from .core import (
    Branch,
    Channel,
    Couplings,
    LevelIndex,
    SpecialCase,
    SpectrumLine,
    energy_roots,
    gamma,
    physical_filter,
    special_case_energy,
    spectrum,
)
from .errors import DiracCoulombError
from .grid import RadialGrid
from .oracles import BoundState, ShootingConfig, compare_report, dirac_shoot, schrodinger_fd_eigen, selfconsistent_energy
from .wavefunctions import build_spinor, count_nodes, phi_solution

__version__ = "0.1.0"
