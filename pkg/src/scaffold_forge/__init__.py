"""Generic Galois p-group towers in characteristic p, their ramification and scaffolds."""

from .pgroup import PFilteredGroup, frattini, load_group, preset, rank, sigma_set
from .ramification import check_ramfilt, check_ramfiltcor, lower_from_upper, m_constant, upper_from_lower
from .saltman import GenericTower, build_generic, equivalent_d, verify_level
from .scaffold import ScaffoldInput, build_report, mu_matrix, precision_c, search_breaks, theta_ops

__version__ = "0.1.0"

__all__ = [
    "GenericTower", "PFilteredGroup", "ScaffoldInput", "build_generic", "build_report", "check_ramfilt",
    "check_ramfiltcor", "equivalent_d", "frattini", "load_group", "lower_from_upper", "m_constant",
    "mu_matrix", "precision_c", "preset", "rank", "search_breaks", "sigma_set", "theta_ops",
    "upper_from_lower", "verify_level",
]
