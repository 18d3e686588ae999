"""Fixed spaces of m-th symplectic groups over Z/p^f and Cohen-Lenstra type heuristics."""
from .heuristics import DistTable, p_closed, predict, u_closed, u_step
from .pgroups import aut_order, format_type, parse_type
from .qseries import ApproxValue, poch_finite, poch_infinite
from .residue_linalg import RingSpec, RMatrix, kernel_type, local_snf
from .spectrum import SpectrumReport, compare_to_theory, exhaustive_spectrum, mc_spectrum
from .sympm import GroupSpec, contains, order, sample_uniform

__version__ = "0.1.0"
