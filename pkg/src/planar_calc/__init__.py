"""Harmonic extension on planar compacta and matrix functional calculi."""
from .calculus import holo_calc, is_star_normal, spectrum, sqrt_superpositive
from .disk import BoundarySamples, conjugate_harmonic, fourier_split, poisson_eval
from .errors import InputError, NumericalError, PlanarCalcError
from .geometry import CompactSet, Disk, HalfPlane, boundary, cut_halfplane, fill_holes, make_disk_union, symmetrize
from .harmonic import graded_parts, harmonic_calc, ordinary_abs, superpositive_abs
from .realops import isometry_check, real_embed
from .schwarz import alternating_solve, dirichlet_solve, fd_laplace_oracle, symmetrization_solve
from .triholo import TriField, triholo_basis, triholo_check, triholo_product

__version__ = "0.1.0"
