"""Numerical verification of trace minmax matrix inequalities.

For Hermitian A <= B <= C (Loewner order) and D = A + C - B, a function f is
trace minmax when tr f(A) + tr f(C) >= tr f(B) + tr f(D).  This package
samples such quadruples, checks the inequality family (trace, determinant,
Frobenius, characteristic polynomial), tests matrix monotonicity and
convexity, runs the Hankel-matrix positivity criteria on power series, and
inverts Taylor coefficients into the atomic integral representation
f(z) = alpha + beta z + sum w_i K(t_i, z; c).  A quadrature evaluator for the
Riemann Xi function feeds the same machinery its finite numerical shadows.
"""

__version__ = "0.1.0"

from ._kernel import BACKEND as KERNEL_BACKEND  # noqa: F401
from .linalg import HermitianMatrix, eigh, is_psd, loewner_leq  # noqa: F401
from .funcalc import ScalarFunction, apply, frechet, resolve_function  # noqa: F401
from .series import HankelSpec, PowerSeries, hankel_psd_test  # noqa: F401
from .pickrep import PickRepresentation, recover_measure, represent  # noqa: F401
from .inequality import OrderedQuadruple, sample_quadruple, trace_minmax_margin  # noqa: F401
