"""catalix: annihilating polynomials for fixed-point discrete differential equations."""

from .dde import DdeSpec, build_p, check_h1, expand_series, fixed_point_spec, load_dde, parse_dde
from .guess import bound_b, certify, guess_algebraic
from .solvers import (AnnihilatorResult, Diagnostic, SolveOptions, run_modular_probe, solve,
                      solve_direct, solve_elim, solve_geom, solve_hgp)

__version__ = "0.1.0"
