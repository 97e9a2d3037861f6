"""Numerical tools for convex n-widths of function classes."""

from .convex_approx import (ApproxResult, Combination, ConvexCombination,
                            convex_fit, linear_fit, part1_shifted_core,
                            part2_collapse, width_upper_estimate)
from .covering import (EpsCover, EpsPacking, bound_consistency, greedy_cover,
                       greedy_packing, haussler_bound, lipschitz_bound)
from .errors import (ConfigError, DomainMismatchError, InvariantViolation,
                     UnsupportedError)
from .function_space import (FunctionVector, GridDomain, NormSpec,
                             monte_carlo_domain, norm, torus_domain)
from .node_classes import (Dictionary, NodeFamily, fourier_atom,
                           linear_threshold, sample_dictionary, smooth_mother)
from .sobolev import (FourierFunction, SobolevBallSpec, extremal_l1_mass,
                      truncation_width, width_comparison)

__version__ = "0.1.0"
