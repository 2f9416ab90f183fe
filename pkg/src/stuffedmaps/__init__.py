"""Stuffed maps: enumeration, exact series solvers and the hypermobile bijection."""

from .bijection import PINNED, Convention, phi, psi, verify_bijection
from .cells import CellSet, CellShape, CountTable, cellset
from .enumerate import (enumerate_bms, enumerate_hypermobiles, enumerate_ordinary, enumerate_pointed_bms,
                        rescale_bms_to_stuffed, series_from_counts, weighted_counts_direct)
from .errors import StuffedMapError
from .hypermobile import Hypermobile, Mobile, validate_hypermobile
from .maps import Component, StuffedMap, associated_hypertree, canonical_code, canonical_form, validate_stuffed_map
from .report import bridged_quadrangulation_report, discrepancy_ledger
from .series import TSeries, ts_derivative_t, ts_derivative_weight, ts_sqrt_unit, ts_substitute_weights
from .solver import (MomentVector, closed_form_gamma_quadrangle, pointed_stuffed, solve_stuffed_functional,
                     solve_stuffed_tree_gamma, solve_stuffed_tutte, solve_tree_gamma, solve_tutte_ordinary,
                     w_residual)

__version__ = "0.1.0"
