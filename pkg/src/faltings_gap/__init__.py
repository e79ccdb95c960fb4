"""Stable Faltings heights of elliptic curves, the height gap at j = 0, and numerical lemma certification."""

from .errors import FaltingsGapError
from .heights import (HeightReport, faltings_stable, hmin_closed, prop54_lower_bound,
                      scan_corpus, silverman_sandwich_check, weil_height)
from .modular import FDPoint, UHPoint, e2_eval, inverse_j, j_eval, log_abs_delta, reduce_fd, v_eval
from .numctx import PrecisionContext, gamma_rat
from .poly import IntPolynomial, cyclotomic, parse_poly, roots_hp

__version__ = "0.1.0"
