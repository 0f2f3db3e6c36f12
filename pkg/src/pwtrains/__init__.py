"""Piecewise witness trains on [0, +inf): exact evaluation, integration and
metrics, constructive approximants and a verification suite."""

__version__ = "0.1.0"

from ._accel import BACKEND
from .errors import (
    CertificateError, DomainError, KnotBudgetError, ParameterError, PwTrainsError,
    QuadratureError, TailBoundError, UnsupportedOperationError,
)
from .pwcore import (
    ZERO, Affine, AffinePower, CombinedFunction, FinitePiecewise, Interval, LazyTrain, Piece,
    SmoothBump, Tent, Zero, combine, evaluate, evaluate_many, integrate_abs, linear_combination,
    pieces_in, sup_abs, train_power, train_product,
)
from .families import (
    DOUBLE_EXP, EXP, ONE, FamilySpec, GrowthProfile, Monomial, PIndex, make_cutoff_polygonal,
    make_train, monomial_p_index, p_index_roundtrip, p_index_to_monomial, poly,
    polygonal_from_knots, primes, sequence_tail_bound,
)
from .metrics import (
    MetricValue, ToleranceConfig, dc0_distance, dx_distance, l1_norm, sup_norm_window,
    support_tail_measure,
)
from .approx import ApproxCertificate, bump_perturb, polygonal_approximant, sequence_approximant
from .verify import CheckResult, Report, run_all

__all__ = [name for name in dir() if not name.startswith("_")]
