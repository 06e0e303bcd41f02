"""Mean-field, semiclassical and exact two-mode analysis of a condensate in a double well."""
from .bifurcation import CriticalResult, FixedPoint, critical_xi, find_fixed_points, fold_point
from .dynamics import Trajectory, detect_trapping, integrate, measure_period
from .errors import (CapacityError, ConfigurationError, DomainError, NotACenterError,
                     NumericalError, OutputError, ParameterError, SingularityError,
                     TwoWellError)
from .fluctuation import FluctuationReport, coefficients, predict
from .model import ModelParams, PhasePoint, energy_gradient, energy_hessian, reduced_energy
from .quantum import build, ground_state, localized_doublet

__version__ = "0.1.0"
