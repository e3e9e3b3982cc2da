from .exceptions import (
    SplittingError,
    InvalidSplitting,
    InvalidPartners,
    BudgetExhausted,
    GuaranteeViolated,
    ConfigurationError,
)
from .numeric import NumberField, Scalar, ScalarMode, RATIONALS, sqrt_field
from .planar import PlanarVector, PlanarLattice
from .splitting import CylinderClass, FixSplitting, validate, is_irrational, areas

__all__ = [
    'SplittingError',
    'InvalidSplitting',
    'InvalidPartners',
    'BudgetExhausted',
    'GuaranteeViolated',
    'ConfigurationError',
    'NumberField',
    'Scalar',
    'ScalarMode',
    'RATIONALS',
    'sqrt_field',
    'PlanarVector',
    'PlanarLattice',
    'CylinderClass',
    'FixSplitting',
    'validate',
    'is_irrational',
    'areas',
]
