"""Fixed and trainable activation functions, including ErfReLU, with
analytic gradients, finite-difference audits and a small dense-network
training harness."""

from .activations import (
    ActivationInstance,
    ActivationKind,
    Param,
    ParamSet,
    default_params,
    derivative,
    derivative_batch,
    forward,
    forward_batch,
    make,
    param_gradient,
    param_gradient_batch,
    registry_list,
)
from .errors import ParamDomainError, UnknownActivation
from .numerics import erf, erf_oracle

__version__ = "0.1.0"
