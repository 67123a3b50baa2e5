from .jet import (SUPPORTED_DEGREES, TaylorJet, jet_constant, jet_elementwise, jet_exp, jet_lift,
                  jet_sigmoid, jet_softplus, jet_tanh, lift_points, required_degree, stack_jets)
from .tape import Grad, Tape, backward, finite_difference, relative_error
