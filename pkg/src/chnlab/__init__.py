"""Exact verification of Cayley-Hamilton-Newton identities for quantum matrix algebras."""

from .scalar import GaussRational, I, Scalar, q_number
from .expr import parse_scalar
from .tensor import TensorOp
from .report import VerificationReport

__version__ = "0.1.0"

__all__ = ["GaussRational", "I", "Scalar", "TensorOp", "VerificationReport", "parse_scalar", "q_number"]
