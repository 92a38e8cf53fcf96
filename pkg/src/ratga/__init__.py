"""Exact kernel for rational additive-group actions.

Rational integrability of derivations of Q(x1, ..., xn) via certified
exponential flows, rational slices, local nilpotency, and the root criteria
for homogeneous derivations on toric varieties.
"""

from .arith import MPoly, RatFunc, VarContext, compose, eq, formal_partial, reduce
from .derivation import Derivation, LndVerdict, apply, in_kernel, is_slice, iterate, lnd_check
from .flow import (IntegrabilityVerdict, RationalFlow, TruncFlow, coaction_check, derivation_from_flow,
                   detect_rational, exp_series, extract_slice, integrability_check, verify_flow)
from .parser import ParseError, parse, parse_expr, render
from .toric import (Cone, Fan, HomogDeriv, RootVerdict, enumerate_roots, extends_to_cone,
                    integrable_criterion, regular_on_fan, semi_affine, to_derivation)

__version__ = "0.1.0"
