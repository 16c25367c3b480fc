"""Exact symbolic engine for Darboux transformations of
``L = Dx*Dy + a*Dx + b*Dy + c``."""
from .darboux import (
    DarbouxWitness,
    FirstOrderM,
    HyperbolicL,
    darboux11,
    existence_conditions,
    laplace,
    reconstruct_pair,
    solve_intertwining,
    wronskian_mn,
)
from .expr import Expr, JetVar, diff, exp, is_zero, jet, ln, normalize, substitute
from .invariants import (
    EvolutionInvariants,
    GaugeInvariants,
    evolution_invariants,
    gauge_invariants,
    gauged_evolution,
    i30,
    invariant_conditions,
    wronskian_invariants,
)
from .lpdo import LPDO, apply, compose, gauge, symbol_of
from .parser import ParseError, parse, parse_operator

__version__ = "0.1.0"
