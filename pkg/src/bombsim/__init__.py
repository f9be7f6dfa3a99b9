"""bombsim: simulator and measurement harness for bomb query complexity.

The bomb oracle is a controlled query that terminates the whole computation
whenever it would return a 1.  This package simulates the oracle models
exactly, implements the Zeno-chain constructions that trade standard quantum
queries for bomb queries (and classical queries for either), instruments the
graph algorithms whose query/mistake accounting those trades reward, and
measures every bound that is checkable at desk scale.
"""

from .oracles import HiddenString, QueryLedger, double_string
from .qsim import QState, RegisterLayout, make_basis_state
from .zeno import ZenoParams, compile_quantum_to_bomb, ev_bomb_test

__version__ = "0.1.0"

__all__ = [
    "HiddenString", "QueryLedger", "double_string",
    "QState", "RegisterLayout", "make_basis_state",
    "ZenoParams", "compile_quantum_to_bomb", "ev_bomb_test",
    "__version__",
]
