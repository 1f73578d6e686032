"""beaverkit: tooling for conjecture-searching Turing machines.

Parse and validate published-style transition tables, compose sections
into full machines, simulate them fast enough to check unary arithmetic
at scale, merge one-sided states, judge behavior against exact integer
oracles, and reason about non-halting with busy-beaver bounds.
"""

from .engine import RunLimits, RunOutcome, fingerprint, run
from .machine import HALT, NEXT_MACHINE, Action, Machine, state_count
from .tape import Configuration, Tape

__all__ = [
    "Action",
    "Configuration",
    "HALT",
    "Machine",
    "NEXT_MACHINE",
    "RunLimits",
    "RunOutcome",
    "Tape",
    "fingerprint",
    "run",
    "state_count",
]

__version__ = "0.1.0"
