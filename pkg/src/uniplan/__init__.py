"""Sensorless universal plans driven by normal digit sequences."""

from .digits import ACTIONS, ActionMap, DigitStream, champernowne_digit, map_digit_to_action
from .errors import (DegenerateEnvironment, InvalidArgument, InvalidState, ParseError,
                     ResourceLimitError, UniplanError)
from .gridworld import GridEnv, PlanTrace, execute, parse_env, run_steps
from .pi4 import pi_digit_base4

__version__ = "0.1.0"

__all__ = [
    "ACTIONS", "ActionMap", "DegenerateEnvironment", "DigitStream", "GridEnv",
    "InvalidArgument", "InvalidState", "ParseError", "PlanTrace", "ResourceLimitError",
    "UniplanError", "champernowne_digit", "execute", "map_digit_to_action", "parse_env",
    "pi_digit_base4", "run_steps",
]
