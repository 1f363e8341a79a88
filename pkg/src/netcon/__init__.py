"""Shape construction by passively mobile automata with geometric ports."""

from .model import Configuration, Port, bounding_metrics, feasible_alignment, validate_shape
from .protocol import AgentProtocol, RuleTable, parse_rules
from .scheduler import Simulation, enumerate_interactions, is_quiescent, run, step

__version__ = "0.1.0"
