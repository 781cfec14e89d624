"""Structure of recognition networks that can invert a Bayesian network."""

from .dsep import Trail, d_separated, enumerate_trails, find_active_trail, is_blocked
from .errors import (BninvError, CycleError, GraphError, ParseError, PreconditionError,
                     ResourceLimitError, UnknownNodeError)
from .graph import Dag, TopologicalOrdering, UndirectedGraph, is_consonant
from .inclusion import (check_condition_ii, check_condition_iii, check_condition_iv, check_necessary,
                        check_star_equivalence, check_star_inversion, check_sufficient_perfect,
                        induced_inclusion_holds, markov_included)
from .invert import (all_minimal_inversions, goal1_from_goal2, goal2_from_goal1, minimal_inversion,
                     verify_goal1)
from .io import format_dot, parse_dot, parse_graph, read_graph

__version__ = "0.1.0"
