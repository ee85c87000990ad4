"""Safe policy synthesis for finite-state robot behaviour specifications."""

__version__ = "0.1.0"

from .dsl import SourceText, load_specification, parse_specification, print_canonical  # noqa: E402
from .model import Policy, Specification, SpecificationError, State  # noqa: E402
from .planner import find_plan, plan_length_oracle  # noqa: E402
from .policy import UnrealizableError, build_policy, check_convergence, explain  # noqa: E402

__all__ = [
    "Policy",
    "SourceText",
    "Specification",
    "SpecificationError",
    "State",
    "UnrealizableError",
    "build_policy",
    "check_convergence",
    "explain",
    "find_plan",
    "load_specification",
    "parse_specification",
    "plan_length_oracle",
    "print_canonical",
]
