"""Python front end to the C++ mechanism and simulation library."""

from ._core import (
    ConfigError,
    DomainError,
    SolverError,
    __version__,
    centralized_efforts,
    effort_linear,
    effort_quadratic,
    homogeneous_contract,
    payment_rule_linear,
    payment_rule_quadratic,
    run,
    solve_cubic,
    suite_names,
    verify,
)

__all__ = [
    "ConfigError",
    "DomainError",
    "SolverError",
    "__version__",
    "centralized_efforts",
    "effort_linear",
    "effort_quadratic",
    "homogeneous_contract",
    "payment_rule_linear",
    "payment_rule_quadratic",
    "run",
    "solve_cubic",
    "suite_names",
    "verify",
]
