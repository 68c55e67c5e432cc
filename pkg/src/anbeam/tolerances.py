"""Central tolerance configuration shared by solvers, checks and the CLI."""

import os
from dataclasses import dataclass

ENV_PROFILE = "ANBEAM_TOLERANCE_PROFILE"


@dataclass(frozen=True)
class Tolerances:
    """Numerical guards used across the package.

    rel_equality: relative tolerance for power/constraint equality checks.
    residual: floor for quantities that cancel exactly in exact arithmetic.
    real_root: a polynomial root counts as real when |Im| <= real_root * max(1, |Re|).
    radicand_guard: a radicand in [-radicand_guard * scale, 0) is clipped to 0.
    singular_guard: denominators smaller than this (relative) are treated as singular.
    bound_slack: relative slack accepted on per-relay amplitude bounds.
    """

    rel_equality: float = 1e-8
    residual: float = 1e-12
    real_root: float = 1e-9
    radicand_guard: float = 1e-12
    singular_guard: float = 1e-9
    bound_slack: float = 1e-10


PROFILES = {
    "default": Tolerances(),
    "strict": Tolerances(rel_equality=1e-10, residual=1e-13, real_root=1e-11,
                         radicand_guard=1e-14, bound_slack=1e-12),
    "loose": Tolerances(rel_equality=1e-6, residual=1e-10, real_root=1e-7,
                        radicand_guard=1e-10, bound_slack=1e-8),
}


def from_env() -> Tolerances:
    """Tolerance profile selected by the ANBEAM_TOLERANCE_PROFILE env var."""
    name = os.environ.get(ENV_PROFILE, "default")
    try:
        return PROFILES[name]
    except KeyError:
        raise ValueError(f"unknown tolerance profile {name!r}; "
                         f"choose from {sorted(PROFILES)}") from None
