"""Domain types: channel realizations, power budgets, derived quantities, solutions.

All types are immutable after construction (arrays are marked read-only), so
values can be shared freely across threads and processes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

# Direct source->destination gains below this magnitude are rejected: the
# second-phase cancellation signal divides by h_sd.
EPS_GAIN = 1e-9


def _frozen_array(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


def _set(obj, name, value):
    object.__setattr__(obj, name, value)


@dataclass(frozen=True, eq=False)
class NetworkInstance:
    """One channel realization of the two-hop network.

    h_sd: complex source->destination gain.
    h_sr: complex source->relay gains, one per relay.
    h_rd: complex relay->destination gains, one per relay.
    sigma2: receiver noise power, identical at every node.
    """

    h_sd: complex
    h_sr: np.ndarray
    h_rd: np.ndarray
    sigma2: float

    def __post_init__(self):
        _set(self, "h_sd", complex(self.h_sd))
        _set(self, "h_sr", _frozen_array(self.h_sr, complex))
        _set(self, "h_rd", _frozen_array(self.h_rd, complex))
        _set(self, "sigma2", float(self.sigma2))
        if self.h_sr.ndim != 1 or self.h_rd.ndim != 1:
            raise ValueError("h_sr and h_rd must be one-dimensional")
        if len(self.h_sr) != len(self.h_rd):
            raise ValueError("h_sr and h_rd must have the same length")
        if self.sigma2 <= 0:
            raise ValueError("sigma2 must be positive")
        if abs(self.h_sd) < EPS_GAIN:
            raise ValueError(f"|h_sd| < {EPS_GAIN:g}: direct gain too small to "
                             "divide by in the cancellation signal")

    @property
    def m(self) -> int:
        """Number of relays."""
        return len(self.h_sr)


@dataclass(frozen=True)
class TotalBudget:
    """Single cap on the summed second-phase transmit power."""

    p_tot: float

    def __post_init__(self):
        _set(self, "p_tot", float(self.p_tot))
        if self.p_tot <= 0:
            raise ValueError("p_tot must be positive")


@dataclass(frozen=True, eq=False)
class IndividualBudget:
    """Separate source cap p_s and per-relay caps p_i for the second phase."""

    p_s: float
    p_i: np.ndarray

    def __post_init__(self):
        _set(self, "p_s", float(self.p_s))
        _set(self, "p_i", _frozen_array(self.p_i, float))
        if self.p_s <= 0:
            raise ValueError("p_s must be positive")
        if self.p_i.ndim != 1 or np.any(self.p_i < 0):
            raise ValueError("p_i must be a vector of nonnegative reals")


Budget = Union[TotalBudget, IndividualBudget]


@dataclass(frozen=True, eq=False)
class SystemParams:
    """First-phase power, relay SNR ceiling and the second-phase budget.

    gamma may be None when the power split alpha is supplied explicitly to a
    solver; when present it must be positive, and the feasibility bound
    gamma <= |h_se|^2 * p1 / sigma2 is checked at solve time.
    """

    p1: float
    gamma: Optional[float]
    budget: Budget

    def __post_init__(self):
        _set(self, "p1", float(self.p1))
        if self.p1 <= 0:
            raise ValueError("p1 must be positive")
        if self.gamma is not None:
            _set(self, "gamma", float(self.gamma))
            if self.gamma <= 0:
                raise ValueError("gamma must be positive when given")


@dataclass(frozen=True, eq=False)
class DerivedModel:
    """Precomputed vectors for one (instance, p1, alpha) triple.

    h: length-(M+1) combined gains [h_sd, h_s1*h_1d, ...] seen by the
       second-phase beam at the destination.
    g: length-M cancellation gains h_si*h_id/h_sd.
    c: length-(M+1) magnitudes [|h_sd|, |h_s1|, ..., |h_sM|].
    d_h_diag: relay-noise amplification diagonal [0, |h_1d|^2, ...].
    t_diag: per-relay received power |h_si|^2 * p1 + sigma2.
    u_max: per-relay cap on |w_i * h_id| implied by the individual budget
        (None for a total budget).
    eta1, eta2, eta3: individual-budget solve constants (None for total):
        eta1 = p_s/(alpha*p1), eta2 = (1-alpha)/(alpha*c[0]^2),
        eta3 = 1 + eta2*c[0]^2.
    """

    alpha: float
    p1: float
    sigma2: float
    h: np.ndarray
    g: np.ndarray
    c: np.ndarray
    d_h_diag: np.ndarray
    t_diag: np.ndarray
    u_max: Optional[np.ndarray] = None
    eta1: Optional[float] = None
    eta2: Optional[float] = None
    eta3: Optional[float] = None

    def __post_init__(self):
        for name, dtype in (("h", complex), ("g", complex), ("c", float),
                            ("d_h_diag", float), ("t_diag", float)):
            _set(self, name, _frozen_array(getattr(self, name), dtype))
        if self.u_max is not None:
            _set(self, "u_max", _frozen_array(self.u_max, float))

    @property
    def m(self) -> int:
        return len(self.g)


@dataclass(frozen=True, eq=False)
class SignalRealization:
    """One draw of the random signals: message x, artificial noise u, and the
    M+1 receiver noises z (relays first, destination last)."""

    x: complex
    u: complex
    z: np.ndarray

    def __post_init__(self):
        _set(self, "x", complex(self.x))
        _set(self, "u", complex(self.u))
        _set(self, "z", _frozen_array(self.z, complex))


@dataclass(frozen=True, eq=False)
class TotalSolveDiagnostics:
    """Byproducts of the closed-form total-budget solve."""

    v: np.ndarray          # unnormalized direction solving D_tilde v = conj(h)
    mu: float              # scaling putting mu*v on the power boundary
    rayleigh_value: float  # achieved ratio |h.w|^2 / (1 + w' D_h w)

    def __post_init__(self):
        _set(self, "v", _frozen_array(self.v, complex))


@dataclass(frozen=True)
class IndividualSolveDiagnostics:
    """State of the clamping loop at termination."""

    clamped: tuple = ()           # relay indices fixed at their amplitude caps
    iterations: int = 1
    chosen_r: float = 0.0         # active-subvector norm picked in the last re-solve
    root_candidates: tuple = ()   # (r, objective) pairs examined in the last re-solve


@dataclass(frozen=True, eq=False)
class BeamSolution:
    """Optimal weights plus the quantities callers typically inspect."""

    w: np.ndarray
    alpha: float
    c_d: float
    second_phase_power: float
    diagnostics: Union[TotalSolveDiagnostics, IndividualSolveDiagnostics, None] = None

    def __post_init__(self):
        _set(self, "w", _frozen_array(self.w, complex))
