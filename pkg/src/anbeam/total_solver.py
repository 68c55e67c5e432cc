"""Closed-form beamforming under a single total second-phase power cap.

Maximizing the destination SINR subject to w' D w <= P_tot is a generalized
Rayleigh quotient in disguise: substituting the power constraint (tight at the
optimum) turns the objective into |h^T w|^2 / (w' (D/P_tot + D_h) w), whose
maximizer for the rank-1 numerator is w* = mu * D_tilde^{-1} conj(h) scaled
back onto the power boundary.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from .errors import DegenerateAlpha
from .model import capacity_dest, derive_model, resolve_alpha, second_phase_power
from .types import (
    BeamSolution,
    DerivedModel,
    NetworkInstance,
    SystemParams,
    TotalBudget,
    TotalSolveDiagnostics,
)


def dense_power_matrix(derived: DerivedModel) -> np.ndarray:
    """Assemble D = blockdiag(alpha*p1, diag(T) + (1-alpha)*p1*conj(g)g^T)."""
    m = derived.m
    d = np.zeros((m + 1, m + 1), dtype=complex)
    d[0, 0] = derived.alpha * derived.p1
    if m:
        d[1:, 1:] = ((1.0 - derived.alpha) * derived.p1
                     * np.outer(np.conj(derived.g), derived.g)
                     + np.diag(derived.t_diag))
    return d


def build_d_tilde(derived: DerivedModel, p_tot: float) -> np.ndarray:
    """D_tilde = D/P_tot + D_h, the Hermitian positive definite denominator of
    the substituted Rayleigh quotient.

    Definiteness needs alpha > 0: the source row of D_h is zero, so with
    alpha = 0 the first row/column of D_tilde vanishes entirely.
    """
    if derived.alpha <= 0.0:
        raise DegenerateAlpha("alpha=0 leaves D_tilde singular in the source coordinate")
    if p_tot <= 0.0:
        raise ValueError("p_tot must be positive")
    return dense_power_matrix(derived) / p_tot + np.diag(derived.d_h_diag)


def solve_total(instance: NetworkInstance, params: SystemParams,
                alpha: Optional[float] = None) -> BeamSolution:
    """Optimal weights under the total budget; alpha from params.gamma unless
    given explicitly.

    w* = mu * v with v = D_tilde^{-1} conj(h) and mu chosen so the power
    constraint holds with equality; the achieved SINR ratio equals the
    Rayleigh value h^T v.  The returned w is rotated so the beam gain h^T w
    is real nonnegative (the objective is blind to a global phase).
    """
    budget = params.budget
    if not isinstance(budget, TotalBudget):
        raise TypeError("solve_total requires a TotalBudget")
    a = resolve_alpha(instance, params.p1, params.gamma, alpha)
    derived = derive_model(instance, params.p1, a)
    d_tilde = build_d_tilde(derived, budget.p_tot)
    h_bar = np.conj(derived.h)
    v = np.linalg.solve(d_tilde, h_bar)
    d = dense_power_matrix(derived)
    mu = float(np.sqrt(budget.p_tot / np.real(np.conj(v) @ d @ v)))
    w = mu * v
    b = np.dot(derived.h, w)
    if abs(b) > 0:
        w = w * (np.conj(b) / abs(b))
    rayleigh = float(np.real(np.dot(derived.h, v)))
    return BeamSolution(
        w=w,
        alpha=a,
        c_d=capacity_dest(instance, params.p1, a, w),
        second_phase_power=second_phase_power(instance, params.p1, a, w),
        diagnostics=TotalSolveDiagnostics(v=v, mu=mu, rayleigh_value=rayleigh),
    )
