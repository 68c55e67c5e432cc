"""Channel-derived quantities, SNR/capacity formulas and signal propagation.

Conventions used throughout:

* Capacities are in bits per channel use with a 1/2 pre-log (the protocol
  spends two phases per message symbol); logs are base 2.
* The destination combines the two phases by maximum ratio combining, so the
  two SINRs add inside the log.
* Complex Gaussian CN(0, v) means independent real/imaginary parts, each
  N(0, v/2).
* The beam gain is the plain (unconjugated) product h^T w of combined channel
  gains and weights, matching the physical received coefficient of the
  message symbol.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from .errors import DegenerateAlpha, NoRelays, InfeasibleThreshold, SingularObservation
from .tolerances import Tolerances, from_env
from .types import (
    Budget,
    DerivedModel,
    IndividualBudget,
    NetworkInstance,
    SignalRealization,
)


def strongest_relay(instance: NetworkInstance) -> int:
    """Index of the relay with the largest source-side gain |h_si|^2.

    Ties break toward the lowest index. This relay bounds every relay's SNR
    from above for any power split, so the threshold constraint only needs to
    be enforced there.
    """
    if instance.m == 0:
        raise NoRelays("strongest_relay requires at least one relay")
    return int(np.argmax(np.abs(instance.h_sr) ** 2))


def alpha_for_threshold(instance: NetworkInstance, p1: float, gamma: float) -> float:
    """Message-power fraction alpha that puts the strongest relay exactly at
    SNR gamma.

    alpha = (1 + sigma2/(|h_se|^2 p1)) / (1 + 1/gamma).  Raising alpha above
    this value would push the strongest relay past the threshold; lowering it
    only wastes destination SNR, so the solvers pin alpha here.
    """
    e = strongest_relay(instance)
    gain2 = abs(instance.h_sr[e]) ** 2
    ceiling = gain2 * p1 / instance.sigma2
    if gamma > ceiling:
        raise InfeasibleThreshold(
            f"gamma={gamma:g} exceeds the strongest relay's full-power SNR "
            f"{ceiling:g}; no alpha <= 1 can reach it")
    return (1.0 + instance.sigma2 / (gain2 * p1)) / (1.0 + 1.0 / gamma)


def relay_snr(instance: NetworkInstance, p1: float, alpha: float, i: int) -> float:
    """First-phase SNR at relay i: the artificial noise acts as interference.

    Gamma_i = |h_si|^2 alpha p1 / (sigma2 + |h_si|^2 (1-alpha) p1).
    """
    gain2 = abs(instance.h_sr[i]) ** 2
    return gain2 * alpha * p1 / (instance.sigma2 + gain2 * (1.0 - alpha) * p1)


def relay_snrs(instance: NetworkInstance, p1: float, alpha: float) -> np.ndarray:
    """Vector of relay_snr over all relays."""
    gain2 = np.abs(instance.h_sr) ** 2
    return gain2 * alpha * p1 / (instance.sigma2 + gain2 * (1.0 - alpha) * p1)


def capacity_relay(instance: NetworkInstance, p1: float, alpha: float, i: int) -> float:
    return 0.5 * math.log2(1.0 + relay_snr(instance, p1, alpha, i))


def direct_sinr(instance: NetworkInstance, p1: float, alpha: float) -> float:
    """First-phase destination SINR on the direct link, artificial noise
    counted as interference."""
    gain2 = abs(instance.h_sd) ** 2
    return gain2 * alpha * p1 / (instance.sigma2 + gain2 * (1.0 - alpha) * p1)


def combined_gains(instance: NetworkInstance) -> np.ndarray:
    """Length-(M+1) vector [h_sd, h_s1*h_1d, ..., h_sM*h_Md] of end-to-end
    gains seen by the second-phase weights."""
    return np.concatenate(([instance.h_sd], instance.h_sr * instance.h_rd))


def noise_amp_diag(instance: NetworkInstance) -> np.ndarray:
    """Diagonal [0, |h_1d|^2, ...]: how relay weights amplify relay noise at
    the destination (the source's own weight forwards no receiver noise)."""
    return np.concatenate(([0.0], np.abs(instance.h_rd) ** 2))


def beam_sinr(instance: NetworkInstance, p1: float, alpha: float, w: np.ndarray) -> float:
    """Second-phase destination SINR for weights w.

    alpha p1 |h^T w|^2 / (sigma2 (1 + sum_i |w_i|^2 |h_id|^2)).  The
    artificial noise does not appear: the source's second-phase signal cancels
    the forwarded copies exactly.
    """
    w = np.asarray(w, dtype=complex)
    b = np.dot(combined_gains(instance), w)
    dh = noise_amp_diag(instance)
    return float(alpha * p1 * abs(b) ** 2
                 / (instance.sigma2 * (1.0 + np.sum(dh * np.abs(w) ** 2))))


def capacity_dest(instance: NetworkInstance, p1: float, alpha: float, w: np.ndarray) -> float:
    """Destination capacity with MRC over the direct phase-1 reception and the
    beamformed phase-2 reception."""
    return 0.5 * math.log2(1.0 + direct_sinr(instance, p1, alpha)
                           + beam_sinr(instance, p1, alpha, w))


def secrecy_rate(instance: NetworkInstance, p1: float, alpha: float, w: np.ndarray) -> float:
    """C_d minus the best relay's capacity; negative values mean no secrecy.

    The minimum of C_d - C_i over relays is attained at the strongest relay,
    so only that one is evaluated.
    """
    e = strongest_relay(instance)
    return capacity_dest(instance, p1, alpha, w) - capacity_relay(instance, p1, alpha, e)


def alpha_monotonicity_threshold(instance: NetworkInstance, p1: float,
                                 tol: Optional[Tolerances] = None) -> float:
    """Threshold on the normalized beam factor above which the secrecy rate is
    nondecreasing in alpha.

    With rho_j = sigma2/(|h_sj|^2 p1) + 1 for j in {destination, strongest
    relay}, the threshold is (rho_d - rho_e) rho_d / ((rho_d - 1)^2 (rho_e - 2)).
    The companion predicate compares f(w) = |h^T w|^2 p1 / (sigma2 (1 + w' D_h w))
    against it.  The condition is sufficient only when rho_e > 2 (noisy relay
    link); no claim is made for rho_e < 2, and rho_e = 2 is rejected outright.
    """
    tol = tol or from_env()
    e = strongest_relay(instance)
    rho_d = instance.sigma2 / (abs(instance.h_sd) ** 2 * p1) + 1.0
    rho_e = instance.sigma2 / (abs(instance.h_sr[e]) ** 2 * p1) + 1.0
    if abs(rho_e - 2.0) < tol.singular_guard:
        raise SingularObservation(
            f"rho_e = {rho_e!r} is at the excluded value 2; the threshold is undefined")
    return (rho_d - rho_e) * rho_d / ((rho_d - 1.0) ** 2 * (rho_e - 2.0))


def secrecy_monotone_in_alpha(instance: NetworkInstance, p1: float, w: np.ndarray,
                              tol: Optional[Tolerances] = None) -> bool:
    """True when the fixed-w beam factor clears alpha_monotonicity_threshold,
    i.e. the sufficient condition for d(secrecy)/d(alpha) >= 0 holds."""
    w = np.asarray(w, dtype=complex)
    b = np.dot(combined_gains(instance), w)
    dh = noise_amp_diag(instance)
    f = abs(b) ** 2 * p1 / (instance.sigma2 * (1.0 + float(np.sum(dh * np.abs(w) ** 2))))
    return f >= alpha_monotonicity_threshold(instance, p1, tol)


def cancellation_gains(instance: NetworkInstance) -> np.ndarray:
    """g_i = h_si h_id / h_sd: per-relay coefficient the source needs in its
    second-phase transmission so the forwarded artificial noise cancels."""
    return instance.h_sr * instance.h_rd / instance.h_sd


def relay_input_powers(instance: NetworkInstance, p1: float) -> np.ndarray:
    """Expected received power at each relay, |h_si|^2 p1 + sigma2 — the factor
    a relay weight multiplies when spending transmit power."""
    return np.abs(instance.h_sr) ** 2 * p1 + instance.sigma2


def power_matrix(instance: NetworkInstance, p1: float, alpha: float) -> np.ndarray:
    """Hermitian PSD matrix D with second-phase transmit power = w' D w.

    Block structure: D[0,0] = alpha p1 (source message weight); the relay
    block is diag(|h_si|^2 p1 + sigma2) plus the rank-1 term
    (1-alpha) p1 conj(g) g^T from the source's cancellation signal.
    """
    m = instance.m
    g = cancellation_gains(instance)
    d = np.zeros((m + 1, m + 1), dtype=complex)
    d[0, 0] = alpha * p1
    if m:
        d[1:, 1:] = ((1.0 - alpha) * p1 * np.outer(np.conj(g), g)
                     + np.diag(relay_input_powers(instance, p1)))
    return d


def second_phase_power(instance: NetworkInstance, p1: float, alpha: float,
                       w: np.ndarray) -> float:
    """Total transmit power spent in the second phase by source and relays.

    alpha p1 |w_0|^2 + (1-alpha) p1 |sum_i g_i w_i|^2
    + sum_i (|h_si|^2 p1 + sigma2) |w_i|^2.
    """
    w = np.asarray(w, dtype=complex)
    g = cancellation_gains(instance)
    source = alpha * p1 * abs(w[0]) ** 2
    if instance.m:
        source += (1.0 - alpha) * p1 * abs(np.dot(g, w[1:])) ** 2
        relays = float(np.sum(relay_input_powers(instance, p1) * np.abs(w[1:]) ** 2))
    else:
        relays = 0.0
    return float(source + relays)


def derive_model(instance: NetworkInstance, p1: float, alpha: float,
                 budget: Optional[Budget] = None) -> DerivedModel:
    """Bundle every vector the solvers need for one (instance, p1, alpha).

    With an IndividualBudget, also computes the per-relay amplitude caps and
    the eta constants of the magnitude problem:

    * u_max,i = |h_id| sqrt(P_i / (|h_si|^2 p1 + sigma2)) — the cap on the
      effective amplitude u_i = |w_i h_id| implied by relay i's power cap.
      (The |h_id| factor is required by that change of variables.)
    * eta1 = P_s/(alpha p1), eta2 = (1-alpha)/(alpha c1^2), eta3 = 1+eta2 c1^2.
    """
    extras = {}
    if isinstance(budget, IndividualBudget):
        if not 0.0 < alpha <= 1.0:
            raise DegenerateAlpha(
                f"alpha={alpha!r}: the individual-budget constants divide by alpha")
        if len(budget.p_i) != instance.m:
            raise ValueError("budget.p_i length must equal the relay count")
        c1 = abs(instance.h_sd)
        extras = dict(
            u_max=np.abs(instance.h_rd)
            * np.sqrt(budget.p_i / relay_input_powers(instance, p1)),
            eta1=budget.p_s / (alpha * p1),
            eta2=(1.0 - alpha) / (alpha * c1 ** 2),
        )
        extras["eta3"] = 1.0 + extras["eta2"] * c1 ** 2
    return DerivedModel(
        alpha=alpha,
        p1=p1,
        sigma2=instance.sigma2,
        h=combined_gains(instance),
        g=cancellation_gains(instance),
        c=np.concatenate(([abs(instance.h_sd)], np.abs(instance.h_sr))),
        d_h_diag=noise_amp_diag(instance),
        t_diag=relay_input_powers(instance, p1),
        **extras,
    )


def resolve_alpha(instance: NetworkInstance, p1: float, gamma: Optional[float],
                  alpha: Optional[float]) -> float:
    """Pick the power split: an explicit alpha wins, otherwise derive it from
    the relay SNR threshold gamma."""
    if alpha is not None:
        if not 0.0 <= alpha <= 1.0:
            raise ValueError(f"alpha={alpha!r} outside [0, 1]")
        return float(alpha)
    if gamma is None:
        raise ValueError("either alpha or gamma must be given")
    return alpha_for_threshold(instance, p1, gamma)


# ---------------------------------------------------------------------------
# Signal-level propagation (used by the simulation oracles)

def first_phase_tx(p1: float, alpha: float, realization: SignalRealization) -> complex:
    """Source's phase-1 signal: message plus artificial noise."""
    return (math.sqrt(alpha * p1) * realization.x
            + math.sqrt((1.0 - alpha) * p1) * realization.u)


def second_phase_source_tx(instance: NetworkInstance, p1: float, alpha: float,
                           w: np.ndarray, realization: SignalRealization) -> complex:
    """Source's phase-2 signal: its own beam share of the message minus the
    term that cancels the relays' forwarded artificial noise."""
    g = cancellation_gains(instance)
    cancel = np.dot(g, np.asarray(w, dtype=complex)[1:]) if instance.m else 0.0
    return (math.sqrt(alpha * p1) * w[0] * realization.x
            - math.sqrt((1.0 - alpha) * p1) * cancel * realization.u)


def destination_phase2_rx(instance: NetworkInstance, p1: float, alpha: float,
                          w: np.ndarray, realization: SignalRealization) -> complex:
    """Destination's phase-2 reception: direct path from the source plus every
    relay forwarding its noisy phase-1 reception, plus local noise z[-1]."""
    w = np.asarray(w, dtype=complex)
    s1 = first_phase_tx(p1, alpha, realization)
    relay_rx = instance.h_sr * s1 + realization.z[:instance.m]
    relay_contrib = np.dot(instance.h_rd, w[1:] * relay_rx) if instance.m else 0.0
    direct = instance.h_sd * second_phase_source_tx(instance, p1, alpha, w, realization)
    return complex(direct + relay_contrib + realization.z[-1])


def simulate_noise_residual(instance: NetworkInstance, p1: float, alpha: float,
                            w: np.ndarray, realization: SignalRealization) -> complex:
    """Coefficient multiplying the artificial-noise symbol u in the
    destination's phase-2 reception, measured by actually propagating the
    realization through both phases.

    By construction the relays' forwarded noise and the source's cancellation
    term are equal and opposite, so the result is zero up to floating
    rounding.  The residual is extracted by differencing the propagation
    against a u=0 copy of the same realization (falling back to the direct
    linear coefficient when u = 0), so genuine cancellation error shows up
    rather than an algebraic identity.
    """
    w = np.asarray(w, dtype=complex)
    if realization.u != 0:
        zeroed = SignalRealization(x=realization.x, u=0.0, z=realization.z)
        full = destination_phase2_rx(instance, p1, alpha, w, realization)
        base = destination_phase2_rx(instance, p1, alpha, w, zeroed)
        return complex((full - base) / realization.u)
    an = math.sqrt((1.0 - alpha) * p1)
    forwarded = np.dot(instance.h_rd * instance.h_sr, w[1:]) if instance.m else 0.0
    cancel = np.dot(cancellation_gains(instance), w[1:]) if instance.m else 0.0
    return complex(an * forwarded - an * instance.h_sd * cancel)


def noise_residual_scale(instance: NetworkInstance, p1: float, alpha: float,
                         w: np.ndarray) -> float:
    """Natural magnitude scale of the two cancelling u-terms, for judging a
    residual 'small': sqrt((1-alpha) p1) sum_i |w_i h_si h_id|."""
    w = np.asarray(w, dtype=complex)
    if instance.m == 0:
        return 0.0
    return float(math.sqrt((1.0 - alpha) * p1)
                 * np.sum(np.abs(w[1:] * instance.h_sr * instance.h_rd)))
