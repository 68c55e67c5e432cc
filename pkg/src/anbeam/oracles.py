"""Independent numerical verifiers for the analytic solvers.

Everything here is deliberately brute-force: random sampling plus projected
coordinate ascent for the total-budget problem, dense grids for small
individually-constrained problems, golden-section search for one-dimensional
reductions, power iteration for the rank-1 eigen identity, and signal-level
Monte Carlo for the SNR formulas.  Oracles are slow by design and never used
in the production solve path.

Oracle randomness lives in its own seed namespace so oracle draws can never
collide with experiment-harness draws.  Sampling work is split into
fixed-size chunks keyed by chunk index, so results are identical for any
worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from .errors import OracleEvalError, OracleTooLarge
from .individual_solver import optimal_phases, solve_individual
from .model import capacity_dest, derive_model, direct_sinr, resolve_alpha
from .tolerances import Tolerances
from .total_solver import dense_power_matrix, solve_total
from .types import IndividualBudget, NetworkInstance, SystemParams, TotalBudget

# Seed-sequence entropy tag for all oracle RNG streams.
ORACLE_NAMESPACE = 0xC0FFEE

_SAMPLE_CHUNK = 4096
_SYMBOL_CHUNK = 1 << 17


def _oracle_rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(ORACLE_NAMESPACE,
                                                        spawn_key=(seed, *key)))


@dataclass(frozen=True)
class OracleReport:
    """Comparison of an analytic solution against a brute-force verifier.

    gap = analytic_value - oracle_value; for maximization problems a gap
    below -tolerance means the closed form lost to brute force, which is the
    failure the oracles exist to catch.
    """

    analytic_value: float
    oracle_value: float
    gap: float
    argmax_distance: float
    samples_or_evals: int


@dataclass(frozen=True)
class GoldenResult:
    x: float
    value: float
    iterations: int
    evals: int


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section(f: Callable[[float], float], lo: float, hi: float,
                   tol: float = 1e-10, max_iter: int = 200) -> GoldenResult:
    """Golden-section maximization of a unimodal f on [lo, hi].

    The bracket shrinks by the golden ratio each iteration, so the iteration
    count is ~ log((hi-lo)/tol) / log(1/invphi).  For non-unimodal f the
    result is still the best of the interior search and both endpoints.
    """
    if not lo < hi:
        raise ValueError("need lo < hi")

    evals = 0

    def fx(x: float) -> float:
        nonlocal evals
        evals += 1
        v = f(x)
        if math.isnan(v):
            raise OracleEvalError(f"objective returned NaN at {x!r}")
        return v

    a, b = float(lo), float(hi)
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = fx(c), fx(d)
    iterations = 0
    while (b - a) > tol and iterations < max_iter:
        iterations += 1
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = fx(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = fx(d)
    candidates = [(0.5 * (a + b), fx(0.5 * (a + b))), (lo, fx(lo)), (hi, fx(hi))]
    x, value = max(candidates, key=lambda t: t[1])
    return GoldenResult(float(x), float(value), iterations, evals)


# ---------------------------------------------------------------------------
# Total-budget oracle: random boundary sampling + projected coordinate ascent


def _cd_batch(instance: NetworkInstance, p1: float, alpha: float,
              w_batch: np.ndarray) -> np.ndarray:
    """capacity_dest for a batch of weight vectors (rows of w_batch)."""
    h = np.concatenate(([instance.h_sd], instance.h_sr * instance.h_rd))
    dh = np.concatenate(([0.0], np.abs(instance.h_rd) ** 2))
    b = w_batch @ h
    den = 1.0 + np.abs(w_batch) ** 2 @ dh
    snr2 = alpha * p1 * np.abs(b) ** 2 / (instance.sigma2 * den)
    return 0.5 * np.log2(1.0 + direct_sinr(instance, p1, alpha) + snr2)


def _total_chunk(instance: NetworkInstance, p1: float, alpha: float,
                 p_tot: float, d: np.ndarray, n: int, seed: int,
                 chunk_index: int) -> Tuple[float, np.ndarray]:
    """Best C_d among n random directions scaled to the power boundary."""
    rng = _oracle_rng(seed, chunk_index)
    m1 = instance.m + 1
    w = rng.normal(size=(n, m1)) + 1j * rng.normal(size=(n, m1))
    power = np.real(np.einsum("ni,ij,nj->n", np.conj(w), d, w))
    w *= np.sqrt(p_tot / power)[:, None]
    values = _cd_batch(instance, p1, alpha, w)
    best = int(np.argmax(values))
    return float(values[best]), w[best]


def _projected_ascent(instance: NetworkInstance, p1: float, alpha: float,
                      d: np.ndarray, p_tot: float, w0: np.ndarray,
                      max_sweeps: int = 200, min_step: float = 1e-7,
                      ) -> Tuple[float, np.ndarray, int]:
    """Greedy coordinate ascent on the power boundary w' D w = p_tot."""
    w = w0.copy()
    best = float(_cd_batch(instance, p1, alpha, w[None, :])[0])
    evals = 1
    step = 0.3
    sweeps = 0
    while step > min_step and sweeps < max_sweeps:
        sweeps += 1
        improved = False
        for k in range(len(w)):
            trial = np.repeat(w[None, :], 4, axis=0)
            trial[:, k] += np.array([step, -step, 1j * step, -1j * step])
            power = np.real(np.einsum("ni,ij,nj->n", np.conj(trial), d, trial))
            ok = power > 0
            if not np.any(ok):
                continue
            trial = trial[ok] * np.sqrt(p_tot / power[ok])[:, None]
            values = _cd_batch(instance, p1, alpha, trial)
            evals += len(values)
            j = int(np.argmax(values))
            if values[j] > best:
                best, w, improved = float(values[j]), trial[j], True
        if not improved:
            step *= 0.5
    return best, w, evals


def oracle_total(instance: NetworkInstance, params: SystemParams,
                 n_samples: int, *, alpha: Optional[float] = None,
                 seed: int = 0, workers: int = 1,
                 ascent_sweeps: int = 200,
                 ascent_min_step: float = 1e-7) -> OracleReport:
    """Brute-force check of solve_total: sample the power boundary, refine the
    best sample by projected coordinate ascent, compare C_d values."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if not isinstance(params.budget, TotalBudget):
        raise TypeError("oracle_total requires a TotalBudget")
    a = resolve_alpha(instance, params.p1, params.gamma, alpha)
    derived = derive_model(instance, params.p1, a)
    d = dense_power_matrix(derived)
    p_tot = params.budget.p_tot

    n_chunks = (n_samples + _SAMPLE_CHUNK - 1) // _SAMPLE_CHUNK
    sizes = [min(_SAMPLE_CHUNK, n_samples - i * _SAMPLE_CHUNK) for i in range(n_chunks)]
    args = [(instance, params.p1, a, p_tot, d, sizes[i], seed, i)
            for i in range(n_chunks)]
    if workers > 1 and n_chunks > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_total_chunk_star, args))
    else:
        results = [_total_chunk(*arg) for arg in args]
    best_cd, best_w = max(results, key=lambda t: t[0])
    best_cd, best_w, ascent_evals = _projected_ascent(
        instance, params.p1, a, d, p_tot, best_w,
        max_sweeps=ascent_sweeps, min_step=ascent_min_step)

    solution = solve_total(instance, params, alpha=a)
    # weights are compared up to the global phase the objective ignores
    cross = abs(np.vdot(solution.w, best_w))
    dist = math.sqrt(max(
        float(np.vdot(best_w, best_w).real + np.vdot(solution.w, solution.w).real)
        - 2.0 * cross, 0.0))
    return OracleReport(
        analytic_value=solution.c_d,
        oracle_value=best_cd,
        gap=solution.c_d - best_cd,
        argmax_distance=dist,
        samples_or_evals=n_samples + ascent_evals,
    )


def _total_chunk_star(arg):
    return _total_chunk(*arg)


def power_iteration_rank1(d_tilde: np.ndarray, h_bar: np.ndarray,
                          tol: float = 1e-12, max_iter: int = 100,
                          ) -> Tuple[float, int]:
    """Dominant eigenvalue of D_tilde^{-1} h_bar h_bar' by power iteration.

    The operator has rank one, so the iteration lands on the eigenvector in a
    single application; the return value should match the Rayleigh value
    h_bar' D_tilde^{-1} h_bar of the closed-form solve.
    """
    x = h_bar / np.linalg.norm(h_bar)
    value = 0.0
    for iteration in range(1, max_iter + 1):
        y = np.linalg.solve(d_tilde, h_bar * np.vdot(h_bar, x))
        norm = np.linalg.norm(y)
        if norm == 0:
            return 0.0, iteration
        y = y / norm
        new_value = float(np.real(np.vdot(y, np.linalg.solve(d_tilde, h_bar)
                                          * np.vdot(h_bar, y))))
        if abs(new_value - value) <= tol * max(1.0, abs(new_value)):
            return new_value, iteration
        x, value = y, new_value
    return value, max_iter


# ---------------------------------------------------------------------------
# Individual-budget oracle: dense grid with local refinement

_GRID_MAX_RELAYS = 3


def oracle_individual_grid(instance: NetworkInstance, params: SystemParams,
                           *, alpha: Optional[float] = None,
                           grid_step: float = 1e-3,
                           tol: Optional[Tolerances] = None) -> OracleReport:
    """Brute-force check of solve_individual on the box of relay amplitudes.

    Exhaustive grid over [0, u_max,1] x ... x [0, u_max,M] with the source
    amplitude taken from power equality wherever feasible, then repeated
    zoom-in refinement around the best cell until the cell size drops below
    grid_step relative to the search box.  Each axis is pre-clipped at the
    source-budget feasibility bound sqrt(eta1/eta2)/c_i so that generous
    relay caps do not inflate the box.  Guarded to M <= 3.
    """
    m = instance.m
    if m > _GRID_MAX_RELAYS:
        raise OracleTooLarge(f"grid oracle is limited to M <= {_GRID_MAX_RELAYS}, got {m}")
    if not isinstance(params.budget, IndividualBudget):
        raise TypeError("oracle_individual_grid requires an IndividualBudget")
    a = resolve_alpha(instance, params.p1, params.gamma, alpha)
    derived = derive_model(instance, params.p1, a, params.budget)
    c1 = derived.c[0]
    c2 = derived.c[1:]
    u_max = derived.u_max
    eta1, eta2 = derived.eta1, derived.eta2

    def batch_value(u_batch: np.ndarray) -> np.ndarray:
        total = u_batch @ c2
        rad = eta1 - eta2 * total ** 2
        feasible = rad >= 0
        u1 = np.sqrt(np.where(feasible, rad, 0.0))
        value = (c1 * u1 + total) ** 2 / (1.0 + np.sum(u_batch ** 2, axis=1))
        value[~feasible] = -np.inf
        return value

    solution = solve_individual(instance, params, alpha=a, tol=tol)
    u_analytic = np.abs(np.asarray(solution.w)[1:]) * np.abs(instance.h_rd)

    lo = np.zeros(m)
    hi = u_max.copy()
    if eta2 > 0:
        # beyond this the source has no power left for the message at all
        feas = math.sqrt(max(eta1, 0.0) / eta2) * (1.0 + 1e-9)
        positive = c2 > 0
        hi[positive] = np.minimum(hi[positive], feas / c2[positive])
    target = grid_step * max(float(np.max(hi, initial=0.0)), 1e-12)
    n = 41 if m >= 3 else 61
    evals = 0
    best_u = np.zeros(m)
    for _ in range(12):
        axes = [np.linspace(lo[i], hi[i], n) if hi[i] > lo[i] else np.array([lo[i]])
                for i in range(m)]
        mesh = np.meshgrid(*axes, indexing="ij")
        u_batch = np.stack([g.ravel() for g in mesh], axis=1) if m else np.zeros((1, 0))
        values = batch_value(u_batch)
        evals += len(values)
        best_u = u_batch[int(np.argmax(values))]
        span = np.array([(hi[i] - lo[i]) / (len(axes[i]) - 1) if len(axes[i]) > 1 else 0.0
                         for i in range(m)])
        if float(np.max(span, initial=0.0)) <= target:
            break
        lo = np.clip(best_u - 1.5 * span, 0.0, u_max)
        hi = np.clip(best_u + 1.5 * span, 0.0, u_max)
        n = 21

    # score the winning grid point through the same capacity formula as the solver
    phases = optimal_phases(instance)
    w = np.zeros(m + 1, dtype=complex)
    total = float(best_u @ c2)
    u1 = math.sqrt(max(eta1 - eta2 * total ** 2, 0.0))
    w[0] = u1 * np.exp(1j * phases[0])
    gains_rd = np.abs(instance.h_rd)
    nz = gains_rd > 0
    w[1:][nz] = best_u[nz] / gains_rd[nz] * np.exp(1j * phases[1:][nz])
    oracle_cd = capacity_dest(instance, params.p1, a, w)

    return OracleReport(
        analytic_value=solution.c_d,
        oracle_value=oracle_cd,
        gap=solution.c_d - oracle_cd,
        argmax_distance=float(np.linalg.norm(best_u - u_analytic)),
        samples_or_evals=evals,
    )


# ---------------------------------------------------------------------------
# Signal-level Monte Carlo


@dataclass(frozen=True)
class EmpiricalSnr:
    """Sample-average SINRs from propagating random symbols through both
    phases; u_leak_power is the measured artificial-noise power reaching the
    destination in phase 2 (should sit at the numerical floor)."""

    direct: float
    beam: float
    relays: np.ndarray
    u_leak_power: float
    n_symbols: int


def empirical_snr(instance: NetworkInstance, p1: float, alpha: float,
                  w: np.ndarray, n_symbols: int, seed: int = 0) -> EmpiricalSnr:
    """Monte Carlo estimate of the direct, beam and per-relay SINRs.

    Each symbol draws x, u ~ CN(0,1) and receiver noises ~ CN(0, sigma2):
    relay noises, the destination's phase-1 noise and its phase-2 noise.
    Estimates are ratios of sample-mean powers; their relative error is
    ~ sqrt(2 / n_symbols).
    """
    if n_symbols < 10_000:
        raise ValueError("n_symbols must be >= 10^4 for meaningful estimates")
    w = np.asarray(w, dtype=complex)
    m = instance.m
    amp_x = math.sqrt(alpha * p1)
    amp_u = math.sqrt((1.0 - alpha) * p1)
    g = instance.h_sr * instance.h_rd / instance.h_sd if m else np.zeros(0, complex)
    cancel = np.dot(g, w[1:]) if m else 0.0
    beam_coeff = amp_x * (w[0] * instance.h_sd + (np.dot(w[1:], instance.h_sr * instance.h_rd) if m else 0.0))

    relay_sig = np.zeros(m)
    relay_int = np.zeros(m)
    direct_sig = direct_int = 0.0
    beam_sig = beam_noise = leak = 0.0

    done = 0
    chunk_index = 0
    noise_sd = math.sqrt(instance.sigma2 / 2.0)
    while done < n_symbols:
        n = min(_SYMBOL_CHUNK, n_symbols - done)
        rng = _oracle_rng(seed, 0xE, chunk_index)
        chunk_index += 1

        def cn(count, scale):
            return scale * (rng.normal(size=count) + 1j * rng.normal(size=count))

        x = cn(n, math.sqrt(0.5))
        u = cn(n, math.sqrt(0.5))
        z_relay = cn((n, m), noise_sd) if m else np.zeros((n, 0), complex)
        z_d1 = cn(n, noise_sd)
        z_d2 = cn(n, noise_sd)

        s1 = amp_x * x + amp_u * u
        if m:
            relay_rx = np.outer(s1, instance.h_sr) + z_relay
            relay_sig += np.sum(np.abs(np.outer(amp_x * x, instance.h_sr)) ** 2, axis=0)
            relay_int += np.sum(np.abs(np.outer(amp_u * u, instance.h_sr) + z_relay) ** 2, axis=0)
        direct_sig += float(np.sum(np.abs(instance.h_sd * amp_x * x) ** 2))
        direct_int += float(np.sum(np.abs(instance.h_sd * amp_u * u + z_d1) ** 2))

        src2 = amp_x * w[0] * x - amp_u * cancel * u
        if m:
            y2 = instance.h_sd * src2 + (relay_rx * w[1:]) @ instance.h_rd + z_d2
            noise_part = z_relay @ (w[1:] * instance.h_rd) + z_d2
        else:
            y2 = instance.h_sd * src2 + z_d2
            noise_part = z_d2
        signal_part = beam_coeff * x
        u_part = y2 - signal_part - noise_part
        beam_sig += float(np.sum(np.abs(signal_part) ** 2))
        beam_noise += float(np.sum(np.abs(noise_part) ** 2))
        leak += float(np.sum(np.abs(u_part) ** 2))
        done += n

    return EmpiricalSnr(
        direct=direct_sig / direct_int,
        beam=beam_sig / beam_noise,
        relays=relay_sig / relay_int if m else np.zeros(0),
        u_leak_power=leak / n_symbols,
        n_symbols=n_symbols,
    )
