"""Independent ground-truth generators.

The brute-force joint-probability path re-derives everything from direct
trace formulas on raw arrays: it shares no square-root, projector, or
branch-update helper with the measurement pipeline (a structural test
enforces this), so agreement between the two is informative. Extremal
searches recover the known inequality maxima by grid search plus local
refinement instead of trusting the tuned measurement settings.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import DimensionMismatch
from .evolve import LindbladSpec, amplitude_damping_channel, identity_channel, rk4_lindblad, unitary_channel
from .matcore import SIGMA_MINUS, SIGMA_X, SIGMA_Z, dagger
from .quantum import DensityMatrix, Observable, projective_povm, unsharp_povm
from .seqcorr import Scenario


@dataclass(frozen=True)
class OracleReport:
    """One analytic-vs-oracle comparison."""

    quantity: str
    analytic: float
    oracle: float
    abs_diff: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.abs_diff <= self.tolerance


# --------------------------------------------------------------------------
# Brute-force joint probabilities (no shared helpers with the pipeline)
# --------------------------------------------------------------------------

def _bf_sqrt_psd(mat: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(mat)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def _bf_sign_projectors(mat: np.ndarray) -> list[tuple[int, np.ndarray]]:
    w, v = np.linalg.eigh(mat)
    out = []
    for label in (+1, -1):
        cols = v[:, (w > 0) if label > 0 else (w < 0)]
        if cols.shape[1]:
            out.append((label, cols @ cols.conj().T))
    return out


def _bf_apply_kraus(mat: np.ndarray, kraus: Sequence[np.ndarray]) -> np.ndarray:
    out = np.zeros_like(mat)
    for k in kraus:
        out = out + k @ mat @ k.conj().T
    return out


def brute_force_joint(
    sc: Scenario,
    i: int,
    j: int,
    inter_override: Callable[[np.ndarray], np.ndarray] | None = None,
) -> dict[tuple[int, int], float]:
    """p(a, b) by exhaustive branch enumeration on unnormalized operators.

    Each branch stays unnormalized (its trace carries the probability), so
    p(a,b) = tr[P_b Lambda(sqrt(M_a) rho sqrt(M_a))] with no division and
    no zero-probability special case. `inter_override` substitutes a
    different propagation of the branch between the measurements (the RK4
    cross-check path).
    """
    povm, pre = sc.alice_settings[i]
    if povm.dim != sc.initial.dim:
        raise DimensionMismatch("scenario dimensions disagree")
    rho = _bf_apply_kraus(np.array(sc.initial.mat), pre.kraus)
    bob_projectors = _bf_sign_projectors(np.array(sc.bob_settings[j].mat))
    joint: dict[tuple[int, int], float] = {}
    for eff in povm.effects:
        root = _bf_sqrt_psd(np.array(eff.mat))
        branch = root @ rho @ root
        if inter_override is not None:
            branch = inter_override(branch)
        else:
            branch = _bf_apply_kraus(branch, sc.inter_channel.kraus)
        for b_label, proj in bob_projectors:
            joint[(eff.outcome_label, b_label)] = float(np.trace(proj @ branch).real)
    return joint


def brute_force_correlator(
    sc: Scenario,
    i: int,
    j: int,
    inter_override: Callable[[np.ndarray], np.ndarray] | None = None,
) -> float:
    joint = brute_force_joint(sc, i, j, inter_override=inter_override)
    return float(sum(a * b * p for (a, b), p in joint.items()))


def _bf_pair_correlator(theta_first: float, theta_second: float) -> float:
    """Sharp two-measurement correlator of rotated observables on the
    maximally mixed state, from raw trace formulas only."""
    rho = np.eye(2, dtype=complex) / 2.0
    total = 0.0
    for sa in (+1, -1):
        ma = 0.5 * (np.eye(2, dtype=complex)
                    + sa * (math.cos(theta_first) * SIGMA_Z + math.sin(theta_first) * SIGMA_X))
        branch = ma @ rho @ ma  # projective: sqrt(M) = M
        for sb in (+1, -1):
            mb = 0.5 * (np.eye(2, dtype=complex)
                        + sb * (math.cos(theta_second) * SIGMA_Z + math.sin(theta_second) * SIGMA_X))
            total += sa * sb * float(np.trace(mb @ branch).real)
    return total


# --------------------------------------------------------------------------
# Extremal searches
# --------------------------------------------------------------------------

def _objective_temporal_chsh(x: float) -> float:
    e11 = _bf_pair_correlator(3 * x, 2 * x)
    e12 = _bf_pair_correlator(3 * x, 4 * x)
    e21 = _bf_pair_correlator(x, 2 * x)
    e22 = _bf_pair_correlator(x, 4 * x)
    return abs(e11 + e12 + e21 - e22)


def _objective_chsh_steering(x: float) -> float:
    e11 = _bf_pair_correlator(x, 2 * x)
    e12 = _bf_pair_correlator(x, 4 * x)
    e21 = _bf_pair_correlator(3 * x, 2 * x)
    e22 = _bf_pair_correlator(3 * x, 4 * x)
    return math.hypot(e11 + e21, e12 + e22) + math.hypot(e11 - e21, e12 - e22)


def _objective_lg(n: int) -> Callable[[float], float]:
    def value(x: float) -> float:
        angles = [k * x for k in range(1, n + 1)]
        forward = sum(_bf_pair_correlator(angles[k], angles[k + 1]) for k in range(n - 1))
        return forward - _bf_pair_correlator(angles[0], angles[-1])

    return value


_NAMED_OBJECTIVES: dict[str, Callable[[float], float]] = {
    "temporal_chsh": _objective_temporal_chsh,
    "chsh_steering": _objective_chsh_steering,
    "k4": _objective_lg(4),
    "k5": _objective_lg(5),
    "k6": _objective_lg(6),
}

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_max(fn: Callable[[float], float], lo: float, hi: float, xtol: float) -> tuple[float, float]:
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > xtol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = fn(d)
    mid = 0.5 * (a + b)
    return mid, fn(mid)


def extremal_search(
    objective: str | Callable[..., float],
    grid_spec: Sequence[tuple[float, float, int]],
) -> tuple[np.ndarray, float]:
    """Argmax of an inequality value over a parameter box.

    `objective` is a named objective ('temporal_chsh', 'chsh_steering',
    'k4', 'k5', 'k6') or a callable of the scalar parameters. `grid_spec`
    gives (lo, hi, points) per parameter, at most three parameters with at
    least 200 points each. A coarse grid pass brackets the maximum; local
    golden-section refinement then pins each coordinate to 1e-6. Objectives
    here are smooth trigonometric polynomials, so the derivative-free
    two-stage search is deterministic and sufficient.
    """
    fn = _NAMED_OBJECTIVES[objective] if isinstance(objective, str) else objective
    boxes = [(float(lo), float(hi), int(points)) for lo, hi, points in grid_spec]
    if not 1 <= len(boxes) <= 3:
        raise ValueError("grid_spec must have between one and three parameters")
    for lo, hi, points in boxes:
        if points < 200:
            raise ValueError(f"need at least 200 grid points per parameter, got {points}")
        if not hi > lo:
            raise ValueError("empty parameter interval")
    axes = [np.linspace(lo, hi, points) for lo, hi, points in boxes]

    best_idx, best_val = None, -math.inf
    for idx in product(*(range(len(ax)) for ax in axes)):
        val = float(fn(*(ax[k] for ax, k in zip(axes, idx))))
        if val > best_val:
            best_idx, best_val = idx, val

    params = [float(ax[k]) for ax, k in zip(axes, best_idx)]
    rounds = 1 if len(boxes) == 1 else 3
    for _ in range(rounds):
        for dim, (ax, k) in enumerate(zip(axes, best_idx)):
            lo = float(ax[max(k - 1, 0)])
            hi = float(ax[min(k + 1, len(ax) - 1)])

            def along(x: float, dim: int = dim) -> float:
                trial = list(params)
                trial[dim] = x
                return float(fn(*trial))

            params[dim], best_val = _golden_max(along, lo, hi, 1e-6)
    return np.array(params), float(best_val)


# --------------------------------------------------------------------------
# Randomized equivalence suites
# --------------------------------------------------------------------------

def _random_density(rng: np.random.Generator, dim: int = 2) -> DensityMatrix:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    mat = g @ dagger(g)
    return DensityMatrix(mat / np.trace(mat).real)


def _random_axis(rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def _random_hermitian(rng: np.random.Generator, dim: int = 2) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return 0.5 * (g + dagger(g))


def _random_alice_setting(rng: np.random.Generator) -> tuple:
    axis = _random_axis(rng)
    n_sigma = axis[0] * SIGMA_X + axis[1] * np.array([[0, -1j], [1j, 0]], dtype=complex) + axis[2] * SIGMA_Z
    if rng.random() < 0.5:
        povm = projective_povm(Observable(n_sigma))
    else:
        povm = unsharp_povm(axis, float(rng.uniform(0.3, 1.0)))
    if rng.random() < 0.5:
        pre = identity_channel(2)
    else:
        pre = unitary_channel(_random_hermitian(rng), float(rng.uniform(0.0, 2.0)))
    return povm, pre


def _random_scenario(rng: np.random.Generator) -> tuple[Scenario, tuple[LindbladSpec, float] | None]:
    """Random qubit scenario; returns the Lindblad data of the inter-channel
    when it is a damping channel (for the RK4 cross-check path)."""
    damping = None
    if rng.random() < 0.5:
        gamma = float(rng.uniform(0.0, 2.0))
        omega = float(rng.uniform(0.0, 2.0 * math.pi))
        inter = amplitude_damping_channel(gamma, omega, 1.0)
        damping = (LindbladSpec(-0.5 * omega * SIGMA_Z, gamma, SIGMA_MINUS), 1.0)
    elif rng.random() < 0.5:
        inter = unitary_channel(_random_hermitian(rng), float(rng.uniform(0.0, 2.0)))
    else:
        inter = identity_channel(2)
    bob = []
    for _ in range(2):
        axis = _random_axis(rng)
        bob.append(Observable(
            axis[0] * SIGMA_X + axis[1] * np.array([[0, -1j], [1j, 0]], dtype=complex) + axis[2] * SIGMA_Z
        ))
    sc = Scenario(
        initial=_random_density(rng),
        alice_settings=(_random_alice_setting(rng), _random_alice_setting(rng)),
        inter_channel=inter,
        bob_settings=tuple(bob),
    )
    return sc, damping


def _rk4_evolver(spec: LindbladSpec, t: float, steps: int = 400) -> Callable[[np.ndarray], np.ndarray]:
    def evolve(mat: np.ndarray) -> np.ndarray:
        tr = float(np.trace(mat).real)
        if tr < 1e-14:
            return np.zeros_like(mat)
        out = rk4_lindblad(DensityMatrix(mat / tr, trace_tol=1e-9, psd_tol=1e-9), spec, t, steps)
        return tr * out.mat

    return evolve


def equivalence_suite(n_scenarios: int = 200, seed: int = 0) -> list[OracleReport]:
    """Brute-force joints vs the measurement pipeline over random scenarios.

    Every fourth damping scenario additionally swaps the oracle's branch
    propagation for the RK4 integrator (tolerance 1e-6 instead of 1e-10).
    """
    from . import seqcorr  # local import keeps the brute-force kernel free of pipeline symbols

    rng = np.random.default_rng(seed)
    reports = []
    for s in range(n_scenarios):
        sc, damping = _random_scenario(rng)
        use_rk4 = damping is not None and s % 4 == 0
        override = _rk4_evolver(*damping) if use_rk4 else None
        tol = 1e-6 if use_rk4 else 1e-10
        for i in range(2):
            for j in range(2):
                bf = brute_force_joint(sc, i, j, inter_override=override)
                pipe = seqcorr.joint_probability(sc, i, j)
                key = max(bf, key=lambda k: abs(bf[k] - pipe.get(k, 0.0)))
                reports.append(OracleReport(
                    quantity=f"scenario{s}.joint({i},{j})" + (".rk4" if use_rk4 else ""),
                    analytic=pipe.get(key, 0.0),
                    oracle=bf[key],
                    abs_diff=abs(bf[key] - pipe.get(key, 0.0)),
                    tolerance=tol,
                ))
    return reports


def damping_rk4_suite(n_draws: int = 50, seed: int = 1) -> list[OracleReport]:
    """Analytic amplitude-damping Kraus channel vs RK4 integration of the
    corresponding master equation, entrywise on random states."""
    from .evolve import apply_channel

    rng = np.random.default_rng(seed)
    reports = []
    for s in range(n_draws):
        gamma = float(rng.uniform(0.0, 3.0))
        omega = float(rng.uniform(0.0, 2.0 * math.pi))
        rho = _random_density(rng)
        analytic = apply_channel(rho, amplitude_damping_channel(gamma, omega, 1.0))
        spec = LindbladSpec(-0.5 * omega * SIGMA_Z, gamma, SIGMA_MINUS)
        integrated = rk4_lindblad(rho, spec, 1.0, 600)
        diff = float(np.max(np.abs(analytic.mat - integrated.mat)))
        idx = np.unravel_index(np.argmax(np.abs(analytic.mat - integrated.mat)), (2, 2))
        reports.append(OracleReport(
            quantity=f"damping{s}(gamma={gamma:.3f},omega={omega:.3f})[{idx[0]},{idx[1]}]",
            analytic=float(analytic.mat[idx].real),
            oracle=float(integrated.mat[idx].real),
            abs_diff=diff,
            tolerance=1e-6,
        ))
    return reports
