"""Experiment drivers: steering/LG scans over measurement timing, threshold
root-finders with dual-path (formula vs simulation) verification, the
three-axis global POVM and its joint-measurability boundary, mapped
higher-order LG runs, the damping crossover scan, and the block embedding
of multilevel systems."""

from __future__ import annotations

import math
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass
from itertools import permutations, product

import numpy as np

from . import matcore, oracle
from .errors import InvalidDimension, InvalidSharpness
from .evolve import Channel, amplitude_damping_channel, apply_channel, identity_channel
from .ineq import (
    VIOLATION_MARGIN,
    InequalityResult,
    chsh_steering,
    k4_damped,
    lg_sum,
    quadratic_steering,
    s2_damped,
    steering_closed_form_S,
    steering_closed_form_Sprime,
)
from .matcore import SIGMA_X, SIGMA_Y, SIGMA_Z, expm_antihermitian, frozen
from .quantum import (
    DensityMatrix,
    Observable,
    Povm,
    measure_statistics,
    projective_povm,
    rotate_observable,
    rotated_observable,
    unsharp_povm,
)
from .seqcorr import Scenario, conditional_bob_expectation, correlator, povm_correlator

_ID2 = identity_channel(2)
_MIXED2 = DensityMatrix.maximally_mixed(2)


@dataclass(frozen=True)
class ScanRecord:
    """One grid point of a parameter scan; every column must be finite."""

    parameter: float
    columns: dict[str, float]

    def __post_init__(self):
        bad = [k for k, v in self.columns.items() if not math.isfinite(v)]
        if bad:
            raise ValueError(f"non-finite scan columns at parameter {self.parameter!r}: {bad}")


@dataclass(frozen=True)
class ThresholdReport:
    """A named threshold, from the closed formula and from bisection on
    simulated statistics. `passed` is the report-level invariant."""

    name: str
    formula_value: float
    simulated_value: float
    tolerance: float

    @property
    def abs_diff(self) -> float:
        return abs(self.formula_value - self.simulated_value)

    @property
    def passed(self) -> bool:
        return self.abs_diff <= self.tolerance


@dataclass(frozen=True)
class Theorem2Row:
    x: float
    lgi_value: float
    lgi_ordering: tuple[int, int, int, int]
    lgi_violated: bool
    steering_s: float
    steering_sprime: float
    steering_violated: bool

    @property
    def ok(self) -> bool:
        return self.lgi_violated and self.steering_violated


@dataclass(frozen=True)
class Theorem2Report:
    rows: tuple[Theorem2Row, ...]
    all_violated: bool


@dataclass(frozen=True)
class GlobalPovm:
    """Eight-element parent POVM candidate for the three-axis unsharp triple."""

    effects: tuple[np.ndarray, ...]
    marginal_check: bool
    positive: bool
    min_eigenvalue: float


def interior_grid(points: int, hi: float = math.pi) -> np.ndarray:
    """`points` evenly spaced values strictly inside (0, hi)."""
    if points < 1:
        raise ValueError("need at least one grid point")
    return np.linspace(0.0, hi, points + 2)[1:-1]


def _q_axis(theta: float) -> np.ndarray:
    # Bloch direction of sigma_z cos(theta) + sigma_x sin(theta).
    return np.array([math.sin(theta), 0.0, math.cos(theta)])


def _pair_correlator_sharp(theta_first: float, theta_second: float) -> float:
    """Two sequential sharp measurements of rotated observables on the
    maximally mixed state, no evolution in between."""
    return povm_correlator(
        _MIXED2,
        projective_povm(rotated_observable(theta_first)),
        _ID2,
        projective_povm(rotated_observable(theta_second)),
    )


def _pair_correlator_unsharp(theta_first: float, theta_second: float, eta: float) -> float:
    return povm_correlator(
        _MIXED2,
        unsharp_povm(_q_axis(theta_first), eta),
        _ID2,
        unsharp_povm(_q_axis(theta_second), eta),
    )


def _schedule_scenario(alice_angles: Sequence[float], bob_angles: Sequence[float]) -> Scenario:
    return Scenario(
        initial=_MIXED2,
        alice_settings=tuple((projective_povm(rotated_observable(t)), _ID2) for t in alice_angles),
        inter_channel=_ID2,
        bob_settings=tuple(rotated_observable(t) for t in bob_angles),
    )


def fig2_scan(x_grid: Iterable[float]) -> list[ScanRecord]:
    """Steering sums S and S' versus the timing parameter x, both from the
    closed forms and from the full sequential-measurement pipeline.

    Schedule: A1=Q(x), A2=Q(3x), B1=Q(2x), B2=Q(4x); S' swaps the first and
    last measurement times (A1=Q(4x), B2=Q(x)).
    """
    records = []
    for x in x_grid:
        x = float(x)
        sc = _schedule_scenario((x, 3 * x), (2 * x, 4 * x))
        grid = ((correlator(sc, 0, 0), correlator(sc, 0, 1)),
                (correlator(sc, 1, 0), correlator(sc, 1, 1)))
        sc_p = _schedule_scenario((4 * x, 3 * x), (2 * x, x))
        grid_p = ((correlator(sc_p, 0, 0), correlator(sc_p, 0, 1)),
                  (correlator(sc_p, 1, 0), correlator(sc_p, 1, 1)))
        s_analytic = steering_closed_form_S(x)
        sp_analytic = steering_closed_form_Sprime(x)
        records.append(ScanRecord(x, {
            "S_analytic": s_analytic,
            "Sprime_analytic": sp_analytic,
            "S_simulated": chsh_steering(grid).value,
            "Sprime_simulated": chsh_steering(grid_p).value,
            "max_violation_margin": max(s_analytic, sp_analytic) - 2.0,
        }))
    return records


def _lg4_orderings() -> list[tuple[int, int, int, int]]:
    # Reversing a sequence reproduces the same four-term expression
    # (correlators are symmetric), so keep one representative per pair.
    out = []
    for perm in permutations(range(4)):
        if perm <= perm[::-1]:
            out.append(perm)
    return out


_LG4_ORDERINGS = _lg4_orderings()


def theorem2_corollary_check(x_grid: Iterable[float]) -> Theorem2Report:
    """Numerical corollary of the projective/unitary equivalence: at each
    timing parameter, at least one time-permuted 4-term LG sum and at least
    one of the two steering sums must be violated.

    All 12 distinct LG expressions over the four measurement times are
    enumerated (sequence permutations modulo reversal, minus sign on the
    closing correlator); a violation of either the upper bound 2 or the
    lower bound -2 counts. Correlators come from the simulated pipeline,
    not from the cosine closed form.

    At exactly x = pi/2 every pairwise correlator is 0 or -1 and a
    deterministic classical assignment reproduces them all, so each of the
    12 expressions sits on a boundary (values 0 or +/-2) and no strict
    violation exists at that isolated point. Interior grids with an even
    point count never sample it.
    """
    rows = []
    for x in x_grid:
        x = float(x)
        angles = [k * x for k in (1, 2, 3, 4)]
        pool: dict[tuple[int, int], float] = {}
        for k in range(4):
            for l in range(k + 1, 4):
                c = _pair_correlator_sharp(angles[k], angles[l])
                pool[(k, l)] = pool[(l, k)] = c
        best_margin, best_value, best_perm = -math.inf, 0.0, _LG4_ORDERINGS[0]
        for perm in _LG4_ORDERINGS:
            a, b, c_, d = perm
            value = pool[(a, b)] + pool[(b, c_)] + pool[(c_, d)] - pool[(d, a)]
            margin = max(value - 2.0, -2.0 - value)
            if margin > best_margin:
                best_margin, best_value, best_perm = margin, value, perm
        s = chsh_steering(((pool[(0, 1)], pool[(0, 3)]), (pool[(2, 1)], pool[(2, 3)]))).value
        sp = chsh_steering(((pool[(3, 1)], pool[(3, 0)]), (pool[(2, 1)], pool[(2, 0)]))).value
        rows.append(Theorem2Row(
            x=x,
            lgi_value=best_value,
            lgi_ordering=best_perm,
            lgi_violated=best_margin > VIOLATION_MARGIN,
            steering_s=s,
            steering_sprime=sp,
            steering_violated=max(s, sp) - 2.0 > VIOLATION_MARGIN,
        ))
    return Theorem2Report(tuple(rows), all(r.ok for r in rows))


def eta_threshold_lgi(n: int) -> float:
    """Sharpness below which the mapped n-term LG sum cannot be violated:
    sqrt((n-2) / (n cos(pi/n)))."""
    if n < 4:
        raise ValueError(f"threshold formula requires n >= 4, got {n}")
    return math.sqrt((n - 2) / (n * math.cos(math.pi / n)))


def global_povm(eta: float) -> GlobalPovm:
    """Candidate parent POVM G(a1,a2,a3) = (1 + eta(a1 sx + a2 sy + a3 sz))/8
    whose single-axis marginals are the three unsharp POVMs.

    Completeness and the marginal property hold for every eta; positivity
    (min eigenvalue (1 - eta sqrt(3))/8 >= 0) holds iff eta <= 1/sqrt(3),
    which is the joint-measurability boundary of the triple.
    """
    if not 0.0 < eta <= 1.0:
        raise InvalidSharpness(f"sharpness must lie in (0, 1], got {eta!r}")
    paulis = (SIGMA_X, SIGMA_Y, SIGMA_Z)
    mats = {}
    for signs in product((+1, -1), repeat=3):
        g = matcore.identity(2)
        for a, sigma in zip(signs, paulis):
            g = g + eta * a * sigma
        mats[signs] = g / 8.0
    min_eig = min(matcore.min_eigenvalue(g) for g in mats.values())
    axes = ("x", "y", "z")
    defect = 0.0
    for k, axis in enumerate(axes):
        expected = unsharp_povm(axis, eta)
        for eff in expected.effects:
            marginal = sum(g for signs, g in mats.items() if signs[k] == eff.outcome_label)
            defect = max(defect, float(np.max(np.abs(marginal - eff.mat))))
    return GlobalPovm(
        effects=tuple(frozen(mats[s]) for s in product((+1, -1), repeat=3)),
        marginal_check=defect <= 1e-12,
        positive=min_eig >= -1e-10,
        min_eigenvalue=min_eig,
    )


def _bisect(fn: Callable[[float], float], lo: float, hi: float, xtol: float) -> float:
    f_lo, f_hi = fn(lo), fn(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if (f_lo > 0) == (f_hi > 0):
        raise ValueError(f"no sign change on [{lo}, {hi}]: f = ({f_lo:.3e}, {f_hi:.3e})")
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        f_mid = fn(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def jm_boundary_eta(xtol: float = 1e-10) -> float:
    """Sharpness where the global POVM loses positivity, by bisection."""
    return _bisect(lambda eta: global_povm(eta).min_eigenvalue, 0.3, 0.9, xtol)


def unsharp_steering_scenario(eta: float, omega_t: float) -> InequalityResult:
    """Three-setting quadratic steering run with unsharp measurements.

    Alice measures the unsharp z, y, x POVMs at sharpness eta; the system
    then rotates under exp(-i sx omega t / 2) for the first two settings and
    exp(-i sy omega t / 2) for the third; Bob's observables are the
    Heisenberg-rotated sz, sy, sx. The resulting sum equals
    3 eta^2 cos^2(omega t).
    """
    u = expm_antihermitian(0.5 * SIGMA_X, omega_t)
    v = expm_antihermitian(0.5 * SIGMA_Y, omega_t)
    sc = Scenario(
        initial=_MIXED2,
        alice_settings=(
            (unsharp_povm("z", eta), _ID2),
            (unsharp_povm("y", eta), _ID2),
            (unsharp_povm("x", eta), _ID2),
        ),
        inter_channel=_ID2,
        bob_settings=(
            rotate_observable(Observable(SIGMA_Z), u),
            rotate_observable(Observable(SIGMA_Y), u),
            rotate_observable(Observable(SIGMA_X), v),
        ),
    )
    probs, expectations = [], []
    for i, (povm, _) in enumerate(sc.alice_settings):
        stats = measure_statistics(sc.initial, povm)
        probs.append([p for p, _ in stats])
        expectations.append([
            conditional_bob_expectation(sc, i, eff.outcome_label, i) for eff in povm.effects
        ])
    return quadratic_steering(probs, expectations)


def kn_mapped(n: int, eta: float) -> InequalityResult:
    """n-term LG sum mapped onto two-measurement runs.

    Measurement k carries the rotated observable at angle k pi / n; each
    correlator is an independent run of two unsharp measurements at
    sharpness eta on the maximally mixed state with no evolution in
    between. The simulated value is eta^2 n cos(pi/n).
    """
    if n < 3:
        raise ValueError(f"need n >= 3, got {n}")
    angles = [k * math.pi / n for k in range(1, n + 1)]
    forward = [_pair_correlator_unsharp(angles[k], angles[k + 1], eta) for k in range(n - 1)]
    closing = _pair_correlator_unsharp(angles[0], angles[-1], eta)
    return lg_sum(forward, closing)


def k5_mapped(eta: float) -> InequalityResult:
    """Five-term LG sum in the two-observer split: Alice measures Q(pi/5),
    Q(3pi/5), Q(pi), Bob measures Q(2pi/5), Q(4pi/5) and duplicates Q(pi/5)
    for the closing correlator. Equals eta^2 * 5 cos(pi/5)."""
    return kn_mapped(5, eta)


def k6_mapped(eta: float) -> InequalityResult:
    """Six-term LG sum in the two-observer split: Alice measures Q(pi/6),
    Q(pi/2), Q(5pi/6), Bob measures Q(pi/3), Q(2pi/3), Q(pi). Equals
    eta^2 * 6 cos(pi/6)."""
    return kn_mapped(6, eta)


def _sharp_axis_povm(sigma: np.ndarray) -> Povm:
    return projective_povm(Observable(sigma))


def damped_pair_correlator(gamma_dt: float, omega_dt: float, gaps: int = 1) -> float:
    """Two-time correlator of sharp x-measurements across `gaps` intervals of
    amplitude damping (per-gap parameters gamma_dt, omega_dt).

    The first sharp x-measurement on the maximally mixed state re-prepares
    the +/-x pure states with probability 1/2 each regardless of prior
    damping, so the correlator depends only on the gap count.
    """
    ch = amplitude_damping_channel(gamma_dt, omega_dt, float(gaps))
    return povm_correlator(_MIXED2, _sharp_axis_povm(SIGMA_X), ch, _sharp_axis_povm(SIGMA_X))


def k4_damped_simulated(gamma_dt: float, omega_dt: float) -> InequalityResult:
    """Pipeline counterpart of the closed-form damped 4-term LG sum."""
    c1 = damped_pair_correlator(gamma_dt, omega_dt, 1)
    c3 = damped_pair_correlator(gamma_dt, omega_dt, 3)
    return lg_sum([c1, c1, c1], c3)


def s2_damped_simulated(gamma_dt: float, omega_dt: float) -> InequalityResult:
    """Pipeline counterpart of the closed-form damped steering parameter.

    Alice measures sigma_x or sigma_y sharply on the maximally mixed state;
    one damping interval separates her from Bob, who measures the same
    observable. Evaluates to 2 exp(-gamma dt) cos^2(omega dt): the cosine
    structure of the closed form with the channel's own coherence-decay
    rate (gamma/2 per unit time rather than the closed form's gamma).
    """
    ch = amplitude_damping_channel(gamma_dt, omega_dt, 1.0)
    probs, expectations = [], []
    for sigma in (SIGMA_X, SIGMA_Y):
        povm = _sharp_axis_povm(sigma)
        row_p, row_e = [], []
        for (p, post), _eff in zip(measure_statistics(_MIXED2, povm), povm.effects):
            row_p.append(p)
            row_e.append(apply_channel(post, ch).expectation(sigma) if p > 0 else 0.0)
        probs.append(row_p)
        expectations.append(row_e)
    return quadratic_steering(probs, expectations)


def fig3_scan(gamma_grid: Iterable[float], omega_dt: float = math.pi / 4) -> list[ScanRecord]:
    """Damping crossover scan: closed-form and simulated K4 - 2 and S2 - 1
    versus the per-gap damping gamma*dt.

    The *_paper columns evaluate the printed closed forms exactly as given;
    the *_simulated columns run the measurement pipeline over the
    amplitude-damping channel. The two differ by a factor of two in the
    decay rate (see s2_damped_simulated), and both S2 columns equal 1 at
    gamma = 0 for omega_dt = pi/4, so neither certifies steering there.
    """
    records = []
    for g in gamma_grid:
        g = float(g)
        records.append(ScanRecord(g, {
            "K4_minus_2_paper": k4_damped(g, omega_dt).value - 2.0,
            "S2_minus_1_paper": s2_damped(g, omega_dt).value - 1.0,
            "K4_minus_2_simulated": k4_damped_simulated(g, omega_dt).value - 2.0,
            "S2_minus_1_simulated": s2_damped_simulated(g, omega_dt).value - 1.0,
        }))
    return records


def k4_crossing_gamma(omega_dt: float = math.pi / 4, xtol: float = 1e-8, simulated: bool = False) -> float:
    """Damping value where the 4-term LG sum crosses its classical bound 2,
    located by bisection."""
    fn = k4_damped_simulated if simulated else k4_damped

    def gap(g: float) -> float:
        return fn(g, omega_dt).value - 2.0

    if gap(0.0) <= 0.0:
        raise ValueError(f"no violation at gamma = 0 for omega_dt = {omega_dt!r}; nothing to cross")
    hi = 1.0
    while gap(hi) > 0.0:
        hi *= 2.0
        if hi > 64.0:
            raise ValueError("no crossing found below gamma*dt = 64")
    return _bisect(gap, 0.0, hi, xtol)


def spinj_embed(two_j_plus_1: int) -> tuple[Observable, Callable[[float], Channel]]:
    """Block embedding of a (2j+1)-level system into two-level subspaces.

    Returns the dichotomizable block observable Q = (Gz + P) / sqrt(2j+1)
    (Gz block-diagonal sigma_z; P zero except a final 1/sqrt(2) diagonal
    entry when the dimension is odd) and a builder mapping a rotation angle
    t to the block-diagonal channel with exp(-i sx t / 2) in every block.
    An odd leftover level is left untouched by the evolution.
    """
    dim = int(two_j_plus_1)
    if dim < 2:
        raise InvalidDimension(f"embedding needs dimension >= 2, got {dim}")
    blocks = dim // 2
    gz = np.zeros((dim, dim), dtype=complex)
    for b in range(blocks):
        gz[2 * b, 2 * b] = 1.0
        gz[2 * b + 1, 2 * b + 1] = -1.0
    pi_mat = np.zeros((dim, dim), dtype=complex)
    if dim % 2:
        pi_mat[-1, -1] = 1.0 / math.sqrt(2.0)
    q = Observable((gz + pi_mat) / math.sqrt(dim))

    def u_builder(t: float) -> Channel:
        block = expm_antihermitian(0.5 * SIGMA_X, t)
        u = np.eye(dim, dtype=complex)
        for b in range(blocks):
            u[2 * b:2 * b + 2, 2 * b:2 * b + 2] = block
        return Channel([u], duration=t)

    return q, u_builder


def spinj_k4_max(two_j_plus_1: int, grid_points: int = 200) -> tuple[float, float]:
    """Maximum over the rotation angle of the 4-term LG sum for the block
    embedding, via grid search plus local refinement."""
    q, u_builder = spinj_embed(two_j_plus_1)
    povm = projective_povm(q)
    mixed = DensityMatrix.maximally_mixed(int(two_j_plus_1))

    def k4(x: float) -> float:
        c1 = povm_correlator(mixed, povm, u_builder(x), povm)
        c3 = povm_correlator(mixed, povm, u_builder(3.0 * x), povm)
        return 3.0 * c1 - c3

    params, value = oracle.extremal_search(k4, [(0.0, math.pi, grid_points)])
    return float(params[0]), float(value)


def steering_threshold_report(tolerance: float = 1e-4) -> ThresholdReport:
    """Sharpness where the three-setting steering sum reaches its bound:
    formula 1/sqrt(3) vs bisection on the simulated sum."""
    simulated = _bisect(lambda eta: unsharp_steering_scenario(eta, 0.0).value - 1.0, 0.3, 0.99, 1e-6)
    return ThresholdReport("steering_triple", 1.0 / math.sqrt(3.0), simulated, tolerance)


def lgi_threshold_report(n: int, tolerance: float = 1e-4) -> ThresholdReport:
    """Sharpness where the mapped n-term LG sum reaches n-2: closed formula
    vs bisection on the simulated sum."""
    simulated = _bisect(lambda eta: kn_mapped(n, eta).value - (n - 2.0), 0.3, 1.0, 1e-6)
    return ThresholdReport(f"lgi_n{n}", eta_threshold_lgi(n), simulated, tolerance)
