"""Sequential-measurement statistics: joint probabilities, two-time
correlators, conditional expectations on post-measurement states, and
steering assemblages."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .errors import NonDichotomic, ZeroProbabilityBranch
from .evolve import Channel, apply_channel
from .matcore import TOL_DERIVED
from .quantum import Assemblage, DensityMatrix, Observable, Povm, measure_statistics, projective_povm

PROB_FLOOR = 1e-14


@dataclass(frozen=True)
class Scenario:
    """One sequential-measurement experiment.

    Alice's settings each carry their own pre-measurement channel (the
    three-setting steering scenario evolves differently depending on which
    observable she measures); a single channel separates Alice from Bob.
    Bob's observables may be stored Heisenberg-rotated, in which case the
    inter-measurement channel is the identity.
    """

    initial: DensityMatrix
    alice_settings: tuple[tuple[Povm, Channel], ...]
    inter_channel: Channel
    bob_settings: tuple[Observable, ...]

    def __post_init__(self):
        dim = self.initial.dim
        for povm, pre in self.alice_settings:
            if povm.dim != dim or pre.dim != dim:
                raise ValueError("Alice setting dimension mismatch")
        if self.inter_channel.dim != dim:
            raise ValueError("inter-channel dimension mismatch")
        for obs in self.bob_settings:
            if obs.dim != dim:
                raise ValueError("Bob observable dimension mismatch")


@dataclass(frozen=True)
class CorrelationTable:
    """Joint outcome probabilities p(i,a,j,b) and correlators E(i,j)."""

    joint: dict[tuple[int, int, int, int], float]
    correlators: dict[tuple[int, int], float]

    def __post_init__(self):
        pairs = {(i, j) for (i, _, j, _) in self.joint}
        for i, j in pairs:
            total = sum(p for (ii, _, jj, _), p in self.joint.items() if (ii, jj) == (i, j))
            if abs(total - 1.0) > TOL_DERIVED:
                raise ValueError(f"joint for settings ({i},{j}) sums to {total!r}")
        for (i, j), e in self.correlators.items():
            if abs(e) > 1.0 + TOL_DERIVED:
                raise ValueError(f"correlator E({i},{j}) = {e!r} outside [-1, 1]")


def _alice_branches(sc: Scenario, i: int) -> list[tuple[int, float, DensityMatrix]]:
    """(label, probability, state-after-inter-channel) per Alice outcome."""
    povm, pre = sc.alice_settings[i]
    rho = apply_channel(sc.initial, pre)
    out = []
    for (prob, post), eff in zip(measure_statistics(rho, povm), povm.effects):
        if prob > 0.0:
            post = apply_channel(post, sc.inter_channel)
        out.append((eff.outcome_label, prob, post))
    return out


def joint_probability(sc: Scenario, i: int, j: int) -> dict[tuple[int, int], float]:
    """p(a, b) for Alice setting i, Bob setting j.

    Pipeline: pre-channel(i), Lueders measurement of Alice's POVM, the
    inter-measurement channel on each branch, then a projective measurement
    of Bob's observable: p(a,b) = p(a) p(b|a).
    """
    bob = projective_povm(sc.bob_settings[j])
    out: dict[tuple[int, int], float] = {}
    for a, pa, post in _alice_branches(sc, i):
        for eff in bob.effects:
            pb = float(np.trace(post.mat @ eff.mat).real) if pa > 0.0 else 0.0
            out[(a, eff.outcome_label)] = pa * pb
    return out


def _require_pm1(labels, where: str) -> None:
    if not set(labels) <= {-1, +1}:
        raise NonDichotomic(f"{where} requires outcomes labeled +1/-1, got {sorted(set(labels))}")


def correlator(sc: Scenario, i: int, j: int) -> float:
    """E(A_i, B_j) = p(a=b) - p(a!=b) = sum_ab a b p(a,b) for +/-1 outcomes."""
    joint = joint_probability(sc, i, j)
    _require_pm1([a for a, _ in joint] + [b for _, b in joint], "correlator")
    return float(sum(a * b * p for (a, b), p in joint.items()))


def povm_correlator(rho: DensityMatrix, alice: Povm, inter: Channel, bob: Povm) -> float:
    """Two-time correlator with arbitrary +/-1-labeled POVMs on both sides."""
    _require_pm1([e.outcome_label for e in alice.effects] + [e.outcome_label for e in bob.effects],
                 "povm_correlator")
    total = 0.0
    for (prob, post), eff in zip(measure_statistics(rho, alice), alice.effects):
        if prob <= 0.0:
            continue
        evolved = apply_channel(post, inter)
        for bob_eff in bob.effects:
            pb = float(np.trace(evolved.mat @ bob_eff.mat).real)
            total += eff.outcome_label * bob_eff.outcome_label * prob * pb
    return total


def correlation_table(sc: Scenario) -> CorrelationTable:
    joint: dict[tuple[int, int, int, int], float] = {}
    corr: dict[tuple[int, int], float] = {}
    for i in range(len(sc.alice_settings)):
        for j in range(len(sc.bob_settings)):
            jp = joint_probability(sc, i, j)
            for (a, b), p in jp.items():
                joint[(i, a, j, b)] = p
            corr[(i, j)] = float(sum(a * b * p for (a, b), p in jp.items()))
    return CorrelationTable(joint, corr)


def symmetrized_correlator_check(
    rho: DensityMatrix, a_obs: Observable, b_obs: Observable
) -> tuple[float, float, float]:
    """(E(A then B), E(B then A), tr[rho {A,B}]/2) for sharp dichotomic A, B.

    All three agree for sharp dichotomic measurements on any state; this is
    the order-independence that lets higher LG sums map onto two-party runs.
    """
    ident = Channel([np.eye(rho.dim, dtype=complex)])
    pa, pb = projective_povm(a_obs), projective_povm(b_obs)
    forward = povm_correlator(rho, pa, ident, pb)
    reverse = povm_correlator(rho, pb, ident, pa)
    anti = 0.5 * float(np.trace(rho.mat @ (a_obs.mat @ b_obs.mat + b_obs.mat @ a_obs.mat)).real)
    return forward, reverse, anti


def conditional_bob_expectation(sc: Scenario, i: int, a: int, j: int) -> float:
    """<B_j> on the (evolved) state left by Alice's outcome a of setting i."""
    for label, prob, post in _alice_branches(sc, i):
        if label == a:
            if prob <= PROB_FLOOR:
                raise ZeroProbabilityBranch(f"outcome {a:+d} of setting {i} has probability {prob:.3e}")
            return post.expectation(sc.bob_settings[j])
    raise ValueError(f"setting {i} has no outcome labeled {a:+d}")


def assemblage(rho: DensityMatrix, povms: Sequence[Povm], inter: Channel) -> Assemblage:
    """States Alice's measurements prepare for Bob, keyed by (setting, outcome)."""
    members: dict[tuple[int, int], tuple[float, DensityMatrix]] = {}
    for k, povm in enumerate(povms):
        for (prob, post), eff in zip(measure_statistics(rho, povm), povm.effects):
            if prob > 0.0:
                post = apply_channel(post, inter)
            members[(k, eff.outcome_label)] = (prob, post)
    return Assemblage(members)
