"""States, observables, effects, POVMs, and the square-root measurement update."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from . import matcore
from .errors import InvalidSharpness, ZeroProbabilityBranch
from .matcore import (
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    TOL_CONSTRUCT,
    TOL_DERIVED,
    dagger,
    frozen,
    min_eigenvalue,
    require_hermitian,
    sqrtm_psd,
)

# Branches below this probability are treated as impossible and skipped.
PROB_FLOOR = 1e-14


class DensityMatrix:
    """d x d hermitian, unit-trace, positive operator.

    Construction validates all three properties. The integrator path may
    construct with relaxed tolerances (its output carries O(step^4) error,
    not representation error).
    """

    def __init__(self, mat: np.ndarray, *, trace_tol: float = TOL_CONSTRUCT, psd_tol: float = TOL_DERIVED):
        mat = require_hermitian(mat, tol=max(TOL_CONSTRUCT, trace_tol), what="density matrix")
        tr = float(np.trace(mat).real)
        if abs(tr - 1.0) > trace_tol:
            raise ValueError(f"density matrix trace {tr!r} differs from 1 by more than {trace_tol:.0e}")
        lo = min_eigenvalue(mat)
        if lo < -psd_tol:
            raise ValueError(f"density matrix has negative eigenvalue {lo:.3e} (< -{psd_tol:.0e})")
        self._mat = frozen(mat)

    @property
    def mat(self) -> np.ndarray:
        return self._mat

    @property
    def dim(self) -> int:
        return self._mat.shape[0]

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls(np.eye(dim, dtype=complex) / dim)

    @classmethod
    def pure(cls, ket: Sequence[complex]) -> "DensityMatrix":
        v = np.asarray(ket, dtype=complex).reshape(-1)
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()))

    @classmethod
    def from_bloch(cls, x: float, y: float, z: float) -> "DensityMatrix":
        return cls(0.5 * (matcore.identity(2) + x * SIGMA_X + y * SIGMA_Y + z * SIGMA_Z))

    def expectation(self, obs: "Observable | np.ndarray") -> float:
        mat = obs.mat if isinstance(obs, Observable) else np.asarray(obs, dtype=complex)
        return float(np.trace(self._mat @ mat).real)

    def bloch(self) -> tuple[float, float, float]:
        if self.dim != 2:
            raise ValueError("Bloch vector is defined for qubits only")
        return (self.expectation(SIGMA_X), self.expectation(SIGMA_Y), self.expectation(SIGMA_Z))

    def __repr__(self) -> str:
        return f"DensityMatrix(dim={self.dim})"


class Observable:
    """Hermitian operator whose (real) spectrum supplies the outcome values."""

    def __init__(self, mat: np.ndarray):
        mat = require_hermitian(mat, what="observable")
        self._mat = frozen(mat)
        self._eigs = np.linalg.eigvalsh(mat)
        self._eigs.setflags(write=False)

    @property
    def mat(self) -> np.ndarray:
        return self._mat

    @property
    def dim(self) -> int:
        return self._mat.shape[0]

    @property
    def outcome_values(self) -> np.ndarray:
        """Eigenvalues, ascending."""
        return self._eigs

    def is_dichotomic(self, tol: float = TOL_DERIVED) -> bool:
        """True when every eigenvalue is +1 or -1 within `tol`."""
        return bool(np.all(np.abs(np.abs(self._eigs) - 1.0) <= tol))

    def __repr__(self) -> str:
        return f"Observable(dim={self.dim})"


class Effect:
    """POVM element: hermitian with spectrum in [0, 1], tagged with its outcome label."""

    def __init__(self, mat: np.ndarray, outcome_label: int):
        mat = require_hermitian(mat, what="effect")
        w = np.linalg.eigvalsh(mat)
        if w[0] < -TOL_DERIVED or w[-1] > 1.0 + TOL_DERIVED:
            raise ValueError(f"effect spectrum [{w[0]:.3e}, {w[-1]:.3e}] outside [0, 1]")
        self.mat = frozen(mat)
        self.outcome_label = int(outcome_label)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def __repr__(self) -> str:
        return f"Effect(label={self.outcome_label:+d}, dim={self.dim})"


class Povm:
    """Finite collection of effects summing to the identity."""

    def __init__(self, effects: Sequence[Effect], sharpness: float | None = None):
        effects = tuple(effects)
        if not effects:
            raise ValueError("POVM needs at least one effect")
        dim = effects[0].dim
        total = np.zeros((dim, dim), dtype=complex)
        for eff in effects:
            if eff.dim != dim:
                raise ValueError("all effects must share one dimension")
            total = total + eff.mat
        defect = float(np.max(np.abs(total - matcore.identity(dim))))
        if defect > TOL_DERIVED:
            raise ValueError(f"effects do not sum to identity: defect {defect:.3e}")
        self.effects = effects
        self.sharpness = sharpness

    @property
    def dim(self) -> int:
        return self.effects[0].dim

    def __repr__(self) -> str:
        eta = "sharp" if self.sharpness is None else f"eta={self.sharpness}"
        return f"Povm({len(self.effects)} effects, {eta})"


class Assemblage:
    """Conditional states Alice's measurements prepare: (setting, outcome) -> (weight, state)."""

    def __init__(self, members: dict[tuple[int, int], tuple[float, DensityMatrix]]):
        self.members = dict(members)
        for k in self.settings:
            weights = [w for (kk, _), (w, _) in self.members.items() if kk == k]
            if any(w < -1e-12 for w in weights):
                raise ValueError(f"negative weight in setting {k}")
            if abs(sum(weights) - 1.0) > TOL_DERIVED:
                raise ValueError(f"weights for setting {k} sum to {sum(weights)!r}, not 1")

    @property
    def settings(self) -> tuple[int, ...]:
        return tuple(sorted({k for (k, _) in self.members}))

    def __getitem__(self, key: tuple[int, int]) -> tuple[float, DensityMatrix]:
        return self.members[key]


def rotated_observable(theta: float) -> Observable:
    """Dichotomic observable sigma_z cos(theta) + sigma_x sin(theta)."""
    return Observable(np.cos(theta) * SIGMA_Z + np.sin(theta) * SIGMA_X)


def rotate_observable(obs: Observable, u: np.ndarray) -> Observable:
    """Heisenberg picture: U^dag B U."""
    u = np.asarray(u, dtype=complex)
    return Observable(dagger(u) @ obs.mat @ u)


def _axis_vector(axis: str | Sequence[float]) -> np.ndarray:
    if isinstance(axis, str):
        try:
            return {"x": np.array([1.0, 0.0, 0.0]),
                    "y": np.array([0.0, 1.0, 0.0]),
                    "z": np.array([0.0, 0.0, 1.0])}[axis]
        except KeyError:
            raise ValueError(f"axis must be 'x', 'y', 'z' or a unit 3-vector, got {axis!r}") from None
    n = np.asarray(axis, dtype=float).reshape(-1)
    if n.shape != (3,):
        raise ValueError("Bloch axis must have three components")
    if abs(np.linalg.norm(n) - 1.0) > TOL_CONSTRUCT:
        raise ValueError(f"Bloch axis must be unit-norm, |n| = {np.linalg.norm(n)!r}")
    return n


def unsharp_povm(axis: str | Sequence[float], eta: float) -> Povm:
    """Two-outcome smeared spin measurement: effects (1 +/- eta n.sigma)/2.

    `eta` is the sharpness; eta = 1 recovers the projective measurement.
    """
    if not 0.0 < eta <= 1.0:
        raise InvalidSharpness(f"sharpness must lie in (0, 1], got {eta!r}")
    n = _axis_vector(axis)
    n_sigma = n[0] * SIGMA_X + n[1] * SIGMA_Y + n[2] * SIGMA_Z
    half = matcore.identity(2) / 2.0
    return Povm(
        [Effect(half + 0.5 * eta * n_sigma, +1), Effect(half - 0.5 * eta * n_sigma, -1)],
        sharpness=float(eta),
    )


def projective_povm(obs: Observable) -> Povm:
    """Projectors of `obs` grouped by eigenvalue sign, labeled +1/-1.

    For nondegenerate qubit observables this is one rank-1 projector per
    eigenvalue. Degenerate spectra (block observables) are grouped so the
    update never resolves coherence inside an eigenspace; the outcome
    label is the eigenvalue sign, which dichotomizes block observables
    whose positive part spans several distinct eigenvalues.
    """
    w, v = matcore.eig_hermitian(obs.mat)
    if np.any(np.abs(w) <= TOL_CONSTRUCT):
        raise ValueError("observable has a zero eigenvalue; sign dichotomization is undefined")
    effects = []
    for label in (+1, -1):
        cols = v[:, (w > 0) if label > 0 else (w < 0)]
        if cols.shape[1]:
            effects.append(Effect(cols @ dagger(cols), label))
    return Povm(effects)


def luders_update(rho: DensityMatrix, effect: Effect) -> tuple[float, DensityMatrix]:
    """Square-root (Lueders) instrument: p = tr[rho M], post = sqrt(M) rho sqrt(M) / p.

    Raises ZeroProbabilityBranch when p < PROB_FLOOR; the caller must skip
    the branch rather than renormalise it.
    """
    if rho.dim != effect.dim:
        raise ValueError(f"state dim {rho.dim} != effect dim {effect.dim}")
    root = sqrtm_psd(effect.mat)
    unnorm = root @ rho.mat @ root
    prob = float(np.trace(unnorm).real)
    if prob < PROB_FLOOR:
        raise ZeroProbabilityBranch(f"branch {effect.outcome_label:+d} has probability {prob:.3e}")
    post = unnorm / prob
    return prob, DensityMatrix(0.5 * (post + dagger(post)))


def measure_statistics(rho: DensityMatrix, povm: Povm) -> list[tuple[float, DensityMatrix]]:
    """Lueders branch list for every effect, in POVM order.

    Zero-probability branches carry weight exactly 0.0 and a maximally
    mixed placeholder state (valid but unused by construction).
    """
    out = []
    for eff in povm.effects:
        try:
            out.append(luders_update(rho, eff))
        except ZeroProbabilityBranch:
            out.append((0.0, DensityMatrix.maximally_mixed(rho.dim)))
    return out
