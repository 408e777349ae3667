"""Time evolution: unitary propagators, Kraus channels, analytic amplitude
damping, and a fixed-step RK4 master-equation integrator kept as an
independent oracle (separate code path from the Kraus construction)."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from . import matcore
from .errors import DimensionMismatch, NegativeRate, StepCountTooSmall
from .matcore import SIGMA_MINUS, SIGMA_Z, TOL_DERIVED, dagger, expm_antihermitian, frozen, require_hermitian
from .quantum import DensityMatrix


class Channel:
    """Completely positive trace-preserving map as a Kraus-operator list."""

    def __init__(self, kraus: Sequence[np.ndarray], duration: float = 0.0):
        ops = tuple(frozen(k) for k in kraus)
        if not ops:
            raise ValueError("channel needs at least one Kraus operator")
        dim = ops[0].shape[0]
        total = np.zeros((dim, dim), dtype=complex)
        for k in ops:
            if k.shape != (dim, dim):
                raise ValueError("all Kraus operators must be square and share one dimension")
            total = total + dagger(k) @ k
        defect = float(np.max(np.abs(total - matcore.identity(dim))))
        if defect > TOL_DERIVED:
            raise ValueError(f"channel is not trace-preserving: sum K^dag K defect {defect:.3e}")
        self.kraus = ops
        self.duration = float(duration)

    @property
    def dim(self) -> int:
        return self.kraus[0].shape[0]

    def __repr__(self) -> str:
        return f"Channel({len(self.kraus)} Kraus ops, dim={self.dim}, duration={self.duration})"


@dataclass(frozen=True)
class LindbladSpec:
    """Master-equation data: hermitian Hamiltonian, decay rate, jump operator."""

    hamiltonian: np.ndarray
    decay_rate: float
    jump_operator: np.ndarray

    def __post_init__(self):
        require_hermitian(self.hamiltonian, what="Hamiltonian")
        if self.decay_rate < 0:
            raise NegativeRate(f"decay rate must be >= 0, got {self.decay_rate!r}")


def identity_channel(dim: int) -> Channel:
    return Channel([matcore.identity(dim)], duration=0.0)


def unitary_channel(h: np.ndarray, t: float) -> Channel:
    """Single-Kraus channel U = exp(-i H t), hbar = 1."""
    return Channel([expm_antihermitian(h, t)], duration=t)


def amplitude_damping_channel(gamma: float, omega: float, dt: float) -> Channel:
    """Decay toward |0> at rate `gamma`, composed with the rotation generated
    by H = -(omega/2) sigma_z, over duration `dt`.

    Damping strength p = 1 - exp(-gamma dt). The damping Kraus pair commutes
    with the z-rotation (up to a global phase on one operator), so composing
    the two exactly solves the corresponding master equation.
    """
    if gamma < 0:
        raise NegativeRate(f"gamma must be >= 0, got {gamma!r}")
    if dt < 0:
        raise ValueError(f"dt must be >= 0, got {dt!r}")
    p = 1.0 - np.exp(-gamma * dt)
    d0 = np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - p)]], dtype=complex)
    d1 = np.sqrt(p) * SIGMA_MINUS
    u = expm_antihermitian(-0.5 * omega * SIGMA_Z, dt)
    return Channel([u @ d0, u @ d1], duration=dt)


def damping_bloch_map(gamma_dt: float, omega_dt: float) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form affine Bloch map (A, b) of the amplitude-damping channel.

    r' = A r + b for Bloch vectors r; used by fast scans in place of the
    Kraus sandwich. Matches `amplitude_damping_channel` exactly (tested).
    """
    decay = np.exp(-gamma_dt)
    root = np.sqrt(decay)
    c, s = np.cos(omega_dt), np.sin(omega_dt)
    # Damp first, then rotate about z; the two commute as channels.
    rot = np.array([[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]])
    damp = np.diag([root, root, decay])
    return rot @ damp, np.array([0.0, 0.0, 1.0 - decay])


def apply_channel(rho: DensityMatrix, ch: Channel) -> DensityMatrix:
    """sum_k K rho K^dag."""
    if rho.dim != ch.dim:
        raise DimensionMismatch(f"state dim {rho.dim} != channel dim {ch.dim}")
    out = np.zeros_like(rho.mat)
    for k in ch.kraus:
        out = out + k @ rho.mat @ dagger(k)
    return DensityMatrix(0.5 * (out + dagger(out)))


def _lindblad_rhs(mat: np.ndarray, h: np.ndarray, gamma: float, jump: np.ndarray) -> np.ndarray:
    jd = dagger(jump)
    jdj = jd @ jump
    out = -1j * (h @ mat - mat @ h)
    out = out + gamma * (jump @ mat @ jd - 0.5 * (jdj @ mat + mat @ jdj))
    return out


def rk4_lindblad(rho: DensityMatrix, spec: LindbladSpec, t: float, steps: int) -> DensityMatrix:
    """Fixed-step classical RK4 integration of the standard-form master equation

        drho/dt = -i[H, rho] + gamma (J rho J^dag - {J^dag J, rho}/2).

    Deterministic by construction; kept as the independent ground truth for
    the analytic channel. Output trace is 1 within 1e-8 and positivity holds
    within -1e-8 for the stated preconditions (steps >= 100, gamma t <= 50).
    """
    if steps < 100:
        raise StepCountTooSmall(f"need at least 100 steps, got {steps}")
    if spec.decay_rate * t > 50.0 + 1e-9:
        raise ValueError(f"gamma*t = {spec.decay_rate * t!r} exceeds the supported range (<= 50)")
    h = np.asarray(spec.hamiltonian, dtype=complex)
    jump = np.asarray(spec.jump_operator, dtype=complex)
    gamma = float(spec.decay_rate)
    dt = float(t) / int(steps)
    mat = np.array(rho.mat, dtype=complex)
    for _ in range(int(steps)):
        k1 = _lindblad_rhs(mat, h, gamma, jump)
        k2 = _lindblad_rhs(mat + 0.5 * dt * k1, h, gamma, jump)
        k3 = _lindblad_rhs(mat + 0.5 * dt * k2, h, gamma, jump)
        k4 = _lindblad_rhs(mat + dt * k3, h, gamma, jump)
        mat = mat + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    # Symmetrize float noise only; truncation error stays visible.
    mat = 0.5 * (mat + dagger(mat))
    return DensityMatrix(mat, trace_tol=1e-8, psd_tol=1e-8)
