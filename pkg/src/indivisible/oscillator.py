"""Schrodinger dynamics as a classical oscillator system (Strocchi-Heslot form).

A state Psi and Hamiltonian H over C^N are split into real data

    Psi = (q + i p) / sqrt(2),      H = A + i B

with A symmetric and B antisymmetric (both real, forced by hermiticity).
Under this identification the Schrodinger equation i Psi' = H Psi is exactly
the pair of Hamilton equations

    q' = A p + B q = dH_SH/dp,      p' = -A q + B p = -dH_SH/dq

for the quadratic classical Hamiltonian

    H_SH(q, p) = 1/2 p.A p + p.B q + 1/2 q.A q = <Psi| H |Psi>.

(The cross term must pair p with the first index of B; with the opposite
pairing the antisymmetry of B flips its sign and Hamilton's equations stop
matching the componentwise Schrodinger equation.)

Time evolution is integrated symplectically: the A-part and B-part of H_SH
are each exactly solvable (mode rotations and an orthogonal flow), and a
Strang composition B/2 . A . B/2 gives a second-order scheme whose energy
error stays bounded instead of drifting.  Since H_SH is quadratic the whole
step is one precomputed linear map on (q, p).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

HERMITICITY_TOL = 1e-12
NORMALIZATION_TOL = 1e-10


@dataclass(frozen=True)
class HermitianMatrix:
    """Complex square matrix validated against H = H-dagger."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValidationError(f"expected a square matrix, got shape {m.shape}")
        dev = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
        if dev > HERMITICITY_TOL:
            raise ValidationError(
                f"matrix is not hermitian: max |H - H^dag| = {dev:.3e} "
                f"exceeds {HERMITICITY_TOL:.0e}", deviation=dev)
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_array(cls, arr, symmetrize: bool = False) -> "HermitianMatrix":
        """Wrap ``arr``; with symmetrize=True, project onto (H + H^dag)/2 first."""
        m = np.array(arr, dtype=complex)
        if symmetrize:
            m = (m + m.conj().T) / 2.0
        return cls(m)


@dataclass(frozen=True)
class StateVector:
    """Complex state; when flagged normalized, the 2-norm must be 1."""

    psi: np.ndarray
    normalized: bool = True

    def __post_init__(self):
        v = np.array(self.psi, dtype=complex).reshape(-1)
        if self.normalized:
            nrm = float(np.linalg.norm(v))
            if abs(nrm - 1.0) > NORMALIZATION_TOL:
                raise ValidationError(
                    f"state norm {nrm!r} deviates from 1 by more than "
                    f"{NORMALIZATION_TOL:.0e}", norm=nrm)
        v.flags.writeable = False
        object.__setattr__(self, "psi", v)

    def norm(self) -> float:
        return float(np.linalg.norm(self.psi))


@dataclass(frozen=True)
class PhaseSpaceState:
    """Real phase-space point (q, p)."""

    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        q = np.array(self.q, dtype=float).reshape(-1)
        p = np.array(self.p, dtype=float).reshape(-1)
        if q.shape != p.shape:
            raise ValidationError(
                f"q and p must have equal length, got {q.shape} and {p.shape}")
        q.flags.writeable = False
        p.flags.writeable = False
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)


@dataclass(frozen=True)
class SHSystem:
    """Real pair (A, B) with A exactly symmetric and B exactly antisymmetric."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.array(self.a, dtype=float)
        b = np.array(self.b, dtype=float)
        if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValidationError(
                f"A and B must be equal square shapes, got {a.shape}, {b.shape}")
        if not np.array_equal(a, a.T):
            raise ValidationError("A must be exactly symmetric as stored")
        if not np.array_equal(b, -b.T):
            raise ValidationError("B must be exactly antisymmetric as stored")
        a.flags.writeable = False
        b.flags.writeable = False
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def n(self) -> int:
        return self.a.shape[0]


def sh_decompose(h: HermitianMatrix) -> SHSystem:
    """Split H into (A, B) = (Re H, Im H), symmetrized so the parts are exact.

    Averaging an entry with its transpose partner keeps every value within
    the hermiticity tolerance of the input while making A = A^T and
    B = -B^T hold bitwise.
    """
    re = h.matrix.real
    im = h.matrix.imag
    a = (re + re.T) / 2.0
    b = (im - im.T) / 2.0
    return SHSystem(a, b)


def sh_recombine(state: PhaseSpaceState) -> StateVector:
    """Psi = (q + i p) / sqrt(2); no normalization is claimed for the result."""
    psi = (state.q + 1j * state.p) / np.sqrt(2.0)
    return StateVector(psi, normalized=False)


def sh_split(psi: StateVector) -> PhaseSpaceState:
    """Inverse of sh_recombine: q = sqrt(2) Re Psi, p = sqrt(2) Im Psi."""
    v = psi.psi
    return PhaseSpaceState(np.sqrt(2.0) * v.real, np.sqrt(2.0) * v.imag)


def sh_energy(system: SHSystem, state: PhaseSpaceState) -> float:
    """Classical energy 1/2 p.A p + p.B q + 1/2 q.A q.

    Equals Re <Psi|H|Psi> = <Psi|H|Psi> for Psi recombined from (q, p).
    """
    q, p = state.q, state.p
    return float(0.5 * p @ (system.a @ p) + p @ (system.b @ q)
                 + 0.5 * q @ (system.a @ q))


@dataclass(frozen=True)
class PhaseTrajectory:
    """Strided phase-space samples; q and p have one row per sample."""

    times: np.ndarray
    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        q = np.asarray(self.q, dtype=float)
        p = np.asarray(self.p, dtype=float)
        if not (len(t) == q.shape[0] == p.shape[0]):
            raise ValidationError("times, q, p must agree in sample count")
        for arr in (t, q, p):
            arr.flags.writeable = False
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    def __len__(self) -> int:
        return len(self.times)

    def state(self, k: int) -> PhaseSpaceState:
        return PhaseSpaceState(self.q[k], self.p[k])


def _mode_rotation(a: np.ndarray, dt: float) -> tuple[np.ndarray, np.ndarray]:
    # Exact flow of the A-only Hamiltonian: per-mode rotation by eigenvalue * dt.
    w, v = np.linalg.eigh(a)
    cos = (v * np.cos(w * dt)) @ v.T
    sin = (v * np.sin(w * dt)) @ v.T
    return cos, sin

def _orthogonal_flow(b: np.ndarray, dt: float) -> np.ndarray:
    # Exact flow exp(B dt) of the B-only Hamiltonian; B antisymmetric makes
    # iB hermitian, so the exponential comes out of a hermitian eigensolve.
    w, v = np.linalg.eigh(1j * b)
    r = (v * np.exp(-1j * w * dt)) @ v.conj().T
    return np.ascontiguousarray(r.real)


def _strang_step_matrix(system: SHSystem, dt: float) -> np.ndarray:
    """One Strang step (B half, A full, B half) as a 2N x 2N linear map."""
    n = system.n
    cos, sin = _mode_rotation(system.a, dt)
    half = _orthogonal_flow(system.b, dt / 2.0)
    step_a = np.block([[cos, sin], [-sin, cos]])
    step_b = np.zeros((2 * n, 2 * n))
    step_b[:n, :n] = half
    step_b[n:, n:] = half
    return step_b @ step_a @ step_b


def _rk4_step_matrix(system: SHSystem, dt: float) -> np.ndarray:
    """Classical RK4 on the linear field (q', p') = (Ap + Bq, Bp - Aq)."""
    n = system.n
    gen = np.block([[system.b, system.a], [-system.a, system.b]])
    eye = np.eye(2 * n)
    m = eye.copy()
    term = eye.copy()
    for k in (1, 2, 3, 4):
        term = (gen @ term) * (dt / k)
        m = m + term
    return m


def sh_integrate(system: SHSystem, state: PhaseSpaceState, dt: float,
                 duration: float, method: str = "strang",
                 sample_stride: int = 1) -> PhaseTrajectory:
    """Evolve (q, p) on a uniform grid of round(duration / dt) steps.

    The grid covers [0, duration] exactly, so the step equals dt only when dt
    divides duration.  method "strang" is the symplectic default; "rk4" is
    kept for comparison runs and has no symplecticity guarantee.
    sample_stride > 1 records every stride-th step (the first and last steps
    are always included).
    """
    if dt <= 0.0 or duration <= 0.0:
        raise ValueError("dt and duration must be positive")
    if sample_stride < 1:
        raise ValueError("sample_stride must be >= 1")
    n_steps = max(1, int(round(duration / dt)))
    dt = duration / n_steps
    if method == "strang":
        step = _strang_step_matrix(system, dt)
    elif method == "rk4":
        step = _rk4_step_matrix(system, dt)
    else:
        raise ValueError(f"unknown method {method!r}")

    n = system.n
    s = np.concatenate([state.q, state.p])
    rec_idx = [0]
    rec = [s.copy()]
    for k in range(1, n_steps + 1):
        s = step @ s
        if k % sample_stride == 0 or k == n_steps:
            rec_idx.append(k)
            rec.append(s.copy())
    samples = np.array(rec)
    times = dt * np.array(rec_idx, dtype=float)
    return PhaseTrajectory(times, samples[:, :n], samples[:, n:])


def sh_normal_modes(h: HermitianMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Eigenfrequencies (ascending) and the unitary of eigenvectors.

    In the returned basis the system decouples: transforming H by the basis
    leaves A diagonal (the frequencies) and B zero.
    """
    w, v = np.linalg.eigh(h.matrix)
    return w, v


def exact_evolve(h: HermitianMatrix, psi0: StateVector, t: float) -> StateVector:
    """Apply exp(-i H t) through the eigendecomposition of H."""
    w, v = np.linalg.eigh(h.matrix)
    phases = np.exp(-1j * w * t)
    psi = v @ (phases * (v.conj().T @ psi0.psi))
    return StateVector(psi, normalized=psi0.normalized)


def time_reverse_state(psi: StateVector, v: np.ndarray | None = None) -> StateVector:
    """Antiunitary reversal Psi -> V conj(Psi); V defaults to the identity."""
    out = np.conj(psi.psi)
    if v is not None:
        out = np.asarray(v, dtype=complex) @ out
    return StateVector(out, normalized=psi.normalized)
