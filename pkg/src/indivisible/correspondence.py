"""Between column-stochastic dynamics and unitary quantum evolution.

A unitary U induces the doubly stochastic matrix Gamma_ij = |U_ij|^2; going
the other way means finding phases phi such that

    Theta_ij = sqrt(Gamma_ij) exp(i phi_ij)

has orthonormal rows (Theta Theta^dag = 1).  Matrices admitting such phases
are unistochastic; with signs only (phi in {0, pi}) they are orthostochastic.
Neither property is automatic for N > 2, so both searches can fail, and for
N = 3 a triangle inequality gives a definitive refusal certificate.

Any potential matrix Theta, unistochastic or not, yields Kraus operators
(K_beta = column beta of Theta, placed in column beta) satisfying the
completeness identity and reproducing Gamma, and those dilate to a genuine
unitary on an N^2-dimensional space with a distinguished ancilla input.
Density matrices close the loop: diagonal rho evolved by U has diagonal
Gamma @ diag(rho), and Hamiltonians are recovered from evolution families by
a symmetric difference quotient.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import NotRankOneError, UnsupportedSizeError, ValidationError
from .oscillator import HermitianMatrix, StateVector
from .stochastic import Distribution, TransitionMatrix

UNITARITY_TOL = 1e-10
COLUMN_NORM_TOL = 1e-12
DOUBLY_STOCHASTIC_TOL = 1e-12
KRAUS_IDENTITY_TOL = 1e-10
EIGENVALUE_FLOOR = -1e-10
TRACE_TOL = 1e-12
RANK_ONE_TOL = 1e-10
RECONSTRUCTION_TOL = 1e-9

SEARCH_RESTARTS = 32
SEARCH_SEED = 42
SEARCH_TOL = 1e-10
SEARCH_MAX_ITERS = 25_000
ORTHO_MAX_SIZE = 4


@dataclass(frozen=True)
class UnitaryMatrix:
    """Unitary with time stamps: the evolution from t0 to t."""

    matrix: np.ndarray
    t: float = 1.0
    t0: float = 0.0

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValidationError(f"expected square matrix, got shape {m.shape}")
        dev = float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))
        if dev > UNITARITY_TOL:
            raise ValidationError(
                f"matrix is not unitary: max |U^dag U - 1| = {dev:.3e}",
                deviation=dev)
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class PotentialMatrix:
    """Complex matrix whose columns are unit vectors (column sum rule)."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValidationError(f"expected square matrix, got shape {m.shape}")
        norms = np.linalg.norm(m, axis=0)
        bad = [j for j in range(m.shape[1]) if abs(norms[j] - 1.0) > COLUMN_NORM_TOL]
        if bad:
            raise ValidationError(
                f"columns {bad} do not have unit 2-norm",
                columns=bad, norms=[float(x) for x in norms])
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class KrausSet:
    """Operators K_beta, each supported on column beta only, summing to identity."""

    operators: tuple

    def __post_init__(self):
        ops = tuple(np.array(k, dtype=complex) for k in self.operators)
        if not ops:
            raise ValidationError("empty Kraus set")
        n = ops[0].shape[0]
        if len(ops) != n:
            raise ValidationError(
                f"expected {n} operators for dimension {n}, got {len(ops)}")
        for beta, k in enumerate(ops):
            if k.shape != (n, n):
                raise ValidationError(f"operator {beta} has shape {k.shape}")
            mask = np.ones(n, dtype=bool)
            mask[beta] = False
            if np.any(k[:, mask] != 0):
                raise ValidationError(
                    f"operator {beta} has support outside column {beta}")
        total = sum(k.conj().T @ k for k in ops)
        dev = float(np.max(np.abs(total - np.eye(n))))
        if dev > KRAUS_IDENTITY_TOL:
            raise ValidationError(
                f"completeness fails: max |sum K^dag K - 1| = {dev:.3e}",
                deviation=dev)
        for k in ops:
            k.flags.writeable = False
        object.__setattr__(self, "operators", ops)

    @property
    def n(self) -> int:
        return self.operators[0].shape[0]


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, positive semidefinite (to tolerance), unit trace."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValidationError(f"expected square matrix, got shape {m.shape}")
        dev = float(np.max(np.abs(m - m.conj().T)))
        if dev > 1e-12:
            raise ValidationError(f"not hermitian: deviation {dev:.3e}")
        eigs = np.linalg.eigvalsh(m)
        if float(eigs.min()) < EIGENVALUE_FLOOR:
            raise ValidationError(
                f"negative eigenvalue {float(eigs.min()):.3e}",
                spectrum=[float(x) for x in eigs])
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValidationError(f"trace {tr!r} is not 1")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


# ---------------------------------------------------------------------------
# Unitary -> stochastic
# ---------------------------------------------------------------------------

def quantum_to_stochastic(u: UnitaryMatrix) -> TransitionMatrix:
    """Gamma_ij = |U_ij|^2, stamped like U.  Unitarity makes it doubly stochastic."""
    gamma = np.abs(u.matrix) ** 2
    return TransitionMatrix(gamma, t=u.t, t0=u.t0)


def potential_from_transition(gamma: TransitionMatrix,
                              phases: np.ndarray) -> PotentialMatrix:
    """Theta_ij = sqrt(Gamma_ij) exp(i phases_ij).

    The column sum rule |Theta| columns = 1 is inherited from the column
    stochasticity of Gamma, whatever the phases.
    """
    ph = np.asarray(phases, dtype=float)
    if ph.shape != gamma.matrix.shape:
        raise ValidationError(
            f"phases shape {ph.shape} does not match matrix {gamma.matrix.shape}")
    return PotentialMatrix(np.sqrt(gamma.matrix) * np.exp(1j * ph))


# ---------------------------------------------------------------------------
# Unistochastic search
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UnistochasticResult:
    """status "found" | "not_found" | "not_unistochastic".

    "not_found" is evidence, not proof: the search ran out of attempts.
    "not_unistochastic" is definitive and carries its certificate.
    residual is the best Frobenius norm of Theta Theta^dag - 1 seen (None when
    the search was refused outright).
    """

    status: str
    unitary: UnitaryMatrix | None = None
    residual: float | None = None
    certificate: str | None = None


def _row_sum_deviation(matrix: np.ndarray) -> float:
    return float(np.max(np.abs(matrix.sum(axis=1) - 1.0)))


def triangle_certificate(gamma: np.ndarray) -> str | None:
    """Definitive non-unistochasticity test for N = 3.

    Column orthogonality of Theta requires the three side lengths
    sqrt(Gamma_ij Gamma_ik) to close into a triangle; if one side exceeds the
    sum of the other two for some column pair (j, k), no phases exist.
    """
    n = gamma.shape[0]
    if n != 3:
        return None
    for j in range(3):
        for k in range(j + 1, 3):
            sides = np.sqrt(gamma[:, j] * gamma[:, k])
            longest = int(np.argmax(sides))
            rest = float(sides.sum() - sides[longest])
            if float(sides[longest]) > rest + 1e-12:
                return (
                    f"columns ({j}, {k}): side {float(sides[longest]):.6f} at row "
                    f"{longest} exceeds the sum {rest:.6f} of the remaining sides; "
                    "no phase assignment closes the triangle")
    return None


def _phase_descent(r: np.ndarray, phases: np.ndarray, max_iters: int,
                   tol: float) -> tuple[np.ndarray, float]:
    """Gradient descent on ||Theta Theta^dag - 1||_F^2 over the phase matrix.

    d/dphi_ij ||...||^2 = 4 Im(conj(Theta_ij) (G Theta)_ij) with
    G = Theta Theta^dag - 1.  The trial step is the Barzilai-Borwein
    spectral length from the previous (step, gradient-change) pair when it
    is positive, else double the last accepted step; a plain fixed step
    needs ~1e5 more iterations to traverse the flat valleys near the
    minimum.  Steps halve on non-decrease.
    """
    eye = np.eye(r.shape[0])

    def evaluate(ph):
        theta = r * np.exp(1j * ph)
        g = theta @ theta.conj().T - eye
        return theta, g, float(np.sum(np.abs(g) ** 2))

    theta, g, f = evaluate(phases)
    grad = 4.0 * np.imag(np.conj(theta) * (g @ theta))
    step = 0.25
    prev_phases: np.ndarray | None = None
    prev_grad: np.ndarray | None = None
    for _ in range(max_iters):
        if f <= tol * tol:
            break
        if float(np.sum(grad * grad)) <= 1e-30:
            break
        trial = step
        if prev_grad is not None:
            dp = phases - prev_phases
            dg = grad - prev_grad
            denom = float(np.sum(dp * dg))
            if denom > 0.0:
                bb = float(np.sum(dp * dp)) / denom
                if np.isfinite(bb) and bb > 0.0:
                    trial = bb
        # Halve until a step improves, then keep halving while that keeps
        # paying off and take the best of the sweep.  Accepting the first
        # improvement instead makes the iterate hop across narrow valleys
        # (each hop barely shorter than the last) and convergence dies.
        best = None
        best_s = trial
        s = trial
        while s >= 1e-16:
            cand_phases = phases - s * grad
            cand = evaluate(cand_phases)
            reference = f if best is None else best[3]
            if cand[2] < reference:
                best = (cand_phases, cand[0], cand[1], cand[2])
                best_s = s
                s *= 0.5
                continue
            if best is not None:
                break
            s *= 0.5
        if best is None:
            break
        prev_phases, prev_grad = phases, grad
        phases, theta, g, f = best
        grad = 4.0 * np.imag(np.conj(theta) * (g @ theta))
        step = best_s * 2.0
    return phases, float(np.sqrt(f))


def unistochastic_search(gamma: TransitionMatrix,
                         max_iters: int = SEARCH_MAX_ITERS,
                         tol: float = SEARCH_TOL, *,
                         restarts: int = SEARCH_RESTARTS,
                         seed: int = SEARCH_SEED) -> UnistochasticResult:
    """Look for phases making sqrt(Gamma) with phases unitary.

    The first start is the zero phase matrix (so matrices that are already
    unistochastic "as printed", like permutations, come back verbatim); the
    remaining restarts draw phases uniformly from [0, 2pi).  Moduli are fixed
    by construction, so any accepted candidate reproduces Gamma exactly.
    """
    g = gamma.matrix
    row_dev = _row_sum_deviation(g)
    if row_dev > DOUBLY_STOCHASTIC_TOL:
        return UnistochasticResult(
            "not_unistochastic",
            certificate=(f"not doubly stochastic: max row-sum deviation "
                         f"{row_dev:.3e}; unitarity is impossible"))
    cert = triangle_certificate(g)
    if cert is not None:
        return UnistochasticResult("not_unistochastic", certificate=cert)

    r = np.sqrt(g)
    n = gamma.n
    rng = np.random.default_rng(seed)
    best = np.inf
    for attempt in range(restarts):
        if attempt == 0:
            start = np.zeros((n, n))
        else:
            start = rng.uniform(0.0, 2.0 * np.pi, size=(n, n))
        phases, residual = _phase_descent(r, start, max_iters, tol)
        best = min(best, residual)
        if residual <= tol:
            theta = r * np.exp(1j * phases)
            return UnistochasticResult(
                "found",
                unitary=UnitaryMatrix(theta, t=gamma.t, t0=gamma.t0),
                residual=residual)
    return UnistochasticResult("not_found", residual=best)


def orthostochastic_check(gamma: TransitionMatrix) -> np.ndarray | None:
    """Exhaustive sign search for real orthogonal O with O_ij^2 = Gamma_ij.

    Signs are assigned column by column with first-nonzero-positive gauge
    fixing, pruning on pairwise column orthogonality (|dot| <= 1e-10).
    Definitive for N <= 4; larger sizes raise UnsupportedSizeError rather
    than pretending to certainty.
    """
    n = gamma.n
    if n > ORTHO_MAX_SIZE:
        raise UnsupportedSizeError(
            f"sign search supports N <= {ORTHO_MAX_SIZE}, got N = {n}")
    row_dev = _row_sum_deviation(gamma.matrix)
    if row_dev > DOUBLY_STOCHASTIC_TOL:
        raise ValidationError(
            f"matrix is not doubly stochastic (row deviation {row_dev:.3e})")
    r = np.sqrt(gamma.matrix)
    tol = 1e-10

    def column_choices(j: int) -> list[np.ndarray]:
        nonzero = np.flatnonzero(r[:, j] > 0.0)
        free = nonzero[1:]  # gauge: first nonzero entry is positive
        out = []
        for bits in range(1 << len(free)):
            signs = np.ones(n)
            for pos, row in enumerate(free):
                if bits >> pos & 1:
                    signs[row] = -1.0
            out.append(signs * r[:, j])
        return out

    chosen: list[np.ndarray] = []

    def assign(j: int) -> bool:
        if j == n:
            return True
        for col in column_choices(j):
            if all(abs(float(col @ prev)) <= tol for prev in chosen):
                chosen.append(col)
                if assign(j + 1):
                    return True
                chosen.pop()
        return False

    if not assign(0):
        return None
    o = np.column_stack(chosen)
    dev = float(np.max(np.abs(o.T @ o - np.eye(n))))
    if dev > tol:
        return None
    return o


# ---------------------------------------------------------------------------
# Kraus and Stinespring
# ---------------------------------------------------------------------------

def kraus_from_potential(theta: PotentialMatrix) -> KrausSet:
    """K_beta holds column beta of Theta in its own column beta, zero elsewhere.

    Completeness sum K_beta^dag K_beta = 1 is exactly the column sum rule, and
    sum_beta |(K_beta)_ij|^2 recovers Gamma entrywise.
    """
    n = theta.n
    ops = []
    for beta in range(n):
        k = np.zeros((n, n), dtype=complex)
        k[:, beta] = theta.matrix[:, beta]
        ops.append(k)
    return KrausSet(tuple(ops))


def apply_kraus(kraus: KrausSet, rho: DensityMatrix) -> DensityMatrix:
    """Channel action sum_beta K rho K^dag; trace is preserved by completeness."""
    out = sum(k @ rho.matrix @ k.conj().T for k in kraus.operators)
    return DensityMatrix(out)


def stinespring_dilate(kraus: KrausSet) -> UnitaryMatrix:
    """Dilate the Kraus set to a unitary on system x ancilla (dimension N^2).

    Basis layout: |i> x |beta> sits at flat row i*N + beta.  The isometry
    V|j> = sum_beta (K_beta |j>) x |beta> occupies the input columns with the
    ancilla at its reference state (index 0): column j*N.  The remaining
    columns are an orthonormal basis of the complement, obtained from the
    eigenvectors of the complementary projector, so the result is unitary to
    machine precision and deterministic.
    """
    n = kraus.n
    dim = n * n
    u = np.zeros((dim, dim), dtype=complex)
    rows = np.arange(n) * n
    for j in range(n):
        target = np.zeros(dim, dtype=complex)
        for beta, k in enumerate(kraus.operators):
            target[rows + beta] += k[:, j]
        u[:, j * n] = target

    v = u[:, [j * n for j in range(n)]]
    proj = np.eye(dim, dtype=complex) - v @ v.conj().T
    w, vecs = np.linalg.eigh(proj)
    comp = vecs[:, w > 0.5]
    if comp.shape[1] != dim - n:
        raise RuntimeError(
            f"complement has rank {comp.shape[1]}, expected {dim - n}")
    spare = iter(range(comp.shape[1]))
    for c in range(dim):
        if c % n != 0:
            u[:, c] = comp[:, next(spare)]
    return UnitaryMatrix(u)


def dilation_marginal(u: UnitaryMatrix | np.ndarray, n: int) -> np.ndarray:
    """Recover Gamma_ij = sum_beta |U[(i, beta), (j, 0)]|^2 from a dilation."""
    m = u.matrix if isinstance(u, UnitaryMatrix) else np.asarray(u)
    gamma = np.empty((n, n))
    for j in range(n):
        block = m[:, j * n].reshape(n, n)
        gamma[:, j] = np.sum(np.abs(block) ** 2, axis=1)
    return gamma


# ---------------------------------------------------------------------------
# Density matrices
# ---------------------------------------------------------------------------

def density_from_distribution(p: Distribution) -> DensityMatrix:
    """Diagonal embedding rho = diag(p)."""
    return DensityMatrix(np.diag(p.p.astype(complex)))


def evolve_density(u: UnitaryMatrix, rho: DensityMatrix) -> DensityMatrix:
    """Conjugation rho -> U rho U^dag.

    For diagonal rho the new diagonal is Gamma @ diag(rho) with
    Gamma = |U|^2: the stochastic picture rides along for free.
    """
    if u.n != rho.n:
        raise ValidationError(f"size mismatch: unitary {u.n}, density {rho.n}")
    return DensityMatrix(u.matrix @ rho.matrix @ u.matrix.conj().T)


def rank_one_factor(rho: DensityMatrix) -> StateVector:
    """Extract Psi with Psi Psi^dag = rho, or raise NotRankOneError.

    The matrix counts as rank one when every eigenvalue but the largest is
    at most RANK_ONE_TOL.  Gauge: the first component with modulus above
    1e-12 is rotated to the positive real axis.
    """
    eigs, vecs = np.linalg.eigh(rho.matrix)
    if rho.n > 1 and float(eigs[-2]) > RANK_ONE_TOL:
        raise NotRankOneError(
            f"second eigenvalue {float(eigs[-2]):.3e} exceeds "
            f"{RANK_ONE_TOL:.0e}", spectrum=[float(x) for x in eigs])
    psi = vecs[:, -1]
    for c in psi:
        if abs(c) > 1e-12:
            psi = psi * (np.conj(c) / abs(c))
            break
    dev = float(np.max(np.abs(np.outer(psi, psi.conj()) - rho.matrix)))
    if dev > RECONSTRUCTION_TOL:
        raise NotRankOneError(
            f"outer product misses rho by {dev:.3e}",
            spectrum=[float(x) for x in eigs])
    return StateVector(psi, normalized=True)


# ---------------------------------------------------------------------------
# Hamiltonian extraction
# ---------------------------------------------------------------------------

def hamiltonian_from_evolution(evolution: Callable[[float], UnitaryMatrix],
                               t: float, dt: float) -> tuple[HermitianMatrix, float]:
    """Recover H(t) = i U'(t) U(t)^dag by symmetric difference quotient.

    Returns the hermitian part together with the max-entry anti-hermitian
    residual of the raw quotient; the error of both is O(dt^2) for smooth
    families.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")

    def as_matrix(x):
        return x.matrix if isinstance(x, UnitaryMatrix) else np.asarray(x, dtype=complex)

    u_plus = as_matrix(evolution(t + dt))
    u_minus = as_matrix(evolution(t - dt))
    u_here = as_matrix(evolution(t))
    raw = 1j * ((u_plus - u_minus) / (2.0 * dt)) @ u_here.conj().T
    herm = (raw + raw.conj().T) / 2.0
    residual = float(np.max(np.abs(raw - herm)))
    return HermitianMatrix(herm), residual
