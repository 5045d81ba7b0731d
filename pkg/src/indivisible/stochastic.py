"""Column-stochastic transition dynamics and divisibility testing.

Transition matrices act on probability column vectors, p(t) = Gamma(t<-t0) p(t0),
and carry their time stamps with them.  A family of such matrices, all
conditioned on a common set of division times, is generally NOT divisible:
there need not exist any column-stochastic M with

    M @ Gamma(t'<-t0) = Gamma(t<-t0)

even when both endpoints are perfectly lawful.  ``divisibility_check`` decides
that question as a linear feasibility problem over the entries of M.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import ValidationError
from .lp import MAX_PIVOTS, find_nonnegative_solution

SUM_TOL = 1e-12          # distributions and matrix columns must sum to 1 within this
NEGATIVE_CLAMP = 1e-14   # entries in (-NEGATIVE_CLAMP, 0) are clamped to zero
WITNESS_RESIDUAL_TOL = 1e-9
# Equality constraints are relaxed to paired inequalities with this slack.
# Tighter than the witness tolerance so that column renormalization of the
# LP vertex cannot push the final residual over WITNESS_RESIDUAL_TOL.
LP_RELAXATION = 1e-10


def _clamp_small_negatives(arr: np.ndarray, context: str) -> np.ndarray:
    worst = float(arr.min()) if arr.size else 0.0
    if worst < -NEGATIVE_CLAMP:
        raise ValidationError(
            f"{context} has negative entries (min {worst:.3e})", minimum=worst)
    return np.where(arr < 0.0, 0.0, arr)


@dataclass(frozen=True)
class Distribution:
    """Probability vector: nonnegative entries summing to 1 within SUM_TOL."""

    p: np.ndarray

    def __post_init__(self):
        p = np.array(self.p, dtype=float).reshape(-1)
        if p.size == 0:
            raise ValidationError("empty distribution")
        p = _clamp_small_negatives(p, "distribution")
        total = float(p.sum())
        if abs(total - 1.0) > SUM_TOL:
            raise ValidationError(
                f"distribution sums to {total!r}, off by more than {SUM_TOL:.0e}",
                total=total)
        p.flags.writeable = False
        object.__setattr__(self, "p", p)

    @property
    def n(self) -> int:
        return self.p.shape[0]


@dataclass(frozen=True)
class TransitionMatrix:
    """Column-stochastic matrix stamped with target time t and source time t0."""

    matrix: np.ndarray
    t: float = 1.0
    t0: float = 0.0

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValidationError(f"expected square matrix, got shape {m.shape}")
        bad_neg = [j for j in range(m.shape[1])
                   if float(m[:, j].min()) < -NEGATIVE_CLAMP]
        m = np.where(m < 0.0, np.where(m >= -NEGATIVE_CLAMP, 0.0, m), m)
        sums = m.sum(axis=0)
        bad_sum = [j for j in range(m.shape[1])
                   if abs(float(sums[j]) - 1.0) > SUM_TOL]
        if bad_neg or bad_sum:
            raise ValidationError(
                "matrix is not column-stochastic; offending columns "
                f"(negative entries: {bad_neg}, bad sums: {bad_sum})",
                negative_columns=bad_neg, sum_columns=bad_sum,
                column_sums=[float(s) for s in sums])
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


def validate_transition(matrix, t: float, t0: float) -> TransitionMatrix:
    """Construct a TransitionMatrix; ValidationError carries the column report."""
    return TransitionMatrix(matrix, t=t, t0=t0)


@dataclass(frozen=True)
class IndivisibleProcess:
    """Transition data keyed by (t, t0) with no interpolation or completion.

    targets are the times the process can speak about at all; conditioning
    times (a subset) are the only lawful source stamps.  Lookups demand an
    exact key match: absence of a pair is information, not an accident.
    """

    n: int
    targets: tuple
    conditioning: tuple
    transitions: Mapping[tuple, TransitionMatrix]
    initial: Distribution

    def __post_init__(self):
        targets = tuple(float(x) for x in self.targets)
        conditioning = tuple(float(x) for x in self.conditioning)
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "conditioning", conditioning)
        missing = [c for c in conditioning if c not in targets]
        if missing:
            raise ValidationError(
                f"conditioning times {missing} are not target times",
                missing=missing)
        trans = dict(self.transitions)
        for key, tm in trans.items():
            t, t0 = key
            if tm.n != self.n:
                raise ValidationError(
                    f"transition {key} has size {tm.n}, process has n={self.n}")
            if (tm.t, tm.t0) != (t, t0):
                raise ValidationError(
                    f"transition stored under {key} is stamped ({tm.t}, {tm.t0})")
            if t not in targets or t0 not in conditioning:
                raise ValidationError(
                    f"transition {key} is not within targets/conditioning")
        if self.initial.n != self.n:
            raise ValidationError(
                f"initial distribution has size {self.initial.n}, expected {self.n}")
        object.__setattr__(self, "transitions", trans)

    def transition(self, t: float, t0: float) -> TransitionMatrix:
        key = (float(t), float(t0))
        if key not in self.transitions:
            have = sorted(self.transitions.keys())
            raise KeyError(
                f"no transition stored for (t={t}, t0={t0}); stored keys: {have}")
        return self.transitions[key]


def propagate(gamma: TransitionMatrix, p: Distribution) -> Distribution:
    """Law of total probability: p(t) = Gamma(t<-t0) p(t0)."""
    if gamma.n != p.n:
        raise ValidationError(f"size mismatch: matrix {gamma.n}, vector {p.n}")
    return Distribution(gamma.matrix @ p.p)


def markov_compose(chain: Sequence[TransitionMatrix]) -> TransitionMatrix:
    """Compose a chronologically ordered chain into one transition matrix.

    chain[k+1].t0 must equal chain[k].t exactly; the product is stamped from
    the first source to the last target.  Composability is an assumption to
    be granted, not a theorem: generic processes refuse it.
    """
    if len(chain) == 0:
        raise ValidationError("cannot compose an empty chain")
    for earlier, later in zip(chain, chain[1:]):
        if later.n != earlier.n:
            raise ValidationError("chain members differ in dimension")
        if later.t0 != earlier.t:
            raise ValidationError(
                f"chain breaks: segment ending at t={earlier.t} is followed by "
                f"one starting at t0={later.t0}")
    acc = chain[0].matrix
    for tm in chain[1:]:
        acc = tm.matrix @ acc
    return TransitionMatrix(acc, t=chain[-1].t, t0=chain[0].t0)


def pairwise_joint(gamma: TransitionMatrix, p: Distribution) -> np.ndarray:
    """Two-time joint J_ij = Gamma_ij p_j.

    Columns sum to p (marginal at the source time), rows sum to the
    propagated distribution, and the whole table sums to 1.
    """
    if gamma.n != p.n:
        raise ValidationError(f"size mismatch: matrix {gamma.n}, vector {p.n}")
    return gamma.matrix * p.p[None, :]


@dataclass(frozen=True)
class DivisibilityVerdict:
    """Answer to 'does M with M @ Gamma(t'<-t0) = Gamma(t<-t0) exist?'.

    status      "divisible" | "indivisible" | "indeterminate"
    witness     the connecting matrix M, stamped (t <- t'), when divisible
    certificate human-readable grounds, set for indivisible/indeterminate
    residual    max |M Gamma' - Gamma| for a witness; for the other verdicts,
                the phase-1 infeasibility measure at stop
    """

    status: str
    witness: TransitionMatrix | None = None
    certificate: str | None = None
    residual: float = 0.0


def divisibility_check(gamma_t: TransitionMatrix, gamma_tp: TransitionMatrix,
                       *, relaxation: float = LP_RELAXATION,
                       max_pivots: int = MAX_PIVOTS) -> DivisibilityVerdict:
    """Decide divisibility of gamma_t through gamma_tp (shared source time).

    The entries of M form an N^2-variable feasibility problem: M >= 0,
    unit column sums, and M @ gamma_tp = gamma_t, with every equality relaxed
    to paired inequalities at ``relaxation``.  A feasible point is column
    renormalized and returned as the witness; infeasibility is definitive for
    the relaxed problem; hitting the pivot cap is reported as indeterminate,
    never coerced into either answer.
    """
    if gamma_t.n != gamma_tp.n:
        raise ValidationError(
            f"size mismatch: {gamma_t.n} vs {gamma_tp.n}")
    if gamma_t.t0 != gamma_tp.t0:
        raise ValidationError(
            f"matrices must share the source time: {gamma_t.t0} vs {gamma_tp.t0}")
    n = gamma_t.n
    if n == 1:
        witness = TransitionMatrix(np.eye(1), t=gamma_t.t, t0=gamma_tp.t)
        return DivisibilityVerdict("divisible", witness=witness, residual=0.0)

    gp = gamma_tp.matrix
    gt = gamma_t.matrix
    # Variables m_ij at flat index i*n + j.
    n_vars = n * n
    rows_a = []
    rows_b = []

    def add_eq(coeffs: np.ndarray, rhs: float):
        rows_a.append(coeffs)
        rows_b.append(rhs + relaxation)
        rows_a.append(-coeffs)
        rows_b.append(-(rhs - relaxation))

    for i in range(n):
        for j in range(n):
            coeffs = np.zeros(n_vars)
            coeffs[i * n:(i + 1) * n] = gp[:, j]  # sum_k m_ik gp_kj
            add_eq(coeffs, float(gt[i, j]))
    for j in range(n):
        coeffs = np.zeros(n_vars)
        coeffs[j::n] = 1.0  # sum_i m_ij
        add_eq(coeffs, 1.0)

    result = find_nonnegative_solution(
        np.array(rows_a), np.array(rows_b), max_pivots=max_pivots)

    if result.status == "iteration_limit":
        return DivisibilityVerdict(
            "indeterminate", certificate=(
                f"phase-1 simplex hit the {max_pivots}-pivot cap with residual "
                f"infeasibility {result.infeasibility:.3e}; no verdict"),
            residual=result.infeasibility)
    if result.status == "infeasible":
        return DivisibilityVerdict(
            "indivisible", certificate=(
                "no column-stochastic M satisfies M @ Gamma(t'<-t0) = "
                f"Gamma(t<-t0): minimum total constraint violation "
                f"{result.infeasibility:.6e} at relaxation {relaxation:.0e}"),
            residual=result.infeasibility)

    m = result.x.reshape(n, n)
    m = m / m.sum(axis=0, keepdims=True)
    residual = float(np.max(np.abs(m @ gp - gt)))
    if residual > WITNESS_RESIDUAL_TOL:
        # Defensive: the LP accepted a point the witness tolerance rejects.
        return DivisibilityVerdict(
            "indeterminate", certificate=(
                f"feasible LP point renormalized to residual {residual:.3e}, "
                f"worse than the witness tolerance {WITNESS_RESIDUAL_TOL:.0e}"),
            residual=residual)
    witness = TransitionMatrix(m, t=gamma_t.t, t0=gamma_tp.t)
    return DivisibilityVerdict("divisible", witness=witness, residual=residual)
