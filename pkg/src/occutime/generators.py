"""Generator matrices of finite killed Markov chains.

A chain on states 0..n-1 is described by an n x n rate matrix Q with
non-negative off-diagonal entries and non-positive row sums. Row-sum
deficits are exit rates to an absorbing cemetery state; a matrix whose rows
all sum to zero is a full conservative generator. The skip-free chains of
interest move up by at most one state at a time and exit only from the top
state, so hitting the (virtual) state n forces a visit to every state on
the way.

All record types here are immutable after construction and safe to share
across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    NoKillingReachable,
    NonNegativeOffDiagonalViolation,
    NotConservative,
    NotTridiagonal,
    PositiveRowSum,
    ValidationError,
    ZeroBackRate,
    ZeroDiagonal,
)
from .linalg import as_square

#: Structural-zero tolerance; inputs are user-supplied decimals, so exact
#: zeros are expected and the tolerance only guards serialization noise.
ZERO_TOL = 1e-12


class GeneratorKind(str, Enum):
    FULL_CONSERVATIVE = "full"
    SUB_GENERATOR = "sub"


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class GeneratorMatrix:
    """A validated rate matrix with its structural classification.

    Attributes
    ----------
    n : int
        Dimension.
    q : ndarray, shape (n, n), read-only
        Rates, units 1/time.
    kind : GeneratorKind
        Full conservative generator or principal sub-generator.
    exit : ndarray, shape (n,), read-only
        Per-row rate of leaving the retained state set (negative row sum,
        clamped to exact zero below the structural tolerance).
    skip_free : bool
        True iff the matrix is the upper principal block of a skip-free
        generator: no entries above the first superdiagonal, positive
        superdiagonal, interior rows conservative, and a positive exit rate
        from the top state (which plays the role of the rate into state n).
    tridiagonal : bool
        True iff all entries with |i - j| >= 2 vanish structurally.
    strictly_skip_free : bool
        Skip-free but not tridiagonal (some downward jump of size >= 2).
    zero_tol : float
        Tolerance used for all structural-zero decisions above.
    """

    n: int
    q: np.ndarray
    kind: GeneratorKind
    exit: np.ndarray
    skip_free: bool
    tridiagonal: bool
    strictly_skip_free: bool
    zero_tol: float


@dataclass(frozen=True)
class EmbeddedChain:
    """Jump chain of a generator: transition probabilities and holding rates.

    ``p[x, y]`` is the probability that the next state is y given a jump
    from x (``p[x, x] == 0``); ``hold[x] == -q[x, x]`` is the holding rate;
    ``kill_prob[x]`` is the per-jump probability of leaving to the cemetery.
    Rows satisfy ``p.sum(axis=1) + kill_prob == 1`` and the generator is
    recovered as ``Q = Q_diag @ (I - P)``.
    """

    p: np.ndarray
    hold: np.ndarray
    kill_prob: np.ndarray

    @property
    def n(self) -> int:
        return self.hold.shape[0]


@dataclass(frozen=True)
class SymmetrizedGenerator:
    """Diagonal conjugation of a tridiagonal generator to a symmetric matrix.

    ``qstar[i, j] = q[i, j] * sqrt(pi[i] / pi[j])`` where ``pi`` solves
    detailed balance (normalized so ``pi[0] == 1``). Exists iff the source
    is tridiagonal with positive coupling rates both ways.
    """

    qstar: np.ndarray
    pi: np.ndarray


def validate_generator(raw_matrix, kind=GeneratorKind.SUB_GENERATOR,
                       zero_tol: float = ZERO_TOL) -> GeneratorMatrix:
    """Validate a rate matrix and classify its structure.

    Parameters
    ----------
    raw_matrix : array-like, shape (n, n)
        Finite real entries.
    kind : GeneratorKind or str
        "sub" (default) for a principal sub-generator whose row-sum deficits
        are exit rates, "full" for a conservative generator (all row sums
        zero).

    Raises
    ------
    NonNegativeOffDiagonalViolation, PositiveRowSum, ZeroDiagonal,
    NotConservative
        Each names the offending row/column.
    """
    kind = GeneratorKind(kind)
    q = as_square(raw_matrix, "generator")
    n = q.shape[0]

    off = q.copy()
    np.fill_diagonal(off, 0.0)
    bad = np.argwhere(off < -zero_tol)
    if bad.size:
        i, j = map(int, bad[0])
        raise NonNegativeOffDiagonalViolation(i, j, q[i, j])

    row_sums = q.sum(axis=1)
    high = np.nonzero(row_sums > zero_tol)[0]
    if high.size:
        i = int(high[0])
        raise PositiveRowSum(i, float(row_sums[i]))

    diag = np.diag(q)
    dead = np.nonzero(diag >= -zero_tol)[0]
    if dead.size:
        raise ZeroDiagonal(int(dead[0]))

    exit_rate = -row_sums
    exit_rate[np.abs(exit_rate) <= zero_tol] = 0.0
    if kind is GeneratorKind.FULL_CONSERVATIVE and np.any(exit_rate > 0.0):
        i = int(np.nonzero(exit_rate > 0.0)[0][0])
        raise NotConservative(i, float(exit_rate[i]))

    above_band = _above_band_max(q)
    below_band = _below_band_max(q)
    tridiagonal = above_band <= zero_tol and below_band <= zero_tol
    super_pos = n == 1 or bool(np.all(np.diag(q, 1) > zero_tol))
    # Skip-free means "upper block of a generator with q_{i,i+1} > 0 and
    # conservative rows": interior rows keep all their mass inside 0..n-1,
    # only the top row leaks (to state n).
    skip_free = bool(
        kind is GeneratorKind.SUB_GENERATOR
        and above_band <= zero_tol
        and super_pos
        and np.all(exit_rate[:n - 1] == 0.0)
        and exit_rate[n - 1] > zero_tol
    )

    return GeneratorMatrix(
        n=n,
        q=_frozen(q),
        kind=kind,
        exit=_frozen(exit_rate),
        skip_free=skip_free,
        tridiagonal=tridiagonal,
        strictly_skip_free=skip_free and not tridiagonal,
        zero_tol=zero_tol,
    )


def _above_band_max(q: np.ndarray) -> float:
    n = q.shape[0]
    if n < 3:
        return 0.0
    return max(float(np.max(np.abs(np.diag(q, k)))) for k in range(2, n))


def _below_band_max(q: np.ndarray) -> float:
    n = q.shape[0]
    if n < 3:
        return 0.0
    return max(float(np.max(np.abs(np.diag(q, -k)))) for k in range(2, n))


def principal_submatrix(g: GeneratorMatrix, m: int) -> GeneratorMatrix:
    """Upper-left m x m block of ``g``, revalidated as a sub-generator."""
    if not (1 <= m <= g.n):
        raise ValueError(f"submatrix size {m} out of range 1..{g.n}")
    return validate_generator(g.q[:m, :m], GeneratorKind.SUB_GENERATOR, g.zero_tol)


def embedded_chain(g: GeneratorMatrix) -> EmbeddedChain:
    """Jump-chain decomposition of a validated generator."""
    hold = -np.diag(g.q)
    p = g.q / hold[:, None]
    np.fill_diagonal(p, 0.0)
    kill_prob = g.exit / hold
    return EmbeddedChain(p=_frozen(p), hold=_frozen(hold), kill_prob=_frozen(kill_prob))


def is_tridiagonal(g: GeneratorMatrix) -> bool:
    """True iff every entry with |i - j| >= 2 is a structural zero."""
    return g.tridiagonal


def find_violation_index(g: GeneratorMatrix):
    """Smallest row i with a positive rate q[i, j] for some j <= i - 2.

    Returns None when there is no such row; for skip-free generators this is
    exactly the tridiagonality test.
    """
    q = g.q
    for i in range(2, g.n):
        if np.any(q[i, :i - 1] > g.zero_tol):
            return i
    return None


def symmetrize(g: GeneratorMatrix) -> SymmetrizedGenerator:
    """Conjugate a tridiagonal generator to a symmetric matrix.

    Detailed balance ``pi[i] q[i, i+1] == pi[i+1] q[i+1, i]`` fixes the
    reversing measure up to scale (we pin ``pi[0] = 1``; only ratios enter
    the conjugation). The result has ``sqrt(q[i, i+1] * q[i+1, i])`` on the
    off-diagonals and the original diagonal.

    Raises
    ------
    NotTridiagonal
        A generator is diagonally conjugate to a symmetric matrix iff it is
        tridiagonal (birth-death).
    ZeroBackRate
        Some downward rate q[i+1, i] vanishes, so detailed balance has no
        positive solution.
    """
    if not g.tridiagonal:
        raise NotTridiagonal(f"violation at row {find_violation_index(g)} "
                             "or above the band")
    n, q = g.n, g.q
    up = np.diag(q, 1) if n > 1 else np.empty(0)
    down = np.diag(q, -1) if n > 1 else np.empty(0)
    zero_down = np.nonzero(down <= g.zero_tol)[0]
    if zero_down.size:
        raise ZeroBackRate(int(zero_down[0]) + 1)
    if np.any(up <= g.zero_tol):
        i = int(np.nonzero(up <= g.zero_tol)[0][0])
        raise ValidationError(f"q[{i}, {i + 1}] = 0; detailed balance is undefined")

    pi = np.ones(n)
    for i in range(n - 1):
        pi[i + 1] = pi[i] * up[i] / down[i]
    root = np.sqrt(pi)
    qstar = q * root[:, None] / root[None, :]
    qstar = 0.5 * (qstar + qstar.T)  # kill last-ulp asymmetry
    return SymmetrizedGenerator(qstar=_frozen(qstar), pi=_frozen(pi))


def killing_reachable(g: GeneratorMatrix) -> bool:
    """Can every state reach a state with positive exit rate?

    Reachability is taken in the embedded-jump graph (edges with positive
    rate). This is the almost-sure-absorption requirement for occupation
    times to be finite.
    """
    return not _unreachable_states(g)


def require_killing_reachable(g: GeneratorMatrix) -> None:
    if not killing_reachable(g):
        raise NoKillingReachable(_unreachable_states(g))


def _unreachable_states(g: GeneratorMatrix) -> list:
    kill_states = np.nonzero(g.exit > 0.0)[0]
    if kill_states.size == 0:
        return list(range(g.n))
    adj = g.q > g.zero_tol
    reached = np.zeros(g.n, dtype=bool)
    reached[kill_states] = True
    frontier = list(kill_states)
    while frontier:
        y = frontier.pop()
        preds = np.nonzero(adj[:, y] & ~reached)[0]
        reached[preds] = True
        frontier.extend(int(i) for i in preds)
    return np.nonzero(~reached)[0].tolist()


# --- JSON interface -------------------------------------------------------
# Schema: {"n": int, "q": [[row-major reals]], "kind": "sub"|"full"}.
# Exit rates are derived, never serialized.

def generator_to_json(g: GeneratorMatrix) -> dict:
    return {"n": g.n, "q": g.q.tolist(), "kind": g.kind.value}


def generator_from_json(obj: dict, zero_tol: float = ZERO_TOL) -> GeneratorMatrix:
    try:
        n = int(obj["n"])
        q = obj["q"]
        kind = obj.get("kind", "sub")
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"generator JSON missing field: {exc}") from exc
    q = np.asarray(q, dtype=np.float64)
    if q.shape != (n, n):
        raise ValidationError(f"declared n = {n} but q has shape {q.shape}")
    return validate_generator(q, kind, zero_tol)


def load_generator(path, zero_tol: float = ZERO_TOL) -> GeneratorMatrix:
    with open(path, "r", encoding="utf-8") as fh:
        obj = json.load(fh)
    return generator_from_json(obj, zero_tol)
