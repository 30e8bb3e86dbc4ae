"""Monte Carlo oracle: path sampling, change-of-measure weights, estimators.

Three independent estimators target the same joint Laplace transform and are
cross-checked against the determinant formulas:

* ``expweight``  - average exp(-d . occupation) over paths of the plain chain;
* ``kill``      - survival frequency of the chain with extra killing rates d;
* ``comweight`` - average change-of-measure weight over plain paths.

Reproducibility contract: estimates are a pure function of (seed, num_paths,
num_batches). Each batch owns a key derived from (seed, batch_index), each
path a key derived from (batch_key, index_in_batch), so neither thread count
nor scheduling can change any output bit.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import kernels, rng
from .errors import PathLengthExceeded
from .generators import GeneratorMatrix, embedded_chain, require_killing_reachable
from .transforms import validate_killing

DEFAULT_MAX_JUMPS = 10_000_000
DEFAULT_NUM_BATCHES = 100


class Terminal(str, Enum):
    ABSORBED = "absorbed"   # left through the generator's own exit rates
    KILLED = "killed"       # removed by the extra killing rates d


class Method(str, Enum):
    EXP_WEIGHT = "expweight"
    KILL_SURVIVAL = "kill"
    COM_WEIGHT = "comweight"


@dataclass(frozen=True)
class PathRecord:
    """One simulated trajectory.

    ``states[i]`` is held for ``holds[i]``; ``occupation`` accumulates the
    holds per state; ``jumps == len(states)`` counts the holds (the final
    jump leaves to the cemetery or is a kill).
    """

    states: tuple
    holds: np.ndarray
    occupation: np.ndarray
    terminal: Terminal
    jumps: int


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    num_paths: int
    seed: int
    num_batches: int


@dataclass(frozen=True)
class MomentEstimate:
    mean: np.ndarray
    mean_se: np.ndarray
    cov: np.ndarray
    cov_se: np.ndarray
    num_paths: int
    seed: int


def _tables(g: GeneratorMatrix, d: np.ndarray):
    """Shared sampling tables: total rates, jump CDF rows, kill ratios."""
    emb = embedded_chain(g)
    tot_rate = emb.hold + d
    cum = np.cumsum(emb.p, axis=1)
    # Conservative rows must never leak to the cemetery through cumsum
    # round-off: pin the tail at exactly 1 from the last positive entry on.
    for x in np.nonzero(emb.kill_prob == 0.0)[0]:
        last = int(np.nonzero(emb.p[x] > 0.0)[0][-1])
        cum[x, last:] = 1.0
    kill_ratio = np.where(tot_rate > 0.0, d / tot_rate, 0.0)
    has_kill = (d > 0.0).astype(np.uint8)
    return tot_rate, cum, kill_ratio, has_kill


# --- single-path sampling (records the full trajectory) --------------------

def _as_stream(rng_stream) -> rng.Stream:
    if isinstance(rng_stream, rng.Stream):
        return rng_stream
    return rng.Stream(int(rng_stream))


def _sample_one(g, d, start, stream, max_jumps):
    tot_rate, cum, kill_ratio, has_kill = _tables(g, d)
    n = g.n
    states = []
    holds = []
    occupation = np.zeros(n)
    state = start
    terminal = None
    while True:
        if len(states) >= max_jumps:
            raise PathLengthExceeded(max_jumps)
        u = stream.next_uniform()
        hold = -math.log(u) / tot_rate[state]
        states.append(state)
        holds.append(hold)
        occupation[state] += hold
        if has_kill[state]:
            if stream.next_uniform() <= kill_ratio[state]:
                terminal = Terminal.KILLED
                break
        u = stream.next_uniform()
        nxt = -1
        for y in range(n):
            if u <= cum[state, y]:
                nxt = y
                break
        if nxt < 0:
            terminal = Terminal.ABSORBED
            break
        state = nxt
    occupation.flags.writeable = False
    return PathRecord(states=tuple(states), holds=np.array(holds),
                      occupation=occupation, terminal=terminal,
                      jumps=len(states))


def sample_path(g: GeneratorMatrix, start: int, rng_stream,
                max_jumps: int = DEFAULT_MAX_JUMPS) -> PathRecord:
    """Sample one trajectory of the plain chain until absorption.

    Holding times at state x are Exponential(-q[x, x]); jump targets follow
    the embedded chain; the path ends on the jump to the cemetery.
    """
    _check_start(g, start)
    require_killing_reachable(g)
    return _sample_one(g, np.zeros(g.n), start, _as_stream(rng_stream), max_jumps)


def sample_killed_path(g: GeneratorMatrix, d, start: int, rng_stream,
                       max_jumps: int = DEFAULT_MAX_JUMPS) -> PathRecord:
    """Sample one trajectory of the chain with extra killing rates d.

    At state x the hold is Exponential(-q[x, x] + d[x]) and the exit is a
    kill with probability d[x] / (-q[x, x] + d[x]), independent of the jump
    target. With d = 0 this consumes the stream exactly like
    :func:`sample_path`.
    """
    _check_start(g, start)
    require_killing_reachable(g)
    d = validate_killing(d, g.n)
    return _sample_one(g, d, start, _as_stream(rng_stream), max_jumps)


def _check_start(g, start):
    if not (0 <= start < g.n):
        raise ValueError(f"start state {start} out of range 0..{g.n - 1}")


def path_weight(p: PathRecord, g: GeneratorMatrix, d) -> float:
    """Change-of-measure weight of a plain path, in (0, 1].

    Product over every visited state (final one included) of
    ``-q[x, x] / (-q[x, x] + d[x])``; averaging these weights over plain
    paths reproduces the killed-chain transform.
    """
    d = validate_killing(d, g.n)
    hold = -np.diag(g.q)
    w = 1.0
    for x in p.states:
        w *= hold[x] / (hold[x] + d[x])
    return w


# --- bulk simulation --------------------------------------------------------

def _batch_layout(num_paths: int, num_batches: int):
    nb = max(1, min(int(num_batches), num_paths))
    base, rem = divmod(num_paths, nb)
    sizes = np.full(nb, base, dtype=np.int64)
    sizes[:rem] += 1
    offsets = np.zeros(nb + 1, dtype=np.int64)
    np.cumsum(sizes, out=offsets[1:])
    return sizes, offsets


def _path_keys(seed: int, sizes: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    nb = sizes.shape[0]
    num_paths = int(offsets[-1])
    batch_keys = rng.bulk_derive_keys(seed, np.arange(nb))
    batch_of = np.repeat(np.arange(nb), sizes)
    in_batch = np.arange(num_paths) - offsets[:-1][batch_of]
    return rng.bulk_stream_values(batch_keys[batch_of], in_batch)


def _run_paths(g, d, start, num_paths, seed, num_batches, max_jumps, threads):
    _check_start(g, start)
    if num_paths < 1:
        raise ValueError("num_paths must be >= 1")
    require_killing_reachable(g)
    sizes, offsets = _batch_layout(num_paths, num_batches)
    keys = _path_keys(int(seed), sizes, offsets)
    tot_rate, cum, kill_ratio, has_kill = _tables(g, np.asarray(d, dtype=np.float64))

    n = g.n
    occ = np.zeros((num_paths, n))
    visits = np.zeros((num_paths, n), dtype=np.int64)
    status = np.full(num_paths, -1, dtype=np.int8)
    jumps = np.zeros(num_paths, dtype=np.int64)

    def run(lo, hi):
        kernels.simulate_paths(keys[lo:hi], start, tot_rate, cum, kill_ratio,
                               has_kill, max_jumps, occ[lo:hi], visits[lo:hi],
                               status[lo:hi], jumps[lo:hi])

    threads = max(1, int(threads))
    if threads == 1:
        run(0, num_paths)
    else:
        # chunk along batch boundaries; per-path work is independent, so the
        # chunking cannot change any result
        nb = sizes.shape[0]
        cuts = np.linspace(0, nb, num=min(threads, nb) + 1, dtype=np.int64)
        spans = [(int(offsets[a]), int(offsets[b]))
                 for a, b in zip(cuts[:-1], cuts[1:]) if a != b]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(lambda span: run(*span), spans))

    if np.any(status == 2):
        raise PathLengthExceeded(max_jumps, completed=int(np.sum(status != 2)))
    return occ, visits, status, jumps, sizes, offsets


def _batch_stats(values: np.ndarray, sizes: np.ndarray, offsets: np.ndarray):
    """Overall mean plus a standard error from per-batch means."""
    batch_sums = np.add.reduceat(values, offsets[:-1])
    mean = float(batch_sums.sum() / offsets[-1])
    nb = sizes.shape[0]
    if nb < 2:
        return mean, 0.0
    batch_means = batch_sums / sizes
    return mean, float(np.std(batch_means, ddof=1) / np.sqrt(nb))


def mc_transform(g: GeneratorMatrix, start: int, d, num_paths: int, seed: int,
                 method=Method.EXP_WEIGHT, *, num_batches: int = DEFAULT_NUM_BATCHES,
                 max_jumps: int = DEFAULT_MAX_JUMPS, threads: int = 1) -> McEstimate:
    """Monte Carlo estimate of the joint occupation-time Laplace transform.

    All three methods are unbiased for the same quantity; ``expweight`` and
    ``comweight`` reuse plain paths, ``kill`` simulates the killed chain and
    counts survivals (absorptions through the original exit rates).
    """
    method = Method(method)
    d = validate_killing(d, g.n)
    if method is Method.KILL_SURVIVAL:
        occ, visits, status, _, sizes, offsets = _run_paths(
            g, d, start, num_paths, seed, num_batches, max_jumps, threads)
        values = (status == 0).astype(np.float64)
    else:
        occ, visits, status, _, sizes, offsets = _run_paths(
            g, np.zeros(g.n), start, num_paths, seed, num_batches, max_jumps, threads)
        if method is Method.EXP_WEIGHT:
            values = np.exp(-(occ @ d))
        else:
            hold = -np.diag(g.q)
            log_factor = np.log(hold / (hold + d))
            values = np.exp(visits @ log_factor)
    mean, se = _batch_stats(values, sizes, offsets)
    return McEstimate(mean=mean, std_error=se, num_paths=num_paths,
                      seed=int(seed), num_batches=sizes.shape[0])


def empirical_moments(g: GeneratorMatrix, start: int, num_paths: int, seed: int,
                      *, num_batches: int = DEFAULT_NUM_BATCHES,
                      max_jumps: int = DEFAULT_MAX_JUMPS,
                      threads: int = 1) -> MomentEstimate:
    """Sample mean and covariance of the occupation vector (plain chain).

    Standard errors come from per-batch statistics; they are what the
    exact-formula cross-checks are measured against.
    """
    occ, _, _, _, sizes, offsets = _run_paths(
        g, np.zeros(g.n), start, num_paths, seed, num_batches, max_jumps, threads)
    nb = sizes.shape[0]
    batch_sums = np.add.reduceat(occ, offsets[:-1], axis=0)
    mean = batch_sums.sum(axis=0) / num_paths
    if nb > 1:
        batch_means = batch_sums / sizes[:, None]
        mean_se = np.std(batch_means, axis=0, ddof=1) / np.sqrt(nb)
    else:
        mean_se = np.zeros(g.n)

    if num_paths > 1:
        cov = np.atleast_2d(np.cov(occ, rowvar=False, ddof=1))
    else:
        cov = np.zeros((g.n, g.n))
    if nb > 1 and int(sizes.min()) > 1:
        batch_covs = np.stack([
            np.atleast_2d(np.cov(occ[offsets[b]:offsets[b + 1]], rowvar=False, ddof=1))
            for b in range(nb)
        ])
        cov_se = np.std(batch_covs, axis=0, ddof=1) / np.sqrt(nb)
    else:
        cov_se = np.full((g.n, g.n), np.nan)
    return MomentEstimate(mean=mean, mean_se=mean_se, cov=cov, cov_se=cov_se,
                          num_paths=num_paths, seed=int(seed))


def write_paths_csv(fh, g: GeneratorMatrix, start: int, num_paths: int, seed: int,
                    d=None, *, num_batches: int = DEFAULT_NUM_BATCHES,
                    max_jumps: int = DEFAULT_MAX_JUMPS, threads: int = 1) -> None:
    """Dump plain-chain paths: path_id, l_0..l_{n-1}, terminal, weight.

    The weight column is the change-of-measure weight at ``d`` (all ones
    when d = 0), so the dump doubles as raw material for re-weighted
    estimates.
    """
    d = np.zeros(g.n) if d is None else validate_killing(d, g.n)
    occ, visits, status, _, _, _ = _run_paths(
        g, np.zeros(g.n), start, num_paths, seed, num_batches, max_jumps, threads)
    hold = -np.diag(g.q)
    weights = np.exp(visits @ np.log(hold / (hold + d)))
    header = ["path_id"] + [f"l_{i}" for i in range(g.n)] + ["terminal", "weight"]
    fh.write(",".join(header) + "\n")
    for p in range(num_paths):
        cells = [str(p)]
        cells += [f"{x:.12g}" for x in occ[p]]
        cells.append(Terminal.ABSORBED.value if status[p] == 0 else Terminal.KILLED.value)
        cells.append(f"{weights[p]:.12g}")
        fh.write(",".join(cells) + "\n")
