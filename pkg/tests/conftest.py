"""Shared fixtures: canonical generators, corpus builders, determinant oracle."""

import numpy as np
import pytest

from occutime import validate_generator
from occutime.generators import killing_reachable

# Canonical test matrices, reused across all modules. Both have
# det(-Q) == 1 by construction (hand cofactor expansion).
FIX_BD = [[-1.0, 1.0], [0.5, -1.5]]
FIX_SF = [[-1.0, 1.0, 0.0], [0.5, -1.5, 1.0], [0.4, 0.1, -1.5]]


@pytest.fixture
def g_bd():
    return validate_generator(FIX_BD)


@pytest.fixture
def g_sf():
    return validate_generator(FIX_SF)


def det_cofactor(m):
    """Recursive cofactor expansion along the first row (oracle, n <= ~8)."""
    m = np.asarray(m, dtype=float)
    n = m.shape[0]
    if n == 1:
        return float(m[0, 0])
    total = 0.0
    for j in range(n):
        if m[0, j] == 0.0:
            continue
        sub = np.delete(m[1:], j, axis=1)
        total += (-1.0) ** j * m[0, j] * det_cofactor(sub)
    return total


def make_skipfree(n, rng, strict=None):
    """Random skip-free sub-generator.

    Interior rows are conservative (all mass stays inside 0..n-1), the top
    row has a positive exit rate. ``strict=True`` guarantees at least one
    below-band entry, ``strict=False`` forbids them (tridiagonal output).
    """
    assert n >= 2
    q = np.zeros((n, n))
    for i in range(n - 1):
        q[i, i + 1] = rng.uniform(0.5, 2.0)
    for i in range(1, n):
        for j in range(i):
            below_band = j < i - 1
            if below_band and strict is False:
                continue
            if rng.random() < (0.35 if below_band else 0.7):
                q[i, j] = rng.uniform(0.1, 1.0)
    if strict and n >= 3:
        if not any(q[i, j] > 0 for i in range(2, n) for j in range(i - 1)):
            i = int(rng.integers(2, n))
            j = int(rng.integers(0, i - 1))
            q[i, j] = rng.uniform(0.1, 1.0)
    diag = -q.sum(axis=1)
    diag[n - 1] -= rng.uniform(0.5, 2.0)
    np.fill_diagonal(q, diag)
    return validate_generator(q)


def make_tridiagonal(n, rng):
    """Random birth-death sub-generator with positive rates both ways."""
    q = np.zeros((n, n))
    for i in range(n - 1):
        q[i, i + 1] = rng.uniform(0.5, 2.0)
        q[i + 1, i] = rng.uniform(0.1, 1.5)
    diag = -q.sum(axis=1)
    diag[n - 1] -= rng.uniform(0.5, 2.0)
    np.fill_diagonal(q, diag)
    return validate_generator(q)


def make_general(n, rng):
    """Random dense sub-generator with killing reachable from every state."""
    while True:
        mask = rng.random((n, n)) < 0.6
        q = rng.uniform(0.1, 1.0, (n, n)) * mask
        np.fill_diagonal(q, 0.0)
        exit_rate = np.zeros(n)
        for i in range(n):
            if rng.random() < 0.4:
                exit_rate[i] = rng.uniform(0.3, 1.5)
        if exit_rate.max() == 0.0:
            exit_rate[int(rng.integers(0, n))] = rng.uniform(0.3, 1.5)
        diag = -(q.sum(axis=1) + exit_rate)
        if np.any(diag >= 0.0):
            continue
        np.fill_diagonal(q, diag)
        g = validate_generator(q)
        if killing_reachable(g):
            return g
