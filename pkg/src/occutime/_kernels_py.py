"""Pure-numpy path-simulation kernel (lockstep over active paths).

Bit-compatible with the compiled kernel for everything integer-valued: the
two backends consume identical counter-based uniforms per path, compare them
against the same shared tables, and therefore produce identical state
sequences, visit counts, terminal flags, and jump counts. Occupation times
can differ in the last ulp because numpy's vectorized log and libm's log are
not bit-identical.
"""

from __future__ import annotations

import numpy as np

from .rng import bulk_uniforms

NAME = "python"


def simulate_paths(keys, start, tot_rate, cum, kill_ratio, has_kill, max_jumps,
                   occ, visits, status, jumps):
    """Simulate one path per key, accumulating occupation times in place.

    Per step and per path the draw order is: holding-time uniform, then (only
    at states with a positive kill rate) a kill-test uniform, then a
    jump-target uniform. Status codes: 0 absorbed, 1 killed, 2 exceeded
    max_jumps.
    """
    m = keys.shape[0]
    n = tot_rate.shape[0]
    if m == 0:
        return
    state = np.full(m, start, dtype=np.int64)
    ctr = np.zeros(m, dtype=np.uint64)
    alive = np.arange(m)
    one = np.uint64(1)
    step = 0

    while alive.size:
        if step >= max_jumps:
            status[alive] = 2
            jumps[alive] = step
            break
        st = state[alive]
        u = bulk_uniforms(keys[alive], ctr[alive])
        ctr[alive] += one
        hold = -np.log(u) / tot_rate[st]
        occ[alive, st] += hold
        visits[alive, st] += 1
        step += 1

        km = has_kill[st] != 0
        if km.any():
            kidx = alive[km]
            uk = bulk_uniforms(keys[kidx], ctr[kidx])
            ctr[kidx] += one
            dead = uk <= kill_ratio[state[kidx]]
            died = kidx[dead]
            status[died] = 1
            jumps[died] = step
            keep = np.ones(alive.size, dtype=bool)
            keep[np.nonzero(km)[0][dead]] = False
            alive = alive[keep]
            st = state[alive]

        if alive.size == 0:
            break
        uj = bulk_uniforms(keys[alive], ctr[alive])
        ctr[alive] += one
        nxt = (uj[:, None] > cum[st]).sum(axis=1)
        absorbed = nxt >= n
        done = alive[absorbed]
        status[done] = 0
        jumps[done] = step
        cont = ~absorbed
        state[alive[cont]] = nxt[cont]
        alive = alive[cont]
