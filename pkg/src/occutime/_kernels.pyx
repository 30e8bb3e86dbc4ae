# cython: boundscheck=False, wraparound=False, nonecheck=False, cdivision=True
# cython: language_level=3
"""Compiled path-simulation kernel; scalar twin of _kernels_py.

Same counter-based uniforms, same draw order, same comparisons; runs the
per-path loop in C with the GIL released so batches can be simulated on
worker threads.
"""

from libc.math cimport log
from libc.stdint cimport int64_t, int8_t, uint8_t, uint64_t

NAME = "compiled"

cdef uint64_t GOLDEN = <uint64_t>0x9E3779B97F4A7C15
cdef uint64_t MIX1 = <uint64_t>0xBF58476D1CE4E5B9
cdef uint64_t MIX2 = <uint64_t>0x94D049BB133111EB
cdef double INV53 = 1.0 / 9007199254740992.0


cdef inline double _u01(uint64_t key, uint64_t c) noexcept nogil:
    cdef uint64_t z = key + GOLDEN * (c + <uint64_t>1)
    z ^= z >> 30
    z *= MIX1
    z ^= z >> 27
    z *= MIX2
    z ^= z >> 31
    return <double>((z >> 11) + <uint64_t>1) * INV53


def simulate_paths(uint64_t[::1] keys, Py_ssize_t start, double[::1] tot_rate,
                   double[:, ::1] cum, double[::1] kill_ratio,
                   uint8_t[::1] has_kill, long long max_jumps,
                   double[:, ::1] occ, int64_t[:, ::1] visits,
                   int8_t[::1] status, int64_t[::1] jumps):
    """Simulate one path per key; see the pure-Python twin for semantics."""
    cdef Py_ssize_t m = keys.shape[0]
    cdef Py_ssize_t n = tot_rate.shape[0]
    cdef Py_ssize_t p, y, state, nxt
    cdef uint64_t key, c
    cdef long long nj
    cdef double u
    cdef int8_t code

    with nogil:
        for p in range(m):
            key = keys[p]
            c = 0
            nj = 0
            state = start
            code = -1
            while True:
                if nj >= max_jumps:
                    code = 2
                    break
                u = _u01(key, c)
                c += 1
                occ[p, state] += -log(u) / tot_rate[state]
                visits[p, state] += 1
                nj += 1
                if has_kill[state]:
                    u = _u01(key, c)
                    c += 1
                    if u <= kill_ratio[state]:
                        code = 1
                        break
                u = _u01(key, c)
                c += 1
                nxt = -1
                for y in range(n):
                    if u <= cum[state, y]:
                        nxt = y
                        break
                if nxt < 0:
                    code = 0
                    break
                state = nxt
            status[p] = code
            jumps[p] = nj
