# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled allocation scan; mirrors _scan_py exactly."""

import numpy as np

DEF REFRESH = 4096


def scan_allocations(radices, act_offsets, act_items, agent_base, values,
                     f_ext, w_ext, double tol):
    cdef long long[::1] rad = np.ascontiguousarray(radices, dtype=np.int64)
    cdef long long[::1] off = np.ascontiguousarray(act_offsets, dtype=np.int64)
    cdef long long[::1] items = np.ascontiguousarray(act_items, dtype=np.int64)
    cdef long long[::1] base = np.ascontiguousarray(agent_base, dtype=np.int64)
    cdef double[::1] vals = np.ascontiguousarray(values, dtype=np.float64)
    cdef double[::1] f = np.ascontiguousarray(f_ext, dtype=np.float64)
    cdef double[::1] w = np.ascontiguousarray(w_ext, dtype=np.float64)

    cdef Py_ssize_t n_agents = rad.shape[0]
    cdef Py_ssize_t m = vals.shape[0]
    cdef long long total = 1
    cdef Py_ssize_t i, d, k, r
    for i in range(n_agents):
        total *= rad[i]

    welfare_arr = np.empty(total, dtype=np.float64)
    ne_arr = np.zeros(total, dtype=np.uint8)
    cdef double[::1] welfare = welfare_arr
    cdef unsigned char[::1] is_ne = ne_arr

    digits_arr = np.zeros(n_agents, dtype=np.int64)
    counts_arr = np.zeros(m, dtype=np.int64)
    marks_arr = np.zeros(m, dtype=np.int64)
    cdef long long[::1] digits = digits_arr
    cdef long long[::1] counts = counts_arr
    cdef long long[::1] marks = marks_arr

    cdef double wsum = 0.0, u_cur, u_alt
    cdef long long t, c
    cdef Py_ssize_t a0, a1, cur0, cur1
    cdef int ne

    for i in range(n_agents):
        k = base[i]
        for a0 in range(off[k], off[k + 1]):
            r = items[a0]
            c = counts[r]
            counts[r] = c + 1
            wsum += vals[r] * (w[c + 1] - w[c])

    for t in range(total):
        if t % REFRESH == 0 and t:
            wsum = 0.0
            for r in range(m):
                if counts[r]:
                    wsum += vals[r] * w[counts[r]]
        welfare[t] = wsum

        ne = 1
        for i in range(n_agents):
            k = base[i] + digits[i]
            cur0 = off[k]
            cur1 = off[k + 1]
            u_cur = 0.0
            for a0 in range(cur0, cur1):
                r = items[a0]
                u_cur += vals[r] * f[counts[r]]
                marks[r] = 1
            for d in range(rad[i]):
                if d == digits[i]:
                    continue
                k = base[i] + d
                u_alt = 0.0
                for a0 in range(off[k], off[k + 1]):
                    r = items[a0]
                    u_alt += vals[r] * f[counts[r] + 1 - marks[r]]
                if u_alt > u_cur + tol:
                    ne = 0
                    break
            for a0 in range(cur0, cur1):
                marks[items[a0]] = 0
            if ne == 0:
                break
        is_ne[t] = ne

        i = n_agents - 1
        while i >= 0:
            k = base[i] + digits[i]
            for a0 in range(off[k], off[k + 1]):
                r = items[a0]
                c = counts[r]
                counts[r] = c - 1
                wsum += vals[r] * (w[c - 1] - w[c])
            digits[i] += 1
            if digits[i] < rad[i]:
                k = base[i] + digits[i]
                for a0 in range(off[k], off[k + 1]):
                    r = items[a0]
                    c = counts[r]
                    counts[r] = c + 1
                    wsum += vals[r] * (w[c + 1] - w[c])
                break
            digits[i] = 0
            k = base[i]
            for a0 in range(off[k], off[k + 1]):
                r = items[a0]
                c = counts[r]
                counts[r] = c + 1
                wsum += vals[r] * (w[c + 1] - w[c])
            i -= 1

    return welfare_arr, ne_arr
