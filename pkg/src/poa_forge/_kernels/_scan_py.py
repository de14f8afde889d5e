"""Pure-Python allocation scan (fallback backend).

Walks every joint allocation in mixed-radix order (last agent is the least
significant digit), maintaining congestion counts and welfare incrementally,
and flags pure Nash equilibria by a direct unilateral-deviation scan.
Python lists are used instead of numpy indexing inside the loop; scalar
numpy access would be several times slower.
"""

from __future__ import annotations

import numpy as np

_REFRESH = 4096  # full welfare recompute period (bounds additive drift)


def scan_allocations(radices, act_offsets, act_items, agent_base, values,
                     f_ext, w_ext, tol):
    """Scan all allocations; returns (welfare, is_ne) arrays of length prod(radices).

    radices[i]      -- number of actions of agent i
    agent_base[i]   -- index of agent i's first action in the action table
    act_offsets/act_items -- CSR layout of action -> resource ids
    values          -- resource values, f_ext/w_ext -- f and w on 0..n+1
    tol             -- strict-improvement threshold for the deviation scan
    """
    n_agents = len(radices)
    m = len(values)
    radices = [int(r) for r in radices]
    agent_base = [int(v) for v in agent_base]
    off = [int(v) for v in act_offsets]
    items = [int(v) for v in act_items]
    vals = [float(v) for v in values]
    f = [float(v) for v in f_ext]
    w = [float(v) for v in w_ext]

    total = 1
    for r in radices:
        total *= r
    welfare = np.empty(total, dtype=np.float64)
    is_ne = np.zeros(total, dtype=np.uint8)

    digits = [0] * n_agents
    counts = [0] * m
    marks = [0] * m
    agents = range(n_agents)

    def action_slice(i, d):
        k = agent_base[i] + d
        return items[off[k]:off[k + 1]]

    wsum = 0.0
    for i in agents:
        for r in action_slice(i, 0):
            c = counts[r]
            counts[r] = c + 1
            wsum += vals[r] * (w[c + 1] - w[c])

    for t in range(total):
        if t % _REFRESH == 0 and t:
            wsum = 0.0
            for r in range(m):
                if counts[r]:
                    wsum += vals[r] * w[counts[r]]
        welfare[t] = wsum

        ne = 1
        for i in agents:
            cur = action_slice(i, digits[i])
            u_cur = 0.0
            for r in cur:
                u_cur += vals[r] * f[counts[r]]
                marks[r] = 1
            base = agent_base[i]
            for d in range(radices[i]):
                if d == digits[i]:
                    continue
                u_alt = 0.0
                for r in items[off[base + d]:off[base + d + 1]]:
                    u_alt += vals[r] * f[counts[r] + 1 - marks[r]]
                if u_alt > u_cur + tol:
                    ne = 0
                    break
            for r in cur:
                marks[r] = 0
            if not ne:
                break
        is_ne[t] = ne

        # mixed-radix odometer: advance, updating counts and welfare
        i = n_agents - 1
        while i >= 0:
            for r in action_slice(i, digits[i]):
                c = counts[r]
                counts[r] = c - 1
                wsum += vals[r] * (w[c - 1] - w[c])
            digits[i] += 1
            if digits[i] < radices[i]:
                for r in action_slice(i, digits[i]):
                    c = counts[r]
                    counts[r] = c + 1
                    wsum += vals[r] * (w[c + 1] - w[c])
                break
            digits[i] = 0
            for r in action_slice(i, 0):
                c = counts[r]
                counts[r] = c + 1
                wsum += vals[r] * (w[c + 1] - w[c])
            i -= 1

    return welfare, is_ne
