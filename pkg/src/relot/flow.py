"""Dense bipartite flow primitives used by the transport solver.

Infinite costs are absent edges: both routines receive a boolean mask of
allowed (source, sink) pairs and never see a large-finite surrogate.
Augmentation amounts are minima of existing floats, so every augmentation
zeroes at least one supply, demand, or back-edge exactly and the loops
terminate without tolerance juggling.

Residual paths alternate forward edges i -> j (always open on the mask) and
backward edges j -> i (open while flow[i, j] > 0).  Reconstruction uses
``parent_sink[j] = i`` for the forward hop into j and ``parent_src[i] = j``
for the backward hop into i; BFS/Dijkstra seeds are exactly the sources with
remaining supply, which never receive a backward parent.
"""

from __future__ import annotations

import numpy as np


def _trace(parent_sink, parent_src, target):
    """Forward edges and backward edges of the augmenting path into target."""
    fwd = []
    back = []
    j = int(target)
    while True:
        i = int(parent_sink[j])
        fwd.append((i, j))
        j_prev = int(parent_src[i])
        if j_prev < 0:
            return fwd, back, i
        back.append((i, j_prev))
        j = j_prev


def _augment(flow, rem_s, rem_d, fwd, back, origin, target):
    amount = min(
        [rem_d[target], rem_s[origin]] + [flow[i, j] for i, j in back]
    )
    for i, j in fwd:
        flow[i, j] += amount
    for i, j in back:
        flow[i, j] -= amount
    rem_d[target] -= amount
    rem_s[origin] -= amount


def max_routable_mass(supply: np.ndarray, demand: np.ndarray,
                      mask: np.ndarray) -> tuple[float, np.ndarray]:
    """Maximum mass routable over allowed edges (augmenting BFS).

    Returns (routed total, flow matrix); the instance is feasible iff the
    routed total reaches the total supply.
    """
    supply = np.asarray(supply, dtype=float)
    demand = np.asarray(demand, dtype=float)
    n, m = mask.shape
    flow = np.zeros((n, m))
    rem_s = supply.copy()
    rem_d = demand.copy()

    while True:
        parent_sink = np.full(m, -1)
        parent_src = np.full(n, -1)
        seen_src = rem_s > 0.0
        seen_sink = np.zeros(m, dtype=bool)
        frontier = [int(i) for i in np.flatnonzero(seen_src)]
        target = -1
        while frontier and target < 0:
            next_frontier: list[int] = []
            for i in frontier:
                for j in np.flatnonzero(mask[i] & ~seen_sink):
                    j = int(j)
                    seen_sink[j] = True
                    parent_sink[j] = i
                    if rem_d[j] > 0.0:
                        target = j
                        break
                    next_frontier.append(j)
                if target >= 0:
                    break
            if target >= 0:
                break
            frontier = []
            for j in next_frontier:
                for i in np.flatnonzero((flow[:, j] > 0.0) & ~seen_src):
                    i = int(i)
                    seen_src[i] = True
                    parent_src[i] = j
                    frontier.append(i)
        if target < 0:
            break
        fwd, back, origin = _trace(parent_sink, parent_src, target)
        _augment(flow, rem_s, rem_d, fwd, back, origin, target)

    return float(supply.sum() - rem_s.sum()), flow


def min_cost_flow(supply: np.ndarray, demand: np.ndarray, cost: np.ndarray,
                  mask: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, float]:
    """Exact min-cost transportation by successive shortest paths.

    Returns (flow, u, v, routed) where (u, v) are optimal dual potentials:
    u_i + v_j <= cost_ij on allowed edges, with equality wherever flow > 0.
    Costs on allowed edges must be nonnegative and finite.
    """
    supply = np.asarray(supply, dtype=float)
    demand = np.asarray(demand, dtype=float)
    n, m = mask.shape
    flow = np.zeros((n, m))
    rem_s = supply.copy()
    rem_d = demand.copy()
    phi = np.zeros(n + m)  # node potentials: sources 0..n-1, sinks n..n+m-1

    while np.any(rem_s > 0.0):
        dist = np.full(n + m, np.inf)
        dist[:n][rem_s > 0.0] = 0.0
        visited = np.zeros(n + m, dtype=bool)
        parent_sink = np.full(m, -1)
        parent_src = np.full(n, -1)
        target = -1

        while True:
            cand = np.where(visited, np.inf, dist)
            node = int(np.argmin(cand))
            if not np.isfinite(cand[node]):
                break
            visited[node] = True
            if node >= n and rem_d[node - n] > 0.0:
                target = node - n
                break
            if node < n:
                i = node
                nd = dist[i] + cost[i] + phi[i] - phi[n:]
                upd = mask[i] & ~visited[n:] & (nd < dist[n:])
                if np.any(upd):
                    dist[n:][upd] = nd[upd]
                    parent_sink[upd] = i
            else:
                j = node - n
                nd = dist[n + j] - cost[:, j] + phi[n + j] - phi[:n]
                upd = (flow[:, j] > 0.0) & ~visited[:n] & (nd < dist[:n])
                if np.any(upd):
                    dist[:n][upd] = nd[upd]
                    parent_src[upd] = j

        if target < 0:
            break  # some remaining supply cannot reach an open sink
        phi += np.minimum(dist, dist[n + target])
        fwd, back, origin = _trace(parent_sink, parent_src, target)
        _augment(flow, rem_s, rem_d, fwd, back, origin, target)

    return flow, -phi[:n], phi[n:].copy(), float(supply.sum() - rem_s.sum())
