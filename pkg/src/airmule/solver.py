"""GTSP solvers.

solve_exact enumerates cluster orders with the depot fixed first and
picks vertices by dynamic programming over the layered sequence, with
branch-and-bound pruning; it is the optimality oracle for small
instances.  solve_glns is an adaptive large neighborhood search in the
style of GLNS: removal and insertion heuristics with adaptive weights,
simulated-annealing acceptance and a cluster-reoptimization move that
re-picks vertices along a fixed cluster order.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass

import numpy as np

from .errors import Infeasible, InstanceTooLarge, NoFeasibleTour
from .graph import ClusteredGraph

# Stand-in for infinite edges inside the heuristic search only; a final
# tour using one of these is rejected.
BIG = 1e9

_MODE_ITER_FACTOR = {"fast": 30, "default": 60, "slow": 150}
_BASE_ITERS = 300
_COOLING = 0.9987
_SEGMENT = 100  # iterations between weight updates
_NOISE = 0.25
_SIGMA_BEST, _SIGMA_BETTER, _SIGMA_ACCEPTED = 10.0, 6.0, 3.0
_REACTION = 0.5
_MIN_WEIGHT = 0.05


@dataclass(frozen=True)
class GtspTour:
    """Cyclic tour, one vertex per cluster, depot vertex first."""

    vertices: tuple[int, ...]
    cost: float


@dataclass(frozen=True)
class SolverParams:
    mode: str = "default"
    time_budget: float = 600.0
    restarts: int = 3
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.mode not in _MODE_ITER_FACTOR:
            raise ValueError(f"unknown solver mode {self.mode!r}")
        if self.time_budget <= 0:
            raise ValueError("time_budget must be positive")
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")


def tour_cost(g: ClusteredGraph, tour: GtspTour) -> float:
    """Sum of cycle edge costs; inf when any edge is infeasible."""
    vs = tour.vertices
    total = 0.0
    for idx, u in enumerate(vs):
        total += float(g.cost[u, vs[(idx + 1) % len(vs)]])
    return total


def _as_tour(g: ClusteredGraph, vertices: list[int]) -> GtspTour:
    tour = GtspTour(tuple(int(v) for v in vertices), 0.0)
    return GtspTour(tour.vertices, tour_cost(g, tour))


def solve_exact(g: ClusteredGraph, cluster_cap: int = 8) -> GtspTour:
    """Globally optimal tour via depth-first order enumeration plus DP."""
    m = len(g.clusters) - 1
    if m > cluster_cap:
        raise InstanceTooLarge(
            f"{m} clusters exceed the exact-solver cap of {cluster_cap}")

    cost = g.cost
    members = [np.asarray(c, dtype=np.intp) for c in g.clusters]
    best_cost = math.inf
    best_order: list[int] = []
    best_last = -1
    best_parents: list[np.ndarray] = []

    order: list[int] = []
    parents: list[np.ndarray] = []

    def dfs(remaining: list[int], dp: np.ndarray) -> None:
        nonlocal best_cost, best_order, best_last, best_parents
        if not remaining:
            closing = dp + cost[members[order[-1]], 0]
            idx = int(np.argmin(closing))
            total = float(closing[idx])
            if total < best_cost:
                best_cost = total
                best_order = order.copy()
                best_last = idx
                best_parents = [p.copy() for p in parents]
            return
        for pick, c in enumerate(remaining):
            trans = dp[:, None] + cost[np.ix_(members[order[-1]], members[c])]
            dp2 = trans.min(axis=0)
            if float(dp2.min()) >= best_cost:
                continue
            order.append(c)
            parents.append(trans.argmin(axis=0))
            dfs(remaining[:pick] + remaining[pick + 1:], dp2)
            order.pop()
            parents.pop()

    all_clusters = list(range(1, m + 1))
    for pick, c in enumerate(all_clusters):
        dp0 = cost[0, members[c]].astype(float)
        if float(dp0.min()) >= best_cost:
            continue
        order.append(c)
        dfs(all_clusters[:pick] + all_clusters[pick + 1:], dp0)
        order.pop()

    if not math.isfinite(best_cost):
        raise Infeasible("every cluster ordering hits an infeasible edge")

    picks = [0] * len(best_order)
    picks[-1] = best_last
    for level in range(len(best_order) - 2, -1, -1):
        picks[level] = int(best_parents[level][picks[level + 1]])
    vertices = [0] + [int(members[c][i]) for c, i in zip(best_order, picks)]
    return _as_tour(g, vertices)


def _layered_dp(mat: np.ndarray, members: list[np.ndarray],
                order: list[int]) -> tuple[float, dict[int, int]]:
    """Best vertex per cluster for a fixed cyclic cluster order.

    The order must start with the depot cluster; returns the cycle cost
    and a cluster -> vertex id mapping.
    """
    dp = mat[0, members[order[1]]].astype(float)
    parent: list[np.ndarray] = []
    for c_prev, c in zip(order[1:], order[2:]):
        trans = dp[:, None] + mat[np.ix_(members[c_prev], members[c])]
        dp = trans.min(axis=0)
        parent.append(trans.argmin(axis=0))
    closing = dp + mat[members[order[-1]], 0]
    idx = int(np.argmin(closing))
    total = float(closing[idx])
    choice = {0: 0}
    for c, par in zip(reversed(order[2:]), reversed(parent)):
        choice[c] = int(members[c][idx])
        idx = int(par[idx])
    choice[order[1]] = int(members[order[1]][idx])
    return total, choice


class _Search:
    """Mutable ALNS state for one restart."""

    def __init__(self, g: ClusteredGraph, pmat: np.ndarray,
                 rng: random.Random) -> None:
        self.g = g
        self.pmat = pmat
        self.rng = rng
        self.members = [np.asarray(c, dtype=np.intp) for c in g.clusters]
        self.order: list[int] = [0]
        self.choice: dict[int, int] = {0: 0}

    def tour_vertices(self) -> list[int]:
        return [self.choice[c] for c in self.order]

    def cost(self) -> float:
        vs = np.array(self.tour_vertices(), dtype=np.intp)
        return float(self.pmat[vs, np.roll(vs, -1)].sum())

    def best_insertion(self, cluster: int) -> tuple[float, int, int]:
        """Cheapest (delta, position, vertex) insertion of a cluster."""
        verts = self.members[cluster]
        tour = np.array(self.tour_vertices(), dtype=np.intp)
        if len(tour) == 1:
            enter = self.pmat[0, verts] + self.pmat[verts, 0]
            k = int(np.argmin(enter))
            return float(enter[k]), 0, int(verts[k])
        succ = np.roll(tour, -1)
        delta = (self.pmat[np.ix_(tour, verts)]
                 + self.pmat[np.ix_(verts, succ)].T
                 - self.pmat[tour, succ][:, None])
        pos, k = np.unravel_index(int(np.argmin(delta)), delta.shape)
        return float(delta[pos, k]), int(pos), int(verts[k])

    def insert(self, cluster: int, pos: int, vertex: int) -> None:
        self.order.insert(pos + 1, cluster)
        self.choice[cluster] = vertex

    def remove_clusters(self, removed: list[int]) -> None:
        gone = set(removed)
        self.order = [c for c in self.order if c not in gone]
        for c in removed:
            del self.choice[c]

    def construct(self) -> None:
        """Greedy cheapest-insertion construction from scratch."""
        self.order = [0]
        self.choice = {0: 0}
        remaining = list(range(1, len(self.members)))
        while remaining:
            best = None
            for c in remaining:
                delta, pos, vertex = self.best_insertion(c)
                if best is None or delta < best[0]:
                    best = (delta, c, pos, vertex)
            _, c, pos, vertex = best
            self.insert(c, pos, vertex)
            remaining.remove(c)

    def reoptimize_vertices(self) -> None:
        if len(self.order) < 2:
            return
        _, choice = _layered_dp(self.pmat, self.members, self.order)
        self.choice = choice

    def _relocate_to_local_opt(self, deadline: float) -> None:
        improved = True
        while improved and time.monotonic() <= deadline:
            improved = False
            base = self.cost()
            for c in list(self.order[1:]):
                snap = self.snapshot()
                self.remove_clusters([c])
                _, pos, vertex = self.best_insertion(c)
                self.insert(c, pos, vertex)
                self.reoptimize_vertices()
                if self.cost() < base - 1e-12:
                    improved = True
                    break
                self.restore(snap)

    def polish(self, deadline: float) -> None:
        """Single-cluster relocations with vertex re-pick to local optimum.

        Costs are direction-dependent, so the reversed cluster order is a
        distinct candidate that relocations cannot reach; polish both
        directions and keep the cheaper end state.
        """
        self.reoptimize_vertices()
        if len(self.order) < 3:
            return
        self._relocate_to_local_opt(deadline)
        fwd = self.snapshot()
        fwd_cost = self.cost()
        rev = [0] + self.order[:0:-1]
        _, choice = _layered_dp(self.pmat, self.members, rev)
        self.order = rev
        self.choice = choice
        self._relocate_to_local_opt(deadline)
        if self.cost() >= fwd_cost - 1e-12:
            self.restore(fwd)

    def snapshot(self) -> tuple[list[int], dict[int, int]]:
        return self.order.copy(), self.choice.copy()

    def restore(self, snap: tuple[list[int], dict[int, int]]) -> None:
        self.order = snap[0].copy()
        self.choice = snap[1].copy()

    # Removal heuristics.  Each returns the removed cluster list.

    def remove_segment(self, count: int) -> list[int]:
        ring = self.order[1:]
        start = self.rng.randrange(len(ring))
        removed = [ring[(start + k) % len(ring)] for k in range(count)]
        self.remove_clusters(removed)
        return removed

    def remove_distance(self, count: int) -> list[int]:
        ring = self.order[1:]
        seed = self.rng.choice(ring)
        sv = self.choice[seed]
        scored = []
        for c in ring:
            v = self.choice[c]
            d = min(float(self.pmat[sv, v]), float(self.pmat[v, sv]))
            scored.append((d, c))
        scored.sort()
        removed = [c for _, c in scored[:count]]
        self.remove_clusters(removed)
        return removed

    def remove_worst(self, count: int) -> list[int]:
        tour = self.tour_vertices()
        scored = []
        for pos in range(1, len(self.order)):
            prev_v = tour[pos - 1]
            v = tour[pos]
            next_v = tour[(pos + 1) % len(tour)]
            gain = (float(self.pmat[prev_v, v]) + float(self.pmat[v, next_v])
                    - float(self.pmat[prev_v, next_v]))
            noisy = gain * (1.0 + _NOISE * self.rng.random())
            scored.append((-noisy, self.order[pos]))
        scored.sort()
        removed = [c for _, c in scored[:count]]
        self.remove_clusters(removed)
        return removed

    # Insertion heuristics.  Each inserts every removed cluster.

    def insert_cheapest(self, removed: list[int]) -> None:
        remaining = sorted(removed)
        while remaining:
            best = None
            for c in remaining:
                delta, pos, vertex = self.best_insertion(c)
                if best is None or delta < best[0]:
                    best = (delta, c, pos, vertex)
            _, c, pos, vertex = best
            self.insert(c, pos, vertex)
            remaining.remove(c)

    def noisy_insertion(self, cluster: int) -> tuple[float, int, int]:
        """Like best_insertion but with per-position multiplicative noise."""
        verts = self.members[cluster]
        tour = np.array(self.tour_vertices(), dtype=np.intp)
        if len(tour) == 1:
            enter = self.pmat[0, verts] + self.pmat[verts, 0]
            k = int(np.argmin(enter))
            return float(enter[k]), 0, int(verts[k])
        succ = np.roll(tour, -1)
        delta = (self.pmat[np.ix_(tour, verts)]
                 + self.pmat[np.ix_(verts, succ)].T
                 - self.pmat[tour, succ][:, None])
        noise = np.array([1.0 + _NOISE * self.rng.random()
                          for _ in range(len(tour))])
        noised = delta * noise[:, None]
        pos, k = np.unravel_index(int(np.argmin(noised)), noised.shape)
        return float(noised[pos, k]), int(pos), int(verts[k])

    def insert_noisy(self, removed: list[int]) -> None:
        remaining = sorted(removed)
        while remaining:
            best = None
            for c in remaining:
                delta, pos, vertex = self.noisy_insertion(c)
                if best is None or delta < best[0]:
                    best = (delta, c, pos, vertex)
            _, c, pos, vertex = best
            self.insert(c, pos, vertex)
            remaining.remove(c)

    def insert_nearest(self, removed: list[int]) -> None:
        remaining = sorted(removed)
        while remaining:
            tour = np.array(self.tour_vertices(), dtype=np.intp)
            best = None
            for c in remaining:
                verts = self.members[c]
                prox = min(float(self.pmat[np.ix_(tour, verts)].min()),
                           float(self.pmat[np.ix_(verts, tour)].min()))
                if best is None or prox < best[0]:
                    best = (prox, c)
            c = best[1]
            _, pos, vertex = self.best_insertion(c)
            self.insert(c, pos, vertex)
            remaining.remove(c)

    def insert_random(self, removed: list[int]) -> None:
        """Random cluster into a random position, best vertex for it."""
        remaining = sorted(removed)
        while remaining:
            c = remaining[self.rng.randrange(len(remaining))]
            verts = self.members[c]
            tour = self.tour_vertices()
            pos = self.rng.randrange(len(tour))
            a = tour[pos]
            b = tour[(pos + 1) % len(tour)]
            enter = self.pmat[a, verts] + self.pmat[verts, b] - self.pmat[a, b]
            k = int(np.argmin(enter))
            self.insert(c, pos, int(verts[k]))
            remaining.remove(c)


def _roulette(weights: list[float], rng: random.Random) -> int:
    total = sum(weights)
    pick = rng.random() * total
    acc = 0.0
    for idx, w in enumerate(weights):
        acc += w
        if pick < acc:
            return idx
    return len(weights) - 1


def solve_glns(g: ClusteredGraph, params: SolverParams | None = None) -> GtspTour:
    """Adaptive large neighborhood search over the clustered graph."""
    params = params or SolverParams()
    m = len(g.clusters) - 1
    pmat = np.where(np.isfinite(g.cost), g.cost, BIG)
    iterations = _MODE_ITER_FACTOR[params.mode] * m + _BASE_ITERS
    deadline = time.monotonic() + params.time_budget

    best_vertices: list[int] | None = None
    best_true = math.inf

    for restart in range(params.restarts):
        rng = random.Random(params.rng_seed * 1000003 + restart)
        search = _Search(g, pmat, rng)
        search.construct()
        search.reoptimize_vertices()
        cur_cost = search.cost()
        restart_best = search.snapshot()
        restart_best_cost = cur_cost

        removal_ops = [_Search.remove_segment, _Search.remove_distance,
                       _Search.remove_worst]
        insertion_ops = [_Search.insert_cheapest, _Search.insert_noisy,
                         _Search.insert_nearest, _Search.insert_random]
        w_rm = [1.0] * len(removal_ops)
        w_ins = [1.0] * len(insertion_ops)
        score_rm = [0.0] * len(removal_ops)
        score_ins = [0.0] * len(insertion_ops)
        tries_rm = [0] * len(removal_ops)
        tries_ins = [0] * len(insertion_ops)

        temperature = 0.05 * cur_cost / math.log(2.0)
        lo = 1
        hi = min(m, max(2, int(round(0.3 * m))))

        for it in range(iterations):
            if time.monotonic() > deadline:
                break
            r_idx = _roulette(w_rm, rng)
            i_idx = _roulette(w_ins, rng)
            tries_rm[r_idx] += 1
            tries_ins[i_idx] += 1

            snap = search.snapshot()
            count = rng.randint(lo, min(hi, m))
            removed = removal_ops[r_idx](search, count)
            insertion_ops[i_idx](search, removed)
            # Vertex choice (battery level) dominates cost here, so every
            # candidate order is evaluated with its DP-optimal vertices.
            search.reoptimize_vertices()
            cand_cost = search.cost()

            sigma = 0.0
            accept = False
            if cand_cost < restart_best_cost:
                sigma, accept = _SIGMA_BEST, True
            elif cand_cost < cur_cost:
                sigma, accept = _SIGMA_BETTER, True
            elif temperature > 0 and \
                    rng.random() < math.exp(-(cand_cost - cur_cost) / temperature):
                sigma, accept = _SIGMA_ACCEPTED, True

            if accept:
                cur_cost = cand_cost
                if cand_cost < restart_best_cost:
                    restart_best_cost = cand_cost
                    restart_best = search.snapshot()
            else:
                search.restore(snap)

            if sigma:
                score_rm[r_idx] += sigma
                score_ins[i_idx] += sigma

            temperature *= _COOLING
            if it % _SEGMENT == _SEGMENT - 1:
                for k in range(len(w_rm)):
                    if tries_rm[k]:
                        w_rm[k] = max(_MIN_WEIGHT, (1 - _REACTION) * w_rm[k]
                                      + _REACTION * score_rm[k] / tries_rm[k])
                for k in range(len(w_ins)):
                    if tries_ins[k]:
                        w_ins[k] = max(_MIN_WEIGHT, (1 - _REACTION) * w_ins[k]
                                       + _REACTION * score_ins[k] / tries_ins[k])
                score_rm = [0.0] * len(w_rm)
                score_ins = [0.0] * len(w_ins)
                tries_rm = [0] * len(w_rm)
                tries_ins = [0] * len(w_ins)

        search.restore(restart_best)
        search.polish(deadline)
        vertices = search.tour_vertices()
        true_cost = tour_cost(g, GtspTour(tuple(vertices), 0.0))
        if true_cost < best_true:
            best_true = true_cost
            best_vertices = vertices
        if time.monotonic() > deadline:
            break

    if best_vertices is None or not math.isfinite(best_true):
        raise NoFeasibleTour(
            "no feasible tour found; every candidate kept an infeasible edge")
    return _as_tour(g, best_vertices)
