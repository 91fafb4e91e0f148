"""Selection algorithms.

* :func:`greedy_independent_set` -- budget-capped greedy over the points at
  distance >= d from the current selection (the candidates form an independent
  set of the intersection graph with edges between pairs closer than d).
* :func:`gist` -- best-of search over the d = 0 greedy, a diametrical pair,
  and one greedy independent set per distance threshold in the schedule.
* :func:`simple_baseline` -- only the two extreme candidates (d = 0 greedy and
  the diametrical pair).
* :func:`classic_greedy` -- marginal-gain greedy on the full objective f that
  stops once every remaining gain is negative, then returns its best prefix.
* :func:`random_baseline` -- best prefix of a uniformly random ordered
  k-sample.

All tie-breaking is by lowest index.  Given identical inputs (and seed where
applicable), every algorithm is deterministic.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import Instance, Problem, Solution, UtilityOracle, distance_thresholds, objective
from .errors import InputError


@dataclass(frozen=True)
class AlgoConfig:
    """Execution knobs that must not change results.

    ``parallel_thresholds`` fans the per-threshold greedy runs of :func:`gist`
    out to a thread pool; outputs are identical to sequential execution.
    """

    parallel_thresholds: bool = False
    max_workers: int | None = None


def greedy_independent_set(
    instance: Instance, utility: UtilityOracle, d: float, k: int
) -> list[int]:
    """Greedy maximal independent set at distance threshold ``d``, capped at ``k``.

    Repeatedly adds the candidate with the largest utility marginal gain
    (ties to the lowest index) among points at distance >= d from everything
    selected so far.  Stops at ``k`` points or when no candidate remains, in
    which case the selection is a maximal independent set of the
    distance-< d intersection graph.  Returns indices in selection order.
    """
    if k < 1:
        raise InputError("budget k must be >= 1")
    if d < 0:
        raise InputError("distance threshold must be nonnegative")
    if utility.n != instance.n:
        raise InputError("utility and instance sizes differ")
    n = instance.n
    selected: list[int] = []
    in_set = np.zeros(n, dtype=bool)
    # dist(v, S); +inf sentinel while S is empty (only ever compared, never
    # used in arithmetic)
    min_dist = np.full(n, np.inf)
    for _ in range(k):
        cand = np.flatnonzero(~in_set & (min_dist >= d))
        if cand.size == 0:
            break
        gains = utility.batch_marginal(cand, selected)
        t = int(cand[int(np.argmax(gains))])
        selected.append(t)
        in_set[t] = True
        np.minimum(min_dist, instance.distance_row(t), out=min_dist)
    return selected


def _sweep_thresholds(
    problem: Problem, thresholds: list[float], config: AlgoConfig
) -> tuple[list[list[int]], np.ndarray]:
    """Greedy independent sets for a threshold list, deduplicated.

    Thresholds separated by no pairwise distance induce the same intersection
    graph, and the greedy run depends on the threshold only through
    dist >= d comparisons, so such duplicates share a single run.  Returns
    the distinct selections plus the index of each threshold's selection.
    """
    inst = problem.instance
    keys = np.searchsorted(inst.pair_distances_sorted(), np.asarray(thresholds), side="left")
    unique_keys, inverse = np.unique(keys, return_inverse=True)
    first_index = {}
    for pos, key in enumerate(keys):
        first_index.setdefault(int(key), pos)
    reps = [thresholds[first_index[int(key)]] for key in unique_keys]

    def run(d: float) -> list[int]:
        return greedy_independent_set(inst, problem.utility, d, problem.k)

    if config.parallel_thresholds and len(reps) > 1:
        with ThreadPoolExecutor(max_workers=config.max_workers) as pool:
            results = list(pool.map(run, reps))
    else:
        results = [run(d) for d in reps]
    return results, inverse


class _BestOf:
    """Running argmax over candidates with non-strict updates.

    Among equal-valued candidates the one offered last wins, matching the
    sequential threshold sweep and independent of evaluation order.
    """

    def __init__(self):
        self.best = None

    def offer(self, sel: list[int], threshold: float | None, value: tuple[float, float, float]):
        f, g, d = value
        if self.best is None or f >= self.best[0]:
            self.best = (f, g, d, threshold, sel)

    def solution(self, problem: Problem, algorithm: str, oracle_start: int) -> Solution:
        f, g, d, threshold, sel = self.best
        return Solution(
            selected=tuple(sorted(sel)),
            f_value=f,
            g_value=g,
            div_value=d,
            algorithm=algorithm,
            oracle_calls=problem.utility.query_count - oracle_start,
            winning_threshold=threshold,
        )


def gist(problem: Problem, config: AlgoConfig | None = None) -> Solution:
    """Threshold-sweep search returning the best candidate by objective value.

    Candidates, in order: the d = 0 greedy (plain utility greedy), a
    diametrical pair when k >= 2, and one greedy independent set per distance
    threshold in the problem's schedule.  Thresholds producing identical
    selections share one greedy run and one objective evaluation.  The
    reported ``winning_threshold`` is the threshold of the winning candidate
    (0.0 for the greedy pass, ``None`` for the diametrical pair).
    """
    config = config or AlgoConfig()
    inst, util = problem.instance, problem.utility
    start = util.query_count
    best = _BestOf()
    s0 = greedy_independent_set(inst, util, 0.0, problem.k)
    best.offer(s0, 0.0, objective(problem, s0))
    if problem.k >= 2 and inst.n >= 2:
        pair = list(inst.diametrical_pair())
        best.offer(pair, None, objective(problem, pair))
    thresholds = distance_thresholds(problem)
    if thresholds:
        selections, inverse = _sweep_thresholds(problem, thresholds, config)
        values = [objective(problem, sel) for sel in selections]
        for pos, d in enumerate(thresholds):
            idx = int(inverse[pos])
            best.offer(selections[idx], d, values[idx])
    label = "gist" if problem.schedule == "geometric" else "gist-exhaustive"
    return best.solution(problem, label, start)


def simple_baseline(problem: Problem) -> Solution:
    """Best of the two extreme candidates: utility-only greedy and a
    diametrical pair (skipped when k < 2)."""
    inst, util = problem.instance, problem.utility
    start = util.query_count
    best = _BestOf()
    s0 = greedy_independent_set(inst, util, 0.0, problem.k)
    best.offer(s0, 0.0, objective(problem, s0))
    if problem.k >= 2 and inst.n >= 2:
        pair = list(inst.diametrical_pair())
        best.offer(pair, None, objective(problem, pair))
    return best.solution(problem, "simple", start)


def classic_greedy(problem: Problem) -> Solution:
    """Marginal-gain greedy on the full objective f.

    Each step adds the point with the largest f-gain (utility marginal plus
    the weighted drop in diversity), ties to the lowest index.  The first
    point is always taken; afterwards the loop stops as soon as the best
    available gain is negative.  Returns the best prefix of the built chain
    (earliest prefix on ties).
    """
    inst, util, lam = problem.instance, problem.utility, problem.lam
    start = util.query_count
    n = inst.n
    g_cur = util.evaluate(())
    div_cur = inst.d_max
    min_dist = np.full(n, np.inf)
    in_set = np.zeros(n, dtype=bool)
    order: list[int] = []
    f_prefix: list[float] = []
    g_prefix: list[float] = []
    div_prefix: list[float] = []
    for step in range(min(problem.k, n)):
        cand = np.flatnonzero(~in_set)
        g_gains = util.batch_marginal(cand, order)
        new_div = np.minimum(div_cur, min_dist[cand])
        gains = g_gains + lam * (new_div - div_cur)
        pos = int(np.argmax(gains))
        if step > 0 and gains[pos] < 0:
            break
        t = int(cand[pos])
        order.append(t)
        in_set[t] = True
        g_cur = g_cur + float(g_gains[pos])
        div_cur = float(min(div_cur, min_dist[t]))
        np.minimum(min_dist, inst.distance_row(t), out=min_dist)
        f_prefix.append(g_cur + lam * div_cur)
        g_prefix.append(g_cur)
        div_prefix.append(div_cur)
    best = int(np.argmax(f_prefix))
    return Solution(
        selected=tuple(sorted(order[: best + 1])),
        f_value=f_prefix[best],
        g_value=g_prefix[best],
        div_value=div_prefix[best],
        algorithm="greedy",
        oracle_calls=util.query_count - start,
    )


def random_baseline(problem: Problem, seed: int = 0) -> Solution:
    """Best prefix of a uniformly random ordered k-sample (seeded).

    Draws k points without replacement in random order, evaluates the
    objective on every prefix, and returns the best one (earliest on ties).
    """
    inst, util, lam = problem.instance, problem.utility, problem.lam
    start = util.query_count
    rng = np.random.default_rng(seed)
    order = [int(v) for v in rng.permutation(inst.n)[: problem.k]]
    div_cur = inst.d_max
    f_prefix: list[float] = []
    g_prefix: list[float] = []
    div_prefix: list[float] = []
    for t, v in enumerate(order):
        if t >= 1:
            div_cur = min(div_cur, float(inst.distance_row(v)[order[:t]].min()))
        g = util.evaluate(order[: t + 1])
        f_prefix.append(g + lam * div_cur)
        g_prefix.append(g)
        div_prefix.append(div_cur)
    best = int(np.argmax(f_prefix))
    return Solution(
        selected=tuple(sorted(order[: best + 1])),
        f_value=f_prefix[best],
        g_value=g_prefix[best],
        div_value=div_prefix[best],
        algorithm="random",
        oracle_calls=util.query_count - start,
        seed=seed,
    )
