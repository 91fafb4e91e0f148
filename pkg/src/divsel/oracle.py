"""Exact exponential-time solvers used as ground truth in ratio tests."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .core import Instance, Problem, UtilityOracle
from .errors import DegenerateRatioError, SizeGuardError

#: Refuse to enumerate more nonempty subsets than this.
SUBSET_GUARD = 10_000_000


@dataclass(frozen=True)
class ExactResult:
    """Optimum from exhaustive enumeration.

    ``feasible`` is False only for the constrained solver when no nonempty
    subset meets the diversity floor (then ``opt_value`` is None and the
    witness is empty).
    """

    opt_value: float | None
    witness: tuple[int, ...]
    subsets_examined: int
    feasible: bool = True


def _guard(n: int, k: int) -> None:
    total = sum(math.comb(n, t) for t in range(1, k + 1))
    if total > SUBSET_GUARD:
        raise SizeGuardError(
            f"{total} subsets of size <= {k} over {n} points exceeds the guard of {SUBSET_GUARD}"
        )


def brute_force_opt(problem: Problem) -> ExactResult:
    """Maximize f over every nonempty subset of size <= k.

    Ties prefer the lexicographically smallest witness tuple.
    """
    inst, util, lam, k = problem.instance, problem.utility, problem.lam, problem.k
    _guard(inst.n, k)
    rows = inst.distance_matrix().tolist()
    d_max = inst.d_max
    best_f = None
    best: tuple[int, ...] | None = None
    examined = 0
    for size in range(1, k + 1):
        for combo in itertools.combinations(range(inst.n), size):
            examined += 1
            g = util.evaluate(combo)
            if size == 1:
                dv = d_max
            else:
                dv = min(
                    rows[combo[a]][combo[b]]
                    for a in range(size)
                    for b in range(a + 1, size)
                )
            f = g + lam * dv
            if best_f is None or f > best_f or (f == best_f and combo < best):
                best_f, best = f, combo
    return ExactResult(opt_value=best_f, witness=best, subsets_examined=examined)


def brute_force_constrained(
    instance: Instance, utility: UtilityOracle, d: float, k: int
) -> ExactResult:
    """Maximize g over subsets of size <= k whose diversity is at least ``d``.

    Singletons have diversity equal to the ground-set diameter, so they are
    feasible iff d <= d_max; when even singletons fail the result is flagged
    infeasible rather than falling back to the empty set.
    """
    _guard(instance.n, k)
    rows = instance.distance_matrix().tolist()
    singleton_ok = d <= instance.d_max
    best_g = None
    best: tuple[int, ...] | None = None
    examined = 0
    for size in range(1, k + 1):
        for combo in itertools.combinations(range(instance.n), size):
            examined += 1
            if size == 1:
                if not singleton_ok:
                    continue
            else:
                dv = min(
                    rows[combo[a]][combo[b]]
                    for a in range(size)
                    for b in range(a + 1, size)
                )
                if not dv >= d:
                    continue
            g = utility.evaluate(combo)
            if best_g is None or g > best_g or (g == best_g and combo < best):
                best_g, best = g, combo
    if best is None:
        return ExactResult(opt_value=None, witness=(), subsets_examined=examined, feasible=False)
    return ExactResult(opt_value=best_g, witness=best, subsets_examined=examined)


def ratio_report(problem: Problem, solution) -> float:
    """Algorithm value divided by the brute-force optimum.

    A zero optimum with a zero algorithm value reports 1.0; a zero optimum
    with a nonzero algorithm value is flagged as degenerate.
    """
    exact = brute_force_opt(problem)
    if exact.opt_value == 0.0:
        if solution.f_value == 0.0:
            return 1.0
        raise DegenerateRatioError(
            f"optimum is 0 but algorithm value is {solution.f_value}"
        )
    return solution.f_value / exact.opt_value
