"""Core domain types: a point set with a metric, the utility-oracle interface,
and the combined utility-plus-diversity objective.

The objective maximized throughout this package is

    f(S) = g(S) + lam * div(S),      |S| <= k,

where ``g`` is a set-utility function queried through :class:`UtilityOracle`
and ``div(S)`` is the minimum pairwise distance within ``S`` (the diameter of
the whole ground set when ``|S| <= 1``, which makes ``div`` monotone
non-increasing under inclusion).
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .errors import InputError

METRIC_KINDS = ("matrix", "euclidean", "cosine")
SCHEDULES = ("geometric", "exhaustive")

#: Relative tolerance for comparisons of objective values.
VALUE_RTOL = 1e-9
#: Absolute slack allowed when validating the triangle inequality.
TRIANGLE_ATOL = 1e-9
#: Largest instance for which the O(n^3) triangle validation may run.
TRIANGLE_CHECK_MAX_N = 512


def canonical_subset(subset: Iterable[int], n: int) -> tuple[int, ...]:
    """Return ``subset`` as a sorted, deduplicated, range-checked index tuple."""
    s = tuple(sorted({int(i) for i in subset}))
    if s and (s[0] < 0 or s[-1] >= n):
        raise InputError(f"subset index out of range for ground set of size {n}: {s}")
    return s


class Instance:
    """Ground set of ``n`` points together with a metric.

    Three metric forms are supported:

    * ``"matrix"``   -- an explicit dense, symmetric, nonnegative distance matrix;
    * ``"euclidean"``-- coordinates in R^d under the Euclidean distance;
    * ``"cosine"``   -- unit vectors under ``dist(u, v) = 1 - <u, v>`` (rows are
      normalized on construction; note this distance may violate the triangle
      inequality, which is why the triangle check applies to matrices only).

    The full pairwise distance matrix is materialized lazily and cached, so
    memory grows as ``n**2``.  Instances are immutable after construction and
    safe to share across threads.
    """

    def __init__(
        self,
        metric: str,
        *,
        points: Sequence[Sequence[float]] | np.ndarray | None = None,
        matrix: Sequence[Sequence[float]] | np.ndarray | None = None,
        validate_triangle: bool = False,
    ):
        if metric not in METRIC_KINDS:
            raise InputError(f"unknown metric kind {metric!r}; expected one of {METRIC_KINDS}")
        self.metric = metric
        self._points: np.ndarray | None = None
        self._pairwise: np.ndarray | None = None
        self._sorted_pair_distances: np.ndarray | None = None
        self._d_max: float | None = None
        self._lock = threading.RLock()
        self.max_unit_deviation = 0.0

        if metric == "matrix":
            if matrix is None or points is not None:
                raise InputError("matrix metric requires 'matrix' and forbids 'points'")
            try:
                m = np.array(matrix, dtype=np.float64)
            except ValueError as exc:
                raise InputError(f"malformed distance matrix: {exc}") from exc
            self._validate_matrix(m, validate_triangle)
            m.setflags(write=False)
            self._pairwise = m
            self.n = m.shape[0]
        else:
            if points is None or matrix is not None:
                raise InputError(f"{metric} metric requires 'points' and forbids 'matrix'")
            try:
                p = np.array(points, dtype=np.float64)
            except ValueError as exc:
                raise InputError(f"malformed point list: {exc}") from exc
            if p.ndim != 2 or p.shape[0] < 1 or p.shape[1] < 1:
                raise InputError("points must be a nonempty 2-D array")
            if not np.isfinite(p).all():
                raise InputError("points must be finite")
            if metric == "cosine":
                norms = np.linalg.norm(p, axis=1)
                if (norms == 0).any():
                    raise InputError("cosine metric requires nonzero vectors")
                self.max_unit_deviation = float(np.abs(norms - 1.0).max())
                p = p / norms[:, None]
            p.setflags(write=False)
            self._points = p
            self.n = p.shape[0]

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_matrix(cls, matrix, validate_triangle: bool = False) -> "Instance":
        return cls("matrix", matrix=matrix, validate_triangle=validate_triangle)

    @classmethod
    def from_euclidean(cls, points) -> "Instance":
        return cls("euclidean", points=points)

    @classmethod
    def from_cosine(cls, points) -> "Instance":
        return cls("cosine", points=points)

    @property
    def points(self) -> np.ndarray | None:
        """Coordinates for euclidean/cosine instances; None for matrix instances."""
        return self._points

    # -- validation ---------------------------------------------------------

    @staticmethod
    def _validate_matrix(m: np.ndarray, validate_triangle: bool) -> None:
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise InputError("distance matrix must be square and nonempty")
        if not np.isfinite(m).all():
            raise InputError("distance matrix must be finite")
        if (np.diagonal(m) != 0.0).any():
            raise InputError("distance matrix must have an exactly zero diagonal")
        if not (m == m.T).all():
            raise InputError("distance matrix must be exactly symmetric")
        if (m < 0).any():
            raise InputError("distances must be nonnegative")
        if validate_triangle:
            Instance._validate_triangle(m)

    @staticmethod
    def _validate_triangle(m: np.ndarray) -> None:
        n = m.shape[0]
        if n > TRIANGLE_CHECK_MAX_N:
            raise InputError(
                f"triangle validation is an O(n^3) check limited to n <= {TRIANGLE_CHECK_MAX_N}"
            )
        for via in range(n):
            bound = m[:, via][:, None] + m[via, :][None, :]
            bad = m > bound + TRIANGLE_ATOL
            if bad.any():
                i, j = map(int, np.argwhere(bad)[0])
                raise InputError(
                    f"triangle inequality violated: dist({i},{j})={m[i, j]} > "
                    f"dist({i},{via})+dist({via},{j})={bound[i, j]}"
                )

    # -- distances ----------------------------------------------------------

    def distance_matrix(self) -> np.ndarray:
        """Full pairwise distance matrix (cached, read-only)."""
        if self._pairwise is None:
            with self._lock:
                if self._pairwise is None:
                    if self.metric == "euclidean":
                        d = squareform(pdist(self._points))
                    else:  # cosine; dist = 1 - dot on unit rows
                        d = 1.0 - self._points @ self._points.T
                        d = np.triu(d, 1)
                        d = d + d.T  # exact symmetry
                        np.maximum(d, 0.0, out=d)
                    d.setflags(write=False)
                    self._pairwise = d
        return self._pairwise

    def dist(self, i: int, j: int) -> float:
        if not (0 <= i < self.n and 0 <= j < self.n):
            raise InputError(f"point index out of range: ({i}, {j})")
        return float(self.distance_matrix()[i, j])

    def distance_row(self, i: int) -> np.ndarray:
        """Distances from point ``i`` to every point (read-only view)."""
        return self.distance_matrix()[i]

    def pair_distances_sorted(self) -> np.ndarray:
        """All n*(n-1)/2 pairwise distances, sorted ascending (cached)."""
        if self._sorted_pair_distances is None:
            with self._lock:
                if self._sorted_pair_distances is None:
                    m = self.distance_matrix()
                    vals = np.sort(m[np.triu_indices(self.n, 1)])
                    vals.setflags(write=False)
                    self._sorted_pair_distances = vals
        return self._sorted_pair_distances

    @property
    def d_max(self) -> float:
        """Diameter of the ground set; 0 when there are fewer than two points."""
        if self._d_max is None:
            vals = self.pair_distances_sorted()
            self._d_max = float(vals[-1]) if vals.size else 0.0
        return self._d_max

    def diametrical_pair(self) -> tuple[int, int]:
        """Lexicographically smallest pair (i < j) with dist(i, j) == d_max."""
        if self.n < 2:
            raise InputError("diametrical pair requires at least two points")
        iu, ju = np.triu_indices(self.n, 1)
        vals = self.distance_matrix()[iu, ju]
        pos = int(np.flatnonzero(vals == self.d_max)[0])
        return int(iu[pos]), int(ju[pos])


class QueryCounter:
    """Thread-safe monotone counter of value-oracle queries."""

    __slots__ = ("_lock", "_count")

    def __init__(self):
        self._lock = threading.Lock()
        self._count = 0

    def add(self, amount: int = 1) -> None:
        with self._lock:
            self._count += amount

    @property
    def count(self) -> int:
        return self._count


class UtilityOracle:
    """Base class for set-utility functions ``g`` queried by value.

    Accounting convention: every call to :meth:`evaluate` and every marginal
    gain (single or batched, one per candidate) counts as one value-oracle
    query, matching the usual oracle-complexity model in which ``g(S)`` is
    already known when a marginal ``g(S + v) - g(S)`` is requested.

    Subclasses implement ``_value`` and may override ``_marginal`` /
    ``_batch_marginal`` with faster kind-specific paths; those must agree with
    the plain value-difference computation.  All parameters are immutable
    after construction; the query counter is the only mutable state.
    """

    kind: str = "abstract"

    def __init__(self, n: int, *, monotone_declared: bool, submodular_declared: bool):
        if n < 1:
            raise InputError("utility requires a nonempty ground set")
        self.n = int(n)
        self.monotone_declared = bool(monotone_declared)
        self.submodular_declared = bool(submodular_declared)
        self._queries = QueryCounter()

    @property
    def query_count(self) -> int:
        return self._queries.count

    def evaluate(self, subset: Iterable[int]) -> float:
        """g(S).  Counts one query."""
        s = canonical_subset(subset, self.n)
        self._queries.add(1)
        return self._value(s)

    def marginal(self, v: int, subset: Iterable[int]) -> float:
        """g(S + v) - g(S) for v not in S.  Counts one query."""
        s = canonical_subset(subset, self.n)
        v = int(v)
        if not 0 <= v < self.n:
            raise InputError(f"point index out of range: {v}")
        if v in s:
            raise InputError(f"marginal gain requires v not in S; got v={v}")
        self._queries.add(1)
        return self._marginal(v, s)

    def batch_marginal(self, candidates: Sequence[int], subset: Iterable[int]) -> np.ndarray:
        """Marginal gain of each candidate against the same base set.

        Counts one query per candidate.
        """
        s = canonical_subset(subset, self.n)
        cand = np.asarray(candidates, dtype=np.intp)
        if cand.size and (cand.min() < 0 or cand.max() >= self.n):
            raise InputError("candidate index out of range")
        if set(map(int, cand)) & set(s):
            raise InputError("candidates must be disjoint from the base set")
        self._queries.add(int(cand.size))
        return np.asarray(self._batch_marginal(cand, s), dtype=np.float64)

    # -- kind-specific internals (no query accounting) -----------------------

    def _value(self, s: tuple[int, ...]) -> float:
        raise NotImplementedError

    def _marginal(self, v: int, s: tuple[int, ...]) -> float:
        with_v = tuple(sorted(s + (v,)))
        return self._value(with_v) - self._value(s)

    def _batch_marginal(self, cand: np.ndarray, s: tuple[int, ...]) -> np.ndarray:
        return np.array([self._marginal(int(v), s) for v in cand], dtype=np.float64)


@dataclass(frozen=True)
class Problem:
    """A solvable configuration: instance + utility + objective parameters.

    ``lam`` weighs the diversity term, ``k`` is the cardinality budget,
    ``epsilon`` controls the geometric threshold schedule, and ``schedule``
    chooses between the geometric grid and the exhaustive grid of all
    half-distances.
    """

    instance: Instance
    utility: UtilityOracle
    lam: float
    k: int
    epsilon: float = 0.1
    schedule: str = "geometric"

    def __post_init__(self):
        if self.utility.n != self.instance.n:
            raise InputError(
                f"utility is over {self.utility.n} points but instance has {self.instance.n}"
            )
        if not self.k >= 1:
            raise InputError(f"cardinality budget must be >= 1, got {self.k}")
        if self.k > self.instance.n:
            raise InputError(f"cardinality budget {self.k} exceeds ground set size {self.instance.n}")
        if not 0.0 < self.epsilon < 1.0:
            raise InputError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if not self.lam >= 0.0:
            raise InputError(f"lam must be nonnegative, got {self.lam}")
        if self.schedule not in SCHEDULES:
            raise InputError(f"unknown schedule {self.schedule!r}; expected one of {SCHEDULES}")

    def with_schedule(self, schedule: str) -> "Problem":
        return Problem(self.instance, self.utility, self.lam, self.k, self.epsilon, schedule)


@dataclass(frozen=True)
class Solution:
    """Result of one algorithm run.

    ``winning_threshold`` is the distance threshold whose candidate won
    (0.0 for the plain greedy pass, ``None`` when a diametrical pair or an
    algorithm without thresholds produced the set).  ``oracle_calls`` counts
    the utility value queries issued during the run.
    """

    selected: tuple[int, ...]
    f_value: float
    g_value: float
    div_value: float
    algorithm: str
    oracle_calls: int
    winning_threshold: float | None = None
    seed: int | None = None


def div(instance: Instance, subset: Iterable[int]) -> float:
    """Minimum pairwise distance within ``subset``.

    Returns the ground-set diameter for sets of size <= 1 (including the
    empty set), which keeps the function monotone non-increasing.
    """
    s = canonical_subset(subset, instance.n)
    if len(s) <= 1:
        return instance.d_max
    m = instance.distance_matrix()
    sub = m[np.ix_(s, s)]
    return float(sub[np.triu_indices(len(s), 1)].min())


def objective(problem: Problem, subset: Iterable[int]) -> tuple[float, float, float]:
    """Evaluate f(S) = g(S) + lam * div(S); returns ``(f, g, div)``.

    Issues exactly one utility query.
    """
    g = problem.utility.evaluate(subset)
    d = div(problem.instance, subset)
    return g + problem.lam * d, g, d


def distance_thresholds(problem: Problem) -> list[float]:
    """The list of distance thresholds swept by the threshold search.

    Geometric schedule: ``{(1+eps)^i * eps*d_max/2 : (1+eps)^i <= 2/eps}``,
    strictly increasing.  Exhaustive schedule: the sorted deduplicated set of
    half pairwise distances ``{dist(u, v)/2 : u != v}``.  Degenerate instances
    (fewer than two points, or diameter zero) yield an empty list.
    """
    inst = problem.instance
    if inst.n < 2 or inst.d_max == 0.0:
        return []
    if problem.schedule == "exhaustive":
        return [float(t) for t in np.unique(inst.pair_distances_sorted()) / 2.0]
    eps = problem.epsilon
    base = eps * inst.d_max / 2.0
    out: list[float] = []
    i = 0
    while (1.0 + eps) ** i <= 2.0 / eps:
        out.append((1.0 + eps) ** i * base)
        i += 1
    return out
