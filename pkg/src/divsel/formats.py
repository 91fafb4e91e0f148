"""JSON file formats.

Instance file::

    { "n": int, "metric": "euclidean" | "cosine" | "matrix",
      "points": [[float, ...], ...]   # euclidean / cosine
      "matrix": [[float, ...], ...]   # matrix
      "provenance": {...}  }          # optional, ignored on load

Exactly one of ``points`` / ``matrix`` must be present, matching the metric.

Utility file::

    { "kind": "linear",            "weights": [float, ...] }
    { "kind": "coverage",          "family": [[int, ...], ...], "universe_size": int? }
    { "kind": "budget_additive",   "weights": [...], "alpha": f, "beta": f, "k": int? }
    { "kind": "margin_similarity", "uncertainty": [...], "edges": [[i, j, s], ...],
                                   "alpha_s": f, "beta_s": f }
    { "kind": "constant_zero",     "n": int }

A budget-additive utility may omit ``k``; the loader then binds the cap to
the budget supplied at solve time.

Embeddings file: JSON lines, one record per point::

    { "embedding": [float, ...], "uncertainty": float }

Graph file:: ``{ "n": int, "edges": [[u, v], ...] }``

Set-family file:: ``{ "family": [[int, ...], ...], "groups": [int, ...]? }``
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .core import Instance, UtilityOracle
from .errors import FormatError, InputError
from .generators import Graph
from .utilities import (
    BudgetAdditiveUtility,
    ConstantZeroUtility,
    CoverageUtility,
    LinearUtility,
    MarginSimilarityUtility,
)

UTILITY_KINDS = ("linear", "coverage", "budget_additive", "margin_similarity", "constant_zero")


def _read_json(path: str | Path) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"cannot parse {path}: {exc}") from exc


def _write_json(obj: Any, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def save_instance(instance: Instance, path: str | Path, provenance: dict | None = None) -> None:
    doc: dict[str, Any] = {"n": instance.n, "metric": instance.metric}
    if instance.metric == "matrix":
        doc["matrix"] = instance.distance_matrix().tolist()
    else:
        doc["points"] = instance.points.tolist()
    if provenance is not None:
        doc["provenance"] = provenance
    _write_json(doc, path)


def load_instance(path: str | Path, validate_triangle: bool = False) -> Instance:
    doc = _read_json(path)
    if not isinstance(doc, dict):
        raise FormatError(f"{path}: instance document must be a JSON object")
    try:
        metric = doc["metric"]
        n = int(doc["n"])
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"{path}: missing or invalid 'metric'/'n'") from exc
    has_points = "points" in doc
    has_matrix = "matrix" in doc
    try:
        if metric == "matrix":
            if not has_matrix or has_points:
                raise FormatError(f"{path}: matrix metric requires 'matrix' and no 'points'")
            inst = Instance.from_matrix(doc["matrix"], validate_triangle=validate_triangle)
        elif metric in ("euclidean", "cosine"):
            if not has_points or has_matrix:
                raise FormatError(f"{path}: {metric} metric requires 'points' and no 'matrix'")
            inst = Instance(metric, points=doc["points"])
        else:
            raise FormatError(f"{path}: unknown metric {metric!r}")
    except InputError as exc:
        raise FormatError(f"{path}: invalid instance data: {exc}") from exc
    if inst.n != n:
        raise FormatError(f"{path}: declared n={n} but found {inst.n} points")
    return inst


def utility_to_dict(utility: UtilityOracle) -> dict[str, Any]:
    if isinstance(utility, LinearUtility):
        return {"kind": "linear", "weights": utility.weights.tolist()}
    if isinstance(utility, CoverageUtility):
        return {
            "kind": "coverage",
            "family": [sorted(s) for s in utility.family],
            "universe_size": utility.universe_size,
        }
    if isinstance(utility, BudgetAdditiveUtility):
        return {
            "kind": "budget_additive",
            "weights": utility.weights.tolist(),
            "alpha": utility.alpha,
            "beta": utility.beta,
            "k": utility.k,
        }
    if isinstance(utility, MarginSimilarityUtility):
        if utility._sim is not None:
            raise FormatError("dense-similarity utilities are not serializable; use an edge list")
        return {
            "kind": "margin_similarity",
            "uncertainty": utility.uncertainty.tolist(),
            "edges": [[i, j, s] for i, j, s in utility.edges],
            "alpha_s": utility.alpha_s,
            "beta_s": utility.beta_s,
        }
    if isinstance(utility, ConstantZeroUtility):
        return {"kind": "constant_zero", "n": utility.n}
    raise FormatError(f"utility kind {utility.kind!r} is not serializable")


def save_utility(utility: UtilityOracle, path: str | Path, provenance: dict | None = None) -> None:
    doc = utility_to_dict(utility)
    if provenance is not None:
        doc["provenance"] = provenance
    _write_json(doc, path)


def utility_from_dict(doc: dict[str, Any], bind_k: int | None = None) -> UtilityOracle:
    if not isinstance(doc, dict) or "kind" not in doc:
        raise FormatError("utility document must be a JSON object with a 'kind'")
    kind = doc["kind"]
    try:
        if kind == "linear":
            return LinearUtility(doc["weights"])
        if kind == "coverage":
            return CoverageUtility(doc["family"], doc.get("universe_size"))
        if kind == "budget_additive":
            k = doc.get("k", None)
            if k is None:
                k = bind_k
            if k is None:
                raise FormatError(
                    "budget_additive utility omits 'k'; a solve-time budget is required"
                )
            return BudgetAdditiveUtility(doc["weights"], doc["alpha"], doc["beta"], int(k))
        if kind == "margin_similarity":
            return MarginSimilarityUtility(
                doc["uncertainty"],
                edges=[tuple(e) for e in doc.get("edges", [])],
                alpha_s=doc.get("alpha_s", 0.9),
                beta_s=doc.get("beta_s", 0.1),
            )
        if kind == "constant_zero":
            return ConstantZeroUtility(int(doc["n"]))
    except KeyError as exc:
        raise FormatError(f"utility document is missing field {exc}") from exc
    raise FormatError(f"unknown utility kind {kind!r}; expected one of {UTILITY_KINDS}")


def load_utility(path: str | Path, bind_k: int | None = None) -> UtilityOracle:
    return utility_from_dict(_read_json(path), bind_k=bind_k)


def load_embeddings(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    """Read a JSON-lines embeddings file; returns (embeddings, uncertainty)."""
    vectors: list[list[float]] = []
    scores: list[float] = []
    dim: int | None = None
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                vec = [float(x) for x in rec["embedding"]]
                if dim is None:
                    dim = len(vec)
                elif len(vec) != dim:
                    raise FormatError(
                        f"{path}:{lineno}: embedding dimension {len(vec)} != {dim}"
                    )
                vectors.append(vec)
                scores.append(float(rec["uncertainty"]))
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"cannot parse embeddings file {path}: {exc}") from exc
    if not vectors:
        raise FormatError(f"{path}: no embedding records found")
    return np.asarray(vectors, dtype=np.float64), np.asarray(scores, dtype=np.float64)


def load_graph(path: str | Path) -> Graph:
    doc = _read_json(path)
    try:
        return Graph.from_edges(int(doc["n"]), doc.get("edges", []))
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"cannot parse graph file {path}: {exc}") from exc


def load_edge_pairs(path: str | Path) -> list[tuple[int, int]]:
    doc = _read_json(path)
    if not isinstance(doc, list):
        raise FormatError(f"{path}: edge file must be a JSON list of [i, j] pairs")
    try:
        return [(int(e[0]), int(e[1])) for e in doc]
    except (TypeError, ValueError, IndexError) as exc:
        raise FormatError(f"{path}: malformed edge pair") from exc


def load_set_family(path: str | Path) -> tuple[list[list[int]], list[int] | None]:
    doc = _read_json(path)
    try:
        family = [[int(e) for e in s] for s in doc["family"]]
        groups = doc.get("groups")
        if groups is not None:
            groups = [int(g) for g in groups]
        return family, groups
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"cannot parse set-family file {path}: {exc}") from exc
