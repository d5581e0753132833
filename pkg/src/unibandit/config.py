"""JSON experiment configuration.

Example::

    {
      "family": "gaussian",
      "means": [0, 0.2, 0.4, 0.6, 0.8, 1, 0.8, 0.6, 0.4, 0.2, 0],
      "graph": {"kind": "path", "arms": 11},
      "horizon": 10000, "replicates": 200, "seed": 0,
      "policies": ["imed-ub", "klucb-ub", {"name": "osub", "c": 0}, "imed"]
    }

Replace ``"means"`` by ``"random": {"arms": A}`` to draw a fresh random
unimodal path for every replicate. Tree graphs are given as
``{"kind": "tree", "edges": [[1, 2], [1, 3]]}`` with 1-based arm ids.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .env import BanditConfig, ConfigError
from .graph import GraphError, GraphKind, UnimodalGraph
from .kl import Family
from .policies import POLICY_NAMES, PolicySpec
from .runner import ExperimentSpec, RandomEnvironment, default_checkpoints

DEFAULTS = {"horizon": 10000, "replicates": 100, "seed": 0, "policies": list(POLICY_NAMES)}


def load_json(path: str | Path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read ({exc.strerror})") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return data


def _int(data: dict, key: str, minimum: int) -> int:
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"field '{key}': expected an integer, got {value!r}")
    if value < minimum:
        raise ConfigError(f"field '{key}': must be >= {minimum}, got {value}")
    return value


def parse_graph(obj: Any, n_arms: int | None) -> UnimodalGraph:
    if obj is None:
        if n_arms is None:
            raise ConfigError("field 'graph': required when the number of arms is unknown")
        return UnimodalGraph.path(n_arms)
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ConfigError("field 'graph': expected an object with a 'kind'")
    kind = str(obj["kind"]).lower()
    try:
        if kind == "path":
            arms = obj.get("arms", n_arms)
            if not isinstance(arms, int) or isinstance(arms, bool):
                raise ConfigError(f"field 'graph.arms': expected an integer, got {arms!r}")
            return UnimodalGraph.path(arms)
        if kind in ("tree", "general"):
            edges = obj.get("edges")
            if not isinstance(edges, list) or not edges:
                raise ConfigError("field 'graph.edges': expected a non-empty list of [u, v] pairs")
            pairs = []
            for i, e in enumerate(edges):
                if (not isinstance(e, list) or len(e) != 2
                        or not all(isinstance(x, int) and not isinstance(x, bool) for x in e)):
                    raise ConfigError(f"field 'graph.edges[{i}]': expected [u, v] with integer arm ids")
                pairs.append((e[0] - 1, e[1] - 1))
            arms = obj.get("arms", n_arms if n_arms is not None else max(max(p) for p in pairs) + 1)
            return UnimodalGraph.from_edges(arms, pairs, GraphKind(kind))
    except GraphError as exc:
        raise ConfigError(f"field 'graph': {exc}") from None
    raise ConfigError(f"field 'graph.kind': unknown kind {obj['kind']!r}")


def parse_environment(data: dict) -> BanditConfig | RandomEnvironment:
    if "family" not in data:
        raise ConfigError("field 'family': required")
    try:
        family = Family.parse(data["family"])
    except ValueError as exc:
        raise ConfigError(f"field 'family': {exc}") from None
    if ("means" in data) == ("random" in data):
        raise ConfigError("exactly one of 'means' or 'random' must be given")
    if "random" in data:
        rnd = data["random"]
        if not isinstance(rnd, dict) or "arms" not in rnd:
            raise ConfigError("field 'random': expected {\"arms\": A}")
        arms = _int(rnd, "arms", 2)
        graph = data.get("graph")
        if graph is not None and parse_graph(graph, arms).kind is not GraphKind.PATH:
            raise ConfigError("field 'graph': random configurations are drawn on a path")
        return RandomEnvironment(arms, family)
    means = data["means"]
    if not isinstance(means, list) or not all(isinstance(m, (int, float)) and not isinstance(m, bool) for m in means):
        raise ConfigError("field 'means': expected a list of numbers")
    graph = parse_graph(data.get("graph"), len(means))
    return BanditConfig(family, tuple(means), graph)


def parse_policies(items: Any) -> tuple:
    if isinstance(items, str):
        items = [p.strip() for p in items.split(",") if p.strip()]
    if not isinstance(items, list) or not items:
        raise ConfigError("field 'policies': expected a non-empty list")
    out = []
    for i, item in enumerate(items):
        try:
            if isinstance(item, str):
                out.append(PolicySpec(item))
            elif isinstance(item, dict) and "name" in item:
                out.append(PolicySpec(item["name"], float(item.get("c", 0.0))))
            else:
                raise ValueError(f"expected a policy name or {{\"name\": ..., \"c\": ...}}, got {item!r}")
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"field 'policies[{i}]': {exc}") from None
    return tuple(out)


def build_spec(data: dict, overrides: dict | None = None) -> ExperimentSpec:
    merged = {**DEFAULTS, **data}
    for key, value in (overrides or {}).items():
        if value is not None:
            merged[key] = value
    environment = parse_environment(merged)
    horizon = _int(merged, "horizon", 1)
    replicates = _int(merged, "replicates", 1)
    seed = _int(merged, "seed", 0)
    policies = parse_policies(merged["policies"])
    checkpoints = merged.get("checkpoints", ())
    if isinstance(checkpoints, int) and not isinstance(checkpoints, bool):
        checkpoints = default_checkpoints(horizon, checkpoints)
    elif not isinstance(checkpoints, (list, tuple)):
        raise ConfigError("field 'checkpoints': expected a list of steps or a count")
    try:
        return ExperimentSpec(horizon, replicates, seed, policies, environment, tuple(checkpoints),
                              monitors=bool(merged.get("monitors", False)),
                              realized=bool(merged.get("realized", False)))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def load_spec(path: str | Path, overrides: dict | None = None) -> ExperimentSpec:
    return build_spec(load_json(path), overrides)
