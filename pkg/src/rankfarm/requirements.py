"""End-user requirement templates: functional constraints, requested QoS, weights.

Template layout::

    {"functional": {"software": [{"name": "Maya", "version": "2014"}],
                    "engines": ["V-Ray"],
                    "min_node": {"memory_gb": 16, "cpu_cores": 8, "disk_gb": 0, "gpu": false},
                    "model": "any"},
     "qos_requested": {"SRT": {"value": 40}, "NodeCost": {"bound": 1, "direction": "lt"}},
     "weights": {"Q_O": 0.4, "Q_R": 0.6}}

Every section is optional.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from .catalog import (
    WEIGHT_TOL,
    QoSHierarchy,
    SERVICE_MODELS,
    _list,
    _number,
    _require,
    _string,
    read_json,
)
from .errors import SchemaError, UnknownAttribute, WeightError

MODEL_CHOICES = SERVICE_MODELS + ("any",)


@dataclass(frozen=True)
class MinNode:
    memory_gb: float = 0.0
    cpu_cores: int = 0
    disk_gb: float = 0.0
    gpu: bool = False


@dataclass(frozen=True)
class FunctionalRequirements:
    required_software: frozenset[tuple[str, str]] = frozenset()
    required_engines: frozenset[str] = frozenset()
    min_node: MinNode = MinNode()
    required_model: str | None = None


@dataclass(frozen=True)
class RequestedValue:
    """A requested QoS level: a plain target, or a one-sided bound."""

    value: float | None = None
    bound: float | None = None
    direction: str | None = None

    @property
    def target(self) -> float | None:
        return self.value

    def to_dict(self) -> dict[str, Any]:
        if self.value is not None:
            return {"value": self.value}
        return {"bound": self.bound, "direction": self.direction}


@dataclass(frozen=True)
class RequirementSet:
    functional: FunctionalRequirements = FunctionalRequirements()
    requested_qos: dict[str, RequestedValue] = field(default_factory=dict)
    weight_overrides: dict[str, float] = field(default_factory=dict)

    def apply_weights(self, hierarchy: QoSHierarchy) -> QoSHierarchy:
        return apply_weight_overrides(hierarchy, self.weight_overrides)

    def targets(self) -> dict[str, float]:
        return {k: v.value for k, v in self.requested_qos.items() if v.value is not None}


def apply_weight_overrides(hierarchy: QoSHierarchy, overrides: Mapping[str, float]) -> QoSHierarchy:
    """Pin overridden weights and rescale the remaining siblings to fill the rest.

    When every sibling in a set is overridden, the set is divided by its sum.
    The operation is idempotent: applying the same overrides twice yields the
    same weights.
    """
    if not overrides:
        return hierarchy
    current = hierarchy.weights()
    for name, w in overrides.items():
        if name not in current:
            raise UnknownAttribute(f"weight override names unknown node {name!r}")
        if not (0.0 < w <= 1.0):
            raise WeightError(f"override for {name!r} must lie in (0, 1], got {w}")

    new: dict[str, float] = {}
    for parent, names in hierarchy.sibling_sets():
        pinned = [n for n in names if n in overrides]
        if not pinned:
            continue
        free = [n for n in names if n not in overrides]
        pinned_sum = math.fsum(overrides[n] for n in pinned)
        if not free:
            for n in pinned:
                new[n] = overrides[n] / pinned_sum
            continue
        if pinned_sum >= 1.0 - WEIGHT_TOL:
            raise WeightError(
                f"overrides under {parent!r} sum to {pinned_sum:g}, leaving no weight for {free}"
            )
        free_sum = math.fsum(current[n] for n in free)
        for n in pinned:
            new[n] = overrides[n]
        for n in free:
            new[n] = current[n] * (1.0 - pinned_sum) / free_sum
    return hierarchy.with_weights(new)


def _requested_from(raw: Any, ctx: str) -> RequestedValue:
    if isinstance(raw, (int, float)) and not isinstance(raw, bool):
        return RequestedValue(value=_number(raw, ctx))
    if not isinstance(raw, dict):
        raise SchemaError(f"{ctx}: expected a number or an object")
    if "value" in raw:
        return RequestedValue(value=_number(raw["value"], f"{ctx}.value"))
    bound = _number(_require(raw, "bound", ctx), f"{ctx}.bound")
    direction = _require(raw, "direction", ctx)
    if direction not in ("lt", "gt"):
        raise SchemaError(f"{ctx}.direction must be 'lt' or 'gt', got {direction!r}")
    return RequestedValue(bound=bound, direction=direction)


def functional_from_dict(data: Any) -> FunctionalRequirements:
    if data is None:
        return FunctionalRequirements()
    if not isinstance(data, dict):
        raise SchemaError("functional: expected an object")
    software = set()
    for i, item in enumerate(_list(data.get("software", []), "functional.software")):
        ctx = f"functional.software[{i}]"
        software.add((_string(_require(item, "name", ctx), ctx), _string(_require(item, "version", ctx), ctx)))
    engines = {_string(e, "functional.engines") for e in _list(data.get("engines", []), "functional.engines")}

    node = data.get("min_node") or {}
    if not isinstance(node, dict):
        raise SchemaError("functional.min_node: expected an object")
    cores = node.get("cpu_cores", 0)
    if isinstance(cores, bool) or not isinstance(cores, int):
        raise SchemaError("functional.min_node.cpu_cores: expected an integer")
    gpu = node.get("gpu", False)
    if not isinstance(gpu, bool):
        raise SchemaError("functional.min_node.gpu: expected a boolean")
    min_node = MinNode(
        memory_gb=_number(node.get("memory_gb", 0), "functional.min_node.memory_gb"),
        cpu_cores=cores,
        disk_gb=_number(node.get("disk_gb", 0), "functional.min_node.disk_gb"),
        gpu=gpu,
    )
    if min(min_node.memory_gb, min_node.cpu_cores, min_node.disk_gb) < 0:
        raise SchemaError("functional.min_node: minimums must be non-negative")

    model = data.get("model")
    if model is not None and model not in MODEL_CHOICES:
        raise SchemaError(f"functional.model must be one of {MODEL_CHOICES}, got {model!r}")
    return FunctionalRequirements(frozenset(software), frozenset(engines), min_node, model)


def functional_to_dict(req: FunctionalRequirements) -> dict[str, Any]:
    node = req.min_node
    return {
        "software": [{"name": n, "version": v} for n, v in sorted(req.required_software)],
        "engines": sorted(req.required_engines),
        "min_node": {
            "memory_gb": node.memory_gb,
            "cpu_cores": node.cpu_cores,
            "disk_gb": node.disk_gb,
            "gpu": node.gpu,
        },
        "model": req.required_model,
    }


def requirements_from_dict(data: Any, hierarchy: QoSHierarchy) -> RequirementSet:
    if not isinstance(data, dict):
        raise SchemaError("requirements: expected an object")
    functional = functional_from_dict(data.get("functional"))

    leaves = {a.name for a in hierarchy.sub_level}
    requested = {}
    raw_qos = data.get("qos_requested") or {}
    if not isinstance(raw_qos, dict):
        raise SchemaError("qos_requested: expected an object")
    for key, raw in raw_qos.items():
        if key not in leaves:
            raise UnknownAttribute(f"qos_requested names unknown attribute {key!r}")
        requested[key] = _requested_from(raw, f"qos_requested.{key}")

    raw_weights = data.get("weights") or {}
    if not isinstance(raw_weights, dict):
        raise SchemaError("weights: expected an object")
    overrides = {k: _number(v, f"weights.{k}") for k, v in raw_weights.items()}

    req = RequirementSet(functional, requested, overrides)
    # validates overrides against the hierarchy
    req.apply_weights(hierarchy)
    return req


def requirements_to_dict(req: RequirementSet) -> dict[str, Any]:
    return {
        "functional": functional_to_dict(req.functional),
        "qos_requested": {k: v.to_dict() for k, v in req.requested_qos.items()},
        "weights": dict(req.weight_overrides),
    }


def load_requirements(path: str | Path, hierarchy: QoSHierarchy) -> RequirementSet:
    return requirements_from_dict(read_json(path), hierarchy)
