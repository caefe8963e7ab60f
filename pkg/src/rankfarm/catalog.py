"""QoS hierarchy and service-offering templates.

Both templates are UTF-8 JSON.  The hierarchy template nests groups, top-level
attributes and sub-level attributes::

    {"groups": [{"id": "Q_R", "weight": 0.6, "attributes": [
        {"name": "Cost", "weight": 0.4, "sub": [
            {"name": "NodeCost", "weight": 1.0, "unit": "$ Per Core Hour",
             "tendency": "negative"}]}]}]}

The offerings template lists one record per provider::

    {"services": [{"id": "RF1", "model": "PaaS",
                   "software": [{"name": "Maya", "version": "2014"}],
                   "engines": ["V-Ray"],
                   "node": {"memory_gb": 32, "cpu_cores": 16, "disk_gb": 500, "gpu": false},
                   "qos": {"NodeCost": 0.7}}]}

Units are opaque labels; no conversion is ever attempted.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Iterable, Mapping

from .errors import (
    DuplicateService,
    EmptyCatalog,
    IoError,
    NonPositiveValue,
    ParseError,
    SchemaError,
    UnknownAttribute,
    WeightError,
)

logger = logging.getLogger(__name__)

TENDENCIES = ("positive", "negative", "close", "exact")
RATIO_TENDENCIES = ("positive", "negative")
SERVICE_MODELS = ("IaaS", "PaaS")
WEIGHT_TOL = 1e-9


@dataclass(frozen=True)
class AttributeSpec:
    """One node of the attribute tree.

    Top-level attributes carry no tendency; sub-level (leaf) attributes do.
    """

    name: str
    weight: float
    parent: str
    unit: str = ""
    tendency: str | None = None
    value_type: str = "numeric"


@dataclass(frozen=True)
class Group:
    id: str
    weight: float


@dataclass(frozen=True)
class QoSHierarchy:
    groups: tuple[Group, ...]
    top_level: tuple[AttributeSpec, ...]
    sub_level: tuple[AttributeSpec, ...]
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        if not self.groups:
            raise SchemaError("hierarchy has no groups")
        names = [g.id for g in self.groups] + [a.name for a in self.top_level + self.sub_level]
        seen: set[str] = set()
        for name in names:
            if name in seen:
                raise SchemaError(f"node name {name!r} is not unique in the hierarchy")
            seen.add(name)
        group_ids = {g.id for g in self.groups}
        top_names = {a.name for a in self.top_level}
        for attr in self.top_level:
            if attr.parent not in group_ids:
                raise SchemaError(f"top-level attribute {attr.name!r} has unknown group {attr.parent!r}")
        for attr in self.sub_level:
            if attr.parent not in top_names:
                raise SchemaError(f"sub-level attribute {attr.name!r} has unknown parent {attr.parent!r}")
            if attr.tendency not in TENDENCIES:
                raise SchemaError(f"attribute {attr.name!r}: unknown tendency {attr.tendency!r}")
            if attr.value_type != "numeric":
                raise SchemaError(
                    f"attribute {attr.name!r}: value type {attr.value_type!r} is not supported"
                )
        for group in self.groups:
            if not self.children(group.id):
                raise SchemaError(f"group {group.id!r} has no attributes")
        for attr in self.top_level:
            if not self.children(attr.name):
                raise SchemaError(f"top-level attribute {attr.name!r} has no sub-level attributes")
        for name, weight in self.weights().items():
            _check_weight(name, weight)

    @property
    def node_names(self) -> tuple[str, ...]:
        return tuple(self.weights())

    def weights(self) -> dict[str, float]:
        out = {g.id: g.weight for g in self.groups}
        out.update((a.name, a.weight) for a in self.top_level + self.sub_level)
        return out

    def weight(self, name: str) -> float:
        try:
            return self.weights()[name]
        except KeyError:
            raise UnknownAttribute(f"no node named {name!r} in the hierarchy") from None

    def attribute(self, name: str) -> AttributeSpec:
        for attr in self.top_level + self.sub_level:
            if attr.name == name:
                return attr
        raise UnknownAttribute(f"no attribute named {name!r} in the hierarchy")

    def children(self, parent: str) -> tuple[AttributeSpec, ...]:
        if parent in {g.id for g in self.groups}:
            return tuple(a for a in self.top_level if a.parent == parent)
        return tuple(a for a in self.sub_level if a.parent == parent)

    def sibling_sets(self) -> list[tuple[str, list[str]]]:
        """(parent, child names) for the group tier and every interior node."""
        sets = [("<root>", [g.id for g in self.groups])]
        for parent in [g.id for g in self.groups] + [a.name for a in self.top_level]:
            sets.append((parent, [c.name for c in self.children(parent)]))
        return sets

    def with_weights(self, weights: Mapping[str, float], warnings: Iterable[str] = ()) -> QoSHierarchy:
        """Copy with node weights replaced (no renormalization)."""
        for name in weights:
            if name not in self.weights():
                raise UnknownAttribute(f"no node named {name!r} in the hierarchy")
        return QoSHierarchy(
            groups=tuple(replace(g, weight=float(weights.get(g.id, g.weight))) for g in self.groups),
            top_level=tuple(replace(a, weight=float(weights.get(a.name, a.weight))) for a in self.top_level),
            sub_level=tuple(replace(a, weight=float(weights.get(a.name, a.weight))) for a in self.sub_level),
            warnings=self.warnings + tuple(warnings),
        )

    def to_dict(self) -> dict[str, Any]:
        groups = []
        for group in self.groups:
            attributes = []
            for top in self.children(group.id):
                sub = [
                    {
                        "name": leaf.name,
                        "weight": leaf.weight,
                        "unit": leaf.unit,
                        "tendency": leaf.tendency,
                        "value_type": leaf.value_type,
                    }
                    for leaf in self.children(top.name)
                ]
                attributes.append({"name": top.name, "weight": top.weight, "sub": sub})
            groups.append({"id": group.id, "weight": group.weight, "attributes": attributes})
        return {"groups": groups}


@dataclass(frozen=True)
class NodeConfig:
    memory_gb: float = 0.0
    cpu_cores: int = 0
    disk_gb: float = 0.0
    gpu: bool = False


@dataclass(frozen=True)
class ServiceOffering:
    service_id: str
    service_model: str
    software_versions: frozenset[tuple[str, str]]
    render_engines: frozenset[str]
    node_config: NodeConfig
    qos_values: dict[str, float]


@dataclass(frozen=True)
class Catalog:
    offerings: tuple[ServiceOffering, ...]
    hierarchy: QoSHierarchy
    source_path: str | None = field(default=None, compare=False)

    @property
    def service_ids(self) -> list[str]:
        return [o.service_id for o in self.offerings]

    def get(self, service_id: str) -> ServiceOffering:
        for offering in self.offerings:
            if offering.service_id == service_id:
                return offering
        raise KeyError(service_id)


# -- helpers -----------------------------------------------------------------


def read_json(path: str | Path) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise IoError(f"{path}: no such file") from None
    except UnicodeDecodeError as exc:
        raise ParseError(f"{path}: not valid UTF-8 ({exc})") from None
    except OSError as exc:
        raise IoError(f"{path}: {exc.strerror or exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from None


def write_json(data: Any, path: str | Path) -> None:
    try:
        Path(path).write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")
    except OSError as exc:
        raise IoError(f"{path}: {exc.strerror or exc}") from None


def _require(obj: Any, key: str, ctx: str) -> Any:
    if not isinstance(obj, dict):
        raise SchemaError(f"{ctx}: expected an object, got {type(obj).__name__}")
    if key not in obj:
        raise SchemaError(f"{ctx}: missing field {key!r}")
    return obj[key]


def _number(value: Any, ctx: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"{ctx}: expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise SchemaError(f"{ctx}: value must be finite")
    return value


def _string(value: Any, ctx: str) -> str:
    if not isinstance(value, str) or not value.strip():
        raise SchemaError(f"{ctx}: expected a non-empty string, got {value!r}")
    return value


def _list(value: Any, ctx: str) -> list:
    if not isinstance(value, list):
        raise SchemaError(f"{ctx}: expected a list")
    return value


def _check_weight(name: str, weight: float) -> None:
    if not (0.0 < weight <= 1.0):
        raise WeightError(f"weight of {name!r} must lie in (0, 1], got {weight}")


# -- hierarchy ---------------------------------------------------------------


def normalize_weights(hierarchy: QoSHierarchy, strict: bool = False) -> QoSHierarchy:
    """Rescale every sibling set so it sums to one.

    In strict mode any sibling set off by more than ``WEIGHT_TOL`` raises
    :class:`WeightError` instead.
    """
    weights = hierarchy.weights()
    new: dict[str, float] = {}
    notes = []
    for parent, names in hierarchy.sibling_sets():
        total = math.fsum(weights[n] for n in names)
        if abs(total - 1.0) <= WEIGHT_TOL:
            continue
        label = "group weights" if parent == "<root>" else f"weights under {parent!r}"
        if strict:
            raise WeightError(f"{label} sum to {total:g}, expected 1")
        for name in names:
            new[name] = weights[name] / total
        msg = f"{label} sum to {total:g}; renormalized to 1"
        logger.warning(msg)
        notes.append(msg)
    if not new:
        return hierarchy
    return hierarchy.with_weights(new, notes)


def hierarchy_from_dict(data: Any, strict: bool = False) -> QoSHierarchy:
    groups: list[Group] = []
    top: list[AttributeSpec] = []
    sub: list[AttributeSpec] = []
    for gi, g in enumerate(_list(_require(data, "groups", "hierarchy"), "hierarchy.groups")):
        ctx = f"groups[{gi}]"
        gid = _string(_require(g, "id", ctx), f"{ctx}.id")
        groups.append(Group(gid, _number(_require(g, "weight", ctx), f"{ctx}.weight")))
        for ai, a in enumerate(_list(_require(g, "attributes", ctx), f"{ctx}.attributes")):
            actx = f"{ctx}.attributes[{ai}]"
            aname = _string(_require(a, "name", actx), f"{actx}.name")
            top.append(AttributeSpec(aname, _number(_require(a, "weight", actx), f"{actx}.weight"), gid))
            for si, s in enumerate(_list(_require(a, "sub", actx), f"{actx}.sub")):
                sctx = f"{actx}.sub[{si}]"
                tendency = _require(s, "tendency", sctx)
                if tendency not in TENDENCIES:
                    raise SchemaError(f"{sctx}: unknown tendency {tendency!r}")
                unit = _require(s, "unit", sctx)
                if not isinstance(unit, str):
                    raise SchemaError(f"{sctx}.unit: expected a string")
                sub.append(
                    AttributeSpec(
                        name=_string(_require(s, "name", sctx), f"{sctx}.name"),
                        weight=_number(_require(s, "weight", sctx), f"{sctx}.weight"),
                        parent=aname,
                        unit=unit,
                        tendency=tendency,
                        value_type=s.get("value_type", "numeric"),
                    )
                )
    hierarchy = QoSHierarchy(tuple(groups), tuple(top), tuple(sub))
    return normalize_weights(hierarchy, strict=strict)


def load_hierarchy(path: str | Path, strict: bool = False) -> QoSHierarchy:
    """Load, validate and weight-normalize a hierarchy template."""
    return hierarchy_from_dict(read_json(path), strict=strict)


# -- offerings ---------------------------------------------------------------


def offering_from_dict(data: Any, hierarchy: QoSHierarchy) -> ServiceOffering:
    sid = _string(_require(data, "id", "service"), "service.id")
    ctx = f"service {sid!r}"
    model = _require(data, "model", ctx)
    if model not in SERVICE_MODELS:
        raise SchemaError(f"{ctx}: model must be one of {SERVICE_MODELS}, got {model!r}")

    software = set()
    for i, item in enumerate(_list(data.get("software", []), f"{ctx}.software")):
        software.add(
            (
                _string(_require(item, "name", f"{ctx}.software[{i}]"), f"{ctx}.software[{i}].name"),
                _string(_require(item, "version", f"{ctx}.software[{i}]"), f"{ctx}.software[{i}].version"),
            )
        )
    engines = {_string(e, f"{ctx}.engines") for e in _list(data.get("engines", []), f"{ctx}.engines")}

    node = _require(data, "node", ctx)
    ncfg = NodeConfig(
        memory_gb=_number(_require(node, "memory_gb", f"{ctx}.node"), f"{ctx}.node.memory_gb"),
        cpu_cores=_require(node, "cpu_cores", f"{ctx}.node"),
        disk_gb=_number(_require(node, "disk_gb", f"{ctx}.node"), f"{ctx}.node.disk_gb"),
        gpu=_require(node, "gpu", f"{ctx}.node"),
    )
    if isinstance(ncfg.cpu_cores, bool) or not isinstance(ncfg.cpu_cores, int):
        raise SchemaError(f"{ctx}.node.cpu_cores: expected an integer")
    if not isinstance(ncfg.gpu, bool):
        raise SchemaError(f"{ctx}.node.gpu: expected a boolean")
    if min(ncfg.memory_gb, ncfg.cpu_cores, ncfg.disk_gb) < 0:
        raise SchemaError(f"{ctx}.node: resources must be non-negative")

    qos_raw = _require(data, "qos", ctx)
    if not isinstance(qos_raw, dict):
        raise SchemaError(f"{ctx}.qos: expected an object")
    leaves = {a.name: a for a in hierarchy.sub_level}
    qos = {}
    for key, raw in qos_raw.items():
        if key not in leaves:
            raise UnknownAttribute(f"{ctx}: qos attribute {key!r} is not a sub-level attribute")
        value = _number(raw, f"{ctx}.qos.{key}")
        if leaves[key].tendency in RATIO_TENDENCIES and value <= 0:
            raise NonPositiveValue(f"{ctx}: {key} = {value:g} must be > 0")
        qos[key] = value

    return ServiceOffering(
        service_id=sid,
        service_model=model,
        software_versions=frozenset(software),
        render_engines=frozenset(engines),
        node_config=ncfg,
        qos_values=qos,
    )


def offering_to_dict(offering: ServiceOffering) -> dict[str, Any]:
    node = offering.node_config
    return {
        "id": offering.service_id,
        "model": offering.service_model,
        "software": [{"name": n, "version": v} for n, v in sorted(offering.software_versions)],
        "engines": sorted(offering.render_engines),
        "node": {
            "memory_gb": node.memory_gb,
            "cpu_cores": node.cpu_cores,
            "disk_gb": node.disk_gb,
            "gpu": node.gpu,
        },
        "qos": dict(offering.qos_values),
    }


def catalog_from_dict(
    data: Any, hierarchy: QoSHierarchy, source_path: str | None = None
) -> Catalog:
    services = _list(_require(data, "services", "offerings"), "offerings.services")
    if not services:
        raise EmptyCatalog("offerings file lists no services")
    offerings = []
    seen: set[str] = set()
    for raw in services:
        offering = offering_from_dict(raw, hierarchy)
        if offering.service_id in seen:
            raise DuplicateService(f"service id {offering.service_id!r} appears more than once")
        seen.add(offering.service_id)
        offerings.append(offering)
    return Catalog(tuple(offerings), hierarchy, source_path)


def load_offerings(path: str | Path, hierarchy: QoSHierarchy) -> Catalog:
    return catalog_from_dict(read_json(path), hierarchy, str(path))


def catalog_to_dict(catalog: Catalog) -> dict[str, Any]:
    return {
        "hierarchy": catalog.hierarchy.to_dict(),
        "services": [offering_to_dict(o) for o in catalog.offerings],
    }


def save_catalog(catalog: Catalog, path: str | Path) -> None:
    """Write the catalog as an offerings file with its hierarchy embedded.

    The result is readable both by :func:`load_offerings` (which ignores the
    embedded hierarchy) and by :func:`load_catalog`.
    """
    write_json(catalog_to_dict(catalog), path)


def load_catalog(path: str | Path, strict: bool = False) -> Catalog:
    """Load a file written by :func:`save_catalog`."""
    data = read_json(path)
    hierarchy = hierarchy_from_dict(_require(data, "hierarchy", str(path)), strict=strict)
    return catalog_from_dict(data, hierarchy, str(path))
