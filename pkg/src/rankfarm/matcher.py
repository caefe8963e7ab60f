"""Functional matching: hard-constraint filtering of the catalog before ranking."""

from __future__ import annotations

from dataclasses import dataclass

from .catalog import Catalog, ServiceOffering
from .requirements import FunctionalRequirements

SOFTWARE = "SOFTWARE"
ENGINE = "ENGINE"
NODE_CONFIG = "NODE_CONFIG"
MODEL = "MODEL"
REASON_CODES = (SOFTWARE, ENGINE, NODE_CONFIG, MODEL)


@dataclass(frozen=True)
class Rejection:
    service_id: str
    reason: str
    detail: str


@dataclass(frozen=True)
class MatchResult:
    matched: tuple[str, ...]
    rejected: tuple[Rejection, ...]


def _fold(text: str) -> str:
    return text.strip().casefold()


def check_offering(offering: ServiceOffering, req: FunctionalRequirements) -> Rejection | None:
    """Return the first failing check, or None if the offering qualifies."""
    sid = offering.service_id

    have_sw = {(_fold(n), _fold(v)) for n, v in offering.software_versions}
    missing_sw = sorted(f"{n} {v}" for n, v in req.required_software if (_fold(n), _fold(v)) not in have_sw)
    if missing_sw:
        return Rejection(sid, SOFTWARE, "missing software: " + ", ".join(missing_sw))

    have_eng = {_fold(e) for e in offering.render_engines}
    missing_eng = sorted(e for e in req.required_engines if _fold(e) not in have_eng)
    if missing_eng:
        return Rejection(sid, ENGINE, "missing render engines: " + ", ".join(missing_eng))

    node, need = offering.node_config, req.min_node
    short = []
    if node.memory_gb < need.memory_gb:
        short.append(f"memory {node.memory_gb:g} GB < {need.memory_gb:g} GB")
    if node.cpu_cores < need.cpu_cores:
        short.append(f"cpu cores {node.cpu_cores} < {need.cpu_cores}")
    if node.disk_gb < need.disk_gb:
        short.append(f"disk {node.disk_gb:g} GB < {need.disk_gb:g} GB")
    if need.gpu and not node.gpu:
        short.append("no GPU")
    if short:
        return Rejection(sid, NODE_CONFIG, "; ".join(short))

    if req.required_model not in (None, "any", offering.service_model):
        return Rejection(sid, MODEL, f"model {offering.service_model} != {req.required_model}")
    return None


def fn_match(catalog: Catalog, req: FunctionalRequirements) -> MatchResult:
    """Split the catalog into matching ids (catalog order) and rejections.

    An empty match is a valid result; the ranking layer decides whether it
    is an error.
    """
    matched, rejected = [], []
    for offering in catalog.offerings:
        rejection = check_offering(offering, req)
        if rejection is None:
            matched.append(offering.service_id)
        else:
            rejected.append(rejection)
    return MatchResult(tuple(matched), tuple(rejected))
