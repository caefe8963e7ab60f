"""AHP ranking over a two-level QoS hierarchy.

Each sub-level attribute yields a pairwise ratio matrix across the candidate
services; its principal eigenvector is the attribute's relative ranking
vector.  Vectors are then combined with the hierarchy weights, first per
top-level attribute, then per group, and finally across groups.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .catalog import WEIGHT_TOL, Catalog, QoSHierarchy
from .errors import (
    DimensionMismatch,
    EmptyMatch,
    MissingQoSValue,
    MissingVReq,
    NonPositiveValue,
    NoConvergence,
    SchemaError,
    WeightError,
)
from .requirements import RequirementSet

EPSILON = 1e-9
ABS_EPSILON = 1e-12
DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 1000
TIE_TOL = 1e-12

# Saaty's random consistency index
RANDOM_INDEX = {3: 0.58, 4: 0.90, 5: 1.12, 6: 1.24, 7: 1.32, 8: 1.41, 9: 1.45, 10: 1.49}

_ORDINALS = (
    "First", "Second", "Third", "Fourth", "Fifth", "Sixth", "Seventh", "Eighth", "Ninth", "Tenth",
    "Eleventh", "Twelfth", "Thirteenth", "Fourteenth", "Fifteenth", "Sixteenth", "Seventeenth",
    "Eighteenth", "Nineteenth", "Twentieth",
)


@dataclass(frozen=True, eq=False)
class RRRM:
    """Pairwise relative ranking matrix for one attribute."""

    attribute: str
    service_order: tuple[str, ...]
    entries: np.ndarray

    @property
    def size(self) -> int:
        return len(self.service_order)


@dataclass(frozen=True, eq=False)
class RRRV:
    """A relative ranking vector over ``service_order``."""

    name: str
    service_order: tuple[str, ...]
    values: np.ndarray

    def as_dict(self) -> dict[str, float]:
        return {sid: float(v) for sid, v in zip(self.service_order, self.values)}

    def __getitem__(self, service_id: str) -> float:
        return float(self.values[self.service_order.index(service_id)])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RRRV):
            return NotImplemented
        return (
            self.name == other.name
            and self.service_order == other.service_order
            and np.array_equal(self.values, other.values)
        )


@dataclass(frozen=True)
class Choice:
    rank: int
    service_id: str
    value: float
    label: str


@dataclass(frozen=True)
class RankingReport:
    service_order: tuple[str, ...]
    sub_level_vectors: dict[str, RRRV]
    top_level_vectors: dict[str, RRRV]
    group_vectors: dict[str, RRRV]
    final: RRRV
    choices: tuple[Choice, ...]
    warnings: tuple[str, ...] = ()
    weights: dict[str, float] = field(default_factory=dict)
    requested: dict[str, dict] = field(default_factory=dict)
    consistency: dict[str, float] = field(default_factory=dict)


def ordinal_label(rank: int) -> str:
    if 1 <= rank <= len(_ORDINALS):
        return f"{_ORDINALS[rank - 1]} Choice"
    suffix = "th" if 10 <= rank % 100 <= 20 else {1: "st", 2: "nd", 3: "rd"}.get(rank % 10, "th")
    return f"{rank}{suffix} Choice"


def _deviations(values: np.ndarray, v_req: float, tendency: str, epsilon: float) -> np.ndarray:
    smoothing = epsilon * abs(v_req) if v_req != 0 else ABS_EPSILON
    if tendency == "close":
        dev = np.abs(values - v_req)
    else:
        dev = np.where(values == v_req, 0.0, 1.0)
    return dev + smoothing


def build_rrrm(
    values: Mapping[str, float],
    tendency: str,
    v_req: float | None = None,
    *,
    attribute: str = "",
    epsilon: float = EPSILON,
) -> RRRM:
    """Pairwise ratio matrix for one attribute.

    positive: entry(m, n) = V_m / V_n
    negative: entry(m, n) = V_n / V_m
    close:    entry(m, n) = D_n / D_m, D_k = |V_k - v_req| + epsilon * |v_req|
    exact:    as close, with D_k = 0 on an exact hit and 1 otherwise
    """
    order = tuple(values)
    if not order:
        raise DimensionMismatch("cannot build a comparison matrix for zero services")
    v = np.array([float(values[s]) for s in order])
    if tendency in ("positive", "negative"):
        bad = [s for s, x in zip(order, v) if not x > 0]
        if bad:
            raise NonPositiveValue(f"{attribute or 'attribute'}: values must be > 0 for services {bad}")
        # plain value ratios, never reciprocals of reciprocals, so 12/10 stays 12/10
        if tendency == "positive":
            entries = v[:, None] / v[None, :]
        else:
            entries = v[None, :] / v[:, None]
    elif tendency in ("close", "exact"):
        if v_req is None:
            raise MissingVReq(f"{attribute or 'attribute'}: {tendency} tendency needs a requested value")
        d = _deviations(v, float(v_req), tendency, epsilon)
        entries = d[None, :] / d[:, None]
    else:
        raise SchemaError(f"unknown tendency {tendency!r}")
    np.fill_diagonal(entries, 1.0)
    return RRRM(attribute, order, entries)


def principal_eigenvector(
    m: RRRM, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER
) -> RRRV:
    """Dominant eigenvector by power iteration, L1-normalized.

    Starts from the uniform vector and stops once successive iterates differ
    by less than ``tol`` in max-norm.
    """
    a = m.entries
    n = a.shape[0]
    x = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        y = a @ x
        y /= y.sum()
        if np.max(np.abs(y - x)) < tol:
            return RRRV(m.attribute, m.service_order, y)
        x = y
    raise NoConvergence(
        f"power iteration for {m.attribute or 'matrix'} did not converge in {max_iter} iterations"
    )


def lambda_max(m: RRRM, w: np.ndarray | None = None) -> float:
    if w is None:
        w = principal_eigenvector(m).values
    return float(np.mean((m.entries @ w) / w))


def consistency_ratio(m: RRRM) -> float:
    """Saaty consistency ratio; defined as 0 for matrices smaller than 3x3.

    Sizes above 10 reuse the n = 10 random index.
    """
    n = m.size
    if n <= 2:
        return 0.0
    ci = (lambda_max(m) - n) / (n - 1)
    return ci / RANDOM_INDEX.get(n, RANDOM_INDEX[10])


def _check_weights(weights: Sequence[float], ctx: str) -> None:
    # zero is allowed here (drops a branch); hierarchy weights themselves stay in (0, 1]
    if any(not w >= 0 for w in weights):
        raise WeightError(f"{ctx}: weights must be non-negative, got {list(weights)}")
    total = math.fsum(weights)
    if abs(total - 1.0) > WEIGHT_TOL:
        raise WeightError(f"{ctx}: weights sum to {total!r}, expected 1")


def aggregate_level(children: Sequence[RRRV], weights: Sequence[float], name: str = "") -> RRRV:
    """Component-wise weighted sum of sibling vectors."""
    if not children:
        raise DimensionMismatch(f"{name or 'aggregate'}: no child vectors")
    if len(children) != len(weights):
        raise DimensionMismatch(f"{name or 'aggregate'}: {len(children)} vectors but {len(weights)} weights")
    order = children[0].service_order
    for child in children[1:]:
        if child.service_order != order:
            raise DimensionMismatch(f"{name or 'aggregate'}: child vectors disagree on service order")
    _check_weights(weights, name or "aggregate")
    stacked = np.vstack([c.values for c in children])
    return RRRV(name, order, np.asarray(weights, dtype=float) @ stacked)


def final_rank(
    group_vectors: Mapping[str, RRRV], group_weights: Mapping[str, float], name: str = "final"
) -> RRRV:
    if set(group_vectors) != set(group_weights):
        raise DimensionMismatch(
            f"group vectors {sorted(group_vectors)} do not match group weights {sorted(group_weights)}"
        )
    keys = list(group_vectors)
    return aggregate_level([group_vectors[k] for k in keys], [group_weights[k] for k in keys], name)


def sort_choices(final: RRRV) -> tuple[tuple[Choice, ...], list[str]]:
    """Descending by value, ties broken by ascending service id."""
    pairs = sorted(
        zip(final.service_order, final.values.tolist()), key=lambda p: (-round(p[1], 12), p[0])
    )
    choices = tuple(Choice(i + 1, sid, val, ordinal_label(i + 1)) for i, (sid, val) in enumerate(pairs))
    notes = []
    for a, b in zip(choices, choices[1:]):
        if math.isclose(a.value, b.value, rel_tol=0.0, abs_tol=TIE_TOL):
            notes.append(f"tie between {a.service_id} and {b.service_id} at {a.value:.6f}; ordered by id")
    return choices, notes


def ahp_rank(
    catalog: Catalog,
    matched: Sequence[str],
    req: RequirementSet,
    *,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    epsilon: float = EPSILON,
    injected: Mapping[str, Mapping[str, float]] | None = None,
) -> RankingReport:
    """Rank the matched services.

    ``injected`` maps sub-level attribute names to precomputed per-service
    vectors; those attributes skip matrix construction entirely.
    """
    order = tuple(matched)
    if not order:
        raise EmptyMatch("no services left to rank")
    hierarchy: QoSHierarchy = req.apply_weights(catalog.hierarchy)
    warnings = list(hierarchy.warnings)
    injected = dict(injected or {})
    leaves = {a.name for a in hierarchy.sub_level}
    for name in injected:
        if name not in leaves:
            raise SchemaError(f"injected vector names unknown sub-level attribute {name!r}")

    offerings = {sid: catalog.get(sid) for sid in order}
    targets = req.targets()
    sub_vectors: dict[str, RRRV] = {}
    consistency: dict[str, float] = {}
    for leaf in hierarchy.sub_level:
        if leaf.name in injected:
            column = injected[leaf.name]
            missing = [s for s in order if s not in column]
            if missing:
                raise MissingQoSValue(missing[0], leaf.name)
            vec = RRRV(leaf.name, order, np.array([float(column[s]) for s in order]))
            warnings.append(f"{leaf.name}: injected vector used (sum {vec.values.sum():.4f})")
            sub_vectors[leaf.name] = vec
            continue
        values = {}
        for sid in order:
            qos = offerings[sid].qos_values
            if leaf.name not in qos:
                raise MissingQoSValue(sid, leaf.name)
            values[sid] = qos[leaf.name]
        matrix = build_rrrm(
            values, leaf.tendency, targets.get(leaf.name), attribute=leaf.name, epsilon=epsilon
        )
        sub_vectors[leaf.name] = principal_eigenvector(matrix, tol=tol, max_iter=max_iter)
        consistency[leaf.name] = consistency_ratio(matrix)

    top_vectors = {}
    for top in hierarchy.top_level:
        kids = hierarchy.children(top.name)
        top_vectors[top.name] = aggregate_level(
            [sub_vectors[k.name] for k in kids], [k.weight for k in kids], top.name
        )
    group_vectors = {}
    for group in hierarchy.groups:
        kids = hierarchy.children(group.id)
        group_vectors[group.id] = aggregate_level(
            [top_vectors[k.name] for k in kids], [k.weight for k in kids], group.id
        )
    final = final_rank(group_vectors, {g.id: g.weight for g in hierarchy.groups})
    choices, tie_notes = sort_choices(final)
    warnings.extend(tie_notes)

    return RankingReport(
        service_order=order,
        sub_level_vectors=sub_vectors,
        top_level_vectors=top_vectors,
        group_vectors=group_vectors,
        final=final,
        choices=choices,
        warnings=tuple(warnings),
        weights=hierarchy.weights(),
        requested={k: v.to_dict() for k, v in req.requested_qos.items()},
        consistency=consistency,
    )


def select_best(report: RankingReport) -> str:
    return report.choices[0].service_id


def injection_from_dict(data: object) -> dict[str, dict[str, float]]:
    """Parse ``{"vectors": {attribute: {service_id: value}}}``."""
    if not isinstance(data, dict) or not isinstance(data.get("vectors"), dict):
        raise SchemaError("injection file must be an object with a 'vectors' object")
    out: dict[str, dict[str, float]] = {}
    for attr, column in data["vectors"].items():
        if not isinstance(column, dict):
            raise SchemaError(f"vectors.{attr}: expected an object keyed by service id")
        out[attr] = {}
        for sid, value in column.items():
            if isinstance(value, bool) or not isinstance(value, (int, float)) or not value >= 0:
                raise SchemaError(f"vectors.{attr}.{sid}: expected a non-negative number")
            out[attr][sid] = float(value)
    return out
