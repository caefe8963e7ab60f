"""AHP-based ranking and brokering of cloud renderfarm services."""

from .ahp import (
    RRRM,
    RRRV,
    Choice,
    RankingReport,
    aggregate_level,
    ahp_rank,
    build_rrrm,
    consistency_ratio,
    final_rank,
    principal_eigenvector,
    select_best,
)
from .catalog import (
    AttributeSpec,
    Catalog,
    QoSHierarchy,
    ServiceOffering,
    load_catalog,
    load_hierarchy,
    load_offerings,
    save_catalog,
)
from .matcher import MatchResult, fn_match
from .report import KiviatData, kiviat_export, render_report
from .requirements import FunctionalRequirements, RequirementSet, load_requirements

__version__ = "0.1.0"

__all__ = [
    "RRRM", "RRRV", "Choice", "RankingReport", "aggregate_level", "ahp_rank", "build_rrrm",
    "consistency_ratio", "final_rank", "principal_eigenvector", "select_best", "AttributeSpec",
    "Catalog", "QoSHierarchy", "ServiceOffering", "load_catalog", "load_hierarchy", "load_offerings",
    "save_catalog", "MatchResult", "fn_match", "KiviatData", "kiviat_export", "render_report",
    "FunctionalRequirements", "RequirementSet", "load_requirements",
]
