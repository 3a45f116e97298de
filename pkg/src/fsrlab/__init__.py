"""Combinatorial engine for finite subdivision rules on the sphere.

Parse and validate rules, subdivide to any level, decide local expansion
properties by finite graph algorithms, build fat/skinny path subdivision
graphs and probe contraction and graph hyperbolicity.
"""

from .analyzers import (
    KINDS,
    PROPERTIES,
    PropertyVerdict,
    SeparationGraph,
    build_separation_graph,
    check_bounded_valence,
    check_esub,
    check_separation,
    classify_properties,
    crosscheck_at_bound,
)
from .contraction import boundary_pair_report, contraction_report, port_walk_graph
from .engine import (
    BudgetExceeded,
    LevelComplex,
    census,
    find_returning_tile,
    get_tower,
    growth_constants,
    subdivide_sphere,
    subdivide_tile,
)
from .graphs import ProbeReport, build_subdivision_graph, level_distance, project_vertex, rushton_probe
from .library import fixture_names, load_fixture
from .model import FsrParseError, FsrSpec, parse_fsr, serialize_fsr
from .validate import InvalidRuleError, ValidationReport, compile_rule, validate_fsr

__version__ = "0.1.0"

__all__ = [
    "KINDS",
    "PROPERTIES",
    "BudgetExceeded",
    "FsrParseError",
    "FsrSpec",
    "InvalidRuleError",
    "LevelComplex",
    "ProbeReport",
    "PropertyVerdict",
    "SeparationGraph",
    "ValidationReport",
    "boundary_pair_report",
    "build_separation_graph",
    "build_subdivision_graph",
    "census",
    "check_bounded_valence",
    "check_esub",
    "check_separation",
    "classify_properties",
    "compile_rule",
    "contraction_report",
    "crosscheck_at_bound",
    "find_returning_tile",
    "fixture_names",
    "get_tower",
    "growth_constants",
    "level_distance",
    "load_fixture",
    "parse_fsr",
    "port_walk_graph",
    "project_vertex",
    "rushton_probe",
    "serialize_fsr",
    "subdivide_sphere",
    "subdivide_tile",
    "validate_fsr",
]
