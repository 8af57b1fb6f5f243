"""Computational toolkit for the Einstein universe, its universal cover, and unipotent holonomy."""

from .causal import CausalKind, Relation, in_future, in_min, in_past, on_segment, relate
from .cover import CoverPoint, LiftedPhoton, alpha, base_point, chart_origin, lift_to_patch, patch_index, project
from .errors import EinkitError
from .holonomy import HeisenbergSpec, HolonomyCaseSpec, case_check, heisenberg_lattice
from .quadric import EinPoint, FormContext, Photon, minkowski_chart
from .unipotent import LiftedElement, UnipotentElement, act, canonical_lift_act, from_affine, tau, tau_limit
from .verify import CheckReport, SampleConfig

__version__ = "0.1.0"

__all__ = [
    "CausalKind",
    "CheckReport",
    "CoverPoint",
    "EinPoint",
    "EinkitError",
    "FormContext",
    "HeisenbergSpec",
    "HolonomyCaseSpec",
    "LiftedElement",
    "LiftedPhoton",
    "Photon",
    "Relation",
    "SampleConfig",
    "UnipotentElement",
    "act",
    "alpha",
    "base_point",
    "canonical_lift_act",
    "case_check",
    "chart_origin",
    "from_affine",
    "heisenberg_lattice",
    "in_future",
    "in_min",
    "in_past",
    "lift_to_patch",
    "minkowski_chart",
    "on_segment",
    "patch_index",
    "project",
    "relate",
    "tau",
    "tau_limit",
]
