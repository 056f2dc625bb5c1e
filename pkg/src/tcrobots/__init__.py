"""Collision-free motion planning for one or two robots on an interval, a circle or a lollipop."""
from .errors import (DegenerateQuery, FlowStall, IllegalCoordinate, IllegalMove, NotOnSkeleton,
                     RegionMismatch, SwapImpossible, TcRobotsError, UnsupportedQuery)
from .homology import discretize, homology, oracle_path, tc_from_betti
from .planners import Plan, PlanQuery, Region, StepTag, classify, instruction_text, make_query, plan
from .retraction import FlowParams, retract_circle, retract_lollipop, reverse
from .skeleton import ConfigState, SkeletonPoint, skeleton_build, skeleton_locate, skeleton_route
from .spaces import Direction, Edge, PhysPoint, Space, dist, parse_point
from .validation import continuity_probe, validate_plan

__version__ = "0.1.0"

__all__ = [
    "DegenerateQuery",
    "FlowStall",
    "IllegalCoordinate",
    "IllegalMove",
    "NotOnSkeleton",
    "RegionMismatch",
    "SwapImpossible",
    "TcRobotsError",
    "UnsupportedQuery",
    "discretize",
    "homology",
    "oracle_path",
    "tc_from_betti",
    "Plan",
    "PlanQuery",
    "Region",
    "StepTag",
    "classify",
    "instruction_text",
    "make_query",
    "plan",
    "FlowParams",
    "retract_circle",
    "retract_lollipop",
    "reverse",
    "ConfigState",
    "SkeletonPoint",
    "skeleton_build",
    "skeleton_locate",
    "skeleton_route",
    "Direction",
    "Edge",
    "PhysPoint",
    "Space",
    "dist",
    "parse_point",
    "continuity_probe",
    "validate_plan",
]
