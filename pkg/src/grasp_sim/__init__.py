"""Planar quasi-static grasping simulator and experiment harness."""

from .geometry import ContactPoint, Polygon2, Segment2, Transform2, ValidationError
from .hand import (
    BaselineGripperModel,
    FingerLinkage,
    HandConfig,
    HandState,
    SliderState,
    make_hand_config,
)
from .sim import ObjectModel, SimParams, WorldState, classify_grasp, lift_test, step

__version__ = "0.1.0"

__all__ = [
    "BaselineGripperModel",
    "ContactPoint",
    "FingerLinkage",
    "HandConfig",
    "HandState",
    "ObjectModel",
    "Polygon2",
    "Segment2",
    "SimParams",
    "SliderState",
    "Transform2",
    "ValidationError",
    "WorldState",
    "classify_grasp",
    "lift_test",
    "make_hand_config",
    "step",
    "__version__",
]
