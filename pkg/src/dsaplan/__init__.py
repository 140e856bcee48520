"""Offline memory planner: assigns offsets to buffers with known lifetimes."""
from .model import Job, Placement, Semantics, ValidationError, InvariantViolation, convert, validate_job
from .sweep import profile, Classification
from .heuristics import HEURISTICS, slff, first_fit, best_fit, igc
from .planner import PlanConfig, PlanResult, plan, hardness

__all__ = [
    "Job", "Placement", "Semantics", "ValidationError", "InvariantViolation", "convert",
    "validate_job", "profile", "Classification", "HEURISTICS", "slff", "first_fit",
    "best_fit", "igc", "PlanConfig", "PlanResult", "plan", "hardness",
]
