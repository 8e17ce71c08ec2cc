"""Horizontal DPA study of a B-233 Montgomery-ladder kP design."""

from ._core import (
    DEFAULT_SCALAR,
    ArgumentError,
    DomainError,
    FormatError,
    IoError,
    PlanError,
    ValidationError,
    attack,
    field_inv,
    field_mul,
    field_sqr,
    gate_complexity,
    kp,
    plan_text,
    profiles,
    simulate_trace,
    sweep,
)

__all__ = [
    "DEFAULT_SCALAR",
    "ArgumentError",
    "DomainError",
    "FormatError",
    "IoError",
    "PlanError",
    "ValidationError",
    "attack",
    "field_inv",
    "field_mul",
    "field_sqr",
    "gate_complexity",
    "kp",
    "plan_text",
    "profiles",
    "simulate_trace",
    "sweep",
]
