"""Continuous 2D planning with the scale-free plan and its adaptive variant."""

from .env import ContinuousEnv, Disc, format_continuous_env, load_continuous_env, parse_continuous_env
from .execute import ContinuousTrace, DyadicPoint, execute_adaptive, execute_scalefree, step_continuous
from .grids import (
    LatticeGrid,
    enumerate_grid_classes,
    estimate_sufficient_scaling,
    goal_equivalent,
    grid_at_resolution,
    grid_search_equivalent,
    is_connected_at,
)
from .schedule import L_w, Schedule, ScaledAction, beta_phi, eta_w, gamma, schedule_for

__all__ = [
    "ContinuousEnv", "ContinuousTrace", "Disc", "DyadicPoint", "L_w", "LatticeGrid",
    "ScaledAction", "Schedule", "beta_phi", "enumerate_grid_classes",
    "estimate_sufficient_scaling", "eta_w", "execute_adaptive", "execute_scalefree",
    "format_continuous_env", "gamma", "goal_equivalent", "grid_at_resolution",
    "grid_search_equivalent", "is_connected_at", "load_continuous_env",
    "parse_continuous_env", "schedule_for", "step_continuous",
]
