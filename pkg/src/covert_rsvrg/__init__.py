"""Artificial-noise basis design for covert communication with R-SVRG on St(p, n, C)."""

from .channels import ChannelDataset, ChannelSample, SystemConfig, sample_dataset
from .objective import CovertMetrics, ObjectiveValue, evaluate, objective_full
from .optim import OptimizerOptions, OptimizerTrace, run
from .stiefel import random_point, retract, tangent_project

__all__ = [
    "ChannelDataset",
    "ChannelSample",
    "CovertMetrics",
    "ObjectiveValue",
    "OptimizerOptions",
    "OptimizerTrace",
    "SystemConfig",
    "evaluate",
    "objective_full",
    "random_point",
    "retract",
    "run",
    "sample_dataset",
    "tangent_project",
]
