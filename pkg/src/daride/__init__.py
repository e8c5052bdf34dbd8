"""Preemptive multi-vehicle Dial-a-Ride: minimum-makespan schedules, bounds and tooling."""

from daride.lower_bounds import LowerBoundSet, lb_max
from daride.metric import Metric, MidPoint, WeightedGraph, metric_from_graph
from daride.model import Demand, Drop, Instance, Move, MoveMid, Pick, Schedule, Wait
from daride.multi.partial import SolverConfig, cap_solve, partial
from daride.multi.uncap import uncap_solve, uncap_solve_minor_free
from daride.multi.weighted import weighted_solve
from daride.validate import makespan, validate

__all__ = [
    "Demand", "Drop", "Instance", "LowerBoundSet", "Metric", "MidPoint", "Move", "MoveMid", "Pick",
    "Schedule", "SolverConfig", "Wait", "WeightedGraph", "cap_solve", "lb_max", "makespan",
    "metric_from_graph", "partial", "uncap_solve", "uncap_solve_minor_free", "validate", "weighted_solve",
]
