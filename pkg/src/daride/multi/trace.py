"""Solver diagnostics."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from daride.lower_bounds import LowerBoundSet
from daride.metric import Number


@dataclass
class PartialRecord:
    bound: Number
    depth: int
    vehicles: int
    demands: int
    covered: int
    cut: int
    kind: str = "tour"  # tour | split | base | empty


@dataclass
class SolveTrace:
    bounds: list[Number] = field(default_factory=list)
    calls: list[PartialRecord] = field(default_factory=list)
    makespan: Number = 0
    lower_bounds: LowerBoundSet | None = None
    notes: dict[str, Any] = field(default_factory=dict)
