"""Ideal vector, residuals, and minmax compromise selection.

Given an agents-by-situations payoff matrix: take each agent's best payoff
over all situations (the ideal vector), measure every situation by each
agent's shortfall from that ideal (the residual matrix), sort each column's
residuals ascending, and pick the situation(s) whose largest residual is
smallest.  Ties climb to the next sorted row and re-minimize among the tied
set; situations still tied past the top row are returned together as the
compromise set.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ScenarioError

NORMALIZE_NONE = "none"
NORMALIZE_BY_IDEAL = "by_ideal"


@dataclass(frozen=True)
class PayoffMatrix:
    """Agents x situations money matrix."""

    values: np.ndarray
    situations: tuple[str, ...]
    agents: tuple[str, ...]

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
            raise ScenarioError("payoff matrix must be 2-D and nonempty")
        if values.shape != (len(self.agents), len(self.situations)):
            raise ScenarioError("payoff matrix shape does not match its labels")
        if not np.all(np.isfinite(values)):
            raise ScenarioError("payoff matrix entries must be finite")


@dataclass(frozen=True)
class SelectionStep:
    """One tie-climbing round: which sorted row decided, at what value."""

    depth: int
    value: float
    survivors: tuple[int, ...]


@dataclass(frozen=True)
class CompromiseResult:
    ideal: np.ndarray | None
    residuals: np.ndarray
    sorted_residuals: np.ndarray
    selected: tuple[int, ...]
    trace: tuple[SelectionStep, ...]
    situations: tuple[str, ...]

    @property
    def deciding_value(self) -> float:
        return self.trace[-1].value

    @property
    def selected_labels(self) -> tuple[str, ...]:
        return tuple(self.situations[i] for i in self.selected)


def ideal_vector(matrix: PayoffMatrix) -> np.ndarray:
    """Per-agent maximum payoff over all situations."""
    return matrix.values.max(axis=1)


def residual_matrix(matrix: PayoffMatrix, ideal: np.ndarray | None = None) -> np.ndarray:
    """Shortfall of each entry from its row's ideal; >= 0, each row has a 0."""
    if ideal is None:
        ideal = ideal_vector(matrix)
    ideal = np.asarray(ideal, dtype=float)
    if ideal.shape != (matrix.values.shape[0],):
        raise ScenarioError("ideal vector length does not match the matrix")
    return ideal[:, None] - matrix.values


def select_from_residuals(
    residuals: np.ndarray,
    situations: tuple[str, ...],
    *,
    ideal: np.ndarray | None = None,
    quantum: float = 1e-9,
) -> CompromiseResult:
    """Run the sort-and-minmax selection on a residual matrix taken as given.

    ``quantum`` is the rounding step used for equality when hunting ties;
    exact money data (2-decimal tables) is unaffected by the default.
    """
    residuals = np.asarray(residuals, dtype=float)
    if residuals.ndim != 2 or residuals.size == 0:
        raise ScenarioError("residual matrix must be 2-D and nonempty")
    if residuals.shape[1] != len(situations):
        raise ScenarioError("residual matrix width does not match situation labels")
    if quantum <= 0:
        raise ScenarioError("quantum must be > 0")

    sorted_residuals = np.sort(residuals, axis=0)
    quantized = np.round(sorted_residuals / quantum).astype(np.int64)

    survivors = list(range(residuals.shape[1]))
    trace: list[SelectionStep] = []
    for depth, row in enumerate(range(residuals.shape[0] - 1, -1, -1)):
        level = quantized[row, survivors]
        best = level.min()
        survivors = [m for m, v in zip(survivors, level) if v == best]
        trace.append(
            SelectionStep(
                depth=depth,
                value=float(
                    min(sorted_residuals[row, m] for m in survivors)
                ),
                survivors=tuple(survivors),
            )
        )
        if len(survivors) == 1:
            break
    return CompromiseResult(
        ideal=ideal,
        residuals=residuals,
        sorted_residuals=sorted_residuals,
        selected=tuple(survivors),
        trace=tuple(trace),
        situations=tuple(situations),
    )


def compromise_select(
    matrix: PayoffMatrix,
    *,
    normalize: str = NORMALIZE_NONE,
    quantum: float = 1e-9,
) -> CompromiseResult:
    """Ideal vector, residuals, then minmax selection on a payoff matrix.

    ``normalize='by_ideal'`` divides each row's residuals by |ideal| before
    comparison, for instances whose agents trade in very different money
    scales; the default compares raw residuals.
    """
    ideal = ideal_vector(matrix)
    residuals = residual_matrix(matrix, ideal)
    if normalize == NORMALIZE_BY_IDEAL:
        scale = np.where(np.abs(ideal) > 0, np.abs(ideal), 1.0)
        compared = residuals / scale[:, None]
    elif normalize == NORMALIZE_NONE:
        compared = residuals
    else:
        raise ScenarioError(f"unknown normalize mode {normalize!r}")
    result = select_from_residuals(
        compared, matrix.situations, ideal=ideal, quantum=quantum
    )
    # Report raw-money residuals even when selection compared normalized ones.
    return CompromiseResult(
        ideal=ideal,
        residuals=residuals,
        sorted_residuals=np.sort(residuals, axis=0),
        selected=result.selected,
        trace=result.trace,
        situations=matrix.situations,
    )
