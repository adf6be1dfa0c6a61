"""
Grid-then-refine maximization of teleportation figures of merit.

The optimal-transmissivity curves have plateaus and jumps, so every search
starts from a full grid and only polishes the best grid cell with a bounded
scalar minimizer.  The refined value is kept only if it beats the grid.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from core.config import settings
from core.exceptions import DegenerateHeraldError
from core.herald import HeraldSpec
from core.parameter_config import UNIT_TRANSMISSIVITY_THRESHOLD, default_squeezing_grid, default_transmissivity_grid
from core.phase_space import ThermalSqueezeParams
from core.teleport import InputState, TeleportReport, report

logger = logging.getLogger(__name__)

OBJECTIVES = {
    "F": lambda rep: rep.F,
    "deltaF": lambda rep: rep.deltaF,
    "R": lambda rep: rep.R,
}


@dataclass(frozen=True)
class OptResult:
    objective: str
    value: float
    r: float
    T: float
    report: Optional[TeleportReport] = None
    r_th: Optional[float] = None


def effective_transmissivity(template: HeraldSpec, T: float) -> float:
    """T = 1 makes subtraction/addition impossible; use the ideal-limit point instead"""
    if T >= 1.0 and not template.is_catalysis:
        return 1.0 - settings.IDEAL_LIMIT_EPS
    return T


def evaluate(template: HeraldSpec, params: ThermalSqueezeParams, input_state: InputState,
             T: float) -> Optional[TeleportReport]:
    """Report at transmissivity T, or None where the herald cannot fire"""
    try:
        return report(template.at(effective_transmissivity(template, T)), params, input_state)
    except DegenerateHeraldError as e:
        logger.debug(f"Skipping degenerate point T={T}: {e}")
        return None


def _score(rep: Optional[TeleportReport], objective: str) -> float:
    return -math.inf if rep is None else OBJECTIVES[objective](rep)


def _best_index(values: Sequence[float]) -> int:
    """Index of the maximum, ties resolved toward the later (larger-T) entry"""
    values = np.asarray(values)
    best = values.max()
    tolerance = 1e-14 * max(1.0, abs(best)) if math.isfinite(best) else 0.0
    return int(np.flatnonzero(values >= best - tolerance)[-1])


def _refine(score: Callable[[float], float], grid: np.ndarray, index: int, tolerance: float,
            floor: float = None):
    """Bounded Brent search in the grid cells around index; returns (x, value)"""
    floor = settings.T_FLOOR if floor is None else floor
    # the first cell extends down to the floor
    low = floor if index == 0 else max(grid[index - 1], floor)
    high = grid[min(index + 1, len(grid) - 1)]
    if high <= low:
        return grid[index], score(grid[index])
    result = minimize_scalar(lambda x: -score(x), bounds=(low, high), method="bounded",
                             options={"xatol": tolerance})
    x, value = float(result.x), float(-result.fun)
    if index == 0:
        edge = score(low)
        if edge > value:
            return float(low), edge
    return x, value


def optimize_over_T(template: HeraldSpec, params: ThermalSqueezeParams, input_state: InputState,
                    objective: str = "F", T_grid: Optional[np.ndarray] = None,
                    tolerance: float = 1e-5) -> OptResult:
    """Maximize the objective over the shared transmissivity of the template's active modes"""
    T_grid = default_transmissivity_grid() if T_grid is None else np.asarray(T_grid, dtype=float)
    reports = [evaluate(template, params, input_state, T) for T in T_grid]
    scores = [_score(rep, objective) for rep in reports]
    index = _best_index(scores)
    best_T, best_value, best_report = float(T_grid[index]), scores[index], reports[index]

    if math.isfinite(best_value) and len(T_grid) > 1:
        x, value = _refine(lambda T: _score(evaluate(template, params, input_state, T), objective),
                           T_grid, index, tolerance)
        if value > best_value:
            best_T, best_value = x, value
            best_report = evaluate(template, params, input_state, x)

    logger.debug(f"optimized {template.label} over T at r={params.r}: T_opt={best_T:.6f} {objective}={best_value:.6g}")
    return OptResult(objective=objective, value=best_value, r=params.r, T=best_T, report=best_report)


def optimize_R(template: HeraldSpec, input_state: InputState, kappa: float,
               r_grid: Optional[np.ndarray] = None, T_grid: Optional[np.ndarray] = None,
               tolerance: float = 1e-5, iterations: int = 3) -> OptResult:
    """Joint (r, T) grid search for the maximum of R = deltaF * P, then coordinate refinement"""
    r_grid = default_squeezing_grid() if r_grid is None else np.asarray(r_grid, dtype=float)
    T_grid = default_transmissivity_grid() if T_grid is None else np.asarray(T_grid, dtype=float)

    def score(r: float, T: float) -> float:
        return _score(evaluate(template, ThermalSqueezeParams(r, kappa), input_state, T), "R")

    table = np.array([[score(r, T) for T in T_grid] for r in r_grid])
    flat = _best_index(table.ravel())
    i, j = divmod(flat, len(T_grid))
    best_r, best_T, best_value = float(r_grid[i]), float(T_grid[j]), float(table[i, j])
    logger.info(f"optimize_R grid for {template.label} at kappa={kappa}: R={best_value:.4e} at r={best_r}, T={best_T}")

    if math.isfinite(best_value):
        for _ in range(iterations):
            improved = False
            T_index = int(np.argmin(np.abs(T_grid - best_T)))
            T_new, value = _refine(lambda T: score(best_r, T), T_grid, T_index, tolerance)
            if value > best_value:
                best_T, best_value, improved = T_new, value, True
            r_index = int(np.argmin(np.abs(r_grid - best_r)))
            r_new, value = _refine(lambda r: score(r, best_T), r_grid, r_index, tolerance, floor=0.0)
            if value > best_value:
                best_r, best_value, improved = r_new, value, True
            if not improved:
                break

    params = ThermalSqueezeParams(best_r, kappa)
    best_report = evaluate(template, params, input_state, best_T)
    logger.info(f"optimize_R result for {template.label}: R={best_value:.4e} at r={best_r:.4f}, T={best_T:.4f}")
    return OptResult(objective="R", value=best_value, r=best_r, T=best_T, report=best_report)


def r_threshold(results: Sequence[OptResult]) -> Optional[float]:
    """First squeezing, in grid order, at which the optimal transmissivity reaches unity"""
    for result in results:
        if result.T > UNIT_TRANSMISSIVITY_THRESHOLD:
            return result.r
    return None
