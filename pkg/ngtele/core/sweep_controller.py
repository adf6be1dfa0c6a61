"""
Central Sweep Controller
Orchestrates optimizer runs over parameter grids and assembles output rows
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Dict, List, Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator
from tqdm import tqdm

from core.config import settings
from core.exceptions import DegenerateHeraldError
from core.fock_oracle import herald_oracle, oracle_fidelity
from core.herald import HeraldSpec
from core.optimizer import OptResult, evaluate, optimize_over_T, optimize_R, r_threshold
from core.parameter_config import (
    CLASSICAL_FIDELITY_BOUND,
    INPUT_SQUEEZING_DEFAULT,
    KAPPA_MIN,
    KAPPA_TMST_REFERENCE,
    KAPPA_TMSV,
    SQUEEZING_DEFAULT,
    SQUEEZING_MIN,
    TRANSMISSIVITY_MAX,
    get_kappa_parameters,
    get_squeezing_parameters,
    get_transmissivity_parameters,
    grid_text,
    parse_grid,
    validate_kappa,
    validate_squeezing,
)
from core.phase_space import ThermalSqueezeParams
from core.teleport import InputState, TeleportReport, fidelity_tmst_closed_form

logger = logging.getLogger(__name__)

SweepMode = Literal["table1", "fid-scan", "kappa-scan", "heatmap", "r-profile"]

# Table columns: (name, spec label, kappa)
TABLE1_COLUMNS = (
    ("1-PSTMST", "sym-1-PS", KAPPA_TMST_REFERENCE),
    ("1-PSTMSV", "sym-1-PS", KAPPA_TMSV),
    ("1-PCTMST", "sym-1-PC", KAPPA_TMST_REFERENCE),
    ("1-PCTMSV", "sym-1-PC", KAPPA_TMSV),
)
TABLE1_QUANTITIES = ("R_max", "r_opt", "T_opt", "F", "deltaF", "P")


class SweepConfig(BaseModel):
    """Validated configuration of one sweep run"""
    mode: SweepMode = "fid-scan"
    specs: List[str] = Field(default_factory=lambda: ["sym-1-PS"])
    input: Literal["coherent", "sqvac"] = "coherent"
    eps: float = INPUT_SQUEEZING_DEFAULT
    kappa: float = KAPPA_TMST_REFERENCE
    r: Optional[float] = None
    grid_r: str = grid_text(get_squeezing_parameters())
    grid_t: str = grid_text(get_transmissivity_parameters())
    grid_kappa: str = grid_text(get_kappa_parameters())
    objective: Literal["F", "deltaF", "R"] = "F"
    refine_tolerance: float = 1e-5
    refine_iterations: int = 3
    workers: int = Field(default_factory=lambda: settings.DEFAULT_WORKERS, ge=1)
    oracle: bool = False
    cutoff: int = Field(default_factory=lambda: settings.DEFAULT_CUTOFF, ge=5)

    @field_validator("specs")
    @classmethod
    def check_specs(cls, specs: List[str]) -> List[str]:
        if not specs:
            raise ValueError("at least one herald spec is required")
        for label in specs:
            HeraldSpec.from_label(label)
        return specs

    @field_validator("kappa")
    @classmethod
    def check_kappa(cls, kappa: float) -> float:
        return validate_kappa(kappa)

    @field_validator("r")
    @classmethod
    def check_r(cls, r: Optional[float]) -> Optional[float]:
        return None if r is None else validate_squeezing(r)

    @field_validator("grid_r", "grid_t", "grid_kappa")
    @classmethod
    def check_grid(cls, text: str) -> str:
        parse_grid(text)
        return text

    @model_validator(mode="after")
    def check_grid_domains(self) -> "SweepConfig":
        if self.r_values.min() < SQUEEZING_MIN:
            raise ValueError(f"squeezing grid {self.grid_r} goes below {SQUEEZING_MIN}")
        if self.T_values.min() <= 0 or self.T_values.max() > TRANSMISSIVITY_MAX:
            raise ValueError(f"transmissivity grid {self.grid_t} leaves (0, {TRANSMISSIVITY_MAX}]")
        if self.kappa_values.min() < KAPPA_MIN:
            raise ValueError(f"kappa grid {self.grid_kappa} goes below {KAPPA_MIN}")
        return self

    @property
    def r_values(self) -> np.ndarray:
        return parse_grid(self.grid_r)

    @property
    def T_values(self) -> np.ndarray:
        return parse_grid(self.grid_t)

    @property
    def kappa_values(self) -> np.ndarray:
        return parse_grid(self.grid_kappa)

    @property
    def input_state(self) -> InputState:
        return InputState.coherent() if self.input == "coherent" else InputState.squeezed_vacuum(self.eps)


@dataclass
class SweepProgress:
    """Progress tracking for one sweep"""
    sweep_id: str
    status: str  # pending, processing, completed, failed
    total_points: int = 0
    processed_points: int = 0
    current_step: str = ""
    error_message: Optional[str] = None
    started_at: Optional[float] = None
    completed_at: Optional[float] = None

    @property
    def progress_percentage(self) -> float:
        return 100.0 * self.processed_points / self.total_points if self.total_points else 0.0

    @property
    def elapsed(self) -> float:
        if self.started_at is None:
            return 0.0
        return (self.completed_at or time.monotonic()) - self.started_at


@dataclass
class SweepResult:
    rows: List[Dict[str, Any]]
    columns: List[str]
    progress: SweepProgress
    extras: Dict[str, Any] = field(default_factory=dict)


class SweepController:
    """
    Runs one SweepConfig: evaluates grid points (optionally on a thread pool),
    keeps rows in grid order and tracks progress.
    """

    def __init__(self, config: SweepConfig, sweep_id: str, show_progress: bool = True):
        self.config = config
        self.show_progress = show_progress
        self.progress = SweepProgress(sweep_id=sweep_id, status="pending")

    # -----------------------------------------------------------------
    # plumbing
    # -----------------------------------------------------------------

    def _map(self, func: Callable, items: Sequence, step: str) -> List:
        """Evaluate func over items; results come back in item order"""
        self.progress.current_step = step
        self.progress.total_points += len(items)
        logger.info(f"SWEEP {self.progress.sweep_id} | {step} | {len(items)} grid points, {self.config.workers} workers")
        bar = tqdm(total=len(items), desc=step, disable=not self.show_progress, leave=False)
        results = []
        try:
            if self.config.workers > 1:
                with ThreadPoolExecutor(max_workers=self.config.workers) as pool:
                    for result in pool.map(func, items):
                        results.append(result)
                        self.progress.processed_points += 1
                        bar.update()
            else:
                for item in items:
                    results.append(func(item))
                    self.progress.processed_points += 1
                    bar.update()
        finally:
            bar.close()
        return results

    def run(self) -> SweepResult:
        handlers = {
            "table1": self.run_table1,
            "fid-scan": self.run_fid_scan,
            "kappa-scan": self.run_kappa_scan,
            "heatmap": self.run_heatmap,
            "r-profile": self.run_r_profile,
        }
        self.progress.status = "processing"
        self.progress.started_at = time.monotonic()
        try:
            result = handlers[self.config.mode]()
        except Exception as e:
            self.progress.status = "failed"
            self.progress.error_message = str(e)
            logger.error(f"SWEEP {self.progress.sweep_id} failed in step '{self.progress.current_step}': {e}")
            raise
        self.progress.status = "completed"
        self.progress.completed_at = time.monotonic()
        logger.info(
            f"SWEEP {self.progress.sweep_id} | {self.config.mode} completed | "
            f"{self.progress.processed_points} points in {self.progress.elapsed:.1f}s"
        )
        return result

    @staticmethod
    def _report_columns(rep: Optional[TeleportReport]) -> Dict[str, Any]:
        if rep is None:
            return {"F": None, "F_base": None, "deltaF": None, "P": None, "R": None}
        return {"F": rep.F, "F_base": rep.F_base, "deltaF": rep.deltaF, "P": rep.P, "R": rep.R}

    # -----------------------------------------------------------------
    # modes
    # -----------------------------------------------------------------

    def run_fid_scan(self) -> SweepResult:
        """Fidelity versus r with T optimized, one block per spec"""
        config, input_state = self.config, self.config.input_state
        rows, thresholds = [], {}
        for label in config.specs:
            template = HeraldSpec.from_label(label)

            def point(r, template=template):
                return optimize_over_T(template, ThermalSqueezeParams(r, config.kappa), input_state,
                                       objective=config.objective, T_grid=config.T_values,
                                       tolerance=config.refine_tolerance)

            results = self._map(point, list(config.r_values), f"fid-scan {label}")
            threshold = r_threshold(results) if template.is_catalysis else None
            thresholds[label] = threshold
            for result in (replace(result, r_th=threshold) for result in results):
                rows.append({
                    "spec": label, "input": input_state.label, "kappa": config.kappa, "r": result.r,
                    "T_opt": result.T, **self._report_columns(result.report), "r_th": result.r_th,
                })
        columns = ["spec", "input", "kappa", "r", "T_opt", "F", "F_base", "deltaF", "P", "R", "r_th"]
        return SweepResult(rows=rows, columns=columns, progress=self.progress, extras={"r_th": thresholds})

    def optimal_squeezing(self, template: HeraldSpec) -> float:
        """r maximizing deltaF (T optimized) at the reference kappa"""
        config, input_state = self.config, self.config.input_state

        def point(r):
            return optimize_over_T(template, ThermalSqueezeParams(r, KAPPA_TMST_REFERENCE), input_state,
                                   objective="deltaF", T_grid=config.T_values, tolerance=config.refine_tolerance)

        results = self._map(point, list(config.r_values), f"kappa-scan optimal r {template.label}")
        best = max(results, key=lambda result: (result.value, result.r))
        logger.info(f"kappa-scan {template.label}: optimal r={best.r} (deltaF={best.value:.4e})")
        return best.r

    def run_kappa_scan(self) -> SweepResult:
        """Fidelity versus kappa at fixed r with T optimized"""
        config, input_state = self.config, self.config.input_state
        rows = []
        for label in config.specs:
            template = HeraldSpec.from_label(label)
            r = config.r if config.r is not None else self.optimal_squeezing(template)

            def point(kappa, template=template, r=r):
                return optimize_over_T(template, ThermalSqueezeParams(r, kappa), input_state,
                                       objective=config.objective, T_grid=config.T_values,
                                       tolerance=config.refine_tolerance)

            results = self._map(point, list(config.kappa_values), f"kappa-scan {label}")
            for kappa, result in zip(config.kappa_values, results):
                rows.append({
                    "spec": label, "input": input_state.label, "r": r, "kappa": float(kappa),
                    "T_opt": result.T, **self._report_columns(result.report),
                })
        columns = ["spec", "input", "r", "kappa", "T_opt", "F", "F_base", "deltaF", "P", "R"]
        return SweepResult(rows=rows, columns=columns, progress=self.progress)

    def run_heatmap(self) -> SweepResult:
        """P, deltaF and region flags over the (r, T) plane"""
        config, input_state = self.config, self.config.input_state
        rows = []
        for label in config.specs:
            template = HeraldSpec.from_label(label)
            grid = [(float(r), float(T)) for r in config.r_values for T in config.T_values]

            def point(rt, template=template):
                r, T = rt
                return evaluate(template, ThermalSqueezeParams(r, config.kappa), input_state, T)

            reports = self._map(point, grid, f"heatmap {label}")
            for (r, T), rep in zip(grid, reports):
                rows.append({
                    "spec": label, "input": input_state.label, "kappa": config.kappa, "r": r, "T": T,
                    **self._report_columns(rep), **region_flags(rep),
                })
        columns = ["spec", "input", "kappa", "r", "T", "F", "F_base", "deltaF", "P", "R", "gray", "black"]
        return SweepResult(rows=rows, columns=columns, progress=self.progress)

    def run_r_profile(self) -> SweepResult:
        """F, deltaF, P and R along the T grid at fixed r"""
        config, input_state = self.config, self.config.input_state
        r = config.r if config.r is not None else SQUEEZING_DEFAULT
        rows = []
        for label in config.specs:
            template = HeraldSpec.from_label(label)

            def point(T, template=template):
                return evaluate(template, ThermalSqueezeParams(r, config.kappa), input_state, T)

            reports = self._map(point, list(config.T_values), f"r-profile {label}")
            for T, rep in zip(config.T_values, reports):
                rows.append({
                    "spec": label, "input": input_state.label, "kappa": config.kappa, "r": r, "T": float(T),
                    **self._report_columns(rep),
                })
        columns = ["spec", "input", "kappa", "r", "T", "F", "F_base", "deltaF", "P", "R"]
        return SweepResult(rows=rows, columns=columns, progress=self.progress)

    def run_table1(self) -> SweepResult:
        """Maximum of R per column and the operating point that reaches it"""
        config, input_state = self.config, self.config.input_state

        def column(entry):
            _, label, kappa = entry
            return optimize_R(HeraldSpec.from_label(label), input_state, kappa,
                              r_grid=config.r_values, T_grid=config.T_values,
                              tolerance=config.refine_tolerance, iterations=config.refine_iterations)

        results = self._map(column, list(TABLE1_COLUMNS), "table1")
        values = {name: table1_entries(result) for (name, _, _), result in zip(TABLE1_COLUMNS, results)}
        columns = ["quantity"] + [name for name, _, _ in TABLE1_COLUMNS]

        if config.oracle:
            oracle_values = self._map(
                lambda pair: oracle_entries(pair[1], pair[0][2], input_state, config.cutoff),
                list(zip(TABLE1_COLUMNS, results)), "table1 oracle",
            )
            for (name, _, _), entries in zip(TABLE1_COLUMNS, oracle_values):
                values[f"{name} (oracle)"] = entries
                columns.append(f"{name} (oracle)")

        rows = [{"quantity": quantity, **{name: values[name][quantity] for name in columns[1:]}}
                for quantity in TABLE1_QUANTITIES]
        return SweepResult(rows=rows, columns=columns, progress=self.progress)


def region_flags(rep: Optional[TeleportReport]) -> Dict[str, bool]:
    """gray: enhancement with F above the classical bound; black: enhancement below it"""
    if rep is None:
        return {"gray": False, "black": False}
    enhanced = rep.deltaF > 0
    return {
        "gray": bool(enhanced and rep.F > CLASSICAL_FIDELITY_BOUND),
        "black": bool(enhanced and rep.F < CLASSICAL_FIDELITY_BOUND),
    }


def table1_entries(result: OptResult) -> Dict[str, Optional[float]]:
    rep = result.report
    return {
        "R_max": result.value,
        "r_opt": result.r,
        "T_opt": result.T,
        "F": rep.F if rep else None,
        "deltaF": rep.deltaF if rep else None,
        "P": rep.P if rep else None,
    }


def oracle_entries(result: OptResult, kappa: float, input_state: InputState, cutoff: int) -> Dict[str, Optional[float]]:
    """Recompute F, deltaF, P and R at the optimum with the Fock-basis oracle"""
    if result.report is None:
        return dict.fromkeys(TABLE1_QUANTITIES)
    params = ThermalSqueezeParams(result.r, kappa)
    try:
        probability, rho = herald_oracle(result.report.spec, params, cutoff)
    except DegenerateHeraldError as e:
        logger.warning(f"ORACLE skipped for {result.report.spec}: {e}")
        return dict.fromkeys(TABLE1_QUANTITIES)
    F = oracle_fidelity(rho, input_state)
    deltaF = F - fidelity_tmst_closed_form(params, input_state)
    return {"R_max": deltaF * probability, "r_opt": result.r, "T_opt": result.T,
            "F": F, "deltaF": deltaF, "P": probability}
