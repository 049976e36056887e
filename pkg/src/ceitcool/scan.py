"""Parameter sweeps: 1-D curves and 2-D maps of rates and spectra.

Each grid point is evaluated independently from a fresh SystemParams, so
sweeps are embarrassingly parallel and results are bit-identical for any
worker count. Heating points (Gamma <= 0) and resonant points (PoleError)
are reported through a per-point status instead of aborting the scan.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import PoleError
from .params import SystemParams, derive
from .rates import transition_rates
from .spectra import excitation_spectrum

STATUS_OK = "ok"
STATUS_HEATING = "heating"
STATUS_RESONANT = "resonant"

QUANTITIES = (
    "Gamma_over_alpha", "m_st", "A_plus", "A_minus", "D", "S_atom", "S_cavity",
)

# The coupling rules appearing in the figure captions. Each one adjusts a
# dependent parameter after the axis values are applied.
CONSTRAINTS = {
    "delta_TP=0": lambda p: p.replace(delta_c2=p.delta1 - p.Delta),
    "delta_c2=delta1-nu": lambda p: p.replace(delta_c2=p.delta1 - p.nu),
    "delta1=delta_opt": lambda p: p.replace(delta1=derive(p).delta_opt),
}


@dataclass(frozen=True)
class AxisSpec:
    name: str
    start: float
    stop: float
    points: int

    def __post_init__(self):
        if self.name not in SystemParams.field_names():
            raise ValueError(f"unknown parameter axis {self.name!r}")
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise ValueError("axis range must be finite")
        if self.points < 1:
            raise ValueError("axis needs at least one point")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.points)


@dataclass(frozen=True)
class ScanSpec:
    base: SystemParams
    quantity: str
    axis1: AxisSpec
    axis2: AxisSpec | None = None
    constraint: str | None = None

    def __post_init__(self):
        if self.quantity not in QUANTITIES:
            raise ValueError(
                f"unknown quantity {self.quantity!r}; choose from {QUANTITIES}")
        if self.constraint is not None and self.constraint not in CONSTRAINTS:
            raise ValueError(
                f"unknown constraint {self.constraint!r}; "
                f"choose from {tuple(CONSTRAINTS)}")


def _point_params(spec: ScanSpec, v1: float, v2: float | None) -> SystemParams:
    changes = {spec.axis1.name: float(v1)}
    if spec.axis2 is not None:
        changes[spec.axis2.name] = float(v2)
    p = spec.base.replace(**changes)
    if spec.constraint is not None:
        p = CONSTRAINTS[spec.constraint](p)
    return p


def evaluate_point(p: SystemParams, quantity: str) -> tuple[float, str]:
    """One grid point: (value, status)."""
    try:
        if quantity in ("S_atom", "S_cavity"):
            channel = "atom" if quantity == "S_atom" else "cavity"
            val = float(excitation_spectrum(p, np.array([p.Delta]), channel)[0])
            return val, STATUS_OK
        r = transition_rates(p)
        status = STATUS_OK if r.Gamma > 0 else STATUS_HEATING
        if quantity == "Gamma_over_alpha":
            return r.Gamma / derive(p).alpha, status
        if quantity == "m_st":
            return (r.m_st if r.m_st is not None else float("nan")), status
        if quantity == "A_plus":
            return r.A_plus, status
        if quantity == "A_minus":
            return r.A_minus, status
        if quantity == "D":
            return r.D, status
        raise ValueError(f"unknown quantity {quantity!r}")
    except PoleError:
        return float("nan"), STATUS_RESONANT


def _eval_task(args) -> tuple[float, str]:
    p, quantity = args
    return evaluate_point(p, quantity)


@dataclass(frozen=True)
class ScanResult:
    spec: ScanSpec
    axis1_values: np.ndarray
    axis2_values: np.ndarray | None
    values: np.ndarray   # shape (len(axis1), len(axis2) or 1)
    statuses: np.ndarray  # same shape, strings


def run_scan(spec: ScanSpec, workers: int = 1) -> ScanResult:
    """Evaluate the grid; point order (and hence output) is deterministic."""
    v1 = spec.axis1.values()
    v2 = spec.axis2.values() if spec.axis2 is not None else None
    inner = v2 if v2 is not None else [None]
    tasks = [
        (_point_params(spec, x1, x2), spec.quantity)
        for x1 in v1 for x2 in inner
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunk = max(1, len(tasks) // (8 * workers))
            results = list(pool.map(_eval_task, tasks, chunksize=chunk))
    else:
        results = [_eval_task(t) for t in tasks]
    shape = (len(v1), len(inner))
    values = np.array([r[0] for r in results]).reshape(shape)
    statuses = np.array([r[1] for r in results], dtype=object).reshape(shape)
    return ScanResult(
        spec=spec,
        axis1_values=v1,
        axis2_values=v2,
        values=values,
        statuses=statuses,
    )


def write_csv(result: ScanResult, fh, scaled_by_alpha: bool = False) -> None:
    """Long form: axis1, axis2, value, status (axis2 empty for 1-D scans)."""
    writer = csv.writer(fh)
    extra = ["value_over_alpha"] if scaled_by_alpha else []
    writer.writerow(
        [result.spec.axis1.name,
         result.spec.axis2.name if result.spec.axis2 else "axis2",
         "value", "status"] + extra)
    for i, x1 in enumerate(result.axis1_values):
        for j in range(result.values.shape[1]):
            x2 = "" if result.axis2_values is None else repr(
                float(result.axis2_values[j]))
            row = [repr(float(x1)), x2,
                   repr(float(result.values[i, j])), result.statuses[i, j]]
            if scaled_by_alpha:
                p = _point_params(
                    result.spec, x1,
                    None if result.axis2_values is None
                    else result.axis2_values[j])
                row.append(repr(float(result.values[i, j] / derive(p).alpha)))
            writer.writerow(row)


def write_json(result: ScanResult, fh) -> None:
    """Grid metadata plus row-major values (rows follow axis1)."""
    def _clean(x: float):
        return None if not math.isfinite(x) else x

    doc = {
        "quantity": result.spec.quantity,
        "constraint": result.spec.constraint,
        "base_params": result.spec.base.to_dict(),
        "axis1": {"name": result.spec.axis1.name,
                  "values": [float(x) for x in result.axis1_values]},
        "axis2": None if result.spec.axis2 is None else {
            "name": result.spec.axis2.name,
            "values": [float(x) for x in result.axis2_values]},
        "values": [[_clean(float(v)) for v in row] for row in result.values],
        "statuses": [list(row) for row in result.statuses],
    }
    json.dump(doc, fh, indent=1)
    fh.write("\n")


def write_gnuplot(result: ScanResult, fh) -> None:
    """Matrix format: one row per axis1 value, blank-line separated blocks."""
    for i, x1 in enumerate(result.axis1_values):
        if result.axis2_values is None:
            fh.write(f"{x1!r} {result.values[i, 0]!r}\n")
        else:
            for j, x2 in enumerate(result.axis2_values):
                fh.write(f"{x1!r} {x2!r} {result.values[i, j]!r}\n")
            fh.write("\n")
