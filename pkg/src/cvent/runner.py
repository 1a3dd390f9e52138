"""Batch driver: expand a scenario into cells, evaluate them, write CSV + RunRecord."""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from functools import lru_cache
import csv
import io
import itertools
import json
import math
import os
from pathlib import Path

import numpy as np

from . import __version__
from .core import check_physicality, element_labels, squeezed_state
from .dynamics import NoiseModel, drift_diffusion, steady_state_numeric, trajectory
from .entanglement import (
    log_negativity,
    ppt_invariants,
    steady_state_closed_form,
    steady_state_log_negativity,
    steady_state_minus_log_nu,
)
from .errors import CventError, NoSteadyStateError, NonDifferentiableError, OutputError, StabilityError
from .linalg import lyapunov_residual
from .metrology import ErrorBudget, partials, propagate_error
from .potentials import check_stability, coupling

PARAMETERS = ("alpha_tilde", "kappa_tilde", "n_th", "z", "epsilon")
SIGMA_COLUMNS = tuple(f"s{label}" for label in element_labels())
MAP_OUTPUTS = ("entanglement_map", "precision_map")
NAN = float("nan")


def fmt(value):
    """Fixed 17-significant-digit rendering used for every CSV cell."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return "nan"
    return format(value, ".16e")


def write_csv(path, header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows([fmt(v) for v in row] for row in rows)
    try:
        Path(path).write_text(buf.getvalue())
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror}") from exc


@dataclass(frozen=True)
class Cell:
    index: tuple
    alpha_tilde: float
    kappa_tilde: float
    n_th: float
    z: float
    epsilon: float

    def params(self):
        return {p: getattr(self, p) for p in PARAMETERS}


@dataclass(frozen=True)
class Job:
    cell: Cell
    outputs: tuple
    times: tuple
    per_element: tuple
    allow_unstable: bool


@dataclass
class RunResult:
    name: str
    alpha_tilde: float
    axes: list
    cells: list
    results: list
    files: list = field(default_factory=list)
    record_path: Path = None


def resolve_alpha(scenario):
    if scenario.alpha_tilde is not None:
        return scenario.alpha_tilde.value
    return coupling(scenario.potential.to_spec())


def expand_cells(scenario):
    """Cartesian product of the sweep axes; the first axis varies slowest."""
    base = {
        "alpha_tilde": resolve_alpha(scenario),
        "kappa_tilde": scenario.noise.kappa_tilde.value,
        "n_th": scenario.noise.n_th.value,
        "z": scenario.z.value,
        "epsilon": scenario.error_budget.epsilon.value if scenario.error_budget else 0.0,
    }
    axes = [(axis.parameter, axis.expanded()) for axis in scenario.sweep]
    cells = []
    ranges = [range(len(values)) for _, values in axes]
    for index in itertools.product(*ranges):
        params = dict(base)
        for (name, values), i in zip(axes, index):
            params[name] = values[i]
        cells.append(Cell(index=tuple(index), **params))
    return base, axes, cells


def _steady_row(cell, noise):
    sigma = steady_state_numeric(cell.alpha_tilde, noise)
    dd = drift_diffusion(cell.alpha_tilde, noise)
    residual = lyapunov_residual(dd.a_matrix, sigma, dd.d_matrix) / np.linalg.norm(dd.d_matrix)
    report = log_negativity(sigma)
    row = {c: v for c, v in zip(SIGMA_COLUMNS, sigma.ravel())}
    row.update(
        lyapunov_residual=residual,
        e_n=report.e_n,
        e_n_closed_form=steady_state_log_negativity(cell.alpha_tilde, noise),
        minus_ln_nu_minus=steady_state_minus_log_nu(cell.alpha_tilde, noise),
        nu_minus=report.nu_minus,
        entangled=report.entangled,
    )
    return row


@lru_cache(maxsize=256)
def _steady_partials(alpha_tilde, kappa_tilde, n_th):
    # Partials do not depend on epsilon; cache them across the epsilon axis.
    sigma = steady_state_closed_form(alpha_tilde, NoiseModel(kappa_tilde, n_th))
    return sigma, partials(sigma)


def _propagate(cell, per_element):
    sigma, grads = _steady_partials(cell.alpha_tilde, cell.kappa_tilde, cell.n_th)
    return propagate_error(sigma, ErrorBudget(epsilon=cell.epsilon, per_element=dict(per_element)), precomputed=grads)


def _budget(cell, per_element):
    try:
        b = _propagate(cell, per_element)
    except NonDifferentiableError:
        return NAN, NAN, "separable"
    return b.delta_e_n, b.relative_error, ("exceeds_unity" if b.relative_error > 1 else "ok")


def _report_row(cell, noise, per_element):
    if noise.kappa_tilde == 0:
        raise NoSteadyStateError("report needs a steady state; kappa_tilde must be > 0")
    minus_ln = steady_state_minus_log_nu(cell.alpha_tilde, noise)
    delta, rel, flag = _budget(cell, per_element)
    e_n = steady_state_log_negativity(cell.alpha_tilde, noise)
    return {
        "stability": check_stability(cell.alpha_tilde),
        "e_n": e_n,
        "minus_ln_nu_minus": minus_ln,
        "minus_log2_nu_minus": minus_ln / math.log(2),
        "delta_e_n": delta,
        "relative_error": rel,
        "entangled": e_n > 0,
        "flag": flag,
    }


def _map_row(cell, noise):
    if check_stability(cell.alpha_tilde) == "unstable":
        return {"e_n": NAN, "nu_minus": NAN, "flag": "unstable"}
    try:
        e_n = steady_state_log_negativity(cell.alpha_tilde, noise)
        nu = math.exp(-steady_state_minus_log_nu(cell.alpha_tilde, noise))
    except CventError as exc:
        return {"e_n": NAN, "nu_minus": NAN, "flag": type(exc).__name__}
    return {"e_n": e_n, "nu_minus": nu, "flag": "ok" if e_n > 0 else "separable"}


def _precision_row(cell, noise, per_element):
    if check_stability(cell.alpha_tilde) == "unstable":
        return {"e_n": NAN, "delta_e_n": NAN, "relative_error": NAN, "flag": "unstable"}
    try:
        b = _propagate(cell, per_element)
    except NonDifferentiableError:
        return {"e_n": 0.0, "delta_e_n": NAN, "relative_error": NAN, "flag": "separable"}
    except CventError:
        return {"e_n": NAN, "delta_e_n": NAN, "relative_error": NAN, "flag": "error"}
    flag = "exceeds_unity" if b.relative_error > 1 else "ok"
    return {"e_n": b.e_n, "delta_e_n": b.delta_e_n, "relative_error": b.relative_error, "flag": flag}


def _trajectory_rows(cell, times, allow_unstable):
    noise = NoiseModel(cell.kappa_tilde, cell.n_th)
    rows = []
    for tau, sigma in trajectory(squeezed_state(cell.z), cell.alpha_tilde, noise, times, allow_unstable):
        inv = ppt_invariants(sigma)
        rep = log_negativity(sigma)
        rows.append(
            [tau, rep.e_n, rep.nu_minus, rep.nu_plus, inv.delta_tilde, inv.det_sigma, check_physicality(sigma).physical]
            + list(sigma.ravel())
        )
    return rows


TRAJECTORY_HEADER = ("tau", "e_n", "nu_minus", "nu_plus", "delta_tilde", "det_sigma", "physical") + SIGMA_COLUMNS


def evaluate(job):
    """Compute every requested output for one cell. Pure; safe to run in a worker process."""
    cell = job.cell
    noise = NoiseModel(cell.kappa_tilde, cell.n_th)
    out = {}
    if "trajectory" in job.outputs:
        out["trajectory"] = _trajectory_rows(cell, job.times, job.allow_unstable)
    if "steady_state" in job.outputs:
        out["steady_state"] = _steady_row(cell, noise)
    if "entanglement_map" in job.outputs:
        out["entanglement_map"] = _map_row(cell, noise)
    if "precision_map" in job.outputs:
        out["precision_map"] = _precision_row(cell, noise, job.per_element)
    if "report" in job.outputs:
        out["report"] = _report_row(cell, noise, job.per_element)
    return out


def _preflight(scenario, cells):
    if scenario.allow_unstable or all(o in MAP_OUTPUTS for o in scenario.outputs):
        return
    for cell in cells:
        if check_stability(cell.alpha_tilde) == "unstable":
            raise StabilityError(
                f"{scenario.name}: alpha_tilde = {cell.alpha_tilde:.6g} is below -1/2 (cell {list(cell.index)}); "
                "set allow_unstable to evolve it anyway"
            )


def default_jobs():
    return os.cpu_count() or 1


def run_scenario(scenario, out_dir, jobs=1, source=None):
    """Evaluate ``scenario`` and write its outputs into ``out_dir``."""
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"cannot create output directory {out_dir}: {exc.strerror}") from exc
    base, axes, cells = expand_cells(scenario)
    _preflight(scenario, cells)

    per_element = tuple(sorted(scenario.error_budget.per_element.items())) if scenario.error_budget else ()
    work = [Job(c, tuple(scenario.outputs), tuple(scenario.times()), per_element, scenario.allow_unstable) for c in cells]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(work))) as pool:
            results = list(pool.map(evaluate, work, chunksize=max(1, len(work) // (4 * jobs))))
    else:
        results = [evaluate(j) for j in work]

    result = RunResult(scenario.name, base["alpha_tilde"], axes, cells, results)
    _write_outputs(scenario, result, out_dir)
    _write_record(scenario, result, out_dir, source)
    return result


def _param_columns(axes):
    swept = [name for name, _ in axes]
    return list(PARAMETERS) if not swept else swept + [p for p in PARAMETERS if p not in swept]


def _write_outputs(scenario, result, out_dir):
    name = scenario.name
    params = _param_columns(result.axes)
    for output in scenario.outputs:
        if output == "trajectory":
            header = tuple(params) + TRAJECTORY_HEADER
            for flat, (cell, res) in enumerate(zip(result.cells, result.results)):
                prefix = [cell.params()[p] for p in params]
                path = out_dir / f"{name}_trajectory_{flat:03d}.csv"
                write_csv(path, header, [prefix + row for row in res["trajectory"]])
                result.files.append(path.name)
            continue
        if output == "precision_map":
            lead = ["alpha_tilde", "epsilon"]
            fixed = ["e_n", "delta_e_n", "relative_error", "flag"]
            extra = [p for p in params if p not in lead]
            header = lead + fixed + extra
            rows = []
            for cell, res in zip(result.cells, result.results):
                p = cell.params()
                rows.append([p["alpha_tilde"], p["epsilon"]] + [res[output][k] for k in fixed] + [p[k] for k in extra])
        else:
            keys = list(result.results[0][output]) if result.results else []
            header = params + keys
            rows = [[cell.params()[p] for p in params] + [res[output][k] for k in keys] for cell, res in zip(result.cells, result.results)]
        path = out_dir / f"{name}_{output}.csv"
        write_csv(path, header, rows)
        result.files.append(path.name)


def resolved_scenario(scenario, alpha_tilde):
    """Scenario dict with the coupling substituted directly for the potential."""
    data = scenario.model_dump(mode="json", exclude_none=True)
    data.pop("potential", None)
    data["alpha_tilde"] = {"value": alpha_tilde, "unit": "dimensionless"}
    return data


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, np.integer):
        return int(value)
    return value


def _write_record(scenario, result, out_dir, source):
    record = {
        "scenario": scenario.name,
        "software_version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "source": None if source is None else str(source),
        "resolved": {
            "alpha_tilde": result.alpha_tilde,
            "stability": check_stability(result.alpha_tilde),
            "coupling_source": "alpha_tilde" if scenario.potential is None else f"potential:{scenario.potential.kind}",
        },
        "resolved_scenario": resolved_scenario(scenario, result.alpha_tilde),
        "cells": [
            {
                "index": list(cell.index),
                "parameters": cell.params(),
                "results": {k: v for k, v in res.items() if k != "trajectory"},
            }
            for cell, res in zip(result.cells, result.results)
        ],
        "outputs": list(result.files),
    }
    path = out_dir / f"{scenario.name}_run.json"
    try:
        path.write_text(json.dumps(_jsonable(record), indent=2) + "\n")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror}") from exc
    result.record_path = path
