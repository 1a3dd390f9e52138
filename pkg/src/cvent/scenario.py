"""Scenario files: JSON documents describing one batch computation.

Physical quantities are SI and dimensionless ones carry ``"unit":
"dimensionless"``; every scalar is written as ``{"value": ..., "unit": ...}``.
A minimal file::

    {
      "name": "demo",
      "alpha_tilde": {"value": -0.4, "unit": "dimensionless"},
      "noise": {"kappa_tilde": {"value": 1, "unit": "dimensionless"},
                "n_th": {"value": 0, "unit": "dimensionless"}},
      "outputs": ["steady_state", "report"]
    }

See README.md for the full schema.
"""
import json
import math
from pathlib import Path
from typing import List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .errors import ScenarioError
from .potentials import PotentialSpec

OUTPUTS = ("trajectory", "steady_state", "entanglement_map", "precision_map", "report")
SWEEPABLE = ("alpha_tilde", "kappa_tilde", "n_th", "z", "epsilon")
ELEMENT_LABELS = ("11", "12", "13", "14", "22", "23", "24", "33", "34", "44")

_SI_UNITS = {
    "m": ("kg",),
    "omega_m": ("rad/s",),
    "r": ("m",),
    "alpha": ("J*m^n", "SI"),
    "q1": ("C",),
    "q2": ("C",),
}


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class Quantity(_Strict):
    value: float
    unit: str

    @field_validator("value")
    @classmethod
    def _finite(cls, v):
        if not math.isfinite(v):
            raise ValueError("must be finite")
        return v


def _expect_unit(q, units, name):
    if q is not None and q.unit not in units:
        raise ValueError(f"{name}: unit must be {' or '.join(repr(u) for u in units)}, got {q.unit!r}")
    return q


def _dimensionless(q, name):
    return _expect_unit(q, ("dimensionless",), name)


class PotentialModel(_Strict):
    kind: Literal["generic", "coulomb", "newtonian"]
    m: Quantity
    omega_m: Quantity
    r: Quantity
    n: int = 1
    alpha: Optional[Quantity] = None
    q1: Optional[Quantity] = None
    q2: Optional[Quantity] = None

    @model_validator(mode="after")
    def _check(self):
        for name, units in _SI_UNITS.items():
            _expect_unit(getattr(self, name), units, name)
        for name in ("m", "omega_m", "r"):
            if getattr(self, name).value <= 0:
                raise ValueError(f"{name} must be positive")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        required = {"generic": ("alpha",), "coulomb": ("q1", "q2"), "newtonian": ()}[self.kind]
        for name in required:
            if getattr(self, name) is None:
                raise ValueError(f"{self.kind} potential requires {name!r}")
        if self.kind != "generic" and self.n != 1:
            raise ValueError(f"{self.kind} potential has n = 1")
        return self

    def to_spec(self):
        def v(q):
            return 0.0 if q is None else q.value

        return PotentialSpec(
            kind=self.kind,
            m=self.m.value,
            omega_m=self.omega_m.value,
            r=self.r.value,
            n=self.n,
            alpha=v(self.alpha),
            q1=v(self.q1),
            q2=v(self.q2),
        )


class NoiseModelSpec(_Strict):
    kappa_tilde: Quantity
    n_th: Quantity

    @model_validator(mode="after")
    def _check(self):
        for name in ("kappa_tilde", "n_th"):
            q = _dimensionless(getattr(self, name), name)
            if q.value < 0:
                raise ValueError(f"{name} must be >= 0")
        return self


class Linspace(_Strict):
    start: float
    stop: float
    num: int = Field(ge=1)
    scale: Literal["linear", "log"] = "linear"

    @model_validator(mode="after")
    def _check(self):
        if self.scale == "log" and (self.start <= 0 or self.stop <= 0):
            raise ValueError("log-spaced range needs positive start and stop")
        return self

    def values(self):
        if self.scale == "log":
            return [float(x) for x in np.geomspace(self.start, self.stop, self.num)]
        return [float(x) for x in np.linspace(self.start, self.stop, self.num)]


Values = Union[List[float], Linspace]


def _expand(values):
    return list(values.values()) if isinstance(values, Linspace) else [float(x) for x in values]


class SweepAxis(_Strict):
    parameter: Literal["alpha_tilde", "kappa_tilde", "n_th", "z", "epsilon"]
    values: Values

    @field_validator("values")
    @classmethod
    def _nonempty(cls, v):
        if not _expand(v):
            raise ValueError("sweep axis needs at least one value")
        if not all(math.isfinite(x) for x in _expand(v)):
            raise ValueError("sweep values must be finite")
        return v

    def expanded(self):
        return _expand(self.values)


class ErrorBudgetSpec(_Strict):
    epsilon: Quantity
    per_element: dict = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check(self):
        _dimensionless(self.epsilon, "epsilon")
        if self.epsilon.value < 0:
            raise ValueError("epsilon must be >= 0")
        for label, value in self.per_element.items():
            if label not in ELEMENT_LABELS:
                raise ValueError(f"per_element key {label!r} is not one of {ELEMENT_LABELS}")
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value >= 0):
                raise ValueError(f"per_element[{label!r}] must be a finite number >= 0")
        return self


class Scenario(_Strict):
    name: str = Field(min_length=1, pattern=r"^[A-Za-z0-9_.-]+$")
    description: str = ""
    notes: List[str] = Field(default_factory=list)
    potential: Optional[PotentialModel] = None
    alpha_tilde: Optional[Quantity] = None
    noise: NoiseModelSpec = NoiseModelSpec(
        kappa_tilde=Quantity(value=0.0, unit="dimensionless"), n_th=Quantity(value=0.0, unit="dimensionless")
    )
    z: Quantity = Quantity(value=1.0, unit="dimensionless")
    time_grid: Optional[Values] = None
    sweep: List[SweepAxis] = Field(default_factory=list, max_length=2)
    error_budget: Optional[ErrorBudgetSpec] = None
    allow_unstable: bool = False
    outputs: List[Literal["trajectory", "steady_state", "entanglement_map", "precision_map", "report"]] = Field(
        min_length=1
    )

    @model_validator(mode="after")
    def _check(self):
        if (self.potential is None) == (self.alpha_tilde is None):
            raise ValueError("exactly one of 'potential' and 'alpha_tilde' must be given")
        if self.alpha_tilde is not None:
            _dimensionless(self.alpha_tilde, "alpha_tilde")
        _dimensionless(self.z, "z")
        if self.z.value <= 0:
            raise ValueError("z must be positive")
        names = [axis.parameter for axis in self.sweep]
        if len(set(names)) != len(names):
            raise ValueError("sweep axes must be distinct parameters")
        if "alpha_tilde" in names and self.potential is not None:
            raise ValueError("cannot sweep alpha_tilde when it is derived from 'potential'")
        for axis in self.sweep:
            values = axis.expanded()
            if axis.parameter in ("kappa_tilde", "n_th", "epsilon") and min(values) < 0:
                raise ValueError(f"sweep over {axis.parameter} has negative values")
            if axis.parameter == "z" and min(values) <= 0:
                raise ValueError("sweep over z needs positive values")
        if "trajectory" in self.outputs and not self.times():
            raise ValueError("'trajectory' output requires a non-empty time_grid")
        if self.time_grid is not None and any(t < 0 or not math.isfinite(t) for t in self.times()):
            raise ValueError("time_grid values must be finite and >= 0")
        if "precision_map" in self.outputs and self.error_budget is None and "epsilon" not in names:
            raise ValueError("'precision_map' output requires error_budget or an epsilon sweep")
        return self

    def times(self):
        return [] if self.time_grid is None else _expand(self.time_grid)


def _format_loc(loc):
    return ".".join(str(p) for p in loc if not str(p).startswith("function-"))


def parse_scenario(data, source="<scenario>"):
    """Validate a decoded scenario dict; raise :class:`ScenarioError` on failure."""
    try:
        return Scenario.model_validate(data)
    except ValidationError as exc:
        err = exc.errors()[0]
        loc = _format_loc(err["loc"]) or "<root>"
        msg = err["msg"].removeprefix("Value error, ")
        extra = f" (+{len(exc.errors()) - 1} more)" if len(exc.errors()) > 1 else ""
        raise ScenarioError(f"{source}: field '{loc}': {msg}{extra}", field=loc) from exc


def load_scenario(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"{path}: cannot read scenario file: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return parse_scenario(data, str(path))
