"""2-D parameter grids over the QFI, with presets for the published heatmaps."""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .qfi import is_useful, qfi
from .spin_model import ANTIFERRO_J, FERRO_J, ModelParams

SWEEP_PARAMS = ("T", "B", "b", "D", "J")
SIGNS = {"ferro": FERRO_J, "antiferro": ANTIFERRO_J}

DEFAULT_COUNT = 64
T_RANGE = (0.05, 3.0)
FIELD_RANGE = (0.0, 3.0)
FIG2_T = 0.7


class SweepError(RuntimeError):
    """A grid cell failed; the message names the cell and its parameters."""


@dataclass(frozen=True)
class Axis:
    name: str
    min: float
    max: float
    count: int = DEFAULT_COUNT

    def __post_init__(self) -> None:
        if self.name not in SWEEP_PARAMS:
            raise ValueError(f"axis parameter must be one of {SWEEP_PARAMS}, got {self.name!r}")
        if int(self.count) != self.count or self.count < 2:
            raise ValueError(f"axis {self.name}: count must be an integer >= 2, got {self.count!r}")
        if not np.isfinite(self.min) or not np.isfinite(self.max) or not self.min < self.max:
            raise ValueError(f"axis {self.name}: need finite min < max, got [{self.min}, {self.max}]")
        if self.name == "T" and self.min <= 0:
            raise ValueError(f"temperature axis must start above 0, got min={self.min}")
        object.__setattr__(self, "min", float(self.min))
        object.__setattr__(self, "max", float(self.max))
        object.__setattr__(self, "count", int(self.count))

    def values(self) -> np.ndarray:
        return np.linspace(self.min, self.max, self.count)

    def as_dict(self) -> dict:
        return {"name": self.name, "min": self.min, "max": self.max, "count": self.count}


@dataclass(frozen=True)
class SweepSpec:
    axis1: Axis
    axis2: Axis
    fixed: ModelParams = field(default_factory=ModelParams)
    label: str = "custom"

    def __post_init__(self) -> None:
        if self.axis1.name == self.axis2.name:
            raise ValueError(f"sweep axes must differ, both are {self.axis1.name!r}")

    def cells(self) -> list[ModelParams]:
        """Merged parameters for every cell, axis1 outer, axis2 inner."""
        return [
            self.fixed.replace(**{self.axis1.name: float(u), self.axis2.name: float(v)})
            for u in self.axis1.values()
            for v in self.axis2.values()
        ]

    def metadata(self) -> dict:
        return {
            "label": self.label,
            "axis1": self.axis1.as_dict(),
            "axis2": self.axis2.as_dict(),
            "fixed": self.fixed.as_dict(),
            "version": __version__,
        }


@dataclass(frozen=True)
class SweepRow:
    x1: float
    x2: float
    qfi: float
    c_max: float
    useful: bool


def _fmt(x: float) -> str:
    return format(x, ".17g")


@dataclass(frozen=True)
class SweepTable:
    spec: SweepSpec
    rows: tuple[SweepRow, ...]

    @property
    def header(self) -> list[str]:
        return [self.spec.axis1.name, self.spec.axis2.name, "qfi", "c_max", "useful"]

    def qfi_grid(self) -> np.ndarray:
        """QFI values reshaped to (count1, count2)."""
        return np.array([r.qfi for r in self.rows]).reshape(self.spec.axis1.count, self.spec.axis2.count)

    def to_csv(self) -> str:
        lines = [",".join(self.header)]
        for r in self.rows:
            lines.append(
                ",".join([_fmt(r.x1), _fmt(r.x2), _fmt(r.qfi), _fmt(r.c_max), "true" if r.useful else "false"])
            )
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        a1, a2 = self.spec.axis1.name, self.spec.axis2.name
        rows = [
            {a1: r.x1, a2: r.x2, "qfi": r.qfi, "c_max": r.c_max, "useful": r.useful} for r in self.rows
        ]
        return json.dumps({"metadata": self.spec.metadata(), "rows": rows}, indent=2) + "\n"


def _evaluate(index: int, params: ModelParams):
    try:
        result = qfi(params)
    except Exception as exc:  # reported with the cell identity by the caller
        return index, None, None, f"{type(exc).__name__}: {exc}"
    return index, result.qfi_per_particle, result.c_max, None


def default_workers() -> int:
    return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1)


def run_sweep(spec: SweepSpec, workers: int | None = 1) -> SweepTable:
    """Evaluate the QFI on every grid cell.

    Cells are independent; with ``workers > 1`` they are farmed out to a
    process pool and written back by position, so the table does not depend
    on scheduling.  The first failing cell (in grid order) aborts the sweep.
    """
    cells = spec.cells()
    workers = default_workers() if workers is None else workers
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    indices = range(len(cells))
    if workers == 1 or len(cells) < 2:
        results = [_evaluate(i, p) for i, p in zip(indices, cells)]
    else:
        chunk = max(1, len(cells) // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_evaluate, indices, cells, chunksize=chunk))

    slots: list[SweepRow | None] = [None] * len(cells)
    n2 = spec.axis2.count
    for index, value, c_max, error in sorted(results, key=lambda r: r[0]):
        p = cells[index]
        if error is not None:
            raise SweepError(
                f"cell ({index // n2}, {index % n2}) with {spec.axis1.name}="
                f"{getattr(p, spec.axis1.name)!r}, {spec.axis2.name}={getattr(p, spec.axis2.name)!r} "
                f"failed: {error}"
            )
        slots[index] = SweepRow(
            getattr(p, spec.axis1.name), getattr(p, spec.axis2.name), value, c_max, is_useful(value)
        )
    return SweepTable(spec, tuple(slots))


# axis1, axis2, fixed values other than J; axes override whatever is fixed
_PRESETS = {
    "fig1_TD": ("T", "D", {"B": 0.0, "b": 0.0}),
    "fig1_TB": ("T", "B", {"b": 0.0, "D": 0.0}),
    "fig1_Tb": ("T", "b", {"B": 0.0, "D": 0.0}),
    "fig2_Db": ("D", "b", {"B": 0.0, "T": FIG2_T}),
    "fig2_bB": ("b", "B", {"D": 0.0, "T": FIG2_T}),
}
PRESET_NAMES = tuple(_PRESETS)


def _default_axis(name: str, count: int) -> Axis:
    lo, hi = T_RANGE if name == "T" else FIELD_RANGE
    return Axis(name, lo, hi, count)


def preset(name: str, sign: str = "ferro", count: int = DEFAULT_COUNT) -> SweepSpec:
    """Grid spec for one heatmap panel; ``sign`` picks J = -1 or J = +1."""
    if name not in _PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}")
    if sign not in SIGNS:
        raise ValueError(f"unknown sign {sign!r}; choose ferro or antiferro")
    a1, a2, fixed = _PRESETS[name]
    base = {"B": 0.0, "b": 0.0, "D": 0.0, "T": FIG2_T}
    base.update(fixed)
    params = ModelParams(J=SIGNS[sign], N=2, **base)
    return SweepSpec(_default_axis(a1, count), _default_axis(a2, count), params, f"{name}/{sign}")
