"""File formats: zonotope specs, frequency sets, traces, grids, reports.

Everything is JSON for inspectability; grid functions additionally
support an ``.npz`` binary container for large grids.  All writers
produce deterministic bytes (sorted keys, fixed separators, trailing
newline) so identical runs yield identical files.

Schemas
-------
zonotope spec      {"dim": d, "center": [..], "generators": [[..], ..]}
frequency set      {"dim": d, "window": R, "points": [[..], ..], "tags": [..]}
construction trace nested nodes, see ConstructionTrace.to_dict
grid function      {"grid": {"lo": [..], "hi": [..], "shape": [..]},
                    "re": [flat row-major], "im": [..], "support": spec|null}
report             CertificationReport.to_dict
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .certify import CertificationReport
from .construction import ConstructionTrace, FrequencySet
from .decomposition import Grid, GridFunction
from .errors import InputError
from .geometry import Zonotope


def _dump_json(data, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(data, sort_keys=True, indent=2, separators=(",", ": "))
    path.write_text(text + "\n", encoding="utf-8")


def _load_json(path):
    path = Path(path)
    if not path.exists():
        raise InputError(f"{path}: file not found")
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc


# -- zonotope specs ---------------------------------------------------------


def zonotope_to_dict(Z: Zonotope) -> dict:
    return {
        "dim": Z.dim,
        "center": Z.center.tolist(),
        "generators": Z.generators.tolist(),
    }


def zonotope_from_dict(data: dict) -> Zonotope:
    if not isinstance(data, dict) or "generators" not in data:
        raise InputError("zonotope spec must be an object with a 'generators' field")
    gens = np.asarray(data["generators"], dtype=float)
    center = data.get("center")
    Z = Zonotope(gens, center)
    declared = data.get("dim")
    if declared is not None and int(declared) != Z.dim:
        raise InputError(
            f"declared dim {declared} does not match generator dimension {Z.dim}"
        )
    return Z


def read_zonotope(path) -> Zonotope:
    try:
        return zonotope_from_dict(_load_json(path))
    except (TypeError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def write_zonotope(path, Z: Zonotope):
    _dump_json(zonotope_to_dict(Z), path)


# -- frequency sets ---------------------------------------------------------


def write_frequency_set(path, freq_set: FrequencySet, window: float):
    points, tags = freq_set.window(window)
    _dump_json(
        {
            "dim": freq_set.dim,
            "window": float(window),
            "points": points.tolist(),
            "tags": tags.tolist(),
        },
        path,
    )


def read_frequency_set(path) -> tuple[FrequencySet, float]:
    """Load a stored window as an explicit finite set; returns (set, window)."""
    data = _load_json(path)
    for key in ("dim", "window", "points", "tags"):
        if key not in data:
            raise InputError(f"{path}: frequency-set file lacks the '{key}' field")
    points = np.asarray(data["points"], dtype=float)
    if points.size == 0:
        points = points.reshape(0, int(data["dim"]))
    if points.ndim != 2 or points.shape[1] != int(data["dim"]):
        raise InputError(f"{path}: points do not match the declared dimension")
    freq_set = FrequencySet.from_points(points, np.asarray(data["tags"]))
    return freq_set, float(data["window"])


# -- construction traces ----------------------------------------------------


def write_trace(path, trace: ConstructionTrace):
    _dump_json(trace.to_dict(), path)


def read_trace(path) -> ConstructionTrace:
    return ConstructionTrace.from_dict(_load_json(path))


# -- grid functions ---------------------------------------------------------


def write_grid_function(path, fn: GridFunction):
    path = Path(path)
    support = (
        zonotope_to_dict(fn.support) if isinstance(fn.support, Zonotope) else None
    )
    if path.suffix == ".npz":
        path.parent.mkdir(parents=True, exist_ok=True)
        np.savez(
            path,
            lo=fn.grid.lo,
            hi=fn.grid.hi,
            shape=np.asarray(fn.grid.shape),
            values=fn.values,
            support=json.dumps(support, sort_keys=True),
        )
        return
    _dump_json(
        {
            "grid": {
                "lo": fn.grid.lo.tolist(),
                "hi": fn.grid.hi.tolist(),
                "shape": list(fn.grid.shape),
            },
            "re": fn.values.real.ravel().tolist(),
            "im": fn.values.imag.ravel().tolist(),
            "support": support,
        },
        path,
    )


def read_grid_function(path) -> GridFunction:
    path = Path(path)
    if path.suffix == ".npz":
        if not path.exists():
            raise InputError(f"{path}: file not found")
        with np.load(path, allow_pickle=False) as data:
            grid = Grid(data["lo"], data["hi"], tuple(int(s) for s in data["shape"]))
            values = data["values"]
            support_data = json.loads(str(data["support"]))
    else:
        data = _load_json(path)
        for key in ("grid", "re", "im"):
            if key not in data:
                raise InputError(f"{path}: grid-function file lacks the '{key}' field")
        gspec = data["grid"]
        grid = Grid(
            np.asarray(gspec["lo"], dtype=float),
            np.asarray(gspec["hi"], dtype=float),
            tuple(int(s) for s in gspec["shape"]),
        )
        re = np.asarray(data["re"], dtype=float)
        im = np.asarray(data["im"], dtype=float)
        if re.size != np.prod(grid.shape) or im.size != re.size:
            raise InputError(f"{path}: value arrays do not match the grid shape")
        values = (re + 1j * im).reshape(grid.shape)
        support_data = data.get("support")
    support = zonotope_from_dict(support_data) if support_data else None
    return GridFunction(grid, values, support=support)


# -- reports ----------------------------------------------------------------


def write_report(path, report: CertificationReport):
    _dump_json(report.to_dict(), path)


def read_report(path) -> CertificationReport:
    return CertificationReport.from_dict(_load_json(path))
