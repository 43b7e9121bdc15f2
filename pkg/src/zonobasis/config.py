"""Run configuration shared by the library and the command line.

Defaults are engineering choices, not constants of the underlying
mathematics, and are documented here so they can be overridden per run:
radius ladder, grid resolution (power of two), RNG seed, perturbation
mode, verdict thresholds, and optional frozen baselines for
regression-style comparisons.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace

from .errors import InputError

#: Environment variable naming a default config file for the CLI.
CONFIG_ENV_VAR = "ZONOBASIS_CONFIG"


@dataclass(frozen=True)
class Config:
    # perturbation of the pushed branch
    eta_mode: str = "fixed"  # "fixed" | "adaptive"
    eta: float = 0.2  # 0 is accepted as the explicit no-push falsification control
    eta_radius: float = 3.0
    eta_kappa: float = 4.0
    eta_max_halvings: int = 8
    # certification ladder
    radii: tuple = (2.0, 4.0, 8.0)
    grid_n: int = 256
    seed: int = 0
    trials: int = 10
    interp_radius: float = 4.0
    # verdict thresholds
    density_radius: float = 50.0  # window counts converge like O(1/R)
    density_rtol: float = 0.05
    separation_min: float = 1e-9
    sigma_min_floor: float = 1e-8
    interp_residual_max: float = 1e-6
    degradation_factor: float = 10.0
    sigma_growth_cap: float = 1.05
    max_section_points: int = 4000
    # optional frozen baselines:
    # {"gram": {"4.0": {"sigma_min": .., "sigma_max": ..}}, "interpolation": ..}
    baselines: dict = None
    # output
    window: float = None  # window radius for written frequency sets

    def __post_init__(self):
        radii = tuple(float(r) for r in self.radii)
        if not radii or any(b <= a for a, b in zip(radii, radii[1:])):
            raise InputError("radii must be a nonempty strictly increasing ladder")
        object.__setattr__(self, "radii", radii)
        if self.eta_mode not in ("fixed", "adaptive"):
            raise InputError(f"eta_mode must be fixed or adaptive, got {self.eta_mode!r}")
        if not 0.0 <= self.eta <= 0.5:
            raise InputError(f"eta must lie in [0, 1/2] (0 = control), got {self.eta}")
        n = int(self.grid_n)
        if n < 2 or (n & (n - 1)) != 0:
            raise InputError(f"grid_n must be a power of two >= 2, got {self.grid_n}")
        object.__setattr__(self, "grid_n", n)
        if int(self.trials) < 1:
            raise InputError("trials must be at least 1")
        object.__setattr__(self, "trials", int(self.trials))
        object.__setattr__(self, "seed", int(self.seed))
        if self.window is not None:
            if float(self.window) <= 0:
                raise InputError("window radius must be positive")
            object.__setattr__(self, "window", float(self.window))

    @property
    def window_radius(self) -> float:
        if self.window is not None:
            return self.window
        return max(max(self.radii), self.density_radius)

    def to_dict(self) -> dict:
        data = asdict(self)
        data["radii"] = list(self.radii)
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "Config":
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise InputError(f"unknown config fields: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_file(cls, path) -> "Config":
        with open(path, "r", encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise InputError(
                    f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
                ) from exc
        if not isinstance(data, dict):
            raise InputError(f"{path}: config file must hold a JSON object")
        return cls.from_dict(data)

    def override(self, **kwargs) -> "Config":
        """Copy with the given fields replaced (None values ignored)."""
        updates = {k: v for k, v in kwargs.items() if v is not None}
        return replace(self, **updates) if updates else self
