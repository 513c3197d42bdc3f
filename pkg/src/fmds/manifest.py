"""Run manifests: the serializable record of what a CLI run was asked to do.

Every output file of a run embeds the manifest's hash, so artifacts can be
traced back to the exact inputs and settings that produced them, and
rerunning an identical manifest overwrites outputs byte-identically.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, replace

from .errors import ConfigError

FORMAT_VERSION = "1"

_COMMANDS = ("cmds", "fmds", "dissim", "synth")
_FORMATS = ("tensor_csv", "wide_csv")
_METRICS = ("euclidean", "correlation")
_INITS = ("cmds_warm", "random")
_BASELINES = ("adam", "full_batch_gd")


@dataclass(frozen=True)
class RunManifest:
    """Everything needed to reproduce one CLI run."""

    command: str
    input_path: str = ""
    input_format: str = "tensor_csv"
    metric: str = "euclidean"
    window_len: int | None = None
    stride: int = 1
    dim: int = 2
    interior_knots: int | None = None
    alpha: float = 0.001
    gamma1: float = 0.9
    gamma2: float = 0.999
    eps: float = 1e-6
    max_epochs: int = 1000
    seed: int = 0
    init: str = "cmds_warm"
    baseline: str = "adam"
    scenario: str = "smooth_rotation"
    scenario_n: int = 5
    scenario_m: int = 40
    noise_sd: float = 0.0
    out_dir: str = "."
    deterministic: bool = False
    format_version: str = FORMAT_VERSION

    def validate(self) -> None:
        if self.command not in _COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.input_format not in _FORMATS:
            raise ConfigError(f"unknown input format {self.input_format!r}")
        if self.metric not in _METRICS:
            raise ConfigError(f"unknown metric {self.metric!r}")
        if self.window_len is not None and self.window_len < 1:
            raise ConfigError(f"window length must be positive, got {self.window_len}")
        if self.stride < 1:
            raise ConfigError(f"stride must be positive, got {self.stride}")
        if self.dim < 1:
            raise ConfigError(f"dimension must be at least 1, got {self.dim}")
        if self.interior_knots is not None and self.interior_knots < 0:
            raise ConfigError(f"knot count must be nonnegative, got {self.interior_knots}")
        if self.alpha <= 0:
            raise ConfigError(f"step size must be positive, got {self.alpha}")
        if not 0 <= self.gamma1 < 1 or not 0 <= self.gamma2 < 1:
            raise ConfigError("decay rates must lie in [0, 1)")
        if self.eps <= 0:
            raise ConfigError(f"convergence tolerance must be positive, got {self.eps}")
        if self.max_epochs < 1:
            raise ConfigError(f"max_epochs must be at least 1, got {self.max_epochs}")
        if self.init not in _INITS:
            raise ConfigError(f"unknown init mode {self.init!r}")
        if self.baseline not in _BASELINES:
            raise ConfigError(f"unknown baseline {self.baseline!r}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunManifest":
        known = {f for f in cls.__dataclass_fields__}
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown manifest fields: {sorted(extra)}")
        return cls(**data)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def sha256(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def with_updates(self, **changes) -> "RunManifest":
        return replace(self, **changes)
