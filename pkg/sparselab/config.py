"""
Configuration for sparselab runs.

Library code is configured through keyword arguments; this module holds the
shared constants, the named ensemble presets used by the scaling experiment,
and RunConfig, the validated bundle of command-line options.
"""

import json
import math
import os
from dataclasses import dataclass, field, fields
from typing import Any, Dict, List, Optional, Set

from .errors import DomainError

DEFAULT_SEED = 0x5EED

# Largest d*L accepted by build_space.
MAX_CELL_EXPONENT = 26

# strong_norm_exact assembles a dense matrix; keep it small.
EXACT_NORM_MAX_CELLS = 2 ** 12

# Spaces at or below this size also get exact rational oracle checks.
EXACT_ORACLE_MAX_CELLS = 2 ** 16

SUBCOMMANDS = ("verify", "tail", "scaling", "sharpness", "lemma", "dominate", "directional")

FORMATS = ("csv", "json")

# Ensemble presets for scaling_experiment
ENSEMBLES = {
    "axis": {
        "dim": 2,
        "depth": 5,
        "gamma": 0.5,
        "sets_per_collection": 24,
    },
    "shear": {
        "dim": 2,
        "depth": 8,
        "density": 1 / 16,
        "max_start_level": 2,
    },
}


@dataclass
class RunConfig:
    """Validated options for one CLI invocation"""

    subcommand: str
    dim: int = 1
    depth: int = 8
    p: float = 2.0
    n: List[int] = field(default_factory=lambda: [2, 4, 8, 16])
    gamma: float = 0.5
    delta: List[float] = field(default_factory=lambda: [2.0 ** -k for k in range(1, 8)])
    seed: int = DEFAULT_SEED
    ensemble: str = "shear"
    out: Optional[str] = None
    format: str = "csv"
    verbose: bool = False
    # Options set by a config file or a flag rather than left at their default
    explicit: Set[str] = field(default_factory=set, repr=False, compare=False)

    def validate(self) -> "RunConfig":
        """Check ranges; raises DomainError describing the first bad option"""
        if self.subcommand not in SUBCOMMANDS:
            raise DomainError(f"Unknown subcommand '{self.subcommand}'")
        if self.dim < 1:
            raise DomainError(f"--dim must be at least 1, got {self.dim}")
        if self.depth < 0:
            raise DomainError(f"--depth must be non-negative, got {self.depth}")
        if self.dim * self.depth > MAX_CELL_EXPONENT:
            raise DomainError(
                f"--dim {self.dim} --depth {self.depth} exceeds 2^{MAX_CELL_EXPONENT} cells"
            )
        if not (self.p >= 1 and math.isfinite(self.p)):
            raise DomainError(f"--p must be a finite value >= 1, got {self.p}")
        if not self.n or any(k < 1 for k in self.n):
            raise DomainError(f"--n must be a list of positive integers, got {self.n}")
        if not 0 < self.gamma <= 1:
            raise DomainError(f"--gamma must lie in (0, 1], got {self.gamma}")
        if not self.delta or any(not 0 < d <= 1 for d in self.delta):
            raise DomainError(f"--delta values must lie in (0, 1], got {self.delta}")
        if self.seed < 0:
            raise DomainError(f"--seed must be non-negative, got {self.seed}")
        if self.ensemble not in ENSEMBLES:
            raise DomainError(
                f"Unknown ensemble '{self.ensemble}'. Expected one of {', '.join(ENSEMBLES)}"
            )
        if self.format not in FORMATS:
            raise DomainError(f"--format must be one of {', '.join(FORMATS)}, got {self.format}")
        return self

    @classmethod
    def option_names(cls) -> List[str]:
        return [f.name for f in fields(cls) if f.name not in ("subcommand", "explicit")]


def load_config_file(path: str) -> Dict[str, Any]:
    """
    Read default options from a JSON config file.

    Keys are RunConfig field names; unknown keys are rejected so that a typo
    does not silently fall back to a default.
    """
    if not os.path.exists(path):
        raise DomainError(f"Config file not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as e:
        raise DomainError(f"Config file {path} is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise DomainError(f"Config file {path} must hold a JSON object")

    known = set(RunConfig.option_names())
    unknown = sorted(set(data) - known)
    if unknown:
        raise DomainError(f"Unknown config keys in {path}: {', '.join(unknown)}")
    return data
