"""
Configuration loader module for reading and validating the lab's YAML config.
"""

import yaml
import logging
from dataclasses import asdict, dataclass, replace
from typing import Any, Dict, Optional

logger = logging.getLogger(__name__)

DEFAULTS: Dict[str, Dict[str, Any]] = {
    "run": {
        "seed": 0,
        "steps": 10_000,
        "grid_points": 100,
        "instance_pairs": 50,
        "random_candidates": 20,
    },
    "tolerances": {
        "metric": 1e-10,
        "state_norm": 1e-12,
        "unitarity": 1e-10,
    },
    "size_guards": {
        "max_states_exhaustive": 8,
        "max_subset_states": 12,
        "theorem_states": 5,
        "deck_cards": 5,
        "deck_cards_orbit": 8,
        "max_period": 16,
        "max_dimension": 32,
    },
}


@dataclass(frozen=True)
class RunConfig:
    """Settings shared by every suite in one run; echoed into the report."""

    tolerance: float = 1e-10
    state_norm: float = 1e-12
    unitarity: float = 1e-10
    seed: int = 0
    steps: int = 10_000
    grid_points: int = 100
    instance_pairs: int = 50
    random_candidates: int = 20
    size: Optional[int] = None
    max_states_exhaustive: int = 8
    max_subset_states: int = 12
    theorem_states: int = 5
    deck_cards: int = 5
    deck_cards_orbit: int = 8
    max_period: int = 16
    max_dimension: int = 32

    def __post_init__(self):
        for name in ("tolerance", "state_norm", "unitarity"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        for name in ("steps", "grid_points", "max_states_exhaustive", "max_subset_states",
                     "theorem_states", "deck_cards", "deck_cards_orbit", "max_period",
                     "max_dimension"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.instance_pairs < 0 or self.random_candidates < 0:
            raise ValueError("instance_pairs and random_candidates must be >= 0")
        if self.size is not None and self.size < 1:
            raise ValueError(f"size must be >= 1, got {self.size}")

    def with_overrides(self, **overrides: Any) -> "RunConfig":
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


class Config:
    """Configuration manager for lab runs. Every setting has a default."""

    def __init__(self, config_path: Optional[str] = None):
        """
        Load configuration from a YAML file, or use defaults when no path is given.

        Args:
            config_path: Path to the configuration file
        """
        self.config_path = config_path
        self.config = self._load_config()
        self._validate_config()

    def _load_config(self) -> Dict[str, Any]:
        """Load the YAML configuration file and lay it over the defaults."""
        merged = {section: dict(values) for section, values in DEFAULTS.items()}
        if self.config_path is None:
            return merged
        try:
            with open(self.config_path, 'r') as f:
                loaded = yaml.safe_load(f) or {}
            logger.info(f"Configuration loaded from {self.config_path}")
        except FileNotFoundError:
            logger.error(f"Configuration file not found: {self.config_path}")
            raise
        except yaml.YAMLError as e:
            logger.error(f"Error parsing YAML configuration: {e}")
            raise
        if not isinstance(loaded, dict):
            raise ValueError("Configuration file must contain a mapping")
        for section, values in loaded.items():
            if section not in DEFAULTS:
                raise ValueError(f"Unknown configuration section: {section}")
            if not isinstance(values, dict):
                raise ValueError(f"Configuration section '{section}' must be a mapping")
            for key, value in values.items():
                if key not in DEFAULTS[section]:
                    raise ValueError(f"Unknown field '{key}' in section '{section}'")
                merged[section][key] = value
        return merged

    def _validate_config(self):
        """Validate types and ranges by building the run config once."""
        for section, fields in DEFAULTS.items():
            for key, default in fields.items():
                value = self.config[section][key]
                expected = float if isinstance(default, float) else int
                if isinstance(value, bool) or not isinstance(value, (int, float)):
                    raise ValueError(f"Field '{key}' in section '{section}' must be numeric")
                if expected is int and not isinstance(value, int):
                    raise ValueError(f"Field '{key}' in section '{section}' must be an integer")
        self.run_config()
        logger.debug("Configuration validation passed")

    # Run settings
    @property
    def seed(self) -> int:
        """Get the base random seed."""
        return self.config['run']['seed']

    @property
    def steps(self) -> int:
        """Get the RK4 step budget."""
        return self.config['run']['steps']

    @property
    def grid_points(self) -> int:
        return self.config['run']['grid_points']

    @property
    def instance_pairs(self) -> int:
        return self.config['run']['instance_pairs']

    @property
    def random_candidates(self) -> int:
        return self.config['run']['random_candidates']

    # Tolerances
    @property
    def tolerance(self) -> float:
        """Get the metric-schema equality tolerance."""
        return float(self.config['tolerances']['metric'])

    @property
    def state_norm_tolerance(self) -> float:
        return float(self.config['tolerances']['state_norm'])

    @property
    def unitarity_tolerance(self) -> float:
        return float(self.config['tolerances']['unitarity'])

    # Size guards
    @property
    def size_guards(self) -> Dict[str, int]:
        """Get all size guards."""
        return dict(self.config['size_guards'])

    def run_config(self, **overrides: Any) -> RunConfig:
        """
        Build the immutable run config, with command-line overrides applied.

        Overrides set to None are ignored.
        """
        base = RunConfig(
            tolerance=self.tolerance,
            state_norm=self.state_norm_tolerance,
            unitarity=self.unitarity_tolerance,
            seed=self.seed,
            steps=self.steps,
            grid_points=self.grid_points,
            instance_pairs=self.instance_pairs,
            random_candidates=self.random_candidates,
            **self.size_guards,
        )
        return base.with_overrides(**overrides)
