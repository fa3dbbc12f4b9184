"""
Experiment configuration for benchmark runs
"""
import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import List, Optional

logger = logging.getLogger(__name__)

BENCH_ALGORITHMS = ('ddp', 'ddp-mu', 'cdp1', 'cdp2')
LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR')


class ConfigError(ValueError):
    """Invalid experiment configuration, unknown preset or malformed problem file"""


@dataclass
class ExperimentConfig:
    """Benchmark experiment that can be stored as JSON and overridden from the CLI"""
    # Problem selection
    preset: Optional[str] = "synthetic_separable"
    problem_file: Optional[str] = None
    horizon: Optional[int] = None

    # Algorithms and grid schedule (points per dimension)
    algorithms: List[str] = field(default_factory=lambda: ['ddp', 'cdp2'])
    grid_sizes: List[int] = field(default_factory=lambda: [11, 21])

    # Rollouts
    x0_count: int = 10
    seed: int = 0

    # Discretization overrides
    alpha: Optional[float] = None
    y_counts: Optional[List[int]] = None
    z_counts: Optional[List[int]] = None
    v_counts: Optional[List[int]] = None
    numeric_conjugate: bool = False

    # Reference solution
    reference_n: int = 41

    # Output and execution
    output_dir: str = "results"
    workers: int = 1
    log_level: str = "INFO"

    def validate(self) -> "ExperimentConfig":
        """
        Raises:
            ConfigError: on any invalid field
        """
        if not self.preset and not self.problem_file:
            raise ConfigError("Either a preset or a problem file is required")
        if not self.algorithms:
            raise ConfigError("Algorithm list must not be empty")
        unknown = [a for a in self.algorithms if a not in BENCH_ALGORITHMS]
        if unknown:
            raise ConfigError(f"Unknown algorithms {unknown}, expected any of {BENCH_ALGORITHMS}")
        if not self.grid_sizes:
            raise ConfigError("Grid size schedule must not be empty")
        if any(int(n) < 2 for n in self.grid_sizes):
            raise ConfigError(f"Grid sizes must be >= 2, got {self.grid_sizes}")
        if self.reference_n < 2:
            raise ConfigError(f"Reference grid size must be >= 2, got {self.reference_n}")
        if self.horizon is not None and self.horizon < 1:
            raise ConfigError(f"Horizon must be >= 1, got {self.horizon}")
        if self.x0_count < 1:
            raise ConfigError(f"x0_count must be >= 1, got {self.x0_count}")
        if self.alpha is not None and self.alpha <= 0:
            raise ConfigError(f"alpha must be positive, got {self.alpha}")
        for name in ('y_counts', 'z_counts', 'v_counts'):
            counts = getattr(self, name)
            if counts is not None and any(int(c) < 2 for c in counts):
                raise ConfigError(f"{name} entries must be >= 2, got {counts}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if self.log_level.upper() not in LOG_LEVELS:
            raise ConfigError(f"log_level must be one of {LOG_LEVELS}, got {self.log_level}")
        return self

    def save_to_file(self, filepath: str = "config.json"):
        """Save configuration to JSON file"""
        with open(filepath, 'w') as f:
            json.dump(asdict(self), f, indent=4)
        logger.info(f"💾 Configuration saved to {filepath}")

    @classmethod
    def load_from_file(cls, filepath: str = "config.json") -> "ExperimentConfig":
        """
        Load configuration from JSON file; a missing file yields defaults

        Raises:
            ConfigError: unreadable JSON or unknown keys
        """
        if not Path(filepath).exists():
            logger.info(f"📄 No config file found at {filepath}, using defaults")
            return cls()
        try:
            with open(filepath, 'r') as f:
                config_dict = json.load(f)
            config = cls(**config_dict)
        except (json.JSONDecodeError, TypeError) as e:
            raise ConfigError(f"Failed to load config from {filepath}: {e}") from e
        logger.info(f"📄 Configuration loaded from {filepath}")
        return config
