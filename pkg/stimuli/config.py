"""Configuration management for the stimulus toolkit."""
import logging
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import yaml

from .clause_extract import DEFAULT_CLAUSE_LABELS, MAX_SHORT_SEGMENT

logger = logging.getLogger(__name__)

SELECTION_METRICS = ("accuracy", "f1")


@dataclass
class TrainConfig:
    """Training hyperparameters and model switches."""
    learning_rate: float = 0.003
    batch_size: int = 10
    dropout_p: float = 0.5
    max_epochs: int = 50
    patience: int = 10  # 0 disables early stopping
    embedding_dim: int = 300
    hidden_dim: int = 100
    seed: int = 0
    selection_metric: str = "accuracy"  # "accuracy", "f1"
    attention_include_self: bool = True
    clause_attention: bool = True
    crf_boundary_scores: bool = True
    iob_constraints: bool = False

    def validate(self) -> "TrainConfig":
        for name in ("learning_rate", "batch_size", "max_epochs", "embedding_dim", "hidden_dim"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if not 0.0 <= self.dropout_p < 1.0:
            raise ValueError(f"dropout_p must be in [0, 1), got {self.dropout_p}")
        if self.patience < 0 or self.patience > self.max_epochs:
            raise ValueError(f"patience must be in [0, max_epochs], got {self.patience}")
        if self.selection_metric not in SELECTION_METRICS:
            raise ValueError(f"selection_metric must be one of {SELECTION_METRICS}, "
                             f"got {self.selection_metric!r}")
        return self


@dataclass
class ClauseConfig:
    """Configuration for clause extraction."""
    clause_labels: List[str] = field(default_factory=lambda: sorted(DEFAULT_CLAUSE_LABELS))
    join_segments: bool = True
    max_short_segment: int = MAX_SHORT_SEGMENT


@dataclass
class Config:
    """Main configuration class."""
    train: TrainConfig = None
    clauses: ClauseConfig = None

    def __post_init__(self):
        """Initialize nested configs if not provided."""
        if self.train is None:
            self.train = TrainConfig()
        if self.clauses is None:
            self.clauses = ClauseConfig()


def _section(cls, values: Dict[str, Any], section: str):
    known = {f.name for f in fields(cls)}
    for key in values:
        if key not in known:
            raise ValueError(f"unknown config key {key!r} in section {section!r}")
    return cls(**values)


class ConfigManager:
    """Configuration manager backed by an optional YAML (or JSON) file."""

    def __init__(self, config_file: Optional[Union[str, Path]] = None):
        self.config_file = Path(config_file) if config_file else None
        self._config = None

    @property
    def config(self) -> Config:
        """Get configuration, loading if necessary."""
        if self._config is None:
            self._config = self.load_config()
        return self._config

    def load_config(self) -> Config:
        """Load configuration from file, falling back to defaults."""
        if self.config_file is None:
            return Config()
        if not self.config_file.exists():
            raise FileNotFoundError(f"config file not found: {self.config_file}")

        with open(self.config_file, "r", encoding="utf-8") as f:
            try:
                config_dict = yaml.safe_load(f) or {}
            except yaml.YAMLError as e:
                raise ValueError(f"config file {self.config_file} is not valid YAML: {e}") from e
        if not isinstance(config_dict, dict):
            raise ValueError(f"config file {self.config_file} must contain a mapping")

        config = self._dict_to_config(config_dict)
        config.train.validate()
        logger.info("Loaded config from %s", self.config_file)
        return config

    def apply_overrides(self, overrides: Dict[str, Any]) -> Config:
        """Apply TrainConfig overrides (e.g. command-line flags); None values are skipped."""
        values = {k: v for k, v in overrides.items() if v is not None}
        if values:
            known = {f.name for f in fields(TrainConfig)}
            for key in values:
                if key not in known:
                    raise ValueError(f"unknown training option {key!r}")
            train = replace(self.config.train, **values)
            if "patience" not in values and train.patience > train.max_epochs:
                train = replace(train, patience=train.max_epochs)
            self._config = replace(self.config, train=train)
            logger.debug("Config overrides: %s", values)
        self.config.train.validate()
        return self.config

    def save_config(self, config: Config, path: Optional[Union[str, Path]] = None) -> Path:
        """Save configuration as YAML."""
        path = Path(path) if path else self.config_file
        if path is None:
            raise ValueError("no path given to save the config to")
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            yaml.safe_dump(self._config_to_dict(config), f, sort_keys=False)
        return path

    def _dict_to_config(self, config_dict: Dict[str, Any]) -> Config:
        """Convert dictionary to Config object."""
        train_keys = {f.name for f in fields(TrainConfig)}
        if config_dict and set(config_dict) <= train_keys:
            return Config(train=TrainConfig(**config_dict))

        for key in config_dict:
            if key not in ("train", "clauses"):
                raise ValueError(f"unknown config key {key!r}")
        train = config_dict.get("train") or {}
        clauses = config_dict.get("clauses") or {}
        return Config(
            train=_section(TrainConfig, train, "train"),
            clauses=_section(ClauseConfig, clauses, "clauses"),
        )

    def _config_to_dict(self, config: Config) -> Dict[str, Any]:
        """Convert Config object to dictionary."""
        return asdict(config)


def get_config(config_file: Optional[Union[str, Path]] = None) -> Config:
    """Load a configuration, or the defaults when no file is given."""
    return ConfigManager(config_file).config
