"""
Unit tests for configuration loading and overrides.
"""

import pytest

from stimuli.config import ClauseConfig, Config, ConfigManager, TrainConfig, get_config


def _write(temp_dir, text, name="config.yaml"):
    path = temp_dir / name
    path.write_text(text)
    return path


@pytest.mark.unit
class TestTrainConfig:
    """Defaults and validation."""

    def test_defaults(self):
        config = TrainConfig()
        assert config.learning_rate == 0.003
        assert config.batch_size == 10
        assert config.dropout_p == 0.5
        assert config.embedding_dim == 300
        assert config.hidden_dim == 100
        assert config.selection_metric == "accuracy"
        assert config.attention_include_self and config.clause_attention and config.crf_boundary_scores
        assert not config.iob_constraints
        assert config.validate() is config

    @pytest.mark.parametrize("overrides", [
        {"learning_rate": 0.0},
        {"batch_size": 0},
        {"max_epochs": -1},
        {"hidden_dim": 0},
        {"dropout_p": 1.0},
        {"dropout_p": -0.1},
        {"patience": -1},
        {"patience": 60},
        {"selection_metric": "loss"},
    ])
    def test_invalid(self, overrides):
        with pytest.raises(ValueError):
            TrainConfig(**overrides).validate()

    def test_nested_defaults(self):
        config = Config()
        assert config.train == TrainConfig()
        assert config.clauses == ClauseConfig()
        assert config.clauses.join_segments
        assert "SBAR" in config.clauses.clause_labels


@pytest.mark.unit
class TestConfigManager:
    """YAML loading, overrides and saving."""

    def test_no_file_gives_defaults(self):
        assert ConfigManager().config == Config()
        assert get_config() == Config()

    def test_nested_file(self, temp_dir):
        path = _write(temp_dir, "train:\n  learning_rate: 0.01\n  hidden_dim: 20\nclauses:\n  join_segments: false\n")
        config = ConfigManager(path).config
        assert config.train.learning_rate == 0.01
        assert config.train.hidden_dim == 20
        assert config.train.batch_size == 10
        assert not config.clauses.join_segments

    def test_flat_file_is_training_section(self, temp_dir):
        path = _write(temp_dir, "hidden_dim: 20\nseed: 4\n")
        config = get_config(path)
        assert config.train.hidden_dim == 20 and config.train.seed == 4
        assert config.clauses == ClauseConfig()

    def test_empty_file(self, temp_dir):
        assert ConfigManager(_write(temp_dir, "")).config == Config()

    @pytest.mark.parametrize("text", [
        "bogus: 1\n",
        "train:\n  bogus: 1\n",
        "clauses:\n  max_depth: 3\n",
        "train: [1, 2\n",
        "- a\n- b\n",
        "train:\n  dropout_p: 2.0\n",
    ])
    def test_rejected_files(self, temp_dir, text):
        with pytest.raises(ValueError):
            ConfigManager(_write(temp_dir, text)).load_config()

    def test_missing_file(self, temp_dir):
        with pytest.raises(FileNotFoundError):
            ConfigManager(temp_dir / "absent.yaml").load_config()

    def test_overrides_skip_none(self):
        manager = ConfigManager()
        config = manager.apply_overrides({"learning_rate": None, "hidden_dim": 8})
        assert config.train.hidden_dim == 8
        assert config.train.learning_rate == 0.003
        assert manager.config is config

    def test_patience_clamped_to_epochs(self):
        config = ConfigManager().apply_overrides({"max_epochs": 3})
        assert config.train.patience == 3

    def test_explicit_patience_not_clamped(self):
        with pytest.raises(ValueError):
            ConfigManager().apply_overrides({"max_epochs": 3, "patience": 5})

    def test_override_errors(self):
        with pytest.raises(ValueError, match="unknown"):
            ConfigManager().apply_overrides({"momentum": 0.9})
        with pytest.raises(ValueError):
            ConfigManager().apply_overrides({"dropout_p": 1.5})

    def test_save_and_reload(self, temp_dir):
        manager = ConfigManager()
        config = manager.apply_overrides({"hidden_dim": 12, "selection_metric": "f1"})
        path = manager.save_config(config, temp_dir / "out" / "saved.yaml")
        assert path.exists()
        assert ConfigManager(path).config == config

    def test_save_needs_a_path(self):
        with pytest.raises(ValueError):
            ConfigManager().save_config(Config())
