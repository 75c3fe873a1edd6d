"""
Tests for configuration loading.
"""

import pytest

from astkit.config import (
    BIN_PRESETS,
    GRAMMAR_DIR_ENV,
    AstkitConfig,
    PathConfig,
    load_config,
    resolve_bins,
)
from astkit.errors import ConfigurationError


class TestDefaults:
    """Tests for default values and validation."""

    def test_defaults(self):
        config = AstkitConfig()
        assert config.frontend.drop_punctuation is True
        assert config.paths == PathConfig(8, 2, 200, 0)
        assert config.max_distance == 7
        assert config.tokenizer.mode == "simple"
        assert config.strict_threshold is False

    @pytest.mark.parametrize("kwargs", [
        {"max_length": 0},
        {"max_width": -1},
        {"max_contexts": 0},
    ])
    def test_invalid_paths(self, kwargs):
        with pytest.raises(ConfigurationError):
            PathConfig(**kwargs)

    def test_invalid_distance(self):
        with pytest.raises(ConfigurationError):
            AstkitConfig(max_distance=0)


class TestLoadConfig:
    """Tests for YAML, environment and override layering."""

    def test_no_file(self, monkeypatch):
        monkeypatch.delenv(GRAMMAR_DIR_ENV, raising=False)
        assert load_config() == AstkitConfig()

    def test_yaml_file(self, fixtures_dir, monkeypatch):
        monkeypatch.delenv(GRAMMAR_DIR_ENV, raising=False)
        config = load_config(fixtures_dir / "astkit.yaml")
        assert config.paths.max_length == 4
        assert config.paths.max_width == 1
        assert config.paths.max_contexts == 200
        assert config.max_distance == 3
        assert config.jobs == 1

    def test_overrides_win(self, fixtures_dir):
        config = load_config(fixtures_dir / "astkit.yaml", {"max_distance": 5, "paths": {"sample_seed": 9}})
        assert config.max_distance == 5
        assert config.paths.sample_seed == 9
        assert config.paths.max_length == 4

    def test_grammar_dir_from_environment(self, monkeypatch):
        monkeypatch.setenv(GRAMMAR_DIR_ENV, "/opt/grammars")
        assert load_config().frontend.grammar_dir == "/opt/grammars"

    def test_unknown_key(self, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text("paths:\n  max_depth: 3\n", encoding="utf-8")
        with pytest.raises(ConfigurationError, match="paths.'max_depth'"):
            load_config(path)

    def test_section_must_be_mapping(self, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text("paths: 3\n", encoding="utf-8")
        with pytest.raises(ConfigurationError):
            load_config(path)

    def test_invalid_yaml(self, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text("paths: [\n", encoding="utf-8")
        with pytest.raises(ConfigurationError):
            load_config(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError):
            load_config(tmp_path / "absent.yaml")

    def test_unsupported_language(self):
        with pytest.raises(ConfigurationError):
            load_config(overrides={"frontend": {"language": "cobol"}})

    def test_invalid_value_in_file(self, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text("max_distance: 0\n", encoding="utf-8")
        with pytest.raises(ConfigurationError):
            load_config(path)


class TestResolveBins:
    """Tests for --bins parsing."""

    def test_preset(self):
        assert resolve_bins("jaccard") == BIN_PRESETS["jaccard"]

    def test_explicit(self):
        assert resolve_bins("0,0.5,1") == (0.0, 0.5, 1.0)

    def test_none(self):
        assert resolve_bins(None) is None

    def test_bad(self):
        with pytest.raises(ConfigurationError):
            resolve_bins("low,high")
