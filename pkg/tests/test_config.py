import logging
import pytest
from src.config.app import AppConfig, DirectoryManager, Directories, EnvironmentManager, EnvironmentVars
from src.config.config_validator import (
    validate_file_exists,
    validate_positive_value,
    validate_required_vars,
    validate_value_is_allowed,
)
from src.config.logger import LoggerConfig
from src.config.run_config import RunConfig


def test_missing_environment_variable_without_default(monkeypatch):
    monkeypatch.delenv("SCURVE_CONFIG", raising=False)
    with pytest.raises(RuntimeError, match="SCURVE_CONFIG"):
        EnvironmentManager.get_environment_var(EnvironmentVars.SCURVE_CONFIG)


def test_max_workers_from_environment(monkeypatch):
    monkeypatch.setenv("SCURVE_MAX_WORKERS", "3")
    assert EnvironmentManager().default_max_workers() == 3


def test_directories_are_created(tmp_path):
    manager = DirectoryManager(base_dir=tmp_path)
    path = manager.get_directory_path(Directories.OUTPUT)
    assert path == tmp_path / "output"
    assert path.is_dir()


def test_log_level_from_environment(monkeypatch):
    monkeypatch.setenv("SCURVE_LOG_LEVEL", "debug")
    assert LoggerConfig(AppConfig()).level == logging.DEBUG
    monkeypatch.setenv("SCURVE_LOG_LEVEL", "chatty")
    with pytest.raises(ValueError, match="Invalid log level"):
        LoggerConfig(AppConfig())


def test_validators():
    with pytest.raises(ValueError, match="Missing required variable"):
        validate_required_vars({"family": ""})
    with pytest.raises(ValueError, match="Must be cubic or quintic"):
        validate_value_is_allowed("sextic", ["cubic", "quintic"])
    with pytest.raises(ValueError, match="greater than 0"):
        validate_positive_value({"drift_tol": 0.0})
    with pytest.raises(ValueError, match="Must be a number"):
        validate_positive_value({"panels": True})


def test_validate_file_exists(tmp_path):
    with pytest.raises(FileNotFoundError):
        validate_file_exists(tmp_path / "missing.cfg")
    with pytest.raises(FileNotFoundError, match="is not a file"):
        validate_file_exists(tmp_path)


def test_defaults(monkeypatch):
    monkeypatch.delenv("SCURVE_CONFIG", raising=False)
    config = RunConfig.load()
    assert config.family == "cubic"
    assert config.drift_tol == 1e-7
    assert config.emit == ("csv", "json", "svg")
    assert config.digits is None


def test_file_then_overrides(monkeypatch, config_file):
    monkeypatch.delenv("SCURVE_CONFIG", raising=False)
    path = config_file("# quintic run\nfamily = quintic\ncontour_class = 4, 5\n\ndigits = 60\nemit = json\n")
    config = RunConfig.load(str(path), {"digits": 72, "seed": None})
    assert config.family == "quintic"
    assert config.contour_class == "4,5"
    assert config.p == 2
    assert config.digits == 72
    assert config.emit == ("json",)


def test_config_path_from_environment(monkeypatch, config_file):
    path = config_file("K = 0.5\n")
    monkeypatch.setenv("SCURVE_CONFIG", str(path))
    assert RunConfig.load().K == 0.5


def test_unknown_key_is_rejected(monkeypatch, config_file):
    monkeypatch.delenv("SCURVE_CONFIG", raising=False)
    path = config_file("tolerance = 1e-3\n")
    with pytest.raises(ValueError, match="Unknown configuration key"):
        RunConfig.load(str(path))


def test_malformed_line_is_rejected(monkeypatch, config_file):
    monkeypatch.delenv("SCURVE_CONFIG", raising=False)
    with pytest.raises(ValueError, match="Invalid line 1"):
        RunConfig.load(str(config_file("drift_tol 1e-3\n")))


@pytest.mark.parametrize(
    "changes, message",
    [
        ({"drift_tol": -1e-7}, "greater than 0"),
        ({"emit": ("json", "png")}, "Must be json or csv or svg"),
        ({"contour_class": "2,1"}, "Must be 3,1 or 4,5"),
        ({"n": 30}, "max_degree"),
    ],
)
def test_invalid_values(changes, message):
    with pytest.raises(ValueError, match=message):
        RunConfig(**changes)


def test_echo_and_trace_options():
    config = RunConfig(drift_tol=1e-15, angle_tol=0.01)
    echo = config.to_dict()
    assert "max_workers" not in echo
    assert echo["emit"] == ["csv", "json", "svg"]
    opts = config.trace_options()
    assert opts.drift_tol == 1e-15
    assert opts.angle_tol == 0.01
