from pathlib import Path
from dataclasses import dataclass, field, fields
from typing import Any, Dict, Mapping, Optional, Tuple
from src.config.app import AppConfig, app_config
from src.config.config_validator import (
    validate_file_exists,
    validate_positive_value,
    validate_required_vars,
    validate_value_is_allowed,
    validate_values_are_allowed,
)
from src.geometry.trajectory import TraceOptions


FAMILIES = ["cubic", "quintic"]
CONTOUR_CLASSES = ["3,1", "4,5"]
FORMATS = ["json", "csv", "svg"]


def _parse_bool(value: str) -> bool:
    text = str(value).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"Invalid boolean : {value}")


def _parse_emit(value: Any) -> Tuple[str, ...]:
    if isinstance(value, (tuple, list)):
        items = value
    else:
        items = str(value).split(",")
    return tuple(sorted({item.strip().lower() for item in items if item.strip()}))


def _parse_optional_int(value: Any) -> Optional[int]:
    if value is None or str(value).strip().lower() in ("", "none", "auto"):
        return None
    return int(value)


@dataclass(frozen=True)
class RunConfig:
    """
    Parameters of one command run. Built from defaults, then the key = value file,
    then command-line overrides.
    """

    family: str = "cubic"
    K: float = 0.0
    critical: bool = False
    contour_class: str = "3,1"
    n: int = 16
    max_degree: int = 24
    digits: Optional[int] = None
    drift_tol: float = 1e-7
    capture_scale: float = 1e-5
    phase_tie: float = 1e-9
    angle_tol: float = 0.02
    panels: int = 24
    out: str = "output"
    emit: Tuple[str, ...] = ("csv", "json", "svg")
    seed: int = 0
    max_workers: int = field(default=1, compare=False)

    PARSERS = {
        "family": lambda v: str(v).strip().lower(),
        "K": float,
        "critical": _parse_bool,
        "contour_class": lambda v: str(v).strip().replace(" ", ""),
        "n": int,
        "max_degree": int,
        "digits": _parse_optional_int,
        "drift_tol": float,
        "capture_scale": float,
        "phase_tie": float,
        "angle_tol": float,
        "panels": int,
        "out": str,
        "emit": _parse_emit,
        "seed": int,
        "max_workers": int,
    }

    def __post_init__(self) -> None:
        self._validate_config()

    def _validate_config(self) -> None:
        """
        Centralized configuration validation.
        """
        validate_required_vars({"family": self.family, "out": self.out, "emit": self.emit})
        validate_value_is_allowed(self.family, FAMILIES)
        validate_value_is_allowed(self.contour_class, CONTOUR_CLASSES)
        validate_values_are_allowed(self.emit, FORMATS)
        validate_positive_value(
            {
                "n": self.n,
                "max_degree": self.max_degree,
                "drift_tol": self.drift_tol,
                "capture_scale": self.capture_scale,
                "phase_tie": self.phase_tie,
                "angle_tol": self.angle_tol,
                "panels": self.panels,
                "max_workers": self.max_workers,
            }
        )
        if self.digits is not None:
            validate_positive_value({"digits": self.digits})
        if self.n > self.max_degree:
            raise ValueError(f"Invalid value for n={self.n}. Must not exceed max_degree={self.max_degree}")

    @staticmethod
    def _read_file(config_path: Path) -> Dict[str, str]:
        """
        Parses `key = value` lines, skipping blank lines and # comments.
        """
        validate_file_exists(config_path)
        values = {}
        for number, raw in enumerate(config_path.read_text().splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"Invalid line {number} in '{config_path}' : {raw!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            values[key] = value
        return values

    @staticmethod
    def _get_env_vars(config: AppConfig) -> Tuple[Optional[str], int]:
        """
        Retrieves the config path and the worker count from the environment.
        """
        env = config.environment_manager
        config_path = env.get_optional_environment_var(env.variables.SCURVE_CONFIG)
        return config_path, env.default_max_workers()

    @classmethod
    def load(
        cls,
        config_path: Optional[str] = None,
        overrides: Optional[Mapping[str, Any]] = None,
        config: AppConfig = app_config,
    ) -> "RunConfig":
        try:
            env_path, max_workers = cls._get_env_vars(config)
            values: Dict[str, Any] = {"max_workers": max_workers}
            path = config_path or env_path
            if path:
                values.update(cls._read_file(Path(path)))
            values.update({k: v for k, v in (overrides or {}).items() if v is not None})
            unknown = sorted(set(values) - set(cls.PARSERS))
            if unknown:
                raise ValueError(f"Unknown configuration key(s) : {', '.join(unknown)}")
            return cls(**{key: cls.PARSERS[key](value) for key, value in values.items()})
        except (ValueError, FileNotFoundError):
            raise
        except Exception as e:
            raise RuntimeError(f"Unexpected error occured loading run configuration : {e}")

    @property
    def out_dir(self) -> Path:
        return Path(self.out)

    @property
    def p(self) -> int:
        return 1 if self.contour_class == "3,1" else 2

    def to_dict(self) -> Dict[str, Any]:
        """
        Config echo for reports, without max_workers.
        """
        echo = {}
        for f in fields(self):
            if f.name == "max_workers":
                continue
            value = getattr(self, f.name)
            echo[f.name] = list(value) if isinstance(value, tuple) else value
        return echo

    def trace_options(self) -> TraceOptions:
        return TraceOptions(
            drift_tol=self.drift_tol,
            capture_scale=self.capture_scale,
            angle_tol=self.angle_tol,
        )
