import json
import hashlib
import numpy as np
import pandas as pd
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Sequence
from matplotlib.figure import Figure
from src.config.logger import logger
from src.core.algebra import PrecScalar
from src.geometry.trajectory import Trajectory
from src.reports.report import ReportDocument
from src.utils.helpers import catch_exceptions


class TrajectoryColumn(Enum):
    INDEX = "index"
    ARCLENGTH = "arclength"
    RE = "re"
    IM = "im"


class ZeroColumn(Enum):
    INDEX = "index"
    RE = "re"
    IM = "im"
    DIST_TO_ARC = "dist_to_arc"


FLOAT_FORMAT = "%.17g"


def to_jsonable(value: Any) -> Any:
    """
    Converts results to plain JSON types. Complex numbers become {"re", "im"};
    mpmath numbers become decimal strings at their own precision.
    """
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if np.isfinite(value) else str(value)
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": to_jsonable(value.real), "im": to_jsonable(value.imag)}
    if isinstance(value, Path):
        return value.as_posix()
    if isinstance(value, PrecScalar):
        return str(value)
    if type(value).__module__.startswith("mpmath"):
        if hasattr(value, "imag") and value.imag != 0:
            return {"re": str(value.real), "im": str(value.imag)}
        return str(value.real if hasattr(value, "real") else value)
    return value


def dumps(document: Dict[str, Any]) -> str:
    return json.dumps(to_jsonable(document), indent=2, sort_keys=True, ensure_ascii=True) + "\n"


def trajectory_frame(trajectory: Trajectory) -> pd.DataFrame:
    return pd.DataFrame(
        {
            TrajectoryColumn.INDEX.value: np.arange(len(trajectory.points)),
            TrajectoryColumn.ARCLENGTH.value: trajectory.arclength,
            TrajectoryColumn.RE.value: trajectory.points.real,
            TrajectoryColumn.IM.value: trajectory.points.imag,
        }
    )


def zeros_frame(zeros: Sequence[complex], distances: Sequence[float]) -> pd.DataFrame:
    values = np.asarray(zeros, dtype=complex)
    return pd.DataFrame(
        {
            ZeroColumn.INDEX.value: np.arange(len(values)),
            ZeroColumn.RE.value: values.real,
            ZeroColumn.IM.value: values.imag,
            ZeroColumn.DIST_TO_ARC.value: np.asarray(distances, dtype=float),
        }
    )


class ArtifactWriter:
    """
    Writes the files of one command into the output directory and keeps the manifest.
    Only the formats listed in emit are written; the report JSON is written last.
    """

    def __init__(self, out_dir: Path, emit: Sequence[str]) -> None:
        self.out_dir = Path(out_dir)
        self.emit = set(emit)
        self.manifest: List[Dict[str, str]] = []

    def _record(self, path: Path, kind: str) -> Path:
        digest = hashlib.sha256(path.read_bytes()).hexdigest()
        self.manifest.append({"file": path.name, "format": kind, "sha256": digest})
        logger.info(f"Artifact {path.name} - Write successful : {path.stat().st_size} bytes")
        return path

    def _path(self, name: str) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        return self.out_dir / name

    @catch_exceptions
    def write_csv(self, name: str, df: pd.DataFrame) -> None:
        if "csv" not in self.emit:
            return
        path = self._path(f"{name}.csv")
        df.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        self._record(path, "csv")

    @catch_exceptions
    def write_json(self, name: str, document: Dict[str, Any]) -> None:
        if "json" not in self.emit:
            return
        path = self._path(f"{name}.json")
        path.write_text(dumps(document))
        self._record(path, "json")

    @catch_exceptions
    def write_svg(self, name: str, figure: Figure) -> None:
        if "svg" not in self.emit:
            return
        path = self._path(f"{name}.svg")
        figure.savefig(path, format="svg", metadata={"Date": None})
        self._record(path, "svg")

    @catch_exceptions
    def write_report(self, name: str, report: ReportDocument) -> None:
        """
        The report carries the manifest of everything written before it.
        It is always written when json is requested, also for failing runs.
        """
        report.artifacts = list(self.manifest)
        if "json" not in self.emit:
            return
        path = self._path(f"{name}.json")
        path.write_text(dumps(report.as_dict()))
        logger.info(f"Report {path.name} - Write successful : status {report.status.value}")
