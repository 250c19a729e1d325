# src/experiments/report_writer.py
"""
Report channel for experiment runs.

Two outputs are kept apart, the same way the run log and the
machine-readable alert log are kept apart:

1. run.log - every activity line, human readable
2. <scenario>.csv + summary.json - only the result rows, machine readable

Timestamps go to meta.json so the CSV bodies and the summary stay
byte-identical between runs with the same config and seed.
"""

import csv
import json
import logging
import math
import pathlib
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "1.0"
CSV_HEADER = ["scenario", "param", "measured", "reference", "rel_error", "status"]

Value = Union[float, int, str, bool]


class RowStatus:
    PASS = "pass"
    FAIL = "fail"
    ERRORED = "errored"


@dataclass(frozen=True)
class ReportRow:
    """
    One measured quantity against its reference.

    For comparison rows ``rel_error`` is |measured - reference| / |reference|;
    for bound rows it is measured / limit; for flag rows it is 0 (pass) or 1.

    Example:
        >>> row = ReportRow.compare("semigroup_convergence", "n=4096", 0.36783, 0.36788, 1e-3)
        >>> row.status
        'pass'
    """
    scenario: str
    param: str
    measured: Value
    reference: Value
    rel_error: float
    status: str

    @classmethod
    def compare(cls, scenario: str, param: str, measured: float, reference: float,
                tolerance: float) -> "ReportRow":
        scale = abs(reference) if reference != 0 else 1.0
        error = abs(measured - reference) / scale
        status = RowStatus.PASS if error <= tolerance else RowStatus.FAIL
        return cls(scenario, param, float(measured), float(reference), float(error), status)

    @classmethod
    def bound(cls, scenario: str, param: str, measured: float, limit: float) -> "ReportRow":
        ratio = measured / limit if limit > 0 else (0.0 if measured <= 0 else math.inf)
        status = RowStatus.PASS if measured <= limit else RowStatus.FAIL
        return cls(scenario, param, float(measured), float(limit), float(ratio), status)

    @classmethod
    def flag(cls, scenario: str, param: str, ok: bool, measured: Value = "", reference: Value = "") -> "ReportRow":
        measured = int(ok) if measured == "" else measured
        reference = 1 if reference == "" else reference
        return cls(scenario, param, measured, reference, 0.0 if ok else 1.0,
                   RowStatus.PASS if ok else RowStatus.FAIL)

    @classmethod
    def errored(cls, scenario: str, param: str, exc: BaseException) -> "ReportRow":
        return cls(scenario, param, f"{type(exc).__name__}: {exc}", "", math.nan, RowStatus.ERRORED)

    @property
    def failed(self) -> bool:
        return self.status != RowStatus.PASS


def _format(value: Value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def configure_logging(out_dir: Union[str, pathlib.Path], level: int = logging.INFO) -> pathlib.Path:
    """Append every log line of the run to <out_dir>/run.log."""
    path = pathlib.Path(out_dir)
    path.mkdir(parents=True, exist_ok=True)
    log_path = path / "run.log"
    logging.basicConfig(
        level=level,
        filename=str(log_path),
        format="%(asctime)s %(levelname)s %(message)s",
        filemode="a",
        force=True,
    )
    return log_path


class ReportWriter:
    """
    Writes result rows for one output directory.

    Attributes:
        out_dir: Directory receiving the CSV, JSON and log files

    Example:
        >>> writer = ReportWriter("reports")
        >>> writer.write("semigroup_convergence", rows, {"seed": 0})
    """

    def __init__(self, out_dir: Union[str, pathlib.Path]) -> None:
        self.out_dir = pathlib.Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)

    def log_row(self, row: ReportRow) -> None:
        if row.status == RowStatus.ERRORED:
            logger.error(f"[ERRORED] {row.scenario} {row.param}: {row.measured}")
        elif row.status == RowStatus.FAIL:
            logger.warning(f"[FAIL] {row.scenario} {row.param}: measured={_format(row.measured)} "
                           f"reference={_format(row.reference)} rel_error={_format(row.rel_error)}")
        else:
            logger.info(f"[PASS] {row.scenario} {row.param}: measured={_format(row.measured)}")

    def write(self, scenario: str, rows: List[ReportRow], parameters: Optional[Dict[str, Any]] = None) -> pathlib.Path:
        """Write <scenario>.csv, merge the scenario into summary.json and stamp meta.json."""
        for row in rows:
            self.log_row(row)
        csv_path = self.out_dir / f"{scenario}.csv"
        with open(csv_path, "w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(CSV_HEADER)
            for row in rows:
                writer.writerow([row.scenario, row.param, _format(row.measured), _format(row.reference),
                                 _format(row.rel_error), row.status])

        summary_path = self.out_dir / "summary.json"
        summary = self._read_json(summary_path) or {"schema_version": SCHEMA_VERSION, "scenarios": {}}
        summary["scenarios"][scenario] = {
            "parameters": parameters or {},
            "rows": len(rows),
            "passed": sum(not row.failed for row in rows),
            "failed": sum(row.status == RowStatus.FAIL for row in rows),
            "errored": sum(row.status == RowStatus.ERRORED for row in rows),
        }
        summary["scenarios"] = dict(sorted(summary["scenarios"].items()))
        self._write_json(summary_path, summary)

        meta_path = self.out_dir / "meta.json"
        meta = self._read_json(meta_path) or {"schema_version": SCHEMA_VERSION, "runs": {}}
        meta["runs"][scenario] = datetime.now(timezone.utc).isoformat()
        self._write_json(meta_path, meta)
        return csv_path

    def write_table(self, name: str, header: List[str], rows: Iterable[Sequence[Value]]) -> pathlib.Path:
        """Plot-ready numeric table under <out_dir>/data/, kept apart from the scenario reports."""
        data_dir = self.out_dir / "data"
        data_dir.mkdir(parents=True, exist_ok=True)
        path = data_dir / f"{name}.csv"
        with open(path, "w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_format(float(value)) for value in row])
        return path

    @staticmethod
    def _read_json(path: pathlib.Path) -> Optional[Dict[str, Any]]:
        try:
            with open(path, "r", encoding="utf-8") as handle:
                return json.load(handle)
        except (IOError, json.JSONDecodeError):
            return None

    @staticmethod
    def _write_json(path: pathlib.Path, payload: Dict[str, Any]) -> None:
        try:
            with open(path, "w", encoding="utf-8") as handle:
                json.dump(payload, handle, indent=2, sort_keys=True)
                handle.write("\n")
        except IOError as exc:
            logger.error(f"[ERROR] Failed to write {path.name}: {exc}")


def read_rows(path: Union[str, pathlib.Path]) -> List[Dict[str, str]]:
    with open(path, "r", encoding="utf-8", newline="") as handle:
        return list(csv.DictReader(handle))


def aggregate_reports(out_dir: Union[str, pathlib.Path]) -> Dict[str, Dict[str, int]]:
    """Count statuses per scenario over every CSV in a report directory."""
    totals: Dict[str, Dict[str, int]] = {}
    for path in sorted(pathlib.Path(out_dir).glob("*.csv")):
        counts = {RowStatus.PASS: 0, RowStatus.FAIL: 0, RowStatus.ERRORED: 0}
        for row in read_rows(path):
            counts[row["status"]] = counts.get(row["status"], 0) + 1
        totals[path.stem] = counts
    return totals


def any_failed(rows: Iterable[ReportRow]) -> bool:
    return any(row.failed for row in rows)
