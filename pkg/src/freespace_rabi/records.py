"""Scan records and their deterministic CSV / JSON serialization."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path

SCHEMA_VERSION = "1"
PARAM_COLUMNS = ("n_mean", "area", "gamma", "omega", "theta", "dt")
OUTPUT_COLUMNS = ("infidelity", "purity", "entropy", "survival")
CSV_COLUMNS = ("scan_id", "model") + PARAM_COLUMNS + OUTPUT_COLUMNS
MODELS = ("jc", "bloch", "collision")


@dataclass(frozen=True)
class ScanRecord:
    """One experiment point.  Parameters that do not apply to a model are None."""

    scan_id: str
    model: str
    n_mean: float | None = None
    area: float | None = None
    gamma: float | None = None
    omega: float | None = None
    theta: float | None = None
    dt: float | None = None
    infidelity: float | None = None
    purity: float | None = None
    entropy: float | None = None
    survival: float | None = None

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}, got {self.model!r}")
        for name in PARAM_COLUMNS + OUTPUT_COLUMNS:
            v = getattr(self, name)
            if v is None:
                continue
            v = float(v)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")
            object.__setattr__(self, name, v)
        if self.infidelity is not None and not 0.0 <= self.infidelity <= 1.0:
            raise ValueError(f"infidelity {self.infidelity!r} outside [0, 1]")

    def sort_key(self):
        params = tuple(-math.inf if getattr(self, c) is None else getattr(self, c) for c in PARAM_COLUMNS)
        return (self.scan_id, self.model) + params

    def outputs(self) -> tuple:
        return tuple(getattr(self, c) for c in OUTPUT_COLUMNS)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    return format(v, ".17g")


def _json_value(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, str):
        return json.dumps(v)
    return format(v, ".17g")


def render(records, fmt: str = "csv") -> str:
    rows = sorted(records, key=ScanRecord.sort_key)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in rows:
            w.writerow([_fmt(getattr(r, c)) for c in CSV_COLUMNS])
        return buf.getvalue()
    if fmt == "json":
        lines = []
        for r in rows:
            body = ", ".join(
                [f'"schema_version": "{SCHEMA_VERSION}"']
                + [f'"{c}": {_json_value(getattr(r, c))}' for c in CSV_COLUMNS]
            )
            lines.append("  {" + body + "}")
        return "[\n" + ",\n".join(lines) + "\n]\n"
    raise ValueError(f"unknown format {fmt!r} (expected 'csv' or 'json')")


def emit_records(records, path, fmt: str | None = None) -> Path:
    """Write records sorted by (scan_id, model, parameters).

    ``fmt`` defaults to the file suffix.  Nothing is written for an empty
    record list.
    """
    records = list(records)
    if not records:
        raise ValueError("no records to emit")
    path = Path(path)
    if fmt is None:
        fmt = path.suffix.lstrip(".").lower() or "csv"
    text = render(records, fmt)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path


def _parse(v: str):
    return None if v == "" else float(v)


def read_records(path, fmt: str | None = None) -> list[ScanRecord]:
    path = Path(path)
    if fmt is None:
        fmt = path.suffix.lstrip(".").lower() or "csv"
    text = path.read_text(encoding="utf-8")
    names = {f.name for f in fields(ScanRecord)}
    if fmt == "csv":
        rows = list(csv.DictReader(io.StringIO(text)))
        return [
            ScanRecord(
                scan_id=row["scan_id"],
                model=row["model"],
                **{c: _parse(row[c]) for c in PARAM_COLUMNS + OUTPUT_COLUMNS},
            )
            for row in rows
        ]
    if fmt == "json":
        out = []
        for obj in json.loads(text):
            if obj.pop("schema_version") != SCHEMA_VERSION:
                raise ValueError("unsupported schema version")
            out.append(ScanRecord(**{k: v for k, v in obj.items() if k in names}))
        return out
    raise ValueError(f"unknown format {fmt!r}")


def as_rows(records) -> list[dict]:
    return [asdict(r) for r in sorted(records, key=ScanRecord.sort_key)]
