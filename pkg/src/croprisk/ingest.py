"""CSV/JSONL ingestion and persistence for yield records and summaries.

Schemas
-------
Yield CSV:    unit_id,geohash4,year,y_actual,acres,h1..h10  (h* optional, blank allowed)
Climate CSV:  geohash4,date,variable,value                  (date = YYYY-MM-DD)
Size table:   acres,probability

Numeric fields in persisted summaries are written at 6 significant digits;
round-trips are lossless at that precision.
"""

from __future__ import annotations

import csv
import json
import math
import re
from pathlib import Path
from typing import Iterable, Sequence

from .errors import IngestError
from .geohash import validate_code
from .insurance import UnitYieldRecord
from .pipeline import ClimateFeatureSet, NeighborhoodSummary

HISTORY_COLUMNS = tuple(f"h{i}" for i in range(1, 11))
YIELD_COLUMNS = ("unit_id", "geohash4", "year", "y_actual", "acres") + HISTORY_COLUMNS
CLIMATE_COLUMNS = ("geohash4", "date", "variable", "value")
SUMMARY_COLUMNS = ("geohash4", "year", "mean_delta", "std_delta", "count",
                   "skewness", "excess_kurtosis", "approx_normal",
                   "approx_symmetric", "maize_acres")

_DATE_RE = re.compile(r"^\d{4}-\d{2}-\d{2}$")


def fmt6(x: float) -> str:
    """Format a float at 6 significant digits (documented output precision)."""
    if math.isnan(x):
        return "nan"
    return f"{x:.6g}"


def _check_header(found: Sequence[str], required: Sequence[str], path: str) -> None:
    missing = [c for c in required if c not in found]
    if missing:
        raise IngestError(
            f"{path}: header is missing required columns",
            [f"missing: {', '.join(missing)}"],
        )


def ingest_yield_csv(path: str | Path) -> list[UnitYieldRecord]:
    """Parse unit yield records; invalid rows raise with row numbers."""
    path = Path(path)
    records: list[UnitYieldRecord] = []
    problems: list[str] = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise IngestError(f"{path}: empty file, expected a header row")
        _check_header(reader.fieldnames, YIELD_COLUMNS[:5], str(path))
        for i, row in enumerate(reader, start=2):
            try:
                history = []
                for col in HISTORY_COLUMNS:
                    cell = (row.get(col) or "").strip()
                    if cell:
                        history.append(float(cell))
                record = UnitYieldRecord(
                    unit_id=row["unit_id"],
                    geohash4=validate_code(row["geohash4"]),
                    year=int(row["year"]),
                    y_actual=float(row["y_actual"]),
                    y_history=tuple(history),
                    unit_acres=float(row["acres"]),
                )
            except (ValueError, KeyError) as exc:
                problems.append(f"row {i}: {exc}")
                continue
            records.append(record)
    if problems:
        raise IngestError(f"{path}: {len(problems)} invalid row(s)", problems)
    return records


def write_yield_csv(records: Iterable[UnitYieldRecord], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(YIELD_COLUMNS)
        for r in records:
            history = [fmt6(h) for h in r.y_history[-10:]]
            history += [""] * (10 - len(history))
            writer.writerow([r.unit_id, r.geohash4, r.year, fmt6(r.y_actual),
                             fmt6(r.unit_acres)] + history)


def ingest_climate_csv(path: str | Path) -> dict[tuple[str, str], list[tuple[str, float]]]:
    """Parse daily climate rows into {(geohash4, variable): [(date, value), ...]}.

    Series are returned date-sorted; malformed rows raise with row numbers.
    """
    path = Path(path)
    series: dict[tuple[str, str], list[tuple[str, float]]] = {}
    problems: list[str] = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise IngestError(f"{path}: empty file, expected a header row")
        _check_header(reader.fieldnames, CLIMATE_COLUMNS, str(path))
        for i, row in enumerate(reader, start=2):
            try:
                code = validate_code(row["geohash4"])
                date = row["date"].strip()
                if not _DATE_RE.match(date):
                    raise ValueError(f"bad date {date!r}, expected YYYY-MM-DD")
                variable = row["variable"].strip()
                if not variable:
                    raise ValueError("empty variable name")
                value = float(row["value"])
            except (ValueError, KeyError) as exc:
                problems.append(f"row {i}: {exc}")
                continue
            series.setdefault((code, variable), []).append((date, value))
    if problems:
        raise IngestError(f"{path}: {len(problems)} invalid row(s)", problems)
    for key in series:
        series[key].sort()
    return series


def write_summaries_csv(summaries: Iterable[NeighborhoodSummary], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_COLUMNS)
        for s in summaries:
            writer.writerow([
                s.geohash4, s.year, fmt6(s.mean_delta), fmt6(s.std_delta), s.count,
                fmt6(s.skewness), fmt6(s.excess_kurtosis),
                int(s.approx_normal), int(s.approx_symmetric), fmt6(s.maize_acres),
            ])


def read_summaries_csv(path: str | Path) -> list[NeighborhoodSummary]:
    path = Path(path)
    out: list[NeighborhoodSummary] = []
    problems: list[str] = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise IngestError(f"{path}: empty file, expected a header row")
        _check_header(reader.fieldnames, SUMMARY_COLUMNS, str(path))
        for i, row in enumerate(reader, start=2):
            try:
                out.append(NeighborhoodSummary(
                    geohash4=validate_code(row["geohash4"]),
                    year=int(row["year"]),
                    mean_delta=float(row["mean_delta"]),
                    std_delta=float(row["std_delta"]),
                    count=int(row["count"]),
                    skewness=float(row["skewness"]),
                    excess_kurtosis=float(row["excess_kurtosis"]),
                    approx_normal=bool(int(row["approx_normal"])),
                    approx_symmetric=bool(int(row["approx_symmetric"])),
                    maize_acres=float(row["maize_acres"]),
                ))
            except (ValueError, KeyError) as exc:
                problems.append(f"row {i}: {exc}")
    if problems:
        raise IngestError(f"{path}: {len(problems)} invalid row(s)", problems)
    return out


def summary_to_dict(s: NeighborhoodSummary) -> dict:
    return {
        "geohash4": s.geohash4, "year": s.year,
        "mean_delta": float(fmt6(s.mean_delta)), "std_delta": float(fmt6(s.std_delta)),
        "count": s.count, "skewness": float(fmt6(s.skewness)),
        "excess_kurtosis": float(fmt6(s.excess_kurtosis)),
        "approx_normal": s.approx_normal, "approx_symmetric": s.approx_symmetric,
        "maize_acres": float(fmt6(s.maize_acres)),
    }


def write_summaries_jsonl(summaries: Iterable[NeighborhoodSummary], path: str | Path) -> None:
    with open(path, "w") as fh:
        for s in summaries:
            fh.write(json.dumps(summary_to_dict(s), sort_keys=True) + "\n")


def read_summaries_jsonl(path: str | Path) -> list[NeighborhoodSummary]:
    out = []
    with open(path) as fh:
        for line in fh:
            if not line.strip():
                continue
            d = json.loads(line)
            out.append(NeighborhoodSummary(
                geohash4=d["geohash4"], year=d["year"], mean_delta=d["mean_delta"],
                std_delta=d["std_delta"], count=d["count"], skewness=d["skewness"],
                excess_kurtosis=d["excess_kurtosis"], approx_normal=d["approx_normal"],
                approx_symmetric=d["approx_symmetric"], maize_acres=d["maize_acres"],
            ))
    return out


def _feature_key_str(key: tuple[str, int, str]) -> str:
    variable, month, stat = key
    return f"{variable}:{month}:{stat}"


def _feature_key_parse(text: str) -> tuple[str, int, str]:
    variable, month, stat = text.split(":")
    return variable, int(month), stat


def write_feature_sets_jsonl(feature_sets: Iterable[ClimateFeatureSet],
                             path: str | Path) -> None:
    with open(path, "w") as fh:
        for fs in feature_sets:
            record = {
                "geohash4": fs.geohash4,
                "year": fs.year,
                "features": {_feature_key_str(k): (None if math.isnan(v) else v)
                             for k, v in sorted(fs.features.items())},
            }
            fh.write(json.dumps(record, sort_keys=True) + "\n")


def read_feature_sets_jsonl(path: str | Path) -> list[ClimateFeatureSet]:
    out = []
    with open(path) as fh:
        for line in fh:
            if not line.strip():
                continue
            d = json.loads(line)
            features = {
                _feature_key_parse(k): (math.nan if v is None else float(v))
                for k, v in d["features"].items()
            }
            out.append(ClimateFeatureSet(geohash4=d["geohash4"], year=d["year"],
                                         features=features))
    return out


def read_size_table_csv(path: str | Path) -> list[tuple[float, float]]:
    """Unit-size distribution rows (acres, probability)."""
    path = Path(path)
    rows: list[tuple[float, float]] = []
    problems: list[str] = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise IngestError(f"{path}: empty file, expected a header row")
        _check_header(reader.fieldnames, ("acres", "probability"), str(path))
        for i, row in enumerate(reader, start=2):
            try:
                acres = float(row["acres"])
                prob = float(row["probability"])
                if acres <= 0 or prob < 0:
                    raise ValueError(f"acres {acres}, probability {prob} out of range")
                rows.append((acres, prob))
            except (ValueError, KeyError) as exc:
                problems.append(f"row {i}: {exc}")
    if problems:
        raise IngestError(f"{path}: {len(problems)} invalid row(s)", problems)
    return rows
