"""Indicator-file ingestion, cleaning rules and result serialization.

Reads World Bank style indicator exports in two layouts: wide (one row per
country and series, one column per year, the usual WDI shape) and long
(``country_code,series_code,year,value`` rows).  Empty cells and ``..``
mean missing.  Cleaning turns raw rows into CountrySeries under explicit,
configurable rules; a packaged exclusion list drops the pre-cutoff years
of countries whose early figures describe a different economic system
(planned economies before their transition, plus a couple of special
cases), since those years would otherwise distort the fitted rates.
"""

from __future__ import annotations

import csv
import json
import math
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

import numpy as np

from .model import ModelParams, type_from_id
from .pipeline import CollapsePoint, CountrySeries, FitResult

__all__ = [
    "GDP_SERIES",
    "AGR_SERIES",
    "IND_SERIES",
    "SRV_SERIES",
    "RURAL_SERIES",
    "DEFAULT_SERIES",
    "DEFAULT_YEAR_RANGE",
    "MalformedFileError",
    "UnknownYearError",
    "IndicatorTable",
    "CleaningConfig",
    "AssembleResult",
    "parse_indicators",
    "merge_tables",
    "write_indicators",
    "load_exclusions",
    "default_exclusions",
    "assemble_series",
    "write_results",
    "read_results",
    "write_collapse_points",
    "join_auxiliary",
]

GDP_SERIES = "NY.GDP.PCAP.PP.KD"
AGR_SERIES = "NV.AGR.TOTL.ZS"
IND_SERIES = "NV.IND.TOTL.ZS"
SRV_SERIES = "NV.SRV.TETC.ZS"
RURAL_SERIES = "SP.RUR.TOTL.ZS"
DEFAULT_SERIES = (GDP_SERIES, AGR_SERIES, IND_SERIES, SRV_SERIES)
DEFAULT_YEAR_RANGE = (1980, 2005)

_WIDE_PREFIX = ("Country Name", "Country Code", "Series Name", "Series Code")
_LONG_HEADER = ("country_code", "series_code", "year", "value")
_MISSING = ("", "..")
_YEAR_COLUMN = re.compile(r"^(\d{4})(?:\s*\[YR\d{4}\])?$")


class MalformedFileError(ValueError):
    """Indicator file violates the expected layout."""


class UnknownYearError(ValueError):
    """Requested year is not a column of the table."""


@dataclass(frozen=True)
class IndicatorTable:
    """Parsed indicator values keyed by (country code, series code)."""

    values: dict[tuple[str, str], dict[int, float]]
    names: dict[str, str]
    years: tuple[int, ...]
    skipped_series: dict[str, int]

    def value(self, code: str, series: str, year: int) -> float | None:
        return self.values.get((code, series), {}).get(year)

    def countries(self) -> list[str]:
        return sorted({code for code, _ in self.values})


def _parse_cell(raw: str, *, path, row_num: int, column: object) -> float | None:
    cell = raw.strip()
    if cell in _MISSING:
        return None
    try:
        return float(cell)
    except ValueError:
        raise MalformedFileError(
            f"{path}: row {row_num}, column {column}: cannot parse number from {cell!r}"
        ) from None


def parse_indicators(
    path,
    series_codes=DEFAULT_SERIES,
    year_range: tuple[int, int] = DEFAULT_YEAR_RANGE,
) -> IndicatorTable:
    """Parse one indicator file, auto-detecting the wide or long layout.

    Series outside series_codes are skipped and tallied in
    skipped_series; year columns outside year_range are ignored.  Layout
    violations, unparsable numbers and duplicate (country, series) entries
    raise MalformedFileError naming the offending row.
    """
    wanted = set(series_codes)
    lo, hi = year_range
    with open(path, newline="", encoding="utf-8-sig") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedFileError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if tuple(header[:4]) == _WIDE_PREFIX:
            return _parse_wide(path, reader, header, wanted, lo, hi)
        if tuple(header) == _LONG_HEADER:
            return _parse_long(path, reader, wanted, lo, hi)
        raise MalformedFileError(
            f"{path}: unrecognized header {header!r}; expected the wide layout "
            f"{list(_WIDE_PREFIX)} + year columns or the long layout {list(_LONG_HEADER)}"
        )


def _parse_wide(path, reader, header, wanted, lo, hi) -> IndicatorTable:
    year_cols: list[tuple[int, int]] = []
    seen_years: set[int] = set()
    for pos, label in enumerate(header[4:], start=4):
        match = _YEAR_COLUMN.match(label)
        if match is None:
            raise MalformedFileError(f"{path}: column {pos + 1} header {label!r} is not a year")
        year = int(match.group(1))
        if year in seen_years:
            raise MalformedFileError(f"{path}: duplicate year column {year}")
        seen_years.add(year)
        if lo <= year <= hi:
            year_cols.append((pos, year))
    values: dict[tuple[str, str], dict[int, float]] = {}
    names: dict[str, str] = {}
    skipped: dict[str, int] = {}
    for row_num, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise MalformedFileError(
                f"{path}: row {row_num} has {len(row)} cells, header has {len(header)}"
            )
        name, code, _series_name, series = (cell.strip() for cell in row[:4])
        if series not in wanted:
            skipped[series] = skipped.get(series, 0) + 1
            continue
        key = (code, series)
        if key in values:
            raise MalformedFileError(f"{path}: row {row_num}: duplicate entry for {key}")
        entry: dict[int, float] = {}
        for pos, year in year_cols:
            parsed = _parse_cell(row[pos], path=path, row_num=row_num, column=year)
            if parsed is not None:
                entry[year] = parsed
        values[key] = entry
        names.setdefault(code, name or code)
    years = tuple(sorted(year for _, year in year_cols))
    return IndicatorTable(values=values, names=names, years=years, skipped_series=skipped)


def _parse_long(path, reader, wanted, lo, hi) -> IndicatorTable:
    values: dict[tuple[str, str], dict[int, float]] = {}
    names: dict[str, str] = {}
    skipped: dict[str, int] = {}
    seen_years: set[int] = set()
    for row_num, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 4:
            raise MalformedFileError(f"{path}: row {row_num} has {len(row)} cells, expected 4")
        code, series, year_raw, value_raw = (cell.strip() for cell in row)
        try:
            year = int(year_raw)
        except ValueError:
            raise MalformedFileError(
                f"{path}: row {row_num}, column year: cannot parse {year_raw!r}"
            ) from None
        if not lo <= year <= hi:
            continue
        if series not in wanted:
            skipped[series] = skipped.get(series, 0) + 1
            continue
        seen_years.add(year)
        parsed = _parse_cell(value_raw, path=path, row_num=row_num, column="value")
        if parsed is None:
            continue
        entry = values.setdefault((code, series), {})
        if year in entry:
            raise MalformedFileError(
                f"{path}: row {row_num}: duplicate entry for {(code, series, year)}"
            )
        entry[year] = parsed
        names.setdefault(code, code)
    return IndicatorTable(
        values=values, names=names, years=tuple(sorted(seen_years)), skipped_series=skipped
    )


def merge_tables(tables) -> IndicatorTable:
    """Union of several parsed tables; overlapping entries are an error."""
    tables = list(tables)
    if not tables:
        raise ValueError("no tables to merge")
    if len(tables) == 1:
        return tables[0]
    values: dict[tuple[str, str], dict[int, float]] = {}
    names: dict[str, str] = {}
    years: set[int] = set()
    skipped: dict[str, int] = {}
    for table in tables:
        for key, entry in table.values.items():
            if key in values:
                raise MalformedFileError(f"duplicate entry for {key} across input files")
            values[key] = dict(entry)
        for code, name in table.names.items():
            if names.get(code, code) == code:
                names[code] = name
        years.update(table.years)
        for series, count in table.skipped_series.items():
            skipped[series] = skipped.get(series, 0) + count
    return IndicatorTable(
        values=values, names=names, years=tuple(sorted(years)), skipped_series=skipped
    )


def _format_value(value: float) -> str:
    # repr of a float round-trips exactly, keeping rewrites byte-stable.
    return repr(float(value))


def write_indicators(table: IndicatorTable, path) -> None:
    """Write a table back out in the wide layout, rows sorted for stability."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(list(_WIDE_PREFIX) + [str(y) for y in table.years])
        for code, series in sorted(table.values):
            entry = table.values[(code, series)]
            row = [table.names.get(code, code), code, series, series]
            row += [_format_value(entry[y]) if y in entry else "" for y in table.years]
            writer.writerow(row)


def _parse_exclusion_text(text: str) -> frozenset[str]:
    codes = set()
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            codes.add(line.upper())
    return frozenset(codes)


def load_exclusions(path) -> frozenset[str]:
    """Country codes from a text file: one per line, # starts a comment."""
    return _parse_exclusion_text(Path(path).read_text(encoding="utf-8"))


@lru_cache(maxsize=1)
def default_exclusions() -> frozenset[str]:
    """Codes from the packaged pre-cutoff exclusion list."""
    text = resources.files("sectorshift").joinpath("data/excluded_pre_cutoff.txt").read_text("utf-8")
    return _parse_exclusion_text(text)


@dataclass(frozen=True)
class CleaningConfig:
    """Rules applied when assembling CountrySeries from a table.

    Years before cutoff_year are dropped for countries in exclusions.
    With renormalize on, a year whose share sum falls outside
    1 +- sum_band is dropped and anything inside the band is rescaled to
    sum exactly to one; with it off, only rows already summing to one
    within the series contract (1e-9) survive.
    """

    cutoff_year: int = 1995
    exclusions: frozenset[str] = field(default_factory=default_exclusions)
    min_years: int = 4
    renormalize: bool = True
    sum_band: float = 0.05


@dataclass(frozen=True)
class AssembleResult:
    series: tuple[CountrySeries, ...]
    dropped: dict[str, str]


def assemble_series(table: IndicatorTable, config: CleaningConfig | None = None) -> AssembleResult:
    """Apply the cleaning rules and build one series per usable country.

    A year is usable when all four indicators are present, GDP per capita
    is positive, the year passes the pre-cutoff exclusion and the share
    sum passes the renormalization rule.  Countries with fewer than
    min_years usable years are dropped with a reason.
    """
    if config is None:
        config = CleaningConfig()
    series_list: list[CountrySeries] = []
    dropped: dict[str, str] = {}
    for code in table.countries():
        kept_years: list[int] = []
        g_values: list[float] = []
        share_rows: list[np.ndarray] = []
        for year in table.years:
            gdp = table.value(code, GDP_SERIES, year)
            pct_a = table.value(code, AGR_SERIES, year)
            pct_i = table.value(code, IND_SERIES, year)
            pct_s = table.value(code, SRV_SERIES, year)
            if gdp is None or pct_a is None or pct_i is None or pct_s is None:
                continue
            if gdp <= 0.0:
                continue
            if code in config.exclusions and year < config.cutoff_year:
                continue
            row = np.array([pct_a, pct_i, pct_s], dtype=float) / 100.0
            total = float(row.sum())
            if config.renormalize:
                if abs(total - 1.0) > config.sum_band:
                    continue
                row = row / total
            elif abs(total - 1.0) > 1e-9:
                continue
            if np.any(row < 0.0) or np.any(row > 1.0):
                continue
            kept_years.append(year)
            g_values.append(math.log(gdp))
            share_rows.append(row)
        if len(kept_years) < config.min_years:
            dropped[code] = f"{len(kept_years)} usable years, need at least {config.min_years}"
            continue
        series_list.append(
            CountrySeries(
                code=code,
                name=table.names.get(code, code),
                years=np.array(kept_years, dtype=int),
                g=np.array(g_values, dtype=float),
                shares=np.vstack(share_rows),
            )
        )
    return AssembleResult(series=tuple(series_list), dropped=dropped)


RESULTS_HEADER = (
    "code",
    "k1",
    "k2",
    "alpha",
    "g0",
    "mse_a",
    "mse_i",
    "mse_s",
    "mse_sum",
    "accepted",
    "type",
    "g_max_i",
    "n_obs",
)

COLLAPSE_HEADER = ("code", "year", "type", "x", "y", "x_display", "y_display")


def _pick_format(path, fmt: str | None) -> str:
    if fmt is not None:
        if fmt not in ("csv", "json"):
            raise ValueError(f"format must be 'csv' or 'json', got {fmt!r}")
        return fmt
    return "json" if str(path).lower().endswith(".json") else "csv"


def _result_record(result: FitResult) -> dict:
    p = result.params
    return {
        "code": result.code,
        "k1": p.k1,
        "k2": p.k2,
        "alpha": p.alpha,
        "g0": p.g0,
        "mse_a": result.mse_a,
        "mse_i": result.mse_i,
        "mse_s": result.mse_s,
        "mse_sum": result.mse_sum,
        "accepted": result.accepted,
        "type": result.transfer_type.id if result.transfer_type is not None else None,
        "g_max_i": result.g_max_i,
        "n_obs": result.n_obs,
    }


def write_results(results, path, fmt: str | None = None) -> None:
    """Write fit results as CSV or JSON; both carry the same 13 fields."""
    fmt = _pick_format(path, fmt)
    records = [_result_record(r) for r in results]
    if fmt == "json":
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(records, handle, indent=2, allow_nan=True)
            handle.write("\n")
        return
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(RESULTS_HEADER)
        for rec in records:
            writer.writerow(
                [
                    rec["code"],
                    _format_value(rec["k1"]),
                    _format_value(rec["k2"]),
                    _format_value(rec["alpha"]),
                    _format_value(rec["g0"]),
                    _format_value(rec["mse_a"]),
                    _format_value(rec["mse_i"]),
                    _format_value(rec["mse_s"]),
                    _format_value(rec["mse_sum"]),
                    "true" if rec["accepted"] else "false",
                    "" if rec["type"] is None else str(rec["type"]),
                    "" if rec["g_max_i"] is None else _format_value(rec["g_max_i"]),
                    str(rec["n_obs"]),
                ]
            )


def _result_from_record(rec: dict, *, where: str) -> FitResult:
    try:
        params = ModelParams(
            k1=float(rec["k1"]), k2=float(rec["k2"]), alpha=float(rec["alpha"]), g0=float(rec["g0"])
        )
        type_id = rec["type"]
        g_max = rec["g_max_i"]
        return FitResult(
            code=str(rec["code"]),
            params=params,
            mse_a=float(rec["mse_a"]),
            mse_i=float(rec["mse_i"]),
            mse_s=float(rec["mse_s"]),
            mse_sum=float(rec["mse_sum"]),
            accepted=bool(rec["accepted"]),
            transfer_type=None if type_id is None else type_from_id(int(type_id)),
            g_max_i=None if g_max is None else float(g_max),
            n_obs=int(rec["n_obs"]),
            evaluations_used=0,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedFileError(f"{where}: bad result record: {exc}") from None


def read_results(path, fmt: str | None = None) -> list[FitResult]:
    """Read results written by write_results.

    The evaluation count is not part of the interchange schema and comes
    back as 0.
    """
    fmt = _pick_format(path, fmt)
    if fmt == "json":
        with open(path, encoding="utf-8") as handle:
            try:
                records = json.load(handle)
            except json.JSONDecodeError as exc:
                raise MalformedFileError(f"{path}: invalid JSON: {exc}") from None
        if not isinstance(records, list):
            raise MalformedFileError(f"{path}: expected a JSON list of result records")
        return [_result_from_record(rec, where=str(path)) for rec in records]
    results = []
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedFileError(f"{path}: empty file") from None
        if tuple(h.strip() for h in header) != RESULTS_HEADER:
            raise MalformedFileError(
                f"{path}: unexpected results header {header!r}, want {list(RESULTS_HEADER)}"
            )
        for row_num, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(RESULTS_HEADER):
                raise MalformedFileError(
                    f"{path}: row {row_num} has {len(row)} cells, expected {len(RESULTS_HEADER)}"
                )
            rec = dict(zip(RESULTS_HEADER, (cell.strip() for cell in row)))
            if rec["accepted"] not in ("true", "false"):
                raise MalformedFileError(
                    f"{path}: row {row_num}: accepted must be true/false, got {rec['accepted']!r}"
                )
            rec["accepted"] = rec["accepted"] == "true"
            rec["type"] = None if rec["type"] == "" else rec["type"]
            rec["g_max_i"] = None if rec["g_max_i"] == "" else rec["g_max_i"]
            results.append(_result_from_record(rec, where=f"{path}: row {row_num}"))
    return results


def _collapse_record(point: CollapsePoint) -> dict:
    return {
        "code": point.code,
        "year": point.year,
        "type": point.type_id,
        "x": point.x,
        "y": point.y,
        "x_display": point.x_display,
        "y_display": point.y_display,
    }


def write_collapse_points(points, path, fmt: str | None = None) -> None:
    """Write collapsed observations; empty cells mark an undefined display."""
    fmt = _pick_format(path, fmt)
    records = [_collapse_record(p) for p in points]
    if fmt == "json":
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(records, handle, indent=2, allow_nan=True)
            handle.write("\n")
        return
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(COLLAPSE_HEADER)
        for rec in records:
            writer.writerow(
                [
                    rec["code"],
                    str(rec["year"]),
                    "" if rec["type"] is None else str(rec["type"]),
                    _format_value(rec["x"]),
                    _format_value(rec["y"]),
                    "" if rec["x_display"] is None else _format_value(rec["x_display"]),
                    "" if rec["y_display"] is None else _format_value(rec["y_display"]),
                ]
            )


def join_auxiliary(table: IndicatorTable, year: int, series: str = RURAL_SERIES) -> dict[str, float]:
    """Percent series at one year as fractions, keyed by country code.

    Raises UnknownYearError when the year is not a column of the table.
    """
    if year not in table.years:
        raise UnknownYearError(f"year {year} not present in table years {table.years}")
    out: dict[str, float] = {}
    for (code, series_code), entry in sorted(table.values.items()):
        if series_code == series and year in entry:
            out[code] = entry[year] / 100.0
    return out
