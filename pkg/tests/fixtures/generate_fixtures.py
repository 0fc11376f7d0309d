"""Regenerate the committed fixture CSVs.

Run from the repository root:

    python3 tests/fixtures/generate_fixtures.py

The three-country file holds noiseless model-generated series for one
parameter set per transfer type (3, 1 and 2), on g-grids where all three
shares stay inside [0, 1].  The ingestion-rules file hand-crafts countries
that trip each cleaning rule.  The rural file relates the auxiliary
indicator linearly to ln(a) at 2005 so the correlate demo shows r = 1.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from sectorshift.ingest import (
    AGR_SERIES,
    GDP_SERIES,
    IND_SERIES,
    RURAL_SERIES,
    SRV_SERIES,
    IndicatorTable,
    write_indicators,
)
from sectorshift.model import ModelParams
from sectorshift.pipeline import synth_generate

HERE = Path(__file__).resolve().parent

YEARS = tuple(range(1980, 2006))

FIXTURE_SETS = {
    # code -> (params, g grid); types 3, 1, 2 in code order
    "AAA": (ModelParams(0.56, -0.01, 0.32, 8.12), np.linspace(8.2, 10.2, 26)),
    "BBB": (ModelParams(2.29, 0.35, 0.50, 8.74), np.linspace(8.8, 10.6, 26)),
    "CCC": (ModelParams(1.76, 0.94, 1.27, 5.02), np.linspace(5.52, 7.52, 26)),
}

NAMES = {"AAA": "Synthland A", "BBB": "Synthland B", "CCC": "Synthland C"}


def three_country_table() -> IndicatorTable:
    values: dict[tuple[str, str], dict[int, float]] = {}
    for code, (params, grid) in FIXTURE_SETS.items():
        series = synth_generate(params, grid, code=code, name=NAMES[code], start_year=YEARS[0])
        values[(code, GDP_SERIES)] = {int(y): math.exp(g) for y, g in zip(series.years, series.g)}
        for column, series_code in ((0, AGR_SERIES), (1, IND_SERIES), (2, SRV_SERIES)):
            values[(code, series_code)] = {
                int(y): float(row[column]) * 100.0 for y, row in zip(series.years, series.shares)
            }
    return IndicatorTable(values=values, names=dict(NAMES), years=YEARS, skipped_series={})


def rural_table() -> IndicatorTable:
    values: dict[tuple[str, str], dict[int, float]] = {}
    for code, (params, grid) in FIXTURE_SETS.items():
        a_2005 = math.exp(-params.k1 * (grid[-1] - params.g0))
        rural_pct = 60.0 + 10.0 * math.log(a_2005)
        values[(code, RURAL_SERIES)] = {2005: rural_pct}
    return IndicatorTable(values=values, names=dict(NAMES), years=(2005,), skipped_series={})


def ingestion_rules_table() -> IndicatorTable:
    """Countries that each trip one cleaning rule.

    DDD: complete 1992-1996 only -> retained {1992..1996}.
    RUS: complete 1992-1999 but on the exclusion list -> retained {1995..1999}.
    FFF: 1990-1995; 1992 shares sum to 110% (outside the 5% band, dropped),
         1991 sums to 104% (renormalized, kept) -> retained {1990, 1991, 1993, 1994, 1995}.
    GGG: only three complete years -> dropped for eligibility.
    HHH: 1990-1994 complete but GDP = 0 in 1991 -> retained {1990, 1992, 1993, 1994}.
    """
    values: dict[tuple[str, str], dict[int, float]] = {}

    def put(code: str, year: int, gdp: float, a_pct: float, i_pct: float, s_pct: float) -> None:
        values.setdefault((code, GDP_SERIES), {})[year] = gdp
        values.setdefault((code, AGR_SERIES), {})[year] = a_pct
        values.setdefault((code, IND_SERIES), {})[year] = i_pct
        values.setdefault((code, SRV_SERIES), {})[year] = s_pct

    for year in range(1992, 1997):
        put("DDD", year, 2000.0 + 50.0 * (year - 1992), 30.0, 30.0, 40.0)
    for year in range(1992, 2000):
        put("RUS", year, 4000.0 + 100.0 * (year - 1992), 20.0, 35.0, 45.0)
    for year in range(1990, 1996):
        if year == 1992:
            put("FFF", year, 3000.0, 40.0, 40.0, 30.0)  # sums to 110%
        elif year == 1991:
            put("FFF", year, 2950.0, 42.0, 32.0, 30.0)  # sums to 104%
        else:
            put("FFF", year, 2900.0 + 20.0 * (year - 1990), 35.0, 30.0, 35.0)
    for year in (1990, 1993, 1999):
        put("GGG", year, 1500.0, 50.0, 25.0, 25.0)
    for year in range(1990, 1995):
        put("HHH", year, 0.0 if year == 1991 else 5000.0, 10.0, 45.0, 45.0)

    names = {code: f"Ruleland {code}" for code, _ in values}
    return IndicatorTable(
        values=values, names=names, years=tuple(range(1990, 2000)), skipped_series={}
    )


def main() -> None:
    write_indicators(three_country_table(), HERE / "synthetic_three_countries.csv")
    write_indicators(rural_table(), HERE / "rural_three_countries.csv")
    write_indicators(ingestion_rules_table(), HERE / "ingestion_rules.csv")
    print("fixtures written to", HERE)


if __name__ == "__main__":
    main()
