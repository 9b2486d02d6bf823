"""Mortality data ingestion: parsers, panel assembly, train/holdout splits.

Raw observations travel as (year, age, mx) tuples where mx is a float or
None for a missing cell.  Panels hold log rates; raw rates never leave this
module.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ArgumentError,
    CompletenessError,
    DataError,
    DomainError,
    ParseError,
    StructureError,
)

ZERO_POLICIES = ("reject", "interpolate", "floor")
_HMD_SEX_COLUMNS = {"female": 2, "male": 3, "total": 4}
_MISSING_TOKENS = {".", "", "na", "nan"}


@dataclass(frozen=True)
class MortalityPanel:
    """N ages x T years of log central death rates plus per-age time means.

    Years must be consecutive and ascending, ages strictly ascending, and
    every log rate finite.  ``a_x`` equals the row means of ``log_rates``.
    """

    ages: np.ndarray
    years: np.ndarray
    log_rates: np.ndarray
    a_x: np.ndarray
    population_label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "ages", np.asarray(self.ages, dtype=int))
        object.__setattr__(self, "years", np.asarray(self.years, dtype=int))
        object.__setattr__(self, "log_rates", np.asarray(self.log_rates, dtype=float))
        object.__setattr__(self, "a_x", np.asarray(self.a_x, dtype=float))
        n, t = self.log_rates.shape
        if n != self.ages.size or t != self.years.size:
            raise ArgumentError(
                f"log_rates is {self.log_rates.shape}, expected "
                f"({self.ages.size}, {self.years.size})"
            )
        if n < 2:
            raise ArgumentError(f"need at least 2 ages, got {n}")
        if t < 1:
            raise ArgumentError("need at least 1 year")
        if np.any(np.diff(self.ages) <= 0):
            raise ArgumentError("ages must be strictly ascending")
        if t > 1 and np.any(np.diff(self.years) != 1):
            raise ArgumentError("years must be consecutive and ascending")
        if not np.all(np.isfinite(self.log_rates)):
            raise ArgumentError("log_rates must be finite")
        if np.max(np.abs(self.a_x - self.log_rates.mean(axis=1))) > 1e-12:
            raise ArgumentError("a_x does not match the row means of log_rates")

    @classmethod
    def from_log_rates(cls, ages, years, log_rates, population_label=""):
        log_rates = np.asarray(log_rates, dtype=float)
        return cls(ages, years, log_rates, log_rates.mean(axis=1), population_label)

    @property
    def n_ages(self) -> int:
        return self.ages.size

    @property
    def n_years(self) -> int:
        return self.years.size

    def centered(self) -> np.ndarray:
        """log_rates minus a_x, shape (N, T)."""
        return self.log_rates - self.a_x[:, None]


@dataclass(frozen=True)
class PanelSplit:
    """Training and holdout sub-panels, contiguous at split_year."""

    train: MortalityPanel
    holdout: MortalityPanel
    split_year: int


def _iter_lines(text):
    if hasattr(text, "read"):
        text = text.read()
    return text.splitlines()


def parse_hmd_table(text, age_cap: int = 90, sex: str = "total"):
    """Parse an HMD Mx_1x1 table into (year, age, mx) records.

    Columns are Year, Age, Female, Male, Total; the age token "110+" maps to
    110 and "." marks a missing rate.  Rows with age above ``age_cap`` are
    dropped.  Lines before the column header are ignored.
    """
    if sex not in _HMD_SEX_COLUMNS:
        raise ArgumentError(f"sex must be one of {sorted(_HMD_SEX_COLUMNS)}, got {sex!r}")
    col = _HMD_SEX_COLUMNS[sex]
    records = []
    in_data = False
    prev_year = None
    for line_no, line in enumerate(_iter_lines(text), start=1):
        tokens = line.split()
        if not tokens:
            continue
        if not in_data:
            lowered = [t.strip(",").lower() for t in tokens]
            if lowered[:2] == ["year", "age"]:
                in_data = True
                continue
            # title/prologue line before the header
            continue
        if len(tokens) != 5:
            raise ParseError(f"expected 5 columns, got {len(tokens)}", line_no)
        try:
            year = int(tokens[0])
        except ValueError:
            raise ParseError(f"bad year {tokens[0]!r}", line_no) from None
        age_tok = tokens[1]
        if age_tok.endswith("+"):
            age_tok = age_tok[:-1]
        try:
            age = int(age_tok)
        except ValueError:
            raise ParseError(f"bad age {tokens[1]!r}", line_no) from None
        if prev_year is not None and year < prev_year:
            raise StructureError(
                f"line {line_no}: year blocks must be nondecreasing "
                f"({year} after {prev_year})"
            )
        prev_year = year
        if age > age_cap:
            continue
        val_tok = tokens[col]
        if val_tok.lower() in _MISSING_TOKENS:
            mx = None
        else:
            try:
                mx = float(val_tok)
            except ValueError:
                raise ParseError(f"bad rate {val_tok!r}", line_no) from None
        records.append((year, age, mx))
    if not in_data:
        raise StructureError("no 'Year Age Female Male Total' header found")
    return records


def parse_csv_long(text):
    """Parse long CSV with header year,age,mx into (year, age, mx) records."""
    reader = csv.reader(io.StringIO(text.read() if hasattr(text, "read") else text))
    records = []
    seen = set()
    header = None
    for line_no, row in enumerate(reader, start=1):
        if not row or all(not c.strip() for c in row):
            continue
        if header is None:
            header = [c.strip().lower() for c in row]
            if header != ["year", "age", "mx"]:
                raise ParseError(f"expected header year,age,mx, got {','.join(row)}", line_no)
            continue
        if len(row) != 3:
            raise ParseError(f"expected 3 fields, got {len(row)}", line_no)
        try:
            year = int(row[0])
            age = int(row[1])
        except ValueError:
            raise ParseError(f"bad year/age in {row!r}", line_no) from None
        if (year, age) in seen:
            raise DataError(f"duplicate observation for (year={year}, age={age})")
        seen.add((year, age))
        tok = row[2].strip()
        if tok.lower() in _MISSING_TOKENS:
            mx = None
        else:
            try:
                mx = float(tok)
            except ValueError:
                raise ParseError(f"bad rate {row[2]!r}", line_no) from None
            if mx < 0:
                raise DomainError(f"negative rate {mx} at (year={year}, age={age})")
        records.append((year, age, mx))
    if header is None:
        raise ParseError("empty input", 1)
    return records


def build_panel(records, zero_policy: str = "reject", floor_eps: float = 1e-6,
                population_label: str = "") -> MortalityPanel:
    """Assemble records into a complete panel of log rates.

    Cells that are missing or have mx <= 0 are handled per ``zero_policy``:
    "reject" raises listing the holes, "interpolate" fills them linearly in
    log space along the year axis within each age (edge holes copy the
    nearest value), "floor" replaces them by ``floor_eps``.
    """
    if zero_policy not in ZERO_POLICIES:
        raise ArgumentError(f"zero_policy must be one of {ZERO_POLICIES}, got {zero_policy!r}")
    if not records:
        raise ArgumentError("no records")
    ages = np.array(sorted({r[1] for r in records}))
    y_min = min(r[0] for r in records)
    y_max = max(r[0] for r in records)
    years = np.arange(y_min, y_max + 1)
    grid = np.full((ages.size, years.size), np.nan)
    age_idx = {a: i for i, a in enumerate(ages)}
    for year, age, mx in records:
        if mx is not None:
            grid[age_idx[age], year - y_min] = mx

    bad = ~(np.isfinite(grid) & (grid > 0.0))
    if bad.any():
        holes = [(int(years[t]), int(ages[i])) for i, t in zip(*np.nonzero(bad))]
        if zero_policy == "reject":
            shown = ", ".join(f"(year={y}, age={a})" for y, a in holes[:20])
            more = "" if len(holes) <= 20 else f" and {len(holes) - 20} more"
            raise CompletenessError(f"grid has {len(holes)} holes: {shown}{more}", holes)
        if zero_policy == "floor":
            grid[bad] = floor_eps
        else:  # interpolate
            for i in range(ages.size):
                good = ~bad[i]
                if not good.any():
                    raise CompletenessError(
                        f"age {ages[i]} has no usable observations",
                        [(int(y), int(ages[i])) for y in years],
                    )
                if good.all():
                    continue
                logs = np.interp(
                    np.arange(years.size),
                    np.nonzero(good)[0],
                    np.log(grid[i, good]),
                )
                grid[i, bad[i]] = np.exp(logs[bad[i]])
    return MortalityPanel.from_log_rates(ages, years, np.log(grid), population_label)


def split_panel(panel: MortalityPanel, split_year: int) -> PanelSplit:
    """Split at split_year (last training year); both halves recompute a_x."""
    years = panel.years
    if not (years[0] <= split_year < years[-1]):
        raise ArgumentError(
            f"split_year must lie in [{years[0]}, {years[-1] - 1}], got {split_year}"
        )
    cut = int(split_year - years[0]) + 1
    train = MortalityPanel.from_log_rates(
        panel.ages, years[:cut], panel.log_rates[:, :cut], panel.population_label
    )
    holdout = MortalityPanel.from_log_rates(
        panel.ages, years[cut:], panel.log_rates[:, cut:], panel.population_label
    )
    return PanelSplit(train, holdout, int(split_year))


def emit_csv_long(panel: MortalityPanel) -> str:
    """Long CSV (year,age,mx) that round-trips through parse_csv_long."""
    out = ["year,age,mx"]
    for t, year in enumerate(panel.years):
        for i, age in enumerate(panel.ages):
            out.append(f"{year},{age},{math.exp(panel.log_rates[i, t]):.17g}")
    return "\n".join(out) + "\n"


def emit_csv_matrix(panel: MortalityPanel) -> str:
    r"""Matrix CSV of log rates with header cell ``age\year``."""
    header = "age\\year," + ",".join(str(y) for y in panel.years)
    out = [header]
    for i, age in enumerate(panel.ages):
        row = ",".join(f"{v:.17g}" for v in panel.log_rates[i])
        out.append(f"{age},{row}")
    return "\n".join(out) + "\n"
