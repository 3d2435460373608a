"""Readers for the simulator's CSV artifact contracts.

Every reader validates the columns it needs and raises ValueError with
the offending path in the message; inputs are opened read-only and never
modified.  Norm columns follow the contract ``norm_<quantity>_s<order>_
<hom|inh>`` with the order rendered in %+g form.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass

import numpy as np

_NORM_COLUMN = re.compile(
    r"^norm_(?P<quantity>[A-Za-z0-9\-]+)_s(?P<order>[+-][0-9.]+)_(?P<flavor>hom|inh)$"
)


def read_table(path) -> tuple[list[str], list[list[str]]]:
    """Header row and data rows of a CSV file; empty files are rejected."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path} has no header row")
    return rows[0], rows[1:]


def require_columns(header: list[str], needed, path) -> None:
    missing = [name for name in needed if name not in header]
    if missing:
        raise ValueError(f"missing column(s) {', '.join(missing)} in {path}")


def parse_norm_column(name: str) -> tuple[str, float, str] | None:
    """(quantity, order, flavor) for a norm column name, else None."""
    match = _NORM_COLUMN.match(name)
    if match is None:
        return None
    return match["quantity"], float(match["order"]), match["flavor"]


@dataclass(frozen=True)
class NormSeries:
    """One norm column as a time series; blank cells are skipped."""

    column: str
    quantity: str
    order: float
    flavor: str
    times: np.ndarray
    values: np.ndarray


def read_norm_series(path) -> list[NormSeries]:
    """All norm columns of a trajectory or scan CSV, in file order."""
    header, data = read_table(path)
    require_columns(header, ("t",), path)
    parsed = [(i, name, parse_norm_column(name)) for i, name in enumerate(header)]
    norm_cols = [(i, name, info) for i, name, info in parsed if info is not None]
    if not norm_cols:
        raise ValueError(f"no norm columns in {path}")
    if not data:
        raise ValueError(f"no data rows in {path}")
    t_index = header.index("t")
    out = []
    for index, name, (quantity, order, flavor) in norm_cols:
        pairs = [
            (float(row[t_index]), float(row[index]))
            for row in data
            if row[index].strip() != ""
        ]
        if len(pairs) < 2:
            raise ValueError(f"column {name} has fewer than 2 values in {path}")
        times, values = (np.array(seq) for seq in zip(*pairs))
        out.append(NormSeries(name, quantity, order, flavor, times, values))
    return out


def read_fits(path) -> dict[float, float]:
    """Fitted slope per Sobolev order from a fits CSV."""
    header, data = read_table(path)
    require_columns(header, ("s", "slope"), path)
    if not data:
        raise ValueError(f"no data rows in {path}")
    s_index, slope_index = header.index("s"), header.index("slope")
    return {float(row[s_index]): float(row[slope_index]) for row in data}


@dataclass(frozen=True)
class RegionRow:
    """One admissibility verdict; bound floats are None when inadmissible."""

    beta: float
    gamma: float
    admissible: bool
    zeta_lower: float | None
    zeta_upper: float | None


def read_region(path) -> list[RegionRow]:
    """Typed rows of a region sweep CSV, in file order."""
    header, data = read_table(path)
    needed = (
        "beta_float",
        "gamma_float",
        "admissible",
        "zeta_lower_float",
        "zeta_upper_float",
    )
    require_columns(header, needed, path)
    if not data:
        raise ValueError(f"no data rows in {path}")
    idx = {name: header.index(name) for name in needed}
    rows = []
    for row in data:
        flag = row[idx["admissible"]]
        if flag not in ("true", "false"):
            raise ValueError(f"admissible cell {flag!r} in {path} is not true/false")
        lower = row[idx["zeta_lower_float"]].strip()
        upper = row[idx["zeta_upper_float"]].strip()
        rows.append(
            RegionRow(
                beta=float(row[idx["beta_float"]]),
                gamma=float(row[idx["gamma_float"]]),
                admissible=flag == "true",
                zeta_lower=float(lower) if lower else None,
                zeta_upper=float(upper) if upper else None,
            )
        )
    return rows


def read_energy(path) -> tuple[np.ndarray, np.ndarray]:
    """(t, energy) arrays from a trajectory CSV."""
    header, data = read_table(path)
    require_columns(header, ("t", "energy"), path)
    if not data:
        raise ValueError(f"no data rows in {path}")
    ti, ei = header.index("t"), header.index("energy")
    times = np.array([float(row[ti]) for row in data])
    energies = np.array([float(row[ei]) for row in data])
    return times, energies


def read_sweep(path) -> tuple[np.ndarray, np.ndarray]:
    """(lam, growth ratio at the observation time) from a sweep CSV."""
    header, data = read_table(path)
    require_columns(header, ("lam", "ratio_at_t_n"), path)
    li, ri = header.index("lam"), header.index("ratio_at_t_n")
    pairs = [
        (float(row[li]), float(row[ri])) for row in data if row[ri].strip() != ""
    ]
    if not pairs:
        raise ValueError(f"no completed rows in {path}")
    lams, ratios = (np.array(seq) for seq in zip(*pairs))
    return lams, ratios
