"""Observables along trajectories: energy, norm spectra, fits, reports.

Everything here is a pure function of immutable snapshots.  A probe built
by :func:`make_probe` turns solver snapshots into
:class:`DiagnosticsRecord` rows, and the CSV writer/reader pair
round-trips those rows at full float precision so downstream tooling can
consume them without loss.
"""

from __future__ import annotations

import csv
import math
import re
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .approx import ApproxSolution
from .initial_data import make_b0
from .params import ParamSet
from .spectral import (
    Field,
    VectorField,
    dealias,
    derivative,
    gradient_perp,
    sobolev_norm,
    sobolev_norm_vector,
)
from .state import State

__all__ = [
    "DiagnosticsRecord",
    "InflationReport",
    "default_s_grid",
    "energy",
    "energy_spectral",
    "band_energy_fraction",
    "reference_drift",
    "perturbation",
    "fit_exponent",
    "inflation_report",
    "make_probe",
    "records_to_csv",
    "records_from_csv",
]

#: Band used by the under-resolution monitor: the top eighth of the
#: wavenumbers that survive dealiasing.
MONITOR_BAND_FRACTION = 7.0 / 8.0

_NORM_COLUMN = re.compile(r"^norm_(?P<quantity>.+)_s(?P<s>[+-][0-9.]+)_(?P<kind>hom|inh)$")

#: Quantities a norms map may describe.
_QUANTITIES = frozenset({"a", "b", "abar", "A", "u-u0", "ubar"})


def default_s_grid(beta: float) -> tuple[float, ...]:
    """Norm orders covering every quantity the growth laws track."""
    return (-1.0, 0.0, 1.0, 2.0, beta - 2.0, beta - 1.0, beta)


@dataclass(frozen=True)
class DiagnosticsRecord:
    """One sampled instant of a trajectory.

    Parameters
    ----------
    t : float
        Sample time.
    energy : float
        Quadrature of a_x^2 + a_y^2 + b^2 over the box.
    norms : mapping
        (quantity, s, homogeneous) -> norm value.  Quantity names are
        drawn from {"a", "b", "abar", "A", "u-u0", "ubar"}.
    resolution_fraction : float
        Share of spectral energy in the monitor band.
    realized_dt : float
        Step size that produced this snapshot (0.0 for the initial one).
    """

    t: float
    energy: float
    norms: Mapping[tuple[str, float, bool], float] = field(default_factory=dict)
    resolution_fraction: float = 0.0
    realized_dt: float = 0.0

    def __post_init__(self) -> None:
        if not self.energy >= 0.0:
            raise ValueError(f"energy must be nonnegative, got {self.energy}")
        for key, value in self.norms.items():
            if key[0] not in _QUANTITIES:
                raise ValueError(f"unknown norm quantity {key[0]!r}")
            if not math.isfinite(value):
                raise ValueError(f"norm entry {key} is not finite: {value}")
        object.__setattr__(self, "norms", dict(self.norms))


def energy(state: State) -> float:
    """Physical-space quadrature of a_x^2 + a_y^2 + b^2."""
    grid = state.grid
    ax = derivative(state.a, 1, 0).values
    ay = derivative(state.a, 0, 1).values
    b = state.b.values
    cell = (2.0 * grid.L / grid.n) ** 2
    return float(np.sum(ax * ax + ay * ay + b * b) * cell)


def energy_spectral(state: State) -> float:
    """Multiplier-space route to the same quantity, zero mode included."""
    grid = state.grid
    kx, ky = grid.wavenumber_meshes()
    k2 = kx * kx + ky * ky
    ahat = state.a.coefficients
    bhat = state.b.coefficients
    total = np.sum(k2 * np.abs(ahat) ** 2) + np.sum(np.abs(bhat) ** 2)
    return float(total * grid.cell_measure)


def band_energy_fraction(state: State) -> float:
    """Fraction of spectral energy in the top eighth of retained modes."""
    grid = state.grid
    kx, ky = grid.wavenumber_meshes()
    band = np.maximum(np.abs(kx), np.abs(ky)) > MONITOR_BAND_FRACTION * grid.k_cutoff
    k2 = kx * kx + ky * ky
    ea = k2 * np.abs(state.a.coefficients) ** 2
    eb = np.abs(state.b.coefficients) ** 2
    total = float(np.sum(ea) + np.sum(eb))
    if total == 0.0:
        return 0.0
    return float((np.sum(ea[band]) + np.sum(eb[band])) / total)


def reference_drift(sol: ApproxSolution) -> VectorField:
    """Band-limited initial drift velocity, the u0 that perturbation uses.

    Taking the curl route through the sampled initial magnetic scalar
    (rather than the analytic polar construction) keeps u - u0 exactly
    zero at t = 0: both terms then pass through the identical projection.
    """
    b0 = dealias(make_b0(sol.params, sol.grid))
    return gradient_perp(b0)


def perturbation(
    state: State,
    sol: ApproxSolution,
    p: ParamSet,
    s_values: Sequence[float] | None = None,
    u0: VectorField | None = None,
) -> dict[tuple[str, float, bool], float]:
    """Norms of the carrier deviation A = a - abar(t) and of u - u0.

    Both comparisons are made on the dealiased band: a solver state is
    band-limited, so the sampled carrier and the reference drift must be
    projected the same way before differencing; otherwise the t = 0
    difference would consist purely of truncated spectral tail.  The
    carrier deviation is reported in homogeneous norms, the velocity
    deviation in inhomogeneous norms, alongside the carrier's own norms.
    """
    if sol.grid != state.grid:
        raise ValueError("approximate solution lives on a different grid")
    sol.check_time(state.t)
    if s_values is None:
        s_values = default_s_grid(p.beta)
    carrier = dealias(sol.abar(state.t))
    deviation = dealias(state.a) - carrier
    if u0 is None:
        u0 = reference_drift(sol)
    du = gradient_perp(dealias(state.b))
    velocity_dev = VectorField(du.x - dealias(u0.x), du.y - dealias(u0.y))
    fragment: dict[tuple[str, float, bool], float] = {}
    for s in s_values:
        fragment[("A", s, True)] = sobolev_norm(deviation, s)
        fragment[("abar", s, True)] = sobolev_norm(carrier, s)
        fragment[("u-u0", s, False)] = sobolev_norm_vector(
            velocity_dev, s, homogeneous=False
        )
    return fragment


def fit_exponent(xs: Sequence[float], values: Sequence[float]) -> tuple[float, float]:
    """Least-squares slope of log(values) against log(xs), with r^2.

    Needs at least five samples, strictly positive throughout, whose
    abscissae span at least half a decade.  A constant series fits slope
    0 exactly and reports r^2 = 1.
    """
    xs = np.asarray(xs, dtype=float)
    values = np.asarray(values, dtype=float)
    if xs.shape != values.shape or xs.ndim != 1:
        raise ValueError("xs and values must be matching one-dimensional sequences")
    if xs.size < 5:
        raise ValueError(f"need at least 5 samples, got {xs.size}")
    if np.any(xs <= 0.0) or np.any(values <= 0.0):
        raise ValueError("samples must be strictly positive for a log-log fit")
    span = xs.max() / xs.min()
    if span < math.sqrt(10.0):
        raise ValueError(
            f"abscissa span {span:.3f}x is below the half-decade minimum"
        )
    lx = np.log(xs)
    ly = np.log(values)
    sst = float(np.sum((ly - ly.mean()) ** 2))
    if sst < 1e-28 * max(1.0, float(np.sum(ly * ly))):
        return 0.0, 1.0
    slope, intercept = np.polyfit(lx, ly, 1)
    residual = ly - (slope * lx + intercept)
    r2 = 1.0 - float(np.sum(residual**2)) / sst
    return float(slope), r2


@dataclass(frozen=True)
class InflationReport:
    """Growth of the inflation norm pair along a trajectory.

    ``ratios[i]`` is (|a|_{H^beta-dot} + |b|_{H^(beta-1)-dot}) at
    ``times[i]`` divided by the same sum at the first sample.
    """

    times: tuple[float, ...]
    ratios: tuple[float, ...]
    max_ratio: float
    t_max: float
    end_status: str

    @property
    def final_ratio(self) -> float:
        return self.ratios[-1]


def inflation_report(
    records: Sequence[DiagnosticsRecord], p: ParamSet, end_status: str
) -> InflationReport:
    """Summarize norm growth from a record series."""
    if not records:
        raise ValueError("cannot report on an empty trajectory")
    beta = p.beta
    if any(b.t < a.t for a, b in zip(records, records[1:])):
        raise ValueError("record times must be non-decreasing")
    sums = []
    for rec in records:
        try:
            total = rec.norms[("a", beta, True)] + rec.norms[("b", beta - 1.0, True)]
        except KeyError as exc:
            raise ValueError(
                f"record at t = {rec.t} lacks the inflation norms"
            ) from exc
        sums.append(total)
    base = sums[0]
    if base <= 0.0:
        raise ValueError("initial inflation norm vanishes; ratio undefined")
    ratios = tuple(v / base for v in sums)
    idx = int(np.argmax(ratios))
    return InflationReport(
        times=tuple(rec.t for rec in records),
        ratios=ratios,
        max_ratio=ratios[idx],
        t_max=records[idx].t,
        end_status=end_status,
    )


def make_probe(
    p: ParamSet,
    s_values: Sequence[float] | None = None,
    sol: ApproxSolution | None = None,
    u0: VectorField | None = None,
) -> Callable[[State, float], DiagnosticsRecord]:
    """Build a solver probe producing one DiagnosticsRecord per snapshot.

    Carrier norms are homogeneous; the magnetic scalar's negative-order
    norms switch to the inhomogeneous weight because b carries a nonzero
    mean.  When an approximate solution is supplied the perturbation
    fragment is merged into each record.
    """
    if s_values is None:
        s_values = default_s_grid(p.beta)
    s_values = tuple(float(s) for s in s_values)
    if sol is not None and u0 is None:
        u0 = reference_drift(sol)

    def probe(state: State, realized_dt: float) -> DiagnosticsRecord:
        norms: dict[tuple[str, float, bool], float] = {}
        for s in s_values:
            norms[("a", s, True)] = sobolev_norm(state.a, s)
            if s >= 0.0:
                norms[("b", s, True)] = sobolev_norm(state.b, s)
            else:
                norms[("b", s, False)] = sobolev_norm(state.b, s, homogeneous=False)
        if sol is not None:
            norms.update(perturbation(state, sol, p, s_values, u0=u0))
        return DiagnosticsRecord(
            t=state.t,
            energy=energy(state),
            norms=norms,
            resolution_fraction=band_energy_fraction(state),
            realized_dt=realized_dt,
        )

    return probe


def _norm_column(key: tuple[str, float, bool]) -> str:
    quantity, s, homogeneous = key
    return f"norm_{quantity}_s{s:+g}_{'hom' if homogeneous else 'inh'}"


def _column_key(name: str) -> tuple[str, float, bool] | None:
    match = _NORM_COLUMN.match(name)
    if match is None:
        return None
    return (
        match.group("quantity"),
        float(match.group("s")),
        match.group("kind") == "hom",
    )


def records_to_csv(
    records: Sequence[DiagnosticsRecord],
    path,
    status: str = "completed",
) -> None:
    """Write records as CSV, one row per record, full float precision.

    The status column is empty on all but the last row, which carries the
    trajectory's end status so aborts are visible in the artifact itself.
    """
    if any(b.t < a.t for a, b in zip(records, records[1:])):
        raise ValueError("record times must be non-decreasing")
    keys = sorted({key for rec in records for key in rec.norms})
    header = ["t", "energy", "resolution_fraction", "realized_dt", "status"]
    header += [_norm_column(k) for k in keys]
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for i, rec in enumerate(records):
            row = [
                repr(float(rec.t)),
                repr(float(rec.energy)),
                repr(float(rec.resolution_fraction)),
                repr(float(rec.realized_dt)),
                status if i == len(records) - 1 else "",
            ]
            row += [
                repr(float(rec.norms[k])) if k in rec.norms else "" for k in keys
            ]
            writer.writerow(row)


def records_from_csv(path) -> tuple[list[DiagnosticsRecord], str]:
    """Read back a records CSV; returns (records, end status)."""
    records: list[DiagnosticsRecord] = []
    status = ""
    with open(path, newline="") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None:
            raise ValueError(f"{path} has no header row")
        norm_keys = {
            name: key
            for name in reader.fieldnames
            if (key := _column_key(name)) is not None
        }
        for row in reader:
            norms = {
                key: float(row[name])
                for name, key in norm_keys.items()
                if row[name] != ""
            }
            if row["status"]:
                status = row["status"]
            records.append(
                DiagnosticsRecord(
                    t=float(row["t"]),
                    energy=float(row["energy"]),
                    norms=norms,
                    resolution_fraction=float(row["resolution_fraction"]),
                    realized_dt=float(row["realized_dt"]),
                )
            )
    return records, status
