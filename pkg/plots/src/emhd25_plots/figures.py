"""Figure renderers.

Each renderer reads and validates its inputs completely before the output
file is created, so a failing render leaves no image behind.  Rendering is
deterministic for a given CSV and spec: the Agg backend, a fixed svg hash
salt, and constant metadata keep repeat renders byte-identical.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .figspec import FigureSpec
from .readers import (
    read_energy,
    read_fits,
    read_norm_series,
    read_region,
    read_sweep,
)

matplotlib.rcParams["svg.hashsalt"] = "emhd25-plots"

_PNG_METADATA = {"Software": "emhd25-plots"}
_SVG_METADATA = {"Date": None}


@dataclass(frozen=True)
class FigureResult:
    """What a renderer drew: the image path plus the text it committed to.

    ``mode`` distinguishes the layout branches (curves, band, marker,
    empty, trace); ``labels`` are the legend entries, ``annotations`` the
    free-standing text, ``shaded`` the gamma values under the region band.
    """

    path: str
    mode: str
    labels: tuple[str, ...] = ()
    annotations: tuple[str, ...] = ()
    shaded: tuple[float, ...] = ()


def _fit_slope(times: np.ndarray, values: np.ndarray, column: str, path) -> float:
    if not (np.all(times > 0.0) and np.all(values > 0.0)):
        raise ValueError(
            f"column {column} in {path} must be strictly positive for a log-log fit"
        )
    slope, _ = np.polyfit(np.log(times), np.log(values), 1)
    return float(slope)


def _save(fig, spec: FigureSpec) -> None:
    out = Path(spec.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    metadata = _SVG_METADATA if spec.out.endswith(".svg") else _PNG_METADATA
    fig.savefig(spec.out, dpi=spec.dpi, metadata=dict(metadata))
    plt.close(fig)


def _axes(spec: FigureSpec):
    fig, ax = plt.subplots(figsize=(6.4, 4.2), constrained_layout=True)
    sx, sy = spec.scales()
    ax.set_xscale(sx)
    ax.set_yscale(sy)
    if spec.title:
        ax.set_title(spec.title)
    return fig, ax


def plot_norm_growth(spec: FigureSpec) -> FigureResult:
    """Norm series against time with fitted (or supplied) slopes.

    A single series gets its slope rendered as a standalone annotation;
    several series get one curve each with the slope in the legend.  When
    a second input CSV is given, its fitted slopes override the internal
    least-squares fit for matching Sobolev orders.
    """
    series = read_norm_series(spec.inputs[0])
    fitted = read_fits(spec.inputs[1]) if len(spec.inputs) == 2 else {}
    slopes = [
        fitted[ns.order]
        if ns.order in fitted
        else _fit_slope(ns.times, ns.values, ns.column, spec.inputs[0])
        for ns in series
    ]

    fig, ax = _axes(spec)
    labels = []
    for ns, slope in zip(series, slopes):
        label = f"{ns.quantity}, s = {ns.order:g} (slope {slope:.2f})"
        ax.plot(ns.times, ns.values, marker="o", markersize=3.5, label=label)
        labels.append(label)
    ax.set_xlabel("t")
    ax.set_ylabel("norm")
    annotations = []
    if len(series) == 1:
        note = f"slope {slopes[0]:.2f}"
        ax.annotate(note, xy=(0.06, 0.90), xycoords="axes fraction")
        annotations.append(note)
    else:
        ax.legend(loc="best", fontsize=8)
    _save(fig, spec)
    return FigureResult(spec.out, "curves", tuple(labels), tuple(annotations))


def plot_region(spec: FigureSpec) -> FigureResult:
    """Admissible zeta window per gamma, one band (or marker) per beta.

    Exactly the rows marked admissible are shaded, between their zeta
    lower bound and zeta upper bound columns; inadmissible rows appear as
    crosses on the gamma axis.  A beta whose admissible set is a single
    row gets a marker with an interval bar instead of a band, and a file
    with no admissible rows renders an annotated empty frame.
    """
    rows = read_region(spec.inputs[0])
    betas = sorted({row.beta for row in rows})
    admissible = [row for row in rows if row.admissible]

    fig, ax = _axes(spec)
    labels = []
    shaded = []
    modes = []
    for beta in betas:
        group = [row for row in admissible if row.beta == beta]
        group.sort(key=lambda row: row.gamma)
        if not group:
            continue
        gammas = np.array([row.gamma for row in group])
        lowers = np.array([row.zeta_lower for row in group])
        uppers = np.array([row.zeta_upper for row in group])
        shaded.extend(gammas.tolist())
        if len(group) == 1:
            label = f"beta = {beta:g} (single admissible point)"
            ax.errorbar(
                gammas,
                (lowers + uppers) / 2.0,
                yerr=np.vstack([(uppers - lowers) / 2.0, (uppers - lowers) / 2.0]),
                fmt="o",
                capsize=4,
                label=label,
            )
            modes.append("marker")
        else:
            label = f"beta = {beta:g} admissible zeta window"
            ax.fill_between(gammas, lowers, uppers, alpha=0.35, label=label)
            ax.plot(gammas, lowers, linewidth=1.0)
            ax.plot(gammas, uppers, linewidth=1.0)
            modes.append("band")
        labels.append(label)

    bad = [row for row in rows if not row.admissible]
    if bad:
        floor = min((row.zeta_lower for row in admissible), default=1.0)
        ax.plot(
            [row.gamma for row in bad],
            [floor] * len(bad),
            linestyle="none",
            marker="x",
            color="0.45",
            label="inadmissible",
        )
        labels.append("inadmissible")

    annotations = []
    if not admissible:
        note = "no admissible rows"
        ax.annotate(note, xy=(0.5, 0.5), xycoords="axes fraction", ha="center")
        annotations.append(note)
        mode = "empty"
    else:
        mode = "band" if "band" in modes else "marker"
    ax.set_xlabel("gamma")
    ax.set_ylabel("zeta")
    if labels:
        ax.legend(loc="best", fontsize=8)
    _save(fig, spec)
    return FigureResult(
        spec.out, mode, tuple(labels), tuple(annotations), tuple(shaded)
    )


def plot_energy(spec: FigureSpec) -> FigureResult:
    """Energy trace along a trajectory with its worst relative drift."""
    times, energies = read_energy(spec.inputs[0])
    annotations = []
    if energies[0] > 0.0:
        drift = float(np.abs(energies - energies[0]).max() / energies[0])
        annotations.append(f"max relative drift {drift:.2e}")

    fig, ax = _axes(spec)
    ax.plot(times, energies, marker="o", markersize=3.5)
    ax.set_xlabel("t")
    ax.set_ylabel("energy")
    for note in annotations:
        ax.annotate(note, xy=(0.06, 0.90), xycoords="axes fraction")
    _save(fig, spec)
    return FigureResult(spec.out, "trace", (), tuple(annotations))


def plot_sweep(spec: FigureSpec) -> FigureResult:
    """Growth ratio at the observation time against lam."""
    lams, ratios = read_sweep(spec.inputs[0])

    fig, ax = _axes(spec)
    ax.plot(lams, ratios, marker="o")
    ax.set_xlabel("lam")
    ax.set_ylabel("growth ratio at t_n")
    _save(fig, spec)
    return FigureResult(spec.out, "trace", (), ())


_RENDERERS = {
    "norm-growth": plot_norm_growth,
    "region": plot_region,
    "energy": plot_energy,
    "sweep": plot_sweep,
}


def render(spec: FigureSpec) -> FigureResult:
    """Dispatch a figure spec to its renderer."""
    return _RENDERERS[spec.kind](spec)
