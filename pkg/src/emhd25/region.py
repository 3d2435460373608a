"""Exact-arithmetic certification of the admissible parameter region.

Every inequality on (beta, gamma, zeta) is evaluated in rational
arithmetic; floats appear only as a final rendering in CSV output.  The
feasibility margins are thin (for instance 60/41 against 3/2), so float
comparison is not trustworthy here.

Inputs given as floats or strings are interpreted as exact decimals:
Fraction(str(x)) turns 3.5 into 7/2, not into the nearest binary float.
Callers who hand in computed floats with long decimal expansions get that
expansion taken literally.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

__all__ = [
    "RegionVerdict",
    "GammaWindows",
    "base_constraints",
    "zeta_lb_baru",
    "zeta_lb_perturb",
    "zeta_lb_combined",
    "gamma_windows",
    "admissible",
    "region_sweep",
    "sweep_to_csv",
    "SWEEP_COLUMNS",
]

Rational = Fraction | int | float | str


def _exact(x: Rational) -> Fraction:
    """Exact rational from a decimal-intent input."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(str(x))


def _check_beta(beta: Fraction, upper_closed: bool) -> None:
    top_ok = beta <= 4 if upper_closed else beta < 4
    if not (3 < beta and top_ok):
        edge = "(3, 4]" if upper_closed else "(3, 4)"
        raise ValueError(f"beta = {beta} outside {edge}")


@dataclass(frozen=True)
class RegionVerdict:
    """Outcome of the full admissibility check at one (beta, gamma).

    ``zeta_interval`` is the open interval of workable zeta values and is
    None exactly when the pair is inadmissible; ``binding_constraints``
    names every inequality that failed; ``values`` holds the evaluated
    bounds that the decision rested on.
    """

    admissible: bool
    zeta_interval: tuple[Fraction, Fraction] | None
    binding_constraints: tuple[str, ...]
    values: Mapping[str, Fraction]

    def __post_init__(self) -> None:
        nonempty = (
            self.zeta_interval is not None
            and self.zeta_interval[0] < self.zeta_interval[1]
        )
        if self.admissible != nonempty:
            raise ValueError(
                "verdict inconsistent: admissible must match a nonempty interval"
            )
        object.__setattr__(self, "values", dict(self.values))


@dataclass(frozen=True)
class GammaWindows:
    """Upper bounds on gamma, each exact.

    drift: keeps the drift correction subordinate over the observation
    window.  perturbation: keeps the perturbation estimate closable.
    feasible: keeps the combined zeta lower bound below 5 - beta.  The
    binding window is the minimum of the last two; the drift bound is
    strictly weaker than the perturbation bound and never binds.
    """

    drift: Fraction
    perturbation: Fraction
    feasible: Fraction

    @property
    def window(self) -> Fraction:
        return min(self.perturbation, self.feasible)


def base_constraints(
    beta: Rational, gamma: Rational, zeta: Rational
) -> dict[str, bool]:
    """Individual pass/fail for the three open-range conditions."""
    b, g, z = _exact(beta), _exact(gamma), _exact(zeta)
    return {
        "beta_range": 3 < b < 4,
        "gamma_min": g > 1,
        "zeta_range": 0 < z < 5 - b,
    }


def zeta_lb_baru(beta: Rational, gamma: Rational) -> Fraction:
    """Drift-subordination lower bound on zeta (inclusive).

    ((5-beta)(4+beta) + (4-beta) gamma) / (5+beta).  Defined up to and
    including beta = 4 for diagnostic evaluation; beta = 4 itself is
    outside the admissible region.
    """
    b, g = _exact(beta), _exact(gamma)
    _check_beta(b, upper_closed=True)
    return ((5 - b) * (4 + b) + (4 - b) * g) / (5 + b)


def zeta_lb_perturb(beta: Rational, gamma: Rational) -> Fraction:
    """Perturbation-control lower bound on zeta (strict).

    10 gamma (4-beta)/41 + 36 (5-beta)/41.
    """
    b, g = _exact(beta), _exact(gamma)
    _check_beta(b, upper_closed=True)
    return (10 * g * (4 - b) + 36 * (5 - b)) / 41


def zeta_lb_combined(beta: Rational, gamma: Rational) -> Fraction:
    """Strict lower bound dominating both individual bounds.

    (10/41) gamma (4-beta) + max{36/41, (4+beta)/(5+beta)} (5-beta).
    Every evaluation cross-checks the domination before returning.
    """
    b, g = _exact(beta), _exact(gamma)
    _check_beta(b, upper_closed=True)
    weight = max(Fraction(36, 41), (4 + b) / (5 + b))
    bound = Fraction(10, 41) * g * (4 - b) + weight * (5 - b)
    if bound < zeta_lb_perturb(b, g) or bound < zeta_lb_baru(b, g):
        raise RuntimeError(
            f"combined bound {bound} fails to dominate the individual bounds "
            f"at beta = {b}, gamma = {g}"
        )
    return bound


def gamma_windows(beta: Rational) -> GammaWindows:
    """The three exact upper bounds on gamma at a given beta."""
    b = _exact(beta)
    _check_beta(b, upper_closed=False)
    return GammaWindows(
        drift=(5 - b) / (4 - b),
        perturbation=(5 - b) / (2 * (4 - b)),
        feasible=41 * (5 - b) / (10 * (5 + b) * (4 - b)),
    )


def admissible(beta: Rational, gamma: Rational) -> RegionVerdict:
    """Full admissibility verdict for one (beta, gamma) pair.

    The zeta interval is (combined lower bound, 5 - beta), both endpoints
    open; the lower endpoint inherits the strict inequality of the
    combined bound, which dominates the inclusive drift bound whenever
    beta > 3.  Inadmissible pairs are a valid outcome, never an error.
    """
    b, g = _exact(beta), _exact(gamma)
    failed: list[str] = []
    values: dict[str, Fraction] = {}
    if not 3 < b < 4:
        return RegionVerdict(
            admissible=False,
            zeta_interval=None,
            binding_constraints=("beta_range",),
            values={},
        )
    windows = gamma_windows(b)
    lower = zeta_lb_combined(b, g)
    upper = 5 - b
    values["zeta_lb_baru"] = zeta_lb_baru(b, g)
    values["zeta_lb_perturb"] = zeta_lb_perturb(b, g)
    values["zeta_lb_combined"] = lower
    values["zeta_upper"] = upper
    values["gamma_max_drift"] = windows.drift
    values["gamma_max_perturbation"] = windows.perturbation
    values["gamma_max_feasible"] = windows.feasible
    values["gamma_window"] = windows.window
    if not g > 1:
        failed.append("gamma_min")
    if not g < windows.window:
        failed.append("gamma_window")
    if not lower < upper:
        failed.append("zeta_nonempty")
    if failed:
        return RegionVerdict(
            admissible=False,
            zeta_interval=None,
            binding_constraints=tuple(failed),
            values=values,
        )
    midpoint = (lower + upper) / 2
    base = base_constraints(b, g, midpoint)
    if not all(base.values()) or midpoint < values["zeta_lb_baru"] or not (
        midpoint > values["zeta_lb_perturb"]
    ):
        raise RuntimeError(
            f"midpoint cross-check failed at beta = {b}, gamma = {g}: {base}"
        )
    return RegionVerdict(
        admissible=True,
        zeta_interval=(lower, upper),
        binding_constraints=(),
        values=values,
    )


#: Column order of the sweep CSV; exact fractions first, floats after.
SWEEP_COLUMNS = (
    "beta",
    "gamma",
    "admissible",
    "zeta_lower",
    "zeta_upper",
    "binding_constraints",
    "beta_float",
    "gamma_float",
    "zeta_lower_float",
    "zeta_upper_float",
)


def region_sweep(
    beta_grid: Sequence[Rational], gamma_grid: Sequence[Rational]
) -> list[dict[str, str]]:
    """Verdict rows for the Cartesian grid, in deterministic order.

    Rows iterate beta outer, gamma inner, in the order given.  Fraction
    columns render as 'p/q'; the float columns are repr renderings of the
    same values, empty when the pair is inadmissible.
    """
    rows: list[dict[str, str]] = []
    for beta in beta_grid:
        for gamma in gamma_grid:
            b, g = _exact(beta), _exact(gamma)
            verdict = admissible(b, g)
            if verdict.zeta_interval is not None:
                lo, hi = verdict.zeta_interval
                lo_s, hi_s = str(lo), str(hi)
                lo_f, hi_f = repr(float(lo)), repr(float(hi))
            else:
                lo_s = hi_s = lo_f = hi_f = ""
            rows.append(
                {
                    "beta": str(b),
                    "gamma": str(g),
                    "admissible": str(verdict.admissible).lower(),
                    "zeta_lower": lo_s,
                    "zeta_upper": hi_s,
                    "binding_constraints": ";".join(verdict.binding_constraints),
                    "beta_float": repr(float(b)),
                    "gamma_float": repr(float(g)),
                    "zeta_lower_float": lo_f,
                    "zeta_upper_float": hi_f,
                }
            )
    return rows


def sweep_to_csv(rows: Sequence[Mapping[str, str]], path) -> None:
    """Write sweep rows with the fixed column order; header always present."""
    with open(path, "w", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=list(SWEEP_COLUMNS))
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
