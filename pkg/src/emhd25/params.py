"""Validated parameter bundle for the shear construction."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

__all__ = ["ParamSet"]


@dataclass(frozen=True)
class ParamSet:
    """Scaling parameters (lam, beta, gamma, zeta) plus the integer mode count.

    The azimuthal wavenumber m defaults to round(lam**gamma); the realized
    angular exponent log(m)/log(lam) is exposed as :attr:`gamma_eff` so that
    fits can account for integer rounding at small lam.
    """

    lam: float
    beta: float
    gamma: float
    zeta: float
    m: int = field(default=0)

    def __post_init__(self) -> None:
        if not self.lam >= 4.0:
            raise ValueError(f"frequency parameter lam must be >= 4, got {self.lam}")
        if not 3.0 < self.beta < 4.0:
            raise ValueError(
                f"regularity index beta must lie in the open interval (3, 4), got {self.beta}"
            )
        if not self.gamma > 1.0:
            raise ValueError(f"angular exponent gamma must exceed 1, got {self.gamma}")
        if not 0.0 < self.zeta < 5.0 - self.beta:
            raise ValueError(
                f"time exponent zeta must lie in (0, 5 - beta) = (0, {5.0 - self.beta}), "
                f"got {self.zeta}"
            )
        if self.m == 0:
            object.__setattr__(self, "m", int(round(self.lam**self.gamma)))
        if self.m < 2:
            raise ValueError(
                f"azimuthal wavenumber m = round(lam**gamma) must be >= 2, got {self.m}"
            )

    @property
    def gamma_eff(self) -> float:
        """Angular exponent actually realized by the integer mode count."""
        return math.log(self.m) / math.log(self.lam)

    @property
    def a_amplitude(self) -> float:
        """Prefactor lam**(1 - beta*gamma) of the carrier field."""
        return self.lam ** (1.0 - self.beta * self.gamma)

    @property
    def b_amplitude(self) -> float:
        """Prefactor lam**(2 - beta) of the drift stream function."""
        return self.lam ** (2.0 - self.beta)

    @property
    def inflation_time(self) -> float:
        """Target observation time t_N = lam**(-zeta)."""
        return self.lam ** (-self.zeta)
