"""Periodic pseudo-spectral grid, fields, and Fourier-side operators.

The box is the square [-L, L)^2 sampled on an n x n uniform grid, with
wavenumbers that are integer multiples of pi/L.  Everything downstream
(derivatives, Poisson brackets, Sobolev norms, dealiasing) lives here.

Functions
---------
dealias         : zero modes above the two-thirds cutoff
derivative      : spectral partial derivative of mixed order
gradient_perp   : perpendicular gradient (-d/dy, d/dx)
laplacian       : spectral Laplacian
divergence      : divergence of a vector field
poisson_bracket : dealiased Jacobian  f_x g_y - f_y g_x
sobolev_norm    : fractional Sobolev norm via Fourier multipliers
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

__all__ = [
    "Grid",
    "Field",
    "VectorField",
    "dealias",
    "derivative",
    "gradient_perp",
    "laplacian",
    "divergence",
    "poisson_bracket",
    "sobolev_norm",
    "sobolev_norm_vector",
]

MAX_DERIVATIVE_ORDER = 4


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on [-L, L)^2.

    Parameters
    ----------
    n : int
        Points per side.  Must be a power of two, at least 16, so that
        the two-thirds dealias cutoff never lands on a lattice line.
    L : float
        Box half-width.
    """

    n: int
    L: float

    def __post_init__(self) -> None:
        if self.n < 16 or (self.n & (self.n - 1)) != 0:
            raise ValueError(
                f"Grid resolution n must be a power of two >= 16, got {self.n}"
            )
        if not (self.L > 0.0 and np.isfinite(self.L)):
            raise ValueError(f"Box half-width L must be positive, got {self.L}")

    @property
    def dx(self) -> float:
        return 2.0 * self.L / self.n

    @property
    def x1(self) -> np.ndarray:
        """1D coordinate array; values[i, j] sits at (x1[i], x1[j])."""
        return -self.L + self.dx * np.arange(self.n)

    @property
    def k1(self) -> np.ndarray:
        """1D wavenumbers in FFT order, integer multiples of pi/L."""
        return 2.0 * np.pi * sfft.fftfreq(self.n, d=self.dx)

    @property
    def k_max(self) -> float:
        """Largest representable wavenumber magnitude per axis."""
        return np.pi / self.L * (self.n // 2)

    @property
    def k_cutoff(self) -> float:
        """Two-thirds dealias cutoff; modes beyond it are zeroed."""
        return 2.0 / 3.0 * self.k_max

    @property
    def cell_measure(self) -> float:
        """Weight turning sums over raw FFT coefficients into box integrals.

        With the unnormalized forward transform F_k = sum_x f_x e^{-ik.x},
        Parseval gives  integral |f|^2 dx = sum_k |F_k|^2 * (2L)^2 / n^4.
        """
        return (2.0 * self.L) ** 2 / float(self.n) ** 4

    def meshes(self) -> tuple[np.ndarray, np.ndarray]:
        """Broadcastable coordinate meshes (X along axis 0, Y along axis 1)."""
        x = self.x1
        return x[:, None], x[None, :]

    def wavenumber_meshes(self) -> tuple[np.ndarray, np.ndarray]:
        """Broadcastable wavenumber meshes in FFT order."""
        k = self.k1
        return k[:, None], k[None, :]

    def dealias_mask(self) -> np.ndarray:
        """Boolean mask keeping modes with max(|kx|, |ky|) <= 2/3 k_max."""
        kx, ky = self.wavenumber_meshes()
        return (np.abs(kx) <= self.k_cutoff) & (np.abs(ky) <= self.k_cutoff)

    def polar_meshes(self) -> tuple[np.ndarray, np.ndarray]:
        """Radius and angle arrays (full n x n) centered on the origin."""
        X, Y = self.meshes()
        r = np.sqrt(X**2 + Y**2)
        theta = np.arctan2(np.broadcast_to(Y, (self.n, self.n)), X)
        return r, theta


def _read_only(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


class Field:
    """Real scalar field with lazily synchronized value/coefficient views.

    Construct via :meth:`from_values` or :meth:`from_coefficients`; the
    missing representation is computed on first access and cached.  Stored
    arrays are marked read-only so a synchronized pair cannot drift apart.
    """

    __slots__ = ("grid", "_values", "_coeffs")

    def __init__(self, grid: Grid, values: np.ndarray | None, coeffs: np.ndarray | None):
        self.grid = grid
        self._values = values
        self._coeffs = coeffs

    @classmethod
    def from_values(cls, grid: Grid, values: np.ndarray) -> "Field":
        values = np.asarray(values, dtype=np.float64)
        if values.shape != (grid.n, grid.n):
            raise ValueError(
                f"values shape {values.shape} does not match grid ({grid.n}, {grid.n})"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("field values contain NaN or Inf")
        return cls(grid, _read_only(values.copy()), None)

    @classmethod
    def from_coefficients(cls, grid: Grid, coeffs: np.ndarray) -> "Field":
        coeffs = np.asarray(coeffs, dtype=np.complex128)
        if coeffs.shape != (grid.n, grid.n):
            raise ValueError(
                f"coefficient shape {coeffs.shape} does not match grid ({grid.n}, {grid.n})"
            )
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("field coefficients contain NaN or Inf")
        return cls(grid, None, _read_only(coeffs.copy()))

    @property
    def values(self) -> np.ndarray:
        if self._values is None:
            inv = sfft.ifft2(self._coeffs)
            scale = np.max(np.abs(inv.real)) or 1.0
            worst = np.max(np.abs(inv.imag))
            if worst > 1e-10 * max(scale, 1e-300):
                raise ValueError(
                    "coefficients break Hermitian symmetry: inverse transform has "
                    f"imaginary part {worst:.3e} against real scale {scale:.3e}"
                )
            self._values = _read_only(np.ascontiguousarray(inv.real))
        return self._values

    @property
    def coefficients(self) -> np.ndarray:
        if self._coeffs is None:
            self._coeffs = _read_only(sfft.fft2(self._values))
        return self._coeffs

    def __sub__(self, other: "Field") -> "Field":
        if other.grid != self.grid:
            raise ValueError("cannot combine fields on different grids")
        return Field.from_values(self.grid, self.values - other.values)

    def __add__(self, other: "Field") -> "Field":
        if other.grid != self.grid:
            raise ValueError("cannot combine fields on different grids")
        return Field.from_values(self.grid, self.values + other.values)

    def __rmul__(self, scalar: float) -> "Field":
        return Field.from_values(self.grid, float(scalar) * self.values)


@dataclass(frozen=True)
class VectorField:
    """Pair of scalar fields forming a planar vector field."""

    x: Field
    y: Field

    def __post_init__(self) -> None:
        if self.x.grid != self.y.grid:
            raise ValueError("vector components live on different grids")

    @property
    def grid(self) -> Grid:
        return self.x.grid

    def __sub__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.x - other.x, self.y - other.y)

    def magnitude_values(self) -> np.ndarray:
        return np.hypot(self.x.values, self.y.values)


def dealias(f: Field) -> Field:
    """Project onto the two-thirds band: max(|kx|, |ky|) <= 2/3 k_max."""
    return Field.from_coefficients(f.grid, f.coefficients * f.grid.dealias_mask())


def _axis_multiplier(grid: Grid, order: int) -> np.ndarray:
    """(ik)^order along one axis, Nyquist line zeroed for odd orders.

    The n/2 mode has no conjugate partner, so an odd power of ik there
    would break Hermitian symmetry; dropping it keeps derivatives of
    real fields real without touching resolved content.
    """
    k = grid.k1.copy()
    if order % 2 == 1:
        k[grid.n // 2] = 0.0
    return (1j * k) ** order


def derivative(f: Field, order_x: int, order_y: int) -> Field:
    """Spectral mixed partial derivative d^{ox+oy} f / dx^{ox} dy^{oy}."""
    if order_x < 0 or order_y < 0:
        raise ValueError("derivative orders must be non-negative")
    if order_x + order_y > MAX_DERIVATIVE_ORDER:
        raise ValueError(
            f"total derivative order {order_x + order_y} exceeds the supported "
            f"maximum {MAX_DERIVATIVE_ORDER}"
        )
    mult = 1.0 + 0.0j
    if order_x:
        mult = mult * _axis_multiplier(f.grid, order_x)[:, None]
    if order_y:
        mult = mult * _axis_multiplier(f.grid, order_y)[None, :]
    return Field.from_coefficients(f.grid, f.coefficients * mult)


def gradient_perp(f: Field) -> VectorField:
    """Perpendicular gradient (-df/dy, df/dx); divergence-free by construction."""
    return VectorField(x=-1.0 * derivative(f, 0, 1), y=derivative(f, 1, 0))


def laplacian(f: Field) -> Field:
    kx, ky = f.grid.wavenumber_meshes()
    return Field.from_coefficients(f.grid, f.coefficients * -(kx**2 + ky**2))


def divergence(v: VectorField) -> Field:
    return derivative(v.x, 1, 0) + derivative(v.y, 0, 1)


def poisson_bracket(f: Field, g: Field) -> Field:
    """Dealiased Jacobian {f, g} = f_x g_y - f_y g_x.

    Derivatives are taken spectrally, multiplied pointwise, and the product
    is projected back onto the two-thirds band.  Antisymmetry is exact in
    floating point because the swapped call multiplies the same arrays.
    """
    fx = derivative(f, 1, 0).values
    fy = derivative(f, 0, 1).values
    gx = derivative(g, 1, 0).values
    gy = derivative(g, 0, 1).values
    return dealias(Field.from_values(f.grid, fx * gy - fy * gx))


def _weight(grid: Grid, s: float, homogeneous: bool) -> np.ndarray:
    kx, ky = grid.wavenumber_meshes()
    k2 = kx**2 + ky**2
    if homogeneous:
        with np.errstate(divide="ignore"):
            w = np.where(k2 > 0.0, k2 ** (s / 2.0), 0.0)
    else:
        w = (1.0 + k2) ** (s / 2.0)
    return w


def sobolev_norm(f: Field, s: float, homogeneous: bool = True) -> float:
    """Sobolev norm of order s via Fourier multipliers.

    Homogeneous flavor uses the weight |k|^s with the zero mode excluded;
    the inhomogeneous flavor uses (1 + |k|^2)^{s/2}.  For negative s the
    homogeneous norm is only defined on mean-free fields; a field whose
    mean is not negligible against its L2 size is rejected.

    At s = 0 both flavors reduce to the quadrature L2 norm on the box.
    """
    if not np.isfinite(s):
        raise ValueError("Sobolev order s must be finite")
    coeffs = f.coefficients
    cell = f.grid.cell_measure
    if homogeneous and s < 0.0:
        total = np.sqrt(np.sum(np.abs(coeffs) ** 2) * cell)
        mean_part = np.sqrt(np.abs(coeffs[0, 0]) ** 2 * cell)
        # 1e-8 separates roundoff- and tail-level dust in the zero mode
        # from a genuinely nonzero mean.
        if total > 0.0 and mean_part > 1e-8 * total:
            raise ValueError(
                "homogeneous norm of negative order requires a mean-free field; "
                f"relative zero-mode content is {mean_part / total:.3e}"
            )
    w2 = _weight(f.grid, s, homogeneous) ** 2
    return float(np.sqrt(np.sum(w2 * np.abs(coeffs) ** 2) * cell))


def sobolev_norm_vector(v: VectorField, s: float, homogeneous: bool = True) -> float:
    """Root sum of squares of componentwise Sobolev norms."""
    return float(
        np.hypot(
            sobolev_norm(v.x, s, homogeneous), sobolev_norm(v.y, s, homogeneous)
        )
    )
