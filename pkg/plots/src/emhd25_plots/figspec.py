"""Figure request description and validation."""

from __future__ import annotations

from dataclasses import dataclass

KINDS = ("norm-growth", "energy", "region", "sweep")

_IMAGE_SUFFIXES = (".png", ".svg")

_DEFAULT_SCALES = {
    "norm-growth": ("log", "log"),
    "energy": ("linear", "linear"),
    "region": ("linear", "linear"),
    "sweep": ("log", "linear"),
}


@dataclass(frozen=True)
class FigureSpec:
    """One figure to render: inputs, kind, output path, axis options.

    ``inputs`` holds one CSV path, or two for norm-growth when a fits
    table supplies the slope legend.  ``logx``/``logy`` of None defer to
    the kind's default scales.  Inputs are read only, never modified.
    """

    inputs: tuple[str, ...]
    kind: str
    out: str
    title: str = ""
    dpi: int = 150
    logx: bool | None = None
    logy: bool | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "inputs", tuple(self.inputs))
        if self.kind not in KINDS:
            raise ValueError(
                f"kind must be one of {', '.join(KINDS)}, got {self.kind!r}"
            )
        if not 1 <= len(self.inputs) <= 2:
            raise ValueError(f"expected 1 or 2 input CSV paths, got {len(self.inputs)}")
        if len(self.inputs) == 2 and self.kind != "norm-growth":
            raise ValueError(f"kind {self.kind!r} takes exactly one input CSV")
        if not any(self.out.endswith(suf) for suf in _IMAGE_SUFFIXES):
            raise ValueError(
                f"output path must end in one of {', '.join(_IMAGE_SUFFIXES)}, "
                f"got {self.out!r}"
            )
        if self.dpi < 10:
            raise ValueError(f"dpi must be at least 10, got {self.dpi}")

    def scales(self) -> tuple[str, str]:
        """Resolved (x, y) axis scales after applying the kind defaults."""
        dx, dy = _DEFAULT_SCALES[self.kind]
        sx = dx if self.logx is None else ("log" if self.logx else "linear")
        sy = dy if self.logy is None else ("log" if self.logy else "linear")
        return sx, sy
