"""Mode labels, polarization tags and interacting triplets."""

import re
from dataclasses import dataclass
from enum import Enum

from modemix.errors import LabelParseError, ValidationError


class Polarization(Enum):
    """Polarization slots of the type-II process."""

    V = "V"
    H = "H"
    S = "S"

    def is_fundamental(self) -> bool:
        """Check if the slot is one of the two fundamental fields."""
        return self in (Polarization.V, Polarization.H)

    @classmethod
    def parse(cls, text: str) -> "Polarization":
        """Convert a one-letter tag to a Polarization."""
        try:
            return cls(text.strip().upper())
        except ValueError:
            raise LabelParseError(
                f"Unknown polarization tag {text!r}, expected V, H or S"
            ) from None


class Orientation(Enum):
    """Direction of the dominant transverse field component."""

    HORIZONTAL = "horizontal"  # Ex, parallel to the top surface
    VERTICAL = "vertical"  # Ey, perpendicular to the top surface


_LABEL_RE = re.compile(r"^\s*(\d)_?(\d)_?([VHSvhs])\s*$")
_TRIPLET_RE = re.compile(r"^\s*(.+?)\s*\+\s*(.+?)\s*(?:->|>|→)\s*(.+?)\s*$")


@dataclass(frozen=True)
class ModeLabel:
    """Node counts of a transverse mode.

    ``i`` counts nodes along x (parallel to the top surface), ``j`` along y
    (perpendicular to it).
    """

    i: int
    j: int
    pol: Polarization

    def __post_init__(self) -> None:
        if self.i < 0 or self.j < 0:
            raise ValidationError(f"Node counts must be non-negative, got ({self.i}, {self.j})")
        if not isinstance(self.pol, Polarization):
            raise ValidationError(f"pol must be a Polarization, got {self.pol!r}")

    @classmethod
    def parse(cls, text: str) -> "ModeLabel":
        """Parse labels like ``02H`` or ``1_0_V``."""
        match = _LABEL_RE.match(text)
        if match is None:
            raise LabelParseError(f"Malformed mode label {text!r}, expected e.g. '02H'")
        return cls(int(match.group(1)), int(match.group(2)), Polarization.parse(match.group(3)))

    @property
    def is_fundamental(self) -> bool:
        return self.i == 0 and self.j == 0

    @property
    def x_parity(self) -> int:
        """0 for fields even in x, 1 for odd."""
        return self.i % 2

    def sort_key(self) -> tuple[str, int, int]:
        return (self.pol.value, self.i, self.j)

    def __str__(self) -> str:
        return f"{self.i}{self.j}{self.pol.value}"


@dataclass(frozen=True)
class Triplet:
    """Interacting mode combination ``v + h -> s``."""

    v: ModeLabel
    h: ModeLabel
    s: ModeLabel

    def __post_init__(self) -> None:
        for slot, label in zip(Polarization, (self.v, self.h, self.s)):
            if label.pol is not slot:
                raise ValidationError(
                    f"Triplet slot {slot.value} holds a {label.pol.value}-polarized label {label}"
                )

    @classmethod
    def parse(cls, text: str) -> "Triplet":
        """Parse ``00V+00H>00S`` (``->`` and ``→`` are accepted too)."""
        match = _TRIPLET_RE.match(text)
        if match is None:
            raise LabelParseError(f"Malformed triplet {text!r}, expected e.g. '00V+00H>00S'")
        try:
            return cls(*(ModeLabel.parse(part) for part in match.groups()))
        except LabelParseError:
            raise
        except ValidationError as exc:
            raise LabelParseError(f"Malformed triplet {text!r}: {exc}") from None

    @classmethod
    def fundamental(cls) -> "Triplet":
        """The ``00V+00H>00S`` reference triplet."""
        return cls(
            ModeLabel(0, 0, Polarization.V),
            ModeLabel(0, 0, Polarization.H),
            ModeLabel(0, 0, Polarization.S),
        )

    @property
    def labels(self) -> tuple[ModeLabel, ModeLabel, ModeLabel]:
        return (self.v, self.h, self.s)

    def label_for(self, pol: Polarization) -> ModeLabel:
        return {Polarization.V: self.v, Polarization.H: self.h, Polarization.S: self.s}[pol]

    def parity_allowed(self) -> bool:
        """Check the x-parity selection rule of a laterally symmetric guide."""
        return (self.v.x_parity + self.h.x_parity + self.s.x_parity) % 2 == 0

    def differing_slots(self, other: "Triplet") -> list[Polarization]:
        """Return the slots in which the two triplets use different modes."""
        return [
            pol for pol in Polarization if self.label_for(pol) != other.label_for(pol)
        ]

    def __str__(self) -> str:
        return f"{self.v}+{self.h}>{self.s}"
