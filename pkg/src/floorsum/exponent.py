"""Exact exponent type shared by every module.

An exponent c is held as an exact ``fractions.Fraction`` so that powers of
integers can fall back to exact big-integer root extraction whenever the
denominator is small enough for that to be cheap.  Exponents built from
arbitrary floats keep their exact dyadic value but lose the exact-root
fast path (the dyadic denominator is astronomically large), in which case
floors are resolved by escalating-precision enclosures alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

__all__ = ["Exponent"]

# Exact k-th roots of m**a stay cheap as long as the integers involved do
# not explode; these limits keep m**a below a few thousand bits at desk
# scale (m up to ~1e8).
_MAX_ROOT_NUMERATOR = 128
_MAX_ROOT_DENOMINATOR = 64


@dataclass(frozen=True)
class Exponent:
    """A positive exponent held exactly as a rational number."""

    value: Fraction
    label: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        if not isinstance(self.value, Fraction):
            raise TypeError("Exponent.value must be a Fraction")
        if self.value <= 0:
            raise ValueError(f"exponent must be positive, got {self.value}")
        if not self.label:
            object.__setattr__(self, "label", str(self.value))

    # -- constructors -------------------------------------------------

    @classmethod
    def coerce(cls, c: "Exponent | Fraction | str | int | float") -> "Exponent":
        """Normalize any accepted exponent spelling to an Exponent.

        Strings and floats are read as exact decimals ("1.05" and 1.05
        both become 21/20); "a/b" strings become the exact fraction.
        """
        if isinstance(c, Exponent):
            return c
        if isinstance(c, Fraction):
            return cls(c)
        if isinstance(c, int):
            return cls(Fraction(c))
        if isinstance(c, float):
            # repr(float) is the shortest decimal that round-trips, which
            # is what the caller typed for short literals like 1.3.
            return cls.from_string(repr(c))
        if isinstance(c, str):
            return cls.from_string(c)
        raise TypeError(f"cannot interpret {c!r} as an exponent")

    @classmethod
    def from_string(cls, text: str) -> "Exponent":
        """Parse "a/b" or a decimal string to an exact exponent."""
        text = text.strip()
        try:
            if "/" in text:
                num, den = text.split("/", 1)
                value = Fraction(int(num), int(den))
            else:
                value = Fraction(text)  # exact decimal -> rational
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"cannot parse exponent {text!r}") from exc
        return cls(value, label=text)

    # -- accessors ----------------------------------------------------

    @property
    def numerator(self) -> int:
        return self.value.numerator

    @property
    def denominator(self) -> int:
        return self.value.denominator

    @property
    def exact_root_available(self) -> bool:
        """True when floor(m**value) may be computed by exact roots."""
        return (
            self.value.denominator <= _MAX_ROOT_DENOMINATOR
            and self.value.numerator <= _MAX_ROOT_NUMERATOR
        )

    def reciprocal(self) -> "Exponent":
        """The exponent 1/c (gamma when self is c)."""
        return Exponent(1 / self.value, label=f"1/({self.label})")

    def __float__(self) -> float:
        return float(self.value)

    def __str__(self) -> str:
        return self.label
