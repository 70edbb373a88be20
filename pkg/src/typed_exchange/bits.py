"""Fixed-width bit vectors packed into machine integers."""

from __future__ import annotations

from dataclasses import dataclass


class WidthMismatchError(ValueError):
    """Two vectors that must share a width do not."""


@dataclass(frozen=True)
class BitVector:
    """A {0,1}^width vector stored as an int.

    Bit q of the vector is ``(word >> q) & 1``.  Only the low ``width`` bits
    are meaningful; equality and dot products ignore anything above them.
    """

    width: int
    word: int

    def __post_init__(self):
        if self.width < 0:
            raise ValueError(f"negative width {self.width}")
        if self.word < 0 or self.word >> self.width:
            raise ValueError(f"word {self.word:#x} does not fit in {self.width} bits")

    @classmethod
    def from_bits(cls, bits) -> "BitVector":
        bits = list(bits)
        word = 0
        for q, b in enumerate(bits):
            if b not in (0, 1):
                raise ValueError(f"bit {q} is {b!r}, expected 0 or 1")
            word |= b << q
        return cls(len(bits), word)

    @classmethod
    def from_string(cls, s: str) -> "BitVector":
        """Parse a 0/1 string; the leftmost character is bit 0."""
        return cls.from_bits(int(ch) for ch in s)

    @classmethod
    def zeros(cls, width: int) -> "BitVector":
        return cls(width, 0)

    @classmethod
    def ones(cls, width: int) -> "BitVector":
        return cls(width, (1 << width) - 1)

    @classmethod
    def basis(cls, width: int, q: int) -> "BitVector":
        if not 0 <= q < width:
            raise ValueError(f"basis index {q} out of range for width {width}")
        return cls(width, 1 << q)

    def bit(self, q: int) -> int:
        if not 0 <= q < self.width:
            raise IndexError(q)
        return (self.word >> q) & 1

    def support(self) -> frozenset[int]:
        """Indices of set bits (the conflict-bit set)."""
        return frozenset(q for q in range(self.width) if (self.word >> q) & 1)

    def popcount(self) -> int:
        return self.word.bit_count()

    def dot(self, other: "BitVector") -> int:
        if self.width != other.width:
            raise WidthMismatchError(
                f"width mismatch: {self.width} vs {other.width}"
            )
        return (self.word & other.word).bit_count()

    def concat(self, other: "BitVector") -> "BitVector":
        """Append ``other``'s bits after this vector's bits."""
        return BitVector(self.width + other.width, self.word | (other.word << self.width))

    def to_string(self) -> str:
        return "".join(str((self.word >> q) & 1) for q in range(self.width))

    def __str__(self) -> str:
        return self.to_string()
