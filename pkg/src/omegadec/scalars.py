"""Exact positive scalars of the form (num/den)**(1/k).

These carry the group-order roots and other radical normalization factors
that show up in decomposition constructions, so that contraction and
verification can stay in exact arithmetic.
"""

from __future__ import annotations

import math
from fractions import Fraction


def integer_root(x: int, k: int) -> tuple[int, bool]:
    """Floor of the k-th root of x >= 0, and whether the root is exact."""
    if x < 0:
        raise ValueError("negative radicand")
    if k < 1:
        raise ValueError("root index must be >= 1")
    if x in (0, 1) or k == 1:
        return x, True
    r = 1 << ((x.bit_length() + k - 1) // k)
    while True:
        nr = ((k - 1) * r + x // r ** (k - 1)) // k
        if nr >= r:
            break
        r = nr
    while r**k > x:
        r -= 1
    while (r + 1) ** k <= x:
        r += 1
    return r, r**k == x


def _divisors_desc(k: int) -> list[int]:
    divs = [d for d in range(1, k + 1) if k % d == 0]
    return divs[::-1]


class ScaledScalar:
    """The positive real (num/den)**(1/k), normalized to a minimal root index.

    Products, integer powers and extra roots stay in this exact form; the
    value is rational exactly when the normalized root index is 1.
    """

    __slots__ = ("num", "den", "k")

    def __init__(self, ratio, k: int = 1):
        r = Fraction(ratio)
        if r <= 0:
            raise ValueError("scale must be positive")
        if k < 1:
            raise ValueError("root index must be >= 1")
        num, den = r.numerator, r.denominator
        for m in _divisors_desc(k):
            if m == 1:
                break
            rn, okn = integer_root(num, m)
            if not okn:
                continue
            rd, okd = integer_root(den, m)
            if not okd:
                continue
            num, den, k = rn, rd, k // m
            break
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)
        object.__setattr__(self, "k", k)

    def __setattr__(self, name, value):
        raise AttributeError("ScaledScalar is immutable")

    @classmethod
    def one(cls) -> "ScaledScalar":
        return cls(1, 1)

    @property
    def radicand(self) -> Fraction:
        return Fraction(self.num, self.den)

    @property
    def is_rational(self) -> bool:
        return self.k == 1

    def as_fraction(self) -> Fraction:
        if self.k != 1:
            raise ValueError(f"{self!r} is irrational")
        return Fraction(self.num, self.den)

    def value(self) -> float:
        return math.exp((math.log(self.num) - math.log(self.den)) / self.k)

    def __float__(self) -> float:
        return self.value()

    def __mul__(self, other: "ScaledScalar") -> "ScaledScalar":
        if not isinstance(other, ScaledScalar):
            return NotImplemented
        lcm = self.k * other.k // math.gcd(self.k, other.k)
        r = self.radicand ** (lcm // self.k) * other.radicand ** (lcm // other.k)
        return ScaledScalar(r, lcm)

    def __truediv__(self, other: "ScaledScalar") -> "ScaledScalar":
        if not isinstance(other, ScaledScalar):
            return NotImplemented
        lcm = self.k * other.k // math.gcd(self.k, other.k)
        r = self.radicand ** (lcm // self.k) / other.radicand ** (lcm // other.k)
        return ScaledScalar(r, lcm)

    def __pow__(self, j: int) -> "ScaledScalar":
        if j == 0:
            return ScaledScalar.one()
        if j < 0:
            return ScaledScalar.one() / self ** (-j)
        g = math.gcd(j, self.k)
        return ScaledScalar(self.radicand ** (j // g), self.k // g)

    def root(self, j: int) -> "ScaledScalar":
        if j < 1:
            raise ValueError("root index must be >= 1")
        return ScaledScalar(self.radicand, self.k * j)

    def ratio_to(self, other: "ScaledScalar") -> Fraction | None:
        """self / other as an exact Fraction, or None if irrational."""
        q = self / other
        if q.is_rational:
            return q.as_fraction()
        return None

    def __eq__(self, other) -> bool:
        if not isinstance(other, ScaledScalar):
            return NotImplemented
        return (self.num, self.den, self.k) == (other.num, other.den, other.k)

    def __hash__(self) -> int:
        return hash((self.num, self.den, self.k))

    def __repr__(self) -> str:
        if self.k == 1:
            return f"ScaledScalar({self.num}/{self.den})"
        return f"ScaledScalar({self.num}/{self.den}, k={self.k})"

    def to_obj(self) -> dict:
        return {"r": f"{self.num}/{self.den}", "k": self.k}

    @classmethod
    def from_obj(cls, obj: dict) -> "ScaledScalar":
        return cls(Fraction(obj["r"]), int(obj.get("k", 1)))


ONE = ScaledScalar.one()
