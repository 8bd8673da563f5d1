"""Polynomials with exact radical prefactors.

A RadPoly is a finite sum  s_1*q_1 + ... + s_r*q_r  where each s_c is a
positive ScaledScalar and each q_c a rational BlockPolynomial, with the s_c
pairwise incommensurable (no rational ratio). This is the closure needed to
contract decompositions whose local polynomials carry square or higher roots
while keeping every verification exact. Float-mode polynomials collapse to a
single numeric part.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable

from .blockpoly import FLOAT, RATIONAL, BlockPolynomial, outer
from .errors import IncommensurableScales
from .scalars import ONE, ScaledScalar


class RadPoly:
    """Sum of radical-scaled block polynomials with a canonical merged form."""

    __slots__ = ("sites", "mode", "parts")

    def __init__(self, sites: Iterable[int], parts: Iterable[tuple[ScaledScalar, BlockPolynomial]] = (),
                 mode: str = RATIONAL):
        sites = tuple(int(m) for m in sites)
        merged: list[tuple[ScaledScalar, BlockPolynomial]] = []
        float_mode = mode == FLOAT
        items = list(parts)
        if any(p.mode == FLOAT for _, p in items):
            float_mode = True
        for s, p in items:
            if p.sites != sites:
                raise ValueError(f"part sites {p.sites} differ from {sites}")
            if p.is_zero():
                continue
            if float_mode:
                p = p.astype_float().scaled(float(s))
                s = ONE
            for idx, (s0, p0) in enumerate(merged):
                ratio = s.ratio_to(s0) if not float_mode else Fraction(1)
                if ratio is not None:
                    q = p.scaled(float(ratio)) if float_mode else p.scaled(ratio)
                    merged[idx] = (s0, p0 + q)
                    break
            else:
                merged.append((s, p))
        merged = [(s, p) for s, p in merged if not p.is_zero()]
        self.sites = sites
        self.mode = FLOAT if float_mode else RATIONAL
        self.parts = tuple(merged)

    # constructors

    @classmethod
    def zero(cls, sites: Iterable[int], mode: str = RATIONAL) -> "RadPoly":
        return cls(sites, (), mode)

    @classmethod
    def from_poly(cls, p: BlockPolynomial) -> "RadPoly":
        return cls(p.sites, [(ONE, p)], p.mode)

    @classmethod
    def scaled_poly(cls, s: ScaledScalar, p: BlockPolynomial) -> "RadPoly":
        return cls(p.sites, [(s, p)], p.mode)

    @classmethod
    def coerce(cls, value) -> "RadPoly":
        if isinstance(value, RadPoly):
            return value
        if isinstance(value, BlockPolynomial):
            return cls.from_poly(value)
        raise TypeError(f"cannot coerce {type(value).__name__} to RadPoly")

    # algebra

    def __add__(self, other: "RadPoly") -> "RadPoly":
        other = RadPoly.coerce(other)
        if self.sites != other.sites:
            raise ValueError("site mismatch")
        mode = FLOAT if FLOAT in (self.mode, other.mode) else RATIONAL
        return RadPoly(self.sites, list(self.parts) + list(other.parts), mode)

    def __neg__(self) -> "RadPoly":
        return RadPoly(self.sites, [(s, -p) for s, p in self.parts], self.mode)

    def __sub__(self, other: "RadPoly") -> "RadPoly":
        return self + (-RadPoly.coerce(other))

    def __mul__(self, other) -> "RadPoly":
        if isinstance(other, (BlockPolynomial, RadPoly)):
            other = RadPoly.coerce(other)
            parts = []
            for s1, p1 in self.parts:
                for s2, p2 in other.parts:
                    parts.append((s1 * s2, p1 * p2))
            mode = FLOAT if FLOAT in (self.mode, other.mode) else RATIONAL
            return RadPoly(self.sites, parts, mode)
        return self.scaled(other)

    __rmul__ = __mul__

    def scaled(self, c) -> "RadPoly":
        """Multiply by a rational (or float) scalar of any sign."""
        return RadPoly(self.sites, [(s, p.scaled(c)) for s, p in self.parts], self.mode)

    def scale_mul(self, s: ScaledScalar) -> "RadPoly":
        """Multiply by a positive radical scalar, exactly."""
        return RadPoly(self.sites, [(s * s0, p) for s0, p in self.parts], self.mode)

    def act(self, vperm: tuple[int, ...]) -> "RadPoly":
        return RadPoly(self.sites, [(s, p.act(vperm)) for s, p in self.parts], self.mode)

    def is_zero(self) -> bool:
        return not self.parts

    def __eq__(self, other) -> bool:
        if isinstance(other, BlockPolynomial):
            other = RadPoly.from_poly(other)
        if not isinstance(other, RadPoly):
            return NotImplemented
        if self.sites != other.sites:
            return False
        return (self - other).is_zero()

    def __hash__(self):
        return hash((self.sites, self.mode, len(self.parts)))

    # extraction

    def as_polynomial(self) -> BlockPolynomial:
        """Plain polynomial form; raises if an irrational scale remains."""
        if not self.parts:
            return BlockPolynomial.zero(self.sites, self.mode)
        if len(self.parts) == 1:
            s, p = self.parts[0]
            if s == ONE:
                return p
            if s.is_rational:
                return p.scaled(s.as_fraction())
        raise IncommensurableScales(
            f"result has {len(self.parts)} radical part(s); use residual() or to_float()")

    def residual(self) -> tuple[ScaledScalar, BlockPolynomial]:
        """The (scale, polynomial) pair when exactly one radical part remains."""
        if len(self.parts) != 1:
            raise IncommensurableScales(f"{len(self.parts)} parts, expected 1")
        return self.parts[0]

    def to_float(self) -> BlockPolynomial:
        total = BlockPolynomial.zero(self.sites, FLOAT)
        for s, p in self.parts:
            total = total + p.astype_float().scaled(float(s))
        return total

    def allclose(self, other, tol: float = 1e-9) -> bool:
        other = RadPoly.coerce(other)
        return self.to_float().allclose(other.to_float(), tol)

    def local_degree(self) -> int:
        return max((p.local_degree() for _, p in self.parts), default=0)

    def evaluate(self, point) -> float:
        return float(sum(float(s) * float(p.evaluate(point)) for s, p in self.parts))

    def __repr__(self) -> str:
        if not self.parts:
            return f"RadPoly(sites={self.sites}, 0)"
        return "RadPoly(" + " + ".join(f"{s!r}*{p!r}" for s, p in self.parts) + ")"


def rad_outer(factors: Iterable) -> RadPoly:
    """Product of single-site RadPoly factors placed on consecutive sites."""
    factors = [RadPoly.coerce(f) for f in factors]
    sites = tuple(f.sites[0] for f in factors)
    mode = FLOAT if any(f.mode == FLOAT for f in factors) else RATIONAL
    combos: list[tuple[ScaledScalar, list[BlockPolynomial]]] = [(ONE, [])]
    for f in factors:
        if f.is_zero():
            return RadPoly.zero(sites, mode)
        nxt = []
        for scale, polys in combos:
            for s, p in f.parts:
                nxt.append((scale * s, polys + [p]))
        combos = nxt
    parts = [(scale, outer(polys)) for scale, polys in combos]
    return RadPoly(sites, parts, mode)
