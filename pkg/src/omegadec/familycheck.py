"""Translation-invariant circle families and their bounded positivity check.

The family is given by a square array of local polynomials in canonical
squared-variable form, encoded as an integer coefficient array indexed by
(bond in, bond out, variable). Closing the bonds in a circle of length n+1
makes the coefficient tensor a trace of transfer-matrix products, so the
global polynomial is nonnegative (equivalently a sum of squares) exactly when
all those traces are nonnegative. The check is performed for each size up to a
bound; the question for all sizes at once is out of reach of any algorithm and
the report says so explicitly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from .blockpoly import BlockPolynomial
from .errors import SizeTooLarge
from .tensorbridge import DenseTensor, poly_from_tensor

UNDECIDED_DISCLAIMER = (
    "Bounded check only: no algorithm can decide nonnegativity or the "
    "sum-of-squares property of this family for all sizes; results beyond "
    "the checked range are not implied."
)

DEFAULT_MAX_TUPLES = 10**7


@dataclass(frozen=True)
class LocalFamily:
    """Integer coefficient array p[a][b][j] of the local polynomials."""

    D: int
    m: int
    coeffs: tuple = field(repr=False)

    def __post_init__(self):
        rows = tuple(
            tuple(tuple(int(x) for x in cell) for cell in row) for row in self.coeffs
        )
        if len(rows) != self.D or any(len(row) != self.D for row in rows):
            raise ValueError(f"coefficients must form a {self.D}x{self.D} grid")
        if any(len(cell) != self.m for row in rows for cell in row):
            raise ValueError(f"every cell needs {self.m} coefficients")
        object.__setattr__(self, "coeffs", rows)

    def transfer_matrix(self, j: int) -> tuple[tuple[int, ...], ...]:
        """D x D integer matrix of the coefficients of the j-th squared variable."""
        return tuple(tuple(self.coeffs[a][b][j] for b in range(self.D))
                     for a in range(self.D))

    def scaled(self, factor: int) -> "LocalFamily":
        if factor < 1:
            raise ValueError("scaling factor must be positive")
        return LocalFamily(self.D, self.m, tuple(
            tuple(tuple(factor * x for x in cell) for cell in row)
            for row in self.coeffs))

    def to_obj(self) -> dict:
        return {"D": self.D, "m": self.m,
                "coeffs": [[list(cell) for cell in row] for row in self.coeffs]}

    @classmethod
    def from_obj(cls, obj: dict) -> "LocalFamily":
        return cls(int(obj["D"]), int(obj["m"]), obj["coeffs"])

    @classmethod
    def loads(cls, text: str) -> "LocalFamily":
        return cls.from_obj(json.loads(text))


def _mat_mul(A, B, D: int):
    return tuple(tuple(sum(A[a][c] * B[c][b] for c in range(D)) for b in range(D))
                 for a in range(D))


def _trace(A, D: int) -> int:
    return sum(A[a][a] for a in range(D))


def transfer_tensor(f: LocalFamily, n: int,
                    max_entries: int = DEFAULT_MAX_TUPLES) -> DenseTensor:
    """Coefficient tensor on n+1 sites: traces of transfer-matrix products."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if f.m ** (n + 1) > max_entries:
        raise SizeTooLarge(f"{f.m}**{n + 1} entries exceed {max_entries}")
    mats = [f.transfer_matrix(j) for j in range(f.m)]
    t = DenseTensor.zeros((f.m,) * (n + 1))
    idx = [0] * (n + 1)

    def rec(depth: int, prefix):
        for j in range(f.m):
            idx[depth] = j
            prod_ = mats[j] if prefix is None else _mat_mul(prefix, mats[j], f.D)
            if depth == n:
                t[tuple(idx)] = _trace(prod_, f.D)
            else:
                rec(depth + 1, prod_)

    rec(0, None)
    return t


def family_polynomial(f: LocalFamily, n: int,
                      max_entries: int = DEFAULT_MAX_TUPLES) -> BlockPolynomial:
    """The circle polynomial on n+1 sites; invariant under the cyclic shift."""
    return poly_from_tensor(transfer_tensor(f, n, max_entries))


@dataclass
class SizeReport:
    n: int
    min_entry: int
    witness: tuple[int, ...]
    violated: bool

    def to_obj(self) -> dict:
        return {"n": self.n, "min_entry": str(self.min_entry),
                "witness": list(self.witness), "violated": self.violated}


@dataclass
class FamilyReport:
    n_min: int
    n_max: int
    sizes: list[SizeReport]
    first_violation: int | None
    disclaimer: str = UNDECIDED_DISCLAIMER

    @property
    def violation_found(self) -> bool:
        return self.first_violation is not None

    def to_obj(self) -> dict:
        return {
            "n_min": self.n_min,
            "n_max": self.n_max,
            "sizes": [s.to_obj() for s in self.sizes],
            "first_violation": self.first_violation,
            "violation_found": self.violation_found,
            "disclaimer": self.disclaimer,
        }


def _min_trace(f: LocalFamily, n: int, max_tuples: int) -> tuple[int, tuple[int, ...]]:
    """Exact minimum entry by depth-first search with cached prefix products."""
    if f.m ** (n + 1) > max_tuples:
        raise SizeTooLarge(f"{f.m}**{n + 1} tuples exceed {max_tuples}")
    mats = [f.transfer_matrix(j) for j in range(f.m)]
    best: list = [None, None]
    idx = [0] * (n + 1)

    def rec(depth: int, prefix):
        for j in range(f.m):
            idx[depth] = j
            prod_ = mats[j] if prefix is None else _mat_mul(prefix, mats[j], f.D)
            if depth == n:
                v = _trace(prod_, f.D)
                if best[0] is None or v < best[0]:
                    best[0] = v
                    best[1] = tuple(idx)
            else:
                rec(depth + 1, prod_)

    rec(0, None)
    return best[0], best[1]


def bounded_positivity_check(f: LocalFamily, n_max: int, n_min: int = 1,
                             max_tuples: int = DEFAULT_MAX_TUPLES) -> FamilyReport:
    """Check every size in [n_min, n_max] for a negative coefficient entry.

    A negative entry at size n certifies that the circle polynomial on n+1
    sites is neither nonnegative nor a sum of squares; absence of violations
    says nothing beyond the checked range (see the report disclaimer).
    """
    if n_min < 0 or n_max < n_min:
        raise ValueError("need 0 <= n_min <= n_max")
    sizes = []
    first = None
    for n in range(n_min, n_max + 1):
        lo, witness = _min_trace(f, n, max_tuples)
        violated = lo < 0
        sizes.append(SizeReport(n, lo, witness, violated))
        if violated and first is None:
            first = n
    return FamilyReport(n_min, n_max, sizes, first)
