"""Correspondence between tensors and squared-variable polynomials.

A tensor with equal axis dimensions embeds as the polynomial whose monomials
are products of squared single variables, one per site, with the tensor
entries as coefficients. Entrywise nonnegativity of the tensor then coincides
with both nonnegativity and the sum-of-squares property of the polynomial,
and tensor decompositions (plain, entrywise nonnegative, positive
semidefinite) match polynomial decompositions (plain, separable, sos) rank
for rank. Two stock families realize the known rank separations: squared
distance matrices and polygon slack matrices.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .blockpoly import FLOAT, RATIONAL, BlockPolynomial
from .complexes import WeightedComplex, standard_complex
from .decomposition import OmegaGDecomposition, bipartite_rank
from .errors import (
    DimensionMismatch,
    NotCanonicalForm,
    NotPSD,
    SearchSpaceTooLarge,
    VertexActionNotFree,
)
from .positivity import SosOmegaGDecomposition, psd_sqrt
from .symmetry import SymmetryAction

PLAIN = "plain"
NONNEGATIVE = "nonnegative"
PSD = "psd"


class DenseTensor:
    """Dense tensor with equal axis dimensions and exact or float entries."""

    def __init__(self, dims: Sequence[int], entries: Sequence, mode: str = RATIONAL):
        self.dims = tuple(int(d) for d in dims)
        size = math.prod(self.dims)
        flat = list(entries)
        if len(flat) != size:
            raise DimensionMismatch(f"expected {size} entries, got {len(flat)}")
        if mode == FLOAT:
            flat = [float(x) for x in flat]
        else:
            flat = [x if isinstance(x, (int, Fraction)) else Fraction(x) for x in flat]
        self.mode = mode
        self.entries = flat

    @classmethod
    def zeros(cls, dims: Sequence[int], mode: str = RATIONAL) -> "DenseTensor":
        return cls(dims, [0] * math.prod(tuple(dims)), mode)

    @property
    def order(self) -> int:
        return len(self.dims)

    def _flat(self, idx: Sequence[int]) -> int:
        pos = 0
        for i, d in zip(idx, self.dims):
            if not 0 <= i < d:
                raise IndexError(f"index {tuple(idx)} out of range for {self.dims}")
            pos = pos * d + i
        return pos

    def __getitem__(self, idx) -> object:
        if isinstance(idx, int):
            idx = (idx,)
        return self.entries[self._flat(idx)]

    def __setitem__(self, idx, value) -> None:
        if isinstance(idx, int):
            idx = (idx,)
        self.entries[self._flat(idx)] = value

    def indices(self) -> Iterable[tuple[int, ...]]:
        return product(*(range(d) for d in self.dims))

    def min_entry(self) -> tuple[object, tuple[int, ...]]:
        best = None
        arg = None
        for idx in self.indices():
            v = self[idx]
            if best is None or v < best:
                best, arg = v, idx
        return best, arg

    def __eq__(self, other) -> bool:
        if not isinstance(other, DenseTensor):
            return NotImplemented
        return self.dims == other.dims and all(
            a == b for a, b in zip(self.entries, other.entries))

    def allclose(self, other: "DenseTensor", tol: float = 1e-9) -> bool:
        if self.dims != other.dims:
            return False
        ref = max((abs(float(x)) for x in self.entries), default=0.0)
        return all(abs(float(a) - float(b)) <= tol * (1.0 + ref)
                   for a, b in zip(self.entries, other.entries))

    def to_numpy(self) -> np.ndarray:
        return np.array([float(x) for x in self.entries]).reshape(self.dims)

    def to_obj(self) -> dict:
        entries = [float(x) if self.mode == FLOAT else str(Fraction(x))
                   for x in self.entries]
        return {"dims": list(self.dims), "mode": self.mode, "entries": entries}

    @classmethod
    def from_obj(cls, obj: dict) -> "DenseTensor":
        mode = obj.get("mode", RATIONAL)
        entries = obj["entries"]
        if mode != FLOAT:
            entries = [Fraction(x) for x in entries]
        return cls(obj["dims"], entries, mode)


def poly_from_tensor(t: DenseTensor) -> BlockPolynomial:
    """Embed a tensor as a polynomial in squared single variables."""
    dims = set(t.dims)
    if len(dims) != 1:
        raise DimensionMismatch("axis dimensions must agree")
    m = dims.pop()
    sites = (m,) * t.order
    terms = {}
    for idx in t.indices():
        v = t[idx]
        if v == 0:
            continue
        key = tuple(tuple(2 if j == i else 0 for j in range(m)) for i in idx)
        terms[key] = v
    return BlockPolynomial(sites, terms, t.mode)


def tensor_from_poly(p: BlockPolynomial) -> DenseTensor:
    """Inverse embedding; requires every term to be a product of squared variables."""
    dims = set(p.sites)
    if len(dims) != 1:
        raise DimensionMismatch("all sites must have the same width")
    m = dims.pop()
    t = DenseTensor.zeros((m,) * len(p.sites), p.mode)
    for key, coeff in p.terms.items():
        idx = []
        for block in key:
            nz = [(j, e) for j, e in enumerate(block) if e]
            if len(nz) != 1 or nz[0][1] != 2:
                raise NotCanonicalForm(f"term block {block} is not a squared variable")
            idx.append(nz[0][0])
        t[tuple(idx)] = coeff
    return t


def tensor_positivity(t: DenseTensor) -> dict:
    """Entrywise nonnegativity, which settles both positivity notions of the
    embedded polynomial, with a witness entry when it fails."""
    lo, arg = t.min_entry()
    ok = lo >= 0
    return {"nonneg_entrywise": bool(ok), "min_entry": lo,
            "witness": None if ok else arg}


def _vector_poly(vec: Sequence, m: int, mode: str) -> BlockPolynomial:
    terms = {}
    for j, c in enumerate(vec):
        if c == 0:
            continue
        terms[(tuple(2 if i == j else 0 for i in range(m)),)] = c
    return BlockPolynomial((m,), terms, mode)


def _vector_from_local(p: BlockPolynomial) -> list:
    m = p.sites[0]
    vec = [Fraction(0) if p.mode == RATIONAL else 0.0] * m
    for (block,), coeff in p.terms.items():
        nz = [(j, e) for j, e in enumerate(block) if e]
        if len(nz) != 1 or nz[0][1] != 2:
            raise NotCanonicalForm(f"local term {block} is not a squared variable")
        vec[nz[0][0]] = coeff
    return vec


class TensorDecomposition:
    """Invariant decompositions of tensors: plain, nonnegative, or psd."""

    def __init__(self, variant: str, complex_: WeightedComplex,
                 action: SymmetryAction | None, index_size: int, axis_dim: int,
                 vectors: dict | None = None, psd_mats: dict | None = None):
        if variant not in (PLAIN, NONNEGATIVE, PSD):
            raise ValueError(f"unknown variant {variant!r}")
        self.variant = variant
        self.complex = complex_
        self.action = action
        self.index_size = int(index_size)
        self.axis_dim = int(axis_dim)
        self.vectors = {}
        self.psd_mats = {}
        if variant in (PLAIN, NONNEGATIVE):
            for (site, beta), vec in (vectors or {}).items():
                vec = tuple(vec)
                if len(vec) != self.axis_dim:
                    raise DimensionMismatch("vector length differs from axis dimension")
                if variant == NONNEGATIVE and any(float(x) < 0 for x in vec):
                    raise NotCanonicalForm("nonnegative variant needs entrywise >= 0 vectors")
                if any(x != 0 for x in vec):
                    self.vectors[(site, tuple(beta))] = vec
        else:
            for (site, j), mat in (psd_mats or {}).items():
                self.psd_mats[(site, int(j))] = {
                    (tuple(b1), tuple(b2)): v for (b1, b2), v in mat.items() if v != 0}

    def beta_grid(self, site: int) -> list[tuple[int, ...]]:
        width = len(self.complex.label_positions_at(site))
        return list(product(range(1, self.index_size + 1), repeat=width))

    def contract(self, max_assignments: int = 10**6) -> DenseTensor:
        c = self.complex
        V = c.vertex_count
        L = c.label_count
        m = self.axis_dim
        positions = [c.label_positions_at(i) for i in range(V)]
        exact = True
        if self.variant in (PLAIN, NONNEGATIVE):
            exact = all(not isinstance(x, float) for vec in self.vectors.values() for x in vec)
        else:
            exact = all(not isinstance(v, float)
                        for mat in self.psd_mats.values() for v in mat.values())
        t = DenseTensor.zeros((m,) * V, RATIONAL if exact else FLOAT)
        if self.variant in (PLAIN, NONNEGATIVE):
            if self.index_size**L > max_assignments:
                raise SearchSpaceTooLarge("assignment enumeration too large")
            for alpha in product(range(1, self.index_size + 1), repeat=L):
                vecs = []
                for i in range(V):
                    beta = tuple(alpha[p] for p in positions[i])
                    vec = self.vectors.get((i, beta))
                    if vec is None:
                        break
                    vecs.append(vec)
                else:
                    for idx in t.indices():
                        prod_ = 1
                        for i, j in enumerate(idx):
                            prod_ = prod_ * vecs[i][j]
                            if prod_ == 0:
                                break
                        if prod_ != 0:
                            t[idx] = t[idx] + prod_
            return t
        if self.index_size ** (2 * L) > max_assignments:
            raise SearchSpaceTooLarge("assignment-pair enumeration too large")
        for alpha in product(range(1, self.index_size + 1), repeat=L):
            for alpha2 in product(range(1, self.index_size + 1), repeat=L):
                betas = [(tuple(alpha[p] for p in positions[i]),
                          tuple(alpha2[p] for p in positions[i])) for i in range(V)]
                for idx in t.indices():
                    prod_ = 1
                    for i, j in enumerate(idx):
                        mat = self.psd_mats.get((i, j))
                        v = 0 if mat is None else mat.get(betas[i], 0)
                        prod_ = prod_ * v
                        if prod_ == 0:
                            break
                    if prod_ != 0:
                        t[idx] = t[idx] + prod_
        return t

    def check_symmetry(self, tol: float = 1e-9) -> bool:
        a = self.action
        if a is None or len(a) == 1:
            return True
        if self.variant in (PLAIN, NONNEGATIVE):
            for (site, beta), vec in self.vectors.items():
                for g in range(len(a)):
                    gi, gbeta = a.beta_image(g, site, beta)
                    other = self.vectors.get((gi, gbeta), (0,) * self.axis_dim)
                    if any(abs(float(x) - float(y)) > tol for x, y in zip(vec, other)):
                        return False
            return True
        for (site, j), mat in self.psd_mats.items():
            for g in range(len(a)):
                gi = a.vertex_image(g, site)
                target = self.psd_mats.get((gi, j), {})
                for (b1, b2), v in mat.items():
                    _, gb1 = a.beta_image(g, site, b1)
                    _, gb2 = a.beta_image(g, site, b2)
                    if abs(float(target.get((gb1, gb2), 0)) - float(v)) > tol:
                        return False
        return True

    def psd_matrix(self, site: int, j: int) -> np.ndarray:
        grid = self.beta_grid(site)
        pos = {b: i for i, b in enumerate(grid)}
        mat = np.zeros((len(grid), len(grid)))
        for (b1, b2), v in self.psd_mats.get((site, j), {}).items():
            mat[pos[b1], pos[b2]] = float(v)
        return mat

    def check_psd(self, tol: float = 1e-9) -> bool:
        if self.variant != PSD:
            return True
        for (site, j) in self.psd_mats:
            mat = self.psd_matrix(site, j)
            if not np.allclose(mat, mat.T, atol=tol):
                return False
            if np.linalg.eigvalsh(0.5 * (mat + mat.T)).min() < -tol * (1.0 + np.trace(mat)):
                return False
        return True


def tensor_dec_to_poly_dec(td: TensorDecomposition):
    """Polynomial-side counterpart with the same index set.

    Plain and nonnegative variants map vectors to squared-variable locals.
    The psd variant produces an sos family decomposition by splitting each
    matrix symmetrically, which forces equal factors along vertex orbits and
    therefore needs the vertex action to be free.
    """
    m = td.axis_dim
    V = td.complex.vertex_count
    if td.variant in (PLAIN, NONNEGATIVE):
        mode = RATIONAL if all(not isinstance(x, float)
                               for vec in td.vectors.values() for x in vec) else FLOAT
        locals_: dict[int, dict] = {}
        for (site, beta), vec in td.vectors.items():
            locals_.setdefault(site, {})[beta] = _vector_poly(vec, m, mode)
        return OmegaGDecomposition(td.complex, td.action, td.index_size,
                                   (m,) * V, locals_)
    a = td.action
    if a is not None:
        for g in range(1, len(a)):
            if any(a.vertex_image(g, i) == i for i in range(V)):
                raise VertexActionNotFree(
                    "symmetric factor split needs a free vertex action")
    if not td.check_psd():
        raise NotPSD("psd decomposition has a non-psd matrix")
    # factor orbit representatives, then copy factors along the orbit
    site_reps = {}
    if a is None:
        orbits = [[i] for i in range(V)]
    else:
        orbits = a.vertex_orbits()
    factors: dict[tuple, np.ndarray] = {}
    grids = {i: td.beta_grid(i) for i in range(V)}
    kmax = 0
    for orbit in orbits:
        rep = orbit[0]
        for j in range(m):
            B = psd_sqrt(td.psd_matrix(rep, j))
            factors[(rep, j)] = B
            kmax = max(kmax, B.shape[0])
            if a is not None:
                pos = {b: idx for idx, b in enumerate(grids[rep])}
                for g in range(len(a)):
                    gi = a.vertex_image(g, rep)
                    if (gi, j) in factors:
                        continue
                    Bg = np.zeros((B.shape[0], len(grids[gi])))
                    gpos = {b: idx for idx, b in enumerate(grids[gi])}
                    for b, col in pos.items():
                        _, gb = a.beta_image(g, rep, b)
                        Bg[:, gpos[gb]] = B[:, col]
                    factors[(gi, j)] = Bg
    member_values = [(j, k) for j in range(m) for k in range(kmax)]
    locals_: dict[tuple, BlockPolynomial] = {}
    for i in range(V):
        gpos = {b: idx for idx, b in enumerate(grids[i])}
        for j in range(m):
            B = factors[(i, j)]
            for beta, col in gpos.items():
                for k in range(B.shape[0]):
                    coeff = B[k, col]
                    if abs(coeff) < 1e-14:
                        continue
                    mono = BlockPolynomial((m,), {(tuple(1 if t == j else 0
                                                         for t in range(m)),): coeff}, FLOAT)
                    locals_[(i, (j, k), beta)] = mono
    return SosOmegaGDecomposition(td.complex, a, td.index_size, (m,) * V,
                                  tuple(tuple(member_values) for _ in range(V)), locals_)


def poly_dec_to_tensor_dec(dec, variant: str) -> TensorDecomposition:
    """Tensor-side counterpart; locals must be in the matching canonical form."""
    if variant in (PLAIN, NONNEGATIVE):
        if not isinstance(dec, OmegaGDecomposition):
            raise TypeError("plain/nonnegative conversion expects a polynomial decomposition")
        m = dec.site_vars[0]
        if any(v != m for v in dec.site_vars):
            raise DimensionMismatch("all sites must share one width")
        vectors = {}
        for site, mapping in dec.locals.items():
            for beta, poly in mapping.items():
                vec = _vector_from_local(poly.scale_mul(dec.scale).as_polynomial()
                                         if poly.mode == RATIONAL and dec.scale.is_rational
                                         else poly.scale_mul(dec.scale).to_float())
                vectors[(site, beta)] = tuple(vec)
        return TensorDecomposition(variant, dec.complex, dec.action,
                                   dec.index_size, m, vectors=vectors)
    if variant != PSD:
        raise ValueError(f"unknown variant {variant!r}")
    if not isinstance(dec, SosOmegaGDecomposition):
        raise TypeError("psd conversion expects an sos family decomposition")
    m = dec.site_vars[0]
    V = dec.complex.vertex_count
    rows: dict[int, list] = {i: sorted({k for (site, k, _) in dec.locals if site == i},
                                       key=repr) for i in range(V)}
    psd_mats: dict[tuple, dict] = {}
    for i in range(V):
        grid = list(product(range(1, dec.index_size + 1),
                            repeat=len(dec.complex.label_positions_at(i))))
        B = {j: np.zeros((len(rows[i]), len(grid))) for j in range(m)}
        gpos = {b: idx for idx, b in enumerate(grid)}
        kpos = {k: idx for idx, k in enumerate(rows[i])}
        for (site, k, beta), poly in dec.locals.items():
            if site != i:
                continue
            p = poly.scale_mul(dec.scale).to_float()
            for (block,), coeff in p.terms.items():
                nz = [(j, e) for j, e in enumerate(block) if e]
                if len(nz) != 1 or nz[0][1] != 1:
                    raise NotCanonicalForm("psd conversion needs linear locals")
                B[nz[0][0]][kpos[k], gpos[beta]] += coeff
        for j in range(m):
            E = B[j].T @ B[j]
            mat = {}
            for r, b1 in enumerate(grid):
                for s, b2 in enumerate(grid):
                    if E[r, s] != 0.0:
                        mat[(b1, b2)] = float(E[r, s])
            psd_mats[(i, j)] = mat
    return TensorDecomposition(PSD, dec.complex, dec.action, dec.index_size, m,
                               psd_mats=psd_mats)


def convert(dec, direction: str, variant: str | None = None):
    """Dispatch between tensor-side and polynomial-side decompositions."""
    if direction == "tensor->poly":
        if not isinstance(dec, TensorDecomposition):
            raise TypeError("tensor->poly expects a TensorDecomposition")
        return tensor_dec_to_poly_dec(dec)
    if direction == "poly->tensor":
        if variant is None:
            variant = PSD if isinstance(dec, SosOmegaGDecomposition) else PLAIN
        return poly_dec_to_tensor_dec(dec, variant)
    raise ValueError(f"unknown direction {direction!r}")


def distance_matrix(m: int) -> DenseTensor:
    """Order-2 tensor of squared index differences, sized m x m."""
    if m < 2:
        raise ValueError("need m >= 2")
    t = DenseTensor.zeros((m, m))
    for i in range(m):
        for j in range(m):
            t[(i, j)] = (i - j) ** 2
    return t


def psd_distance_factorization(m: int) -> TensorDecomposition:
    """Index-2 psd decomposition of the distance matrix on the single edge.

    Site-0 matrices are the rank-one squares of (1, i), site-1 matrices of
    (j, -1); their pairings contract to (i - j)^2 exactly.
    """
    if m < 2:
        raise ValueError("need m >= 2")
    c = standard_complex("single_edge")
    betas = [(1,), (2,)]
    psd_mats: dict[tuple, dict] = {}
    for j in range(m):
        v0 = (1, j + 1)
        v1 = (j + 1, -1)
        psd_mats[(0, j)] = {(betas[r], betas[s]): v0[r] * v0[s]
                            for r in range(2) for s in range(2)}
        psd_mats[(1, j)] = {(betas[r], betas[s]): v1[r] * v1[s]
                            for r in range(2) for s in range(2)}
    return TensorDecomposition(PSD, c, None, 2, m, psd_mats=psd_mats)


def polygon_slack(m: int) -> DenseTensor:
    """Slack matrix of the regular m-gon: edge offsets minus edge-vertex products."""
    if m < 3:
        raise ValueError("need m >= 3")
    verts = [(math.cos(2 * math.pi * j / m), math.sin(2 * math.pi * j / m))
             for j in range(m)]
    t = DenseTensor.zeros((m, m), FLOAT)
    for i in range(m):
        vx, vy = verts[i]
        wx, wy = verts[(i + 1) % m]
        ax, ay = (vx + wx) / 2.0, (vy + wy) / 2.0
        b = ax * vx + ay * vy
        for j in range(m):
            t[(i, j)] = b - (ax * verts[j][0] + ay * verts[j][1])
    return t


def numeric_rank(mat: np.ndarray, rel_tol: float = 1e-8) -> int:
    s = np.linalg.svd(mat, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int((s > rel_tol * s[0]).sum())


def distance_nn_lower_bound(m: int) -> int:
    """Rectangle-covering bound for the distance matrix: ceil(log2 m)."""
    if m < 1:
        raise ValueError("need m >= 1")
    return (m - 1).bit_length()


def nn_rank_upper_bound(mat: np.ndarray, restarts: int = 50, iters: int = 400,
                        rel_tol: float = 1e-6, seed: int = 0) -> int:
    """Smallest inner dimension at which multiplicative updates reached the
    matrix within tolerance; an upper bound only, never the exact rank."""
    mat = np.asarray(mat, dtype=float)
    if (mat < 0).any():
        raise ValueError("matrix must be entrywise nonnegative")
    rows, cols = mat.shape
    norm = np.linalg.norm(mat)
    if norm == 0.0:
        return 0
    rng = np.random.default_rng(seed)
    eps = 1e-12
    for r in range(1, min(rows, cols)):
        for _ in range(restarts):
            W = rng.random((rows, r)) + 0.1
            H = rng.random((r, cols)) + 0.1
            for _ in range(iters):
                H *= (W.T @ mat) / (W.T @ W @ H + eps)
                W *= (mat @ H.T) / (W @ H @ H.T + eps)
            if np.linalg.norm(mat - W @ H) <= rel_tol * norm:
                return r
    return min(rows, cols)


def separations_report(m: int, seed: int = 0, with_nn_upper: bool = True) -> dict:
    """Rank profile of the distance-matrix instance of size m."""
    t = distance_matrix(m)
    p = poly_from_tensor(t)
    rank = bipartite_rank(p)
    fact = psd_distance_factorization(m)
    psd_ok = fact.contract() == t
    report = {
        "m": m,
        "bipartite_rank": rank,
        "psd_index": fact.index_size,
        "psd_verified": bool(psd_ok),
        "nn_lower_bound": distance_nn_lower_bound(m),
    }
    if with_nn_upper:
        report["nn_upper_bound"] = nn_rank_upper_bound(t.to_numpy(), seed=seed)
    return report
