"""Sampling-based approximate separable decompositions and polynomial norms.

Multi-homogeneous polynomials are measured by their supremum over products of
unit spheres, which the Gram picture bounds by the largest singular value of
any representing matrix. A normalized separable Gram witness can therefore be
replaced by an empirical mixture of a few of its terms: the sampling error in
Schatten-2 norm decays like the inverse square root of the number of draws,
so a fixed budget of order 1/eps^2 terms (times the group order after
symmetrization) suffices for any dimension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .blockpoly import FLOAT, BlockPolynomial
from .decomposition import OmegaGDecomposition, symmetrize_average
from .errors import (
    DimensionMismatch,
    NotHomogeneous,
    NotInvariant,
    NotNormalized,
)
from .positivity import GramRepresentation, gram_map_homogeneous, homogeneous_basis
from .symmetry import SymmetryAction, is_free
from .errors import ActionNotFree

MAUREY_CONSTANT = 8.0 * math.exp(4.0)


def sample_budget(epsilon: float) -> int:
    """Number of draws sufficient for Schatten-2 error epsilon: ceil(8e^4/eps^2)."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    return math.ceil(MAUREY_CONSTANT / epsilon**2)


def multihomogeneous_degree(p: BlockPolynomial) -> int:
    """The uniform per-site degree, or raise if sites or terms disagree."""
    if p.is_zero():
        return 0
    degs = {p.site_degrees(key) for key in p.terms}
    flat = {d for tup in degs for d in tup}
    if len(flat) != 1:
        raise NotHomogeneous(f"per-site degrees {sorted(flat)} are not uniform")
    return flat.pop()


def homogenize(p: BlockPolynomial, d: int | None = None) -> BlockPolynomial:
    """Pad every site block with a leading variable absorbing the missing degree."""
    if d is None:
        d = p.local_degree()
    if d < p.local_degree():
        raise ValueError(f"target degree {d} below local degree {p.local_degree()}")
    sites = tuple(m + 1 for m in p.sites)
    terms = {}
    for key, coeff in p.terms.items():
        new_key = tuple((d - sum(block),) + block for block in key)
        terms[new_key] = coeff
    return BlockPolynomial(sites, terms, p.mode)


def _normalize_site(vec: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(vec)
    if norm == 0.0:
        out = np.zeros_like(vec)
        out[0] = 1.0
        return out
    return vec / norm


def infinity_norm_lower(p: BlockPolynomial, samples: int = 512, seed: int = 0,
                        polish_iters: int = 200) -> float:
    """Certified lower bound on the sup of |p| over products of unit spheres.

    Random sphere points followed by projected coordinate ascent with step
    halving; the returned value is attained at an explicit feasible point.
    """
    multihomogeneous_degree(p)
    if p.is_zero():
        return 0.0
    pf = p.astype_float()
    rng = np.random.default_rng(seed)

    def value(point: list[np.ndarray]) -> float:
        return abs(pf.evaluate([tuple(v) for v in point]))

    best_point = None
    best = -1.0
    for _ in range(samples):
        point = [_normalize_site(rng.normal(size=m)) for m in p.sites]
        v = value(point)
        if v > best:
            best, best_point = v, point
    step = 0.5
    for _ in range(polish_iters):
        improved = False
        for site in range(len(p.sites)):
            for var in range(p.sites[site]):
                for sign in (1.0, -1.0):
                    trial = [v.copy() for v in best_point]
                    trial[site][var] += sign * step
                    trial[site] = _normalize_site(trial[site])
                    v = value(trial)
                    if v > best:
                        best, best_point = v, trial
                        improved = True
        if not improved:
            step *= 0.5
            if step < 1e-12:
                break
    return float(best)


def gram_norm_bounds(g: GramRepresentation) -> tuple[float, float]:
    """(largest singular value, Schatten-2 norm) of the Gram matrix."""
    eigs = np.linalg.eigvalsh(g.entries)
    sigma = float(np.abs(eigs).max(initial=0.0))
    schatten2 = float(np.linalg.norm(g.entries))
    return sigma, schatten2


class SeparableGram:
    """Gram matrix together with an explicit separable witness.

    The witness is a list of (weight, per-site PSD factors); the weighted
    Kronecker products must reconstruct the matrix.
    """

    def __init__(self, gram: GramRepresentation,
                 terms: Sequence[tuple[float, Sequence[np.ndarray]]],
                 tol: float = 1e-10, psd_tol: float = 1e-9):
        self.gram = gram
        V = gram.n + 1
        clean = []
        for weight, factors in terms:
            weight = float(weight)
            if weight <= 0:
                raise ValueError("witness weights must be positive")
            if len(factors) != V:
                raise DimensionMismatch(f"term needs {V} factors")
            mats = []
            for F in factors:
                F = np.asarray(F, dtype=float)
                if F.shape != (gram.D, gram.D):
                    raise DimensionMismatch(f"factor shape {F.shape} != {(gram.D, gram.D)}")
                if not np.allclose(F, F.T, atol=1e-10):
                    raise ValueError("witness factors must be symmetric")
                if np.linalg.eigvalsh(F).min() < -psd_tol * (1.0 + abs(np.trace(F))):
                    raise ValueError("witness factors must be PSD")
                mats.append(0.5 * (F + F.T))
            clean.append((weight, mats))
        self.terms = clean
        recon = self.reconstruct()
        scale = 1.0 + float(np.abs(gram.entries).max(initial=0.0))
        if not np.allclose(recon, gram.entries, atol=tol * scale):
            raise DimensionMismatch("witness does not reconstruct the Gram matrix")

    def reconstruct(self) -> np.ndarray:
        out = np.zeros_like(self.gram.entries)
        for weight, mats in self.terms:
            kron = mats[0]
            for F in mats[1:]:
                kron = np.kron(kron, F)
            out += weight * kron
        return out

    def trace(self) -> float:
        total = 0.0
        for weight, mats in self.terms:
            prod_ = 1.0
            for F in mats:
                prod_ *= float(np.trace(F))
            total += weight * prod_
        return total


def mu_upper(sg: SeparableGram) -> float:
    """Witness trace: an upper bound on the separable normalization constant."""
    return sg.trace()


def _site_form_poly(F: np.ndarray, m: int, d: int) -> BlockPolynomial:
    """Single-site quadratic form of F over the homogeneous degree-d basis."""
    basis = homogeneous_basis(m, d)
    terms: dict = {}
    for r, mr in enumerate(basis):
        for s, ms in enumerate(basis):
            c = F[r, s]
            if c == 0.0:
                continue
            key = (tuple(a + b for a, b in zip(mr, ms)),)
            terms[key] = terms.get(key, 0.0) + c
    return BlockPolynomial((m + 1,), terms, FLOAT)


@dataclass
class ApproxResult:
    decomposition: OmegaGDecomposition
    error_schatten2: float
    sample_budget: int
    index_budget: int
    terms_used: int
    approximant: np.ndarray

    def to_obj(self) -> dict:
        return {
            "budget": self.index_budget,
            "sample_budget": self.sample_budget,
            "terms_used": self.terms_used,
            "index_size": self.decomposition.index_size,
            "error_schatten2": self.error_schatten2,
        }


def _symmetrized(entries: np.ndarray, gram: GramRepresentation,
                 a: SymmetryAction) -> np.ndarray:
    acc = np.zeros_like(entries)
    for g in range(len(a)):
        perm = gram.permutation_array(a.vperm(g))
        out = np.empty_like(entries)
        out[np.ix_(perm, perm)] = entries
        acc += out
    return acc / len(a)


def empirical_matrix_error(sg: SeparableGram, k: int, rng: np.random.Generator,
                           a: SymmetryAction | None = None) -> float:
    """Schatten-2 error of a k-draw empirical mixture of the witness terms."""
    M = sg.gram.entries
    total = sg.trace()
    atoms = []
    probs = []
    for weight, mats in sg.terms:
        tr = 1.0
        for F in mats:
            tr *= float(np.trace(F))
        kron = mats[0]
        for F in mats[1:]:
            kron = np.kron(kron, F)
        atoms.append(total * kron / tr)
        probs.append(weight * tr / total)
    counts = rng.multinomial(k, np.asarray(probs) / sum(probs))
    N = sum(c * A for c, A in zip(counts, atoms)) / k
    if a is not None:
        N = _symmetrized(N, sg.gram, a)
    return float(np.linalg.norm(M - N))


def approx_separable(sg: SeparableGram, a: SymmetryAction, epsilon: float,
                     seed: int = 0) -> ApproxResult:
    """Invariant separable decomposition within epsilon of the witness matrix.

    Draws ceil(8e^4/eps^2) terms from the witness mixture (fewer terms are
    kept verbatim), averages, and symmetrizes over the free action. The index
    size is at most |G| times the draw budget, independent of the matrix
    dimension; the achieved Schatten-2 error is reported alongside.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if not is_free(a):
        raise ActionNotFree("approximation requires a free action")
    gram = sg.gram
    V = gram.n + 1
    if a.complex.vertex_count != V:
        raise DimensionMismatch("action vertex count differs from witness")
    total = sg.trace()
    if total > 1.0 + 1e-12:
        raise NotNormalized(f"witness trace {total} exceeds 1")
    M = gram.entries
    scale = 1.0 + float(np.abs(M).max(initial=0.0))
    if not np.allclose(_symmetrized(M, gram, a), M, atol=1e-9 * scale):
        raise NotInvariant("witness matrix is not invariant under the action")

    k = sample_budget(epsilon)
    rng = np.random.default_rng(seed)
    if len(sg.terms) <= k:
        used = [(w, mats) for w, mats in sg.terms]
    else:
        atoms = []
        probs = []
        for weight, mats in sg.terms:
            tr = 1.0
            for F in mats:
                tr *= float(np.trace(F))
            atoms.append((total / tr, mats))
            probs.append(weight * tr / total)
        counts = rng.multinomial(k, np.asarray(probs) / sum(probs))
        used = [(c / k * a0, mats) for c, (a0, mats) in zip(counts, atoms) if c > 0]

    N_hat = np.zeros_like(M)
    for w, mats in used:
        kron = mats[0]
        for F in mats[1:]:
            kron = np.kron(kron, F)
        N_hat += w * kron
    N = _symmetrized(N_hat, gram, a)
    error = float(np.linalg.norm(M - N))

    poly_terms = []
    for w, mats in used:
        factors = [_site_form_poly(F, gram.m, gram.d) for F in mats]
        factors[0] = factors[0].scaled(float(w))
        poly_terms.append(tuple(factors))
    dec = symmetrize_average(poly_terms, a)
    return ApproxResult(dec, error, k, k * len(a), len(used), N)


def approximant_polynomial(result: ApproxResult, gram: GramRepresentation) -> BlockPolynomial:
    """Homogeneous polynomial represented by the symmetrized approximant."""
    g = GramRepresentation(gram.n, gram.m, gram.d, result.approximant)
    return gram_map_homogeneous(g)
