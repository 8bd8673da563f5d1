"""Positivity-certified decompositions: Gram matrices, sos families, cones.

The Gram map sends a symmetric matrix indexed by tensor products of local
monomial bases to a polynomial; positive semidefinite Gram matrices certify
sums of squares. Invariant PSD matrices yield invariant sos families through
the PSD square root, and free actions turn those families into invariant
decompositions. Separable witnesses (all locals in prescribed local cones)
convert to sos witnesses when the overcount constants of the pair
(complex, action) admit a positive invariant splitting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .blockpoly import FLOAT, RATIONAL, BlockPolynomial
from .complexes import WeightedComplex, is_connected
from .decomposition import (
    DEFAULT_MAX_WORK,
    OmegaGDecomposition,
    contract_assignments,
    symmetrize_free,
)
from .errors import (
    ActionNotFree,
    DimensionMismatch,
    FactorNotInCone,
    LocalsNotAligned,
    MissingCertificate,
    MissingSquareSplits,
    NotConnected,
    NotFactorizable,
    NotInvariantPolynomial,
    NotPSD,
    SearchSpaceTooLarge,
)
from .invariance import is_invariant
from .radpoly import RadPoly, rad_outer
from .scalars import ONE, ScaledScalar
from .symmetry import SymmetryAction, is_free, linearizer

DEFAULT_PSD_TOL = 1e-9
DEFAULT_EQ_TOL = 1e-9


def monomials_upto(m: int, d: int) -> list[tuple[int, ...]]:
    """Exponent vectors in m variables of total degree at most d, graded lex."""
    out: list[tuple[int, ...]] = []

    def rec(prefix: tuple[int, ...], remaining: int, slots: int):
        if slots == 0:
            out.append(prefix)
            return
        for e in range(remaining + 1):
            rec(prefix + (e,), remaining - e, slots - 1)

    rec((), d, m)
    out.sort(key=lambda a: (sum(a), a))
    return out


class GramRepresentation:
    """Symmetric matrix over the tensor product of per-site monomial bases."""

    def __init__(self, n: int, m: int, d: int, entries):
        self.n = int(n)
        self.m = int(m)
        self.d = int(d)
        self.local_basis = monomials_upto(self.m, self.d)
        self.D = len(self.local_basis)
        dim = self.D ** (self.n + 1)
        mat = np.asarray(entries, dtype=float)
        if mat.shape == (dim * dim,):
            mat = mat.reshape(dim, dim)
        if mat.shape != (dim, dim):
            raise DimensionMismatch(f"expected {dim}x{dim} entries, got {mat.shape}")
        if not np.allclose(mat, mat.T, atol=1e-12 * (1.0 + float(np.abs(mat).max(initial=0.0)))):
            raise DimensionMismatch("Gram entries must be symmetric")
        self.entries = 0.5 * (mat + mat.T)

    @property
    def sites(self) -> tuple[int, ...]:
        return (self.m,) * (self.n + 1)

    @property
    def dim(self) -> int:
        return self.D ** (self.n + 1)

    def index_tuples(self) -> list[tuple[tuple[int, ...], ...]]:
        """Row/column labels: one local monomial per site, site 0 outermost."""
        return [tuple(K) for K in product(self.local_basis, repeat=self.n + 1)]

    def flat_index(self, K: Sequence[tuple[int, ...]]) -> int:
        pos = 0
        lookup = {mono: i for i, mono in enumerate(self.local_basis)}
        for mono in K:
            pos = pos * self.D + lookup[tuple(mono)]
        return pos

    def permutation_array(self, vperm: Sequence[int]) -> np.ndarray:
        """perm[flat(K)] = flat(gK) where gK places site i's entry at vperm[i]."""
        V = self.n + 1
        tuples = self.index_tuples()
        lookup = {mono: i for i, mono in enumerate(self.local_basis)}
        perm = np.empty(len(tuples), dtype=int)
        for flat, K in enumerate(tuples):
            gK = [None] * V
            for i, mono in enumerate(K):
                gK[vperm[i]] = mono
            pos = 0
            for mono in gK:
                pos = pos * self.D + lookup[mono]
            perm[flat] = pos
        return perm

    def permuted(self, vperm: Sequence[int]) -> "GramRepresentation":
        perm = self.permutation_array(vperm)
        out = np.empty_like(self.entries)
        out[np.ix_(perm, perm)] = self.entries
        return GramRepresentation(self.n, self.m, self.d, out)

    def to_obj(self) -> dict:
        return {"n": self.n, "m": self.m, "d": self.d,
                "entries": [float(x) for x in self.entries.reshape(-1)]}

    @classmethod
    def from_obj(cls, obj: dict) -> "GramRepresentation":
        return cls(obj["n"], obj["m"], obj["d"], obj["entries"])


def gram_map(g: GramRepresentation) -> BlockPolynomial:
    """The polynomial m^t M m over the inhomogeneous monomial bases."""
    tuples = g.index_tuples()
    terms: dict = {}
    mat = g.entries
    for r, Kr in enumerate(tuples):
        for s, Ks in enumerate(tuples):
            coeff = mat[r, s]
            if coeff == 0.0:
                continue
            key = tuple(tuple(a + b for a, b in zip(mr, ms)) for mr, ms in zip(Kr, Ks))
            terms[key] = terms.get(key, 0.0) + coeff
    return BlockPolynomial(g.sites, terms, FLOAT)


def homogeneous_basis(m: int, d: int) -> list[tuple[int, ...]]:
    """Degree-d monomials in m+1 variables, ordered like their dehomogenizations."""
    return [(d - sum(mono),) + mono for mono in monomials_upto(m, d)]


def gram_map_homogeneous(g: GramRepresentation) -> BlockPolynomial:
    """The polynomial of the Gram matrix over homogenized per-site bases.

    Each site gets one extra leading variable absorbing the missing degree, so
    the result is multi-homogeneous of local degree 2d in m+1 variables.
    """
    basis = homogeneous_basis(g.m, g.d)
    V = g.n + 1
    tuples = list(product(basis, repeat=V))
    terms: dict = {}
    mat = g.entries
    for r, Kr in enumerate(tuples):
        for s, Ks in enumerate(tuples):
            coeff = mat[r, s]
            if coeff == 0.0:
                continue
            key = tuple(tuple(a + b for a, b in zip(mr, ms)) for mr, ms in zip(Kr, Ks))
            terms[key] = terms.get(key, 0.0) + coeff
    return BlockPolynomial((g.m + 1,) * V, terms, FLOAT)


def is_gram_invariant(g: GramRepresentation, a: SymmetryAction, tol: float = 1e-9) -> bool:
    base = g.entries
    scale = 1.0 + float(np.abs(base).max(initial=0.0))
    for gi in range(len(a)):
        if not np.allclose(g.permuted(a.vperm(gi)).entries, base, atol=tol * scale):
            return False
    return True


def gram_symmetrize(g: GramRepresentation, a: SymmetryAction,
                    tol: float = DEFAULT_EQ_TOL) -> GramRepresentation:
    """Average the Gram matrix over the group; the represented polynomial is kept.

    Valid only when that polynomial is invariant, otherwise the average would
    represent a different polynomial.
    """
    if a.complex.vertex_count != g.n + 1:
        raise DimensionMismatch("action vertex count differs from Gram site count")
    p = gram_map(g)
    if not is_invariant(p, a, tol):
        raise NotInvariantPolynomial("Gram matrix represents a non-invariant polynomial")
    acc = np.zeros_like(g.entries)
    for gi in range(len(a)):
        acc += g.permuted(a.vperm(gi)).entries
    return GramRepresentation(g.n, g.m, g.d, acc / len(a))


def psd_floor(g: GramRepresentation, tol: float = DEFAULT_PSD_TOL) -> float:
    """Smallest eigenvalue relative to the acceptance threshold -tol*(1+trace)."""
    return float(np.linalg.eigvalsh(g.entries).min())


def assert_psd(g: GramRepresentation, tol: float = DEFAULT_PSD_TOL) -> None:
    lo = psd_floor(g)
    bound = -tol * (1.0 + abs(float(np.trace(g.entries))))
    if lo < bound:
        raise NotPSD(f"minimum eigenvalue {lo} below {bound}")


def psd_sqrt(mat: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(mat)
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.T


@dataclass
class ConeVerdict:
    cone: str
    ok: bool | None
    verdict: str
    witness: object = None

    def to_obj(self) -> dict:
        w = self.witness
        if isinstance(w, tuple):
            w = [list(map(float, block)) for block in w]
        return {"cone": self.cone, "ok": self.ok, "verdict": self.verdict, "witness": w}


def evidently_sos(p: BlockPolynomial) -> bool:
    """Sufficient syntactic sos test: nonnegative coefficients, even exponents."""
    for key, coeff in p.terms.items():
        if float(coeff) < 0:
            return False
        for block in key:
            if any(e % 2 for e in block):
                return False
    return True


def cone_check(p: BlockPolynomial, cone: str, certificate: GramRepresentation | None = None,
               samples: int = 256, seed: int = 0, psd_tol: float = DEFAULT_PSD_TOL,
               eq_tol: float = DEFAULT_EQ_TOL) -> ConeVerdict:
    """Membership check for one of the supported positivity cones.

    nn_coeff is decided exactly; sos_with_certificate validates a supplied
    Gram certificate; nonnegative_sampled only ever reports a found
    counterexample or the absence of one, never a proof.
    """
    if cone == "nn_coeff":
        bad = [(key, c) for key, c in p.terms.items() if float(c) < 0]
        ok = not bad
        return ConeVerdict(cone, ok, "all-coefficients-nonnegative" if ok
                           else "negative-coefficient", bad[0][0] if bad else None)
    if cone == "sos_with_certificate":
        if certificate is None:
            raise MissingCertificate("sos check needs a Gram certificate")
        lo = psd_floor(certificate)
        bound = -psd_tol * (1.0 + abs(float(np.trace(certificate.entries))))
        if lo < bound:
            return ConeVerdict(cone, False, "certificate-not-psd", lo)
        represented = gram_map(certificate)
        if not represented.allclose(p.astype_float(), eq_tol):
            return ConeVerdict(cone, False, "certificate-mismatch")
        return ConeVerdict(cone, True, "sos-certified")
    if cone == "nonnegative_sampled":
        rng = np.random.default_rng(seed)
        pf = p.astype_float()
        for _ in range(samples):
            point = tuple(tuple(rng.normal(scale=s) for _ in range(mv))
                          for mv, s in zip(p.sites, rng.choice([0.3, 1.0, 3.0], size=len(p.sites))))
            if pf.evaluate(point) < -1e-12:
                return ConeVerdict(cone, False, "counterexample-found", point)
        return ConeVerdict(cone, None, "no-counterexample-found")
    raise ValueError(f"unknown cone {cone!r}")


@dataclass
class SosFamily:
    """An indexed family of polynomials whose squares sum to the target."""

    sites: tuple[int, ...]
    site_index: tuple[tuple, ...]
    polys: dict = field(default_factory=dict)

    def grid(self) -> Iterable[tuple]:
        return product(*self.site_index)

    def member(self, K: tuple) -> BlockPolynomial:
        p = self.polys.get(tuple(K))
        if p is None:
            return BlockPolynomial.zero(self.sites, FLOAT)
        return p

    def sum_squares(self) -> BlockPolynomial:
        acc = BlockPolynomial.zero(self.sites, FLOAT)
        for q in self.polys.values():
            acc = acc + q * q
        return acc

    def family_invariant(self, a: SymmetryAction, tol: float = 1e-9) -> bool:
        """Check the permuted member at gK matches the block-moved member at K."""
        for g in range(len(a)):
            vperm = a.vperm(g)
            for K in self.grid():
                gK = [None] * len(self.sites)
                for i, k in enumerate(K):
                    gK[vperm[i]] = k
                if not self.member(tuple(gK)).allclose(self.member(K).act(vperm), tol):
                    return False
        return True


def invariant_sos_family(g: GramRepresentation, a: SymmetryAction,
                         tol: float = DEFAULT_PSD_TOL) -> SosFamily:
    """Invariant family of polynomials squaring to the Gram polynomial.

    Rows of the PSD square root of the (invariant, PSD) Gram matrix against
    the monomial vector give the members; invariance of the square root is
    inherited from the matrix.
    """
    if a.complex.vertex_count != g.n + 1:
        raise DimensionMismatch("action vertex count differs from Gram site count")
    assert_psd(g, tol)
    if not is_gram_invariant(g, a, max(tol, 1e-9)):
        raise NotInvariantPolynomial("Gram matrix is not invariant under the action")
    B = psd_sqrt(g.entries)
    tuples = g.index_tuples()
    site_index = tuple(tuple(g.local_basis) for _ in range(g.n + 1))
    polys = {}
    for r, K in enumerate(tuples):
        terms = {}
        for s, Ks in enumerate(tuples):
            c = B[r, s]
            if c != 0.0:
                terms[tuple(tuple(e) for e in Ks)] = c
        q = BlockPolynomial(g.sites, terms, FLOAT)
        if not q.is_zero():
            polys[tuple(tuple(e) for e in K)] = q
    return SosFamily(g.sites, site_index, polys)


class SosOmegaGDecomposition:
    """Invariant decomposition of a whole family, sharing one index set.

    Locals are keyed by (site, member index at that site, assignment); the
    member for a grid point K contracts the site-i locals with member index
    K[i]. Joint symmetry moves the assignment but keeps the member index.
    """

    def __init__(self, complex_: WeightedComplex, action: SymmetryAction | None,
                 index_size: int, site_vars: Sequence[int],
                 site_index: Sequence[Sequence], locals_: Mapping,
                 scale: ScaledScalar = ONE):
        self.complex = complex_
        self.action = action
        self.index_size = int(index_size)
        self.site_vars = tuple(int(v) for v in site_vars)
        self.site_index = tuple(tuple(s) for s in site_index)
        self.scale = scale
        self.locals: dict[tuple, RadPoly] = {}
        for (site, k, beta), poly in locals_.items():
            rp = RadPoly.coerce(poly)
            if rp.is_zero():
                continue
            beta = tuple(int(b) for b in beta)
            width = len(complex_.label_positions_at(site))
            if len(beta) != width or any(not 1 <= b <= self.index_size for b in beta):
                raise ValueError(f"bad assignment {beta} at site {site}")
            self.locals[(site, k, beta)] = rp

    def member_locals(self, K: Sequence) -> dict[int, dict[tuple, RadPoly]]:
        out: dict[int, dict[tuple, RadPoly]] = {}
        for (site, k, beta), poly in self.locals.items():
            if k == K[site]:
                out.setdefault(site, {})[beta] = poly
        return out

    def member(self, K: Sequence, max_work: int = DEFAULT_MAX_WORK) -> RadPoly:
        raw = contract_assignments(self.complex, self.index_size,
                                   self.member_locals(K), self.site_vars, max_work)
        return raw.scale_mul(self.scale ** self.complex.vertex_count)

    def grid(self) -> Iterable[tuple]:
        return product(*self.site_index)

    def sum_squares(self, max_work: int = DEFAULT_MAX_WORK) -> RadPoly:
        acc = RadPoly.zero(self.site_vars)
        for K in self.grid():
            q = self.member(K, max_work)
            if not q.is_zero():
                acc = acc + q * q
        return acc

    def check_joint_symmetry(self, tol: float = 1e-9) -> bool:
        if self.action is None or len(self.action) == 1:
            return True
        a = self.action
        exact = all(p.mode == RATIONAL for p in self.locals.values())
        for (site, k, beta), poly in self.locals.items():
            for g in range(len(a)):
                gi, gbeta = a.beta_image(g, site, beta)
                other = self.locals.get((gi, k, gbeta))
                if other is None:
                    other = RadPoly.zero((self.site_vars[gi],),
                                         RATIONAL if exact else FLOAT)
                if exact:
                    if not poly == other:
                        return False
                elif not poly.allclose(other, tol):
                    return False
        return True


def family_symmetrize(family: SosFamily, a: SymmetryAction,
                      local_factors: Mapping, tol: float = 1e-9) -> SosOmegaGDecomposition:
    """Invariant decomposition of an invariant family from aligned elementary data.

    local_factors maps (site, member index, term index) to a single-site
    polynomial such that each family member is the sum over the term index of
    the per-site products; the site-i factor may depend on the member only
    through its i-th component. Free actions then admit the index extension by
    group elements, exactly as for single polynomials.
    """
    c = a.complex
    if not is_connected(c):
        raise NotConnected("family symmetrization requires a connected complex")
    if not is_free(a):
        raise ActionNotFree("family symmetrization requires a free action")
    V = c.vertex_count
    if V != len(family.sites):
        raise DimensionMismatch("family site count differs from complex")
    term_ids = sorted({j for (_, _, j) in local_factors})
    if not term_ids:
        raise LocalsNotAligned("no factors supplied")

    def factor(i: int, k, j) -> BlockPolynomial:
        p = local_factors.get((i, k, j))
        if p is None:
            return BlockPolynomial.zero((family.sites[i],), FLOAT)
        return p

    for K in family.grid():
        acc = RadPoly.zero(family.sites, FLOAT)
        for j in term_ids:
            term = [RadPoly.coerce(factor(i, K[i], j)) for i in range(V)]
            acc = acc + rad_outer(term)
        if not acc.allclose(RadPoly.from_poly(family.member(K)), tol):
            raise LocalsNotAligned(f"factors fail to reconstruct member {K}")

    z = linearizer(a)
    order = len(a)
    jpos = {j: idx for idx, j in enumerate(term_ids)}

    def encode(j, g: int) -> int:
        return jpos[j] * order + g + 1

    locals_: dict[tuple, object] = {}
    for i in range(V):
        positions = c.label_positions_at(i)
        for g in range(order):
            gi = a.vertex_image(g, i)
            selector = tuple(a.mul(g, z[pos]) for pos in positions)
            for j in term_ids:
                for k in family.site_index[i]:
                    p = factor(gi, k, j)
                    if p.is_zero():
                        continue
                    beta = tuple(encode(j, h) for h in selector)
                    locals_[(i, k, beta)] = p
    scale = ScaledScalar(Fraction(1, order), V)
    return SosOmegaGDecomposition(c, a, len(term_ids) * order,
                                  [family.sites[i] for i in range(V)],
                                  family.site_index, locals_, scale)


def separable_symmetrize(terms: Sequence[Sequence[object]], a: SymmetryAction,
                         factor_check: Callable[[BlockPolynomial], bool] | None = None
                         ) -> OmegaGDecomposition:
    """Free-action symmetrization with every factor checked against its cone.

    The construction only rescales and rearranges factors by positive amounts,
    so cone membership of the inputs carries to every non-zero local of the
    output.
    """
    check = factor_check or evidently_sos
    for j, term in enumerate(terms):
        for i, f in enumerate(term):
            rp = RadPoly.coerce(f)
            for _, p in rp.parts:
                if not check(p):
                    raise FactorNotInCone(f"term {j}, site {i} fails the cone check")
    return symmetrize_free(terms, a)


@dataclass
class FactorizabilitySolution:
    """Positive invariant splitting of the assignment overcount constants."""

    index_size: int
    values: dict
    residual: float
    counts: dict

    def C(self, site: int, beta: tuple) -> float:
        return self.values[(site, tuple(beta))]


def factorizability_solve(c: WeightedComplex, a: SymmetryAction, index_size: int,
                          max_assignments: int = DEFAULT_MAX_WORK,
                          residual_tol: float = 1e-9) -> FactorizabilitySolution | None:
    """Solve the log-linear overcount system, or report infeasibility as None.

    The overcount of an assignment counts the assignments reaching it through
    vertex-stabilizing elements sitewise. Unknowns are tied along group orbits
    of (site, assignment) pairs, so any returned solution is invariant.
    """
    L = c.label_count
    V = c.vertex_count
    if index_size**L > max_assignments:
        raise SearchSpaceTooLarge(f"{index_size}**{L} assignments exceed {max_assignments}")
    values = range(1, index_size + 1)
    positions = [c.label_positions_at(i) for i in range(V)]
    stabs = [[g for g in range(len(a)) if a.vertex_image(g, i) == i] for i in range(V)]

    def canon(i: int, beta: tuple) -> tuple:
        return min(a.beta_image(g, i, beta)[1] for g in stabs[i])

    counts: dict[tuple, int] = {}
    assignments = list(product(values, repeat=L))
    for gamma in assignments:
        sig = tuple(canon(i, tuple(gamma[p] for p in positions[i])) for i in range(V))
        counts[sig] = counts.get(sig, 0) + 1

    # orbit variables over all (site, assignment) pairs
    var_of: dict[tuple, int] = {}
    nvars = 0
    for i in range(V):
        for beta in product(values, repeat=len(positions[i])):
            key = (i, beta)
            if key in var_of:
                continue
            orbit = set()
            for g in range(len(a)):
                gi, gbeta = a.beta_image(g, i, beta)
                orbit.add((gi, gbeta))
            for member in orbit:
                var_of[member] = nvars
            nvars += 1

    rows = []
    rhs = []
    overcounts: dict[tuple, int] = {}
    for alpha in assignments:
        row = np.zeros(nvars)
        sig = []
        for i in range(V):
            beta = tuple(alpha[p] for p in positions[i])
            row[var_of[(i, beta)]] += 1.0
            sig.append(canon(i, beta))
        K = counts[tuple(sig)]
        overcounts[alpha] = K
        rows.append(row)
        rhs.append(-math.log(K))
    A = np.vstack(rows)
    b = np.asarray(rhs)
    x, *_ = np.linalg.lstsq(A, b, rcond=None)
    residual = float(np.abs(A @ x - b).max(initial=0.0))
    if residual > residual_tol:
        return None
    vals = {key: float(math.exp(x[idx])) for key, idx in var_of.items()}
    return FactorizabilitySolution(index_size, vals, residual, overcounts)


def sos_to_plain(sos: SosOmegaGDecomposition) -> OmegaGDecomposition:
    """Collapse an sos family decomposition into a plain one of squared index.

    Pairs of assignments become the new assignments; the local at a pair is
    the member-index sum of products of the corresponding family locals.
    """
    I = sos.index_size
    V = sos.complex.vertex_count

    def encode(v1: int, v2: int) -> int:
        return (v1 - 1) * I + v2

    per_site: dict[int, dict] = {}
    for (site, k, beta), poly in sos.locals.items():
        per_site.setdefault(site, {}).setdefault(k, {})[beta] = poly
    locals_: dict[int, dict[tuple, RadPoly]] = {}
    for site, by_k in per_site.items():
        acc: dict[tuple, RadPoly] = {}
        for k, mapping in by_k.items():
            for b1, p1 in mapping.items():
                for b2, p2 in mapping.items():
                    key = tuple(encode(x, y) for x, y in zip(b1, b2))
                    prod_ = p1 * p2
                    prev = acc.get(key)
                    acc[key] = prod_ if prev is None else prev + prod_
        locals_[site] = acc
    return OmegaGDecomposition(sos.complex, sos.action, I * I, sos.site_vars,
                               locals_, sos.scale**2)


def monomial_square_split(p: BlockPolynomial, tol: float = 1e-12) -> list[RadPoly]:
    """Split a nonnegative-coefficient even-exponent polynomial into squares.

    Each term c * x^(2g) becomes the square of sqrt(c) * x^g, kept exact when
    c is rational.
    """
    out: list[RadPoly] = []
    for key, coeff in p.sorted_terms():
        if any(e % 2 for block in key for e in block):
            raise MissingSquareSplits(f"odd exponent in {key}")
        half = tuple(tuple(e // 2 for e in block) for block in key)
        if p.mode == RATIONAL:
            c = Fraction(coeff)
            if c < 0:
                raise MissingSquareSplits(f"negative coefficient {c}")
            if c == 0:
                continue
            mono = BlockPolynomial.monomial(p.sites, half, 1)
            out.append(RadPoly.scaled_poly(ScaledScalar(c, 2), mono))
        else:
            cval = float(coeff)
            if cval < -tol:
                raise MissingSquareSplits(f"negative coefficient {cval}")
            if cval <= 0:
                continue
            mono = BlockPolynomial.monomial(p.sites, half, math.sqrt(cval), FLOAT)
            out.append(RadPoly.from_poly(mono))
    return out


def sep_to_sos(sep: OmegaGDecomposition, solution: FactorizabilitySolution | None,
               splits: Mapping | None = None) -> SosOmegaGDecomposition:
    """Turn a separable witness into an sos witness of the same index size.

    Every local gets a sum-of-squares split (automatic for even-exponent
    nonnegative locals, or supplied), shared along its orbit, and the square
    roots of the overcount splitting reweight the members. The result is
    numeric since the splitting constants generally are.
    """
    if solution is None:
        raise NotFactorizable("no overcount splitting available")
    if solution.index_size != sep.index_size:
        raise DimensionMismatch("splitting solved for a different index size")
    a = sep.action
    order = 1 if a is None else len(a)

    stored = [(site, beta) for site, mapping in sep.locals.items() for beta in mapping]
    orbit_of: dict[tuple, int] = {}
    reps: list[tuple] = []
    for site, beta in sorted(stored):
        if (site, beta) in orbit_of:
            continue
        rep_id = len(reps)
        reps.append((site, beta))
        members = {(site, beta)}
        if a is not None:
            for g in range(order):
                gi, gbeta = a.beta_image(g, site, beta)
                members.add((gi, gbeta))
        for member in members:
            orbit_of[member] = rep_id

    per_site_scale = sep.scale

    rep_splits: list[list[RadPoly]] = []
    for site, beta in reps:
        local = sep.locals[site][beta].scale_mul(per_site_scale)
        if splits and (site, beta) in splits:
            split = [RadPoly.coerce(t) for t in splits[(site, beta)]]
        else:
            try:
                split = monomial_square_split(local.as_polynomial())
            except Exception:
                split = monomial_square_split(local.to_float())
        rep_splits.append(split)
    N = max((len(s) for s in rep_splits), default=0)

    member_values = [(ell, k) for ell in range(len(reps)) for k in range(N)]
    site_index = tuple(tuple(member_values) for _ in range(sep.complex.vertex_count))
    locals_: dict[tuple, RadPoly] = {}
    for (site, beta), rep_id in orbit_of.items():
        if sep.locals.get(site, {}).get(beta) is None:
            continue
        c_val = math.sqrt(solution.C(site, beta))
        for k, tau in enumerate(rep_splits[rep_id]):
            locals_[(site, (rep_id, k), beta)] = tau.to_float().scaled(c_val)
    return SosOmegaGDecomposition(sep.complex, a, sep.index_size, sep.site_vars,
                                  site_index, locals_)


def caratheodory_bound(m: int, d: int, n: int, group_order: int) -> int:
    """Conic-combination size bound: |G| times the local dimension count."""
    if min(m, d, n, group_order) < 0 or group_order < 1:
        raise ValueError("inputs must be nonnegative with group order >= 1")
    return group_order * math.comb(d + m, d) ** (n + 1)


def matrix_pair_split(B: np.ndarray, D: int, tol: float = 1e-10) -> list[tuple[np.ndarray, np.ndarray]]:
    """Write a D^2 x D^2 matrix as a sum of Kronecker products of D x D pairs."""
    if B.shape != (D * D, D * D):
        raise DimensionMismatch(f"expected {(D*D, D*D)}, got {B.shape}")
    R = B.reshape(D, D, D, D).transpose(0, 2, 1, 3).reshape(D * D, D * D)
    u, s, vt = np.linalg.svd(R)
    out = []
    for j, sv in enumerate(s):
        if sv <= tol * s[0]:
            break
        out.append((math.sqrt(sv) * u[:, j].reshape(D, D),
                    math.sqrt(sv) * vt[j, :].reshape(D, D)))
    return out
