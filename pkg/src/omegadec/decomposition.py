"""Invariant decompositions of block polynomials and their rank witnesses.

A decomposition assigns to every site a sparse family of local polynomials
indexed by assignments of summation indices to the multifacet labels touching
that site; absent assignments mean the zero polynomial. Contraction sums the
per-site products over all global assignments. The decomposition also carries
a positive per-site scale factor, so group-order roots arising in the
symmetrization constructions stay exact.
"""

from __future__ import annotations

import json
from fractions import Fraction
from itertools import product
from typing import Mapping, Sequence

import numpy as np

from .blockpoly import FLOAT, RATIONAL, BlockPolynomial
from .complexes import WeightedComplex, is_connected
from .errors import (
    ActionNotBlending,
    ActionNotFree,
    IncompatibleBlockSizes,
    NotBipartite,
    NotConnected,
    NotInvariant,
    SearchSpaceTooLarge,
    SizeTooLarge,
)
from .invariance import is_invariant
from .radpoly import RadPoly, rad_outer
from .scalars import ONE, ScaledScalar
from .symmetry import SymmetryAction, is_blending, is_free, linearizer

DEFAULT_MAX_WORK = 10**7

Beta = tuple[int, ...]
SiteLocals = dict[int, dict[Beta, RadPoly]]


def contract_assignments(complex_: WeightedComplex, index_size: int,
                         site_locals: Mapping[int, Mapping[Beta, RadPoly]],
                         site_vars: Sequence[int],
                         max_work: int = DEFAULT_MAX_WORK) -> RadPoly:
    """Sum the per-site local products over all index assignments.

    Enumerates label values depth-first while filtering each site's stored
    assignments against the partial prefix, so sparsity prunes the search.
    The work counter guards against dense blowups.
    """
    V = complex_.vertex_count
    L = complex_.label_count
    mode = FLOAT if any(RadPoly.coerce(p).mode == FLOAT
                        for locs in site_locals.values() for p in locs.values()) else RATIONAL
    acc = RadPoly.zero(tuple(site_vars), mode)
    keysets = []
    for i in range(V):
        keys = tuple(site_locals.get(i, {}).keys())
        if not keys:
            return acc
        keysets.append(keys)
    touch: list[list[tuple[int, int]]] = [[] for _ in range(L)]
    for i in range(V):
        for slot, pos in enumerate(complex_.label_positions_at(i)):
            touch[pos].append((i, slot))
    work = 0

    def rec(pos: int, compat: list[tuple[Beta, ...]]):
        nonlocal acc, work
        if pos == L:
            factors = []
            for i in range(V):
                key = compat[i][0]
                factors.append(RadPoly.coerce(site_locals[i][key]))
            acc = acc + rad_outer(factors)
            return
        allowed: set[int] | None = None
        for i, slot in touch[pos]:
            vals = {k[slot] for k in compat[i]}
            allowed = vals if allowed is None else allowed & vals
            if not allowed:
                return
        if allowed is None:
            allowed = set(range(1, index_size + 1))
        for v in sorted(allowed):
            work += 1
            if work > max_work:
                raise SearchSpaceTooLarge(f"contraction exceeded {max_work} steps")
            nxt = list(compat)
            dead = False
            for i, slot in touch[pos]:
                filtered = tuple(k for k in nxt[i] if k[slot] == v)
                if not filtered:
                    dead = True
                    break
                nxt[i] = filtered
            if not dead:
                rec(pos + 1, nxt)

    rec(0, keysets)
    return acc


class OmegaGDecomposition:
    """Per-site local polynomial families plus a per-site positive scale.

    ``contract`` returns scale**V times the assignment sum, V being the number
    of sites, i.e. the scale is the factor implicitly multiplying every local.
    """

    def __init__(self, complex_: WeightedComplex, action: SymmetryAction | None,
                 index_size: int, site_vars: Sequence[int],
                 locals_: Mapping[int, Mapping[Beta, object]],
                 scale: ScaledScalar = ONE):
        if action is not None and action.complex is not complex_ \
                and action.complex != complex_:
            raise ValueError("action acts on a different complex")
        self.complex = complex_
        self.action = action
        self.index_size = int(index_size)
        self.site_vars = tuple(int(m) for m in site_vars)
        if len(self.site_vars) != complex_.vertex_count:
            raise ValueError("site_vars must list one variable count per vertex")
        self.scale = scale
        store: SiteLocals = {}
        for site, mapping in locals_.items():
            width = len(complex_.label_positions_at(site))
            for beta, poly in mapping.items():
                beta = tuple(int(b) for b in beta)
                if len(beta) != width:
                    raise ValueError(f"assignment {beta} has wrong arity for site {site}")
                if any(not 1 <= b <= self.index_size for b in beta):
                    raise ValueError(f"assignment {beta} outside 1..{self.index_size}")
                rp = RadPoly.coerce(poly)
                if rp.sites != (self.site_vars[site],):
                    raise IncompatibleBlockSizes(
                        f"local at site {site} has sites {rp.sites}, expected ({self.site_vars[site]},)")
                if not rp.is_zero():
                    store.setdefault(site, {})[beta] = rp
        self.locals = store

    @property
    def mode(self) -> str:
        for locs in self.locals.values():
            for p in locs.values():
                if p.mode == FLOAT:
                    return FLOAT
        return RATIONAL

    def local_count(self) -> int:
        return sum(len(v) for v in self.locals.values())

    def contract(self, max_work: int = DEFAULT_MAX_WORK) -> RadPoly:
        raw = contract_assignments(self.complex, self.index_size, self.locals,
                                   self.site_vars, max_work)
        return raw.scale_mul(self.scale ** self.complex.vertex_count)

    def contract_dense(self, limit: int = 200_000) -> RadPoly:
        """Reference contraction by full enumeration of all assignments."""
        c = self.complex
        L = c.label_count
        if self.index_size**L > limit:
            raise SearchSpaceTooLarge(f"{self.index_size}**{L} assignments exceed {limit}")
        mode = self.mode
        acc = RadPoly.zero(self.site_vars, mode)
        positions = [c.label_positions_at(i) for i in range(c.vertex_count)]
        for alpha in product(range(1, self.index_size + 1), repeat=L):
            factors = []
            for i in range(c.vertex_count):
                beta = tuple(alpha[p] for p in positions[i])
                loc = self.locals.get(i, {}).get(beta)
                if loc is None:
                    break
                factors.append(loc)
            else:
                acc = acc + rad_outer(factors)
        return acc.scale_mul(self.scale ** c.vertex_count)

    def check_symmetry(self, tol: float = 1e-9) -> bool:
        """Verify locals agree along every group orbit of (site, assignment)."""
        if self.action is None or len(self.action) == 1:
            return True
        a = self.action
        exact = self.mode == RATIONAL
        for i, mapping in self.locals.items():
            for beta, poly in mapping.items():
                for g in range(len(a)):
                    gi, gbeta = a.beta_image(g, i, beta)
                    if self.site_vars[gi] != self.site_vars[i]:
                        return False
                    other = self.locals.get(gi, {}).get(gbeta)
                    if other is None:
                        other = RadPoly.zero((self.site_vars[gi],),
                                             RATIONAL if exact else FLOAT)
                    if exact:
                        if not poly == other:
                            return False
                    elif not poly.allclose(other, tol):
                        return False
        return True

    # serialization

    def to_obj(self) -> dict:
        entries = []
        for site in sorted(self.locals):
            for beta in sorted(self.locals[site]):
                for s, p in self.locals[site][beta].parts:
                    entry = {"site": site, "beta": list(beta), "poly": p.to_obj()}
                    if s != ONE:
                        entry["scale"] = s.to_obj()
                    entries.append(entry)
        return {
            "index_size": self.index_size,
            "scale": self.scale.to_obj(),
            "site_vars": list(self.site_vars),
            "locals": entries,
        }

    @classmethod
    def from_obj(cls, complex_: WeightedComplex, action: SymmetryAction | None,
                 obj: dict) -> "OmegaGDecomposition":
        site_vars = obj["site_vars"]
        locals_: dict[int, dict[Beta, RadPoly]] = {}
        for entry in obj.get("locals", []):
            site = int(entry["site"])
            beta = tuple(int(b) for b in entry["beta"])
            poly = BlockPolynomial.from_obj(entry["poly"])
            s = ScaledScalar.from_obj(entry["scale"]) if "scale" in entry else ONE
            rp = RadPoly.scaled_poly(s, poly)
            prev = locals_.setdefault(site, {}).get(beta)
            locals_[site][beta] = rp if prev is None else prev + rp
        scale = ScaledScalar.from_obj(obj.get("scale", {"r": "1/1", "k": 1}))
        return cls(complex_, action, int(obj["index_size"]), site_vars, locals_, scale)

    @classmethod
    def loads(cls, complex_: WeightedComplex, action: SymmetryAction | None,
              text: str) -> "OmegaGDecomposition":
        return cls.from_obj(complex_, action, json.loads(text))


def _term_site_vars(terms: Sequence[Sequence[object]], V: int) -> tuple[int, ...]:
    if not terms:
        raise ValueError("need at least one elementary term")
    site_vars = []
    for i in range(V):
        widths = {RadPoly.coerce(t[i]).sites[0] for t in terms}
        if len(widths) != 1:
            raise IncompatibleBlockSizes(f"terms disagree on site {i} width: {widths}")
        site_vars.append(widths.pop())
    return tuple(site_vars)


def elementary_sum(terms: Sequence[Sequence[object]]) -> RadPoly:
    """The polynomial of an elementary decomposition: sum of site products."""
    V = len(terms[0])
    site_vars = _term_site_vars(terms, V)
    acc = RadPoly.zero(site_vars)
    for term in terms:
        acc = acc + rad_outer([RadPoly.coerce(f) for f in term])
    return acc


def from_elementary(terms: Sequence[Sequence[object]],
                    c: WeightedComplex) -> OmegaGDecomposition:
    """Reuse the factors of an elementary decomposition as local polynomials.

    The j-th term sits on the constant assignment j; connectivity makes every
    non-constant assignment hit a zero local, so contraction reproduces the
    elementary sum exactly.
    """
    if not is_connected(c):
        raise NotConnected("elementary reuse requires a connected complex")
    V = c.vertex_count
    for term in terms:
        if len(term) != V:
            raise ValueError(f"term has {len(term)} factors, expected {V}")
    site_vars = _term_site_vars(terms, V)
    locals_: dict[int, dict[Beta, object]] = {}
    for j, term in enumerate(terms):
        for i in range(V):
            width = len(c.label_positions_at(i))
            locals_.setdefault(i, {})[(j + 1,) * width] = term[i]
    return OmegaGDecomposition(c, None, len(terms), site_vars, locals_)


def _poly_invariant(p: RadPoly, a: SymmetryAction, tol: float = 1e-9) -> bool:
    return is_invariant(p, a, tol)


def symmetrize_average(terms: Sequence[Sequence[object]],
                       a: SymmetryAction) -> OmegaGDecomposition:
    """Invariant decomposition contracting to the group average of the input sum.

    Requires a free action on a connected complex. Index pairs (term, group
    element) are selected through a linearizer so that exactly the |G|
    translated copies of the input survive contraction; the per-site scale
    (1/|G|)**(1/V) turns the total into the average.
    """
    c = a.complex
    if not is_connected(c):
        raise NotConnected("symmetrization requires a connected complex")
    if not is_free(a):
        raise ActionNotFree("symmetrization requires a free action on the multifacets")
    V = c.vertex_count
    for term in terms:
        if len(term) != V:
            raise ValueError(f"term has {len(term)} factors, expected {V}")
    site_vars = _term_site_vars(terms, V)
    for g in range(len(a)):
        for i in range(V):
            if site_vars[a.vertex_image(g, i)] != site_vars[i]:
                raise IncompatibleBlockSizes(
                    f"sites {i} and {a.vertex_image(g, i)} share an orbit but differ in width")
    z = linearizer(a)
    order = len(a)
    r = len(terms)

    def encode(j: int, g: int) -> int:
        return j * order + g + 1

    locals_: dict[int, dict[Beta, RadPoly]] = {}
    for i in range(V):
        positions = c.label_positions_at(i)
        for g in range(order):
            gi = a.vertex_image(g, i)
            selector = tuple(a.mul(g, z[pos]) for pos in positions)
            for j in range(r):
                poly = RadPoly.coerce(terms[j][gi])
                if poly.is_zero():
                    continue
                beta = tuple(encode(j, h) for h in selector)
                locals_.setdefault(i, {})[beta] = poly
    scale = ScaledScalar(Fraction(1, order), V)
    return OmegaGDecomposition(c, a, r * order, site_vars, locals_, scale)


def symmetrize_free(terms: Sequence[Sequence[object]],
                    a: SymmetryAction) -> OmegaGDecomposition:
    """Invariant decomposition of an invariant elementary sum, free action case.

    The locals are the input factors rearranged (times the positive per-site
    scale), and the index count is |G| times the input term count.
    """
    p = elementary_sum(terms)
    if not _poly_invariant(p, a):
        raise NotInvariant("elementary sum is not invariant under the action")
    return symmetrize_average(terms, a)


def symmetric_indicator_split(n: int) -> list[tuple[int, tuple[int, ...]]]:
    """Signed rank-one split of the permutation-indicator tensor on n+1 points.

    Returns 2**n pairs (sign, vector v) with v = (1, e_1, ..., e_n), signs the
    product of the e's, such that (1/2**n) * sum sign * v^{tensor (n+1)} has
    entry 1 exactly on tuples enumerating {0,...,n} and 0 elsewhere.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if n > 8:
        raise SizeTooLarge("indicator split limited to n <= 8")
    if n == 0:
        return [(1, (1,))]
    out = []
    for eps in product((1, -1), repeat=n):
        sign = 1
        for e in eps:
            sign *= e
        out.append((sign, (1,) + eps))
    return out


def blending_difference(terms: Sequence[Sequence[object]], a: SymmetryAction
                        ) -> tuple[OmegaGDecomposition, OmegaGDecomposition]:
    """Write an invariant polynomial as a difference of invariant decompositions.

    Requires a blending vertex action on a connected complex. When the number
    of sites is odd the sign of each negative split vector is absorbed into
    the vector, so the subtracted part is empty.
    """
    c = a.complex
    if not is_connected(c):
        raise NotConnected("difference construction requires a connected complex")
    if not is_blending(a):
        raise ActionNotBlending("difference construction requires a blending vertex action")
    V = c.vertex_count
    if not terms:
        empty = OmegaGDecomposition(c, a, 0, (1,) * V, {})
        return empty, empty
    site_vars = _term_site_vars(terms, V)
    for g in range(len(a)):
        for i in range(V):
            if site_vars[a.vertex_image(g, i)] != site_vars[i]:
                raise IncompatibleBlockSizes(
                    f"sites {i} and {a.vertex_image(g, i)} share an orbit but differ in width")
    p = elementary_sum(terms)
    if not _poly_invariant(p, a):
        raise NotInvariant("elementary sum is not invariant under the action")

    n = V - 1
    split = symmetric_indicator_split(n)
    if n % 2 == 0:
        split = [(1, tuple(sign * x for x in vec)) for sign, vec in split]
    plus = [vec for sign, vec in split if sign > 0]
    minus = [vec for sign, vec in split if sign < 0]

    order = len(a)
    stab_product = 1
    for i in range(V):
        stab_product *= a.vertex_stabilizer_size(i)
    realized_maps = order // a.vertex_kernel_size()
    total = 2**n * stab_product * realized_maps
    scale = ScaledScalar(Fraction(1, total), V)

    def build(vectors: list[tuple[int, ...]]) -> OmegaGDecomposition:
        if not vectors:
            return OmegaGDecomposition(c, a, 0, site_vars, {})
        r = len(terms)
        locals_: dict[int, dict[Beta, RadPoly]] = {}
        for i in range(V):
            width = len(c.label_positions_at(i))
            for li, vec in enumerate(vectors):
                for j in range(r):
                    acc = RadPoly.zero((site_vars[i],))
                    for g in range(order):
                        gi = a.vertex_image(g, i)
                        acc = acc + RadPoly.coerce(terms[j][gi]).scaled(Fraction(vec[gi]))
                    if acc.is_zero():
                        continue
                    beta = (j * len(vectors) + li + 1,) * width
                    locals_.setdefault(i, {})[beta] = acc
        return OmegaGDecomposition(c, a, r * len(vectors), site_vars, locals_, scale)

    return build(plus), build(minus)


def _rank_exact(rows: list[list[Fraction]]) -> int:
    rows = [list(r) for r in rows]
    if not rows:
        return 0
    ncols = len(rows[0])
    rank = 0
    for col in range(ncols):
        pivot = next((i for i in range(rank, len(rows)) if rows[i][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        pv = rows[rank][col]
        for i in range(rank + 1, len(rows)):
            if rows[i][col]:
                f = rows[i][col] / pv
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[rank])]
        rank += 1
        if rank == len(rows):
            break
    return rank


def bipartite_rank(p) -> int:
    """Rank of the two-site coefficient matrix (operator Schmidt rank)."""
    if isinstance(p, RadPoly):
        try:
            p = p.as_polynomial()
        except Exception:
            p = p.to_float()
    if len(p.sites) != 2:
        raise NotBipartite(f"polynomial has {len(p.sites)} sites")
    if p.is_zero():
        return 0
    rows_idx = sorted({key[0] for key in p.terms})
    cols_idx = sorted({key[1] for key in p.terms})
    col_of = {b: j for j, b in enumerate(cols_idx)}
    row_of = {b: i for i, b in enumerate(rows_idx)}
    if p.mode == RATIONAL:
        mat = [[Fraction(0)] * len(cols_idx) for _ in rows_idx]
        for (b0, b1), coeff in p.terms.items():
            mat[row_of[b0]][col_of[b1]] = Fraction(coeff)
        return _rank_exact(mat)
    mat = np.zeros((len(rows_idx), len(cols_idx)))
    for (b0, b1), coeff in p.terms.items():
        mat[row_of[b0], col_of[b1]] = coeff
    return int(np.linalg.matrix_rank(mat, tol=1e-9 * max(1.0, float(np.abs(mat).max()))))


def _fold_scale(d: OmegaGDecomposition) -> OmegaGDecomposition:
    """Push the global per-site scale into every local polynomial."""
    if d.scale == ONE:
        return d
    locals_ = {site: {beta: poly.scale_mul(d.scale) for beta, poly in mapping.items()}
               for site, mapping in d.locals.items()}
    return OmegaGDecomposition(d.complex, d.action, d.index_size, d.site_vars, locals_)


def _shared_action(d1: OmegaGDecomposition, d2: OmegaGDecomposition) -> SymmetryAction | None:
    a, b = d1.action, d2.action
    if a is b:
        return a
    if a is None or b is None:
        return None
    if a.complex == b.complex and a.elements == b.elements:
        return a
    return None


def concat_sum(d1: OmegaGDecomposition, d2: OmegaGDecomposition) -> OmegaGDecomposition:
    """Decomposition of the sum of two contractions on a shared complex.

    Index sets are concatenated; assignments mixing the two blocks hit zero
    locals, which needs connectivity.
    """
    if d1.complex != d2.complex:
        raise ValueError("summands live on different complexes")
    if d1.site_vars != d2.site_vars:
        raise IncompatibleBlockSizes("summands disagree on site widths")
    if not is_connected(d1.complex):
        raise NotConnected("index concatenation requires a connected complex")
    a, b = _fold_scale(d1), _fold_scale(d2)
    shift = a.index_size
    locals_: dict[int, dict[Beta, RadPoly]] = {}
    for site, mapping in a.locals.items():
        for beta, poly in mapping.items():
            locals_.setdefault(site, {})[beta] = poly
    for site, mapping in b.locals.items():
        for beta, poly in mapping.items():
            shifted = tuple(v + shift for v in beta)
            locals_.setdefault(site, {})[shifted] = poly
    return OmegaGDecomposition(d1.complex, _shared_action(d1, d2),
                               a.index_size + b.index_size, d1.site_vars, locals_)


def pointwise_product(d1: OmegaGDecomposition, d2: OmegaGDecomposition) -> OmegaGDecomposition:
    """Decomposition of the product of two contractions on a shared complex."""
    if d1.complex != d2.complex:
        raise ValueError("factors live on different complexes")
    if d1.site_vars != d2.site_vars:
        raise IncompatibleBlockSizes("factors disagree on site widths")
    i2 = d2.index_size

    def encode(v1: int, v2: int) -> int:
        return (v1 - 1) * i2 + v2

    locals_: dict[int, dict[Beta, RadPoly]] = {}
    for site in range(d1.complex.vertex_count):
        m1 = d1.locals.get(site, {})
        m2 = d2.locals.get(site, {})
        for beta1, p1 in m1.items():
            for beta2, p2 in m2.items():
                beta = tuple(encode(v1, v2) for v1, v2 in zip(beta1, beta2))
                locals_.setdefault(site, {})[beta] = p1 * p2
    return OmegaGDecomposition(d1.complex, _shared_action(d1, d2), d1.index_size * i2,
                               d1.site_vars, locals_, d1.scale * d2.scale)
