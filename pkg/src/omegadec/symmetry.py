"""Finite group actions on weighted simplicial complexes.

An action is stored as the closure of generator pairs (vertex permutation,
multifacet-label permutation). Every element must map facets to facets of
equal weight, and its label permutation must cover its vertex permutation
through the collapse map. Freeness always refers to the action on the
multifacet labels; blending refers to the action on the vertices.
"""

from __future__ import annotations

import json
from typing import Sequence

from .complexes import WeightedComplex, is_connected
from .errors import (
    ActionNotFree,
    CollapseNotLinear,
    GroupTooLarge,
    NotConnected,
    SearchSpaceTooLarge,
    WeightNotPreserved,
)

DEFAULT_MAX_GROUP = 10080
DEFAULT_MAX_WORK = 10**7

Perm = tuple[int, ...]


def _compose(a: Perm, b: Perm) -> Perm:
    """(a o b)(x) = a(b(x))."""
    return tuple(a[x] for x in b)


def _invert(a: Perm) -> Perm:
    inv = [0] * len(a)
    for x, y in enumerate(a):
        inv[y] = x
    return tuple(inv)


def _check_perm(p: Sequence[int], size: int, what: str) -> Perm:
    p = tuple(int(x) for x in p)
    if len(p) != size or sorted(p) != list(range(size)):
        raise ValueError(f"{what} is not a permutation of 0..{size - 1}")
    return p


class SymmetryAction:
    """A finite group acting on a weighted simplicial complex."""

    def __init__(self, complex_: WeightedComplex,
                 elements: Sequence[tuple[Perm, Perm]],
                 generators: Sequence[tuple[Perm, Perm]]):
        self.complex = complex_
        self.elements = list(elements)
        self.generators = list(generators)
        self._index = {el: i for i, el in enumerate(self.elements)}
        self._beta_maps: dict[tuple[int, int], tuple[int, tuple[int, ...]]] = {}

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def identity(self) -> int:
        return 0

    def vperm(self, g: int) -> Perm:
        return self.elements[g][0]

    def mperm(self, g: int) -> Perm:
        return self.elements[g][1]

    def mul(self, a: int, b: int) -> int:
        va, ma = self.elements[a]
        vb, mb = self.elements[b]
        return self._index[(_compose(va, vb), _compose(ma, mb))]

    def inv(self, a: int) -> int:
        va, ma = self.elements[a]
        return self._index[(_invert(va), _invert(ma))]

    def vertex_image(self, g: int, i: int) -> int:
        return self.elements[g][0][i]

    def label_image(self, g: int, pos: int) -> int:
        return self.elements[g][1][pos]

    def beta_map(self, g: int, site: int) -> tuple[int, tuple[int, ...]]:
        """Target site g*site and, per target label slot, the source slot index.

        An assignment beta on the labels at `site` pushes forward to the
        labels at g*site by reading each target label through g^{-1}.
        """
        key = (g, site)
        cached = self._beta_maps.get(key)
        if cached is not None:
            return cached
        c = self.complex
        gi = self.vertex_image(g, site)
        inv_m = self.mperm(self.inv(g))
        src_positions = c.label_positions_at(site)
        src_index = {p: t for t, p in enumerate(src_positions)}
        mapping = tuple(src_index[inv_m[p]] for p in c.label_positions_at(gi))
        self._beta_maps[key] = (gi, mapping)
        return gi, mapping

    def beta_image(self, g: int, site: int, beta: tuple) -> tuple[int, tuple]:
        """Push an assignment on the labels at `site` forward by g."""
        gi, mapping = self.beta_map(g, site)
        return gi, tuple(beta[t] for t in mapping)

    # structure queries

    def label_orbits(self) -> list[list[int]]:
        c = self.complex
        seen: set[int] = set()
        orbits = []
        for pos in range(c.label_count):
            if pos in seen:
                continue
            orbit = sorted({self.label_image(g, pos) for g in range(len(self))})
            seen.update(orbit)
            orbits.append(orbit)
        return orbits

    def vertex_orbits(self) -> list[list[int]]:
        seen: set[int] = set()
        orbits = []
        for v in range(self.complex.vertex_count):
            if v in seen:
                continue
            orbit = sorted({self.vertex_image(g, v) for g in range(len(self))})
            seen.update(orbit)
            orbits.append(orbit)
        return orbits

    def vertex_kernel_size(self) -> int:
        return sum(1 for g in range(len(self))
                   if all(self.vertex_image(g, i) == i for i in range(self.complex.vertex_count)))

    def vertex_stabilizer_size(self, i: int) -> int:
        return sum(1 for g in range(len(self)) if self.vertex_image(g, i) == i)

    def to_obj(self) -> dict:
        return {"generators": [{"vertex_perm": list(v), "multifacet_perm": list(m)}
                               for v, m in self.generators]}

    @classmethod
    def from_obj(cls, complex_: WeightedComplex, obj: dict,
                 max_group: int = DEFAULT_MAX_GROUP) -> "SymmetryAction":
        gens = [(g["vertex_perm"], g["multifacet_perm"]) for g in obj["generators"]]
        return build_action(complex_, gens, max_group=max_group)

    @classmethod
    def loads(cls, complex_: WeightedComplex, text: str) -> "SymmetryAction":
        return cls.from_obj(complex_, json.loads(text))


def _validate_element(c: WeightedComplex, vperm: Perm, mperm: Perm) -> None:
    for fset, weight in c.facets:
        image = frozenset(vperm[v] for v in fset)
        idx = c.facet_index(image)
        if idx is None or c.facets[idx][1] != weight:
            raise WeightNotPreserved(
                f"facet {sorted(fset)} maps to {sorted(image)} which is not a facet of weight {weight}")
    for pos in range(c.label_count):
        f_idx = c.labels[pos][0]
        target_f = c.labels[mperm[pos]][0]
        image = frozenset(vperm[v] for v in c.facets[f_idx][0])
        if c.facets[target_f][0] != image:
            raise CollapseNotLinear(
                f"label {c.labels[pos]} maps to {c.labels[mperm[pos]]}, "
                f"inconsistent with the vertex image {sorted(image)}")


def build_action(c: WeightedComplex,
                 generators: Sequence[tuple[Sequence[int], Sequence[int]]],
                 max_group: int = DEFAULT_MAX_GROUP) -> SymmetryAction:
    """Close generator pairs into a full group action and validate it."""
    V, L = c.vertex_count, c.label_count
    gens = []
    for vp, mp in generators:
        pair = (_check_perm(vp, V, "vertex_perm"), _check_perm(mp, L, "multifacet_perm"))
        _validate_element(c, *pair)
        gens.append(pair)
    identity = (tuple(range(V)), tuple(range(L)))
    elements = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for el in frontier:
            for gen in gens:
                prod = (_compose(gen[0], el[0]), _compose(gen[1], el[1]))
                if prod not in elements:
                    elements.add(prod)
                    nxt.append(prod)
                    if len(elements) > max_group:
                        raise GroupTooLarge(f"group exceeds cap {max_group}")
        frontier = nxt
    ordered = [identity] + sorted(el for el in elements if el != identity)
    for vp, mp in ordered[1:]:
        _validate_element(c, vp, mp)
    return SymmetryAction(c, ordered, gens)


def trivial_action(c: WeightedComplex) -> SymmetryAction:
    return build_action(c, [])


def is_free(a: SymmetryAction) -> bool:
    """True iff no non-identity element fixes any multifacet label."""
    for g in range(1, len(a)):
        mp = a.mperm(g)
        if any(mp[pos] == pos for pos in range(a.complex.label_count)):
            return False
    return True


def is_blending(a: SymmetryAction, max_work: int = DEFAULT_MAX_WORK) -> bool:
    """True iff every orbit-compatible vertex bijection is realized by one element.

    A vertex bijection f is realizable by a tuple of group elements exactly
    when f(i) lies in the orbit of i for every i; blending demands each such f
    to agree with a single element on all vertices.
    """
    V = a.complex.vertex_count
    orbit_of = {}
    for orbit in a.vertex_orbits():
        for v in orbit:
            orbit_of[v] = orbit
    realizable = {a.vperm(g) for g in range(len(a))}
    work = 0

    def rec(i: int, used: set[int], prefix: list[int]) -> bool:
        nonlocal work
        if i == V:
            return tuple(prefix) in realizable
        for target in orbit_of[i]:
            if target in used:
                continue
            work += 1
            if work > max_work:
                raise SearchSpaceTooLarge(f"blending search exceeded {max_work} steps")
            used.add(target)
            prefix.append(target)
            ok = rec(i + 1, used, prefix)
            prefix.pop()
            used.discard(target)
            if not ok:
                return False
        return True

    return rec(0, set(), [])


def free_refinement(a: SymmetryAction) -> SymmetryAction:
    """Refine the action to a free one by multiplying every weight by |G|.

    New labels are pairs (old label, group element); g sends (l, h) to
    (g*l, g*h), which has trivial stabilizers since left multiplication of the
    group on itself is free.
    """
    if not is_connected(a.complex):
        raise NotConnected("free refinement requires a connected complex")
    c = a.complex
    order = len(a)
    new_c = WeightedComplex(c.vertex_count,
                            tuple((fset, w * order) for fset, w in c.facets))

    offsets = []
    acc = 0
    for _, w in c.facets:
        offsets.append(acc)
        acc += w * order

    def new_pos(old_pos: int, h: int) -> int:
        f_idx, copy = c.labels[old_pos]
        return offsets[f_idx] + copy * order + h

    def refine_mperm(g: int) -> Perm:
        out = [0] * new_c.label_count
        for old_pos in range(c.label_count):
            for h in range(order):
                out[new_pos(old_pos, h)] = new_pos(a.label_image(g, old_pos), a.mul(g, h))
        return tuple(out)

    new_elements = [(a.vperm(g), refine_mperm(g)) for g in range(order)]
    gen_pairs = []
    for vp, mp in a.generators:
        g = a._index[(vp, mp)]
        gen_pairs.append((vp, refine_mperm(g)))
    return SymmetryAction(new_c, new_elements, gen_pairs)


def linearizer(a: SymmetryAction) -> tuple[int, ...]:
    """A G-linear map from label positions to group elements, identity on orbit reps.

    Exists exactly when the action is free; representatives are the
    lexicographically smallest label of each orbit.
    """
    if not is_free(a):
        raise ActionNotFree("linearizer requires a free action on the multifacets")
    z = [-1] * a.complex.label_count
    for orbit in a.label_orbits():
        rep = orbit[0]
        for g in range(len(a)):
            pos = a.label_image(g, rep)
            if z[pos] != -1:
                raise ActionNotFree("stabilizer is non-trivial")
            z[pos] = g
    return tuple(z)
