"""Finite groupoids and principal groupoid bundles as integer tables.

Arrows and objects are numbered from 0.  An arrow ``g`` goes from ``s[g]`` to
``t[g]``; ``g h`` is defined when ``t[g] == s[h]``, so ``s(gh) = s(g)`` and
``t(gh) = t(h)``.  Undefined table entries hold -1.  Every check is
exhaustive and reports violations as data.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from nlgauge import kernels

SCHEMA_VERSION = 1


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=np.int64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class FiniteGroupoid:
    n_objects: int
    s: np.ndarray
    t: np.ndarray
    unit: np.ndarray
    inv: np.ndarray
    comp: np.ndarray
    object_labels: tuple = ()
    arrow_labels: tuple = ()

    def __post_init__(self):
        for name in ("s", "t", "unit", "inv", "comp"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        n = len(self.s)
        if self.t.shape != (n,) or self.inv.shape != (n,) or self.comp.shape != (n, n):
            raise ValueError("inconsistent table shapes")
        if self.unit.shape != (self.n_objects,):
            raise ValueError("one unit per object required")
        if not self.object_labels:
            object.__setattr__(self, "object_labels", tuple(str(x) for x in range(self.n_objects)))
        if not self.arrow_labels:
            object.__setattr__(self, "arrow_labels", tuple(str(g) for g in range(n)))

    @property
    def n_arrows(self) -> int:
        return len(self.s)

    def composable(self, g: int, h: int) -> bool:
        return int(self.t[g]) == int(self.s[h])

    def mul(self, g: int, h: int) -> int:
        if not self.composable(g, h):
            raise ValueError(f"arrows {g} and {h} are not composable")
        return int(self.comp[g, h])

    def arrows_from(self, x: int) -> np.ndarray:
        return np.flatnonzero(self.s == x)

    def replace(self, **tables) -> "FiniteGroupoid":
        """Copy with some tables swapped (used to inject corruptions)."""
        kw = {k: getattr(self, k) for k in ("n_objects", "s", "t", "unit", "inv", "comp",
                                            "object_labels", "arrow_labels")}
        kw.update(tables)
        return FiniteGroupoid(**kw)


@dataclass(frozen=True, eq=False)
class FinitePGB:
    """Principal groupoid bundle ``P -> M`` with moment ``eps: P -> G0`` and right action ``act[p, g]``."""

    G: FiniteGroupoid
    n_base: int
    proj: np.ndarray
    moment: np.ndarray
    act: np.ndarray
    total_labels: tuple = ()
    base_labels: tuple = ()

    def __post_init__(self):
        for name in ("proj", "moment", "act"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        n = len(self.proj)
        if self.moment.shape != (n,) or self.act.shape != (n, self.G.n_arrows):
            raise ValueError("inconsistent bundle table shapes")
        if not self.total_labels:
            object.__setattr__(self, "total_labels", tuple(str(p) for p in range(n)))
        if not self.base_labels:
            object.__setattr__(self, "base_labels", tuple(str(m) for m in range(self.n_base)))

    @property
    def n_total(self) -> int:
        return len(self.proj)

    def fiber(self, m: int) -> np.ndarray:
        return np.flatnonzero(self.proj == m)

    def replace(self, **tables) -> "FinitePGB":
        kw = {k: getattr(self, k) for k in ("G", "n_base", "proj", "moment", "act",
                                            "total_labels", "base_labels")}
        kw.update(tables)
        return FinitePGB(**kw)


@dataclass(frozen=True)
class SectionFamily:
    """Subsets ``cover[i]`` of the base with sections ``sections[i][m] = p``."""

    cover: tuple
    sections: tuple

    def __post_init__(self):
        cover = tuple(frozenset(int(m) for m in U) for U in self.cover)
        sections = tuple({int(m): int(p) for m, p in dict(s).items()} for s in self.sections)
        if len(cover) != len(sections):
            raise ValueError("one section per cover element")
        for U, sig in zip(cover, sections):
            if set(sig) != set(U):
                raise ValueError("section must be defined exactly on its subset")
        object.__setattr__(self, "cover", cover)
        object.__setattr__(self, "sections", sections)


class DivisionError(ValueError):
    def __init__(self, kind: str, p: int, q: int, arrows=()):
        self.kind = kind
        self.p, self.q = p, q
        self.arrows = list(arrows)
        what = {"no-such-arrow": "no arrow g with p.g = q (action not transitive on the fiber)",
                "multiple-arrows": f"arrows {self.arrows} all send p to q (action not free)"}[kind]
        super().__init__(f"division({p}, {q}): {what}")


# -- validation ------------------------------------------------------------

def validate_groupoid(G: FiniteGroupoid) -> dict:
    """Exhaustive category and inverse axioms; an empty list means the axiom holds."""
    n = G.n_arrows
    s, t, unit, inv, comp = G.s, G.t, G.unit, G.inv, G.comp
    rep = {"unit_endpoints": [], "unit_laws": [], "composition_domain": [], "composition_endpoints": [],
           "associativity": [], "inverse": []}
    for x in range(G.n_objects):
        u = int(unit[x])
        if not 0 <= u < n or s[u] != x or t[u] != x:
            rep["unit_endpoints"].append(x)
    for g in range(n):
        us, ut = int(unit[s[g]]), int(unit[t[g]])
        if comp[us, g] != g or comp[g, ut] != g:
            rep["unit_laws"].append(g)
        gi = int(inv[g])
        if (not 0 <= gi < n or s[gi] != t[g] or t[gi] != s[g]
                or comp[g, gi] != unit[s[g]] or comp[gi, g] != unit[t[g]]):
            rep["inverse"].append(g)
    composable = t[:, None] == s[None, :]
    defined = comp >= 0
    for g, h in np.argwhere(composable != defined):
        rep["composition_domain"].append((int(g), int(h)))
    for g, h in np.argwhere(composable & defined):
        k = comp[g, h]
        if k >= n or s[k] != s[g] or t[k] != t[h]:
            rep["composition_endpoints"].append((int(g), int(h)))
    masked = np.where(composable & defined & (comp < n), comp, -1)
    rep["associativity"] = [tuple(int(v) for v in row) for row in kernels.associativity_violations(masked)]
    rep["valid"] = not any(rep[k] for k in rep)
    return rep


def validate_action(P: FinitePGB) -> dict:
    """Action axioms ``eps(pg) = t(g)``, ``p 1 = p``, ``p(gh) = (pg)h`` and ``pi(pg) = pi(p)``."""
    G = P.G
    rep = {"domain": [], "moment": [], "unit": [], "compatibility": [], "fiberwise": [], "projection": []}
    present = set(int(m) for m in P.proj)
    rep["projection"] = [m for m in range(P.n_base) if m not in present] + \
                        [p for p in range(P.n_total) if not 0 <= P.proj[p] < P.n_base]
    for p in range(P.n_total):
        e = int(P.moment[p])
        if P.act[p, G.unit[e]] != p:
            rep["unit"].append(p)
        for g in range(G.n_arrows):
            q = int(P.act[p, g])
            if (q >= 0) != (G.s[g] == e):
                rep["domain"].append((p, g))
                continue
            if q < 0:
                continue
            if P.moment[q] != G.t[g]:
                rep["moment"].append((p, g))
            if P.proj[q] != P.proj[p]:
                rep["fiberwise"].append((p, g))
            for h in G.arrows_from(int(G.t[g])):
                gh = int(G.comp[g, h])
                left = int(P.act[q, h])
                right = int(P.act[p, gh]) if gh >= 0 else -1
                if left != right:
                    rep["compatibility"].append((p, g, int(h)))
    rep["valid"] = not any(rep[k] for k in rep)
    return rep


def validate_principality(P: FinitePGB) -> dict:
    """Bijectivity of ``(p, g) -> (p, pg)`` checked point by point.

    For each p, ``g -> pg`` must be a bijection from the arrows leaving
    ``eps(p)`` onto the fiber through p.  ``non_injective`` lists
    ``(p, g, h)`` with ``pg = ph``; ``unreached`` lists ``(p, q)``.
    """
    G = P.G
    non_inj, unreached, failing = [], [], set()
    for p in range(P.n_total):
        seen = {}
        for g in G.arrows_from(int(P.moment[p])):
            q = int(P.act[p, g])
            if q in seen:
                non_inj.append((p, seen[q], int(g)))
                failing.add(p)
            else:
                seen[q] = int(g)
        for q in P.fiber(int(P.proj[p])):
            if int(q) not in seen:
                unreached.append((p, int(q)))
                failing.add(p)
    return {"injective": not non_inj, "surjective": not unreached, "non_injective": non_inj,
            "unreached": unreached, "failing_points": sorted(failing),
            "principal": not failing}


def division(P: FinitePGB, p: int, q: int) -> int:
    """The unique arrow ``g`` with ``s(g) = eps(p)`` and ``p g = q``."""
    if P.proj[p] != P.proj[q]:
        raise ValueError(f"points {p} and {q} lie in different fibers")
    hits = [int(g) for g in P.G.arrows_from(int(P.moment[p])) if P.act[p, g] == q]
    if not hits:
        raise DivisionError("no-such-arrow", p, q)
    if len(hits) > 1:
        raise DivisionError("multiple-arrows", p, q, hits)
    return hits[0]


def division_identities(P: FinitePGB) -> dict:
    """The four division-map identities, exhaustively over fiber pairs."""
    G = P.G
    rep = {"diagonal": [], "inverse": [], "equivariance": [], "endpoints": [], "action": []}
    for m in range(P.n_base):
        fib = [int(p) for p in P.fiber(m)]
        for p in fib:
            if division(P, p, p) != G.unit[P.moment[p]]:
                rep["diagonal"].append(p)
            for q in fib:
                d = division(P, p, q)
                if P.act[p, d] != q:
                    rep["action"].append((p, q))
                if G.s[d] != P.moment[p] or G.t[d] != P.moment[q]:
                    rep["endpoints"].append((p, q))
                if G.inv[d] != division(P, q, p):
                    rep["inverse"].append((p, q))
                for g in G.arrows_from(int(P.moment[q])):
                    if division(P, p, int(P.act[q, g])) != G.comp[d, g]:
                        rep["equivariance"].append((p, q, int(g)))
    rep["valid"] = not any(rep[k] for k in rep)
    return rep


# -- bundles built from groupoids -----------------------------------------

def unit_bundle(G: FiniteGroupoid) -> FinitePGB:
    """``P = G`` over ``G0`` with ``pi = s``, ``eps = t`` and action by composition."""
    return FinitePGB(G, G.n_objects, G.s.copy(), G.t.copy(), G.comp.copy(),
                     G.arrow_labels, G.object_labels)


def _pullback_pairs(G: FiniteGroupoid, f) -> list:
    return [(m, int(g)) for m, x in enumerate(f) for g in G.arrows_from(int(x))]


def pullback_trivial_bundle(G: FiniteGroupoid, f: Sequence[int], base_labels=()) -> FinitePGB:
    """``{(m, g) : f(m) = s(g)}`` with ``eps(m, g) = t(g)`` and ``(m, g1) g2 = (m, g1 g2)``."""
    pairs = _pullback_pairs(G, f)
    index = {pg: k for k, pg in enumerate(pairs)}
    act = np.full((len(pairs), G.n_arrows), -1, dtype=np.int64)
    for k, (m, g1) in enumerate(pairs):
        for g2 in G.arrows_from(int(G.t[g1])):
            act[k, g2] = index[(m, int(G.comp[g1, g2]))]
    labels = tuple(f"({m},{G.arrow_labels[g]})" for m, g in pairs)
    return FinitePGB(G, len(f), [m for m, _ in pairs], [int(G.t[g]) for _, g in pairs], act,
                     labels, tuple(base_labels))


def trivialization(P: FinitePGB, sigma: dict, m: int, g: int) -> int:
    """``Phi(m, g) = sigma(m) g``."""
    return int(P.act[sigma[m], g])


def transition_cocycle(P: FinitePGB, fam: SectionFamily) -> dict:
    """``phi[(j, i)][m] = division(sigma_j(m), sigma_i(m))`` on every overlap (including i == j)."""
    check_sections(P, fam)
    out = {}
    for i, j in itertools.product(range(len(fam.cover)), repeat=2):
        overlap = fam.cover[i] & fam.cover[j]
        out[(j, i)] = {m: division(P, fam.sections[j][m], fam.sections[i][m]) for m in sorted(overlap)}
    return out


def check_sections(P: FinitePGB, fam: SectionFamily) -> None:
    for i, sig in enumerate(fam.sections):
        for m, p in sig.items():
            if P.proj[p] != m:
                raise ValueError(f"section {i} sends {m} to {p}, which lies over {int(P.proj[p])}")


def cocycle_report(P: FinitePGB, fam: SectionFamily) -> dict:
    """Cocycle identity, section relation and trivialization equivariance, exhaustively."""
    G = P.G
    phi = transition_cocycle(P, fam)
    k = len(fam.cover)
    rep = {"cocycle": [], "section_relation": [], "equivariance": []}
    for i, j, l in itertools.product(range(k), repeat=3):
        for m in sorted(fam.cover[i] & fam.cover[j] & fam.cover[l]):
            if G.comp[phi[(i, j)][m], phi[(j, l)][m]] != phi[(i, l)][m]:
                rep["cocycle"].append((i, j, l, m))
    for i, j in itertools.product(range(k), repeat=2):
        for m, g in phi[(j, i)].items():
            if P.act[fam.sections[j][m], g] != fam.sections[i][m]:
                rep["section_relation"].append((i, j, m))
    for i, sig in enumerate(fam.sections):
        for m in sig:
            for g in G.arrows_from(int(P.moment[sig[m]])):
                for h in G.arrows_from(int(G.t[g])):
                    if trivialization(P, sig, m, int(G.comp[g, h])) != P.act[trivialization(P, sig, m, int(g)), h]:
                        rep["equivariance"].append((i, m, int(g), int(h)))
    rep["valid"] = not any(rep[k] for k in rep)
    return rep


def section_isomorphism(P: FinitePGB, sigma: Sequence[int]) -> dict:
    """Check that ``(m, g) -> sigma(m) g`` is an equivariant bijection from the pullback trivial bundle."""
    G = P.G
    sigma = [int(p) for p in sigma]
    f = [int(P.moment[p]) for p in sigma]
    T = pullback_trivial_bundle(G, f)
    pairs = _pullback_pairs(G, f)
    image = [int(P.act[sigma[m], g]) for m, g in pairs]
    bijective = sorted(image) == list(range(P.n_total))
    fiberwise = all(P.proj[image[k]] == m for k, (m, _) in enumerate(pairs))
    equivariant = all(
        image[int(T.act[k, h])] == P.act[image[k], h]
        for k in range(T.n_total) for h in G.arrows_from(int(T.moment[k])))
    return {"bijective": bijective, "fiberwise": fiberwise, "equivariant": equivariant,
            "valid": bijective and fiberwise and equivariant}


# -- constructors ----------------------------------------------------------

def _from_arrows(objects: Sequence, arrows: Sequence, s, t, mul, inverse, object_labels=None,
                 arrow_labels=None) -> FiniteGroupoid:
    """Build tables from Python-level arrows and callables on them."""
    index = {a: k for k, a in enumerate(arrows)}
    obj_index = {x: k for k, x in enumerate(objects)}
    n = len(arrows)
    S = [obj_index[s(a)] for a in arrows]
    T = [obj_index[t(a)] for a in arrows]
    comp = np.full((n, n), -1, dtype=np.int64)
    for i, a in enumerate(arrows):
        for j, b in enumerate(arrows):
            if T[i] == S[j]:
                comp[i, j] = index[mul(a, b)]
    unit = [None] * len(objects)
    for k, a in enumerate(arrows):
        if S[k] == T[k] and mul(a, a) == a:
            unit[S[k]] = k
    inv = [index[inverse(a)] for a in arrows]
    return FiniteGroupoid(len(objects), S, T, unit, inv, comp,
                          tuple(object_labels or (str(x) for x in objects)),
                          tuple(arrow_labels or (str(a) for a in arrows)))


def pair_groupoid(n: int) -> FiniteGroupoid:
    """Arrows ``(x, y): x -> y`` with ``(x, y)(y, z) = (x, z)``."""
    objs = list(range(n))
    arrows = [(x, y) for x in objs for y in objs]
    return _from_arrows(objs, arrows, lambda a: a[0], lambda a: a[1],
                        lambda a, b: (a[0], b[1]), lambda a: (a[1], a[0]),
                        arrow_labels=[f"({x},{y})" for x, y in arrows])


def transitive_groupoid(n: int, k: int) -> FiniteGroupoid:
    """Pair groupoid times the cyclic group Z_k: arrows ``(x, a, y)``."""
    objs = list(range(n))
    arrows = [(x, a, y) for x in objs for a in range(k) for y in objs]
    return _from_arrows(objs, arrows, lambda g: g[0], lambda g: g[2],
                        lambda g, h: (g[0], (g[1] + h[1]) % k, h[2]),
                        lambda g: (g[2], (-g[1]) % k, g[0]),
                        arrow_labels=[f"({x};{a};{y})" for x, a, y in arrows])


def cyclic_action_groupoid(n: int, k: int | None = None) -> FiniteGroupoid:
    """Z_k acting on Z_n by translation; arrows ``(x, a): x -> x + a``."""
    k = n if k is None else k
    objs = list(range(n))
    arrows = [(x, a) for x in objs for a in range(k)]
    return _from_arrows(objs, arrows, lambda g: g[0], lambda g: (g[0] + g[1]) % n,
                        lambda g, h: (g[0], (g[1] + h[1]) % k),
                        lambda g: ((g[0] + g[1]) % n, (-g[1]) % k),
                        arrow_labels=[f"({x}+{a})" for x, a in arrows])


def disjoint_union(G: FiniteGroupoid, H: FiniteGroupoid) -> FiniteGroupoid:
    n, m = G.n_arrows, H.n_arrows
    comp = np.full((n + m, n + m), -1, dtype=np.int64)
    comp[:n, :n] = G.comp
    comp[n:, n:] = np.where(H.comp >= 0, H.comp + n, -1)
    off = G.n_objects
    return FiniteGroupoid(G.n_objects + H.n_objects,
                          np.concatenate([G.s, H.s + off]), np.concatenate([G.t, H.t + off]),
                          np.concatenate([G.unit, H.unit + n]), np.concatenate([G.inv, H.inv + n]), comp,
                          tuple(f"a{x}" for x in G.object_labels) + tuple(f"b{x}" for x in H.object_labels),
                          tuple(f"a{x}" for x in G.arrow_labels) + tuple(f"b{x}" for x in H.arrow_labels))


def relabel_bundle(P: FinitePGB, perm: Sequence[int]) -> FinitePGB:
    """Rename total-space points: old point ``p`` becomes ``perm[p]``."""
    perm = np.asarray(perm, dtype=np.int64)
    inv = np.argsort(perm)
    act = np.where(P.act >= 0, perm[np.where(P.act >= 0, P.act, 0)], -1)[inv]
    labels = tuple(P.total_labels[i] for i in inv)
    return FinitePGB(P.G, P.n_base, P.proj[inv], P.moment[inv], act, labels, P.base_labels)


def random_groupoid(rng: np.random.Generator, max_blocks: int = 2, max_objects: int = 3,
                    max_order: int = 3) -> FiniteGroupoid:
    """Disjoint union of 1..max_blocks transitive groupoids ``X x Z_k x X``."""
    blocks = [transitive_groupoid(int(rng.integers(1, max_objects + 1)), int(rng.integers(1, max_order + 1)))
              for _ in range(int(rng.integers(1, max_blocks + 1)))]
    G = blocks[0]
    for B in blocks[1:]:
        G = disjoint_union(G, B)
    return G


def random_principal_bundle(seed: int, max_base: int = 4) -> tuple:
    """A seeded principal bundle with relabeled points, plus one global section.

    Returns ``(P, sigma)`` where ``sigma[m]`` is a point over ``m``.
    """
    rng = np.random.default_rng(seed)
    G = random_groupoid(rng)
    n_base = int(rng.integers(1, max_base + 1))
    f = rng.integers(0, G.n_objects, size=n_base)
    T = pullback_trivial_bundle(G, f)
    perm = rng.permutation(T.n_total)
    P = relabel_bundle(T, perm)
    sigma = [int(rng.choice(P.fiber(m))) for m in range(n_base)]
    return P, sigma


def non_free_bundle() -> FinitePGB:
    """Pair groupoid over 2 objects times Z_2 acting through its quotient: fails injectivity."""
    G = transitive_groupoid(2, 2)
    base = pullback_trivial_bundle(pair_groupoid(2), [0])
    # points (0,(0,y)); arrow (x;a;y) acts as the pair arrow (x,y)
    act = np.full((base.n_total, G.n_arrows), -1, dtype=np.int64)
    pair = pair_groupoid(2)
    for p in range(base.n_total):
        for g in range(G.n_arrows):
            if G.s[g] == base.moment[p]:
                x, y = int(G.s[g]), int(G.t[g])
                act[p, g] = base.act[p, pair.arrow_labels.index(f"({x},{y})")]
    return FinitePGB(G, base.n_base, base.proj, base.moment, act, base.total_labels, base.base_labels)


def merged_unit_bundles(G: FiniteGroupoid) -> FinitePGB:
    """Two copies of the unit bundle over the same base: fibers too large, fails surjectivity."""
    U = unit_bundle(G)
    n = U.n_total
    act = np.concatenate([U.act, np.where(U.act >= 0, U.act + n, -1)])
    return FinitePGB(G, U.n_base, np.concatenate([U.proj, U.proj]), np.concatenate([U.moment, U.moment]),
                     act, tuple(f"a{x}" for x in U.total_labels) + tuple(f"b{x}" for x in U.total_labels),
                     U.base_labels)


def random_section_family(P: FinitePGB, n_sets: int, seed: int, size: int | None = None) -> SectionFamily:
    """Random subsets covering the base, each carrying a random section."""
    rng = np.random.default_rng(seed)
    size = size or max(1, P.n_base // 2)
    cover = [set(int(m) for m in rng.choice(P.n_base, size=min(size, P.n_base), replace=False))
             for _ in range(n_sets)]
    for m in range(P.n_base):  # make it a cover
        cover[int(rng.integers(n_sets))].add(m)
    sections = [{m: int(rng.choice(P.fiber(m))) for m in U} for U in cover]
    return SectionFamily(tuple(cover), tuple(sections))


# -- JSON ------------------------------------------------------------------

def groupoid_to_dict(G: FiniteGroupoid) -> dict:
    comp = [[g, h, int(G.comp[g, h])] for g in range(G.n_arrows) for h in range(G.n_arrows)
            if G.comp[g, h] >= 0]
    return {"schema": SCHEMA_VERSION, "kind": "groupoid", "objects": list(G.object_labels),
            "units": [int(u) for u in G.unit],
            "arrows": [{"label": G.arrow_labels[g], "s": int(G.s[g]), "t": int(G.t[g]), "inv": int(G.inv[g])}
                       for g in range(G.n_arrows)],
            "composition": comp}


def groupoid_from_dict(d: dict) -> FiniteGroupoid:
    if d.get("kind") != "groupoid":
        raise ValueError("not a groupoid description")
    arrows = d["arrows"]
    n = len(arrows)
    comp = np.full((n, n), -1, dtype=np.int64)
    for g, h, k in d["composition"]:
        comp[g, h] = k
    return FiniteGroupoid(len(d["objects"]), [a["s"] for a in arrows], [a["t"] for a in arrows], d["units"],
                          [a["inv"] for a in arrows], comp, tuple(d["objects"]),
                          tuple(a["label"] for a in arrows))


def bundle_to_dict(P: FinitePGB) -> dict:
    act = [[p, g, int(P.act[p, g])] for p in range(P.n_total) for g in range(P.G.n_arrows) if P.act[p, g] >= 0]
    return {"schema": SCHEMA_VERSION, "kind": "bundle", "groupoid": groupoid_to_dict(P.G),
            "base": list(P.base_labels),
            "total": [{"label": P.total_labels[p], "proj": int(P.proj[p]), "moment": int(P.moment[p])}
                      for p in range(P.n_total)],
            "action": act}


def bundle_from_dict(d: dict) -> FinitePGB:
    if d.get("kind") != "bundle":
        raise ValueError("not a bundle description")
    G = groupoid_from_dict(d["groupoid"])
    total = d["total"]
    act = np.full((len(total), G.n_arrows), -1, dtype=np.int64)
    for p, g, q in d["action"]:
        act[p, g] = q
    return FinitePGB(G, len(d["base"]), [x["proj"] for x in total], [x["moment"] for x in total], act,
                     tuple(x["label"] for x in total), tuple(d["base"]))


def dumps(obj) -> str:
    d = groupoid_to_dict(obj) if isinstance(obj, FiniteGroupoid) else bundle_to_dict(obj)
    return json.dumps(d, indent=1, sort_keys=True)


def loads(text: str):
    d = json.loads(text)
    return groupoid_from_dict(d) if d.get("kind") == "groupoid" else bundle_from_dict(d)
