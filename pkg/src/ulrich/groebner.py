"""Buchberger's algorithm over Q in degrevlex, and projective emptiness.

Polynomials are handled internally as {exponent tuple: int} dicts kept
primitive (content removed after every reduction step); the reduced basis is
returned monic with Fraction coefficients.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm

from .polyring import HomPoly, degrevlex_key

ORDER = "degrevlex"

_key = lru_cache(maxsize=None)(degrevlex_key)


def _lead(p: dict):
    return max(p, key=_key)


def _divides(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _mono_lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def _coprime(a, b) -> bool:
    return all(x == 0 or y == 0 for x, y in zip(a, b))


def _content(*polys) -> int:
    g = 0
    for p in polys:
        for v in p.values():
            g = gcd(g, v)
            if g == 1:
                return 1
    return g


def _primitive(p: dict) -> dict:
    if not p:
        return p
    g = _content(p)
    if p[_lead(p)] < 0:
        g = -g
    return {m: v // g for m, v in p.items()} if g != 1 else p


def _to_int_dict(f: HomPoly) -> dict:
    den = lcm(*(c.denominator for _, c in f.items()))
    return _primitive({m: int(c * den) for m, c in f.items()})


def _reduce(f: dict, basis: list, lms: list) -> dict:
    """Fully reduce f modulo basis; result primitive with positive lead."""
    p = dict(f)
    r: dict = {}
    while p:
        m = _lead(p)
        c = p[m]
        for g, lm in zip(basis, lms):
            if _divides(lm, m):
                q = tuple(a - b for a, b in zip(m, lm))
                lc = g[lm]
                d = gcd(c, lc)
                fp, fg = lc // d, c // d
                if fp != 1:
                    p = {k: v * fp for k, v in p.items()}
                    r = {k: v * fp for k, v in r.items()}
                for k, v in g.items():
                    kk = tuple(a + b for a, b in zip(k, q))
                    w = p.get(kk, 0) - fg * v
                    if w:
                        p[kk] = w
                    else:
                        p.pop(kk, None)
                cont = _content(p, r)
                if cont > 1:
                    p = {k: v // cont for k, v in p.items()}
                    r = {k: v // cont for k, v in r.items()}
                break
        else:
            r[m] = c
            del p[m]
    return _primitive(r)


def _spoly(f: dict, g: dict, lf, lg) -> dict:
    l = _mono_lcm(lf, lg)
    qf = tuple(a - b for a, b in zip(l, lf))
    qg = tuple(a - b for a, b in zip(l, lg))
    cf, cg = f[lf], g[lg]
    d = gcd(cf, cg)
    mf, mg = cg // d, cf // d
    out: dict = {}
    for k, v in f.items():
        kk = tuple(a + b for a, b in zip(k, qf))
        out[kk] = out.get(kk, 0) + mf * v
    for k, v in g.items():
        kk = tuple(a + b for a, b in zip(k, qg))
        w = out.get(kk, 0) - mg * v
        if w:
            out[kk] = w
        else:
            out.pop(kk, None)
    return {k: v for k, v in out.items() if v}


class GroebnerBasis:
    """A reduced degrevlex Groebner basis with monic generators."""

    order = ORDER

    def __init__(self, nvars: int, generators):
        self.nvars = nvars
        self.generators = list(generators)

    def __len__(self):
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def __repr__(self):
        return f"GroebnerBasis({[str(g) for g in self.generators]})"

    def leading_monomials(self) -> list:
        return [g.leading_monomial() for g in self.generators]

    def normal_form(self, f: HomPoly) -> HomPoly:
        """Remainder of f on division by the (monic) basis."""
        if not f:
            return f
        lms = self.leading_monomials()
        p = dict(f.items())
        r: dict = {}
        while p:
            m = max(p, key=_key)
            c = p[m]
            for g, lm in zip(self.generators, lms):
                if _divides(lm, m):
                    q = tuple(a - b for a, b in zip(m, lm))
                    for k, v in g.items():
                        kk = tuple(a + b for a, b in zip(k, q))
                        w = p.get(kk, 0) - c * v
                        if w:
                            p[kk] = w
                        else:
                            p.pop(kk, None)
                    break
            else:
                r[m] = c
                del p[m]
        return HomPoly(self.nvars, r, f.degree)

    def contains(self, f: HomPoly) -> bool:
        return not self.normal_form(f)

    def missing_pure_powers(self) -> list[int]:
        """Variables x_i with no pure power of x_i among the leading monomials."""
        lms = self.leading_monomials()
        if any(sum(m) == 0 for m in lms):
            return []
        missing = []
        for i in range(self.nvars):
            if not any(m[i] == sum(m) for m in lms):
                missing.append(i)
        return missing

    def to_json(self) -> list:
        return [g.to_json() for g in self.generators]


def _update(lms: list, G: list, B: list, h: int):
    """Gebauer-Moeller installation of the new element h."""
    lh = lms[h]
    C = list(G)
    D = []
    while C:
        g1 = C.pop(0)
        l1 = _mono_lcm(lh, lms[g1])
        if _coprime(lh, lms[g1]):
            D.append(g1)
            continue
        dominated = False
        for g2 in C + D:
            if _divides(_mono_lcm(lh, lms[g2]), l1):
                dominated = True
                break
        if not dominated:
            D.append(g1)
    E = [(g, h) for g in D if not _coprime(lh, lms[g])]
    kept = []
    for (g1, g2) in B:
        l12 = _mono_lcm(lms[g1], lms[g2])
        if (_divides(lh, l12) and _mono_lcm(lms[g1], lh) != l12
                and _mono_lcm(lh, lms[g2]) != l12):
            continue
        kept.append((g1, g2))
    G_new = [g for g in G if not _divides(lh, lms[g])]
    G_new.append(h)
    return G_new, kept + E


def buchberger(gens) -> GroebnerBasis:
    """Reduced Groebner basis (degrevlex) of the ideal generated by gens.

    Pairs are selected by the normal strategy: smallest lcm first, ties
    broken by degrevlex and then by insertion index, so the output depends
    only on the input list.
    """
    gens = list(gens)
    if not gens:
        return GroebnerBasis(0, [])
    nvars = gens[0].nvars
    if any(g.nvars != nvars for g in gens):
        raise ValueError("generators live in different polynomial rings")
    store: list = []
    lms: list = []
    G: list = []
    B: list = []

    def install(p):
        nonlocal G, B
        store.append(p)
        lms.append(_lead(p))
        G, B = _update(lms, G, B, len(store) - 1)

    for f in gens:
        if not f:
            continue
        active = [store[i] for i in G]
        h = _reduce(_to_int_dict(f), active, [lms[i] for i in G])
        if h:
            install(h)

    while B:
        best = min(range(len(B)), key=lambda k: _pair_key(lms, B[k]))
        i, j = B.pop(best)
        s = _spoly(store[i], store[j], lms[i], lms[j])
        if not s:
            continue
        h = _reduce(s, [store[k] for k in G], [lms[k] for k in G])
        if h:
            install(h)

    # minimal basis, then interreduce
    minimal = []
    for k in G:
        if any(o != k and _divides(lms[o], lms[k]) and (lms[o] != lms[k] or o < k) for o in G):
            continue
        minimal.append(k)
    reduced = []
    for k in minimal:
        others = [store[o] for o in minimal if o != k]
        olms = [lms[o] for o in minimal if o != k]
        p = _reduce(store[k], others, olms)
        lc = p[_lead(p)]
        reduced.append(HomPoly(nvars, {m: Fraction(v, lc) for m, v in p.items()}))
    reduced.sort(key=lambda g: (g.degree, tuple(-x for x in _key(g.leading_monomial())[1])))
    return GroebnerBasis(nvars, reduced)


def _pair_key(lms, pair):
    i, j = pair
    l = _mono_lcm(lms[i], lms[j])
    return (_key(l), j, i)


def projective_empty(gens) -> bool:
    """True iff the homogeneous gens have no common zero in projective space.

    Decided by the pure-power test on the reduced Groebner basis: every
    variable must have a power among the leading monomials.
    """
    gens = [g for g in gens if g]
    if not gens:
        return False
    return not buchberger(gens).missing_pure_powers()
