"""Polynomial Z-modules of degree at most 4.

A degree-d module is a diagram of abelian groups A_1, ..., A_d with maps
H_m^n : A_{n-1} -> A_n and P_m^n : A_n -> A_{n-1} (1 <= m < n <= d), subject
to relations.  For d = 2 the relations are

    H P H = 2 H,        P H P = 2 P,

and for d = 3 the full list of twelve relations between the six maps (the
two above acquire correction terms through the third level).  Degree-4
relations are not hardwired: a relation list may be attached to a module,
and the restricted default used for quartic extension work consists of the
simplicial face identities together with the adjacent-level relations.

Such diagrams present polynomial functors on free abelian groups; natural
transformations correspond to diagram morphisms, which is what makes the
Hom computation here a finite integer linear system.
"""

from __future__ import annotations

from math import gcd

from .intlinalg import IntMatrix, kernel_basis
from .abgroup import (AbHom, FgAbGroup, Subquotient, direct_sum, hom_group,
                      tensor)


def H(m, n):
    return ("H", m, n)


def P(m, n):
    return ("P", m, n)


def arrow_source_level(arrow):
    kind, _, n = arrow
    return n - 1 if kind == "H" else n


def arrow_target_level(arrow):
    kind, _, n = arrow
    return n if kind == "H" else n - 1


def word_levels(word):
    """(source level, target level) of a composition word (outermost first)."""
    src = arrow_source_level(word[-1])
    tgt = arrow_target_level(word[0])
    level = src
    for a in reversed(word):
        if arrow_source_level(a) != level:
            raise ValueError(f"word {word} is not composable")
        level = arrow_target_level(a)
    return src, tgt


# Quadratic relations.
RELATIONS_DEGREE_2 = [
    ("HPH=2H", [(1, (H(1, 2), P(1, 2), H(1, 2))), (-2, (H(1, 2),))]),
    ("PHP=2P", [(1, (P(1, 2), H(1, 2), P(1, 2))), (-2, (P(1, 2),))]),
]

# Cubical relations, in the printed order.
RELATIONS_DEGREE_3 = [
    ("H13.H12=H23.H12",
     [(1, (H(1, 3), H(1, 2))), (-1, (H(2, 3), H(1, 2)))]),
    ("P12.P13=P12.P23",
     [(1, (P(1, 2), P(1, 3))), (-1, (P(1, 2), P(2, 3)))]),
    ("H23.P13=0", [(1, (H(2, 3), P(1, 3)))]),
    ("H13.P23=0", [(1, (H(1, 3), P(2, 3)))]),
    ("H13.P13.H13=2H13",
     [(1, (H(1, 3), P(1, 3), H(1, 3))), (-2, (H(1, 3),))]),
    ("P13.H13.P13=2P13",
     [(1, (P(1, 3), H(1, 3), P(1, 3))), (-2, (P(1, 3),))]),
    ("H23.P23.H23=2H23",
     [(1, (H(2, 3), P(2, 3), H(2, 3))), (-2, (H(2, 3),))]),
    ("P23.H23.P23=2P23",
     [(1, (P(2, 3), H(2, 3), P(2, 3))), (-2, (P(2, 3),))]),
    ("H12.P12.H12=2H12+2(P13+P23).H13.H12",
     [(1, (H(1, 2), P(1, 2), H(1, 2))), (-2, (H(1, 2),)),
      (-2, (P(1, 3), H(1, 3), H(1, 2))), (-2, (P(2, 3), H(1, 3), H(1, 2)))]),
    ("P12.H12.P12=2P12+2P12.P13.(H23+H13)",
     [(1, (P(1, 2), H(1, 2), P(1, 2))), (-2, (P(1, 2),)),
      (-2, (P(1, 2), P(1, 3), H(2, 3))), (-2, (P(1, 2), P(1, 3), H(1, 3)))]),
    ("H13.H12.P12+H13+H23=H23.P23.H13.P13.H23+H13.P13.H23.P23.H13",
     [(1, (H(1, 3), H(1, 2), P(1, 2))), (1, (H(1, 3),)), (1, (H(2, 3),)),
      (-1, (H(2, 3), P(2, 3), H(1, 3), P(1, 3), H(2, 3))),
      (-1, (H(1, 3), P(1, 3), H(2, 3), P(2, 3), H(1, 3)))]),
    ("H12.P12.P13+P13+P23=P23.H13.P13.H23.P23+P13.H23.P23.H13.P13",
     [(1, (H(1, 2), P(1, 2), P(1, 3))), (1, (P(1, 3),)), (1, (P(2, 3),)),
      (-1, (P(2, 3), H(1, 3), P(1, 3), H(2, 3), P(2, 3))),
      (-1, (P(1, 3), H(2, 3), P(2, 3), H(1, 3), P(1, 3)))]),
]


def _face_relations(n):
    """P_m^n P_j^{n+1} = P_{j-1}^n P_m^{n+1} and the dual H identities."""
    rels = []
    for m in range(1, n):
        for j in range(m + 1, n + 1):
            rels.append((f"P{m}{n}.P{j}{n+1}=P{j-1}{n}.P{m}{n+1}",
                         [(1, (P(m, n), P(j, n + 1))),
                          (-1, (P(j - 1, n), P(m, n + 1)))]))
            rels.append((f"H{j}{n+1}.H{m}{n}=H{m}{n+1}.H{j-1}{n}",
                         [(1, (H(j, n + 1), H(m, n))),
                          (-1, (H(m, n + 1), H(j - 1, n)))]))
    return rels


def default_degree4_relations():
    """Restricted quartic relation list: simplicial face identities between
    levels 3 and 4 plus the adjacent-level relations at the top level.

    This is not claimed to be the complete quartic relation set; it is the
    part forced by the face structure, which is what the quartic extension
    computations require.  Results that rely on it are flagged as
    oracle-verified.
    """
    rels = list(_face_relations(3))
    for m in range(1, 4):
        rels.append((f"H{m}4.P{m}4.H{m}4=2H{m}4",
                     [(1, (H(m, 4), P(m, 4), H(m, 4))), (-2, (H(m, 4),))]))
        rels.append((f"P{m}4.H{m}4.P{m}4=2P{m}4",
                     [(1, (P(m, 4), H(m, 4), P(m, 4))), (-2, (P(m, 4),))]))
        for j in range(1, 4):
            if j != m:
                rels.append((f"H{j}4.P{m}4=0", [(1, (H(j, 4), P(m, 4)))]))
    return rels


def relations_for_degree(degree, attached=None):
    if degree == 1:
        return []
    if degree == 2:
        return RELATIONS_DEGREE_2
    if degree == 3:
        return RELATIONS_DEGREE_3
    if degree == 4:
        if attached is None:
            raise ValueError("degree-4 relations are data driven; none attached")
        return attached
    raise ValueError(f"unsupported degree {degree}")


class PolyZModule:
    """Diagram (A_1, ..., A_d; H_m^n, P_m^n)."""

    __slots__ = ("degree", "groups", "h", "p", "relations", "name")

    def __init__(self, groups, h, p, relations=None, name=None):
        self.degree = len(groups)
        if not 1 <= self.degree <= 4:
            raise ValueError("degree must be between 1 and 4")
        self.groups = list(groups)
        self.h = dict(h)
        self.p = dict(p)
        self.relations = relations
        self.name = name
        for n in range(2, self.degree + 1):
            for m in range(1, n):
                hm = self.h.get((m, n))
                pm = self.p.get((m, n))
                if hm is None or pm is None:
                    raise ValueError(f"missing maps at ({m},{n})")
                if hm.source != self.groups[n - 2] or hm.target != self.groups[n - 1]:
                    raise ValueError(f"H_{m}^{n} has wrong endpoints")
                if pm.source != self.groups[n - 1] or pm.target != self.groups[n - 2]:
                    raise ValueError(f"P_{m}^{n} has wrong endpoints")

    def level(self, i):
        """1-based level access."""
        return self.groups[i - 1]

    def arrow(self, a):
        kind, m, n = a
        return self.h[(m, n)] if kind == "H" else self.p[(m, n)]

    def arrows(self):
        out = []
        for n in range(2, self.degree + 1):
            for m in range(1, n):
                out.append(H(m, n))
                out.append(P(m, n))
        return out

    def evaluate_word(self, word):
        """Compose a word of arrows (outermost symbol first)."""
        word_levels(word)
        result = None
        for a in reversed(word):
            f = self.arrow(a)
            result = f if result is None else f * result
        return result

    def evaluate_relation(self, terms):
        total = None
        for coeff, word in terms:
            val = self.evaluate_word(word).scale(coeff)
            total = val if total is None else total + val
        return total

    def __repr__(self):
        lv = ", ".join(str(g) for g in self.groups)
        return f"PolyZModule<{self.name or 'anon'}: {lv}>"


def check_relations(module):
    """Violated relations of a module; empty means valid."""
    rels = relations_for_degree(module.degree, module.relations)
    bad = []
    for name, terms in rels:
        if not module.evaluate_relation(terms).is_zero():
            bad.append(name)
    return bad


class ZModMorphism:
    """Levelwise homomorphism commuting with every H and P map."""

    __slots__ = ("source", "target", "components")

    def __init__(self, source, target, components, check=True):
        if source.degree != target.degree:
            raise ValueError("degree mismatch")
        self.source = source
        self.target = target
        self.components = list(components)
        for i, f in enumerate(self.components):
            if f.source != source.groups[i] or f.target != target.groups[i]:
                raise ValueError(f"component {i} has wrong endpoints")
        if check and not self.commutes():
            raise ValueError("components do not commute with the H/P maps")

    def commutes(self):
        for a in self.source.arrows():
            src = arrow_source_level(a) - 1
            tgt = arrow_target_level(a) - 1
            lhs = self.components[tgt] * self.source.arrow(a)
            rhs = self.target.arrow(a) * self.components[src]
            if not (lhs - rhs).is_zero():
                return False
        return True

    def __mul__(self, other):
        if not isinstance(other, ZModMorphism):
            return NotImplemented
        comps = [f * g for f, g in zip(self.components, other.components)]
        return ZModMorphism(other.source, self.target, comps, check=False)

    def __add__(self, other):
        comps = [f + g for f, g in zip(self.components, other.components)]
        return ZModMorphism(self.source, self.target, comps, check=False)

    def __sub__(self, other):
        comps = [f - g for f, g in zip(self.components, other.components)]
        return ZModMorphism(self.source, self.target, comps, check=False)

    def scale(self, c):
        return ZModMorphism(self.source, self.target,
                            [f.scale(c) for f in self.components], check=False)

    def is_zero(self):
        return all(f.is_zero() for f in self.components)

    @classmethod
    def zero(cls, source, target):
        return cls(source, target,
                   [AbHom.zero(a, b) for a, b in zip(source.groups, target.groups)],
                   check=False)

    @classmethod
    def identity(cls, module):
        return cls(module, module,
                   [AbHom.identity(g) for g in module.groups], check=False)


class PathRingPresentation:
    """Idempotents, arrow generators and relation words for one degree.

    The abstract ring behind degree-d diagrams: one idempotent per level,
    the H/P symbols as arrows, and the degree's relation list as rewriting
    data.  Free-module diagrams are computed from this presentation by word
    enumeration (see pathring.free_module_diagram).
    """

    __slots__ = ("degree", "relations")

    def __init__(self, degree, relations=None):
        self.degree = degree
        self.relations = relations_for_degree(degree, relations)
        for _, terms in self.relations:
            for _, word in terms:
                word_levels(word)  # validates composability

    def arrows(self):
        out = []
        for n in range(2, self.degree + 1):
            for m in range(1, n):
                out.append(H(m, n))
                out.append(P(m, n))
        return out


# ---------------------------------------------------------------------------
# builtin catalog
# ---------------------------------------------------------------------------

def _mk(groups_invariants, hmats, pmats, name, relations=None):
    groups = [FgAbGroup.from_invariants(inv) for inv in groups_invariants]

    def hom(src, tgt, rows):
        return AbHom(src, tgt, IntMatrix(tgt.ngens, src.ngens, rows))

    h = {}
    p = {}
    d = len(groups)
    for n in range(2, d + 1):
        for m in range(1, n):
            h[(m, n)] = hom(groups[n - 2], groups[n - 1], hmats[(m, n)])
            p[(m, n)] = hom(groups[n - 1], groups[n - 2], pmats[(m, n)])
    return PolyZModule(groups, h, p, relations=relations, name=name)


def tensor_with_zmod(module, m, name=None):
    """Levelwise tensor with Z/m, with the induced structure maps."""
    zm = FgAbGroup.cyclic(m)
    prods = [tensor(g, zm) for g in module.groups]
    groups = [t.group for t in prods]
    idzm = AbHom.identity(zm)
    h = {}
    p = {}
    for n in range(2, module.degree + 1):
        for mm in range(1, n):
            h[(mm, n)] = prods[n - 2].induced(module.h[(mm, n)], idzm,
                                              target=prods[n - 1])
            p[(mm, n)] = prods[n - 1].induced(module.p[(mm, n)], idzm,
                                              target=prods[n - 2])
    return PolyZModule(groups, h, p, relations=module.relations,
                       name=name or (f"{module.name} mod{m}" if module.name else None))


def direct_sum_modules(M1, M2, name=None):
    if M1.degree != M2.degree:
        raise ValueError("degree mismatch in direct sum")
    sums = [direct_sum(a, b) for a, b in zip(M1.groups, M2.groups)]
    groups = [s.group for s in sums]
    h = {}
    p = {}
    for n in range(2, M1.degree + 1):
        for m in range(1, n):
            sh = arrow_source_level(H(m, n)) - 1
            th = arrow_target_level(H(m, n)) - 1
            h[(m, n)] = (sums[th].inclusions[0] * M1.h[(m, n)] * sums[sh].projections[0]
                         + sums[th].inclusions[1] * M2.h[(m, n)] * sums[sh].projections[1])
            sp = arrow_source_level(P(m, n)) - 1
            tp = arrow_target_level(P(m, n)) - 1
            p[(m, n)] = (sums[tp].inclusions[0] * M1.p[(m, n)] * sums[sp].projections[0]
                         + sums[tp].inclusions[1] * M2.p[(m, n)] * sums[sp].projections[1])
    rel = M1.relations if M1.relations is not None else M2.relations
    return PolyZModule(groups, h, p, relations=rel, name=name)


def pad_to_degree(module, degree, name=None):
    """Extend a module by trivial levels up to the requested degree."""
    if degree < module.degree:
        raise ValueError("cannot pad downwards")
    if degree == module.degree:
        return module
    groups = list(module.groups) + [FgAbGroup.trivial()
                                    for _ in range(degree - module.degree)]
    h = dict(module.h)
    p = dict(module.p)
    for n in range(2, degree + 1):
        for m in range(1, n):
            if (m, n) not in h:
                h[(m, n)] = AbHom.zero(groups[n - 2], groups[n - 1])
                p[(m, n)] = AbHom.zero(groups[n - 1], groups[n - 2])
    rel = module.relations
    if degree == 4 and rel is None:
        rel = default_degree4_relations()
    return PolyZModule(groups, h, p, relations=rel,
                       name=name or module.name)


def _base_catalog():
    reg = {}

    reg["Tensor2"] = lambda: _mk(
        [[0], [0, 0]],
        {(1, 2): [[1], [1]]},
        {(1, 2): [[1, 1]]},
        "Tensor2")
    reg["Lambda2"] = lambda: _mk(
        [[], [0]],
        {(1, 2): [[]]},
        {(1, 2): []},
        "Lambda2")
    reg["Gamma2"] = lambda: _mk(
        [[0], [0]],
        {(1, 2): [[1]]},
        {(1, 2): [[2]]},
        "Gamma2")
    reg["S2"] = lambda: _mk(
        [[0], [0]],
        {(1, 2): [[2]]},
        {(1, 2): [[1]]},
        "S2")
    reg["AntisymTensor2"] = lambda: _mk(
        [[2], [0]],
        {(1, 2): [[0]]},
        {(1, 2): [[1]]},
        "AntisymTensor2")
    reg["Zmod2Linear"] = lambda: _mk(
        [[2], []],
        {(1, 2): []},
        {(1, 2): [[]]},
        "Zmod2Linear")

    reg["Lambda3"] = lambda: _mk(
        [[], [], [0]],
        {(1, 2): [], (1, 3): [[]], (2, 3): [[]]},
        {(1, 2): [], (1, 3): [], (2, 3): []},
        "Lambda3")
    reg["S3"] = lambda: _mk(
        [[0], [0, 0], [0]],
        {(1, 2): [[3], [3]], (1, 3): [[2, 0]], (2, 3): [[0, 2]]},
        {(1, 2): [[1, 1]], (1, 3): [[1], [0]], (2, 3): [[0], [1]]},
        "S3")
    reg["Pi3S"] = lambda: _mk(
        [[2], [2], [0]],
        {(1, 2): [[0]], (1, 3): [[0]], (2, 3): [[0]]},
        {(1, 2): [[1]], (1, 3): [[1]], (2, 3): [[1]]},
        "Pi3S")
    reg["Pi3S_mod2"] = lambda: _mk(
        [[8], [4], [2]],
        {(1, 2): [[1]], (1, 3): [[1]], (2, 3): [[1]]},
        {(1, 2): [[2]], (1, 3): [[2]], (2, 3): [[2]]},
        "Pi3S_mod2")
    reg["H3_mod2"] = lambda: _mk(
        [[2], [2], [2]],
        {(1, 2): [[1]], (1, 3): [[1]], (2, 3): [[1]]},
        {(1, 2): [[0]], (1, 3): [[0]], (2, 3): [[0]]},
        "H3_mod2")
    reg["F_3dia3"] = lambda: _mk(
        [[2], [2], [2]],
        {(1, 2): [[0]], (1, 3): [[0]], (2, 3): [[0]]},
        {(1, 2): [[1]], (1, 3): [[1]], (2, 3): [[1]]},
        "F_3dia3")
    reg["P_pushout"] = lambda: _mk(
        [[8], [2], [2]],
        {(1, 2): [[0]], (1, 3): [[0]], (2, 3): [[0]]},
        {(1, 2): [[4]], (1, 3): [[1]], (2, 3): [[1]]},
        "P_pushout")

    reg["Lambda4"] = lambda: _mk(
        [[], [], [], [0]],
        {(1, 2): [], (1, 3): [], (2, 3): [],
         (1, 4): [[]], (2, 4): [[]], (3, 4): [[]]},
        {(1, 2): [], (1, 3): [], (2, 3): [],
         (1, 4): [], (2, 4): [], (3, 4): []},
        "Lambda4", relations=default_degree4_relations())
    reg["Pi4S"] = lambda: _mk(
        [[24], [2], [2], [0]],
        {(1, 2): [[0]], (1, 3): [[0]], (2, 3): [[0]],
         (1, 4): [[0]], (2, 4): [[0]], (3, 4): [[0]]},
        {(1, 2): [[12]], (1, 3): [[1]], (2, 3): [[1]],
         (1, 4): [[1]], (2, 4): [[1]], (3, 4): [[1]]},
        "Pi4S", relations=default_degree4_relations())

    return reg


_CATALOG = _base_catalog()


def catalog_names():
    return sorted(_CATALOG)


def catalog(name):
    """Builtin module by name.

    Accepts `mod<m>` for the linear functor -(x)Z/m, a `<name> mod<m>`
    suffix for a levelwise Z/m twist, and `+`-joined names for direct sums.
    """
    name = name.strip()
    if "+" in name:
        parts = [catalog(part) for part in name.split("+")]
        out = parts[0]
        for nxt in parts[1:]:
            d = max(out.degree, nxt.degree)
            out = direct_sum_modules(pad_to_degree(out, d), pad_to_degree(nxt, d))
        out.name = name
        return out
    if name in _CATALOG:
        return _CATALOG[name]()
    if name.startswith("mod") and name[3:].isdigit():
        m = int(name[3:])
        zm = FgAbGroup.cyclic(m)
        triv = FgAbGroup.trivial()
        return PolyZModule(
            [zm, triv],
            {(1, 2): AbHom.zero(zm, triv)},
            {(1, 2): AbHom.zero(triv, zm)},
            name=name)
    if " mod" in name:
        base, _, mm = name.rpartition(" mod")
        if mm.isdigit():
            return tensor_with_zmod(catalog(base), int(mm), name=name)
    raise KeyError(f"unknown catalog module {name!r}")


# ---------------------------------------------------------------------------
# Hom groups of diagram morphisms
# ---------------------------------------------------------------------------

class ZModHom:
    """Group of morphisms F -> G with generating morphisms."""

    __slots__ = ("F", "G", "group", "_levels", "_sq", "_offsets", "generators")

    def __init__(self, F, G):
        if F.degree != G.degree:
            raise ValueError("degree mismatch")
        self.F = F
        self.G = G
        self._levels = [hom_group(a, b) for a, b in zip(F.groups, G.groups)]
        offsets = []
        total = 0
        for hg in self._levels:
            offsets.append(total)
            total += len(hg.summands)
        self._offsets = offsets

        rows = []
        moduli = []
        for a in F.arrows():
            kind, m, n = a
            src = arrow_source_level(a)
            tgt = arrow_target_level(a)
            Fmap = F.arrow(a)
            Gmap = G.arrow(a)
            nsrc = F.groups[src - 1].ngens
            ntgt = G.groups[tgt - 1].ngens
            for u in range(nsrc):
                for w in range(ntgt):
                    row = [0] * total
                    # phi_tgt o F.arrow  contributes at level tgt
                    hg = self._levels[tgt - 1]
                    for k, (i, j, _, entry) in enumerate(hg.summands):
                        if j == w:
                            row[offsets[tgt - 1] + k] += entry * Fmap.matrix.data[i][u]
                    # - G.arrow o phi_src  contributes at level src
                    hg = self._levels[src - 1]
                    for k, (i, j, _, entry) in enumerate(hg.summands):
                        if i == u:
                            row[offsets[src - 1] + k] -= entry * Gmap.matrix.data[w][j]
                    if any(row):
                        rows.append(row)
                        moduli.append(G.groups[tgt - 1].invariants[w])
        if rows:
            T = IntMatrix.from_rows(rows)
            relcols = []
            for r, d in enumerate(moduli):
                if d:
                    col = [0] * len(rows)
                    col[r] = d
                    relcols.append(col)
            stacked = T.hstack(IntMatrix.from_columns(relcols, len(rows)))
            K = kernel_basis(stacked)
            numerator = [[K.data[r][c] for r in range(total)]
                         for c in range(K.cols)]
        else:
            numerator = None
        denominator = []
        for lvl, hg in enumerate(self._levels):
            for k, (_, _, order, _) in enumerate(hg.summands):
                if order:
                    col = [0] * total
                    col[offsets[lvl] + k] = order
                    denominator.append(col)
        self._sq = Subquotient(total, numerator, denominator)
        self.group = self._sq.group
        self.generators = [self.from_coords(self.group.unit(k))
                           for k in range(self.group.ngens)]

    def from_raw(self, raw):
        comps = []
        for lvl, hg in enumerate(self._levels):
            o = self._offsets[lvl]
            comps.append(hg.from_raw(raw[o:o + len(hg.summands)]))
        return ZModMorphism(self.F, self.G, comps, check=False)

    def from_coords(self, coords):
        return self.from_raw(self._sq.lift(coords))

    def coords_of(self, morphism):
        raw = []
        for hg, f in zip(self._levels, morphism.components):
            raw.extend(hg.raw_of(f))
        return self._sq.project(raw)


def hom_zmod(F, G):
    return ZModHom(F, G)
