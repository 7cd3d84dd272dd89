"""Ext groups of polynomial Z-modules, two independent ways.

ext_zmod resolves: cover F by a direct sum of free modules (one summand per
canonical generator of each level), take the kernel K, and compute
Ext^1(F, G) as the cokernel of Hom(P0, G) -> Hom(K, G).

ext_bruteforce classifies extension diagrams directly: an extension
0 -> G -> E -> F -> 0 is, levelwise, determined by the images gamma of the
torsion relations of F in G, and each structure map of E by its correction
u : (generators of F) -> G over a fixed integer lift of the F map.  Well
definedness and the relation words are linear homogeneous constraints on
(gamma, u); congruence classes modulo base-change of the lifts are the
extensions, and the Baer sum is addition of data.  When the data space is
finite and small the same classification is re-done by literal enumeration
of candidate diagrams and compared.
"""

from __future__ import annotations

from .abgroup import AbHom, FgAbGroup, Subquotient, sublattice_equal
from .intlinalg import IntMatrix, kernel_basis, solve
from .pathring import free_module_diagram
from .polyzmod import (PathRingPresentation, PolyZModule, ZModMorphism,
                       arrow_source_level, arrow_target_level,
                       default_degree4_relations, hom_zmod,
                       relations_for_degree, word_levels)


class ResourceCapError(RuntimeError):
    """A configured size bound was exceeded."""


_FREE_CACHE = {}


def _free(degree, level):
    key = (degree, level)
    if key not in _FREE_CACHE:
        _FREE_CACHE[key] = free_module_diagram(PathRingPresentation(degree), level)
    return _FREE_CACHE[key]


class ZModDirectSum:
    """Direct sum of modules with inclusion/projection morphisms."""

    __slots__ = ("module", "parts", "inclusions", "projections")

    def __init__(self, parts):
        from .abgroup import direct_sum
        self.parts = list(parts)
        degree = parts[0].degree
        level_sums = [direct_sum(*(p.groups[i] for p in parts))
                      for i in range(degree)]
        groups = [s.group for s in level_sums]
        h = {}
        p = {}
        for n in range(2, degree + 1):
            for m in range(1, n):
                for key, store, src, tgt in ((("H", m, n), h, n - 2, n - 1),
                                             (("P", m, n), p, n - 1, n - 2)):
                    total = None
                    for k, part in enumerate(parts):
                        piece = (level_sums[tgt].inclusions[k]
                                 * part.arrow(key)
                                 * level_sums[src].projections[k])
                        total = piece if total is None else total + piece
                    store[(m, n)] = total
        rel = next((p_.relations for p_ in parts if p_.relations is not None), None)
        self.module = PolyZModule(groups, h, p, relations=rel)
        self.inclusions = [
            ZModMorphism(part, self.module,
                         [level_sums[i].inclusions[k] for i in range(degree)],
                         check=False)
            for k, part in enumerate(parts)]
        self.projections = [
            ZModMorphism(self.module, part,
                         [level_sums[i].projections[k] for i in range(degree)],
                         check=False)
            for k, part in enumerate(parts)]


def _sum_morphisms(morphisms):
    total = None
    for f in morphisms:
        total = f if total is None else total + f
    return total


def kernel_module(morphism):
    """(K, incl) for a morphism of modules, levelwise kernels."""
    F = morphism.source
    datas = [comp.kernel() for comp in morphism.components]
    groups = [d[0] for d in datas]
    incls = [d[1] for d in datas]
    sqs = [d[2] for d in datas]
    h = {}
    p = {}
    for a in F.arrows():
        kind, m, n = a
        src = arrow_source_level(a) - 1
        tgt = arrow_target_level(a) - 1
        cols = []
        for g in range(groups[src].ngens):
            x = incls[src](groups[src].unit(g))
            y = F.arrow(a)(x)
            cols.append(list(sqs[tgt].project(list(y))))
        hom = AbHom.from_columns(groups[src], groups[tgt], cols)
        (h if kind == "H" else p)[(m, n)] = hom
    K = PolyZModule(groups, h, p, relations=F.relations)
    incl = ZModMorphism(K, F, incls, check=False)
    return K, incl


class ExtZmod:
    """Ext^1(F, G) in the category of degree-d modules."""

    __slots__ = ("F", "G", "group", "P0", "pi", "K", "incl",
                 "_hom_K", "_proj", "generator_count")

    def __init__(self, F, G):
        if F.degree != G.degree:
            raise ValueError("degree mismatch")
        if F.degree not in (2, 3):
            raise ValueError("ext_zmod supports degrees 2 and 3; "
                             "use ext_bruteforce for degree 4")
        self.F = F
        self.G = G
        summands = []
        elements = []
        for lv in range(1, F.degree + 1):
            for g in range(F.groups[lv - 1].ngens):
                summands.append(_free(F.degree, lv))
                elements.append((lv, F.groups[lv - 1].unit(g)))
        self.P0 = ZModDirectSum([s.module for s in summands])
        self.pi = _sum_morphisms([
            summands[k].yoneda_morphism(F, elements[k][1]) * self.P0.projections[k]
            for k in range(len(summands))])
        self.K, self.incl = kernel_module(self.pi)
        hom_P0 = hom_zmod(self.P0.module, G)
        self._hom_K = hom_zmod(self.K, G)
        cols = [list(self._hom_K.coords_of(phi * self.incl))
                for phi in hom_P0.generators]
        restriction = AbHom.from_columns(hom_P0.group, self._hom_K.group, cols)
        self.group, self._proj = restriction.cokernel()
        self.generator_count = len(summands)

    def class_of_hom(self, psi):
        """Class in Ext of a morphism K -> G."""
        return self._proj(self._hom_K.coords_of(psi))


def ext_zmod(F, G):
    return ExtZmod(F, G)


def _solve_with_relations(matrix, relation_cols, rhs):
    """x with matrix*x ~ rhs modulo the relation lattice, or None."""
    n = matrix.cols
    if relation_cols:
        stacked = matrix.hstack(IntMatrix.from_columns(relation_cols, matrix.rows))
    else:
        stacked = matrix
    sol = solve(stacked, list(rhs))
    if sol is None:
        return None
    return sol[:n]


def _preimage(hom, element):
    """Some x in the source with hom(x) = element, or None."""
    return _solve_with_relations(hom.matrix, hom.target.relation_columns(), element)


def validate_short_exact(inj, surj):
    """Check 0 -> G -> E -> F -> 0 levelwise; raises on failure."""
    if inj.target is not surj.source and inj.target.groups != surj.source.groups:
        raise ValueError("middle modules differ")
    for i, (f, g) in enumerate(zip(inj.components, surj.components)):
        kerf, _, _ = f.kernel()
        if not kerf.is_trivial():
            raise ValueError(f"inclusion not injective at level {i + 1}")
        cokg, _ = g.cokernel()
        if not cokg.is_trivial():
            raise ValueError(f"projection not surjective at level {i + 1}")
        E = f.target
        im_gens = f.matrix.columns() + E.relation_columns()
        stacked = g.matrix.hstack(
            IntMatrix.from_columns(g.target.relation_columns(), g.target.ngens))
        Kb = kernel_basis(stacked)
        ker_gens = [[Kb.data[r][c] for r in range(E.ngens)]
                    for c in range(Kb.cols)] + E.relation_columns()
        if not sublattice_equal(E.ngens, im_gens, ker_gens):
            raise ValueError(f"not exact at level {i + 1}")


class ExtensionClassResult:
    __slots__ = ("ext", "coords", "is_zero", "splitting")

    def __init__(self, ext, coords, is_zero, splitting):
        self.ext = ext
        self.coords = coords
        self.is_zero = is_zero
        self.splitting = splitting


def extension_class(E, inj, surj, ext=None):
    """Class of 0 -> G -> E -> F -> 0 in ext_zmod(F, G).

    Also searches directly for a splitting morphism F -> E; the two verdicts
    are required to agree.
    """
    F = surj.target
    G = inj.source
    validate_short_exact(inj, surj)
    if ext is None:
        ext = ExtZmod(F, G)
    # lift the projective cover through E
    summands = []
    elements = []
    for lv in range(1, F.degree + 1):
        for g in range(F.groups[lv - 1].ngens):
            summands.append(_free(F.degree, lv))
            elements.append((lv, F.groups[lv - 1].unit(g)))
    lifts = []
    for k, (lv, gvec) in enumerate(elements):
        x = _preimage(surj.components[lv - 1], gvec)
        if x is None:
            raise AssertionError("projection admitted no preimage")
        lifts.append(summands[k].yoneda_morphism(E, E.groups[lv - 1].reduce(x))
                     * ext.P0.projections[k])
    lam = _sum_morphisms(lifts)
    chi = lam * ext.incl
    comps = []
    for i in range(F.degree):
        cols = []
        for g in range(ext.K.groups[i].ngens):
            val = chi.components[i](ext.K.groups[i].unit(g))
            c = _preimage(inj.components[i], val)
            if c is None:
                raise AssertionError("kernel image escaped the subobject")
            cols.append(list(G.groups[i].reduce(c)))
        comps.append(AbHom.from_columns(ext.K.groups[i], G.groups[i], cols))
    psi = ZModMorphism(ext.K, G, comps)
    coords = ext.class_of_hom(psi)
    is_zero = all(c == 0 for c in coords)

    # independent certificate: direct search for a section of surj
    hom_FE = hom_zmod(F, E)
    hom_FF = hom_zmod(F, F)
    comp_cols = [list(hom_FF.coords_of(surj * phi)) for phi in hom_FE.generators]
    comp = AbHom.from_columns(hom_FE.group, hom_FF.group, comp_cols)
    target = hom_FF.coords_of(ZModMorphism.identity(F))
    sol = _solve_with_relations(comp.matrix, hom_FF.group.relation_columns(),
                                target)
    splitting = None
    if sol is not None:
        splitting = hom_FE.from_coords(hom_FE.group.reduce(sol))
        assert (surj * splitting - ZModMorphism.identity(F)).is_zero()
    if (sol is not None) != is_zero:
        raise AssertionError("splitting search disagrees with the Ext class")
    return ExtensionClassResult(ext, coords, is_zero, splitting)


# ---------------------------------------------------------------------------
# brute force over extension data
# ---------------------------------------------------------------------------

def _word_matrix(module, word, level_if_empty=None):
    if not word:
        return IntMatrix.identity(module.groups[level_if_empty - 1].ngens)
    m = None
    for a in word:
        am = module.arrow(a).matrix
        m = am if m is None else m.mul(am)
    return m


class BruteForceExt:
    """Extension classification from levelwise data (gamma, u)."""

    __slots__ = ("F", "G", "relations", "group", "_sq", "_slots", "_offsets",
                 "_dim", "literal_checked", "oracle_flag")

    def __init__(self, F, G, relations=None, literal_limit=6000, dim_cap=3000):
        if F.degree != G.degree:
            raise ValueError("degree mismatch")
        degree = F.degree
        if degree == 4:
            rels = (relations if relations is not None else
                    F.relations if F.relations is not None else
                    G.relations if G.relations is not None else
                    default_degree4_relations())
            self.oracle_flag = "oracle-verified"
        else:
            rels = relations_for_degree(degree)
            self.oracle_flag = None
        self.F = F
        self.G = G
        self.relations = rels

        # data slots: gamma per torsion generator of F_i, u per arrow and
        # source generator of F
        slots = []
        for i in range(degree):
            for k, d in enumerate(F.groups[i].invariants):
                if d != 0:
                    slots.append(("gamma", i + 1, k, F.groups[i + 0].invariants[k]))
        for a in F.arrows():
            src = arrow_source_level(a)
            for k in range(F.groups[src - 1].ngens):
                slots.append(("u", a, k, None))
        offsets = {}
        dim = 0
        for s in slots:
            if s[0] == "gamma":
                _, lv, k, _ = s
                offsets[("gamma", lv, k)] = dim
                dim += G.groups[lv - 1].ngens
            else:
                _, a, k, _ = s
                tgt = arrow_target_level(a)
                offsets[("u", a, k)] = dim
                dim += G.groups[tgt - 1].ngens
        if dim > dim_cap:
            raise ResourceCapError(f"extension data dimension {dim} exceeds {dim_cap}")
        self._slots = slots
        self._offsets = offsets
        self._dim = dim

        rows, moduli = self._constraints()
        if rows:
            T = IntMatrix.from_rows(rows)
            relcols = []
            for r, d in enumerate(moduli):
                if d:
                    col = [0] * len(rows)
                    col[r] = d
                    relcols.append(col)
            stacked = T.hstack(IntMatrix.from_columns(relcols, len(rows)))
            Kb = kernel_basis(stacked)
            numerator = [[Kb.data[r][c] for r in range(dim)]
                         for c in range(Kb.cols)]
        else:
            numerator = None
        denominator = self._periodicity() + self._section_changes()
        self._sq = Subquotient(dim, numerator, denominator)
        self.group = self._sq.group

        self.literal_checked = False
        self._maybe_literal_check(numerator, literal_limit)

    # -- data-space bookkeeping ---------------------------------------------

    def _gamma_index(self, lv, k, w):
        return self._offsets[("gamma", lv, k)] + w

    def _u_index(self, a, k, w):
        return self._offsets[("u", a, k)] + w

    def _periodicity(self):
        cols = []
        for s in self._slots:
            if s[0] == "gamma":
                _, lv, k, _ = s
                G_i = self.G.groups[lv - 1]
                base = self._offsets[("gamma", lv, k)]
            else:
                _, a, k, _ = s
                G_i = self.G.groups[arrow_target_level(a) - 1]
                base = self._offsets[("u", a, k)]
            for w, d in enumerate(G_i.invariants):
                if d:
                    col = [0] * self._dim
                    col[base + w] = d
                    cols.append(col)
        return cols

    def _section_changes(self):
        """Data shifts induced by re-choosing the generator lifts."""
        F, G = self.F, self.G
        cols = []
        for lv in range(1, F.degree + 1):
            for k in range(F.groups[lv - 1].ngens):
                d_k = F.groups[lv - 1].invariants[k]
                for v in range(G.groups[lv - 1].ngens):
                    col = [0] * self._dim
                    if d_k != 0:
                        col[self._gamma_index(lv, k, v)] += d_k
                    for a in F.arrows():
                        src = arrow_source_level(a)
                        tgt = arrow_target_level(a)
                        if src == lv:
                            Ga = G.arrow(a).matrix
                            for w in range(G.groups[tgt - 1].ngens):
                                if Ga.data[w][v]:
                                    col[self._u_index(a, k, w)] += Ga.data[w][v]
                        if tgt == lv:
                            Fa = F.arrow(a).matrix
                            for kk in range(F.groups[src - 1].ngens):
                                if Fa.data[k][kk]:
                                    col[self._u_index(a, kk, v)] -= Fa.data[k][kk]
                    if any(col):
                        cols.append(col)
        return cols

    # -- the linear constraint system ----------------------------------------

    def _torsion_coeff(self, level, j):
        return self.F.groups[level - 1].invariants[j]

    def _constraints(self):
        F, G = self.F, self.G
        rows = []
        moduli = []
        # (1) well-definedness of each arrow on the torsion relations of E
        for a in F.arrows():
            src = arrow_source_level(a)
            tgt = arrow_target_level(a)
            Fa = F.arrow(a).matrix
            Ga = G.arrow(a).matrix
            Fs = F.groups[src - 1]
            Ft = F.groups[tgt - 1]
            Gt = G.groups[tgt - 1]
            Gs = G.groups[src - 1]
            for k, d_k in enumerate(Fs.invariants):
                if d_k == 0:
                    continue
                # residues of d_k * Fa e_k against the relations of F_tgt
                mcoef = {}
                for j, dj in enumerate(Ft.invariants):
                    val = d_k * Fa.data[j][k]
                    if dj == 0:
                        if val != 0:
                            raise AssertionError("F map not well defined")
                    else:
                        if val % dj != 0:
                            raise AssertionError("F map not well defined")
                        if val:
                            mcoef[j] = val // dj
                for w in range(Gt.ngens):
                    row = [0] * self._dim
                    row[self._u_index(a, k, w)] += d_k
                    if ("gamma", src, k) in self._offsets:
                        for v in range(Gs.ngens):
                            if Ga.data[w][v]:
                                row[self._gamma_index(src, k, v)] -= Ga.data[w][v]
                    for j, c in mcoef.items():
                        if ("gamma", tgt, j) in self._offsets:
                            row[self._gamma_index(tgt, j, w)] += c
                    if any(row):
                        rows.append(row)
                        moduli.append(Gt.invariants[w])
        # (2) each relation word evaluated on the lifted maps
        for name, terms in self.relations:
            src, tgt = word_levels(terms[0][1])
            Fs = F.groups[src - 1]
            Ft = F.groups[tgt - 1]
            Gt = G.groups[tgt - 1]
            # exact integer residue of the relation on the F side
            Z = None
            for c, word in terms:
                m = _word_matrix(F, word).scale(c)
                Z = m if Z is None else Z.add(m)
            mcoef = {}
            for k in range(Fs.ngens):
                for j, dj in enumerate(Ft.invariants):
                    val = Z.data[j][k]
                    if dj == 0:
                        if val != 0:
                            raise AssertionError(f"relation {name} fails on F")
                    else:
                        if val % dj != 0:
                            raise AssertionError(f"relation {name} fails on F")
                        if val:
                            mcoef[(k, j)] = val // dj
            # linear-in-u corrections from every split of every word
            ucoef = {}
            for c, word in terms:
                for idx, mid in enumerate(word):
                    left = word[:idx]
                    right = word[idx + 1:]
                    Gleft = _word_matrix(G, left,
                                         level_if_empty=arrow_target_level(mid))
                    Fright = _word_matrix(F, right,
                                          level_if_empty=arrow_source_level(mid))
                    for k in range(Fs.ngens):
                        for kk in range(F.groups[arrow_source_level(mid) - 1].ngens):
                            fr = Fright.data[kk][k]
                            if not fr:
                                continue
                            for w in range(Gt.ngens):
                                for v in range(G.groups[arrow_target_level(mid) - 1].ngens):
                                    gl = Gleft.data[w][v]
                                    if gl:
                                        key = (k, w, self._u_index(mid, kk, v))
                                        ucoef[key] = ucoef.get(key, 0) + c * gl * fr
            for k in range(Fs.ngens):
                for w in range(Gt.ngens):
                    row = [0] * self._dim
                    for (kk, ww, slot), cval in ucoef.items():
                        if kk == k and ww == w:
                            row[slot] += cval
                    for (kk, j), cval in mcoef.items():
                        if kk == k and ("gamma", tgt, j) in self._offsets:
                            row[self._gamma_index(tgt, j, w)] += cval
                    if any(row):
                        rows.append(row)
                        moduli.append(Gt.invariants[w])
        return rows, moduli

    # -- classes -------------------------------------------------------------

    def class_of_data(self, data):
        return self._sq.project(list(data))

    def data_of_extension(self, E, inj, surj):
        """Extract (gamma, u) data of an extension with middle module E."""
        validate_short_exact(inj, surj)
        F, G = self.F, self.G
        lifts = []
        for i in range(F.degree):
            level_lifts = []
            for k in range(F.groups[i].ngens):
                x = _preimage(surj.components[i], F.groups[i].unit(k))
                if x is None:
                    raise AssertionError("no preimage under the projection")
                level_lifts.append(list(x))
            lifts.append(level_lifts)
        data = [0] * self._dim
        for lv in range(1, F.degree + 1):
            Ei = inj.components[lv - 1].target
            for k, d_k in enumerate(F.groups[lv - 1].invariants):
                if d_k == 0:
                    continue
                val = Ei.reduce([d_k * t for t in lifts[lv - 1][k]])
                c = _preimage(inj.components[lv - 1], val)
                if c is None:
                    raise AssertionError("torsion image escaped the subobject")
                base = self._offsets[("gamma", lv, k)]
                for w, cv in enumerate(G.groups[lv - 1].reduce(c)):
                    data[base + w] = cv
        for a in F.arrows():
            src = arrow_source_level(a)
            tgt = arrow_target_level(a)
            Fa = F.arrow(a).matrix
            Ea = E.arrow(a)
            for k in range(F.groups[src - 1].ngens):
                img = list(Ea(lifts[src - 1][k]))
                for j in range(F.groups[tgt - 1].ngens):
                    cval = Fa.data[j][k]
                    if cval:
                        img = [x - cval * y for x, y in
                               zip(img, lifts[tgt - 1][j])]
                img = Ea.target.reduce(img)
                c = _preimage(inj.components[tgt - 1], img)
                if c is None:
                    raise AssertionError("arrow correction escaped the subobject")
                base = self._offsets[("u", a, k)]
                for w, cv in enumerate(G.groups[tgt - 1].reduce(c)):
                    data[base + w] = cv
        return data

    # -- literal enumeration cross-check --------------------------------------

    def _slot_orders(self):
        orders = []
        for s in self._slots:
            if s[0] == "gamma":
                _, lv, k, _ = s
                Gi = self.G.groups[lv - 1]
            else:
                _, a, k, _ = s
                Gi = self.G.groups[arrow_target_level(a) - 1]
            orders.extend(Gi.invariants)
        return orders

    def _maybe_literal_check(self, numerator, literal_limit):
        orders = self._slot_orders()
        if any(d == 0 for d in orders):
            return
        count = 1
        for d in orders:
            count *= d
            if count > literal_limit:
                return
        valid = []
        data = [0] * self._dim
        self._enumerate_literal(0, orders, data, valid)
        for d in valid:
            if self._sq._lattice.coefficients(d) is None:
                raise AssertionError("literal extension missed by the solver")
        expected = self._count_lattice_points(orders)
        if expected != len(valid):
            raise AssertionError("solver admits data with no literal diagram")
        self.literal_checked = True

    def _count_lattice_points(self, orders):
        # number of solution points in the finite data box
        from itertools import product as iproduct
        count = 0
        for point in iproduct(*[range(d) for d in orders]):
            if self._sq._lattice.coefficients(list(point)) is not None:
                count += 1
        return count

    def _enumerate_literal(self, idx, orders, data, valid):
        if idx == len(orders):
            if self._literal_diagram_valid(data):
                valid.append(list(data))
            return
        for v in range(orders[idx]):
            data[idx] = v
            self._enumerate_literal(idx + 1, orders, data, valid)
        data[idx] = 0

    def _literal_diagram_valid(self, data):
        F, G = self.F, self.G
        levels = []
        for lv in range(1, F.degree + 1):
            Fi, Gi = F.groups[lv - 1], G.groups[lv - 1]
            n = Fi.ngens + Gi.ngens
            cols = []
            for k, d in enumerate(Fi.invariants):
                if d == 0:
                    continue
                col = [0] * n
                col[k] = d
                base = self._offsets[("gamma", lv, k)]
                for w in range(Gi.ngens):
                    col[Fi.ngens + w] = -data[base + w]
                cols.append(col)
            for w, d in enumerate(Gi.invariants):
                if d:
                    col = [0] * n
                    col[Fi.ngens + w] = d
                    cols.append(col)
            levels.append(FgAbGroup.from_presentation(
                IntMatrix.from_columns(cols, n)))
        h = {}
        p = {}
        try:
            for a in F.arrows():
                kind, m, n_ = a
                src = arrow_source_level(a)
                tgt = arrow_target_level(a)
                Fs, Gs = F.groups[src - 1], G.groups[src - 1]
                Ft, Gt = F.groups[tgt - 1], G.groups[tgt - 1]
                rows = Ft.ngens + Gt.ngens
                colsn = Fs.ngens + Gs.ngens
                mat = IntMatrix.zero(rows, colsn)
                Fa = F.arrow(a).matrix
                Ga = G.arrow(a).matrix
                for k in range(Fs.ngens):
                    for j in range(Ft.ngens):
                        mat.data[j][k] = Fa.data[j][k]
                    base = self._offsets[("u", a, k)]
                    for w in range(Gt.ngens):
                        mat.data[Ft.ngens + w][k] = data[base + w]
                for v in range(Gs.ngens):
                    for w in range(Gt.ngens):
                        mat.data[Ft.ngens + w][Fs.ngens + v] = Ga.data[w][v]
                Es, Et = levels[src - 1], levels[tgt - 1]
                can = Et.to_can.mul(mat).mul(Es.from_can)
                hom = AbHom(Es, Et, can)
                (h if kind == "H" else p)[(m, n_)] = hom
        except ValueError:
            return False
        module = PolyZModule([levels[i] for i in range(F.degree)], h, p,
                             relations=self.relations if F.degree == 4 else None)
        for name, terms in self.relations:
            if not module.evaluate_relation(terms).is_zero():
                return False
        return True


def ext_bruteforce(F, G, relations=None, literal_limit=6000):
    return BruteForceExt(F, G, relations=relations, literal_limit=literal_limit)
