"""Finitely generated abelian groups and their homological algebra.

A group is a cokernel Z^n / (relation columns), held together with its
invariant-factor canonical form and the unimodular base change between
presentation and canonical generators.  Homomorphisms are integer matrices
on canonical generators, checked for well-definedness at construction.

The workhorse is `subquotient`: given lattices L' <= L <= Z^n it presents
L/L' and converts between ambient vectors and canonical coordinates.  Group
kernels, images, cokernels and chain-complex homology (with cycle lifting)
are all thin wrappers around it.
"""

from __future__ import annotations

from math import gcd

from .intlinalg import IntMatrix, IntLattice, kernel_basis, smith, solve


class FgAbGroup:
    """Finitely generated abelian group in invariant-factor form.

    invariants: divisibility chain (d1 | d2 | ...), no entry 1, with 0
    encoding an infinite cyclic factor; zeros trail.
    """

    __slots__ = ("presentation", "invariants", "to_can", "from_can", "gen_labels")

    def __init__(self, presentation, invariants, to_can, from_can, gen_labels=None):
        self.presentation = presentation
        self.invariants = tuple(invariants)
        self.to_can = to_can
        self.from_can = from_can
        self.gen_labels = tuple(gen_labels) if gen_labels is not None else None
        for i in range(len(self.invariants) - 1):
            a, b = self.invariants[i], self.invariants[i + 1]
            if a == 1 or b == 1:
                raise ValueError("invariant factor 1 is not stored")
            if a == 0 and b != 0:
                raise ValueError("zeros must trail the chain")
            if a != 0 and b != 0 and b % a != 0:
                raise ValueError("invariants must form a divisibility chain")

    @classmethod
    def from_presentation(cls, R, labels=None):
        """Group Z^n / (column lattice of R)."""
        n = R.rows
        if _is_canonical_diagonal(R):
            inv = [R.data[i][i] for i in range(min(n, R.cols))]
            inv += [0] * (n - len(inv))
            ident = IntMatrix.identity(n)
            return cls(R, inv, ident, ident, labels)
        dec = smith(R)
        m = min(n, R.cols)
        diag = [dec.S.data[i][i] for i in range(m)] + [0] * (n - m)
        keep = [i for i in range(n) if diag[i] != 1]
        inv = [diag[i] for i in keep]
        to_can = IntMatrix.from_rows([dec.U.data[i] for i in keep]) if keep \
            else IntMatrix(0, n, [])
        from_can = IntMatrix.from_columns([dec.Uinv.column(i) for i in keep], n)
        return cls(R, inv, to_can, from_can, labels)

    @classmethod
    def from_invariants(cls, invariants, labels=None):
        invariants = [abs(d) for d in invariants]
        return cls.from_presentation(IntMatrix.diagonal(invariants), labels)

    @classmethod
    def trivial(cls):
        return cls.from_invariants([])

    @classmethod
    def free(cls, r, labels=None):
        return cls.from_invariants([0] * r, labels)

    @classmethod
    def cyclic(cls, d):
        return cls.from_invariants([d])

    @property
    def ngens(self):
        return len(self.invariants)

    def is_trivial(self):
        return not self.invariants

    def is_finite(self):
        return all(d != 0 for d in self.invariants)

    def order(self):
        if not self.is_finite():
            return None
        n = 1
        for d in self.invariants:
            n *= d
        return n

    def rank(self):
        return sum(1 for d in self.invariants if d == 0)

    def reduce(self, vec):
        """Normalize canonical coordinates modulo the invariant factors."""
        return tuple(x % d if d else x for x, d in zip(vec, self.invariants))

    def is_zero_element(self, vec):
        return all(v == 0 for v in self.reduce(vec))

    def zero(self):
        return (0,) * self.ngens

    def unit(self, i):
        return tuple(1 if j == i else 0 for j in range(self.ngens))

    def elements(self):
        """All elements (finite groups only)."""
        if not self.is_finite():
            raise ValueError("infinite group")
        def rec(i):
            if i == self.ngens:
                yield ()
                return
            for rest in rec(i + 1):
                for x in range(self.invariants[i]):
                    yield (x,) + rest
        return list(rec(0))

    def relation_columns(self):
        """Generators of the relation lattice in canonical coordinates."""
        return [[self.invariants[i] if j == i else 0 for j in range(self.ngens)]
                for i in range(self.ngens) if self.invariants[i] != 0]

    def project_from_presentation(self, vec):
        return self.reduce(self.to_can.apply(list(vec)))

    def lift_to_presentation(self, coords):
        return self.from_can.apply(list(coords))

    def __eq__(self, other):
        if not isinstance(other, FgAbGroup):
            return NotImplemented
        return self.invariants == other.invariants

    def __hash__(self):
        return hash(self.invariants)

    def __repr__(self):
        return f"FgAbGroup{self.invariants}"

    def __str__(self):
        return render_invariants(self.invariants)


def render_invariants(invariants):
    if not invariants:
        return "0"
    return "⊕".join("Z" if d == 0 else f"Z/{d}" for d in invariants)


def _is_canonical_diagonal(R):
    """True if R is diag(d1..dk) with a valid chain, no 1s, zeros trailing."""
    n, m = R.rows, R.cols
    prev = None
    for i in range(n):
        for j in range(m):
            if i != j and R.data[i][j] != 0:
                return False
        d = R.data[i][i] if i < m else 0
        if d == 1 or d < 0:
            return False
        if prev is not None:
            if prev == 0 and d != 0:
                return False
            if prev != 0 and d != 0 and d % prev != 0:
                return False
        prev = d
    return True


class Subquotient:
    """Presentation of (numerator lattice)/(denominator lattice) in Z^n."""

    __slots__ = ("group", "basis", "_lattice", "n")

    def __init__(self, n, numerator, denominator):
        self.n = n
        num = IntLattice(n)
        if numerator is None:
            for i in range(n):
                num.add([1 if j == i else 0 for j in range(n)])
        else:
            num.add_all(numerator)
        den = IntLattice(n)
        den.add_all(denominator)
        cols = []
        for row in den.basis:
            c = num.coefficients(row)
            if c is None:
                raise ValueError("denominator lattice not inside numerator")
            cols.append(c)
        self._lattice = num
        self.basis = [list(b) for b in num.basis]
        self.group = FgAbGroup.from_presentation(
            IntMatrix.from_columns(cols, len(self.basis)))

    def project(self, vec):
        """Class of an ambient vector (must lie in the numerator lattice)."""
        c = self._lattice.coefficients(vec)
        if c is None:
            raise ValueError("vector not in the numerator lattice")
        return self.group.project_from_presentation(c)

    def lift(self, coords):
        """An ambient representative of a class."""
        c = self.group.lift_to_presentation(coords)
        out = [0] * self.n
        for ci, row in zip(c, self.basis):
            if ci:
                for t, v in enumerate(row):
                    if v:
                        out[t] += ci * v
        return out


class AbHom:
    """Homomorphism of FgAbGroups as a matrix on canonical generators."""

    __slots__ = ("source", "target", "matrix")

    def __init__(self, source, target, matrix):
        if matrix.rows != target.ngens or matrix.cols != source.ngens:
            raise ValueError("matrix shape does not match endpoints")
        data = [[x % d if d else x for x in row]
                for row, d in zip(matrix.data, list(target.invariants))]
        self.source = source
        self.target = target
        self.matrix = IntMatrix(matrix.rows, matrix.cols, data)
        for i, a in enumerate(source.invariants):
            if a == 0:
                continue
            col = self.matrix.column(i)
            if not target.is_zero_element([a * x for x in col]):
                raise ValueError(
                    f"not well defined: generator {i} of order {a} "
                    f"maps to an element of larger order")

    @classmethod
    def zero(cls, source, target):
        return cls(source, target, IntMatrix.zero(target.ngens, source.ngens))

    @classmethod
    def identity(cls, group):
        return cls(group, group, IntMatrix.identity(group.ngens))

    @classmethod
    def from_columns(cls, source, target, cols):
        return cls(source, target, IntMatrix.from_columns(cols, target.ngens))

    def __call__(self, vec):
        return self.target.reduce(self.matrix.apply(list(vec)))

    def __mul__(self, other):
        """Composition self after other."""
        if not isinstance(other, AbHom):
            return NotImplemented
        if other.target != self.source:
            raise ValueError("composition endpoint mismatch")
        return AbHom(other.source, self.target, self.matrix.mul(other.matrix))

    def __add__(self, other):
        if (self.source, self.target) != (other.source, other.target):
            raise ValueError("sum endpoint mismatch")
        return AbHom(self.source, self.target, self.matrix.add(other.matrix))

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        return AbHom(self.source, self.target, self.matrix.scale(c))

    def is_zero(self):
        return all(self.target.is_zero_element(col)
                   for col in self.matrix.columns())

    def __eq__(self, other):
        if not isinstance(other, AbHom):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and (self - other).is_zero())

    def __repr__(self):
        return f"AbHom({self.source} -> {self.target}, {self.matrix.data})"

    def kernel(self):
        """(K, incl) with K = ker(self) and incl : K -> source."""
        stacked = self.matrix.hstack(
            IntMatrix.from_columns(self.target.relation_columns(),
                                   self.target.ngens))
        K = kernel_basis(stacked)
        s = self.source.ngens
        numerator = [[K.data[i][j] for i in range(s)] for j in range(K.cols)]
        sq = Subquotient(s, numerator, self.source.relation_columns())
        incl = AbHom.from_columns(sq.group, self.source,
                                  [sq.lift(sq.group.unit(i))
                                   for i in range(sq.group.ngens)])
        return sq.group, incl, sq

    def image(self):
        """(I, incl) with I = im(self) as a subgroup of the target."""
        t = self.target.ngens
        numerator = self.matrix.columns() + self.target.relation_columns()
        sq = Subquotient(t, numerator, self.target.relation_columns())
        incl = AbHom.from_columns(sq.group, self.target,
                                  [sq.lift(sq.group.unit(i))
                                   for i in range(sq.group.ngens)])
        return sq.group, incl, sq

    def cokernel(self):
        """(C, proj) with C = coker(self)."""
        pres = self.matrix.hstack(
            IntMatrix.from_columns(self.target.relation_columns(),
                                   self.target.ngens))
        C = FgAbGroup.from_presentation(pres)
        proj = AbHom(self.target, C, C.to_can)
        return C, proj


def sublattice_equal(n, vecs1, vecs2):
    """Do two generating sets span the same sublattice of Z^n?"""
    l1 = IntLattice(n)
    l1.add_all(vecs1)
    l2 = IntLattice(n)
    l2.add_all(vecs2)
    return (all(v in l2 for v in l1.basis)
            and all(v in l1 for v in l2.basis))


class DirectSum:
    """Direct sum with inclusion and projection homomorphisms."""

    __slots__ = ("group", "parts", "inclusions", "projections", "_offsets")

    def __init__(self, parts):
        self.parts = list(parts)
        offsets = []
        total = 0
        for g in self.parts:
            offsets.append(total)
            total += g.ngens
        self._offsets = offsets
        pres_cols = []
        for k, g in enumerate(self.parts):
            for col in g.relation_columns():
                full = [0] * total
                full[offsets[k]:offsets[k] + g.ngens] = col
                pres_cols.append(full)
        self.group = FgAbGroup.from_presentation(
            IntMatrix.from_columns(pres_cols, total))
        self.inclusions = []
        self.projections = []
        for k, g in enumerate(self.parts):
            o = offsets[k]
            inc_cols = []
            for i in range(g.ngens):
                full = [0] * total
                full[o + i] = 1
                inc_cols.append(list(self.group.project_from_presentation(full)))
            self.inclusions.append(AbHom.from_columns(g, self.group, inc_cols))
            proj_rows = [self.group.from_can.data[o + i] for i in range(g.ngens)]
            self.projections.append(
                AbHom(self.group, g,
                      IntMatrix.from_rows(proj_rows) if g.ngens
                      else IntMatrix(0, self.group.ngens, [])))


def direct_sum(*parts):
    return DirectSum(parts)


def _cyclic_hom_order(a, b):
    """Order of Hom(Z/a, Z/b) with 0 encoding Z, together with the
    matrix entry of its generator (None when the group vanishes)."""
    if a == 0:
        return (b, 1)            # Hom(Z, Z/b) = Z/b ; Hom(Z, Z) = Z
    if b == 0:
        return (1, None)         # Hom(Z/a, Z) = 0
    g = gcd(a, b)
    if g == 1:
        return (1, None)
    return (g, b // g)


class HomGroup:
    """Hom(A, B) together with generating homomorphisms."""

    __slots__ = ("A", "B", "group", "summands", "generators")

    def __init__(self, A, B):
        self.A = A
        self.B = B
        self.summands = []
        for i, a in enumerate(A.invariants):
            for j, b in enumerate(B.invariants):
                order, entry = _cyclic_hom_order(a, b)
                if order != 1:
                    self.summands.append((i, j, order, entry))
        self.group = FgAbGroup.from_presentation(
            IntMatrix.diagonal([o for (_, _, o, _) in self.summands]))
        self.generators = [self.from_raw(self._unit(k))
                           for k in range(len(self.summands))]

    def _unit(self, k):
        return [1 if t == k else 0 for t in range(len(self.summands))]

    def from_raw(self, raw):
        m = IntMatrix.zero(self.B.ngens, self.A.ngens)
        for c, (i, j, _, entry) in zip(raw, self.summands):
            if c:
                m.data[j][i] += c * entry
        return AbHom(self.A, self.B, m)

    def from_coords(self, coords):
        return self.from_raw(self.group.lift_to_presentation(coords))

    def raw_of(self, f):
        raw = []
        for (i, j, order, entry) in self.summands:
            m = f.matrix.data[j][i]
            if m % entry != 0:
                raise ValueError("homomorphism not aligned with generators")
            c = m // entry
            raw.append(c % order if order else c)
        return raw

    def coords_of(self, f):
        """Canonical coordinates of a homomorphism A -> B."""
        if f.source != self.A or f.target != self.B:
            raise ValueError("endpoint mismatch")
        return self.group.project_from_presentation(self.raw_of(f))


def hom_group(A, B):
    return HomGroup(A, B)


def ext_group(A, B):
    """Ext^1(A, B) from the invariant-factor resolution of A."""
    factors = []
    for a in A.invariants:
        if a == 0:
            continue
        # Ext(Z/a, B) = B / aB
        for b in B.invariants:
            d = a if b == 0 else gcd(a, b)
            if d != 1:
                factors.append(d)
    return FgAbGroup.from_presentation(IntMatrix.diagonal(factors))


class TensorProduct:
    """A (x) B with generator provenance (pairs of canonical generators)."""

    __slots__ = ("A", "B", "group", "pairs")

    def __init__(self, A, B):
        self.A = A
        self.B = B
        self.pairs = [(i, j) for i in range(A.ngens) for j in range(B.ngens)]
        rel = []
        npairs = len(self.pairs)
        for k, (i, j) in enumerate(self.pairs):
            a, b = A.invariants[i], B.invariants[j]
            for d in (a, b):
                if d:
                    col = [0] * npairs
                    col[k] = d
                    rel.append(col)
        self.group = FgAbGroup.from_presentation(
            IntMatrix.from_columns(rel, npairs))

    def index(self, i, j):
        return i * self.B.ngens + j

    def pure(self, avec, bvec):
        """Class of a (x) b."""
        raw = [0] * len(self.pairs)
        for k, (i, j) in enumerate(self.pairs):
            raw[k] = avec[i] * bvec[j]
        return self.group.project_from_presentation(raw)

    def induced(self, f, g, target=None):
        """f (x) g : A (x) B -> A' (x) B' on canonical generators."""
        if target is None:
            target = TensorProduct(f.target, g.target)
        # image of each generator pair, in canonical coordinates of the target
        pair_cols = []
        for (i, j) in self.pairs:
            raw = [0] * len(target.pairs)
            for k, (s, t) in enumerate(target.pairs):
                raw[k] = f.matrix.data[s][i] * g.matrix.data[t][j]
            pair_cols.append(list(target.group.project_from_presentation(raw)))
        cols = []
        for c in range(self.group.ngens):
            raw = self.group.lift_to_presentation(self.group.unit(c))
            out = [0] * target.group.ngens
            for coeff, col in zip(raw, pair_cols):
                if coeff:
                    for t, v in enumerate(col):
                        out[t] += coeff * v
            cols.append(list(target.group.reduce(out)))
        m = IntMatrix.from_columns(cols, target.group.ngens)
        return AbHom(self.group, target.group, m)


def tensor(A, B):
    return TensorProduct(A, B)


def tor(A, B):
    """Tor(A, B) in canonical form."""
    factors = []
    for a in A.invariants:
        for b in B.invariants:
            if a and b:
                d = gcd(a, b)
                if d != 1:
                    factors.append(d)
    return FgAbGroup.from_presentation(IntMatrix.diagonal(factors))


class HomologyResult:
    """Homology group at one spot of a complex, with cycle lifting."""

    __slots__ = ("group", "_sq", "_ambient")

    def __init__(self, group, sq, ambient):
        self.group = group
        self._sq = sq
        self._ambient = ambient

    def to_class(self, cycle):
        """Class of a cycle given in canonical coordinates of C_i."""
        return self._sq.project(list(cycle))

    def from_class(self, coords):
        """A representative cycle of a homology class."""
        return self._ambient.reduce(self._sq.lift(coords))


class ChainComplexAb:
    """Bounded chain complex of FgAbGroups; d_i : C_i -> C_{i-1}."""

    __slots__ = ("groups", "diffs")

    def __init__(self, groups, diffs, check=True):
        self.groups = list(groups)
        self.diffs = dict(diffs)
        for i, d in self.diffs.items():
            if d.source != self.groups[i] or d.target != self.groups[i - 1]:
                raise ValueError(f"differential {i} has wrong endpoints")
        if check:
            for i in self.diffs:
                if i + 1 in self.diffs:
                    if not (self.diffs[i] * self.diffs[i + 1]).is_zero():
                        raise ValueError(f"d{i} o d{i+1} != 0")

    def __len__(self):
        return len(self.groups)

    def homology(self, i):
        if not (0 <= i < len(self.groups)):
            raise ValueError("index out of range")
        C = self.groups[i]
        n = C.ngens
        if i in self.diffs:
            d = self.diffs[i]
            stacked = d.matrix.hstack(
                IntMatrix.from_columns(d.target.relation_columns(),
                                       d.target.ngens))
            K = kernel_basis(stacked)
            numerator = [[K.data[r][c] for r in range(n)]
                         for c in range(K.cols)]
        else:
            numerator = None
        denominator = list(C.relation_columns())
        if i + 1 in self.diffs:
            denominator += self.diffs[i + 1].matrix.columns()
        sq = Subquotient(n, numerator, denominator)
        return HomologyResult(sq.group, sq, C)

    def shift(self, k):
        groups = [FgAbGroup.trivial()] * k + self.groups
        diffs = {i + k: d for i, d in self.diffs.items()}
        return ChainComplexAb(groups, diffs, check=False)


def homology(complex_, i):
    return complex_.homology(i)


def induced_on_homology(h_src, h_tgt, chain_map):
    """Map on homology induced by one level of a chain map."""
    cols = []
    for k in range(h_src.group.ngens):
        z = h_src.from_class(h_src.group.unit(k))
        cols.append(list(h_tgt.to_class(chain_map(z))))
    return AbHom.from_columns(h_src.group, h_tgt.group, cols)
