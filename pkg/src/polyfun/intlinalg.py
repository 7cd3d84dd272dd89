"""Exact integer linear algebra.

Everything downstream (group canonicalization, Hom/Ext solving, homology)
reduces to three primitives over Z: Smith normal form with transformation
matrices, kernel bases, and exact linear solving.  Matrices are dense,
row-major lists of Python ints, so arithmetic is arbitrary precision by
construction.  All public operations treat their inputs as immutable.
"""

from __future__ import annotations


def xgcd(a, b):
    """Return (g, x, y) with g = gcd(a, b) >= 0 and g == x*a + y*b."""
    x0, x1 = 1, 0
    y0, y1 = 0, 1
    while b:
        q = a // b
        a, b = b, a - q * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


class IntMatrix:
    """Dense integer matrix."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows, cols, data):
        if len(data) != rows or any(len(r) != cols for r in data):
            raise ValueError("shape mismatch")
        self.rows = rows
        self.cols = cols
        self.data = [list(r) for r in data]

    @classmethod
    def from_rows(cls, data):
        rows = len(data)
        cols = len(data[0]) if rows else 0
        return cls(rows, cols, data)

    @classmethod
    def zero(cls, rows, cols):
        return cls(rows, cols, [[0] * cols for _ in range(rows)])

    @classmethod
    def identity(cls, n):
        m = cls.zero(n, n)
        for i in range(n):
            m.data[i][i] = 1
        return m

    @classmethod
    def diagonal(cls, entries):
        n = len(entries)
        m = cls.zero(n, n)
        for i, d in enumerate(entries):
            m.data[i][i] = d
        return m

    @classmethod
    def from_columns(cls, cols, height):
        m = cls.zero(height, len(cols))
        for j, c in enumerate(cols):
            for i, v in enumerate(c):
                m.data[i][j] = v
        return m

    def __eq__(self, other):
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return (self.rows, self.cols) == (other.rows, other.cols) and self.data == other.data

    def __repr__(self):
        return f"IntMatrix({self.rows}x{self.cols}, {self.data})"

    def copy(self):
        return IntMatrix(self.rows, self.cols, self.data)

    def transpose(self):
        return IntMatrix(self.cols, self.rows,
                         [[self.data[i][j] for i in range(self.rows)]
                          for j in range(self.cols)])

    def column(self, j):
        return [self.data[i][j] for i in range(self.rows)]

    def columns(self):
        return [self.column(j) for j in range(self.cols)]

    def mul(self, other):
        if self.cols != other.rows:
            raise ValueError("dimension mismatch in product")
        out = [[0] * other.cols for _ in range(self.rows)]
        odata = other.data
        for i, row in enumerate(self.data):
            acc = out[i]
            for k, a in enumerate(row):
                if a:
                    brow = odata[k]
                    for j, b in enumerate(brow):
                        if b:
                            acc[j] += a * b
        return IntMatrix(self.rows, other.cols, out)

    def __mul__(self, other):
        if isinstance(other, IntMatrix):
            return self.mul(other)
        return NotImplemented

    def add(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("dimension mismatch in sum")
        return IntMatrix(self.rows, self.cols,
                         [[a + b for a, b in zip(r1, r2)]
                          for r1, r2 in zip(self.data, other.data)])

    def __add__(self, other):
        return self.add(other)

    def __sub__(self, other):
        return self.add(other.scale(-1))

    def scale(self, c):
        return IntMatrix(self.rows, self.cols,
                         [[c * a for a in r] for r in self.data])

    def apply(self, vec):
        """Matrix times column vector, returned as a list."""
        if len(vec) != self.cols:
            raise ValueError("dimension mismatch in apply")
        out = []
        for row in self.data:
            s = 0
            for a, x in zip(row, vec):
                if a and x:
                    s += a * x
            out.append(s)
        return out

    def hstack(self, other):
        if self.rows != other.rows:
            raise ValueError("row mismatch in hstack")
        return IntMatrix(self.rows, self.cols + other.cols,
                         [r1 + r2 for r1, r2 in zip(self.data, other.data)])

    def vstack(self, other):
        if self.cols != other.cols:
            raise ValueError("column mismatch in vstack")
        return IntMatrix(self.rows + other.rows, self.cols,
                         self.data + other.data)

    def is_zero(self):
        return all(all(a == 0 for a in r) for r in self.data)

    def det(self):
        """Determinant by fraction-free (Bareiss) elimination."""
        if self.rows != self.cols:
            raise ValueError("determinant of non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        a = [row[:] for row in self.data]
        sign = 1
        prev = 1
        for k in range(n - 1):
            if a[k][k] == 0:
                for i in range(k + 1, n):
                    if a[i][k] != 0:
                        a[k], a[i] = a[i], a[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
                a[i][k] = 0
            prev = a[k][k]
        return sign * a[n - 1][n - 1]


class SmithDecomposition:
    """U * A * V == S with U, V unimodular and S diagonal.

    The diagonal entries are nonnegative and form a divisibility chain
    d1 | d2 | ... with zeros trailing.
    """

    __slots__ = ("U", "S", "V", "Uinv", "Vinv")

    def __init__(self, U, S, V, Uinv, Vinv):
        self.U = U
        self.S = S
        self.V = V
        self.Uinv = Uinv
        self.Vinv = Vinv

    def diagonal(self):
        n = min(self.S.rows, self.S.cols)
        return [self.S.data[i][i] for i in range(n)]

    def rank(self):
        return sum(1 for d in self.diagonal() if d != 0)


def _find_pivot(a, rows, cols, k):
    """Smallest nonzero |entry| in the trailing submatrix, ties by (row, col)."""
    best = None
    for i in range(k, rows):
        ai = a[i]
        for j in range(k, cols):
            v = ai[j]
            if v:
                av = abs(v)
                if best is None or av < best[0]:
                    best = (av, i, j)
                    if av == 1:
                        return best
    return best


def smith(A):
    """Smith normal form with transformations and their inverses.

    Pivoting picks the minimal absolute value with deterministic (row, col)
    tie-breaking, so the output is reproducible.
    """
    rows, cols = A.rows, A.cols
    a = [row[:] for row in A.data]
    U = IntMatrix.identity(rows)
    Uinv = IntMatrix.identity(rows)
    V = IntMatrix.identity(cols)
    Vinv = IntMatrix.identity(cols)
    u, ui = U.data, Uinv.data
    v, vi = V.data, Vinv.data

    def row_swap(i, k):
        a[i], a[k] = a[k], a[i]
        u[i], u[k] = u[k], u[i]
        for r in ui:
            r[i], r[k] = r[k], r[i]

    def col_swap(j, k):
        for r in a:
            r[j], r[k] = r[k], r[j]
        for r in v:
            r[j], r[k] = r[k], r[j]
        vi[j], vi[k] = vi[k], vi[j]

    def row_add(i, k, q):
        # row i += q * row k
        ai, ak = a[i], a[k]
        for j in range(cols):
            if ak[j]:
                ai[j] += q * ak[j]
        uik, ukk = u[i], u[k]
        for j in range(rows):
            if ukk[j]:
                uik[j] += q * ukk[j]
        for r in ui:
            if r[i]:
                r[k] -= q * r[i]

    def col_add(j, k, q):
        # col j += q * col k
        for r in a:
            if r[k]:
                r[j] += q * r[k]
        for r in v:
            if r[k]:
                r[j] += q * r[k]
        vij, vik = vi[j], vi[k]
        for t in range(cols):
            if vij[t]:
                vik[t] -= q * vij[t]

    def row_negate(i):
        a[i] = [-x for x in a[i]]
        u[i] = [-x for x in u[i]]
        for r in ui:
            r[i] = -r[i]

    n = min(rows, cols)

    def clear_from(k0):
        # diagonalize the trailing submatrix starting at position k0
        for k in range(k0, n):
            piv = _find_pivot(a, rows, cols, k)
            if piv is None:
                return
            _, pi, pj = piv
            if pi != k:
                row_swap(pi, k)
            if pj != k:
                col_swap(pj, k)
            # clear row and column k, re-pivoting as remainders shrink
            while True:
                changed = False
                for i in range(k + 1, rows):
                    if a[i][k]:
                        q = a[i][k] // a[k][k]
                        row_add(i, k, -q)
                        if a[i][k]:
                            row_swap(i, k)
                            changed = True
                for j in range(k + 1, cols):
                    if a[k][j]:
                        q = a[k][j] // a[k][k]
                        col_add(j, k, -q)
                        if a[k][j]:
                            col_swap(j, k)
                            changed = True
                if not changed:
                    break
            if a[k][k] < 0:
                row_negate(k)

    clear_from(0)

    # enforce the divisibility chain d_i | d_{i+1}: fold an offending row in
    # and rediagonalize; the pivot at i shrinks to a gcd, so this terminates
    i = 0
    while i < n - 1:
        di = a[i][i]
        if di != 0:
            bad = None
            for j in range(i + 1, n):
                dj = a[j][j]
                if dj % di != 0:
                    bad = j
                    break
            if bad is not None:
                row_add(i, bad, 1)
                clear_from(i)
                continue
        i += 1

    S = IntMatrix(rows, cols, a)
    return SmithDecomposition(IntMatrix(rows, rows, u), S, IntMatrix(cols, cols, v),
                              IntMatrix(rows, rows, ui), IntMatrix(cols, cols, vi))


def invert_unimodular(M):
    """Inverse of a unimodular integer matrix by integer Gauss-Jordan."""
    n = M.rows
    if n != M.cols:
        raise ValueError("not square")
    a = [row[:] + [1 if i == j else 0 for j in range(n)]
         for i, row in enumerate(M.data)]
    for k in range(n):
        # gcd-combine rows k..n-1 until the pivot divides everything below
        while True:
            pidx = None
            best = None
            for i in range(k, n):
                x = a[i][k]
                if x and (best is None or abs(x) < best):
                    best, pidx = abs(x), i
            if pidx is None:
                raise ArithmeticError("matrix is singular")
            a[k], a[pidx] = a[pidx], a[k]
            done = True
            for i in range(k + 1, n):
                if a[i][k]:
                    q = a[i][k] // a[k][k]
                    ak = a[k]
                    a[i] = [x - q * y for x, y in zip(a[i], ak)]
                    if a[i][k]:
                        done = False
            if done:
                break
        if abs(a[k][k]) != 1:
            raise ArithmeticError("matrix is not unimodular")
        if a[k][k] == -1:
            a[k] = [-x for x in a[k]]
        for i in range(k):
            if a[i][k]:
                q = a[i][k]
                ak = a[k]
                a[i] = [x - q * y for x, y in zip(a[i], ak)]
    return IntMatrix(n, n, [row[n:] for row in a])


def kernel_basis(A):
    """Columns form a Z-basis of {x : A x = 0}."""
    dec = smith(A)
    n = min(A.rows, A.cols)
    keep = [j for j in range(A.cols)
            if j >= n or dec.S.data[j][j] == 0]
    cols = [dec.V.column(j) for j in keep]
    return IntMatrix.from_columns(cols, A.cols)


def solve(A, b):
    """One integer solution x of A x = b, or None if none exists."""
    if len(b) != A.rows:
        raise ValueError("dimension mismatch in solve")
    dec = smith(A)
    c = dec.U.apply(list(b))
    n = min(A.rows, A.cols)
    y = [0] * A.cols
    for i in range(A.rows):
        d = dec.S.data[i][i] if i < n else 0
        if d == 0:
            if c[i] != 0:
                return None
        else:
            if c[i] % d != 0:
                return None
            if i < A.cols:
                y[i] = c[i] // d
    return dec.V.apply(y)


class IntLattice:
    """Subgroup of Z^n held in integer row-echelon form.

    Supports incremental span extension, membership, and expressing a member
    in terms of the echelon basis.  Built for streams of many sparse vectors
    (chain-complex images), where a full Smith form would be wasteful.
    """

    __slots__ = ("n", "pivot_of_row", "row_of_pivot", "basis")

    def __init__(self, n):
        self.n = n
        self.pivot_of_row = []
        self.row_of_pivot = {}
        self.basis = []

    def add(self, vec):
        """Extend the lattice by the span of vec."""
        if len(vec) != self.n:
            raise ValueError("dimension mismatch")
        vec = list(vec)
        n = self.n
        j = 0
        while j < n:
            x = vec[j]
            if x == 0:
                j += 1
                continue
            r = self.row_of_pivot.get(j)
            if r is None:
                self._insert(j, vec)
                return
            row = self.basis[r]
            p = row[j]
            if x % p == 0:
                q = x // p
                for t in range(j, n):
                    if row[t]:
                        vec[t] -= q * row[t]
            else:
                g, s, t_ = xgcd(p, x)
                pg, xg = p // g, x // g
                for t in range(j, n):
                    rv, vv = row[t], vec[t]
                    row[t] = s * rv + t_ * vv
                    vec[t] = -xg * rv + pg * vv
            j += 1

    def _insert(self, pivot, vec):
        pos = 0
        while pos < len(self.pivot_of_row) and self.pivot_of_row[pos] < pivot:
            pos += 1
        self.basis.insert(pos, vec)
        self.pivot_of_row.insert(pos, pivot)
        self.row_of_pivot = {p: i for i, p in enumerate(self.pivot_of_row)}

    def add_all(self, vecs):
        for v in vecs:
            self.add(v)

    def reduce(self, vec):
        """Remainder of vec after greedy elimination against the basis."""
        vec = list(vec)
        n = self.n
        for r, j in enumerate(self.pivot_of_row):
            x = vec[j]
            if x == 0:
                continue
            row = self.basis[r]
            p = row[j]
            q = x // p
            if q:
                for t in range(j, n):
                    if row[t]:
                        vec[t] -= q * row[t]
        return vec

    def __contains__(self, vec):
        return all(x == 0 for x in self.reduce(vec))

    def coefficients(self, vec):
        """Coefficients c with sum(c_i * basis_i) == vec, or None."""
        vec = list(vec)
        n = self.n
        coeffs = [0] * len(self.basis)
        for r, j in enumerate(self.pivot_of_row):
            x = vec[j]
            if x == 0:
                continue
            row = self.basis[r]
            p = row[j]
            if x % p != 0:
                return None
            q = x // p
            coeffs[r] = q
            for t in range(j, n):
                if row[t]:
                    vec[t] -= q * row[t]
        if any(vec):
            return None
        return coeffs

    def rank(self):
        return len(self.basis)
