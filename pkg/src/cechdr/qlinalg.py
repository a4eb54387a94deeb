"""Exact linear algebra over the rationals.

Every homology rank in this package bottoms out in a kernel, image or
solve on a matrix with rational entries, so this module is the arithmetic
floor. No floats anywhere, no rounding ever. Matrices are stored sparsely
(dict per row) because the matrices that actually show up downstream are
block-structured differential operators with small integer entries.

Subspaces are kept in canonical reduced row echelon form, so equality of
subspaces is literal equality of bases. That choice is load-bearing:
homology presentations, quotient coordinates and mediating-map coordinates
all read coefficients off echelon bases directly instead of re-solving.
"""

from __future__ import annotations

try:
    from gmpy2 import mpq as RAT
except ImportError:  # pragma: no cover - mirror always has gmpy2
    from fractions import Fraction as RAT

ZERO = RAT(0)
ONE = RAT(1)


def rat(x, y=None):
    """Coerce to the rational type. Accepts ints, rationals and 'p/q' strings."""
    if y is not None:
        return RAT(x, y)
    if isinstance(x, str):
        return RAT(x)
    return RAT(x)


class SubspaceNotContained(Exception):
    """Raised by quotient_dim when the would-be subobject is not contained."""


# ---------------------------------------------------------------------------
# vectors: plain tuples of RAT


def vzero(n):
    return (ZERO,) * n


def vadd(u, v):
    return tuple(a + b for a, b in zip(u, v))


def vsub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def vscale(c, u):
    c = rat(c)
    return tuple(c * a for a in u)


def dot(u, v):
    s = ZERO
    for a, b in zip(u, v):
        if a and b:
            s += a * b
    return s


# ---------------------------------------------------------------------------
# sparse elimination core
#
# Rows are dicts {col: nonzero RAT}. Forward elimination buckets rows by
# leading column and picks, within a bucket, a pivot with unit value and few
# entries (cheap Markowitz). Back-substitution runs once at the end, which
# avoids the fill blowup of maintaining a reduced form during elimination.


def _row_sub(row, factor, pivot_row, pivot_col):
    """row -= factor * pivot_row, where pivot_row has a 1 at pivot_col."""
    for j, val in pivot_row.items():
        if j == pivot_col:
            continue
        cur = row.get(j)
        if cur is None:
            row[j] = -factor * val
        else:
            cur = cur - factor * val
            if cur:
                row[j] = cur
            else:
                del row[j]


def _echelon(rowdicts, ncols):
    """Forward elimination. Returns list of (pivot_col, row) with rows
    normalized to leading 1, ordered by pivot column."""
    buckets = {}
    for r in rowdicts:
        if r:
            c = min(r)
            buckets.setdefault(c, []).append(r)
    pivots = []
    for c in range(ncols):
        cand = buckets.pop(c, None)
        if not cand:
            continue
        best = 0
        best_key = None
        for i, row in enumerate(cand):
            v = row[c]
            key = (0 if v == ONE or v == -ONE else 1, len(row))
            if best_key is None or key < best_key:
                best_key = key
                best = i
        piv = cand.pop(best)
        pv = piv.pop(c)
        if pv != ONE:
            piv = {j: val / pv for j, val in piv.items()}
        piv[c] = ONE
        for row in cand:
            f = row.pop(c)
            _row_sub(row, f, piv, c)
            if row:
                buckets.setdefault(min(row), []).append(row)
        pivots.append((c, piv))
    return pivots


def _back_substitute(pivots):
    """Turn an echelon list into canonical RREF rows (in place)."""
    for idx in range(len(pivots) - 1, -1, -1):
        c, prow = pivots[idx]
        for k in range(idx):
            _, above = pivots[k]
            f = above.pop(c, None)
            if f is not None:
                _row_sub(above, f, prow, c)
    return pivots


def _rref_rows(rowdicts, ncols):
    return _back_substitute(_echelon(rowdicts, ncols))


def _reduce_against_rref(vec_dict, pivots):
    """Reduce a sparse vector against RREF rows; returns (coeffs, residual).

    coeffs[i] is the coefficient on pivots[i]; residual is what is left,
    supported away from the pivot columns.
    """
    coeffs = []
    res = dict(vec_dict)
    for c, prow in pivots:
        f = res.pop(c, None)
        if f is None:
            coeffs.append(ZERO)
        else:
            coeffs.append(f)
            _row_sub(res, f, prow, c)
    return coeffs, res


# ---------------------------------------------------------------------------


class RationalMatrix:
    """Immutable sparse matrix over the rationals."""

    __slots__ = ("rows", "cols", "_rows")

    def __init__(self, rows, cols, data=None, _internal=None):
        self.rows = rows
        self.cols = cols
        if _internal is not None:
            self._rows = _internal
            return
        rowdicts = [dict() for _ in range(rows)]
        if data:
            for (i, j), v in data.items():
                v = rat(v)
                if v:
                    if not (0 <= i < rows and 0 <= j < cols):
                        raise ValueError("entry (%d,%d) out of shape %dx%d" % (i, j, rows, cols))
                    rowdicts[i][j] = v
        self._rows = tuple(rowdicts)

    # construction -----------------------------------------------------

    @classmethod
    def from_rows(cls, lists, cols=None):
        rows = len(lists)
        if cols is None:
            cols = len(lists[0]) if rows else 0
        data = {}
        for i, row in enumerate(lists):
            if len(row) != cols:
                raise ValueError("ragged rows")
            for j, v in enumerate(row):
                v = rat(v)
                if v:
                    data[(i, j)] = v
        return cls(rows, cols, data)

    @classmethod
    def zero(cls, rows, cols):
        return cls(rows, cols, None)

    @classmethod
    def identity(cls, n):
        return cls(n, n, {(i, i): ONE for i in range(n)})

    @classmethod
    def diagonal(cls, entries):
        n = len(entries)
        return cls(n, n, {(i, i): rat(v) for i, v in enumerate(entries) if rat(v)})

    @classmethod
    def from_cols(cls, cols_list, rows=None):
        ncols = len(cols_list)
        if rows is None:
            rows = len(cols_list[0]) if ncols else 0
        data = {}
        for j, col in enumerate(cols_list):
            for i, v in enumerate(col):
                v = rat(v)
                if v:
                    data[(i, j)] = v
        return cls(rows, ncols, data)

    @classmethod
    def block(cls, grid):
        """Assemble from a grid (list of lists) of matrices."""
        row_heights = [g[0].rows for g in grid]
        col_widths = [m.cols for m in grid[0]]
        for g in grid:
            if [m.cols for m in g] != col_widths:
                raise ValueError("block widths inconsistent")
            if any(m.rows != g[0].rows for m in g):
                raise ValueError("block heights inconsistent")
        roff = [0]
        for h in row_heights:
            roff.append(roff[-1] + h)
        coff = [0]
        for w in col_widths:
            coff.append(coff[-1] + w)
        out = [dict() for _ in range(roff[-1])]
        for bi, g in enumerate(grid):
            for bj, m in enumerate(g):
                r0, c0 = roff[bi], coff[bj]
                for i, row in enumerate(m._rows):
                    tgt = out[r0 + i]
                    for j, v in row.items():
                        tgt[c0 + j] = v
        return cls(roff[-1], coff[-1], _internal=tuple(out))

    @classmethod
    def block_diag(cls, mats):
        n = len(mats)
        grid = [[mats[i] if i == j else cls.zero(mats[i].rows, mats[j].cols)
                 for j in range(n)] for i in range(n)]
        if not mats:
            return cls.zero(0, 0)
        return cls.block(grid)

    @classmethod
    def vstack(cls, mats):
        return cls.block([[m] for m in mats])

    @classmethod
    def hstack(cls, mats):
        return cls.block([list(mats)])

    # access -----------------------------------------------------------

    def entry(self, i, j):
        return self._rows[i].get(j, ZERO)

    def row(self, i):
        r = self._rows[i]
        return tuple(r.get(j, ZERO) for j in range(self.cols))

    def col(self, j):
        return tuple(r.get(j, ZERO) for r in self._rows)

    def to_rows(self):
        return [list(self.row(i)) for i in range(self.rows)]

    def nnz(self):
        return sum(len(r) for r in self._rows)

    def items(self):
        """Yield ((i, j), value) over nonzero entries."""
        for i, r in enumerate(self._rows):
            for j, v in r.items():
                yield (i, j), v

    def is_zero(self):
        return all(not r for r in self._rows)

    def __eq__(self, other):
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return (self.rows, self.cols) == (other.rows, other.cols) and self._rows == other._rows

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(tuple(sorted(r.items())) for r in self._rows)))

    def __repr__(self):
        return "RationalMatrix(%dx%d, nnz=%d)" % (self.rows, self.cols, self.nnz())

    # arithmetic -------------------------------------------------------

    def __add__(self, other):
        self._shape_check(other)
        out = []
        for a, b in zip(self._rows, other._rows):
            r = dict(a)
            for j, v in b.items():
                cur = r.get(j)
                s = v if cur is None else cur + v
                if s:
                    r[j] = s
                elif cur is not None:
                    del r[j]
            out.append(r)
        return RationalMatrix(self.rows, self.cols, _internal=tuple(out))

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        out = tuple({j: -v for j, v in r.items()} for r in self._rows)
        return RationalMatrix(self.rows, self.cols, _internal=out)

    def scale(self, c):
        c = rat(c)
        if not c:
            return RationalMatrix.zero(self.rows, self.cols)
        out = tuple({j: c * v for j, v in r.items()} for r in self._rows)
        return RationalMatrix(self.rows, self.cols, _internal=out)

    def __mul__(self, other):
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise ValueError("shape mismatch %dx%d * %dx%d"
                             % (self.rows, self.cols, other.rows, other.cols))
        out = []
        orows = other._rows
        for r in self._rows:
            acc = {}
            for k, a in r.items():
                for j, b in orows[k].items():
                    cur = acc.get(j)
                    s = a * b if cur is None else cur + a * b
                    if s:
                        acc[j] = s
                    elif cur is not None:
                        del acc[j]
            out.append(acc)
        return RationalMatrix(self.rows, other.cols, _internal=tuple(out))

    def mv(self, vec):
        """Matrix times (dense tuple) vector."""
        if len(vec) != self.cols:
            raise ValueError("vector length mismatch")
        out = []
        for r in self._rows:
            s = ZERO
            for j, a in r.items():
                b = vec[j]
                if b:
                    s += a * b
            out.append(s)
        return tuple(out)

    def transpose(self):
        out = [dict() for _ in range(self.cols)]
        for i, r in enumerate(self._rows):
            for j, v in r.items():
                out[j][i] = v
        return RationalMatrix(self.cols, self.rows, _internal=tuple(out))

    def _shape_check(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")

    # elimination ------------------------------------------------------

    def _pivots_echelon(self):
        return _echelon([dict(r) for r in self._rows if r], self.cols)

    def _pivots_rref(self):
        return _back_substitute(self._pivots_echelon())


class LinearSubspace:
    """A subspace of Q^n, stored by its canonical RREF basis."""

    __slots__ = ("ambient_dim", "basis", "_pivots", "_sparse_rows")

    def __init__(self, ambient_dim, basis, _pivots=None):
        self.ambient_dim = ambient_dim
        self.basis = basis  # tuple of dense tuples, RREF rows, no zero rows
        if _pivots is None:
            _pivots = tuple(next(j for j, v in enumerate(row) if v) for row in basis)
        self._pivots = _pivots
        self._sparse_rows = None

    @classmethod
    def from_spanning(cls, ambient_dim, vectors):
        rows = []
        for v in vectors:
            if len(v) != ambient_dim:
                raise ValueError("spanning vector has wrong length")
            d = {j: rat(x) for j, x in enumerate(v) if rat(x)}
            if d:
                rows.append(d)
        pivots = _rref_rows(rows, ambient_dim)
        basis = tuple(tuple(prow.get(j, ZERO) for j in range(ambient_dim)) for _, prow in pivots)
        return cls(ambient_dim, basis, tuple(c for c, _ in pivots))

    @classmethod
    def zero(cls, ambient_dim):
        return cls(ambient_dim, ())

    @classmethod
    def full(cls, ambient_dim):
        basis = tuple(tuple(ONE if i == j else ZERO for j in range(ambient_dim))
                      for i in range(ambient_dim))
        return cls(ambient_dim, basis, tuple(range(ambient_dim)))

    @property
    def dim(self):
        return len(self.basis)

    def _reduce(self, vec):
        """(coords over basis, residual) for a dense vector."""
        vd = {j: rat(x) for j, x in enumerate(vec) if rat(x)}
        prows = self._sparse_rows
        if prows is None:
            # Instances are immutable, so the sparse view of the basis can be
            # built once and shared; _reduce_against_rref never mutates it.
            prows = [(self._pivots[i], {j: v for j, v in enumerate(self.basis[i]) if v})
                     for i in range(self.dim)]
            self._sparse_rows = prows
        return _reduce_against_rref(vd, prows)

    def contains_vector(self, vec):
        if len(vec) != self.ambient_dim:
            raise ValueError("vector length mismatch")
        _, res = self._reduce(vec)
        return not res

    def coords(self, vec):
        """Coefficients of vec over the basis. Raises if vec is outside."""
        coeffs, res = self._reduce(vec)
        if res:
            raise ValueError("vector not in subspace")
        return tuple(coeffs)

    def contains(self, other):
        if other.ambient_dim != self.ambient_dim:
            raise ValueError("ambient mismatch")
        return all(self.contains_vector(v) for v in other.basis)

    def __eq__(self, other):
        if not isinstance(other, LinearSubspace):
            return NotImplemented
        return self.ambient_dim == other.ambient_dim and self.basis == other.basis

    def __hash__(self):
        return hash((self.ambient_dim, self.basis))

    def __repr__(self):
        return "LinearSubspace(dim %d in Q^%d)" % (self.dim, self.ambient_dim)

    def basis_matrix(self):
        """Basis vectors as rows."""
        return RationalMatrix.from_rows([list(b) for b in self.basis], self.ambient_dim)

    def inclusion_matrix(self):
        """Basis vectors as columns: the inclusion Q^dim -> Q^ambient."""
        return self.basis_matrix().transpose()


# ---------------------------------------------------------------------------
# public operations


def rank(m):
    return len(m._pivots_echelon())


def rref(m):
    """Canonical reduced row echelon form (zero rows dropped), with pivots."""
    pivots = m._pivots_rref()
    rows = len(pivots)
    out = tuple(dict(prow) for _, prow in pivots)
    return tuple(c for c, _ in pivots), RationalMatrix(rows, m.cols, _internal=out)


def kernel(m):
    """Canonical basis of the null space; dim = cols - rank."""
    pivots = m._pivots_rref()
    pivot_cols = {c for c, _ in pivots}
    free_cols = [j for j in range(m.cols) if j not in pivot_cols]
    vecs = []
    for f in free_cols:
        v = [ZERO] * m.cols
        v[f] = ONE
        for c, prow in pivots:
            coef = prow.get(f)
            if coef:
                v[c] = -coef
        vecs.append(tuple(v))
    # The vectors are independent by construction but not echelon; canonicalize.
    return LinearSubspace.from_spanning(m.cols, vecs)


def image(m):
    """Canonical basis of the column space."""
    return LinearSubspace.from_spanning(m.rows, [m.col(j) for j in range(m.cols)])


def quotient_dim(a, b):
    """dim(a/b), demanding b <= a."""
    if a.ambient_dim != b.ambient_dim:
        raise SubspaceNotContained("ambient dimensions differ")
    if not a.contains(b):
        raise SubspaceNotContained("quotient by a non-subspace")
    return a.dim - b.dim


def solve_particular(m, v):
    """Some x with m x = v (free variables set to 0), or None."""
    if len(v) != m.rows:
        raise ValueError("rhs length mismatch")
    aug_col = m.cols
    rows = []
    for i, r in enumerate(m._rows):
        d = dict(r)
        b = rat(v[i])
        if b:
            d[aug_col] = b
        if d:
            rows.append(d)
    pivots = _echelon(rows, aug_col + 1)
    for c, _ in pivots:
        if c == aug_col:
            return None
    _back_substitute(pivots)
    x = [ZERO] * m.cols
    for c, prow in pivots:
        x[c] = prow.get(aug_col, ZERO)
    return tuple(x)


def solve(m, v):
    """Solve m x = v exactly.

    Returns None when v is not in the image. When solutions exist, returns
    the unique one orthogonal to the kernel (the minimal canonical
    representative), so the answer does not depend on pivoting choices.
    """
    x0 = solve_particular(m, v)
    if x0 is None:
        return None
    ker = kernel(m)
    if ker.dim == 0:
        return x0
    B = ker.basis_matrix()
    gram = B * B.transpose()  # positive definite, hence invertible
    rhs = B.mv(x0)
    y = solve_particular(gram, rhs)
    correction = B.transpose().mv(y)
    return vsub(x0, correction)


def matrix_in_bases(m, dom=None, cod=None):
    """Matrix of the map induced by m w.r.t. subspace bases.

    dom, cod are LinearSubspaces (None means the standard basis). Requires
    m to carry dom into cod; raises ValueError otherwise.
    """
    src_dim = dom.dim if dom is not None else m.cols
    out_cols = []
    for j in range(src_dim):
        vec = dom.basis[j] if dom is not None else tuple(
            ONE if i == j else ZERO for i in range(m.cols))
        img = m.mv(vec)
        out_cols.append(cod.coords(img) if cod is not None else img)
    tgt_dim = cod.dim if cod is not None else m.rows
    return RationalMatrix.from_cols([list(c) for c in out_cols], rows=tgt_dim)


class QuotientSpace:
    """A quotient Z/B of nested subspaces, with canonical coordinates.

    Coordinates: express a vector in Z's echelon basis (a cheap read-off),
    reduce against the RREF of B written in those coordinates, and read the
    residual on the free columns. Representatives of the coordinate basis
    are the Z-basis vectors at the free columns.
    """

    __slots__ = ("Z", "B", "_bpivots", "_free")

    def __init__(self, Z, B):
        if not Z.contains(B):
            raise SubspaceNotContained("boundaries not inside cycles")
        self.Z = Z
        self.B = B
        brows = []
        for v in B.basis:
            coords = Z.coords(v)
            d = {j: c for j, c in enumerate(coords) if c}
            if d:
                brows.append(d)
        self._bpivots = _rref_rows(brows, Z.dim)
        pivcols = {c for c, _ in self._bpivots}
        self._free = tuple(j for j in range(Z.dim) if j not in pivcols)

    @property
    def dim(self):
        return len(self._free)

    def coords(self, vec):
        """Canonical coordinates of [vec] in Z/B. vec must lie in Z."""
        zc = self.Z.coords(vec)
        vd = {j: c for j, c in enumerate(zc) if c}
        _, res = _reduce_against_rref(vd, self._bpivots)
        return tuple(res.get(j, ZERO) for j in self._free)

    def representative(self, i):
        """Ambient vector representing the i-th coordinate direction."""
        return self.Z.basis[self._free[i]]

    def induced_matrix(self, m, target):
        """Matrix of the map [v] -> [m v] into another QuotientSpace."""
        cols = [list(target.coords(m.mv(self.representative(i))))
                for i in range(self.dim)]
        return RationalMatrix.from_cols(cols, rows=target.dim)
