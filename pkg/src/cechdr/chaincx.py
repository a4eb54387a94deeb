"""Non-negatively graded chain complexes of rational vector spaces.

The homotopical toolkit lives here: mapping complexes with the smart
truncation, path objects, degreewise pullbacks, fibration detection,
homotopy pullbacks built from the path-object fibration replacement, and
quasi-isomorphism testing through homology presentations.

Conventions. A complex is bounded: degrees 0..L with d_k: C_k -> C_{k-1}
and d.d = 0 enforced at construction. The zero complex is a first-class
value. Operations on complexes with different bounds zero-pad to the
larger bound.
"""

from __future__ import annotations

from .qlinalg import (
    RationalMatrix, LinearSubspace, QuotientSpace,
    rank, kernel, image, matrix_in_bases,
)


class DegreeOutOfRange(Exception):
    pass


class SquareNotCommuting(Exception):
    pass


class ChainComplex:
    """dims[k] = dim C_k for 0 <= k <= L; diffs[k-1] = d_k: C_k -> C_{k-1}."""

    __slots__ = ("dims", "_diffs", "_cycles", "_boundaries")

    def __init__(self, dims, diffs, check=True):
        self.dims = tuple(int(x) for x in dims)
        if not self.dims:
            raise ValueError("dims must cover at least degree 0")
        diffs = tuple(diffs)
        if len(diffs) != len(self.dims) - 1:
            raise ValueError("need exactly one differential per positive degree")
        for k, d in enumerate(diffs, start=1):
            if (d.rows, d.cols) != (self.dims[k - 1], self.dims[k]):
                raise ValueError("d_%d has shape %dx%d, expected %dx%d"
                                 % (k, d.rows, d.cols, self.dims[k - 1], self.dims[k]))
        self._diffs = diffs
        self._cycles = {}
        self._boundaries = {}
        if check:
            for k in range(1, len(self.dims) - 1):
                if not (diffs[k - 1] * diffs[k]).is_zero():
                    raise ValueError("d_%d . d_%d != 0" % (k, k + 1))

    @property
    def length_bound(self):
        return len(self.dims) - 1

    def dim(self, k):
        if 0 <= k <= self.length_bound:
            return self.dims[k]
        return 0

    def d(self, k):
        """d_k: C_k -> C_{k-1}; the zero map outside 1..L."""
        if 1 <= k <= self.length_bound:
            return self._diffs[k - 1]
        return RationalMatrix.zero(self.dim(k - 1), self.dim(k))

    @classmethod
    def zero(cls, length_bound=0):
        return cls((0,) * (length_bound + 1),
                   tuple(RationalMatrix.zero(0, 0) for _ in range(length_bound)),
                   check=False)

    @classmethod
    def concentrated(cls, dim, degree):
        """dim-dimensional space placed in a single degree."""
        dims = [0] * (degree + 1)
        dims[degree] = dim
        diffs = [RationalMatrix.zero(dims[k - 1], dims[k]) for k in range(1, degree + 1)]
        return cls(dims, diffs, check=False)

    def pad_to(self, length_bound):
        if length_bound <= self.length_bound:
            return self
        dims = list(self.dims) + [0] * (length_bound - self.length_bound)
        diffs = list(self._diffs)
        for k in range(self.length_bound + 1, length_bound + 1):
            diffs.append(RationalMatrix.zero(dims[k - 1], 0))
        return ChainComplex(dims, diffs, check=False)

    def direct_sum(self, other):
        L = max(self.length_bound, other.length_bound)
        a, b = self.pad_to(L), other.pad_to(L)
        dims = [a.dims[k] + b.dims[k] for k in range(L + 1)]
        diffs = [RationalMatrix.block_diag([a.d(k), b.d(k)]) for k in range(1, L + 1)]
        return ChainComplex(dims, diffs, check=False)

    def __eq__(self, other):
        if not isinstance(other, ChainComplex):
            return NotImplemented
        return self.dims == other.dims and self._diffs == other._diffs

    def __hash__(self):
        return hash((self.dims, self._diffs))

    def __repr__(self):
        return "ChainComplex(dims=%r)" % (self.dims,)


def same_complex(a, b):
    """Equality up to trailing zero padding."""
    L = max(a.length_bound, b.length_bound)
    return a.pad_to(L) == b.pad_to(L)


def cycles(c, n):
    """ker d_n as a cached LinearSubspace."""
    if n not in c._cycles:
        if n == 0:
            c._cycles[n] = LinearSubspace.full(c.dim(0))
        else:
            c._cycles[n] = kernel(c.d(n))
    return c._cycles[n]


def boundaries(c, n):
    """im d_{n+1} as a cached LinearSubspace."""
    if n not in c._boundaries:
        c._boundaries[n] = image(c.d(n + 1))
    return c._boundaries[n]


def homology(c, n):
    """Presentation of H_n as a QuotientSpace (cycles mod boundaries)."""
    if not (0 <= n <= c.length_bound):
        raise DegreeOutOfRange("degree %d outside 0..%d" % (n, c.length_bound))
    return QuotientSpace(cycles(c, n), boundaries(c, n))


def homology_dim(c, n):
    if not (0 <= n <= c.length_bound):
        raise DegreeOutOfRange("degree %d outside 0..%d" % (n, c.length_bound))
    rk_n = rank(c.d(n)) if n >= 1 else 0
    return c.dim(n) - rk_n - rank(c.d(n + 1))


class ChainMap:
    """Degreewise map commuting with the differentials (checked)."""

    __slots__ = ("source", "target", "components")

    def __init__(self, source, target, components, check=True):
        L = max(source.length_bound, target.length_bound, len(components) - 1)
        source = source.pad_to(L)
        target = target.pad_to(L)
        comps = list(components) + [RationalMatrix.zero(target.dim(k), source.dim(k))
                                    for k in range(len(components), L + 1)]
        for k, f in enumerate(comps):
            if (f.rows, f.cols) != (target.dim(k), source.dim(k)):
                raise ValueError("component %d has shape %dx%d, expected %dx%d"
                                 % (k, f.rows, f.cols, target.dim(k), source.dim(k)))
        if check:
            for k in range(1, L + 1):
                if target.d(k) * comps[k] != comps[k - 1] * source.d(k):
                    raise ValueError("does not commute with d at degree %d" % k)
        self.source = source
        self.target = target
        self.components = tuple(comps)

    @classmethod
    def identity(cls, c):
        return cls(c, c, [RationalMatrix.identity(c.dim(k))
                          for k in range(c.length_bound + 1)], check=False)

    @classmethod
    def zero_map(cls, source, target):
        L = max(source.length_bound, target.length_bound)
        return cls(source, target,
                   [RationalMatrix.zero(target.dim(k), source.dim(k))
                    for k in range(L + 1)], check=False)

    def component(self, k):
        if 0 <= k < len(self.components):
            return self.components[k]
        return RationalMatrix.zero(self.target.dim(k), self.source.dim(k))

    def compose(self, other):
        """self . other (other applied first)."""
        if not same_complex(self.source, other.target):
            raise ValueError("composition mismatch")
        L = max(self.source.length_bound, other.source.length_bound)
        comps = [self.component(k) * other.component(k) for k in range(L + 1)]
        return ChainMap(other.source, self.target, comps, check=False)

    def __add__(self, other):
        comps = [a + b for a, b in zip(self.components, other.components)]
        return ChainMap(self.source, self.target, comps, check=False)

    def __sub__(self, other):
        comps = [a - b for a, b in zip(self.components, other.components)]
        return ChainMap(self.source, self.target, comps, check=False)

    def direct_sum(self, other):
        src = self.source.direct_sum(other.source)
        tgt = self.target.direct_sum(other.target)
        L = src.length_bound
        comps = [RationalMatrix.block_diag([self.component(k), other.component(k)])
                 for k in range(L + 1)]
        return ChainMap(src, tgt, comps, check=False)

    def __eq__(self, other):
        if not isinstance(other, ChainMap):
            return NotImplemented
        L = max(len(self.components), len(other.components)) - 1
        return (same_complex(self.source, other.source)
                and same_complex(self.target, other.target)
                and all(self.component(k) == other.component(k) for k in range(L + 1)))

    def __hash__(self):
        return hash((self.source, self.target, self.components))


class DegreeKMap:
    """Degree-k collection f_i: C_i -> D_{i+k}; no commuting requirement."""

    __slots__ = ("source", "target", "k", "components")

    def __init__(self, source, target, k, components):
        self.source = source
        self.target = target
        self.k = k
        comps = tuple(components)
        for i, f in enumerate(comps):
            want_rows = target.dim(i + k)
            want_cols = source.dim(i)
            if (f.rows, f.cols) != (want_rows, want_cols):
                raise ValueError("degree-%d component %d has wrong shape" % (k, i))
        self.components = comps

    def component(self, i):
        if 0 <= i < len(self.components):
            return self.components[i]
        return RationalMatrix.zero(self.target.dim(i + self.k), self.source.dim(i))


def is_fibration(f):
    """Surjective in every strictly positive degree."""
    for k in range(1, f.target.length_bound + 1):
        comp = f.component(k)
        if rank(comp) != f.target.dim(k):
            return False
    return True


def is_quasi_iso(f):
    """Induced isomorphism on homology in every degree."""
    L = max(f.source.length_bound, f.target.length_bound)
    square = all(f.source.dim(k) == f.target.dim(k) for k in range(L + 1))
    if square and all(rank(f.component(k)) == f.source.dim(k) for k in range(L + 1)):
        return True  # degreewise iso
    for n in range(L + 1):
        hs = homology(f.source.pad_to(L), n)
        ht = homology(f.target.pad_to(L), n)
        if hs.dim != ht.dim:
            return False
        induced = hs.induced_matrix(f.component(n), ht)
        if rank(induced) != hs.dim:
            return False
    return True


# ---------------------------------------------------------------------------
# mapping complexes and smart truncation


def smart_truncate_with_inclusion(c, d0):
    """Truncate at 0: replace degree 0 by ker(d0), keep higher degrees.

    d0 is the degree-0 differential into the (invisible) degree -1 space.
    Returns (complex, inclusion matrix ker -> C_0, kernel subspace).
    """
    if d0.cols != c.dim(0):
        raise ValueError("d0 does not match degree 0")
    K = kernel(d0)
    dims = (K.dim,) + c.dims[1:]
    diffs = []
    if c.length_bound >= 1:
        # d_1 lands in the kernel because d0 . d1 = 0 must hold for the input
        if not (d0 * c.d(1)).is_zero():
            raise ValueError("d0 . d1 != 0")
        diffs.append(matrix_in_bases(c.d(1), dom=None, cod=K))
        diffs.extend(c.d(k) for k in range(2, c.length_bound + 1))
    return ChainComplex(dims, diffs, check=False), K.inclusion_matrix(), K


def smart_truncate(c, d0):
    return smart_truncate_with_inclusion(c, d0)[0]


def _hom_basis_blocks(c, d, k):
    """Block layout of Map(C,D)_k = prod_i Hom(C_i, D_{i+k}).

    Returns list of (i, rows, cols, offset); basis unit order inside a block
    is row-major, blocks ordered by i.
    """
    blocks = []
    off = 0
    for i in range(c.length_bound + 1):
        r, cc = d.dim(i + k), c.dim(i)
        if r and cc:
            blocks.append((i, r, cc, off))
            off += r * cc
    return blocks, off


def _hom_differential(c, d, k):
    """Matrix of Map_k -> Map_{k-1}: f -> dD f - (-1)^k f dC."""
    src_blocks, src_dim = _hom_basis_blocks(c, d, k)
    tgt_blocks, tgt_dim = _hom_basis_blocks(c, d, k - 1)
    tgt_off = {i: (off, r, cc) for i, r, cc, off in tgt_blocks}
    sign = 1 if k % 2 == 0 else -1
    data = {}
    for i, r, cc, off in src_blocks:
        # unit e_{a,b}: C_i -> D_{i+k} sending basis b to basis a
        dd = d.d(i + k)           # D_{i+k} -> D_{i+k-1}
        dc = c.d(i + 1)           # C_{i+1} -> C_i
        for a in range(r):
            for b in range(cc):
                col = off + a * cc + b
                # dD . f: block i, rows from column a of dd
                if i in tgt_off:
                    o2, r2, c2 = tgt_off[i]
                    for t in range(r2):
                        v = dd.entry(t, a)
                        if v:
                            data[(o2 + t * c2 + b, col)] = data.get((o2 + t * c2 + b, col), 0) + v
                # -(-1)^k f . dC: block i+1; (f dC)_{a, b'} = f_{a, b} dC_{b, b'}
                if (i + 1) in tgt_off:
                    o2, r2, c2 = tgt_off[i + 1]
                    for b2 in range(c2):
                        v = dc.entry(b, b2)
                        if v:
                            key = (o2 + a * c2 + b2, col)
                            data[key] = data.get(key, 0) - sign * v
    data = {k2: v for k2, v in data.items() if v}
    return RationalMatrix(tgt_dim, src_dim, data)


def mapping_complex(c, d):
    """Map(C, D) truncated at 0, so degree 0 is the space of chain maps."""
    top = d.length_bound
    hom_dims = []
    diffs_full = []
    for k in range(0, top + 1):
        hom_dims.append(_hom_basis_blocks(c, d, k)[1])
    for k in range(1, top + 1):
        diffs_full.append(_hom_differential(c, d, k))
    d0 = _hom_differential(c, d, 0)
    pre = ChainComplex(tuple(hom_dims), tuple(diffs_full), check=False)
    return smart_truncate(pre, d0)


# ---------------------------------------------------------------------------
# path objects


def path_object(c):
    """The C^{Delta^1} model.

    P_n = C_n + C_n + C_{n+1} for n >= 1 and P_0 = C_0 + C_1, with
    d(x, y, z) = (dx, dy, dz - (-1)^n (-x + y)), projection (x, y, z) ->
    (x, y) (degree 0: (x, z) -> (x, x + dz)) and inclusion x -> (x, x, 0).
    Returns (p, proj: p -> c + c, incl: c -> p).
    """
    L = c.length_bound
    dims = [c.dim(0) + c.dim(1)]
    for n in range(1, L + 1):
        dims.append(2 * c.dim(n) + c.dim(n + 1))
    diffs = []
    for n in range(1, L + 1):
        I = RationalMatrix.identity(c.dim(n))
        if n == 1:
            # (x, y, z) -> (dx, dz - x + y) in the (x, z) chart of P_0
            diffs.append(RationalMatrix.block([
                [c.d(1), RationalMatrix.zero(c.dim(0), c.dim(1)),
                 RationalMatrix.zero(c.dim(0), c.dim(2))],
                [-I, I, c.d(2)],
            ]))
        else:
            s = 1 if n % 2 == 0 else -1
            Z = RationalMatrix.zero(c.dim(n - 1), c.dim(n + 1))
            diffs.append(RationalMatrix.block([
                [c.d(n), RationalMatrix.zero(c.dim(n - 1), c.dim(n)), Z],
                [RationalMatrix.zero(c.dim(n - 1), c.dim(n)), c.d(n), Z],
                [I.scale(s), I.scale(-s), c.d(n + 1)],
            ]))
    p = ChainComplex(dims, diffs, check=False)
    cc = c.direct_sum(c)
    proj_comps = [RationalMatrix.block([
        [RationalMatrix.identity(c.dim(0)), RationalMatrix.zero(c.dim(0), c.dim(1))],
        [RationalMatrix.identity(c.dim(0)), c.d(1)],
    ])]
    incl_comps = [RationalMatrix.block([
        [RationalMatrix.identity(c.dim(0))],
        [RationalMatrix.zero(c.dim(1), c.dim(0))],
    ])]
    for n in range(1, L + 1):
        I = RationalMatrix.identity(c.dim(n))
        Zc = RationalMatrix.zero(c.dim(n), c.dim(n + 1))
        proj_comps.append(RationalMatrix.block([[I, RationalMatrix.zero(c.dim(n), c.dim(n)), Zc],
                                                [RationalMatrix.zero(c.dim(n), c.dim(n)), I, Zc]]))
        incl_comps.append(RationalMatrix.block([[I], [I],
                                                [RationalMatrix.zero(c.dim(n + 1), c.dim(n))]]))
    proj = ChainMap(p, cc, proj_comps)
    incl = ChainMap(c, p, incl_comps)
    return p, proj, incl


# ---------------------------------------------------------------------------
# pullbacks


class PullbackData:
    """Degreewise pullback of f: X -> Z, g: Y -> Z, with its legs and the
    universal-property mediating construction."""

    def __init__(self, f, g):
        if not same_complex(f.target, g.target):
            raise ValueError("pullback needs a common target")
        L = max(f.source.length_bound, g.source.length_bound, f.target.length_bound)
        X, Y = f.source.pad_to(L), g.source.pad_to(L)
        self.f, self.g = f, g
        self.X, self.Y = X, Y
        self.subspaces = []
        for n in range(L + 1):
            m = RationalMatrix.hstack([f.component(n), -g.component(n)])
            self.subspaces.append(kernel(m))
        dims = tuple(K.dim for K in self.subspaces)
        diffs = []
        for n in range(1, L + 1):
            dsum = RationalMatrix.block_diag([X.d(n), Y.d(n)])
            diffs.append(matrix_in_bases(dsum, dom=self.subspaces[n],
                                         cod=self.subspaces[n - 1]))
        self.complex = ChainComplex(dims, diffs, check=False)
        leg1_comps, leg2_comps = [], []
        for n in range(L + 1):
            xd, yd = X.dim(n), Y.dim(n)
            px = RationalMatrix.hstack([RationalMatrix.identity(xd),
                                        RationalMatrix.zero(xd, yd)])
            py = RationalMatrix.hstack([RationalMatrix.zero(yd, xd),
                                        RationalMatrix.identity(yd)])
            leg1_comps.append(matrix_in_bases(px, dom=self.subspaces[n], cod=None))
            leg2_comps.append(matrix_in_bases(py, dom=self.subspaces[n], cod=None))
        self.leg1 = ChainMap(self.complex, X, leg1_comps, check=False)
        self.leg2 = ChainMap(self.complex, Y, leg2_comps, check=False)

    def mediate(self, u, v):
        """The unique map A -> P with leg1 . med = u, leg2 . med = v.

        Requires f . u = g . v strictly; raises SquareNotCommuting otherwise.
        """
        if self.f.compose(u) != self.g.compose(v):
            raise SquareNotCommuting("f.u != g.v, no mediating map")
        L = self.complex.length_bound
        comps = []
        for n in range(L + 1):
            stacked = RationalMatrix.vstack([u.component(n), v.component(n)])
            comps.append(matrix_in_bases(stacked, dom=None, cod=self.subspaces[n]))
        return ChainMap(u.source, self.complex, comps, check=False)


def pullback(f, g):
    """Degreewise fiber product; returns (p, (leg to source of f, leg to source of g))."""
    pd = PullbackData(f, g)
    return pd.complex, (pd.leg1, pd.leg2)


# ---------------------------------------------------------------------------
# homotopy pullbacks


class CommutingSquare:
    """A square: apex A with top: A -> B, left: A -> C over the cospan
    bottom: C -> Z, right: B -> Z. Commutation is NOT assumed; the checkers
    decide strict vs up-to-witness."""

    def __init__(self, top, left, bottom, right):
        if not same_complex(top.source, left.source):
            raise ValueError("top and left must share the apex")
        if not same_complex(left.target, bottom.source):
            raise ValueError("left target must be the bottom source")
        if not same_complex(top.target, right.source):
            raise ValueError("top target must be the right source")
        if not same_complex(bottom.target, right.target):
            raise ValueError("cospan needs a common target")
        self.top, self.left, self.bottom, self.right = top, left, bottom, right

    @property
    def apex(self):
        return self.top.source

    @property
    def corner(self):
        return self.bottom.target

    def commutes_strictly(self):
        return self.right.compose(self.top) == self.bottom.compose(self.left)


def _hopullback_data(f, g):
    """Pullback of (f + g): X + Y -> Z + Z against the path projection."""
    Z = f.target
    L = max(f.source.length_bound, g.source.length_bound, Z.length_bound)
    Zp = Z.pad_to(L)
    fg = ChainMap(f.source.direct_sum(g.source), Zp.direct_sum(Zp),
                  [RationalMatrix.block_diag([f.component(n), g.component(n)])
                   for n in range(L + 1)], check=False)
    pz, proj, _ = path_object(Zp)
    return PullbackData(fg, proj), pz


def homotopy_pullback(f, g):
    pd, _ = _hopullback_data(f, g)
    return pd.complex


def comparison_into_homotopy_pullback(square, witness=None):
    """The canonical comparison from the apex into the homotopy pullback.

    The homotopy pullback is taken over the cospan (bottom, right), so the
    comparison sends a to (left a, top a, path-witness). witness, when
    given, is a list of matrices s_n: A_n -> Z_{n+1} whose defect identity
    (right.top - bottom.left)_n = (-1)^n (d s_n - s_{n-1} d) makes the
    comparison a chain map; omitted witness means the square must commute
    strictly. Returns (homotopy pullback complex, comparison ChainMap).
    """
    A = square.apex
    Z = square.corner
    pd, pz = _hopullback_data(square.bottom, square.right)
    L = pd.complex.length_bound
    Ap = A.pad_to(L)
    Zp = Z.pad_to(L)
    if witness is None:
        wit = [RationalMatrix.zero(Zp.dim(n + 1), Ap.dim(n)) for n in range(L + 1)]
    else:
        wit = [witness[n] if n < len(witness)
               else RationalMatrix.zero(Zp.dim(n + 1), Ap.dim(n))
               for n in range(L + 1)]
        for n in range(L + 1):
            if (wit[n].rows, wit[n].cols) != (Zp.dim(n + 1), Ap.dim(n)):
                raise ValueError("witness component %d has wrong shape" % n)
    bl = square.bottom.compose(square.left)
    rt = square.right.compose(square.top)
    comps = []
    for n in range(L + 1):
        if n == 0:
            pz_part = [bl.component(0), wit[0]]
        else:
            pz_part = [bl.component(n), rt.component(n), wit[n]]
        stacked = RationalMatrix.vstack(
            [square.left.component(n), square.top.component(n)] + pz_part)
        try:
            comps.append(matrix_in_bases(stacked, dom=None, cod=pd.subspaces[n]))
        except ValueError:
            raise SquareNotCommuting(
                "comparison misses the pullback at degree %d "
                "(witness identity fails there)" % n)
    try:
        comp = ChainMap(Ap, pd.complex, comps)
    except ValueError as e:
        raise SquareNotCommuting("comparison is not a chain map: %s" % e)
    return pd.complex, comp


def compare_into_homotopy_pullback(square):
    """True iff the zero-witness comparison is a quasi-isomorphism.

    This is the executable meaning of "is a homotopy pullback square" for a
    strictly commuting square; non-commuting input raises.
    """
    if not square.commutes_strictly():
        raise SquareNotCommuting("square does not commute strictly")
    _, comp = comparison_into_homotopy_pullback(square, witness=None)
    return is_quasi_iso(comp)
