"""Totalization of cosimplicial chain complexes.

A cosimplicial chain complex spreads into a mixed double complex whose
horizontal differential is the alternating coface sum; the total complex
collects the anti-diagonals, carries one of two interchangeable sign
conventions, and is truncated at degree 0 so that its homology computes
the cohomology the rest of the toolkit consumes.  The equalizer model of
the same object (families of maps out of free simplex chains, pinned down
by naturality) is rebuilt independently as a verification oracle.
"""

from .qlinalg import RationalMatrix, LinearSubspace, kernel, matrix_in_bases, rank
from .chaincx import (
    ChainComplex, ChainMap, DegreeOutOfRange,
    homology_dim, smart_truncate_with_inclusion,
    _hom_basis_blocks, _hom_differential,
)
from .simplicial import free_simplex_chains, free_simplex_map, coface_values


class SignIsoFailure(Exception):
    """The diagonal sign map failed to intertwine the two conventions."""


class CosimplicialChain:
    """Chain complexes C^0, ..., C^N with coface and codegeneracy chain maps.

    cofaces[n - 1] lists d^0, ..., d^n: C^{n-1} -> C^n for 1 <= n <= N.
    codegeneracies, when present, follow the same layout as s^0, ..., s^{n-1}:
    C^n -> C^{n-1}; normalized constructions may omit them entirely.
    """

    __slots__ = ("complexes", "cofaces", "codegeneracies")

    def __init__(self, complexes, cofaces, codegeneracies=None, check=True):
        self.complexes = tuple(complexes)
        self.cofaces = tuple(tuple(level) for level in cofaces)
        self.codegeneracies = (None if codegeneracies is None
                               else tuple(tuple(level) for level in codegeneracies))
        n_top = self.truncation_level
        if len(self.cofaces) != n_top:
            raise ValueError("need coface lists for levels 1..%d" % n_top)
        for n in range(1, n_top + 1):
            if len(self.cofaces[n - 1]) != n + 1:
                raise ValueError("level %d needs %d cofaces" % (n, n + 1))
        if self.codegeneracies is not None:
            if len(self.codegeneracies) != n_top:
                raise ValueError("need codegeneracy lists for levels 1..%d" % n_top)
            for n in range(1, n_top + 1):
                if len(self.codegeneracies[n - 1]) != n:
                    raise ValueError("level %d needs %d codegeneracies" % (n, n))
        if check:
            self._check_identities()

    @property
    def truncation_level(self):
        return len(self.complexes) - 1

    def level(self, n):
        return self.complexes[n]

    def coface(self, n, i):
        return self.cofaces[n - 1][i]

    def codegeneracy(self, n, j):
        return self.codegeneracies[n - 1][j]

    @property
    def has_codegeneracies(self):
        return self.codegeneracies is not None

    def _check_identities(self):
        n_top = self.truncation_level
        for n in range(2, n_top + 1):
            for j in range(n + 1):
                for i in range(j):
                    if (self.coface(n, j).compose(self.coface(n - 1, i))
                            != self.coface(n, i).compose(self.coface(n - 1, j - 1))):
                        raise ValueError(
                            "coface identity d^%d d^%d fails into level %d" % (j, i, n))
        if self.codegeneracies is None:
            return
        for m in range(2, n_top + 1):
            for j in range(m - 1):
                for i in range(j + 1):
                    lhs = self.codegeneracy(m - 1, j).compose(self.codegeneracy(m, i))
                    rhs = self.codegeneracy(m - 1, i).compose(self.codegeneracy(m, j + 1))
                    if lhs != rhs:
                        raise ValueError(
                            "codegeneracy identity fails out of level %d" % m)
        for m in range(1, n_top + 1):
            ident = ChainMap.identity(self.level(m - 1))
            for j in range(m):
                sj = self.codegeneracy(m, j)
                for i in range(m + 1):
                    lhs = sj.compose(self.coface(m, i))
                    if i == j or i == j + 1:
                        rhs = ident
                    elif i < j:
                        rhs = self.coface(m - 1, i).compose(self.codegeneracy(m - 1, j - 1))
                    else:
                        rhs = self.coface(m - 1, i - 1).compose(self.codegeneracy(m - 1, j))
                    if lhs != rhs:
                        raise ValueError(
                            "mixed identity s^%d d^%d fails into level %d" % (j, i, m))


class DoubleComplex:
    """Columns with a commuting horizontal differential.

    columns[p] is the chain complex C^{p, *} (vertical differential d),
    horizontal[p][q]: C^{p,q} -> C^{p+1,q} is the matrix of the horizontal
    differential; the two commute (d delta = delta d) and each squares
    to zero.
    """

    __slots__ = ("columns", "horizontal")

    def __init__(self, columns, horizontal, check=True):
        q_max = max(c.length_bound for c in columns)
        self.columns = tuple(c.pad_to(q_max) for c in columns)
        self.horizontal = tuple(tuple(level) for level in horizontal)
        if len(self.horizontal) != self.p_max:
            raise ValueError("need horizontal maps out of columns 0..%d" % (self.p_max - 1))
        for p in range(self.p_max):
            if len(self.horizontal[p]) != q_max + 1:
                raise ValueError("column %d needs %d horizontal maps" % (p, q_max + 1))
            for q in range(q_max + 1):
                m = self.horizontal[p][q]
                if (m.rows, m.cols) != (self.dim(p + 1, q), self.dim(p, q)):
                    raise ValueError("horizontal map shape mismatch at (%d, %d)" % (p, q))
        if check:
            self._check()

    @property
    def p_max(self):
        return len(self.columns) - 1

    @property
    def q_max(self):
        return self.columns[0].length_bound

    def dim(self, p, q):
        if 0 <= p <= self.p_max:
            return self.columns[p].dim(q)
        return 0

    def vertical(self, p, q):
        return self.columns[p].d(q)

    def delta(self, p, q):
        """Horizontal map out of (p, q); zero beyond the last column."""
        if 0 <= p < self.p_max and 0 <= q <= self.q_max:
            return self.horizontal[p][q]
        return RationalMatrix.zero(self.dim(p + 1, q), self.dim(p, q))

    def _check(self):
        for p in range(self.p_max - 1):
            for q in range(self.q_max + 1):
                if not (self.delta(p + 1, q) * self.delta(p, q)).is_zero():
                    raise ValueError("delta . delta != 0 at (%d, %d)" % (p, q))
        for p in range(self.p_max):
            for q in range(1, self.q_max + 1):
                lhs = self.delta(p, q - 1) * self.vertical(p, q)
                rhs = self.vertical(p + 1, q) * self.delta(p, q)
                if lhs != rhs:
                    raise ValueError("d delta != delta d at (%d, %d)" % (p, q))


def to_double_complex(c):
    """Spread a cosimplicial chain into its mixed double complex.

    Column p is level p; the horizontal differential out of column p is
    the alternating sum of the cofaces into level p + 1.
    """
    q_max = max(x.length_bound for x in c.complexes)
    columns = [c.level(p).pad_to(q_max) for p in range(c.truncation_level + 1)]
    horizontal = []
    for p in range(c.truncation_level):
        level = []
        for q in range(q_max + 1):
            acc = RationalMatrix.zero(columns[p + 1].dim(q), columns[p].dim(q))
            sign = 1
            for i in range(p + 2):
                comp = c.coface(p + 1, i).component(q)
                acc = acc + (comp if sign > 0 else -comp)
                sign = -sign
            level.append(acc)
        horizontal.append(level)
    return DoubleComplex(columns, horizontal)


def conormalized_double_complex(c):
    """Cut each level down to the joint kernel of its codegeneracies.

    The restricted alternating coface sum stays inside the kernels, so the
    trimmed columns again form a mixed double complex.  Its total complex
    is smaller than the full one yet has the same homology whenever the
    truncation is deep enough; the dimension drop is what makes nerve
    computations over finite diagrams feasible.
    """
    if not c.has_codegeneracies:
        raise ValueError("conormalization needs codegeneracy maps")
    full = to_double_complex(c)
    q_max = full.q_max
    n_top = c.truncation_level
    subs = []
    for p in range(n_top + 1):
        col = full.columns[p]
        per_q = []
        for q in range(q_max + 1):
            if p == 0:
                per_q.append(LinearSubspace.full(col.dim(q)))
            else:
                stacked = RationalMatrix.vstack(
                    [c.codegeneracy(p, j).component(q) for j in range(p)])
                per_q.append(kernel(stacked))
        subs.append(per_q)
    columns = []
    for p in range(n_top + 1):
        col = full.columns[p]
        dims = tuple(subs[p][q].dim for q in range(q_max + 1))
        diffs = tuple(matrix_in_bases(col.d(q), subs[p][q], subs[p][q - 1])
                      for q in range(1, q_max + 1))
        columns.append(ChainComplex(dims, diffs))
    horizontal = []
    for p in range(n_top):
        horizontal.append(
            [matrix_in_bases(full.horizontal[p][q], subs[p][q], subs[p + 1][q])
             for q in range(q_max + 1)])
    return DoubleComplex(columns, horizontal)


# --- total complexes --------------------------------------------------------

class TotComplex:
    """Truncated total complex, remembering where its pieces came from."""

    __slots__ = ("complex", "convention", "source", "degree0_inclusion",
                 "degree0_subspace", "ambient_dims")

    def __init__(self, complex, convention, source, degree0_inclusion,
                 degree0_subspace, ambient_dims):
        self.complex = complex
        self.convention = convention
        self.source = source
        self.degree0_inclusion = degree0_inclusion
        self.degree0_subspace = degree0_subspace
        self.ambient_dims = ambient_dims

    def layout(self, k):
        return tot_layout(self.source, k)


def tot_layout(dc, k):
    """Blocks (p, q, dim, offset) of the anti-diagonal q - p = k."""
    out = []
    off = 0
    for p in range(dc.p_max + 1):
        q = k + p
        if 0 <= q <= dc.q_max:
            d = dc.dim(p, q)
            out.append((p, q, d, off))
            off += d
    return out


def _tot_ambient_dim(dc, k):
    return sum(d for _p, _q, d, _o in tot_layout(dc, k))


def _tot_diff(dc, k, convention):
    """The total differential from anti-diagonal k to anti-diagonal k - 1."""
    src = tot_layout(dc, k)
    tgt = tot_layout(dc, k - 1)
    tgt_off = {(p, q): off for p, q, _d, off in tgt}
    rows = sum(d for _p, _q, d, _o in tgt)
    cols = sum(d for _p, _q, d, _o in src)
    data = {}

    def add(block, row0, col0, coeff):
        for (i, j), v in block.items():
            key = (row0 + i, col0 + j)
            val = data.get(key, 0) + coeff * v
            if val:
                data[key] = val
            else:
                data.pop(key, None)

    for p, q, d, off in src:
        if d == 0:
            continue
        if (p, q - 1) in tgt_off:
            add(dc.vertical(p, q), tgt_off[(p, q - 1)], off, 1)
        if (p + 1, q) in tgt_off:
            if convention == "map":
                coeff = -1 if (q - p) % 2 == 0 else 1
            else:
                coeff = 1 if q % 2 == 0 else -1
            add(dc.delta(p, q), tgt_off[(p + 1, q)], off, coeff)
    return RationalMatrix(rows, cols, data)


def _tot_build(dc, convention):
    k_max = dc.q_max
    dims = [_tot_ambient_dim(dc, k) for k in range(k_max + 1)]
    diffs = [_tot_diff(dc, k, convention) for k in range(1, k_max + 1)]
    ambient = ChainComplex(dims, diffs, check=True)
    d0 = _tot_diff(dc, 0, convention)
    truncated, incl, sub = smart_truncate_with_inclusion(ambient, d0)
    return TotComplex(truncated, convention, dc, incl, sub, tuple(dims))


def tot(dc):
    """Total complex under the mapping-complex sign convention."""
    return _tot_build(dc, "map")


def tot_dv(dc):
    """Total complex under the vertical-sign convention."""
    return _tot_build(dc, "v")


def _column_sign(p):
    return 1 if p % 4 in (0, 3) else -1


def sign_iso(dc):
    """The diagonal-signs chain isomorphism between the two conventions."""
    t_map = tot(dc)
    t_v = tot_dv(dc)
    k_max = dc.q_max
    comps = []
    for k in range(k_max + 1):
        layout = tot_layout(dc, k)
        n = sum(d for _p, _q, d, _o in layout)
        data = {}
        for p, _q, d, off in layout:
            s = _column_sign(p)
            for i in range(d):
                data[(off + i, off + i)] = s
        diag = RationalMatrix(n, n, data)
        if k == 0:
            cols = []
            try:
                for j in range(t_map.degree0_inclusion.cols):
                    vec = diag.mv(t_map.degree0_inclusion.col(j))
                    cols.append(list(t_v.degree0_subspace.coords(vec)))
            except ValueError as exc:
                raise SignIsoFailure("degree-0 signs leave the cycle space") from exc
            comps.append(RationalMatrix.from_cols(cols, rows=t_v.complex.dim(0)))
        else:
            comps.append(diag)
    try:
        return ChainMap(t_map.complex, t_v.complex, comps)
    except ValueError as exc:
        raise SignIsoFailure("sign map does not intertwine the differentials") from exc


def tot_cohomology(dc, n):
    """Homology dimension of the truncated total complex at degree n."""
    t = tot(dc)
    if not 0 <= n <= t.complex.length_bound:
        raise DegreeOutOfRange("degree %d outside 0..%d" % (n, t.complex.length_bound))
    return homology_dim(t.complex, n)


def induced_tot_map(src, tgt, level_maps):
    """The map of total complexes induced by a levelwise natural map.

    level_maps[n]: src level n -> tgt level n must commute with every
    coface; the induced map is blockwise on anti-diagonals, restricted to
    cycle spaces in degree 0.
    """
    n_top = src.truncation_level
    if tgt.truncation_level != n_top or len(level_maps) != n_top + 1:
        raise ValueError("need one level map per level")
    for n in range(1, n_top + 1):
        for i in range(n + 1):
            lhs = level_maps[n].compose(src.coface(n, i))
            rhs = tgt.coface(n, i).compose(level_maps[n - 1])
            if lhs != rhs:
                raise ValueError("level maps not natural at coface %d of level %d" % (i, n))
    dc_s = to_double_complex(src)
    dc_t = to_double_complex(tgt)
    t_s = tot(dc_s)
    t_t = tot(dc_t)
    k_max = max(dc_s.q_max, dc_t.q_max)
    comps = []
    for k in range(k_max + 1):
        lay_s = tot_layout(dc_s, k)
        lay_t = tot_layout(dc_t, k)
        t_off = {p: off for p, _q, _d, off in lay_t}
        rows = sum(d for _p, _q, d, _o in lay_t)
        cols = sum(d for _p, _q, d, _o in lay_s)
        data = {}
        for p, q, d, off in lay_s:
            if p not in t_off:
                continue
            block = level_maps[p].component(q)
            for (i, j), v in block.items():
                data[(t_off[p] + i, off + j)] = v
        ambient = RationalMatrix(rows, cols, data)
        if k == 0:
            cols_out = []
            for j in range(t_s.degree0_inclusion.cols):
                vec = ambient.mv(t_s.degree0_inclusion.col(j))
                cols_out.append(list(t_t.degree0_subspace.coords(vec)))
            comps.append(RationalMatrix.from_cols(cols_out, rows=t_t.complex.dim(0)))
        else:
            comps.append(ambient)
    return ChainMap(t_s.complex, t_t.complex, comps)


# --- the equalizer model ----------------------------------------------------

def _post_compose_rows(chain_components, src_blocks, tgt_blocks, k):
    """Matrix of f -> M . f between degree-k hom spaces.

    chain_components[j] is M_j; source hom blocks map A_i -> B_{i+k},
    target blocks A_i -> B'_{i+k}.
    """
    tgt_off = {i: (off, r, cc) for i, r, cc, off in tgt_blocks[0]}
    data = {}
    for i, r, cc, off in src_blocks[0]:
        if i not in tgt_off:
            continue
        o2, r2, c2 = tgt_off[i]
        m = chain_components(i + k)
        for a in range(r):
            for b in range(cc):
                col = off + a * cc + b
                for t in range(r2):
                    v = m.entry(t, a)
                    if v:
                        data[(o2 + t * c2 + b, col)] = v
    return RationalMatrix(tgt_blocks[1], src_blocks[1], data)


def _pre_compose_rows(chain_components, src_blocks, tgt_blocks, k):
    """Matrix of f -> f . P between degree-k hom spaces.

    P_i: A'_i -> A_i; source blocks map A_i -> B_{i+k}, target blocks
    A'_i -> B_{i+k}.
    """
    tgt_off = {i: (off, r, cc) for i, r, cc, off in tgt_blocks[0]}
    data = {}
    for i, r, cc, off in src_blocks[0]:
        if i not in tgt_off:
            continue
        o2, r2, c2 = tgt_off[i]
        p = chain_components(i)
        for a in range(r):
            for b in range(cc):
                col = off + a * cc + b
                for b2 in range(c2):
                    v = p.entry(b, b2)
                    if v:
                        data[(o2 + a * c2 + b2, col)] = v
    return RationalMatrix(tgt_blocks[1], src_blocks[1], data)


def verify_end_formula(c):
    """Check the equalizer description of the total complex.

    Families of degree-k maps out of free simplex chains, natural for
    every coface, are computed as an honest kernel; the evaluation at
    top simplices must then be an isomorphism of chain complexes onto
    the truncated total complex.  Codegeneracy naturality is deliberately
    left out: imposing it would annihilate the degenerate summands and
    produce the conormalized total complex instead, which only agrees up
    to quasi-isomorphism (see conormalized_double_complex).
    """
    n_top = c.truncation_level
    q_max = max(x.length_bound for x in c.complexes)
    levels = [c.level(n).pad_to(q_max) for n in range(n_top + 1)]
    simplices = [free_simplex_chains(n) for n in range(n_top + 1)]
    generators = []
    for n in range(1, n_top + 1):
        for i in range(n + 1):
            generators.append((n - 1, n, c.coface(n, i),
                               free_simplex_map(coface_values(i, n), n)))

    k_range = list(range(-1, q_max + 1))
    blocks = {}
    amb_off = {}
    amb_dim = {}
    end_space = {}
    for k in k_range:
        off = 0
        offs = []
        level_blocks = []
        for n in range(n_top + 1):
            bl = _hom_basis_blocks(simplices[n], levels[n], k)
            level_blocks.append(bl)
            offs.append(off)
            off += bl[1]
        blocks[k] = level_blocks
        amb_off[k] = offs
        amb_dim[k] = off
        rows = []
        for m, n2, cmap, pmap in generators:
            cond_blocks = _hom_basis_blocks(simplices[m], levels[n2], k)
            if cond_blocks[1] == 0:
                continue
            post = _post_compose_rows(cmap.component, level_blocks[m], cond_blocks, k)
            pre = _pre_compose_rows(pmap.component, level_blocks[n2], cond_blocks, k)
            row = RationalMatrix.zero(cond_blocks[1], off)
            row = _place(row, post, amb_off[k][m]) + _place(
                RationalMatrix.zero(cond_blocks[1], off), -pre, amb_off[k][n2])
            rows.append(row)
        if rows:
            end_space[k] = kernel(RationalMatrix.vstack(rows))
        else:
            end_space[k] = LinearSubspace.full(off)

    amb_diff = {}
    for k in range(0, q_max + 1):
        data = {}
        rows = amb_dim[k - 1]
        cols = amb_dim[k]
        for n in range(n_top + 1):
            d = _hom_differential(simplices[n], levels[n], k)
            for (i, j), v in d.items():
                data[(amb_off[k - 1][n] + i, amb_off[k][n] + j)] = v
        amb_diff[k] = RationalMatrix(rows, cols, data)

    try:
        end_dims = [end_space[k].dim for k in range(q_max + 1)]
        end_diffs = [matrix_in_bases(amb_diff[k], dom=end_space[k], cod=end_space[k - 1])
                     for k in range(1, q_max + 1)]
        end_d0 = matrix_in_bases(amb_diff[0], dom=end_space[0], cod=end_space[-1])
        end_ambient = ChainComplex(end_dims, end_diffs, check=True)
        end_trunc, end_incl, _sub = smart_truncate_with_inclusion(end_ambient, end_d0)
    except ValueError:
        return False

    dc = to_double_complex(c)
    t = tot(dc)
    if end_trunc.dims != t.complex.dims:
        return False

    comps = []
    for k in range(q_max + 1):
        theta = _top_simplex_evaluation(dc, blocks[k], amb_off[k], amb_dim[k], k)
        if k == 0:
            basis_cols = end_space[0].inclusion_matrix() * end_incl
        else:
            basis_cols = end_space[k].inclusion_matrix()
        mapped = theta * basis_cols
        if k == 0:
            try:
                cols_out = [list(t.degree0_subspace.coords(mapped.col(j)))
                            for j in range(mapped.cols)]
            except ValueError:
                return False
            comps.append(RationalMatrix.from_cols(cols_out, rows=t.complex.dim(0)))
        else:
            comps.append(mapped)
    try:
        cm = ChainMap(end_trunc, t.complex, comps)
    except ValueError:
        return False
    return all(rank(cm.component(k)) == t.complex.dim(k)
               for k in range(t.complex.length_bound + 1))


def _place(base, block, col_off):
    """Add block into base at column offset (rows aligned)."""
    data = {key: v for key, v in base.items()}
    for (i, j), v in block.items():
        key = (i, j + col_off)
        val = data.get(key, 0) + v
        if val:
            data[key] = val
        else:
            data.pop(key, None)
    return RationalMatrix(base.rows, base.cols, data)


def _top_simplex_evaluation(dc, level_blocks, offs, total, k):
    """Evaluate a family at each top simplex: end ambient -> anti-diagonal."""
    layout = tot_layout(dc, k)
    rows = sum(d for _p, _q, d, _o in layout)
    data = {}
    for p, q, d, off in layout:
        bl, _total_n = level_blocks[p]
        for i, r, cc, boff in bl:
            if i == p:
                # the top-dimensional piece of the p-simplex chains is a line
                for a in range(r):
                    data[(off + a, offs[p] + boff + a * cc + (cc - 1))] = 1
    return RationalMatrix(rows, total, data)
