"""Truncated simplicial and cosimplicial vector spaces over the rationals.

A simplicial vector space is stored up to a finite truncation level, with
every face and degeneracy operator given as an explicit matrix and every
simplicial identity among the stored operators verified at construction.
The normalization functor sends such an object to the chain complex of
intersected face kernels; its inverse builds the simplicial object whose
level n is a direct sum over monotone surjections.  Free simplex chains
and matching objects of cosimplicial objects round out the toolkit.
"""

from itertools import product, combinations

from .qlinalg import RationalMatrix, LinearSubspace, kernel, matrix_in_bases, rank
from .chaincx import ChainComplex, ChainMap, DegreeOutOfRange


class TruncationTooSmall(ValueError):
    """The requested truncation level cannot hold the given complex."""


class SimplicialIdentityError(ValueError):
    """A stored operator violates a simplicial or cosimplicial identity."""


def _as_tuple_of_lists(ops):
    return tuple(tuple(level) for level in ops)


class SimplicialVect:
    """A simplicial vector space truncated at a finite level.

    levels: dims of V_0, ..., V_N.
    faces[n - 1] lists d_0, ..., d_n: V_n -> V_{n-1} for 1 <= n <= N.
    degeneracies[n] lists s_0, ..., s_n: V_n -> V_{n+1} for 0 <= n < N.
    """

    __slots__ = ("levels", "faces", "degeneracies")

    def __init__(self, levels, faces, degeneracies, check=True):
        self.levels = tuple(int(x) for x in levels)
        self.faces = _as_tuple_of_lists(faces)
        self.degeneracies = _as_tuple_of_lists(degeneracies)
        n_top = self.truncation_level
        if len(self.faces) != n_top:
            raise ValueError("need face lists for levels 1..%d" % n_top)
        if len(self.degeneracies) != n_top:
            raise ValueError("need degeneracy lists for levels 0..%d" % (n_top - 1))
        for n in range(1, n_top + 1):
            if len(self.faces[n - 1]) != n + 1:
                raise ValueError("level %d needs %d faces" % (n, n + 1))
            for m in self.faces[n - 1]:
                if (m.rows, m.cols) != (self.levels[n - 1], self.levels[n]):
                    raise ValueError("face shape mismatch at level %d" % n)
        for n in range(n_top):
            if len(self.degeneracies[n]) != n + 1:
                raise ValueError("level %d needs %d degeneracies" % (n, n + 1))
            for m in self.degeneracies[n]:
                if (m.rows, m.cols) != (self.levels[n + 1], self.levels[n]):
                    raise ValueError("degeneracy shape mismatch at level %d" % n)
        if check:
            self._check_identities()

    @property
    def truncation_level(self):
        return len(self.levels) - 1

    def dim(self, n):
        return self.levels[n]

    def face(self, n, i):
        """d_i on level n (1 <= n <= truncation, 0 <= i <= n)."""
        return self.faces[n - 1][i]

    def degeneracy(self, n, j):
        """s_j on level n (0 <= n < truncation, 0 <= j <= n)."""
        return self.degeneracies[n][j]

    def _check_identities(self):
        n_top = self.truncation_level
        for n in range(2, n_top + 1):
            for j in range(n + 1):
                for i in range(j):
                    lhs = self.face(n - 1, i) * self.face(n, j)
                    rhs = self.face(n - 1, j - 1) * self.face(n, i)
                    if lhs != rhs:
                        raise SimplicialIdentityError(
                            "d_%d d_%d != d_%d d_%d at level %d" % (i, j, j - 1, i, n))
        for n in range(n_top - 1):
            for j in range(n + 1):
                for i in range(j + 1):
                    lhs = self.degeneracy(n + 1, i) * self.degeneracy(n, j)
                    rhs = self.degeneracy(n + 1, j + 1) * self.degeneracy(n, i)
                    if lhs != rhs:
                        raise SimplicialIdentityError(
                            "s_%d s_%d != s_%d s_%d at level %d" % (i, j, j + 1, i, n))
        for n in range(n_top):
            ident = RationalMatrix.identity(self.levels[n])
            for j in range(n + 1):
                sj = self.degeneracy(n, j)
                for i in range(n + 2):
                    lhs = self.face(n + 1, i) * sj
                    if i == j or i == j + 1:
                        rhs = ident
                    elif i < j:
                        rhs = self.degeneracy(n - 1, j - 1) * self.face(n, i)
                    else:
                        rhs = self.degeneracy(n - 1, j) * self.face(n, i - 1)
                    if lhs != rhs:
                        raise SimplicialIdentityError(
                            "d_%d s_%d relation fails at level %d" % (i, j, n))


class CosimplicialVect:
    """A cosimplicial vector space truncated at a finite level.

    levels: dims of A^0, ..., A^N.
    cofaces[n - 1] lists d^0, ..., d^n: A^{n-1} -> A^n for 1 <= n <= N.
    codegeneracies[n - 1] lists s^0, ..., s^{n-1}: A^n -> A^{n-1}.
    """

    __slots__ = ("levels", "cofaces", "codegeneracies")

    def __init__(self, levels, cofaces, codegeneracies, check=True):
        self.levels = tuple(int(x) for x in levels)
        self.cofaces = _as_tuple_of_lists(cofaces)
        self.codegeneracies = _as_tuple_of_lists(codegeneracies)
        n_top = self.truncation_level
        if len(self.cofaces) != n_top or len(self.codegeneracies) != n_top:
            raise ValueError("need coface and codegeneracy lists for levels 1..%d" % n_top)
        for n in range(1, n_top + 1):
            if len(self.cofaces[n - 1]) != n + 1:
                raise ValueError("level %d needs %d cofaces" % (n, n + 1))
            for m in self.cofaces[n - 1]:
                if (m.rows, m.cols) != (self.levels[n], self.levels[n - 1]):
                    raise ValueError("coface shape mismatch at level %d" % n)
            if len(self.codegeneracies[n - 1]) != n:
                raise ValueError("level %d needs %d codegeneracies" % (n, n))
            for m in self.codegeneracies[n - 1]:
                if (m.rows, m.cols) != (self.levels[n - 1], self.levels[n]):
                    raise ValueError("codegeneracy shape mismatch at level %d" % n)
        if check:
            self._check_identities()

    @property
    def truncation_level(self):
        return len(self.levels) - 1

    def dim(self, n):
        return self.levels[n]

    def coface(self, n, i):
        """d^i into level n (1 <= n <= truncation, 0 <= i <= n)."""
        return self.cofaces[n - 1][i]

    def codegeneracy(self, n, j):
        """s^j out of level n (1 <= n <= truncation, 0 <= j <= n - 1)."""
        return self.codegeneracies[n - 1][j]

    def _check_identities(self):
        n_top = self.truncation_level
        for n in range(2, n_top + 1):
            for j in range(n + 1):
                for i in range(j):
                    lhs = self.coface(n, j) * self.coface(n - 1, i)
                    rhs = self.coface(n, i) * self.coface(n - 1, j - 1)
                    if lhs != rhs:
                        raise SimplicialIdentityError(
                            "d^%d d^%d != d^%d d^%d into level %d" % (j, i, i, j - 1, n))
        for m in range(2, n_top + 1):
            for j in range(m - 1):
                for i in range(j + 1):
                    lhs = self.codegeneracy(m - 1, j) * self.codegeneracy(m, i)
                    rhs = self.codegeneracy(m - 1, i) * self.codegeneracy(m, j + 1)
                    if lhs != rhs:
                        raise SimplicialIdentityError(
                            "s^%d s^%d != s^%d s^%d out of level %d" % (j, i, i, j + 1, m))
        for m in range(1, n_top + 1):
            ident = RationalMatrix.identity(self.levels[m - 1])
            for j in range(m):
                sj = self.codegeneracy(m, j)
                for i in range(m + 1):
                    lhs = sj * self.coface(m, i)
                    if i == j or i == j + 1:
                        rhs = ident
                    elif i < j:
                        rhs = self.coface(m - 1, i) * self.codegeneracy(m - 1, j - 1)
                    else:
                        rhs = self.coface(m - 1, i - 1) * self.codegeneracy(m - 1, j)
                    if lhs != rhs:
                        raise SimplicialIdentityError(
                            "s^%d d^%d relation fails into level %d" % (j, i, m))


def dualize(v):
    """The cosimplicial vector space of transposed operators."""
    cofaces = [[m.transpose() for m in level] for level in v.faces]
    codegens = [[v.degeneracy(n, j).transpose() for j in range(n + 1)]
                for n in range(v.truncation_level)]
    return CosimplicialVect(v.levels, cofaces, codegens)


# --- normalization and its inverse -----------------------------------------

def normalized_subspaces(v):
    """The intersected face kernels N_n = ker d_1 cap ... cap ker d_n."""
    out = [LinearSubspace.full(v.dim(0))]
    for n in range(1, v.truncation_level + 1):
        stacked = RationalMatrix.vstack([v.face(n, i) for i in range(1, n + 1)])
        out.append(kernel(stacked))
    return out


def normalized_chains(v):
    """The chain complex of intersected face kernels, with differential d_0."""
    subs = normalized_subspaces(v)
    dims = tuple(s.dim for s in subs)
    diffs = []
    for n in range(1, v.truncation_level + 1):
        diffs.append(matrix_in_bases(v.face(n, 0), dom=subs[n], cod=subs[n - 1]))
    return ChainComplex(dims, diffs)


def coface_values(i, n):
    """Value tuple of the monotone injection [n-1] -> [n] missing i."""
    return tuple(x for x in range(n + 1) if x != i)


def codegeneracy_values(j, n):
    """Value tuple of the monotone surjection [n+1] -> [n] repeating j."""
    return tuple(x if x <= j else x - 1 for x in range(n + 2))


def surjections_onto_all(n):
    """All monotone surjections out of [n], as value tuples, in lex order.

    Each surjection [n] ->> [p] is determined by which of the n steps
    increase; enumerating the step vectors lexicographically enumerates the
    value sequences lexicographically.
    """
    out = []
    for steps in product((0, 1), repeat=n):
        vals = [0]
        for b in steps:
            vals.append(vals[-1] + b)
        out.append(tuple(vals))
    return out


def _epi_mono(vals):
    """Factor a monotone map (as value tuple) as mono . epi.

    Returns (epi value tuple, mono value tuple): the epi goes [m] ->> [q]
    and the mono [q] -> [p] lists the image in increasing order.
    """
    image = sorted(set(vals))
    index = {v: i for i, v in enumerate(image)}
    return tuple(index[v] for v in vals), tuple(image)


def _mono_action(c, mono, p):
    """The operator C_p -> C_q the normalized complex assigns to a mono.

    Identity monos act as the identity, the mono hitting {1, ..., p} acts
    as the differential, every other mono acts as zero.
    """
    q = len(mono) - 1
    if q == p:
        return RationalMatrix.identity(c.dim(p))
    if q == p - 1 and mono == tuple(range(1, p + 1)):
        return c.d(p)
    return RationalMatrix.zero(c.dim(q), c.dim(p))


def _dk_layout(c, n):
    """Summand layout of level n: list of (value tuple, target p, offset)."""
    out = []
    offset = 0
    for vals in surjections_onto_all(n):
        p = vals[-1]
        out.append((vals, p, offset))
        offset += c.dim(p)
    return out, offset


def _dk_structure_map(c, alpha, layout_src, layout_tgt):
    """Matrix of the structure map along a monotone alpha: [m] -> [n].

    layout_src is the layout of level n (the domain of the matrix),
    layout_tgt of level m.  Summand eta of the domain contributes the
    mono action along the epi-mono factorization of eta . alpha, placed
    at the summand of the epi part.
    """
    tgt_offsets = {vals: off for vals, _p, off in layout_tgt[0]}
    tgt_p = {vals: p for vals, p, _off in layout_tgt[0]}
    data = {}
    for vals, p, col_off in layout_src[0]:
        composed = tuple(vals[a] for a in alpha)
        epi, mono = _epi_mono(composed)
        block = _mono_action(c, mono, p)
        row_off = tgt_offsets[epi]
        for (i, j), val in block.items():
            data[(row_off + i, col_off + j)] = val
    return RationalMatrix(layout_tgt[1], layout_src[1], data)


def dold_kan(c, truncation_level):
    """The simplicial vector space with summands indexed by surjections.

    Degrees of c above the truncation level would be invisible to the
    result, so they raise instead of being dropped.
    """
    for k in range(truncation_level + 1, c.length_bound + 1):
        if c.dim(k) != 0:
            raise TruncationTooSmall(
                "complex has dim %d in degree %d, above truncation %d"
                % (c.dim(k), k, truncation_level))
    layouts = [_dk_layout(c, n) for n in range(truncation_level + 1)]
    levels = [lay[1] for lay in layouts]
    faces = []
    for n in range(1, truncation_level + 1):
        faces.append([_dk_structure_map(c, coface_values(i, n), layouts[n], layouts[n - 1])
                      for i in range(n + 1)])
    degeneracies = []
    for n in range(truncation_level):
        degeneracies.append([_dk_structure_map(c, codegeneracy_values(j, n),
                                               layouts[n], layouts[n + 1])
                             for j in range(n + 1)])
    return SimplicialVect(levels, faces, degeneracies)


def identity_summand_embedding(c, n):
    """Columns embedding C_n into level n at the identity summand."""
    layout = _dk_layout(c, n)
    ident = tuple(range(n + 1))
    off = next(o for vals, _p, o in layout[0] if vals == ident)
    data = {(off + j, j): 1 for j in range(c.dim(n))}
    return RationalMatrix(layout[1], c.dim(n), data)


# --- free simplex chains ----------------------------------------------------

def free_simplex_chains(n):
    """Normalized chains of the free simplicial vector space on the n-simplex.

    Basis in degree k: the (k+1)-subsets of {0, ..., n} in lex order, with
    the alternating-sign boundary.
    """
    bases = [list(combinations(range(n + 1), k + 1)) for k in range(n + 1)]
    dims = tuple(len(b) for b in bases)
    diffs = []
    for k in range(1, n + 1):
        index = {s: i for i, s in enumerate(bases[k - 1])}
        data = {}
        for j, simplex in enumerate(bases[k]):
            sign = 1
            for drop in range(k + 1):
                face = simplex[:drop] + simplex[drop + 1:]
                key = (index[face], j)
                data[key] = data.get(key, 0) + sign
                sign = -sign
        diffs.append(RationalMatrix(dims[k - 1], dims[k], data))
    return ChainComplex(dims, diffs)


def free_simplex_map(alpha, target_n):
    """The chain map between free simplex chains induced by a monotone map.

    alpha is the value tuple of a monotone map [m] -> [target_n]; a basis
    simplex goes to its image subset when alpha is injective on it and to
    zero otherwise.
    """
    m = len(alpha) - 1
    src = free_simplex_chains(m)
    tgt = free_simplex_chains(target_n)
    comps = []
    for k in range(m + 1):
        src_basis = list(combinations(range(m + 1), k + 1))
        tgt_index = {s: i for i, s in enumerate(combinations(range(target_n + 1), k + 1))}
        data = {}
        for j, simplex in enumerate(src_basis):
            image = tuple(alpha[v] for v in simplex)
            if len(set(image)) == len(image):
                data[(tgt_index[image], j)] = 1
        comps.append(RationalMatrix(tgt.dim(k), src.dim(k), data))
    return ChainMap(src, tgt, comps)


# --- matching objects -------------------------------------------------------

def matching_object(a, n):
    """The matching subspace at level n and the map into it.

    The subspace sits inside the n-fold sum of copies of A^{n-1} and
    consists of the tuples (a_0, ..., a_{n-1}) with
    s^j a_i = s^i a_{j+1} for i <= j; the map sends x to
    (s^0 x, ..., s^{n-1} x).
    """
    if n < 1 or n > a.truncation_level:
        raise DegreeOutOfRange("matching object needs 1 <= n <= truncation")
    block = a.dim(n - 1)
    ambient = n * block
    rows = []
    for j in range(n - 1):
        for i in range(j + 1):
            sj = a.codegeneracy(n - 1, j)
            si = a.codegeneracy(n - 1, i)
            grid_row = []
            for slot in range(n):
                if slot == i:
                    grid_row.append(sj)
                elif slot == j + 1:
                    grid_row.append(-si)
                else:
                    grid_row.append(RationalMatrix.zero(sj.rows, block))
            rows.append(RationalMatrix.hstack(grid_row))
    if rows:
        space = kernel(RationalMatrix.vstack(rows))
    else:
        space = LinearSubspace.full(ambient)
    stacked = RationalMatrix.vstack([a.codegeneracy(n, j) for j in range(n)])
    return space, stacked


def matching_map_surjective(a, n):
    """Whether the matching map hits the whole matching subspace."""
    space, stacked = matching_object(a, n)
    return rank(stacked) == space.dim
