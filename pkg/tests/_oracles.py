"""Independent reference implementations used only by the test suite.

These deliberately share no code with the package: dense Fraction-based
elimination, brute-force simplicial cohomology of a simplicial complex,
and seeded random generators for complexes and double complexes.
"""

from fractions import Fraction
from itertools import combinations
import random


# ---------------------------------------------------------------------------
# dense Fraction linear algebra


def dense_rref(rows):
    """Classic dense RREF over Fraction. Returns (rref rows, pivot cols)."""
    m = [[Fraction(x) for x in row] for row in rows]
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, nrows):
            if m[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(nrows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return [row for row in m if any(row)], pivots


def dense_rank(rows):
    return len(dense_rref(rows)[0])


def dense_kernel_dim(rows, ncols):
    return ncols - dense_rank(rows) if rows else ncols


# ---------------------------------------------------------------------------
# brute-force simplicial cohomology (rational coefficients)


def simplicial_cohomology(facets_or_simplices, top_dim=None):
    """Betti numbers (b_0, b_1, ...) of a simplicial complex.

    Input: iterable of simplices as sorted vertex tuples; the complex is the
    downward closure. Cochain complex built over Q with the standard signed
    coboundary; returns Betti numbers up to the top dimension present.
    """
    simplices = set()
    for s in facets_or_simplices:
        s = tuple(sorted(s))
        for k in range(1, len(s) + 1):
            for face in combinations(s, k):
                simplices.add(face)
    by_dim = {}
    for s in simplices:
        by_dim.setdefault(len(s) - 1, []).append(s)
    for k in by_dim:
        by_dim[k].sort()
    dmax = max(by_dim) if by_dim else -1
    if top_dim is not None:
        dmax = max(dmax, top_dim)
    index = {k: {s: i for i, s in enumerate(by_dim.get(k, []))} for k in range(dmax + 2)}

    def coboundary_rank(k):
        # rank of delta: C^k -> C^{k+1}
        rows_src = by_dim.get(k, [])
        tgt = by_dim.get(k + 1, [])
        if not rows_src or not tgt:
            return 0
        mat = [[0] * len(rows_src) for _ in tgt]
        for s in tgt:
            i = index[k + 1][s]
            for j, v in enumerate(s):
                face = s[:j] + s[j + 1:]
                col = index[k].get(face)
                if col is not None:
                    mat[i][col] += (-1) ** j
        return dense_rank(mat)

    betti = []
    for k in range(dmax + 1):
        nk = len(by_dim.get(k, []))
        rk = coboundary_rank(k)
        rk_prev = coboundary_rank(k - 1) if k > 0 else 0
        betti.append(nk - rk - rk_prev)
    return tuple(betti)


# ---------------------------------------------------------------------------
# seeded random generators (package-independent data, package types built
# by the caller)


def random_rational(rng, span=6):
    num = rng.randint(-span, span)
    den = rng.choice([1, 1, 1, 2, 3])
    return Fraction(num, den)


def random_matrix_rows(rng, rows, cols, density=0.5, span=4):
    return [[random_rational(rng, span) if rng.random() < density else Fraction(0)
             for _ in range(cols)] for _ in range(rows)]


def random_chain_complex_data(rng, max_len=5, max_dim=4):
    """dims plus differentials (as row lists) with d.d = 0 guaranteed.

    d_k is built to land inside the kernel of d_{k-1}: pick the kernel of
    the previous differential (dense elimination here, independent of the
    package) and compose a random matrix into it.
    """
    L = rng.randint(0, max_len)
    dims = [rng.randint(0, max_dim) for _ in range(L + 1)]
    diffs = []
    prev = None  # d_{k-1} as row lists, maps C_{k-1} -> C_{k-2}
    for k in range(1, L + 1):
        rows_out, cols_in = dims[k - 1], dims[k]
        if prev is None or not any(any(r) for r in prev):
            kern_basis = [[Fraction(1) if i == j else Fraction(0) for j in range(rows_out)]
                          for i in range(rows_out)]
        else:
            kern_basis = dense_kernel_basis(prev, rows_out)
        kd = len(kern_basis)
        mix = random_matrix_rows(rng, kd, cols_in, density=0.6)
        d = [[sum((kern_basis[t][i] * mix[t][j] for t in range(kd)), Fraction(0))
              for j in range(cols_in)] for i in range(rows_out)]
        diffs.append(d)
        prev = d
    return dims, diffs


def dense_kernel_basis(rows, ncols):
    """Kernel basis vectors (as lists) of the matrix given by rows."""
    red, pivots = dense_rref(rows)
    pivset = set(pivots)
    free = [j for j in range(ncols) if j not in pivset]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, c in enumerate(pivots):
            if i < len(red):
                v[c] = -red[i][f]
        basis.append(v)
    return basis


def seeded_rng(seed):
    return random.Random(seed)
