"""Chain complexes: truncation, path objects, pullbacks, homotopy pullbacks."""

from fractions import Fraction

import pytest

from cechdr.qlinalg import RationalMatrix, rat, rank
from cechdr.chaincx import (
    ChainComplex, ChainMap, CommutingSquare, SquareNotCommuting,
    homology_dim, mapping_complex, smart_truncate, path_object,
    pullback, PullbackData, is_fibration, homotopy_pullback, is_quasi_iso,
    compare_into_homotopy_pullback, comparison_into_homotopy_pullback,
    same_complex,
)

from _oracles import (
    random_chain_complex_data, seeded_rng, dense_kernel_dim,
)


def build_complex(dims, diffs):
    mats = [RationalMatrix.from_rows([[Fraction(x) for x in row] for row in d],
                                     cols=dims[k + 1])
            for k, d in enumerate(diffs)]
    return ChainComplex(dims, mats)


def random_complex(rng, max_len=4, max_dim=3):
    dims, diffs = random_chain_complex_data(rng, max_len, max_dim)
    return build_complex(dims, diffs)


Q0 = ChainComplex.concentrated(1, 0)          # one generator, degree 0
ID_CX = ChainComplex((1, 1), (RationalMatrix.identity(1),))   # Q --id--> Q
ZD_CX = ChainComplex((1, 1), (RationalMatrix.zero(1, 1),))    # Q --0--> Q


# --- construction ----------------------------------------------------------

def test_dd_zero_enforced():
    d2 = RationalMatrix.identity(1)
    d1 = RationalMatrix.identity(1)
    with pytest.raises(ValueError):
        ChainComplex((1, 1, 1), (d1, d2))


def test_zero_complex_first_class():
    z = ChainComplex.zero(3)
    assert homology_dim(z, 2) == 0
    p, proj, incl = path_object(z)
    assert all(x == 0 for x in p.dims)


# --- homology --------------------------------------------------------------

def test_homology_identity_complex():
    assert homology_dim(ID_CX, 0) == 0
    assert homology_dim(ID_CX, 1) == 0


def test_homology_zero_differential():
    assert homology_dim(ZD_CX, 0) == 1
    assert homology_dim(ZD_CX, 1) == 1


# --- mapping complex -------------------------------------------------------

def test_mapping_from_point_recovers_target():
    rng = seeded_rng(3)
    for _ in range(10):
        d = random_complex(rng)
        m = mapping_complex(Q0, d)
        assert m.dims == d.pad_to(m.length_bound).dims
        for k in range(1, m.length_bound + 1):
            assert m.d(k) == d.d(k)


def test_mapping_into_zero():
    c = random_complex(seeded_rng(5))
    m = mapping_complex(c, ChainComplex.zero(2))
    assert all(x == 0 for x in m.dims)


def test_mapping_degree0_counts_chain_maps():
    m = mapping_complex(ZD_CX, ZD_CX)
    assert m.dim(0) == 2


def chain_map_space_dim_oracle(c, d):
    """Dim of the space of chain maps c -> d by brute linear algebra."""
    L = max(c.length_bound, d.length_bound)
    cp, dp = c.pad_to(L), d.pad_to(L)
    cols = []
    offs = []
    total = 0
    for k in range(L + 1):
        offs.append(total)
        total += dp.dim(k) * cp.dim(k)
    rows = []
    for k in range(1, L + 1):
        # d_D f_k - f_{k-1} d_C = 0, entrywise
        for a in range(dp.dim(k - 1)):
            for b in range(cp.dim(k)):
                row = [Fraction(0)] * total
                for t in range(dp.dim(k)):
                    v = dp.d(k).entry(a, t)
                    if v:
                        row[offs[k] + t * cp.dim(k) + b] += Fraction(str(v))
                for t in range(cp.dim(k - 1)):
                    v = cp.d(k).entry(t, b)
                    if v:
                        row[offs[k - 1] + a * cp.dim(k - 1) + t] -= Fraction(str(v))
                if any(row):
                    rows.append(row)
    return dense_kernel_dim(rows, total)


def test_mapping_degree0_matches_oracle_random():
    rng = seeded_rng(17)
    for _ in range(15):
        c = random_complex(rng, max_len=3, max_dim=2)
        d = random_complex(rng, max_len=3, max_dim=2)
        assert mapping_complex(c, d).dim(0) == chain_map_space_dim_oracle(c, d)


# --- smart truncation ------------------------------------------------------

def test_smart_truncate_zero_d0():
    c = random_complex(seeded_rng(9))
    out = smart_truncate(c, RationalMatrix.zero(0, c.dim(0)))
    assert out.dims == c.dims


def test_smart_truncate_kernel():
    c = ChainComplex((2,), ())
    out = smart_truncate(c, RationalMatrix.from_rows([[1, 1]]))
    assert out.dims == (1,)


def test_smart_truncate_zero_complex():
    out = smart_truncate(ChainComplex.zero(0), RationalMatrix.zero(0, 0))
    assert out.dims == (0,)


# --- path objects ----------------------------------------------------------

def test_path_object_point():
    p, proj, incl = path_object(Q0)
    assert p.dims == (1,)
    assert proj.component(0).to_rows() == [[rat(1)], [rat(1)]]


def test_path_object_two_term_zero_diff():
    p, proj, incl = path_object(ZD_CX)
    assert p.dims == (2, 2)
    # with d = 0 the degree-0 projection is (x, z) -> (x, x)
    assert proj.component(0).to_rows() == [[rat(1), rat(0)], [rat(1), rat(0)]]


def test_path_object_contract_random():
    rng = seeded_rng(21)
    for _ in range(15):
        c = random_complex(rng)
        p, proj, incl = path_object(c)
        assert is_fibration(proj)
        for n in range(c.length_bound + 1):
            assert homology_dim(p.pad_to(c.length_bound), n) == homology_dim(c, n)
        # incl followed by either projection is the identity
        both = proj.compose(incl)
        for n in range(c.length_bound + 1):
            blk = both.component(n)
            for i in range(c.dim(n)):
                for j in range(c.dim(n)):
                    want = rat(1) if i == j else rat(0)
                    assert blk.entry(i, j) == want
                    assert blk.entry(c.dim(n) + i, j) == want
        assert is_quasi_iso(incl)


# --- pullbacks -------------------------------------------------------------

def test_pullback_along_identity():
    rng = seeded_rng(31)
    c = random_complex(rng)
    d = random_complex(rng)
    f = random_chain_map(rng, c, d)
    p, (l1, l2) = pullback(f, ChainMap.identity(f.target))
    assert p.dims == f.source.dims
    assert is_quasi_iso(l1)


def test_pullback_of_zero_maps_is_direct_sum():
    rng = seeded_rng(33)
    x = random_complex(rng)
    y = random_complex(rng)
    z = random_complex(rng)
    fz = ChainMap.zero_map(x, z)
    gz = ChainMap.zero_map(y, z)
    p, _ = pullback(fz, gz)
    assert sum(p.dims) == sum(x.direct_sum(y).dims)


def random_chain_map(rng, src, tgt):
    """A random chain map src -> tgt, built degree by degree.

    Solves the commuting constraint top-down: choose f_L freely on cycles?
    Simpler: build as g . d + d . h for random degree maps (always a chain
    map) plus a random multiple of the identity when shapes allow.
    """
    L = max(src.length_bound, tgt.length_bound)
    s, t = src.pad_to(L), tgt.pad_to(L)
    g = [RationalMatrix(t.dim(n + 1), s.dim(n),
                        {(i, j): rng.randint(-2, 2)
                         for i in range(t.dim(n + 1)) for j in range(s.dim(n))
                         if rng.random() < 0.5})
         for n in range(L + 1)]
    comps = []
    for n in range(L + 1):
        # f_n = d_{n+1}^t . g_n + g_{n-1} . d_n^s  is always a chain map
        a = t.d(n + 1) * g[n]
        if n >= 1:
            a = a + g[n - 1] * s.d(n)
        comps.append(a)
    return ChainMap(s, t, comps)


# --- fibrations ------------------------------------------------------------

def test_identity_is_fibration():
    c = random_complex(seeded_rng(41))
    assert is_fibration(ChainMap.identity(c))


def test_zero_to_positive_not_fibration():
    d = ChainComplex.concentrated(1, 1)
    assert not is_fibration(ChainMap.zero_map(ChainComplex.zero(1), d))


def test_degree0_only_map_vacuously_fibration():
    src = ChainComplex.concentrated(1, 0)
    tgt = ChainComplex.concentrated(2, 0)
    f = ChainMap(src, tgt, [RationalMatrix.from_rows([[1], [0]])])
    assert is_fibration(f)


# --- homotopy pullbacks ----------------------------------------------------

def test_hopullback_of_identities_is_quasi_iso_to_Z():
    rng = seeded_rng(51)
    for _ in range(8):
        z = random_complex(rng, max_len=3, max_dim=3)
        idz = ChainMap.identity(z)
        sq = CommutingSquare(idz, idz, idz, idz)
        assert compare_into_homotopy_pullback(sq)


def test_hopullback_over_zero_is_direct_sum():
    rng = seeded_rng(53)
    x = random_complex(rng)
    y = random_complex(rng)
    z = ChainComplex.zero(0)
    p = homotopy_pullback(ChainMap.zero_map(x, z), ChainMap.zero_map(y, z))
    s = x.direct_sum(y)
    L = max(p.length_bound, s.length_bound)
    for n in range(L + 1):
        assert homology_dim(p.pad_to(L), n) == homology_dim(s.pad_to(L), n)


def test_loop_space_shifts_homology():
    rng = seeded_rng(55)
    for _ in range(10):
        z = random_complex(rng, max_len=4, max_dim=3)
        zero = ChainComplex.zero(0)
        p = homotopy_pullback(ChainMap.zero_map(zero, z), ChainMap.zero_map(zero, z))
        L = z.length_bound
        pp = p.pad_to(L + 1)
        for n in range(L + 1):
            want = homology_dim(z, n + 1) if n + 1 <= L else 0
            assert homology_dim(pp, n) == want


def test_quasi_iso_examples():
    assert is_quasi_iso(ChainMap.identity(random_complex(seeded_rng(61))))
    acyclic = ID_CX
    assert is_quasi_iso(ChainMap.zero_map(ChainComplex.zero(1), acyclic))
    assert not is_quasi_iso(ChainMap.zero_map(ChainComplex.zero(0), Q0))


def test_compare_requires_strict_commutation():
    # top and right compose to identity, bottom and left to zero: not commuting
    z = Q0
    idm = ChainMap.identity(z)
    zm = ChainMap.zero_map(z, z)
    sq = CommutingSquare(idm, idm, zm, idm)
    with pytest.raises(SquareNotCommuting):
        compare_into_homotopy_pullback(sq)


def test_pullback_square_with_fibration_leg_passes():
    rng = seeded_rng(63)
    for _ in range(8):
        z = random_complex(rng, max_len=3, max_dim=2)
        y = random_complex(rng, max_len=3, max_dim=2)
        x = z.direct_sum(random_complex(rng, max_len=3, max_dim=2))
        f = projection_map(x, z)       # fibration (surjective everywhere)
        g = random_chain_map(rng, y, z)
        pd = PullbackData(f, g)
        sq = CommutingSquare(pd.leg2, pd.leg1, f, g)
        assert compare_into_homotopy_pullback(sq)


def projection_map(xsum, z):
    """Projection (z + rest) -> z; components [I 0]."""
    L = xsum.length_bound
    zp = z.pad_to(L)
    comps = []
    for n in range(L + 1):
        zd = zp.dim(n)
        rest = xsum.dim(n) - zd
        comps.append(RationalMatrix.hstack([RationalMatrix.identity(zd),
                                            RationalMatrix.zero(zd, rest)]))
    return ChainMap(xsum, zp, comps)


def test_zero_apex_over_nonzero_cospan_fails():
    # loop space of Q[1] has homology Q in degree 0, so the zero apex is
    # not an equivalence
    z = ChainComplex.concentrated(1, 1)
    zero = ChainComplex.zero(0)
    f = ChainMap.zero_map(zero, z)
    sq = CommutingSquare(ChainMap.zero_map(zero, zero),
                         ChainMap.zero_map(zero, zero), f, f)
    assert not compare_into_homotopy_pullback(sq)


# --- pasting ---------------------------------------------------------------

def make_pasting_triple(rng, broken=False):
    """Two composable squares sharing an edge, plus the pasted rectangle.

    All three are genuine pullbacks over fibrations, so the lemma predicts
    all pass; with broken=True the left apex gains extra homology, so left
    and outer must both fail while the right still passes.
    """
    z = random_complex(rng, max_len=3, max_dim=2)
    y = random_complex(rng, max_len=3, max_dim=2)
    x = z.direct_sum(random_complex(rng, max_len=3, max_dim=2))
    f = projection_map(x, z)                       # fibration X -> Z
    g = random_chain_map(rng, y, z)
    right_pd = PullbackData(f, g)                  # P1 = X x_Z Y
    w = x.direct_sum(random_complex(rng, max_len=3, max_dim=2))
    h = projection_map(w, x)                       # fibration W -> X
    left_pd = PullbackData(h, right_pd.leg1)       # P2 = W x_X P1
    right_sq = CommutingSquare(right_pd.leg2, right_pd.leg1, f, g)
    left_top = left_pd.leg2
    left_left = left_pd.leg1
    if broken:
        extra = ChainComplex.concentrated(1, 1)    # adds homology in degree 1
        apex = left_pd.complex.direct_sum(extra)
        left_top = extend_by_zero(left_pd.leg2, apex)
        left_left = extend_by_zero(left_pd.leg1, apex)
    left_sq = CommutingSquare(left_top, left_left, h, right_pd.leg1)
    outer_sq = CommutingSquare(right_pd.leg2.compose(left_top), left_left,
                               f.compose(h), g)
    return left_sq, right_sq, outer_sq


def extend_by_zero(cm, bigger_source):
    L = max(cm.source.length_bound, bigger_source.length_bound)
    comps = []
    for n in range(L + 1):
        old = cm.component(n)
        pad = bigger_source.dim(n) - old.cols
        comps.append(RationalMatrix.hstack([old, RationalMatrix.zero(old.rows, pad)]))
    return ChainMap(bigger_source, cm.target, comps)


def test_pasting_lemma_both_directions():
    rng = seeded_rng(71)
    for trial in range(6):
        broken = trial % 2 == 1
        left_sq, right_sq, outer_sq = make_pasting_triple(rng, broken=broken)
        assert compare_into_homotopy_pullback(right_sq)
        left_ok = compare_into_homotopy_pullback(left_sq)
        outer_ok = compare_into_homotopy_pullback(outer_sq)
        assert left_ok == outer_ok
        if broken:
            assert not left_ok
        else:
            assert left_ok


# --- witnessed comparisons -------------------------------------------------

def test_unwitnessable_defect_rejected():
    # All four corners Q concentrated in degree 1; top = right = bottom = id,
    # left = 0.  The defect right.top - bottom.left = id in degree 1 admits
    # no witness (s is forced zero), so the comparison must be rejected.
    c = ChainComplex.concentrated(1, 1)
    idm = ChainMap.identity(c)
    zm = ChainMap.zero_map(c, c)
    sq = CommutingSquare(idm, zm, idm, idm)
    with pytest.raises(SquareNotCommuting):
        comparison_into_homotopy_pullback(sq, witness=None)


def test_witnessed_comparison_with_genuine_witness():
    # Z = [Q --id--> Q] acyclic, cospan one, zero: Q[0] -> Z, apex Q[0]+Q[0]
    # with the two projections.  The square commutes only up to homotopy:
    # defect_0 (u, v) = -u, witnessed by s_0 (u, v) = -u into Z_1.
    z = ChainComplex((1, 1), (RationalMatrix.identity(1),))
    a = ChainComplex.concentrated(1, 0)
    one = ChainMap(a, z, [RationalMatrix.identity(1)])
    zero = ChainMap.zero_map(a, z)
    apex = a.direct_sum(a)
    left = ChainMap(apex, a, [RationalMatrix.from_rows([[1, 0]])])
    top = ChainMap(apex, a, [RationalMatrix.from_rows([[0, 1]])])
    sq = CommutingSquare(top, left, one, zero)
    wit = [RationalMatrix.from_rows([[-1, 0]])]
    hp, comp = comparison_into_homotopy_pullback(sq, witness=wit)
    assert is_quasi_iso(comp)
    with pytest.raises(SquareNotCommuting):
        comparison_into_homotopy_pullback(sq, witness=None)
