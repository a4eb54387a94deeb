"""Polynomial forms: calculus oracles, budget discipline, homotopy identity."""

from fractions import Fraction
from itertools import combinations, product
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from cechdr.polyforms import (
    BudgetOverflow, PolyForm, PolyMap, FormSpace,
    exterior_d, wedge, pullback, poincare_h, d_matrix, h_matrix, eval_sheaf,
)
from cechdr.qlinalg import RationalMatrix, rank, kernel


def form(n, k, D, entries):
    """Build a form from (coeff, mono, subset) triples."""
    return PolyForm(n, k, D,
                    {(tuple(m), tuple(s)): Fraction(c) for c, m, s in entries})


def form_on(n, min_k=0, max_k=None, max_d=2):
    top = n if max_k is None else max_k

    @st.composite
    def build(draw):
        k = draw(st.integers(min_k, top))
        D = draw(st.integers(0, max_d))
        monos = [m for m in product(range(D + 1), repeat=n) if sum(m) <= D]
        subsets = list(combinations(range(1, n + 1), k))
        keys = [(m, s) for m in monos for s in subsets]
        coeffs = st.fractions(min_value=-3, max_value=3, max_denominator=4)
        chosen = draw(st.dictionaries(st.sampled_from(keys), coeffs,
                                      max_size=4))
        return PolyForm(n, k, D, chosen)

    return build()


def poly_map(m, n, max_deg=2):
    monos = [mo for mo in product(range(max_deg + 1), repeat=m)
             if sum(mo) <= max_deg]
    comp = st.dictionaries(st.sampled_from(monos),
                           st.fractions(min_value=-2, max_value=2,
                                        max_denominator=2),
                           max_size=3)
    return st.lists(comp, min_size=n, max_size=n).map(
        lambda comps: PolyMap(m, n, comps))


any_form = st.integers(1, 3).flatmap(form_on)

same_space_pair = st.integers(1, 3).flatmap(
    lambda n: st.tuples(form_on(n), form_on(n)))

map_and_form = st.tuples(st.integers(1, 2), st.integers(1, 2)).flatmap(
    lambda mn: st.tuples(poly_map(mn[0], mn[1]), form_on(mn[1])))


# --- construction -----------------------------------------------------------

def test_validation_rejects_bad_terms():
    with pytest.raises(ValueError):
        PolyForm(2, 1, 1, {((1,), (1,)): 1})
    with pytest.raises(ValueError):
        PolyForm(2, 1, 1, {((0, 0), (2, 1)): 1})
    with pytest.raises(ValueError):
        PolyForm(2, 1, 1, {((0, 0), (3,)): 1})
    with pytest.raises(ValueError):
        PolyForm(2, 2, 1, {((0, 0), (1,)): 1})
    with pytest.raises(BudgetOverflow):
        PolyForm(2, 0, 1, {((1, 1), ()): 1})


def test_zero_coefficients_dropped():
    f = PolyForm(2, 1, 1, {((0, 0), (1,)): 0, ((1, 0), (2,)): 2})
    assert len(f.terms) == 1
    assert f == form(2, 1, 1, [(2, (1, 0), (2,))])


def test_sorted_terms_canonical_order():
    f = form(2, 1, 1, [(1, (1, 0), (1,)), (1, (0, 0), (2,)),
                       (1, (0, 0), (1,))])
    keys = [key for key, _ in f.sorted_terms()]
    assert keys == [((0, 0), (1,)), ((0, 0), (2,)), ((1, 0), (1,))]


def test_equality_ignores_budget():
    assert PolyForm.dx(2, 1, 0) == PolyForm.dx(2, 1, 5)


# --- exterior derivative ----------------------------------------------------

def test_d_of_x_dy():
    f = form(2, 1, 1, [(1, (1, 0), (2,))])
    assert exterior_d(f) == form(2, 2, 1, [(1, (0, 0), (1, 2))])


def test_d_of_constant_is_zero():
    assert exterior_d(PolyForm.one(3, 2)).is_zero()


def test_d_squared_on_x2y():
    f = form(2, 0, 3, [(1, (2, 1), ())])
    df = exterior_d(f)
    assert df == form(2, 1, 3, [(2, (1, 1), (1,)), (1, (2, 0), (2,))])
    assert exterior_d(df).is_zero()


@settings(max_examples=60, deadline=None)
@given(any_form)
def test_d_squared_zero(f):
    assert exterior_d(exterior_d(f)).is_zero()


@settings(max_examples=40, deadline=None)
@given(any_form)
def test_d_keeps_budget(f):
    df = exterior_d(f)
    assert df.coeff_degree_bound == f.coeff_degree_bound
    assert df.max_coeff_degree() <= f.coeff_degree_bound


# --- wedge ------------------------------------------------------------------

def test_wedge_with_one():
    f = form(2, 1, 2, [(3, (1, 1), (2,))])
    assert wedge(f, PolyForm.one(2)) == f
    assert wedge(PolyForm.one(2), f) == f


def test_wedge_dx_dx_zero():
    dx = PolyForm.dx(2, 1)
    assert wedge(dx, dx).is_zero()


def test_wedge_anticommutes_on_one_forms():
    dx, dy = PolyForm.dx(2, 1), PolyForm.dx(2, 2)
    assert wedge(dx, dy) == form(2, 2, 0, [(1, (0, 0), (1, 2))])
    assert wedge(dx, dy) == -wedge(dy, dx)


@settings(max_examples=40, deadline=None)
@given(same_space_pair)
def test_wedge_graded_commutative(pair):
    f, g = pair
    sign = -1 if (f.form_degree * g.form_degree) % 2 else 1
    assert wedge(f, g) == wedge(g, f).scale(sign)


@settings(max_examples=40, deadline=None)
@given(same_space_pair)
def test_leibniz_rule(pair):
    f, g = pair
    lhs = exterior_d(wedge(f, g))
    sign = -1 if f.form_degree % 2 else 1
    rhs = wedge(exterior_d(f), g) + wedge(f, exterior_d(g)).scale(sign)
    assert lhs == rhs


def test_wedge_budget_overflow_and_cancellation():
    x = PolyForm.coordinate(2, 1)
    with pytest.raises(BudgetOverflow):
        wedge(x, x, out_budget=1)
    x_dx = form(2, 1, 1, [(1, (1, 0), (1,))])
    assert wedge(x_dx, x_dx, out_budget=0).is_zero()


# --- pullback ---------------------------------------------------------------

def test_pullback_along_identity():
    f = form(2, 1, 2, [(1, (2, 0), (1,)), (-3, (0, 1), (2,))])
    assert pullback(PolyMap.identity(2), f, 2) == f


def test_pullback_chain_rule_square():
    phi = PolyMap(1, 1, [{(2,): 1}])
    dt = PolyForm.dx(1, 1)
    assert pullback(phi, dt, 1) == form(1, 1, 1, [(2, (1,), (1,))])


def test_pullback_of_line_form_is_differential():
    g = PolyMap(2, 1, [{(1, 0): 1, (0, 1): 1}])
    mc = PolyForm.dx(1, 1)
    lhs = pullback(g, mc, 1)
    assert lhs == form(2, 1, 0, [(1, (0, 0), (1,)), (1, (0, 0), (2,))])
    g_as_form = form(2, 0, 1, [(1, (1, 0), ()), (1, (0, 1), ())])
    assert lhs == exterior_d(g_as_form)


@settings(max_examples=40, deadline=None)
@given(poly_map(2, 1), st.integers(0, 2))
def test_line_form_pullback_matches_differential(g, D):
    monos = list(g.components[0].keys())
    if any(sum(m) > D for m in monos):
        D = max(sum(m) for m in monos)
    g_as_form = PolyForm(2, 0, D, {(m, ()): c
                                   for m, c in g.components[0].items()})
    assert pullback(g, PolyForm.dx(1, 1), 50) == exterior_d(g_as_form)


@settings(max_examples=40, deadline=None)
@given(map_and_form)
def test_pullback_commutes_with_d(pair):
    phi, f = pair
    assert exterior_d(pullback(phi, f, 50)) == \
        pullback(phi, exterior_d(f), 50)


@settings(max_examples=25, deadline=None)
@given(st.tuples(st.integers(1, 2), st.integers(1, 2), st.integers(1, 2))
       .flatmap(lambda abn: st.tuples(poly_map(abn[0], abn[1]),
                                      poly_map(abn[1], abn[2]),
                                      form_on(abn[2], max_d=1))))
def test_pullback_functorial(triple):
    psi, phi, f = triple
    direct = pullback(phi.compose(psi), f, 80)
    staged = pullback(psi, pullback(phi, f, 80), 80)
    assert direct == staged


def test_pullback_budget_overflow_not_truncation():
    phi = PolyMap(1, 1, [{(2,): 1}])
    t_dt = form(1, 1, 1, [(1, (1,), (1,))])
    with pytest.raises(BudgetOverflow):
        pullback(phi, t_dt, 2)
    assert pullback(phi, t_dt, 3) == form(1, 1, 3, [(2, (3,), (1,))])


# --- Poincare homotopy operator ---------------------------------------------

def test_h_of_dx_on_line():
    assert poincare_h(PolyForm.dx(1, 1)) == \
        form(1, 0, 1, [(1, (1,), ())])


def test_h_of_zero():
    assert poincare_h(PolyForm.zero(2, 1, 3)).is_zero()


def test_h_worked_example_in_plane():
    f = form(2, 2, 1, [(1, (0, 1), (1, 2))])
    hf = poincare_h(f)
    assert hf == form(2, 1, 2, [(Fraction(1, 3), (1, 1), (2,)),
                                (Fraction(-1, 3), (0, 2), (1,))])
    assert exterior_d(hf) + poincare_h(exterior_d(f)) == f


def test_h_rejects_zero_forms():
    with pytest.raises(ValueError):
        poincare_h(PolyForm.one(2))


def test_h_budget_overflow():
    x_dx = form(1, 1, 1, [(1, (1,), (1,))])
    with pytest.raises(BudgetOverflow):
        poincare_h(x_dx, out_budget=1)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3).flatmap(lambda n: form_on(n, min_k=1)))
def test_poincare_identity(f):
    assert exterior_d(poincare_h(f)) + poincare_h(exterior_d(f)) == f


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 3).flatmap(lambda n: form_on(n, min_k=2)))
def test_h_squared_zero(f):
    assert poincare_h(poincare_h(f)).is_zero()


# --- budgeted form spaces ---------------------------------------------------

def test_dimension_formula_grid():
    for n in range(1, 4):
        for k in range(0, n + 1):
            for D in range(0, 4):
                assert FormSpace(n, k, D).dim == \
                    comb(n, k) * comb(n + D, D)


@settings(max_examples=40, deadline=None)
@given(any_form)
def test_vector_form_roundtrip(f):
    space = FormSpace(f.ambient_dim, f.form_degree, f.coeff_degree_bound)
    assert space.form(space.vector(f)) == f


def test_vector_rejects_over_budget():
    space = FormSpace(1, 0, 1)
    t2 = form(1, 0, 2, [(1, (2,), ())])
    with pytest.raises(BudgetOverflow):
        space.vector(t2)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 3).flatmap(lambda n: form_on(n, max_k=n - 1)
                                 if n > 1 else form_on(n, max_k=0)))
def test_d_matrix_matches_exterior_d(f):
    n, k, D = f.ambient_dim, f.form_degree, f.coeff_degree_bound
    mat = d_matrix(n, k, D)
    tgt = FormSpace(n, k + 1, D)
    assert tuple(mat.mv(FormSpace(n, k, D).vector(f))) == \
        tgt.vector(exterior_d(f))


def test_d_matrix_squares_to_zero():
    for n in range(1, 4):
        for k in range(0, n):
            for D in range(0, 3):
                assert (d_matrix(n, k + 1, D) * d_matrix(n, k, D)).is_zero()


def test_matrix_homotopy_identity():
    n, k, D = 2, 1, 2
    src = FormSpace(n, k, D)
    tgt = FormSpace(n, k, D + 1)
    incl = RationalMatrix(tgt.dim, src.dim,
                          {(tgt.index(*b), j): Fraction(1)
                           for j, b in enumerate(src.basis)})
    dh = d_matrix(n, k - 1, D + 1) * h_matrix(n, k, D)
    hd = h_matrix(n, k + 1, D) * d_matrix(n, k, D)
    assert dh + hd == incl


# --- sheaf evaluation -------------------------------------------------------

def test_sheaf_r_full():
    val = eval_sheaf("R", 2, 2)
    assert val.dim == comb(4, 2)
    assert val.dim == val.space.dim


def test_sheaf_rdelta_constants():
    for n in (1, 2, 3):
        for D in (0, 1, 3):
            assert eval_sheaf("Rdelta", n, D).dim == 1


def test_sheaf_omega_line():
    assert eval_sheaf("Omega 1", 1, 2).dim == 3
    assert eval_sheaf(("Omega", 1), 1, 2).dim == 3


def test_sheaf_omega_above_ambient_dim():
    assert eval_sheaf("Omega 3", 2, 2).dim == 0


def test_sheaf_omega_cl_plane_affine():
    # Closed affine 1-forms on the plane: the by-hand spanning set is
    # dx, dy, x dx, y dy, x dy + y dx, and nothing else survives d.
    val = eval_sheaf("OmegaCl 1", 2, 1)
    assert val.dim == 5
    witnesses = [
        form(2, 1, 1, [(1, (0, 0), (1,))]),
        form(2, 1, 1, [(1, (0, 0), (2,))]),
        form(2, 1, 1, [(1, (1, 0), (1,))]),
        form(2, 1, 1, [(1, (0, 1), (2,))]),
        form(2, 1, 1, [(1, (1, 0), (2,)), (1, (0, 1), (1,))]),
    ]
    for w in witnesses:
        assert exterior_d(w).is_zero()
        assert val.subspace.contains_vector(val.space.vector(w))
    non_witness = form(2, 1, 1, [(1, (0, 1), (1,))])
    assert not exterior_d(non_witness).is_zero()
    assert not val.subspace.contains_vector(val.space.vector(non_witness))


def test_sheaf_omega_cl_top_degree_is_everything():
    assert eval_sheaf("OmegaCl 2", 2, 3).dim == eval_sheaf("Omega 2", 2, 3).dim


def test_sheaf_unknown_name():
    with pytest.raises(ValueError):
        eval_sheaf("Nabla", 2, 1)
    with pytest.raises(ValueError):
        eval_sheaf("Omega", 2, 1)


# --- algebraic exactness in the budget window -------------------------------

def test_exactness_window():
    for n in range(1, 4):
        for k in range(1, n + 1):
            for D in range(0, 3):
                closed = kernel(d_matrix(n, k, D)).dim
                exact = rank(d_matrix(n, k - 1, D + 1))
                assert closed == exact


# --- polynomial maps --------------------------------------------------------

def test_identity_and_compose():
    phi = PolyMap(1, 1, [{(2,): 1}])
    shift = PolyMap(1, 1, [{(1,): 1, (0,): 1}])
    assert phi.compose(PolyMap.identity(1)) == phi
    assert PolyMap.identity(1).compose(phi) == phi
    composed = phi.compose(shift)
    assert composed == PolyMap(1, 1, [{(2,): 1, (1,): 2, (0,): 1}])


def test_map_degree_recorded():
    assert PolyMap.identity(3).degree == 1
    assert PolyMap(1, 1, [{(2,): 1}]).degree == 2
    assert PolyMap(1, 1, [{(0,): 5}]).degree == 0
    assert PolyMap(2, 1, [{}]).degree == 0


@settings(max_examples=20, deadline=None)
@given(poly_map(2, 2, max_deg=1), poly_map(2, 2, max_deg=1),
       poly_map(2, 2, max_deg=1))
def test_compose_associative(a, b, c):
    assert a.compose(b).compose(c) == a.compose(b.compose(c))
