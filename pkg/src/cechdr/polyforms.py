"""Differential forms with rational polynomial coefficients.

Forms on a coordinate space live in a budgeted space: every monomial's
total degree stays at or below a recorded bound D.  The exterior
derivative lowers coefficient degrees and so keeps any budget; pullback
and the radial homotopy operator raise them, so both demand an output
budget and fail loudly on overflow rather than truncating.  Silent
truncation would manufacture exactness where there is none, and the
whole point of the budget is that exactness findings stay honest.

Coefficients are exact rationals throughout.  The budgeted space of
k-forms with an explicit monomial-times-covector basis is what the stack
and diagram layers slice into subspaces.
"""

from __future__ import annotations

from itertools import combinations, product
from math import comb

from .qlinalg import (
    RAT, ZERO, ONE, RationalMatrix, LinearSubspace, kernel,
)


class BudgetOverflow(Exception):
    """A result needs higher coefficient degrees than the output budget."""


# --- polynomial helpers (dict of exponent tuples -> rational) ---------------

def _poly_add_into(acc, other, factor=ONE):
    for mono, c in other.items():
        v = acc.get(mono, ZERO) + c * factor
        if v:
            acc[mono] = v
        elif mono in acc:
            del acc[mono]


def _poly_mul(a, b):
    out = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            mono = tuple(x + y for x, y in zip(ma, mb))
            v = out.get(mono, ZERO) + ca * cb
            if v:
                out[mono] = v
            elif mono in out:
                del out[mono]
    return out


def _poly_pow(a, e, nvars):
    out = {(0,) * nvars: ONE}
    for _ in range(e):
        out = _poly_mul(out, a)
    return out


def _poly_partial(a, i):
    """Partial derivative with respect to variable i (0-based)."""
    out = {}
    for mono, c in a.items():
        e = mono[i]
        if e:
            lowered = mono[:i] + (e - 1,) + mono[i + 1:]
            v = out.get(lowered, ZERO) + c * e
            if v:
                out[lowered] = v
            elif lowered in out:
                del out[lowered]
    return out


def _poly_degree(a):
    return max((sum(m) for m in a.keys()), default=0)


def _merge_subsets(a, b):
    """Concatenate two strictly increasing index tuples.

    Returns (sign, merged) or None when they intersect.
    """
    if set(a) & set(b):
        return None
    sign = 1
    for x in a:
        for y in b:
            if x > y:
                sign = -sign
    merged = tuple(sorted(a + b))
    return sign, merged


def _wedge_terms(a_terms, b_terms):
    out = {}
    for (ma, sa), ca in a_terms.items():
        for (mb, sb), cb in b_terms.items():
            merged = _merge_subsets(sa, sb)
            if merged is None:
                continue
            sign, subset = merged
            mono = tuple(x + y for x, y in zip(ma, mb))
            key = (mono, subset)
            v = out.get(key, ZERO) + ca * cb * sign
            if v:
                out[key] = v
            elif key in out:
                del out[key]
    return out


def _max_term_degree(terms):
    return max((sum(mono) for mono, _ in terms.keys()), default=0)


# --- forms ------------------------------------------------------------------

class PolyForm:
    """A k-form on a coordinate space with budgeted polynomial coefficients.

    Terms map (exponent tuple, strictly increasing covector index subset)
    to a rational coefficient; indices are 1-based.  Equality compares
    ambient, degree and terms; the budget is bookkeeping, not identity.
    """

    __slots__ = ("ambient_dim", "form_degree", "coeff_degree_bound", "_terms")

    def __init__(self, ambient_dim, form_degree, coeff_degree_bound, terms):
        if ambient_dim < 0 or form_degree < 0 or coeff_degree_bound < 0:
            raise ValueError("dimensions and budget must be nonnegative")
        self.ambient_dim = ambient_dim
        self.form_degree = form_degree
        self.coeff_degree_bound = coeff_degree_bound
        clean = {}
        for (mono, subset), coeff in terms.items():
            mono = tuple(int(e) for e in mono)
            subset = tuple(int(i) for i in subset)
            if len(mono) != ambient_dim or any(e < 0 for e in mono):
                raise ValueError("bad exponent tuple %r" % (mono,))
            if sum(mono) > coeff_degree_bound:
                raise BudgetOverflow(
                    "monomial degree %d exceeds budget %d"
                    % (sum(mono), coeff_degree_bound))
            if len(subset) != form_degree or \
                    any(not 1 <= i <= ambient_dim for i in subset) or \
                    any(subset[t] >= subset[t + 1] for t in range(len(subset) - 1)):
                raise ValueError("bad covector subset %r" % (subset,))
            c = RAT(coeff)
            if c:
                clean[(mono, subset)] = c
        self._terms = clean

    # construction helpers

    @classmethod
    def zero(cls, ambient_dim, form_degree, coeff_degree_bound=0):
        return cls(ambient_dim, form_degree, coeff_degree_bound, {})

    @classmethod
    def one(cls, ambient_dim, coeff_degree_bound=0):
        return cls(ambient_dim, 0, coeff_degree_bound,
                   {((0,) * ambient_dim, ()): ONE})

    @classmethod
    def coordinate(cls, ambient_dim, i, coeff_degree_bound=1):
        """The 0-form given by the i-th coordinate (1-based)."""
        mono = tuple(1 if t == i - 1 else 0 for t in range(ambient_dim))
        return cls(ambient_dim, 0, coeff_degree_bound, {(mono, ()): ONE})

    @classmethod
    def dx(cls, ambient_dim, i, coeff_degree_bound=0):
        """The constant 1-form dx_i (1-based)."""
        return cls(ambient_dim, 1, coeff_degree_bound,
                   {((0,) * ambient_dim, (i,)): ONE})

    # views

    @property
    def terms(self):
        return dict(self._terms)

    def sorted_terms(self):
        return sorted(self._terms.items(), key=lambda kv: kv[0])

    def max_coeff_degree(self):
        return _max_term_degree(self._terms)

    def is_zero(self):
        return not self._terms

    def with_budget(self, coeff_degree_bound):
        return PolyForm(self.ambient_dim, self.form_degree,
                        coeff_degree_bound, self._terms)

    # algebra

    def _require_like(self, other):
        if not isinstance(other, PolyForm):
            raise TypeError("expected a PolyForm")
        if (self.ambient_dim, self.form_degree) != \
                (other.ambient_dim, other.form_degree):
            raise ValueError("ambient dimension and form degree must match")

    def __add__(self, other):
        self._require_like(other)
        acc = dict(self._terms)
        for key, c in other._terms.items():
            v = acc.get(key, ZERO) + c
            if v:
                acc[key] = v
            elif key in acc:
                del acc[key]
        return PolyForm(self.ambient_dim, self.form_degree,
                        max(self.coeff_degree_bound, other.coeff_degree_bound),
                        acc)

    def __neg__(self):
        return self.scale(-ONE)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = RAT(c)
        return PolyForm(self.ambient_dim, self.form_degree,
                        self.coeff_degree_bound,
                        {k: v * c for k, v in self._terms.items()})

    def __eq__(self, other):
        if not isinstance(other, PolyForm):
            return NotImplemented
        return (self.ambient_dim, self.form_degree) == \
            (other.ambient_dim, other.form_degree) and \
            self._terms == other._terms

    def __hash__(self):
        return hash((self.ambient_dim, self.form_degree,
                     tuple(self.sorted_terms())))

    def __repr__(self):
        if not self._terms:
            return "PolyForm(0; n=%d, k=%d)" % (self.ambient_dim,
                                                self.form_degree)
        bits = []
        for (mono, subset), c in self.sorted_terms():
            factors = [str(c)]
            factors += ["x%d^%d" % (i + 1, e) if e > 1 else "x%d" % (i + 1)
                        for i, e in enumerate(mono) if e]
            covs = "^".join("dx%d" % i for i in subset)
            bits.append("*".join(factors) + (" " + covs if covs else ""))
        return "PolyForm(%s; n=%d, k=%d, D=%d)" % (
            " + ".join(bits), self.ambient_dim, self.form_degree,
            self.coeff_degree_bound)


# --- polynomial maps --------------------------------------------------------

class PolyMap:
    """A polynomial map between coordinate spaces, one polynomial per output.

    components[j] is a dict from exponent tuples (length source_dim) to
    rational coefficients, describing the j-th output coordinate.
    """

    __slots__ = ("source_dim", "target_dim", "components")

    def __init__(self, source_dim, target_dim, components):
        if len(components) != target_dim:
            raise ValueError("need one component per target coordinate")
        comps = []
        for comp in components:
            clean = {}
            for mono, c in comp.items():
                mono = tuple(int(e) for e in mono)
                if len(mono) != source_dim or any(e < 0 for e in mono):
                    raise ValueError("bad exponent tuple %r" % (mono,))
                v = RAT(c)
                if v:
                    clean[mono] = v
            comps.append(clean)
        self.source_dim = source_dim
        self.target_dim = target_dim
        self.components = tuple(comps)

    @classmethod
    def identity(cls, n):
        comps = []
        for j in range(n):
            mono = tuple(1 if t == j else 0 for t in range(n))
            comps.append({mono: ONE})
        return cls(n, n, comps)

    @property
    def degree(self):
        return max((_poly_degree(c) for c in self.components), default=0)

    def compose(self, other):
        """self after other."""
        if self.source_dim != other.target_dim:
            raise ValueError("composition dimension mismatch")
        comps = []
        for comp in self.components:
            acc = {}
            for mono, c in comp.items():
                piece = {(0,) * other.source_dim: c}
                for j, e in enumerate(mono):
                    if e:
                        piece = _poly_mul(
                            piece,
                            _poly_pow(other.components[j], e,
                                      other.source_dim))
                _poly_add_into(acc, piece)
            comps.append(acc)
        return PolyMap(other.source_dim, self.target_dim, comps)

    def __eq__(self, other):
        if not isinstance(other, PolyMap):
            return NotImplemented
        return (self.source_dim, self.target_dim, self.components) == \
            (other.source_dim, other.target_dim, other.components)

    def __hash__(self):
        return hash((self.source_dim, self.target_dim,
                     tuple(tuple(sorted(c.items())) for c in self.components)))

    def __repr__(self):
        return "PolyMap(%d -> %d, degree %d)" % (
            self.source_dim, self.target_dim, self.degree)


# --- calculus ---------------------------------------------------------------

def exterior_d(f):
    """Exterior derivative; lowers coefficient degrees, keeps the budget."""
    n = f.ambient_dim
    acc = {}
    for (mono, subset), c in f._terms.items():
        for i in range(1, n + 1):
            e = mono[i - 1]
            if not e or i in subset:
                continue
            lowered = mono[:i - 1] + (e - 1,) + mono[i:]
            pos = sum(1 for j in subset if j < i)
            sign = -1 if pos % 2 else 1
            key = (lowered, tuple(sorted(subset + (i,))))
            v = acc.get(key, ZERO) + c * e * sign
            if v:
                acc[key] = v
            elif key in acc:
                del acc[key]
    return PolyForm(n, f.form_degree + 1, f.coeff_degree_bound, acc)


def wedge(f, g, out_budget=None):
    """Graded product; the default output budget is the sum of budgets."""
    if f.ambient_dim != g.ambient_dim:
        raise ValueError("wedge needs a common ambient space")
    if out_budget is None:
        out_budget = f.coeff_degree_bound + g.coeff_degree_bound
    terms = _wedge_terms(f._terms, g._terms)
    if _max_term_degree(terms) > out_budget:
        raise BudgetOverflow(
            "wedge needs coefficient degree %d, budget is %d"
            % (_max_term_degree(terms), out_budget))
    return PolyForm(f.ambient_dim, f.form_degree + g.form_degree,
                    out_budget, terms)


def pullback(phi, f, out_budget):
    """Substitute a polynomial map into a form, including covector Jacobians.

    The output budget is mandatory because substitution can raise
    coefficient degrees by a factor of the map's degree; the final result
    is computed exactly and rejected if it does not fit.
    """
    if phi.target_dim != f.ambient_dim:
        raise ValueError("form lives on the map's target space")
    m = phi.source_dim
    one_forms = None
    acc = {}
    for (mono, subset), c in f._terms.items():
        coeff = {(0,) * m: c}
        for j, e in enumerate(mono):
            if e:
                coeff = _poly_mul(coeff, _poly_pow(phi.components[j], e, m))
        piece = {(mk, ()): cv for mk, cv in coeff.items()}
        for j in subset:
            if one_forms is None:
                one_forms = {}
            if j not in one_forms:
                dphi = {}
                for i in range(1, m + 1):
                    part = _poly_partial(phi.components[j - 1], i - 1)
                    for mk, cv in part.items():
                        dphi[(mk, (i,))] = cv
                one_forms[j] = dphi
            piece = _wedge_terms(piece, one_forms[j])
        for key, v in piece.items():
            w = acc.get(key, ZERO) + v
            if w:
                acc[key] = w
            elif key in acc:
                del acc[key]
    if _max_term_degree(acc) > out_budget:
        raise BudgetOverflow(
            "pullback needs coefficient degree %d, budget is %d"
            % (_max_term_degree(acc), out_budget))
    return PolyForm(m, f.form_degree, out_budget, acc)


def poincare_h(f, out_budget=None):
    """Radial homotopy operator: d h + h d = id on positive form degrees.

    Each monomial term gains one coefficient degree, so the default output
    budget is one more than the input's.
    """
    k = f.form_degree
    if k < 1:
        raise ValueError("the homotopy operator needs form degree >= 1")
    if out_budget is None:
        out_budget = f.coeff_degree_bound + 1
    n = f.ambient_dim
    acc = {}
    for (mono, subset), c in f._terms.items():
        denom = sum(mono) + k
        for pos, j in enumerate(subset):
            sign = -1 if pos % 2 else 1
            raised = mono[:j - 1] + (mono[j - 1] + 1,) + mono[j:]
            key = (raised, subset[:pos] + subset[pos + 1:])
            v = acc.get(key, ZERO) + c * RAT(sign, denom)
            if v:
                acc[key] = v
            elif key in acc:
                del acc[key]
    if _max_term_degree(acc) > out_budget:
        raise BudgetOverflow(
            "homotopy operator needs coefficient degree %d, budget is %d"
            % (_max_term_degree(acc), out_budget))
    return PolyForm(n, k - 1, out_budget, acc)


# --- budgeted form spaces ---------------------------------------------------

def _monomials(n, D):
    return sorted(m for m in product(range(D + 1), repeat=n) if sum(m) <= D)


class FormSpace:
    """The budgeted space of k-forms with its canonical finite basis."""

    __slots__ = ("ambient_dim", "form_degree", "coeff_degree_bound",
                 "basis", "_index")

    def __init__(self, ambient_dim, form_degree, coeff_degree_bound):
        self.ambient_dim = ambient_dim
        self.form_degree = form_degree
        self.coeff_degree_bound = coeff_degree_bound
        monos = _monomials(ambient_dim, coeff_degree_bound)
        subsets = list(combinations(range(1, ambient_dim + 1), form_degree))
        self.basis = sorted((m, s) for m in monos for s in subsets)
        self._index = {key: t for t, key in enumerate(self.basis)}
        expected = comb(ambient_dim, form_degree) * \
            comb(ambient_dim + coeff_degree_bound, coeff_degree_bound)
        if len(self.basis) != expected:
            raise AssertionError("basis size %d does not match %d"
                                 % (len(self.basis), expected))

    @property
    def dim(self):
        return len(self.basis)

    def index(self, mono, subset):
        return self._index[(tuple(mono), tuple(subset))]

    def vector(self, f):
        if (f.ambient_dim, f.form_degree) != \
                (self.ambient_dim, self.form_degree):
            raise ValueError("form does not live in this space")
        if f.max_coeff_degree() > self.coeff_degree_bound:
            raise BudgetOverflow(
                "form has coefficient degree %d, space budget is %d"
                % (f.max_coeff_degree(), self.coeff_degree_bound))
        vec = [ZERO] * self.dim
        for key, c in f._terms.items():
            vec[self._index[key]] = c
        return tuple(vec)

    def form(self, vec):
        if len(vec) != self.dim:
            raise ValueError("coordinate vector has the wrong length")
        terms = {key: c for key, c in zip(self.basis, vec) if c}
        return PolyForm(self.ambient_dim, self.form_degree,
                        self.coeff_degree_bound, terms)

    def __repr__(self):
        return "FormSpace(n=%d, k=%d, D=%d, dim=%d)" % (
            self.ambient_dim, self.form_degree, self.coeff_degree_bound,
            self.dim)


def d_matrix(n, k, D):
    """Matrix of the exterior derivative on the budget-D spaces."""
    src = FormSpace(n, k, D)
    tgt = FormSpace(n, k + 1, D)
    cols = [tgt.vector(exterior_d(src.form(tuple(
        ONE if t == j else ZERO for t in range(src.dim)))))
        for j in range(src.dim)]
    return RationalMatrix.from_cols(cols, rows=tgt.dim)


def h_matrix(n, k, D):
    """Matrix of the radial homotopy operator, landing in budget D + 1."""
    if k < 1:
        raise ValueError("the homotopy operator needs form degree >= 1")
    src = FormSpace(n, k, D)
    tgt = FormSpace(n, k - 1, D + 1)
    cols = [tgt.vector(poincare_h(src.form(tuple(
        ONE if t == j else ZERO for t in range(src.dim)))))
        for j in range(src.dim)]
    return RationalMatrix.from_cols(cols, rows=tgt.dim)


# --- sheaf evaluation -------------------------------------------------------

class SheafValue:
    """A budgeted form space together with the subspace the sheaf selects."""

    __slots__ = ("space", "subspace")

    def __init__(self, space, subspace):
        self.space = space
        self.subspace = subspace

    @property
    def dim(self):
        return self.subspace.dim

    def __repr__(self):
        return "SheafValue(%r, dim=%d)" % (self.space, self.dim)


def _parse_sheaf_name(name):
    if isinstance(name, (tuple, list)):
        kind = name[0]
        k = int(name[1]) if len(name) > 1 else None
    else:
        parts = str(name).split()
        kind = parts[0]
        k = int(parts[1]) if len(parts) > 1 else None
    return kind, k


def eval_sheaf(name, n, D):
    """Evaluate one of the basic sheaves on a coordinate space.

    R is all budgeted functions; Rdelta is the constants (coordinate
    spaces are connected, so discreteness collapses to constancy);
    Omega k is all budgeted k-forms; OmegaCl k is the kernel of the
    exterior derivative on them.
    """
    kind, k = _parse_sheaf_name(name)
    if kind == "R":
        space = FormSpace(n, 0, D)
        return SheafValue(space, LinearSubspace.full(space.dim))
    if kind == "Rdelta":
        space = FormSpace(n, 0, D)
        const = [ZERO] * space.dim
        const[space.index((0,) * n, ())] = ONE
        return SheafValue(space,
                          LinearSubspace.from_spanning(space.dim, [tuple(const)]))
    if kind == "Omega":
        if k is None:
            raise ValueError("Omega needs a form degree")
        space = FormSpace(n, k, D)
        return SheafValue(space, LinearSubspace.full(space.dim))
    if kind == "OmegaCl":
        if k is None:
            raise ValueError("OmegaCl needs a form degree")
        space = FormSpace(n, k, D)
        return SheafValue(space, kernel(d_matrix(n, k, D)))
    raise ValueError("unknown sheaf %r" % (name,))
