"""Lattice cohomology and the irrational-quotient dimension tables.

The quotient of the real line by a rank-r subgroup that is discrete in
the relevant sense (even when topologically dense, as for the span of 1
and an irrational slope) has constant-coefficient cohomology equal to
the group cohomology of the subgroup.  That identification is the one
mathematical statement this package adopts as input instead of
re-deriving it; everything in this module sits on top of it and is
checked mechanically:

* group cohomology of a rank-n lattice with trivial real coefficients,
  computed two independent ways: a Koszul resolution whose induced
  differentials are built over the group ring and then rank-reduced
  after evaluating the trivial action, and a truncated polynomial bar
  complex that knows nothing about the Koszul route;
* the fixed de Rham input table of the 1-dimensional quotient (every
  form on it is closed; the group dimensions are 1, 1, 0, ...), carried
  as tagged input data;
* a rank and dimension propagator for exact sequences of vector spaces
  which mechanizes the usual diagram-chase deductions and reports forced
  dimensions, honest intervals, or inconsistency, with no guessing;
* the assembled report: the connection-refined and flat-trivialization
  dimensions forced by the obstruction exact sequences, with a
  provenance tag on every entry.

The subgroup enters only through its rank; the irrational slope itself
never appears in any arithmetic.
"""

import itertools
import json
import random
from math import comb

from .qlinalg import ONE, RationalMatrix, rank, rat

__all__ = [
    "OracleRangeExceeded",
    "InconsistentSpec",
    "koszul_boundary",
    "koszul_group_cohomology",
    "bar_coboundary",
    "bar_cohomology",
    "derham_input_torus",
    "ExactSeqSpec",
    "SolveResult",
    "exact_solve",
    "solve_system",
    "exactseq_to_json",
    "exactseq_from_json",
    "load_exactseq",
    "save_exactseq",
    "torus_report",
]


class OracleRangeExceeded(Exception):
    """The bar-complex oracle was asked outside its supported range."""


class InconsistentSpec(Exception):
    """No dimension assignment satisfies the exactness constraints."""


# ---------------------------------------------------------------------------
# Koszul route


def _gr_generator(n, i):
    """The element t_i - 1 of the group ring of the rank-n lattice."""
    e = [0] * n
    e[i] = 1
    return {tuple(e): ONE, (0,) * n: -ONE}


def koszul_boundary(n, k):
    """Boundary matrix of the Koszul resolution, entries in the group ring.

    Rows are the (k-1)-subsets of the n generators, columns the
    k-subsets; the entry at (S minus {j}, S) is (-1)^pos (t_j - 1) with
    pos the index of j inside S.  Entries are dicts mapping exponent
    vectors to rationals; absent entries are zero.  Returns
    (row_subsets, col_subsets, entries).
    """
    if n < 0 or k < 1:
        raise ValueError("need a nonnegative rank and k >= 1")
    rows = list(itertools.combinations(range(n), k - 1))
    cols = list(itertools.combinations(range(n), k))
    row_index = {s: i for i, s in enumerate(rows)}
    entries = {}
    for c, subset in enumerate(cols):
        for pos, j in enumerate(subset):
            sub = subset[:pos] + subset[pos + 1:]
            g = _gr_generator(n, j)
            if pos % 2:
                g = {e: -v for e, v in g.items()}
            entries[(row_index[sub], c)] = g
    return rows, cols, entries


def _koszul_rank(n, k):
    """Rank of the induced differential out of cochain level k.

    The cochain differential into level k+1 is the transpose of the
    level-(k+1) Koszul boundary with each group-ring entry evaluated at
    the trivial character (every generator acts as the identity), so its
    rank equals the rank of the evaluated boundary.
    """
    if k < 0 or k + 1 > n:
        return 0
    rows, cols, entries = koszul_boundary(n, k + 1)
    if not rows or not cols:
        return 0
    data = {}
    for (i, j), g in entries.items():
        v = sum(g.values(), rat(0))
        if v:
            data[(i, j)] = v
    return rank(RationalMatrix(len(rows), len(cols), data))


def koszul_group_cohomology(n, k):
    """dim H^k of a rank-n lattice with trivial real coefficients.

    Built from the Koszul resolution: the boundary matrices over the
    group ring are constructed, the trivial action evaluates every
    generator difference to zero, and the dimension is read off by rank
    computation on the induced matrices.  Equals the binomial
    coefficient C(n, k).
    """
    if n < 0 or k < 0:
        raise ValueError("rank and degree must be nonnegative")
    return comb(n, k) - _koszul_rank(n, k) - _koszul_rank(n, k - 1)


# ---------------------------------------------------------------------------
# bar-complex oracle


def _monomials(nvars, bound):
    """Exponent tuples with total degree at most bound, sorted."""

    def gen(v, budget):
        if v == 0:
            yield ()
            return
        for e in range(budget + 1):
            for rest in gen(v - 1, budget - e):
                yield (e,) + rest

    return sorted(gen(nvars, bound))


def _power_of_sum(length, n, a, b, j, e):
    """(x_{a,j} + x_{b,j})^e expanded over exponent tuples of a target
    cochain with the given number of argument slots."""
    out = {}
    for s in range(e + 1):
        exps = [0] * (length * n)
        exps[a * n + j] = s
        exps[b * n + j] = e - s
        out[tuple(exps)] = rat(comb(e, s))
    return out


def _dict_mul(p, q):
    out = {}
    for ea, ca in p.items():
        for eb, cb in q.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            out[e] = out.get(e, rat(0)) + ca * cb
    return {e: c for e, c in out.items() if c}


def _substitute(mono, k, n, slot_map, target_slots):
    """Image of a level-k cochain monomial under a slot substitution.

    slot_map[i] is either ('r', a), renaming argument slot i to target
    slot a, or ('s', a, b), sending it to the sum of target slots a and
    b.  Substitution is linear in each group argument, so total degree
    is preserved exactly.
    """
    acc = {(0,) * (target_slots * n): ONE}
    for i in range(k):
        for j in range(n):
            e = mono[i * n + j]
            if e == 0:
                continue
            action = slot_map[i]
            if action[0] == "r":
                exps = [0] * (target_slots * n)
                exps[action[1] * n + j] = e
                factor = {tuple(exps): ONE}
            else:
                factor = _power_of_sum(target_slots, n, action[1],
                                       action[2], j, e)
            acc = _dict_mul(acc, factor)
    return acc


def bar_coboundary(n, k, bound):
    """Matrix of the bar differential from level k to level k+1 on
    polynomial cochains of total degree at most ``bound``.

    A level-k cochain is a polynomial in k blocks of n variables, one
    block per group argument.  The differential drops the first
    argument, merges each adjacent pair with an alternating sign, and
    drops the last argument with sign (-1)^(k+1); merging substitutes a
    sum of variables, which keeps the total degree, so the truncated
    spaces form an honest subcomplex.
    """
    dom = _monomials(k * n, bound)
    cod = _monomials((k + 1) * n, bound)
    cod_index = {m: i for i, m in enumerate(cod)}
    data = {}
    for col, mono in enumerate(dom):
        acc = {}
        for t in range(k + 2):
            if t == 0:
                smap = [("r", i + 1) for i in range(k)]
            elif t == k + 1:
                smap = [("r", i) for i in range(k)]
            else:
                smap = []
                for i in range(k):
                    if i < t - 1:
                        smap.append(("r", i))
                    elif i == t - 1:
                        smap.append(("s", t - 1, t))
                    else:
                        smap.append(("r", i + 1))
            sign = -ONE if t % 2 else ONE
            for e, c in _substitute(mono, k, n, smap, k + 1).items():
                acc[e] = acc.get(e, rat(0)) + sign * c
        for e, c in acc.items():
            if c:
                data[(cod_index[e], col)] = c
    return RationalMatrix(len(cod), len(dom), data)


def bar_cohomology(n, k, degree_truncation=2):
    """dim H^k of a rank-n lattice via the truncated bar complex.

    Independent of the Koszul route.  The bar differential preserves
    the polynomial degree of a cochain, so the truncation is a direct
    summand of the full polynomial complex and computes its cohomology
    in every polynomial degree up to the truncation; the classes of a
    rank-n lattice are multilinear, hence visible whenever the
    truncation reaches the cochain level.  Supported for k <= 2 and
    n <= 3 with degree_truncation >= k; anything else raises
    OracleRangeExceeded.
    """
    if not (0 <= k <= 2 and 0 <= n <= 3 and degree_truncation >= k):
        raise OracleRangeExceeded(
            "bar oracle supports k <= 2, n <= 3, degree_truncation >= k; "
            "got n=%r k=%r truncation=%r" % (n, k, degree_truncation))
    dim = comb(k * n + degree_truncation, degree_truncation)
    rank_out = rank(bar_coboundary(n, k, degree_truncation))
    rank_in = rank(bar_coboundary(n, k - 1, degree_truncation)) if k else 0
    return dim - rank_out - rank_in


# ---------------------------------------------------------------------------
# de Rham input data


def derham_input_torus(k_max=6):
    """The adopted de Rham table of the 1-dimensional lattice quotient.

    Every differential form on the quotient is closed, so closed forms,
    all forms, and de Rham cohomology coincide degreewise; the groups
    are one-dimensional in degrees 0 and 1 and vanish above.  These
    dimensions are input data, tagged as such, not recomputed here.
    """
    return [{"k": k, "dim": 1 if k <= 1 else 0, "provenance": "input"}
            for k in range(k_max + 1)]


# ---------------------------------------------------------------------------
# exact-sequence dimension solver


class ExactSeqSpec:
    """A finite sequence of vector spaces with exactness assertions.

    terms is a list of (name, dim) pairs, dim a natural number or None
    for unknown; names must be distinct within one spec, and the same
    name in different specs passed to solve_system denotes the same
    space.  exact_at lists the term positions where the image of the
    incoming map equals the kernel of the outgoing one; an assertion at
    the first or last position needs the corresponding left_zero or
    right_zero flag, which closes that end of the sequence with the
    zero space.  known_maps optionally pins the rank of the map from
    term i to term i+1 as (i, rank) pairs.
    """

    __slots__ = ("terms", "exact_at", "known_maps", "left_zero",
                 "right_zero")

    def __init__(self, terms, exact_at, known_maps=None, left_zero=False,
                 right_zero=False):
        cleaned = []
        for entry in terms:
            try:
                name, dim = entry
            except (TypeError, ValueError):
                raise ValueError("term entries must be (name, dim) pairs, "
                                 "got %r" % (entry,))
            name = str(name)
            if dim is not None and (not isinstance(dim, int)
                                    or isinstance(dim, bool) or dim < 0):
                raise ValueError("dimension of %r must be a natural number "
                                 "or None, got %r" % (name, dim))
            cleaned.append((name, dim))
        if not cleaned:
            raise ValueError("a sequence needs at least one term")
        names = [name for name, _ in cleaned]
        if len(set(names)) != len(names):
            raise ValueError("term names must be distinct within one "
                             "sequence")
        last = len(cleaned) - 1
        positions = []
        for p in exact_at:
            if not isinstance(p, int) or isinstance(p, bool):
                raise ValueError("exactness positions must be integers, "
                                 "got %r" % (p,))
            if not 0 <= p <= last:
                raise ValueError("exactness position %d out of range 0..%d"
                                 % (p, last))
            if p == 0 and not left_zero:
                raise ValueError("exactness at the first term needs "
                                 "left_zero")
            if p == last and not right_zero:
                raise ValueError("exactness at the last term needs "
                                 "right_zero")
            positions.append(p)
        pins = []
        for entry in (known_maps or []):
            try:
                i, r = entry
            except (TypeError, ValueError):
                raise ValueError("known_maps entries must be "
                                 "(map_index, rank) pairs, got %r" % (entry,))
            if not isinstance(i, int) or not 0 <= i <= last - 1:
                raise ValueError("map index %r out of range 0..%d"
                                 % (i, last - 1))
            if not isinstance(r, int) or isinstance(r, bool) or r < 0:
                raise ValueError("pinned rank for map %d must be a natural "
                                 "number, got %r" % (i, r))
            pins.append((i, r))
        self.terms = tuple(cleaned)
        self.exact_at = tuple(sorted(set(positions)))
        self.known_maps = tuple(sorted(set(pins)))
        self.left_zero = bool(left_zero)
        self.right_zero = bool(right_zero)

    def __eq__(self, other):
        if not isinstance(other, ExactSeqSpec):
            return NotImplemented
        return (self.terms == other.terms
                and self.exact_at == other.exact_at
                and self.known_maps == other.known_maps
                and self.left_zero == other.left_zero
                and self.right_zero == other.right_zero)

    def __hash__(self):
        return hash((self.terms, self.exact_at, self.known_maps,
                     self.left_zero, self.right_zero))

    def __repr__(self):
        return ("ExactSeqSpec(%r, exact_at=%r, known_maps=%r, "
                "left_zero=%r, right_zero=%r)"
                % (list(self.terms), list(self.exact_at),
                   list(self.known_maps), self.left_zero, self.right_zero))


def exactseq_to_json(spec):
    """A plain-dict description, the counterpart of the diagram format."""
    return {
        "terms": [[name, dim] for name, dim in spec.terms],
        "exact_at": list(spec.exact_at),
        "known_maps": [list(p) for p in spec.known_maps],
        "left_zero": spec.left_zero,
        "right_zero": spec.right_zero,
    }


def exactseq_from_json(obj):
    """Inverse of exactseq_to_json; raises ValueError on malformed input."""
    if not isinstance(obj, dict):
        raise ValueError("sequence description must be an object")
    if not isinstance(obj.get("terms"), list):
        raise ValueError("missing or malformed 'terms' list")
    terms = []
    for entry in obj["terms"]:
        if not (isinstance(entry, list) and len(entry) == 2):
            raise ValueError("term entries must be [name, dim] pairs, "
                             "got %r" % (entry,))
        terms.append((entry[0], entry[1]))
    exact_at = obj.get("exact_at", [])
    if not isinstance(exact_at, list):
        raise ValueError("'exact_at' must be a list of positions")
    known = obj.get("known_maps", [])
    if not isinstance(known, list):
        raise ValueError("'known_maps' must be a list of [index, rank] "
                         "pairs")
    return ExactSeqSpec(terms, exact_at, known_maps=[tuple(p) for p in known],
                        left_zero=bool(obj.get("left_zero", False)),
                        right_zero=bool(obj.get("right_zero", False)))


def load_exactseq(path):
    """Read a sequence description file; parse errors carry line numbers."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError("%s: line %d column %d: %s"
                         % (path, exc.lineno, exc.colno, exc.msg))
    return exactseq_from_json(obj)


def save_exactseq(spec, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(exactseq_to_json(spec), fh, indent=1, sort_keys=True)
        fh.write("\n")


class SolveResult:
    """Intervals for every term dimension and map rank after propagation.

    terms maps a name to (lo, hi) with hi None meaning unbounded; maps
    maps (sequence_index, map_index) to the same shape.  Results are
    only returned for consistent systems, so the flag is always True.
    """

    __slots__ = ("terms", "maps", "consistent")

    def __init__(self, terms, maps):
        self.terms = terms
        self.maps = maps
        self.consistent = True

    def interval(self, name):
        return self.terms[name]

    def value(self, name):
        lo, hi = self.terms[name]
        return lo if lo == hi else None

    def kind(self, name):
        lo, hi = self.terms[name]
        if lo == hi:
            return "forced"
        if lo == 0 and hi is None:
            return "unconstrained"
        return "interval"

    def map_rank(self, map_index, seq_index=0):
        lo, hi = self.maps[(seq_index, map_index)]
        return lo if lo == hi else None

    def __eq__(self, other):
        if not isinstance(other, SolveResult):
            return NotImplemented
        return self.terms == other.terms and self.maps == other.maps

    def __repr__(self):
        return "SolveResult(%r, %r)" % (self.terms, self.maps)


def _narrow(box, lo=None, hi=None):
    """Tighten an interval in place; reports whether anything changed."""
    changed = False
    if lo is not None and lo > box[0]:
        box[0] = lo
        changed = True
    if hi is not None and (box[1] is None or hi < box[1]):
        box[1] = hi
        changed = True
    return changed


def _check_box(box, describe):
    if box[1] is not None and box[0] > box[1]:
        raise InconsistentSpec("no consistent value for %s "
                               "(interval collapsed to [%d, %d])"
                               % (describe, box[0], box[1]))


def _apply_le(x, y):
    """x <= y on intervals."""
    changed = _narrow(x, hi=y[1]) if y[1] is not None else False
    changed = _narrow(y, lo=x[0]) or changed
    return changed


def _apply_sum(x, y, z):
    """x + y = z on intervals."""
    changed = _narrow(z, lo=x[0] + y[0])
    if x[1] is not None and y[1] is not None:
        changed = _narrow(z, hi=x[1] + y[1]) or changed
    for a, b in ((x, y), (y, x)):
        if b[1] is not None:
            changed = _narrow(a, lo=max(0, z[0] - b[1])) or changed
        if z[1] is not None:
            changed = _narrow(a, hi=max(0, z[1] - b[0])) or changed
    return changed


_SWEEP_CAP = 10000


def solve_system(specs, constraint_order=None):
    """Propagate rank and dimension constraints over several sequences.

    Terms with the same name across specs denote the same space.  The
    propagation is pure interval narrowing: lower bounds only rise and
    upper bounds only fall, so the fixpoint is the same for every
    processing order; constraint_order (None for declaration order, or
    an integer shuffle seed) exists to let tests pin that down.  Raises
    InconsistentSpec when some interval empties.
    """
    specs = list(specs)
    dims = {}
    dim_names = []
    for spec in specs:
        if not isinstance(spec, ExactSeqSpec):
            raise ValueError("solve_system expects ExactSeqSpec instances, "
                             "got %r" % (spec,))
        for name, dim in spec.terms:
            if name not in dims:
                dims[name] = [0, None]
                dim_names.append(name)
            if dim is not None:
                _narrow(dims[name], lo=dim, hi=dim)
                _check_box(dims[name], "term %r" % name)
    ranks = {}
    constraints = []
    zero_box = [0, 0]
    for si, spec in enumerate(specs):
        names = [name for name, _ in spec.terms]
        last = len(names) - 1
        for mi in range(last):
            box = ranks[(si, mi)] = [0, None]
            constraints.append(("le", box, dims[names[mi]],
                                "rank of map %d in sequence %d" % (mi, si)))
            constraints.append(("le", box, dims[names[mi + 1]],
                                "rank of map %d in sequence %d" % (mi, si)))
        for mi, r in spec.known_maps:
            _narrow(ranks[(si, mi)], lo=r, hi=r)
            _check_box(ranks[(si, mi)],
                       "pinned rank of map %d in sequence %d" % (mi, si))
        for p in spec.exact_at:
            incoming = ranks[(si, p - 1)] if p > 0 else zero_box
            outgoing = ranks[(si, p)] if p < last else zero_box
            constraints.append(("sum", incoming, outgoing, dims[names[p]],
                                "term %r" % names[p]))
    if constraint_order is not None:
        order = list(range(len(constraints)))
        random.Random(constraint_order).shuffle(order)
        constraints = [constraints[i] for i in order]
    for _ in range(_SWEEP_CAP):
        changed = False
        for con in constraints:
            if con[0] == "le":
                changed = _apply_le(con[1], con[2]) or changed
                _check_box(con[1], con[3])
                _check_box(con[2], con[3])
            else:
                changed = _apply_sum(con[1], con[2], con[3]) or changed
                for box in (con[1], con[2], con[3]):
                    _check_box(box, con[4])
        if not changed:
            break
    else:
        raise RuntimeError("constraint propagation failed to converge")
    terms = {name: tuple(dims[name]) for name in dim_names}
    maps = {key: tuple(box) for key, box in ranks.items()}
    return SolveResult(terms, maps)


def exact_solve(spec, constraint_order=None):
    """Propagate the constraints of a single sequence; see solve_system."""
    return solve_system([spec], constraint_order=constraint_order)


# ---------------------------------------------------------------------------
# the assembled quotient table


def _result_cell(res, name):
    lo, hi = res.interval(name)
    if lo == hi:
        return {"value": lo, "provenance": "forced"}
    return {"value": [lo, hi], "provenance": "interval"}


def _torus_system(group_rank, k_max):
    """The obstruction sequences of the quotient, as one shared system.

    For each degree k from 1 to k_max: the closed-forms sequence
    0 -> H^k_inf -> H^k_nabla -> H^{k+1}_dR -> H^{k+1}_inf (closed
    forms coincide with de Rham groups here, since every form on the
    quotient is closed), the four-term pair sequence
    H^k_inf -> H^k_conn -> H^{k+1}_dR -> H^{k+1}_inf exact at the two
    middle terms, and the flat-trivialization short exact sequence
    0 -> H^k_triv -> H^k_nabla -> H^k_conn -> 0.  Degree 1 adds the
    five-term refinement starting from 0 -> H^1_dR.
    """
    cech = {k: koszul_group_cohomology(group_rank, k)
            for k in range(k_max + 2)}
    dr = {row["k"]: row["dim"] for row in derham_input_torus(k_max + 1)}
    specs = []
    for k in range(1, k_max + 1):
        specs.append(ExactSeqSpec(
            [("H%d_inf" % k, cech[k]), ("H%d_nabla" % k, None),
             ("H%d_dR" % (k + 1), dr[k + 1]),
             ("H%d_inf" % (k + 1), cech[k + 1])],
            exact_at=[0, 1, 2], left_zero=True))
        specs.append(ExactSeqSpec(
            [("H%d_inf" % k, cech[k]), ("H%d_conn" % k, None),
             ("H%d_dR" % (k + 1), dr[k + 1]),
             ("H%d_inf" % (k + 1), cech[k + 1])],
            exact_at=[1, 2]))
        specs.append(ExactSeqSpec(
            [("H%d_triv" % k, None), ("H%d_nabla" % k, None),
             ("H%d_conn" % k, None)],
            exact_at=[0, 1, 2], left_zero=True, right_zero=True))
    specs.append(ExactSeqSpec(
        [("H1_dR", dr[1]), ("H1_inf", cech[1]), ("H1_conn", None),
         ("H2_dR", dr[2]), ("H2_inf", cech[2])],
        exact_at=[0, 1, 2, 3], left_zero=True))
    return specs, cech


def torus_report(group_rank=2, k_max=4, constraint_order=None):
    """The full dimension table of the 1-dimensional lattice quotient.

    Row k carries the discrete-coefficient group (computed by the
    Koszul route), the connection-refined group, and the realized-pair
    group; the last two are defined from degree 1 on and come from the
    solver, so each cell reports whether it is computed, input, forced,
    or an honest interval.  The default rank 2 models the classical
    irrational quotient; other ranks change only the lattice.
    """
    if group_rank < 0 or k_max < 1:
        raise ValueError("need a nonnegative rank and k_max >= 1")
    specs, cech = _torus_system(group_rank, k_max)
    res = solve_system(specs, constraint_order=constraint_order)
    rows = []
    for k in range(k_max + 1):
        row = {"k": k,
               "H_inf": {"value": cech[k], "provenance": "computed"}}
        if k == 0:
            row["H_nabla"] = None
            row["H_conn"] = None
        else:
            row["H_nabla"] = _result_cell(res, "H%d_nabla" % k)
            row["H_conn"] = _result_cell(res, "H%d_conn" % k)
        rows.append(row)
    flat_trivial = []
    for k in range(1, k_max + 1):
        cell = _result_cell(res, "H%d_triv" % k)
        cell["name"] = "H%d_triv" % k
        flat_trivial.append(cell)
    return {
        "group_rank": group_rank,
        "columns": ["k", "H_inf", "H_nabla", "H_conn"],
        "rows": rows,
        "flat_trivial": flat_trivial,
        "derham": derham_input_torus(k_max + 1),
        "notes": ("The discrete-coefficient column is the group "
                  "cohomology of the rank-%d subgroup; the identification "
                  "of quotient cohomology with subgroup cohomology is "
                  "adopted as input, and the subgroup enters only through "
                  "its rank." % group_rank),
    }
