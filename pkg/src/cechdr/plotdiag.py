"""Finite plot diagrams: good covers, nerves, cocycle checks, obstruction maps.

A plot diagram is a finite category of coordinate charts and polynomial
maps.  Evaluating a coefficient stack on its nerve produces a cosimplicial
chain complex whose totalization computes Cech-style cohomology; on top of
that live the classical checkers (cocycles, connections, gerbes) and the
class maps of the curvature exact sequence.

Conventions, fixed once and used everywhere:

* An n-chain is a tuple ``(f_0, ..., f_{n-1})`` of composable non-identity
  morphisms with ``src(f_i) == tgt(f_{i+1})``; its sections live on the
  source of the whole chain, ``src(f_{n-1})``.
* Faces: ``face_0`` drops ``f_{n-1}``, inner ``face_i`` composes the pair
  at positions ``(n-i-1, n-i)``, ``face_n`` drops ``f_0``.  On a 1-chain,
  ``face_0`` is the target object and ``face_1`` the source object.
* The Cech differential is the alternating coface sum; only coface 0
  restricts along a map (a pullback), every other coface reindexes.  On
  1-cochains this reads ``(delta w)_{(f0,f1)} = f1^* w_{f0} - w_{f0 f1}
  + w_{f1}``, and on 0-cochains ``(delta h)_{(f,)} = f^* h_{tgt} -
  h_{src}``.
"""

import itertools
import json

from .qlinalg import (ONE, RAT, ZERO, LinearSubspace, QuotientSpace,
                      RationalMatrix, image, kernel, matrix_in_bases, rank,
                      rat)
from .chaincx import ChainComplex, ChainMap
from .polyforms import (BudgetOverflow, FormSpace, PolyForm, PolyMap,
                        d_matrix, exterior_d, poincare_h, pullback)
from .stacks import build_stack
from .totalize import CosimplicialChain, to_double_complex, tot, tot_cohomology


class ChainBoundExceeded(Exception):
    """The diagram cannot certify a finite nerve in the requested range."""


class NotFlat(Exception):
    """A class map required a flat gerbe (vanishing curvature)."""


class NotGlobal(Exception):
    """A form datum does not agree across the diagram's maps."""


class NotClosed(Exception):
    """A form datum is not closed."""


PRESET_NAMES = ("circle_3arc", "interval_2chart", "torus_9patch")


# ---------------------------------------------------------------------------
# the diagram category


class PlotObject:
    """A chart: an identifier plus its ambient coordinate dimension."""

    __slots__ = ("id", "dim")

    def __init__(self, id, dim):
        self.id = str(id)
        self.dim = int(dim)
        if self.dim < 0:
            raise ValueError("object dimension must be nonnegative")

    def __eq__(self, other):
        if not isinstance(other, PlotObject):
            return NotImplemented
        return (self.id, self.dim) == (other.id, other.dim)

    def __hash__(self):
        return hash((self.id, self.dim))

    def __repr__(self):
        return "PlotObject(%r, dim=%d)" % (self.id, self.dim)


class PlotMorphism:
    """A labelled arrow: a polynomial chart map from src into tgt."""

    __slots__ = ("id", "src", "tgt", "poly")

    def __init__(self, id, src, tgt, poly):
        self.id = str(id)
        self.src = str(src)
        self.tgt = str(tgt)
        if not isinstance(poly, PolyMap):
            raise TypeError("morphism label must be a PolyMap")
        self.poly = poly

    def __eq__(self, other):
        if not isinstance(other, PlotMorphism):
            return NotImplemented
        return (self.id, self.src, self.tgt, self.poly) == \
            (other.id, other.src, other.tgt, other.poly)

    def __hash__(self):
        return hash((self.id, self.src, self.tgt, self.poly))

    def __repr__(self):
        return "PlotMorphism(%r: %s -> %s)" % (self.id, self.src, self.tgt)


class PlotDiagram:
    """A finite category of charts with polynomial maps.

    Identities may be omitted from ``morphisms``; missing ones are created
    as ``id:<object>`` with the identity polynomial label.  The composition
    table covers pairs of non-identity morphisms (f after g, keyed
    ``(f.id, g.id)``); composites with identities are implicit.

    Nerve finiteness is certified either by acyclicity (the non-identity
    arrows form no directed cycle, so chains are bounded by the longest
    path) or by an explicit ``n_max``.
    """

    __slots__ = ("objects", "morphisms", "composition", "identities",
                 "n_max", "height", "_obj", "_mor", "_memo")

    def __init__(self, objects, morphisms, composition=None, identities=None,
                 n_max=None):
        self.objects = tuple(objects)
        self._obj = {}
        for o in self.objects:
            if o.id in self._obj:
                raise ValueError("duplicate object id %r" % o.id)
            self._obj[o.id] = o
        mors = list(morphisms)
        self._mor = {}
        for m in mors:
            if m.id in self._mor:
                raise ValueError("duplicate morphism id %r" % m.id)
            self._mor[m.id] = m
        idmap = dict(identities) if identities else {}
        for o in self.objects:
            if o.id not in idmap:
                mid = "id:%s" % o.id
                if mid not in self._mor:
                    m = PlotMorphism(mid, o.id, o.id, PolyMap.identity(o.dim))
                    mors.append(m)
                    self._mor[mid] = m
                idmap[o.id] = mid
        self.morphisms = tuple(mors)
        self.identities = dict(idmap)
        self.composition = dict(composition) if composition else {}
        self.n_max = None if n_max is None else int(n_max)
        self.height = self._longest_path()
        self._memo = {}

    # -- basic lookups

    def object(self, oid):
        return self._obj[oid]

    def morphism(self, mid):
        return self._mor[mid]

    def obj_dim(self, oid):
        return self._obj[oid].dim

    def is_identity(self, mid):
        m = self._mor[mid]
        return self.identities.get(m.src) == mid

    def nonidentity_morphisms(self):
        return tuple(m for m in self.morphisms if not self.is_identity(m.id))

    def compose(self, fid, gid):
        """The composite f after g; requires src(f) == tgt(g)."""
        f, g = self._mor[fid], self._mor[gid]
        if f.src != g.tgt:
            raise ValueError("maps %r and %r do not compose" % (fid, gid))
        if self.is_identity(fid):
            return gid
        if self.is_identity(gid):
            return fid
        try:
            return self.composition[(fid, gid)]
        except KeyError:
            raise ValueError("missing composite for (%r, %r)" % (fid, gid))

    def _longest_path(self):
        """Longest non-identity path length, or None on a directed cycle."""
        out = {o.id: [] for o in self.objects}
        for m in self.morphisms:
            if not self.is_identity(m.id) and m.src in out and m.tgt in out:
                out[m.src].append(m.tgt)
        depth = {}
        state = {}

        def visit(v):
            if state.get(v) == 1:
                return None
            if v in depth:
                return depth[v]
            state[v] = 1
            best = 0
            for w in out[v]:
                sub = visit(w)
                if sub is None:
                    return None
                best = max(best, 1 + sub)
            state[v] = 2
            depth[v] = best
            return best

        top = 0
        for o in self.objects:
            sub = visit(o.id)
            if sub is None:
                return None
            top = max(top, sub)
        return top

    def chain_bound(self):
        """An n beyond which nondegenerate chains vanish, or None."""
        if self.height is not None:
            return self.height
        return self.n_max

    def __eq__(self, other):
        if not isinstance(other, PlotDiagram):
            return NotImplemented
        return (self.objects == other.objects
                and self.morphisms == other.morphisms
                and self.composition == other.composition
                and self.identities == other.identities
                and self.n_max == other.n_max)

    def __repr__(self):
        return "PlotDiagram(%d objects, %d morphisms)" % (
            len(self.objects), len(self.morphisms))


def validate_diagram(d):
    """Category, label and finiteness checks; empty list means valid."""
    bad = []
    for m in d.morphisms:
        if m.src not in d._obj or m.tgt not in d._obj:
            bad.append("morphism %r has an unknown endpoint" % m.id)
            continue
        if m.poly.source_dim != d.obj_dim(m.src) or \
                m.poly.target_dim != d.obj_dim(m.tgt):
            bad.append("morphism %r label has the wrong dimensions" % m.id)
    for oid, mid in d.identities.items():
        m = d._mor.get(mid)
        if m is None or m.src != oid or m.tgt != oid:
            bad.append("identity of %r is not an endomorphism" % oid)
        elif m.poly != PolyMap.identity(d.obj_dim(oid)):
            bad.append("identity of %r has a non-identity label" % oid)
    nonid = [m for m in d.morphisms if not d.is_identity(m.id)]
    for f in nonid:
        for g in nonid:
            if f.src != g.tgt:
                continue
            fg = d.composition.get((f.id, g.id))
            if fg is None:
                bad.append("missing composite %r . %r" % (f.id, g.id))
                continue
            h = d._mor.get(fg)
            if h is None or h.src != g.src or h.tgt != f.tgt:
                bad.append("composite %r . %r = %r has wrong endpoints"
                           % (f.id, g.id, fg))
                continue
            if h.poly != f.poly.compose(g.poly):
                bad.append("composite %r . %r does not match its label"
                           % (f.id, g.id))
    for f in nonid:
        for g in nonid:
            if f.src != g.tgt:
                continue
            for h in nonid:
                if g.src != h.tgt:
                    continue
                try:
                    left = d.compose(d.compose(f.id, g.id), h.id)
                    right = d.compose(f.id, d.compose(g.id, h.id))
                except ValueError:
                    continue  # already reported as a missing composite
                if left != right:
                    bad.append("associativity fails on (%r, %r, %r)"
                               % (f.id, g.id, h.id))
    if d.height is None and d.n_max is None:
        bad.append("no nerve finiteness certificate (cycle without n_max)")
    return bad


# ---------------------------------------------------------------------------
# preset good covers


def _affine_map(dims, shifts):
    """The translation chart map x |-> x + shift, coordinatewise."""
    comps = []
    for j in range(dims):
        mono_lin = tuple(1 if t == j else 0 for t in range(dims))
        comp = {mono_lin: ONE}
        if shifts[j]:
            comp[(0,) * dims] = rat(shifts[j])
        comps.append(comp)
    return PolyMap(dims, dims, comps)


def _circle_3arc():
    # Arcs of R mod 3: U0=(0,2), U1=(1,3), U2=(2,4); overlaps O01=(1,2),
    # O12=(2,3), O20=(3,4).  All inclusions are t |-> t except O20 into U0,
    # which unwraps by t |-> t - 3.
    objs = [PlotObject(x, 1) for x in
            ("O01", "O12", "O20", "U0", "U1", "U2")]
    mors = []
    for src, tgt, shift in (("O01", "U0", 0), ("O01", "U1", 0),
                            ("O12", "U1", 0), ("O12", "U2", 0),
                            ("O20", "U2", 0), ("O20", "U0", -3)):
        mors.append(PlotMorphism("%s>%s" % (src, tgt), src, tgt,
                                 _affine_map(1, (shift,))))
    return PlotDiagram(objs, mors, composition={})


def _interval_2chart():
    # U0=(0,2), U1=(1,3) on the line, overlap O=(1,2); both inclusions are
    # the identity chart map.
    objs = [PlotObject(x, 1) for x in ("O", "U0", "U1")]
    mors = [PlotMorphism("O>U0", "O", "U0", _affine_map(1, (0,))),
            PlotMorphism("O>U1", "O", "U1", _affine_map(1, (0,)))]
    return PlotDiagram(objs, mors, composition={})


_AXIS_IVAL = {
    frozenset({0}): (0, 2), frozenset({1}): (1, 3), frozenset({2}): (2, 4),
    frozenset({0, 1}): (1, 2), frozenset({1, 2}): (2, 3),
    frozenset({0, 2}): (0, 1),
}


def _axis_shift(sub, sup):
    """m with interval(sup) + 3m inside interval(sub), for sub <= sup."""
    lo_b, hi_b = _AXIS_IVAL[frozenset(sub)]
    lo_s, hi_s = _AXIS_IVAL[frozenset(sup)]
    for m in (-1, 0, 1):
        if lo_s + 3 * m >= lo_b and hi_s + 3 * m <= hi_b:
            return m
    raise AssertionError("no admissible unwrapping shift")


def _torus_9patch():
    # The face poset of the 3x3 cover of R^2 mod 3 by patches
    # U_ij = (i, i+2) x (j, j+2).  Objects are the nonempty intersections
    # (subsets with at most two distinct columns and rows); each is an open
    # box charted by one fixed representative, and an inclusion of regions
    # unwraps by a translation in 3Z x 3Z.
    patches = [(i, j) for i in range(3) for j in range(3)]
    label = {p: "p%d%d" % p for p in patches}

    def proj(s):
        return frozenset(i for i, _ in s), frozenset(j for _, j in s)

    sets = []
    for r in range(1, 5):
        for combo in itertools.combinations(patches, r):
            cols, rows = proj(combo)
            if len(cols) <= 2 and len(rows) <= 2:
                sets.append(frozenset(combo))
    name = {s: "&".join(sorted(label[p] for p in s)) for s in sets}
    objs = [PlotObject(name[s], 2) for s in sets]
    mors = []
    mor_of = {}
    for s in sets:
        for t in sets:
            if s < t:
                cs, rs = proj(s)
                ct, rt = proj(t)
                mx, my = _axis_shift(cs, ct), _axis_shift(rs, rt)
                mid = "%s>%s" % (name[t], name[s])
                mors.append(PlotMorphism(mid, name[t], name[s],
                                         _affine_map(2, (3 * mx, 3 * my))))
                mor_of[(t, s)] = mid
    comp = {}
    for s in sets:
        for t in sets:
            if not s < t:
                continue
            for v in sets:
                if t < v:
                    comp[(mor_of[(t, s)], mor_of[(v, t)])] = mor_of[(v, s)]
    return PlotDiagram(objs, mors, composition=comp)


def good_cover_diagram(preset):
    """One of the bundled cover posets, built from scratch."""
    if preset == "circle_3arc":
        return _circle_3arc()
    if preset == "interval_2chart":
        return _interval_2chart()
    if preset == "torus_9patch":
        return _torus_9patch()
    raise ValueError("unknown preset %r (expected one of %s)"
                     % (preset, ", ".join(PRESET_NAMES)))


# ---------------------------------------------------------------------------
# serialization


def _poly_to_json(p):
    comps = []
    for comp in p.components:
        comps.append([[list(mono), str(c)] for mono, c in
                      sorted(comp.items())])
    return comps


def _poly_from_json(source_dim, target_dim, comps):
    out = []
    for comp in comps:
        acc = {}
        for mono, c in comp:
            acc[tuple(int(e) for e in mono)] = rat(str(c))
        out.append(acc)
    return PolyMap(source_dim, target_dim, out)


def diagram_to_json(d):
    """A plain-dict description; rationals are encoded as 'p/q' strings."""
    obj = {
        "objects": [{"id": o.id, "dim": o.dim} for o in d.objects],
        "morphisms": [
            {"id": m.id, "src": m.src, "tgt": m.tgt,
             "polys": _poly_to_json(m.poly)}
            for m in d.morphisms if not d.is_identity(m.id)],
        "composition": sorted([f, g, h]
                              for (f, g), h in d.composition.items()),
    }
    if d.n_max is not None:
        obj["n_max"] = d.n_max
    return obj


def diagram_from_json(obj):
    """Inverse of diagram_to_json; raises ValueError on malformed input."""
    if not isinstance(obj, dict):
        raise ValueError("diagram description must be an object")
    for key in ("objects", "morphisms"):
        if not isinstance(obj.get(key), list):
            raise ValueError("missing or malformed %r list" % key)
    dims = {}
    objects = []
    for entry in obj["objects"]:
        try:
            objects.append(PlotObject(entry["id"], entry["dim"]))
        except (TypeError, KeyError):
            raise ValueError("malformed object entry %r" % (entry,))
        dims[objects[-1].id] = objects[-1].dim
    morphisms = []
    for entry in obj["morphisms"]:
        try:
            src, tgt = str(entry["src"]), str(entry["tgt"])
            if src not in dims or tgt not in dims:
                raise ValueError("morphism %r has an unknown endpoint"
                                 % entry.get("id"))
            poly = _poly_from_json(dims[src], dims[tgt], entry["polys"])
            morphisms.append(PlotMorphism(entry["id"], src, tgt, poly))
        except ValueError:
            raise
        except Exception:
            raise ValueError("malformed morphism entry %r"
                             % (entry.get("id"),))
    comp = {}
    for triple in obj.get("composition", []):
        if not (isinstance(triple, list) and len(triple) == 3):
            raise ValueError("composition entries must be [f, g, fg] triples")
        f, g, h = (str(x) for x in triple)
        comp[(f, g)] = h
    return PlotDiagram(objects, morphisms, composition=comp,
                       n_max=obj.get("n_max"))


def load_diagram(path):
    """Read a diagram description file; parse errors carry line numbers."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError("%s: line %d column %d: %s"
                         % (path, exc.lineno, exc.colno, exc.msg))
    return diagram_from_json(obj)


def save_diagram(d, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(diagram_to_json(d), fh, indent=1, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# the nerve


def _require_bound(d, n):
    if d.height is not None:
        return
    if d.n_max is None:
        raise ChainBoundExceeded("diagram carries no finiteness certificate")
    if n > d.n_max:
        raise ChainBoundExceeded("level %d exceeds the declared bound %d"
                                 % (n, d.n_max))


def nerve_chains(d, n):
    """Canonically ordered identity-free n-chains (objects when n = 0)."""
    key = ("chains", n)
    if key in d._memo:
        return d._memo[key]
    if n == 0:
        out = tuple(sorted(o.id for o in d.objects))
    else:
        _require_bound(d, n)
        if d.height is not None and n > d.height:
            out = ()
        else:
            nonid = sorted(m.id for m in d.nonidentity_morphisms())
            if n == 1:
                out = tuple((m,) for m in nonid)
            else:
                prev = nerve_chains(d, n - 1)
                grown = []
                for c in prev:
                    tail_src = d.morphism(c[-1]).src
                    for m in nonid:
                        if d.morphism(m).tgt == tail_src:
                            grown.append(c + (m,))
                out = tuple(sorted(grown))
    d._memo[key] = out
    return out


def _unnormalized_chains(d, n):
    """All composable n-chains, identities included."""
    key = ("uchains", n)
    if key in d._memo:
        return d._memo[key]
    if n == 0:
        out = tuple(sorted(o.id for o in d.objects))
    else:
        every = sorted(m.id for m in d.morphisms)
        if n == 1:
            out = tuple((m,) for m in every)
        else:
            prev = _unnormalized_chains(d, n - 1)
            grown = []
            for c in prev:
                tail_src = d.morphism(c[-1]).src
                for m in every:
                    if d.morphism(m).tgt == tail_src:
                        grown.append(c + (m,))
            out = tuple(sorted(grown))
    d._memo[key] = out
    return out


def chain_source(d, chain):
    """The object carrying sections over a chain."""
    if isinstance(chain, str):
        return chain
    return d.morphism(chain[-1]).src


def chain_face(d, chain, i):
    """The i-th face; gives an object id when the chain has length 1."""
    n = len(chain)
    if not 0 <= i <= n:
        raise ValueError("face index %d out of range for an %d-chain"
                         % (i, n))
    if n == 1:
        return d.morphism(chain[0]).tgt if i == 0 else d.morphism(chain[0]).src
    if i == 0:
        return chain[:-1]
    if i == n:
        return chain[1:]
    a = n - i - 1
    composite = d.compose(chain[a], chain[a + 1])
    return chain[:a] + (composite,) + chain[a + 2:]


def _chain_degenerate(d, chain, j):
    """Repeat vertex j of a chain by inserting an identity arrow.

    Vertices count up from the section-carrying chart, so vertex j of
    ``(f_0, ..., f_{n-1})`` is ``src(f_{n-1-j})`` and the identity lands
    at tuple position ``n - j``.
    """
    if isinstance(chain, str):
        if j != 0:
            raise ValueError("degeneracy index out of range")
        return (d.identities[chain],)
    n = len(chain)
    if not 0 <= j <= n:
        raise ValueError("degeneracy index out of range")
    p = n - j
    if p == 0:
        at = d.morphism(chain[0]).tgt
    else:
        at = d.morphism(chain[p - 1]).src
    return chain[:p] + (d.identities[at],) + chain[p:]


# ---------------------------------------------------------------------------
# coefficient models and their componentwise shapes


class _DegreeShifted:
    """Discrete real coefficients placed in chain degree k."""

    __slots__ = ("name", "k")

    def __init__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("the shift degree must be a natural number")
        self.name = "RdeltaShift"
        self.k = k

    def evaluate(self, n, D):
        dims = (0,) * self.k + (1,)
        return ChainComplex(dims, tuple(
            RationalMatrix.zero(dims[j - 1], dims[j])
            for j in range(1, self.k + 1)))

    def __repr__(self):
        return "discrete_coefficients(%d)" % self.k


def discrete_coefficients(k):
    """The coefficient model for degree-k discrete-coefficient cohomology."""
    return _DegreeShifted(k)


def _component_descs(name, k):
    """Per chain degree: ('zero',), ('const',), ('full', j), ('closed', j)."""
    if name == "Point":
        return (("zero",),)
    if name == "BkR":
        return tuple([("zero",)] * k + [("full", 0)])
    if name == "RdeltaShift":
        return tuple([("zero",)] * k + [("const",)])
    if name == "BkRdelta_strict":
        return tuple([("zero",)] * k + [("const",)])
    if name == "BkNablaR":
        return tuple(("full", k - q) for q in range(k + 1))
    if name == "BkRdelta_deligne":
        return (("closed", k),) + tuple(("full", k - q)
                                        for q in range(1, k + 1))
    if name == "BkOmega1cl_strict":
        return tuple([("zero",)] * k + [("closed", 1)])
    if name == "BkOmega1cl_deligne":
        return (("closed", k + 1),) + tuple(("full", k + 1 - q)
                                            for q in range(1, k + 1))
    if name == "OmegaBullet":
        return tuple(("full", k - q) for q in range(k))
    if name == "OmegaK":
        return (("full", k),)
    if name == "OmegaClK":
        return (("closed", k),)
    raise ValueError("no componentwise description for model %r" % name)


def _closed_subspace(n, j, D):
    space = FormSpace(n, j, D)
    if j > n:
        return LinearSubspace.zero(space.dim)
    return kernel(d_matrix(n, j, D))


def _desc_dim(desc, n, D):
    if desc[0] == "zero":
        return 0
    if desc[0] == "const":
        return 1
    if desc[0] == "full":
        return FormSpace(n, desc[1], D).dim
    return _closed_subspace(n, desc[1], D).dim


def _form_embed(n, j, D_small, D_big):
    """Coordinate inclusion of budget D_small j-forms into budget D_big."""
    big = FormSpace(n, j, D_big)
    small = FormSpace(n, j, D_small)
    data = {}
    for col, (mono, subset) in enumerate(small.basis):
        data[(big.index(mono, subset), col)] = ONE
    return RationalMatrix(big.dim, small.dim, data)


def _pullback_matrix(d, mid, j, D):
    """Matrix of f^* on budget-D j-forms, target chart to source chart."""
    key = ("pull", mid, j, D)
    if key in d._memo:
        return d._memo[key]
    m = d.morphism(mid)
    src_space = FormSpace(d.obj_dim(m.src), j, D)
    tgt_space = FormSpace(d.obj_dim(m.tgt), j, D)
    cols = []
    for mono, subset in tgt_space.basis:
        form = tgt_space.form(tuple(ONE if b == (mono, subset) else ZERO
                                    for b in tgt_space.basis))
        cols.append(list(src_space.vector(
            pullback(m.poly, form, D).with_budget(D))))
    out = RationalMatrix.from_cols(cols, rows=src_space.dim)
    d._memo[key] = out
    return out


def _pullback_block(d, mid, desc, D):
    """The coface-0 component block for one chain, by space kind."""
    if desc[0] == "zero":
        return RationalMatrix.zero(0, 0)
    if desc[0] == "const":
        return RationalMatrix.identity(1)
    key = ("pblock", mid, desc, D)
    if key in d._memo:
        return d._memo[key]
    m = d.morphism(mid)
    full = _pullback_matrix(d, mid, desc[1], D)
    if desc[0] == "full":
        out = full
    else:
        cl_src = _closed_subspace(d.obj_dim(m.src), desc[1], D)
        cl_tgt = _closed_subspace(d.obj_dim(m.tgt), desc[1], D)
        out = matrix_in_bases(full * cl_tgt.inclusion_matrix(),
                              dom=None, cod=cl_src)
    d._memo[key] = out
    return out


def _model_profile(s):
    name = getattr(s, "name", None)
    k = getattr(s, "k", None)
    descs = _component_descs(name, k)
    return name, k, descs


def _verify_profile(d, s, descs, n, D):
    """The componentwise shape table must match the model itself."""
    c = s.evaluate(n, D)
    want = tuple(_desc_dim(desc, n, D) for desc in descs)
    got = tuple(c.dim(q) for q in range(len(descs)))
    if want != got or any(c.dim(q) for q in range(len(descs),
                                                  c.length_bound + 1)):
        raise AssertionError("shape table disagrees with %r at n=%d D=%d"
                             % (s, n, D))
    return c


# ---------------------------------------------------------------------------
# cosimplicial evaluation


def _sum_complex(parts, degrees):
    """Direct sum of chain complexes, all padded to the given degree count."""
    dims = tuple(sum(p.dim(q) for p in parts) for q in range(degrees))
    diffs = []
    for q in range(1, degrees):
        diffs.append(RationalMatrix.block_diag(
            [p.d(q) for p in parts]) if parts else
            RationalMatrix.zero(0, 0))
    return ChainComplex(dims, tuple(diffs))


def _assemble_map(d, descs, D, rows_chains, cols_chains, routes,
                  src_cx, tgt_cx):
    """A levelwise map from routed per-chain blocks.

    routes: list of (row_chain_index, col_chain_index, morphism or None);
    None routes an identity block, a morphism id routes its pullback.
    """
    comps = []
    for q, desc in enumerate(descs):
        row_off = []
        acc = 0
        for c in rows_chains:
            row_off.append(acc)
            acc += _desc_dim(desc, d.obj_dim(chain_source(d, c)), D)
        col_off = []
        acc_c = 0
        for c in cols_chains:
            col_off.append(acc_c)
            acc_c += _desc_dim(desc, d.obj_dim(chain_source(d, c)), D)
        data = {}
        for r, ci, mid in routes:
            if mid is None:
                nloc = d.obj_dim(chain_source(d, rows_chains[r]))
                dim = _desc_dim(desc, nloc, D)
                for t in range(dim):
                    key = (row_off[r] + t, col_off[ci] + t)
                    data[key] = data.get(key, ZERO) + ONE
                    if not data[key]:
                        del data[key]
            else:
                block = _pullback_block(d, mid, desc, D)
                for (i, j), v in block.items():
                    key = (row_off[r] + i, col_off[ci] + j)
                    w = data.get(key, ZERO) + v
                    if w:
                        data[key] = w
                    elif key in data:
                        del data[key]
        comps.append(RationalMatrix(acc, acc_c, data))
    return ChainMap(src_cx, tgt_cx, comps, check=False)


def evaluate_cosimplicial(d, s, D, levels=None, normalized=True, check=True):
    """The levelwise evaluation of a coefficient model on the nerve.

    Level n is the direct sum, over n-chains, of the model on the chain's
    source chart.  Coface 0 restricts along the innermost map of a chain;
    every other coface reindexes along a nerve face.  With
    ``normalized=False`` the chains include identities and the result also
    carries codegeneracies (so it can be conormalized); the default uses
    the identity-free chains, which is exact for diagrams whose composites
    of distinct non-identity maps never collapse to an identity (posets).
    """
    name, k, descs = _model_profile(s)
    if levels is None:
        bound = d.chain_bound()
        if bound is None:
            raise ChainBoundExceeded(
                "diagram carries no finiteness certificate")
        levels = bound + 2
    chains_fn = nerve_chains if normalized else _unnormalized_chains
    level_chains = [chains_fn(d, n) for n in range(levels)]
    degrees = len(descs)
    checked = set()
    complexes = []
    for chains in level_chains:
        parts = []
        for c in chains:
            nloc = d.obj_dim(chain_source(d, c))
            if nloc not in checked:
                _verify_profile(d, s, descs, nloc, D)
                checked.add(nloc)
            parts.append(s.evaluate(nloc, D).pad_to(degrees - 1))
        complexes.append(_sum_complex(parts, degrees))
    cofaces = []
    for n in range(1, levels):
        rows = level_chains[n]
        cols = level_chains[n - 1]
        col_index = {c: i for i, c in enumerate(cols)}
        maps = []
        for i in range(n + 1):
            routes = []
            for r, c in enumerate(rows):
                face = chain_face(d, c, i)
                if face not in col_index:
                    raise ValueError(
                        "face of a nondegenerate chain left the normalized "
                        "nerve; evaluate with normalized=False")
                routes.append((r, col_index[face],
                               c[-1] if i == 0 else None))
            maps.append(_assemble_map(d, descs, D, rows, cols, routes,
                                      complexes[n - 1], complexes[n]))
        cofaces.append(maps)
    codegens = None
    if not normalized:
        codegens = []
        for n in range(1, levels):
            rows = level_chains[n - 1]
            cols = level_chains[n]
            col_index = {c: i for i, c in enumerate(cols)}
            maps = []
            for j in range(n):
                routes = []
                for r, c in enumerate(rows):
                    degen = _chain_degenerate(d, c, j)
                    routes.append((r, col_index[degen], None))
                maps.append(_assemble_map(d, descs, D, rows, cols, routes,
                                          complexes[n], complexes[n - 1]))
            codegens.append(maps)
    return CosimplicialChain(complexes, cofaces, codegens, check=check)


def stack_cohomology(d, s, n, D):
    """Total-complex cohomology of the evaluated model at degree n.

    Degree-j discrete-coefficient cohomology is read off at n = 0 with the
    j-shifted coefficient model (``discrete_coefficients(j)``).
    """
    c = evaluate_cosimplicial(d, s, D)
    return tot_cohomology(to_double_complex(c), n)


# ---------------------------------------------------------------------------
# cocycle-level data and checkers


class CheckResult:
    """A boolean verdict carrying the first violation found."""

    __slots__ = ("ok", "message")

    def __init__(self, ok, message=""):
        self.ok = bool(ok)
        self.message = "" if ok else str(message)

    def __bool__(self):
        return self.ok

    def __repr__(self):
        return "CheckResult(ok)" if self.ok else \
            "CheckResult(fail: %s)" % self.message


class CocycleData:
    """Transition functions: one polynomial function per morphism source."""

    __slots__ = ("assignments", "group")

    def __init__(self, assignments, group="R"):
        self.assignments = dict(assignments)
        self.group = group


class ConnectionData:
    """A 1-form per object."""

    __slots__ = ("assignments",)

    def __init__(self, assignments):
        self.assignments = dict(assignments)


class GerbeData:
    """Mixed-degree data: a (k-j)-form on each j-chain, for j = 0..k."""

    __slots__ = ("level", "components")

    def __init__(self, level, components):
        self.level = int(level)
        comps = list(components)
        if len(comps) != self.level + 1:
            raise ValueError("need components for chain levels 0..%d"
                             % self.level)
        self.components = tuple(dict(c) for c in comps)


def _data_form(d, data, chain, degree):
    """A stored form, or the zero form of the right shape."""
    val = data.get(chain)
    if val is None:
        return PolyForm.zero(d.obj_dim(chain_source(d, chain)), degree)
    return val


def _pull_form(d, mid, form):
    """f^* of a form, with an exact (just large enough) output budget."""
    m = d.morphism(mid)
    budget = form.max_coeff_degree() * max(1, m.poly.degree) + \
        max(0, m.poly.degree - 1) * form.form_degree
    return pullback(m.poly, form, budget)


def _cech_of_data(d, level, data, degree):
    """The alternating coface sum of per-chain forms, one level up."""
    out = {}
    for c in nerve_chains(d, level + 1):
        total = _pull_form(d, c[-1], _data_form(d, data, chain_face(d, c, 0),
                                                degree))
        for i in range(1, level + 2):
            term = _data_form(d, data, chain_face(d, c, i), degree)
            total = total + term if i % 2 == 0 else total - term
        out[c] = total
    return out


def check_cocycle(d, g):
    """Additive cocycle law: g on a composite equals pulled-back g plus g."""
    data = g.assignments if isinstance(g, CocycleData) else dict(g)
    for key, val in data.items():
        mid = key[0] if isinstance(key, tuple) else key
        if d.is_identity(mid) and not val.is_zero():
            return CheckResult(False, "identity %r carries a nonzero "
                                      "transition" % mid)
    table = {}
    for key, val in data.items():
        mid = key[0] if isinstance(key, tuple) else key
        table[(mid,)] = val
    for c in nerve_chains(d, 2):
        f0, f1 = c
        lhs = _data_form(d, table, (d.compose(f0, f1),), 0)
        rhs = _pull_form(d, f1, _data_form(d, table, (f0,), 0)) + \
            _data_form(d, table, (f1,), 0)
        if lhs != rhs:
            return CheckResult(False, "cocycle law fails on the pair "
                                      "(%r, %r)" % (f0, f1))
    return CheckResult(True)


def _as_transition_table(g):
    data = g.assignments if isinstance(g, CocycleData) else dict(g)
    return {(key[0] if isinstance(key, tuple) else key,): val
            for key, val in data.items()}


def check_morphism(d, h, g, g2):
    """g2 - g must be the coboundary of the per-object functions h."""
    for gg in (g, g2):
        res = check_cocycle(d, gg)
        if not res:
            return res
    tg, tg2 = _as_transition_table(g), _as_transition_table(g2)
    hmap = dict(h)
    for m in d.nonidentity_morphisms():
        lhs = _data_form(d, tg2, (m.id,), 0) - _data_form(d, tg, (m.id,), 0)
        rhs = _pull_form(d, m.id, _data_form(d, hmap, m.tgt, 0)) - \
            _data_form(d, hmap, m.src, 0)
        if lhs != rhs:
            return CheckResult(False, "morphism law fails on %r" % m.id)
    return CheckResult(True)


def check_connection(d, g, A):
    """Connection law: A_src - f^* A_tgt = d g_f on every morphism."""
    res = check_cocycle(d, g)
    if not res:
        return res
    tg = _as_transition_table(g)
    amap = A.assignments if isinstance(A, ConnectionData) else dict(A)
    for m in d.nonidentity_morphisms():
        lhs = _data_form(d, amap, m.src, 1) - \
            _pull_form(d, m.id, _data_form(d, amap, m.tgt, 1))
        rhs = exterior_d(_data_form(d, tg, (m.id,), 0))
        if lhs != rhs:
            return CheckResult(False, "connection law fails on %r" % m.id)
    return CheckResult(True)


def check_gerbe(d, data):
    """Componentwise vanishing of the total differential on gerbe data.

    The conventions match the totalization: on each (p+1)-chain the
    exterior derivative of the level-(p+1) component must cancel the Cech
    sum of the level-p component, and the top component must be a Cech
    cocycle.
    """
    k = data.level
    if k < 1:
        return CheckResult(False, "gerbe data needs level >= 1")
    for p in range(k):
        degree = k - p
        delta = _cech_of_data(d, p, data.components[p], degree)
        for c in nerve_chains(d, p + 1):
            dnext = exterior_d(_data_form(d, data.components[p + 1], c,
                                          degree - 1))
            if dnext + delta[c] != PolyForm.zero(
                    d.obj_dim(chain_source(d, c)), degree):
                return CheckResult(
                    False, "level-%d equation fails on chain %r" % (p + 1, c))
    delta_top = _cech_of_data(d, k, data.components[k], 0)
    for c in nerve_chains(d, k + 1):
        if not delta_top[c].is_zero():
            return CheckResult(False, "top cocycle law fails on chain %r"
                                      % (c,))
    return CheckResult(True)


def gerbe_tot_vector(d, data, D):
    """The gerbe datum as a degree-0 vector of the evaluated totalization.

    Signs: the totalization stores ``(-1)^p`` times the level-p component.
    Use with the degree-0 cycle subspace of ``tot`` for a membership check.
    """
    k = data.level
    parts = []
    for p in range(k + 1):
        degree = k - p
        for c in nerve_chains(d, p):
            space = FormSpace(d.obj_dim(chain_source(d, c)), degree, D)
            form = _data_form(d, data.components[p], c, degree)
            if p % 2:
                form = -form
            parts.extend(space.vector(form.with_budget(D)))
    return tuple(parts)


# ---------------------------------------------------------------------------
# constant-coefficient Cech groups and global forms


def _cech_form_delta(d, level, degree, D):
    """Matrix of the Cech differential on budget-D degree-forms."""
    key = ("cechd", level, degree, D)
    if key in d._memo:
        return d._memo[key]
    rows_chains = nerve_chains(d, level + 1)
    cols_chains = nerve_chains(d, level)
    col_index = {c: i for i, c in enumerate(cols_chains)}
    col_off = []
    acc = 0
    for c in cols_chains:
        col_off.append(acc)
        acc += FormSpace(d.obj_dim(chain_source(d, c)), degree, D).dim
    data = {}
    row_acc = 0
    for c in rows_chains:
        dim_here = FormSpace(d.obj_dim(chain_source(d, c)), degree, D).dim
        for i in range(level + 2):
            face = chain_face(d, c, i)
            ci = col_index[face]
            sign = -ONE if i % 2 else ONE
            if i == 0:
                block = _pullback_matrix(d, c[-1], degree, D)
                for (r, s), v in block.items():
                    key2 = (row_acc + r, col_off[ci] + s)
                    w = data.get(key2, ZERO) + sign * v
                    if w:
                        data[key2] = w
                    elif key2 in data:
                        del data[key2]
            else:
                for t in range(dim_here):
                    key2 = (row_acc + t, col_off[ci] + t)
                    w = data.get(key2, ZERO) + sign
                    if w:
                        data[key2] = w
                    elif key2 in data:
                        del data[key2]
        row_acc += dim_here
    out = RationalMatrix(row_acc, acc, data)
    d._memo[key] = out
    return out


class _ConstantCech:
    """Degree-j Cech cohomology with constant coefficients, with a basis."""

    __slots__ = ("degree", "chains", "quot", "label")

    def __init__(self, d, j):
        self.degree = j
        self.chains = nerve_chains(d, j)
        Z = kernel(_cech_form_delta(d, j, 0, 0))
        if j == 0:
            B = LinearSubspace.zero(Z.ambient_dim)
        else:
            B = image(_cech_form_delta(d, j - 1, 0, 0))
        self.quot = QuotientSpace(Z, B)
        self.label = "H^%d(X, R_delta)" % j

    def vector(self, data):
        """A constants j-cochain dict as an ambient vector."""
        return tuple(rat(data.get(c, 0)) for c in self.chains)

    def class_of(self, data, representative=None):
        coords = self.quot.coords(self.vector(data))
        return CohClass(self.label, coords,
                        data if representative is None else representative)


def constant_cech(d, j):
    key = ("constcech", j)
    if key not in d._memo:
        d._memo[key] = _ConstantCech(d, j)
    return d._memo[key]


class CohClass:
    """A cohomology class: canonical coordinates plus a representative."""

    __slots__ = ("group", "coords", "representative")

    def __init__(self, group, coords, representative=None):
        self.group = str(group)
        self.coords = tuple(rat(c) for c in coords)
        self.representative = representative

    @property
    def is_zero(self):
        return not any(self.coords)

    def __eq__(self, other):
        if not isinstance(other, CohClass):
            return NotImplemented
        return (self.group, self.coords) == (other.group, other.coords)

    def __hash__(self):
        return hash((self.group, self.coords))

    def __repr__(self):
        return "CohClass(%s: %s)" % (self.group,
                                     "0" if self.is_zero else
                                     str(tuple(str(c) for c in self.coords)))


def global_forms(d, j, D):
    """Forms given per object and agreeing under every pullback."""
    return kernel(_cech_form_delta(d, 0, j, D))


def _blockdiag_d(d, j, D):
    return RationalMatrix.block_diag(
        [d_matrix(d.obj_dim(o), j, D) for o in nerve_chains(d, 0)])


def _closed_globals(d, j, D):
    stacked = RationalMatrix.vstack([_cech_form_delta(d, 0, j, D),
                                     _blockdiag_d(d, j, D)])
    return kernel(stacked)


def derham_quotient(d, j, D):
    """Closed global j-forms modulo differentials of global forms."""
    Z = _closed_globals(d, j, D)
    if j == 0:
        B = LinearSubspace.zero(Z.ambient_dim)
    else:
        prev = global_forms(d, j - 1, D)
        mat = _blockdiag_d(d, j - 1, D) * prev.inclusion_matrix()
        B = image(mat)
    return QuotientSpace(Z, B)


def _forms_of_global(d, vec, j, D):
    """Slice a global-forms ambient vector into per-object PolyForms."""
    out = {}
    off = 0
    for oid in nerve_chains(d, 0):
        space = FormSpace(d.obj_dim(oid), j, D)
        out[oid] = space.form(tuple(vec[off:off + space.dim]))
        off += space.dim
    return out


# ---------------------------------------------------------------------------
# staircase reductions and the class maps


def _constants_reduction(d, k, components, budget_cap=None):
    """Reduce flat mixed data to a constants k-cocycle by boundary moves.

    components[p] maps p-chains to (k-p)-forms in the totalization's sign
    convention; the level-0 part must be closed patchwise and the data a
    cocycle.  Each step subtracts the boundary of a patchwise primitive,
    clearing one level; what remains on k-chains is constant.
    """
    comps = [dict(c) for c in components]
    for p in range(k):
        degree = k - p
        prims = {}
        for c in nerve_chains(d, p):
            form = _data_form(d, comps[p], c, degree)
            if form.is_zero():
                continue
            prim = poincare_h(form) if budget_cap is None else \
                poincare_h(form, out_budget=budget_cap)
            if exterior_d(prim) != form:
                raise ValueError("data is not closed at level %d" % p)
            prims[c] = prim
        delta = _cech_of_data(d, p, prims, degree - 1)
        nxt = {}
        for c in nerve_chains(d, p + 1):
            val = _data_form(d, comps[p + 1], c, degree - 1) - delta[c]
            if not val.is_zero():
                nxt[c] = val
        comps[p + 1] = nxt
    out = {}
    for c in nerve_chains(d, k):
        form = _data_form(d, comps[k], c, 0)
        if form.max_coeff_degree() > 0:
            raise ValueError("reduction did not reach constants; the data "
                             "is not a cocycle")
        terms = form.terms
        if terms:
            ((_mono, _sub), value), = terms.items()
            out[c] = value
    return out


def _constant_of(form):
    terms = form.terms
    if not terms:
        return ZERO
    ((_m, _s), v), = terms.items()
    return v


def class_map_theta(d, A, D=None):
    """Winding classes of the patch primitives of a closed global 1-form.

    Builds per-object primitives with the radial homotopy (within budget D
    when one is given), takes their Cech difference (a constant on each
    morphism source) and returns the degree-1 constant-coefficient class.
    """
    amap = A.assignments if isinstance(A, ConnectionData) else dict(A)
    for oid in nerve_chains(d, 0):
        form = _data_form(d, amap, oid, 1)
        if not exterior_d(form).is_zero():
            raise NotClosed("the 1-form on %r is not closed" % oid)
    for m in d.nonidentity_morphisms():
        if _pull_form(d, m.id, _data_form(d, amap, m.tgt, 1)) != \
                _data_form(d, amap, m.src, 1):
            raise NotGlobal("the 1-form is not global across %r" % m.id)
    prims = {}
    for oid in nerve_chains(d, 0):
        form = _data_form(d, amap, oid, 1)
        if form.is_zero():
            continue
        prims[oid] = poincare_h(form) if D is None else \
            poincare_h(form, out_budget=D)
    z = {}
    for m in d.nonidentity_morphisms():
        diff = _pull_form(d, m.id, _data_form(d, prims, m.tgt, 0)) - \
            _data_form(d, prims, m.src, 0)
        if diff.max_coeff_degree() > 0:
            raise AssertionError("primitive differences must be constant")
        val = _constant_of(diff)
        if val:
            z[(m.id,)] = val
    return constant_cech(d, 1).class_of(z, representative=z)


def class_map_alpha(d, flat):
    """A flat gerbe's pair: zero curvature class plus its transition class."""
    res = check_gerbe(d, flat)
    if not res:
        raise ValueError("not a gerbe cocycle: %s" % res.message)
    k = flat.level
    budget = 0
    for p in range(k + 1):
        for form in flat.components[p].values():
            budget = max(budget, form.max_coeff_degree())
    for oid in nerve_chains(d, 0):
        if not exterior_d(_data_form(d, flat.components[0], oid,
                                     k)).is_zero():
            raise NotFlat("curvature does not vanish on %r" % oid)
    signed = []
    for p in range(k + 1):
        if p % 2:
            signed.append({c: -f for c, f in flat.components[p].items()})
        else:
            signed.append(dict(flat.components[p]))
    z = _constants_reduction(d, k, signed)
    if k % 2:
        z = {c: -v for c, v in z.items()}
    dr = derham_quotient(d, k + 1, budget)
    curvature = CohClass("H^%d_dR(X)" % (k + 1), (ZERO,) * dr.dim,
                         representative=None)
    return curvature, constant_cech(d, k).class_of(z, representative=flat)


def class_map_beta(pair):
    """Forget the transition class, keep the curvature class."""
    return pair[0]


def class_map_gamma(d, omega):
    """The obstruction class of a closed global form.

    The input is a dict of per-object (k+1)-forms; the output is the
    degree-(k+1) constant-coefficient class of the gerbe (omega, 0, .., 0),
    computed by the staircase reduction.
    """
    omap = dict(omega.assignments) if isinstance(omega, ConnectionData) \
        else dict(omega)
    degrees = {f.form_degree for f in omap.values()}
    if len(degrees) != 1:
        raise ValueError("the form degree must be uniform")
    K = degrees.pop()
    if K < 1:
        raise ValueError("expected forms of positive degree")
    for oid, form in omap.items():
        if not exterior_d(form).is_zero():
            raise NotClosed("the form on %r is not closed" % oid)
    for m in d.nonidentity_morphisms():
        if _pull_form(d, m.id, _data_form(d, omap, m.tgt, K)) != \
                _data_form(d, omap, m.src, K):
            raise NotGlobal("the form is not global across %r" % m.id)
    comps = [dict(omap)] + [{} for _ in range(K)]
    z = _constants_reduction(d, K, comps)
    if K % 2:
        z = {c: -v for c, v in z.items()}
    rep = GerbeData(K, [omap] + [{} for _ in range(K)])
    return constant_cech(d, K).class_of(z, representative=rep)


# ---------------------------------------------------------------------------
# the degree-1 exact sequence


class Degree1Report:
    """Dims and position-by-position verdicts for the curvature sequence."""

    __slots__ = ("D", "slack", "dims", "positions")

    def __init__(self, D, slack, dims, positions):
        self.D = D
        self.slack = slack
        self.dims = dict(dims)
        self.positions = dict(positions)

    @property
    def passed(self):
        return all(self.positions.values())

    def to_record(self):
        return {"D": self.D, "slack": self.slack, "dims": dict(self.dims),
                "positions": dict(self.positions), "passed": self.passed}

    def __repr__(self):
        flag = "passed" if self.passed else "FAILED"
        return "Degree1Report(D=%d, %s, dims=%r)" % (self.D, flag, self.dims)


class _StableDeRham:
    """De Rham classes at budget D that survive to a larger budget.

    Polynomial budgets create transient classes (a closed form whose
    primitive needs one more coefficient degree); the honest statement at
    desk scale quotients them away by mapping budget-D classes into the
    budget-(D+slack) presentation.
    """

    __slots__ = ("ZD", "quot", "clsmat")

    def __init__(self, d, j, D, big):
        self.ZD = _closed_globals(d, j, D)
        self.quot = derham_quotient(d, j, big)
        embeds = RationalMatrix.block_diag(
            [_form_embed(d.obj_dim(o), j, D, big)
             for o in nerve_chains(d, 0)])
        cols = [list(self.quot.coords(embeds.mv(zb)))
                for zb in self.ZD.basis]
        self.clsmat = RationalMatrix.from_cols(cols, rows=self.quot.dim)

    @property
    def stable_dim(self):
        return rank(self.clsmat)


def _subspace_from_cols(mat):
    return LinearSubspace.from_spanning(
        mat.rows, [mat.col(j) for j in range(mat.cols)])


def _image_under(mat, subspace):
    """The image of a subspace (given in the matrix's column space)."""
    return LinearSubspace.from_spanning(
        mat.rows, [mat.mv(v) for v in subspace.basis])


def verify_degree1_sequence(d, D=1, slack=1):
    """Rank-level exactness of the degree-1 curvature sequence.

    The sequence runs: stable degree-1 de Rham classes inject by the
    winding map into degree-1 constant-coefficient cohomology; those map
    onward to connection pairs (curvature class, transition class), then
    project to stable degree-2 de Rham classes, and end in the degree-2
    constant-coefficient obstruction.  Every kernel/image equality is
    verified by exhaustive rank computation at budget D, with witnesses
    allowed ``slack`` extra coefficient degrees (plus one more for
    primitive constructions).
    """
    big = D + slack
    DT = big + 1
    c1 = constant_cech(d, 1)
    c2 = constant_cech(d, 2)
    dr1 = _StableDeRham(d, 1, D, big)
    dr2 = _StableDeRham(d, 2, D, big)

    # the winding map on budget-D closed global 1-forms
    th_cols = []
    for zb in dr1.ZD.basis:
        forms = _forms_of_global(d, zb, 1, D)
        cls = class_map_theta(d, forms)
        th_cols.append(list(cls.coords))
    thmat = RationalMatrix.from_cols(th_cols, rows=c1.quot.dim)
    ker_th = kernel(thmat)
    ker_cls1 = kernel(dr1.clsmat)
    theta_well_defined = ker_cls1.dim == 0 or ker_th.contains(ker_cls1)
    theta_injective = ker_th.dim == 0 or ker_cls1.contains(ker_th)
    im_theta = image(thmat)

    # transitions that bound polynomially at the witness budget
    Zconst = kernel(_cech_form_delta(d, 1, 0, 0))
    chains1 = nerve_chains(d, 1)
    embed_const = RationalMatrix.block_diag(
        [_form_embed(d.obj_dim(chain_source(d, c)), 0, 0, DT)
         for c in chains1])
    embed_D = RationalMatrix.block_diag(
        [_form_embed(d.obj_dim(chain_source(d, c)), 0, D, DT)
         for c in chains1])
    delta0_DT = _cech_form_delta(d, 0, 0, DT)
    if Zconst.dim:
        paired = RationalMatrix.hstack(
            [embed_const * Zconst.basis_matrix().transpose(), delta0_DT])
        mixed = kernel(paired)
        reps = []
        for v in mixed.basis:
            zvec = [ZERO] * Zconst.ambient_dim
            for t in range(Zconst.dim):
                if v[t]:
                    zvec = [a + v[t] * b for a, b in zip(zvec,
                                                         Zconst.basis[t])]
            reps.append(tuple(c1.quot.coords(tuple(zvec))))
        ker_alpha = LinearSubspace.from_spanning(c1.quot.dim, reps)
    else:
        ker_alpha = LinearSubspace.zero(c1.quot.dim)
    pos_alpha = ker_alpha == im_theta

    # connection pairs: degree-0 cycles of the totalized full tower
    tower = build_stack("BkNablaR", 1)
    ev = evaluate_cosimplicial(d, tower, D, levels=3, check=False)
    t = tot(to_double_complex(ev))
    V = t.degree0_subspace
    layout = t.layout(0)
    a_dim = layout[0][2] if layout else 0
    g_dim = layout[1][2] if len(layout) > 1 else 0
    dmat = RationalMatrix.block_diag(
        [d_matrix(d.obj_dim(o), 1, D) for o in nerve_chains(d, 0)])

    curv_cols = []
    for v in V.basis:
        a_part = v[:a_dim]
        curv_cols.append(list(dr2.ZD.coords(dmat.mv(a_part))))
    curvZ = RationalMatrix.from_cols(curv_cols, rows=dr2.ZD.dim)
    curv_stable = dr2.clsmat * curvZ

    # position at the connection pairs: stably flat pairs have transition
    # classes reachable from constant cocycles, and every constant cocycle
    # arises from an honest (flat) pair.
    W_cols = [delta0_DT.col(j) for j in range(delta0_DT.cols)]
    emb_Z = embed_const * Zconst.basis_matrix().transpose()
    W_cols.extend(emb_Z.col(j) for j in range(emb_Z.cols))
    W = LinearSubspace.from_spanning(delta0_DT.rows, W_cols)
    V0 = kernel(curv_stable)
    pos_beta = True
    for w in V0.basis:
        gvec = [ZERO] * g_dim
        for t_i in range(V.dim):
            if w[t_i]:
                base = V.basis[t_i]
                for s in range(g_dim):
                    gvec[s] = gvec[s] + w[t_i] * base[a_dim + s]
        if not W.contains_vector(embed_D.mv(gvec)):
            pos_beta = False
            break
    if pos_beta:
        embed_const_D = RationalMatrix.block_diag(
            [_form_embed(d.obj_dim(chain_source(d, c)), 0, 0, D)
             for c in chains1])
        for zb in Zconst.basis:
            flat_vec = (ZERO,) * a_dim + embed_const_D.mv(zb)
            if not V.contains_vector(flat_vec):
                pos_beta = False
                break

    # position at stable degree-2 de Rham: kernel of the obstruction map
    # equals the realized curvature classes
    g_cols = []
    for zb in dr2.ZD.basis:
        forms = _forms_of_global(d, zb, 2, D)
        cls = class_map_gamma(d, forms)
        g_cols.append(list(cls.coords))
    gmat = RationalMatrix.from_cols(g_cols, rows=c2.quot.dim)
    gamma_well_defined = True
    kc2 = kernel(dr2.clsmat)
    if kc2.dim:
        kg = kernel(gmat)
        gamma_well_defined = kg.contains(kc2)
    ker_gamma_stable = _image_under(dr2.clsmat, kernel(gmat))
    im_beta_stable = _image_under(dr2.clsmat, _subspace_from_cols(curvZ))
    pos_gamma = ker_gamma_stable == im_beta_stable

    # the dimension of the connection-pair group: realized stable
    # curvatures plus transition classes of the stably flat pairs
    L = _subspace_from_cols(delta0_DT)
    residuals = []
    for w in V0.basis:
        gvec = [ZERO] * g_dim
        for t_i in range(V.dim):
            if w[t_i]:
                base = V.basis[t_i]
                for s in range(g_dim):
                    gvec[s] = gvec[s] + w[t_i] * base[a_dim + s]
        _coeffs, res = L._reduce(embed_D.mv(gvec))
        vec = [ZERO] * L.ambient_dim
        for j, vv in res.items():
            vec[j] = vv
        residuals.append(tuple(vec))
    conn_dim = rank(curv_stable) + \
        LinearSubspace.from_spanning(L.ambient_dim, residuals).dim

    dims = {
        "H1_dR": dr1.stable_dim,
        "H1_delta": c1.quot.dim,
        "H_conn": conn_dim,
        "H2_dR": dr2.stable_dim,
        "H2_delta": c2.quot.dim,
    }
    positions = {
        "theta_well_defined": theta_well_defined,
        "theta_injective": theta_injective,
        "ker_alpha_eq_im_theta": pos_alpha,
        "ker_beta_eq_im_alpha": pos_beta,
        "ker_gamma_eq_im_beta": pos_gamma,
    }
    return Degree1Report(D, slack, dims, positions)
