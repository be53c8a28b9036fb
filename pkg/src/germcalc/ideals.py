"""Standard bases, elimination and germ-level ideal queries.

Global orders run Buchberger's algorithm with the Gebauer-Moeller pair
update; any other order (local or mixed) runs the same loop with Mora's
weak normal form, which is what makes local quotient dimensions and
radical membership "at the origin" computable.
"""

from __future__ import annotations

import enum
import itertools
import threading
from contextlib import contextmanager
from dataclasses import dataclass, field
from operator import add, sub
from typing import Dict, List, Optional, Sequence, Tuple

from . import linalg
from .ring import (
    DEGREVLEX,
    NEGDEGREVLEX,
    ONE,
    ZERO,
    MonomialOrder,
    Poly,
    Ring,
    Scalar,
    poly_compose,
)

Exponent = Tuple[int, ...]
Terms = Dict[Exponent, Scalar]


class _Infinite:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "Infinite"

    __str__ = __repr__

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("Infinite")

    def __gt__(self, other):
        return other is not self

    def __lt__(self, other):
        return False


INFINITE = _Infinite()


# ---------------------------------------------------------------------------
# term-level helpers (dict polynomials)


class BudgetExceeded(RuntimeError):
    """Raised when a computation under ``work_budget`` runs out of reduction work."""


_budget = threading.local()


@contextmanager
def work_budget(steps: int):
    """Cap reduction work, counted in terms touched; deterministic, unlike a wall-clock timeout."""
    prev = getattr(_budget, "left", None)
    _budget.left = steps
    try:
        yield
    finally:
        _budget.left = prev


def _tick(cost: int):
    left = getattr(_budget, "left", None)
    if left is not None:
        if left < cost:
            raise BudgetExceeded("reduction work budget exhausted")
        _budget.left = left - cost


def _divides(a: Exponent, b: Exponent) -> bool:
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


def _lcm(a: Exponent, b: Exponent) -> Exponent:
    return tuple(map(max, a, b))


def _coprime(a: Exponent, b: Exponent) -> bool:
    for x, y in zip(a, b):
        if x and y:
            return False
    return True


def _axpy(h: Terms, g: Terms, shift: Exponent, q: Scalar) -> None:
    """In place: ``h -= q * x**shift * g``."""
    for ge, gc in g.items():
        te = tuple(map(add, ge, shift))
        v = h.get(te)
        if v is None:
            h[te] = -(q * gc)
        else:
            v = v - q * gc
            if v:
                h[te] = v
            else:
                del h[te]


def _scale(h: Terms, c: Scalar) -> Terms:
    return {e: v * c for e, v in h.items()}


class _Elem:
    """A polynomial inside the engine, with its provenance."""

    __slots__ = ("terms", "lm", "lc", "ecart", "cof", "unit")

    def __init__(self, terms: Terms, key, cof=None, unit=None):
        self.terms = terms
        self.lm = max(terms, key=key)
        self.lc = terms[self.lm]
        self.ecart = max(map(sum, terms)) - sum(self.lm)
        self.cof = cof
        self.unit = unit


def _track_axpy(target: Optional[List[Terms]], src: Optional[List[Terms]], shift, q):
    if target is None or src is None:
        return
    for t, s in zip(target, src):
        _axpy(t, s, shift, q)


def _reduce(h: Terms, reducers: List[_Elem], order: MonomialOrder, cof=None, full=False):
    """Plain (global) reduction of ``h``; returns the remainder dict."""
    key = order.key
    rem: Terms = {}
    h = dict(h)
    while h:
        _tick(len(h))
        e = max(h, key=key)
        c = h[e]
        for g in reducers:
            if _divides(g.lm, e):
                shift = tuple(map(sub, e, g.lm))
                q = c / g.lc
                _axpy(h, g.terms, shift, q)
                _track_axpy(cof, g.cof, shift, q)
                break
        else:
            if not full:
                rem.update(h)
                return rem
            rem[e] = c
            del h[e]
    return rem


def _mora(h: Terms, reducers: List[_Elem], order: MonomialOrder, cof=None, unit=None):
    """Mora's weak normal form.

    Returns ``(remainder, unit)`` where ``unit * h_in = remainder + sum(...)``
    and ``unit`` has leading monomial 1.  ``cof`` and ``unit`` are updated in
    place when tracking is requested.
    """
    key = order.key
    T = list(reducers)
    n = len(next(iter(h))) if h else 0
    if unit is None:
        unit = {(0,) * n: ONE} if n else {}
    h = dict(h)
    while h:
        _tick(len(h))
        e = max(h, key=key)
        deg_h = max(map(sum, h))
        ecart_h = deg_h - sum(e)
        best = None
        for g in T:
            if _divides(g.lm, e) and (best is None or g.ecart < best.ecart):
                best = g
                if g.ecart == 0:
                    break
        if best is None:
            return h, unit
        if best.ecart > ecart_h:
            snap = _Elem(dict(h), key)
            snap.cof = [dict(t) for t in cof] if cof is not None else None
            snap.unit = dict(unit)
            T.append(snap)
        c = h[e]
        shift = tuple(map(sub, e, best.lm))
        q = c / best.lc
        _axpy(h, best.terms, shift, q)
        _track_axpy(cof, best.cof, shift, q)
        if best.unit is not None:
            _axpy(unit, best.unit, shift, q)
    return h, unit


def _spoly(f: _Elem, g: _Elem, track: bool):
    l = _lcm(f.lm, g.lm)
    sf = tuple(map(sub, l, f.lm))
    sg = tuple(map(sub, l, g.lm))
    h: Terms = {}
    _axpy(h, f.terms, sf, -(f.lc.inverse()))
    _axpy(h, g.terms, sg, g.lc.inverse())
    cof = None
    if track:
        cof = [dict() for _ in f.cof]
        _track_axpy(cof, f.cof, sf, -(f.lc.inverse()))
        _track_axpy(cof, g.cof, sg, g.lc.inverse())
    return h, cof


def _update(elems: List[_Elem], active: List[int], pairs: List[Tuple[int, int]], hi: int):
    """Gebauer-Moeller pair update after inserting ``elems[hi]``."""
    h = elems[hi].lm
    C = [(hi, g) for g in active]
    D = []
    while C:
        p = C.pop(0)
        g1 = elems[p[1]].lm
        lhg1 = _lcm(h, g1)
        if _coprime(h, g1):
            D.append(p)
            continue
        dominated = False
        for q in C + D:
            if _divides(_lcm(h, elems[q[1]].lm), lhg1):
                dominated = True
                break
        if not dominated:
            D.append(p)
    E = [p for p in D if not _coprime(h, elems[p[1]].lm)]
    kept = []
    for (a, b) in pairs:
        la, lb = elems[a].lm, elems[b].lm
        lab = _lcm(la, lb)
        if (
            not _divides(h, lab)
            or _lcm(la, h) == lab
            or _lcm(h, lb) == lab
        ):
            kept.append((a, b))
    kept.extend(E)
    new_active = [g for g in active if not _divides(h, elems[g].lm)]
    new_active.append(hi)
    return new_active, kept


def _engine(gens: Sequence[Poly], order: MonomialOrder, track: bool = False):
    """Core loop shared by global and local orders.

    Returns the list of basis ``_Elem`` (cofactors w.r.t. ``gens`` attached
    when ``track``).
    """
    key = order.key
    glob = order.is_global
    ngen = len(gens)
    elems: List[_Elem] = []
    active: List[int] = []
    pairs: List[Tuple[int, int]] = []

    def normalize(terms: Terms, cof):
        el = _Elem(terms, key)
        inv = el.lc.inverse()
        el.terms = _scale(terms, inv)
        el.lc = ONE
        if cof is not None:
            el.cof = [_scale(c, inv) for c in cof]
        return el

    def reduce(terms: Terms, cof):
        reducers = [elems[k] for k in active]
        if glob:
            return _reduce(terms, reducers, order, cof), cof
        r, _unit = _mora(terms, reducers, order, cof)
        return r, cof

    for k, g in enumerate(gens):
        if g.is_zero():
            continue
        cof = None
        if track:
            cof = [dict() for _ in range(ngen)]
            cof[k] = {(0,) * g.ring.nvars: ONE}
        terms, cof = reduce(dict(g.terms), cof)
        if not terms:
            continue
        elems.append(normalize(terms, cof))
        active, pairs = _update(elems, active, pairs, len(elems) - 1)

    def pair_key(p):
        l = _lcm(elems[p[0]].lm, elems[p[1]].lm)
        return (sum(l), key(l), p)

    while pairs:
        pairs.sort(key=pair_key, reverse=False)
        if not glob:
            pass
        a, b = pairs.pop(0)
        h, cof = _spoly(elems[a], elems[b], track)
        if not h:
            continue
        h, cof = reduce(h, cof)
        if not h:
            continue
        elems.append(normalize(h, cof))
        active, pairs = _update(elems, active, pairs, len(elems) - 1)

    basis = [elems[k] for k in active]
    # a unit in the localisation generates everything
    zero = (0,) * (gens[0].ring.nvars if gens else 0)
    for el in basis:
        if el.lm == zero:
            return [el]
    if glob:
        basis = _interreduce(basis, order)
    basis.sort(key=lambda el: key(el.lm))
    return basis


def _interreduce(basis: List[_Elem], order: MonomialOrder) -> List[_Elem]:
    key = order.key
    out = []
    for k, el in enumerate(basis):
        others = [b for j, b in enumerate(basis) if j != k]
        cof = [dict(c) for c in el.cof] if el.cof is not None else None
        # leading term is never reducible by a minimal basis; reduce the tail
        tail = dict(el.terms)
        lead = tail.pop(el.lm)
        rem = _reduce(tail, others, order, cof, full=True) if tail else {}
        rem[el.lm] = lead
        new = _Elem(rem, key, cof)
        out.append(new)
    return out


# ---------------------------------------------------------------------------
# public API


class IdealHandle:
    """Generators of an ideal plus cached standard bases per monomial order."""

    def __init__(self, ring: Ring, generators: Sequence[Poly]):
        self.ring = ring
        gens = []
        for g in generators:
            if g.ring != ring:
                g = g.to_ring(ring)
            gens.append(g)
        if not gens:
            gens = [ring.zero()]
        self.generators: Tuple[Poly, ...] = tuple(gens)
        self._cache: Dict[Tuple[MonomialOrder, bool], List[_Elem]] = {}
        # smoothness certificate established by a caller with extra knowledge
        self.certificate = None
        self._lock = threading.Lock()

    @classmethod
    def of(cls, *gens: Poly) -> "IdealHandle":
        return cls(gens[0].ring, gens)

    def is_zero_ideal(self) -> bool:
        return all(g.is_zero() for g in self.generators)

    def _basis(self, order: MonomialOrder, track: bool = False) -> List[_Elem]:
        k = (order, track)
        got = self._cache.get(k)
        if got is None and not track:
            got = self._cache.get((order, True))
        if got is not None:
            return got
        with self._lock:
            got = self._cache.get(k)
            if got is None:
                got = _engine(self.generators, order, track)
                self._cache[k] = got
        return got

    def standard_basis(self, order: MonomialOrder = DEGREVLEX) -> List[Poly]:
        return standard_basis(self, order)

    def leading_monomials(self, order: MonomialOrder) -> List[Exponent]:
        return [el.lm for el in self._basis(order)]

    def vanishes_at_origin(self) -> bool:
        return all(not g.constant_term() for g in self.generators)

    def __repr__(self):
        return "IdealHandle<" + ", ".join(map(str, self.generators)) + ">"


def standard_basis(I: IdealHandle, order: MonomialOrder = DEGREVLEX) -> List[Poly]:
    """Reduced Groebner basis (global orders) or minimal standard basis (others)."""
    return [Poly(I.ring, dict(el.terms)) for el in I._basis(order)]


def s_polynomial(f: Poly, g: Poly, order: MonomialOrder) -> Poly:
    key = order.key
    h, _ = _spoly(_Elem(dict(f.terms), key), _Elem(dict(g.terms), key), False)
    return Poly(f.ring, h)


def mora_normal_form(p: Poly, basis: Sequence[Poly], order: MonomialOrder) -> Tuple[Poly, Poly]:
    """Weak normal form ``(r, u)`` with ``u*p - r`` in the ideal and ``u`` a local unit."""
    key = order.key
    reducers = [_Elem(dict(b.terms), key) for b in basis if b]
    if not p:
        return p, p.ring.one()
    r, u = _mora(dict(p.terms), reducers, order)
    return Poly(p.ring, r), Poly(p.ring, u)


def reduce_modulo(p: Poly, I: IdealHandle, order: MonomialOrder = DEGREVLEX) -> Poly:
    """Normal form of ``p`` modulo ``I`` (weak normal form for non-global orders)."""
    if p.is_zero():
        return p
    basis = I._basis(order)
    if order.is_global:
        return Poly(p.ring, _reduce(dict(p.terms), basis, order, full=True))
    r, _ = _mora(dict(p.terms), basis, order)
    return Poly(p.ring, r)


def contains(I: IdealHandle, p: Poly, local: bool = False) -> bool:
    """Ideal membership, in the polynomial ring or (``local``) at the origin."""
    order = NEGDEGREVLEX if local else DEGREVLEX
    return reduce_modulo(p.to_ring(I.ring), I, order).is_zero()


def ideals_equal(I: IdealHandle, J: IdealHandle, local: bool = False) -> bool:
    return all(contains(J, g, local) for g in I.generators) and all(
        contains(I, g, local) for g in J.generators
    )


def membership_with_cofactors(
    p: Poly, I: IdealHandle, order: MonomialOrder = DEGREVLEX
) -> Optional[List[Poly]]:
    """Cofactors ``c`` with ``p == sum(c_i * gen_i)``, or None when ``p`` is not in ``I``."""
    if not order.is_global:
        raise ValueError("polynomial cofactors need a global order; use local_membership")
    ring = I.ring
    p = p.to_ring(ring)
    basis = I._basis(order, track=True)
    n = len(I.generators)
    cof = [dict() for _ in range(n)]
    rem = _reduce(dict(p.terms), basis, order, cof, full=True)
    if rem:
        return None
    # reduction gives p - sum(q_b * b) = 0 with accumulated -q; undo the sign
    return [-Poly(ring, c) for c in cof]


def local_membership(p: Poly, I: IdealHandle) -> Optional[Tuple[Poly, List[Poly]]]:
    """``(u, c)`` with ``u*p == sum(c_i * gen_i)`` and ``u(0) != 0``, or None."""
    ring = I.ring
    p = p.to_ring(ring)
    basis = I._basis(NEGDEGREVLEX, track=True)
    n = len(I.generators)
    cof = [dict() for _ in range(n)]
    if not p:
        return ring.one(), [ring.zero() for _ in range(n)]
    rem, unit = _mora(dict(p.terms), basis, NEGDEGREVLEX, cof)
    if rem:
        return None
    return Poly(ring, unit), [-Poly(ring, c) for c in cof]


def _fresh_name(ring: Ring, base: str = "_s") -> str:
    name = base
    k = 0
    while name in ring:
        k += 1
        name = f"{base}{k}"
    return name


def radical_membership(p: Poly, I: IdealHandle, local: bool = False) -> bool:
    """Rabinowitsch test: ``1 in I + <1 - s*p>``.

    With ``local=True`` the auxiliary variable is ordered globally and the
    original ones locally, so the test decides ``p in rad(I)`` in the local
    ring at the origin (germ semantics).
    """
    ring = I.ring
    p = p.to_ring(ring)
    if p.is_zero():
        return True
    s = _fresh_name(ring)
    big = Ring((s,) + ring.names)
    gens = [g.to_ring(big) for g in I.generators if g]
    gens.append(big.one() - big.var(s) * p.to_ring(big))
    n = ring.nvars
    if local:
        order = MonomialOrder.block((1, DEGREVLEX), (n, NEGDEGREVLEX))
    else:
        order = DEGREVLEX
    basis = _engine(gens, order)
    zero = (0,) * (n + 1)
    return any(el.lm == zero for el in basis)


def eliminate(I: IdealHandle, drop: Sequence[str]) -> IdealHandle:
    """``I`` intersected with the polynomial ring in the remaining variables."""
    ring = I.ring
    drop = [d for d in ring.names if d in set(drop)]
    for d in drop:
        ring.index(d)
    keep = [n for n in ring.names if n not in drop]
    big = Ring(drop + keep)
    order = MonomialOrder.elimination(len(drop), len(keep))
    moved = IdealHandle(big, [g.to_ring(big) for g in I.generators])
    sub_ring = Ring(keep)
    out = []
    for el in moved._basis(order):
        if all(not any(e[: len(drop)]) for e in el.terms):
            out.append(Poly(big, dict(el.terms)).to_ring(sub_ring))
    return IdealHandle(sub_ring, out)


def saturate(I: IdealHandle, f: Poly) -> IdealHandle:
    """``I : f^infinity`` via elimination of a Rabinowitsch variable."""
    ring = I.ring
    s = _fresh_name(ring)
    big = Ring((s,) + ring.names)
    gens = [g.to_ring(big) for g in I.generators]
    gens.append(big.one() - big.var(s) * f.to_ring(big))
    out = eliminate(IdealHandle(big, gens), [s])
    return IdealHandle(ring, [g.to_ring(ring) for g in out.generators])


def local_krull_dim(I: IdealHandle) -> int:
    """Dimension of the germ ``V(I)`` at 0; -1 if the germ is empty."""
    leads = I.leading_monomials(NEGDEGREVLEX)
    n = I.ring.nvars
    if I.is_zero_ideal():
        return n
    if any(not any(e) for e in leads):
        return -1
    supports = [frozenset(k for k, a in enumerate(e) if a) for e in leads]
    for size in range(n, -1, -1):
        for S in itertools.combinations(range(n), size):
            Sset = set(S)
            if all(not sup <= Sset for sup in supports):
                return size
    return 0


def local_quotient_dim(I: IdealHandle):
    """``dim_C C{x}/I`` counted from the local staircase, or INFINITE."""
    n = I.ring.nvars
    if I.is_zero_ideal():
        return INFINITE if n else 1
    leads = I.leading_monomials(NEGDEGREVLEX)
    if any(not any(e) for e in leads):
        return 0
    bounds = []
    for k in range(n):
        pure = [e[k] for e in leads if e[k] and all(not a for j, a in enumerate(e) if j != k)]
        if not pure:
            return INFINITE
        bounds.append(min(pure))
    count = 0
    for mono in itertools.product(*(range(b) for b in bounds)):
        if not any(_divides(e, mono) for e in leads):
            count += 1
    return count


def standard_monomials_local(I: IdealHandle) -> List[Exponent]:
    leads = I.leading_monomials(NEGDEGREVLEX)
    n = I.ring.nvars
    if local_quotient_dim(I) is INFINITE:
        raise ValueError("infinite staircase")
    bounds = []
    for k in range(n):
        bounds.append(min(e[k] for e in leads if e[k] and sum(e) == e[k]))
    return [
        m for m in itertools.product(*(range(b) for b in bounds)) if not any(_divides(e, m) for e in leads)
    ]


def jacobian_at_origin(polys: Sequence[Poly]) -> List[List[Scalar]]:
    return [p.linear_part() for p in polys]


@dataclass(frozen=True)
class Smooth:
    codim: int

    def __str__(self):
        return f"Smooth({self.codim})"


@dataclass(frozen=True)
class Inconclusive:
    jacobian_rank: int
    local_dim: int

    def __str__(self):
        return f"Inconclusive(rank={self.jacobian_rank}, dim={self.local_dim})"


def is_smooth_germ(I: IdealHandle):
    """One-sided smoothness certificate for the germ of ``V(I)`` at 0.

    ``Smooth(r)`` means ``I`` contains ``r`` elements with independent
    differentials at 0 and the germ has dimension ``n - r``, so it is that
    smooth germ as a set.  Anything else is ``Inconclusive``.
    """
    if I.certificate is not None:
        return I.certificate
    if not I.vanishes_at_origin():
        raise ValueError("generators must vanish at the origin")
    n = I.ring.nvars
    r = linalg.rank(jacobian_at_origin([g for g in I.generators if g]))
    dim = local_krull_dim(I)
    if dim == n - r:
        return Smooth(r)
    return Inconclusive(r, dim)


class GermStatus(enum.Enum):
    Equal = "Equal"
    StrictlyLarger = "StrictlyLarger"
    StrictlySmaller = "StrictlySmaller"
    Incomparable = "Incomparable"

    def __str__(self):
        return self.value


class GermVerdict:
    """Comparison of two germs of sets ``V(I)`` and ``V(J)`` at the origin.

    ``status`` describes ``V(I)`` relative to ``V(J)``.  ``witness`` is a
    generator of one ideal that fails radical membership in the other and
    ``component`` generates ``larger : witness^inf``, the extra part; it is
    computed on first access.
    """

    def __init__(self, status: "GermStatus", witness: Optional[Poly] = None, larger: Optional["IdealHandle"] = None):
        self.status = status
        self.witness = witness
        self._larger = larger
        self._component: Optional[List[Poly]] = None

    @property
    def component(self) -> List[Poly]:
        if self._component is None:
            if self._larger is None or self.witness is None:
                self._component = []
            else:
                larger = self._larger() if callable(self._larger) else self._larger
                self._component = list(saturate(larger, self.witness).generators)
        return self._component

    def __bool__(self):
        return self.status is GermStatus.Equal

    def __repr__(self):
        return f"GermVerdict({self.status}, witness={self.witness})"


def germ_set_equal(
    I: IdealHandle, J: IdealHandle, local: bool = True, prime: Tuple[bool, bool] = (False, False)
) -> GermVerdict:
    """Compare ``V(I)`` with ``V(J)``.

    ``prime`` flags ideals already known to be prime (e.g. certified smooth
    germs), for which radical membership is plain membership.
    """
    if I.ring != J.ring:
        raise ValueError("germ comparison needs a shared ring")

    def first_outside(gens, other, is_prime):
        for g in gens:
            if not g:
                continue
            inside = contains(other, g, local=local) if is_prime else radical_membership(g, other, local=local)
            if not inside:
                return g
        return None

    # generator of J outside rad(I) means V(I) is not inside V(J)
    j_out = first_outside(J.generators, I, prime[0])
    i_out = first_outside(I.generators, J, prime[1])
    if j_out is None and i_out is None:
        return GermVerdict(GermStatus.Equal)
    if j_out is None:
        return GermVerdict(GermStatus.StrictlySmaller, i_out, J)
    if i_out is None:
        return GermVerdict(GermStatus.StrictlyLarger, j_out, I)
    return GermVerdict(GermStatus.Incomparable, j_out)


def pullback(I: IdealHandle, images: Sequence[Poly]) -> IdealHandle:
    """Ideal generated by ``g(images)`` for the generators ``g`` of ``I``."""
    ring = images[0].ring
    return IdealHandle(ring, [poly_compose(g, images) for g in I.generators])
