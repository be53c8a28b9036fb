"""Finite holomorphic map germs (C^k, 0) -> (C^k, 0) with polynomial components."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from . import linalg
from .ideals import (
    INFINITE,
    GermStatus,
    GermVerdict,
    IdealHandle,
    Smooth,
    eliminate,
    germ_set_equal,
    ideals_equal,
    is_smooth_germ,
    local_membership,
    local_krull_dim,
    local_quotient_dim,
    pullback,
    radical_membership,
)
from .ring import DEGREVLEX, ONE, ZERO, MonomialOrder, Poly, Ring, Scalar, poly_compose


class InfiniteMultiplicity(ValueError):
    """The component ideal has an infinite local quotient: the germ is not finite."""


class HypothesisFailure(ValueError):
    """A precondition of the normal-form construction does not hold.

    ``hypothesis`` is one of ``smooth_X``, ``straighten``, ``finite``,
    ``jaccond``, ``preimage``, ``membership``, ``rank``, ``S0_in_R0``,
    ``g_polynomial``.
    """

    def __init__(self, hypothesis: str, detail: str = ""):
        self.hypothesis = hypothesis
        self.detail = detail
        super().__init__(f"{hypothesis}: {detail}" if detail else hypothesis)


@dataclass(frozen=True)
class MapGerm:
    source: Ring
    target: Ring
    components: Tuple[Poly, ...]

    def __post_init__(self):
        comps = tuple(c if c.ring == self.source else c.to_ring(self.source) for c in self.components)
        object.__setattr__(self, "components", comps)
        if len(comps) != self.target.nvars:
            raise ValueError("one component per target variable is required")
        if self.source.nvars != self.target.nvars:
            raise ValueError("source and target must have the same dimension")
        for c in comps:
            if c.constant_term():
                raise ValueError(f"component {c} does not vanish at 0")
        if set(self.source.names) & set(self.target.names):
            raise ValueError("source and target variable names must be distinct")

    @classmethod
    def build(cls, source: Ring, components: Sequence[Poly], target_names: Optional[Sequence[str]] = None):
        names = list(target_names) if target_names else [n + "_t" for n in source.names]
        return cls(source, Ring(names), tuple(components))

    @property
    def k(self) -> int:
        return self.source.nvars

    def ideal(self) -> IdealHandle:
        return IdealHandle(self.source, self.components)

    def jacobian(self) -> List[List[Poly]]:
        return [[c.diff(v) for v in self.source.names] for c in self.components]

    def jacobian_at_origin(self) -> List[List[Scalar]]:
        return [c.linear_part() for c in self.components]

    def jacobian_determinant(self) -> Poly:
        return determinant(self.jacobian(), self.source)

    def compose_after(self, inner: Sequence[Poly]) -> "MapGerm":
        """``self`` precomposed with the source substitution ``inner``."""
        return MapGerm(inner[0].ring, self.target, tuple(poly_compose(c, inner) for c in self.components))

    def __str__(self):
        return "[" + ", ".join(map(str, self.components)) + "]"


def determinant(m: Sequence[Sequence[Poly]], ring: Ring) -> Poly:
    """Laplace expansion with memoised minors; fine for k <= 8."""
    n = len(m)
    memo: Dict[Tuple[int, Tuple[int, ...]], Poly] = {}

    def det(row: int, cols: Tuple[int, ...]) -> Poly:
        if row == n:
            return ring.one()
        key = (row, cols)
        if key in memo:
            return memo[key]
        acc = ring.zero()
        for k, c in enumerate(cols):
            a = m[row][c]
            if a.is_zero():
                continue
            minor = det(row + 1, cols[:k] + cols[k + 1:])
            term = a * minor
            acc = acc + term if k % 2 == 0 else acc - term
        memo[key] = acc
        return acc

    return det(0, tuple(range(n)))


def identity_map(source: Ring, target_names: Optional[Sequence[str]] = None) -> MapGerm:
    return MapGerm.build(source, source.gens(), target_names)


# ---------------------------------------------------------------------------
# finiteness and multiplicity


def is_finite(f: MapGerm) -> bool:
    return local_quotient_dim(f.ideal()) is not INFINITE


def multiplicity(f: MapGerm) -> int:
    m = local_quotient_dim(f.ideal())
    if m is INFINITE:
        raise InfiniteMultiplicity(f"{f} is not finite at 0")
    return m


def jaccond_check(f: MapGerm, X: IdealHandle) -> bool:
    """True iff the Jacobian determinant does not vanish identically on the germ X."""
    det = f.jacobian_determinant()
    return not radical_membership(det, X, local=True)


# ---------------------------------------------------------------------------
# images and preimages


def _graph_ring(f: MapGerm) -> Ring:
    return Ring(f.source.names + f.target.names)


def image_ideal(f: MapGerm, X: IdealHandle) -> IdealHandle:
    """Ideal of ``f(X)``: eliminate the source variables from the graph of ``f|X``."""
    if not is_finite(f):
        raise InfiniteMultiplicity(f"image of a non-finite germ {f}")
    big = _graph_ring(f)
    gens = [big.var(t) - c.to_ring(big) for t, c in zip(f.target.names, f.components)]
    gens += [g.to_ring(big) for g in X.generators if g]
    out = eliminate(IdealHandle(big, gens), f.source.names)
    img = IdealHandle(f.target, [g.to_ring(f.target) for g in out.generators])
    # f(X) has the dimension of X, so r independent differentials with
    # dim X = k - r pin V(img) down to the smooth germ they cut out
    r = linalg.rank([g.linear_part() for g in img.generators if g] or [[ZERO] * f.k])
    if r and local_krull_dim(X) == f.k - r:
        img.certificate = Smooth(r)
    return img


def preimage_ideal(f: MapGerm, Y: IdealHandle) -> IdealHandle:
    return pullback(Y, list(f.components))


def preimage_closure_equals(f: MapGerm, X: IdealHandle) -> GermVerdict:
    """Compare ``f^-1(f(X))`` with ``X`` as germs of sets at 0.

    For finite ``f`` the germ ``f^-1(f(X))`` is the projection of the fiber
    product ``{(z, z') : z' in X, f(z) = f(z')}`` at the origin, so ``X``
    equals it iff every generator of ``X`` vanishes on that fiber product.
    """
    if not is_finite(f):
        raise InfiniteMultiplicity(f"preimage comparison for a non-finite germ {f}")
    src = f.source
    primed = [_fresh(src, n + "'") for n in src.names]
    big = Ring(src.names + tuple(primed))
    shift = [big.var(n) for n in primed]
    gens = [poly_compose(g, shift) for g in X.generators if g]
    gens += [c.to_ring(big) - poly_compose(c, shift) for c in f.components]
    fiber = IdealHandle(big, gens)
    for g in X.generators:
        if g and not radical_membership(g.to_ring(big), fiber, local=True):
            return GermVerdict(GermStatus.StrictlyLarger, g, lambda: preimage_ideal(f, image_ideal(f, X)))
    return GermVerdict(GermStatus.Equal)


def _fresh(ring: Ring, name: str) -> str:
    while name in ring:
        name += "'"
    return name


def independent_generators(gens: Sequence[Poly]) -> List[Poly]:
    """Greedy choice, low degree first, of elements with independent differentials at 0."""
    chosen: List[Poly] = []
    rows: List[List[Scalar]] = []
    for g in sorted((g for g in gens if g), key=lambda p: (p.degree(), len(p), p.render())):
        trial = rows + [g.linear_part()]
        if linalg.rank(trial) == len(trial):
            rows = trial
            chosen.append(g)
    return chosen


# ---------------------------------------------------------------------------
# straightening and the coordinate split


@dataclass
class Straightening:
    """Source coordinates in which X becomes ``{y = 0}``.

    ``substitution`` expresses the old source variables in the new ones;
    ``y`` lists the new variables cutting out X.
    """

    substitution: List[Poly]
    y: List[str]

    @property
    def ring(self) -> Ring:
        return self.substitution[0].ring


def coordinate_subspace(X: IdealHandle) -> Optional[List[str]]:
    """Names ``y`` with ``X == <y>`` (as ideals), or None."""
    names = []
    for g in X.generators:
        if g.is_zero():
            continue
        vs = g.variables()
        if len(vs) != 1 or g.degree() != 1 or len(g) != 1:
            names = None
            break
        names.append(vs[0])
    if names is not None:
        return sorted(set(names), key=X.ring.index)
    basis = X.standard_basis(DEGREVLEX)
    names = []
    for g in basis:
        vs = g.variables()
        if len(vs) != 1 or g.degree() != 1 or len(g) != 1:
            return None
        names.append(vs[0])
    return sorted(set(names), key=X.ring.index)


def straighten(X: IdealHandle) -> Straightening:
    """Polynomial coordinates making a smooth X a coordinate subspace.

    Handles X generated by graphs ``y_l = h_l(x)`` after a linear change:
    the linear parts pick ``y``; a lex basis with ``y`` first must then be
    ``{y_l - h_l(x)}``.
    """
    ring = X.ring
    ys = coordinate_subspace(X)
    if ys is not None:
        return Straightening(ring.gens(), ys)
    cert = is_smooth_germ(X)
    if not isinstance(cert, Smooth):
        raise HypothesisFailure("smooth_X", f"{X} is not certified smooth ({cert})")
    rows = [g.linear_part() for g in X.generators if g]
    ech, piv = linalg.row_echelon(rows)
    ys = [ring.names[c] for c in piv]
    xs = [n for n in ring.names if n not in ys]
    order = MonomialOrder.block((len(ys), MonomialOrder("lex")), (len(xs), DEGREVLEX))
    big = Ring(ys + xs)
    basis = IdealHandle(big, [g.to_ring(big) for g in X.generators]).standard_basis(order)
    graph: Dict[str, Poly] = {}
    for g in basis:
        lm = g.lm(order)
        lead_vars = [big.names[k] for k, a in enumerate(lm) if a]
        if len(lead_vars) != 1 or sum(lm) != 1 or lead_vars[0] not in ys:
            raise HypothesisFailure("straighten", f"{X} is not a polynomial graph over the chosen x")
        y = lead_vars[0]
        rest = g - big.var(y) * g.lc(order)
        if any(rest.degree_in(v) > 0 for v in ys):
            raise HypothesisFailure("straighten", f"{X} is not a polynomial graph over the chosen x")
        graph[y] = -(rest * g.lc(order).inverse())
    if set(graph) != set(ys):
        raise HypothesisFailure("straighten", "graph basis incomplete")
    # new coordinates keep names; old y = new y + h(x)
    subst = []
    for n in ring.names:
        if n in graph:
            subst.append(ring.var(n) + graph[n].to_ring(ring))
        else:
            subst.append(ring.var(n))
    return Straightening(subst, ys)


def _target_normalizer(jy: List[List[Scalar]]) -> List[List[Scalar]]:
    """Invertible T with ``T @ jy == [[0], [I_q]]``; raises on rank deficiency."""
    k = len(jy)
    q = len(jy[0]) if jy else 0
    if linalg.rank(jy) != q:
        raise HypothesisFailure("rank", "df/dy(0) does not have rank q")
    cols = [[jy[r][c] for r in range(k)] for c in range(q)]
    chosen: List[List[Scalar]] = []
    for j in range(k):
        if len(chosen) == k - q:
            break
        e = [ONE if r == j else ZERO for r in range(k)]
        if linalg.rank(chosen + [e] + cols) == len(chosen) + 1 + q:
            chosen.append(e)
    basis_cols = chosen + cols
    B = linalg.transpose(basis_cols)
    ech, piv = linalg.row_echelon([row + [ONE if i == j else ZERO for j in range(k)] for i, row in enumerate(B)])
    return [row[k:] for row in ech]


@dataclass
class SplitMap:
    """``f = (R, S)`` after a linear target change, with R = R0 + R1 y, S = y + S0 + S1 y."""

    x: List[str]
    y: List[str]
    xi: List[str]
    eta: List[str]
    transform: List[List[Scalar]]
    R: List[Poly]
    S: List[Poly]
    R0: List[Poly]
    S0: List[Poly]
    R1: List[List[Poly]]
    S1: List[List[Poly]]
    x_ring: Ring


def _split_by_y(p: Poly, ys_idx: List[int]) -> List[Poly]:
    """Write ``p`` (vanishing on y = 0) as ``sum_l c_l * y_l``, first y dividing each term."""
    parts: List[Dict] = [dict() for _ in ys_idx]
    for e, c in p.terms.items():
        for l, k in enumerate(ys_idx):
            if e[k]:
                ne = list(e)
                ne[k] -= 1
                parts[l][tuple(ne)] = c
                break
        else:
            raise ValueError(f"{p} has a term free of y")
    return [Poly(p.ring, d) for d in parts]


def split_target(f: MapGerm, y: Sequence[str]) -> SplitMap:
    ring = f.source
    ys_idx = [ring.index(v) for v in y]
    xs = [n for n in ring.names if n not in set(y)]
    q = len(ys_idx)
    p = f.k - q
    J0 = f.jacobian_at_origin()
    jy = [[row[k] for k in ys_idx] for row in J0]
    T = _target_normalizer(jy)
    comps = [sum((c * T[i][j] for j, c in enumerate(f.components)), ring.zero()) for i in range(f.k)]
    R, S = comps[:p], comps[p:]
    zero_y = {v: ring.zero() for v in y}
    R0 = [r.subs(zero_y) for r in R]
    S0 = [s.subs(zero_y) for s in S]
    R1 = [_split_by_y(r - r0, ys_idx) for r, r0 in zip(R, R0)]
    S1 = []
    for l, (s, s0) in enumerate(zip(S, S0)):
        row = _split_by_y(s - s0 - ring.var(y[l]), ys_idx) if (s - s0 - ring.var(y[l])) else [ring.zero()] * q
        S1.append(row)
    for row in R1 + S1:
        for e in row:
            if e.constant_term():
                raise HypothesisFailure("rank", "normalization left a constant in R1/S1")
    x_ring = Ring(xs)
    tn = f.target.names
    return SplitMap(
        x=xs,
        y=list(y),
        xi=list(tn[:p]),
        eta=list(tn[p:]),
        transform=T,
        R=R,
        S=S,
        R0=[r.to_ring(x_ring) for r in R0],
        S0=[s.to_ring(x_ring) for s in S0],
        R1=R1,
        S1=S1,
        x_ring=x_ring,
    )


@dataclass
class CoordinateMembership:
    """``u_l * y_l = sum_j A_lj R_j + sum_j B_lj S_j`` with local units ``u_l``."""

    units: List[Poly]
    A: List[List[Poly]]
    B: List[List[Poly]]
    split: SplitMap

    def B0_at_origin(self) -> List[List[Scalar]]:
        return [[b.constant_term() / u.constant_term() for b in row] for row, u in zip(self.B, self.units)]


def coordinate_membership(f: MapGerm, y: Sequence[str]) -> Optional[CoordinateMembership]:
    """Local cofactors for each ``y_l`` in ``I(f)``, or None when some ``y_l`` is outside."""
    I = f.ideal()
    for v in y:
        if local_membership(f.source.var(v), I) is None:
            return None
    sm = split_target(f, y)
    J = IdealHandle(f.source, sm.R + sm.S)
    p = len(sm.R)
    units, A, B = [], [], []
    for v in y:
        u, cof = local_membership(f.source.var(v), J)
        units.append(u)
        A.append(cof[:p])
        B.append(cof[p:])
    cm = CoordinateMembership(units, A, B, sm)
    q = len(y)
    b0 = cm.B0_at_origin()
    if any(b0[i][j] != (1 if i == j else 0) for i in range(q) for j in range(q)):
        raise AssertionError("B0(0) is not the identity")
    return cm


# ---------------------------------------------------------------------------
# g with S0 = g(R0)


def _xi_ring(sm: SplitMap) -> Ring:
    return Ring(sm.xi)


def fiber_algebra(components: Sequence[Poly], target: Ring):
    """Free basis of ``C[x, w]/<f(x) - w>`` over ``C[w]`` and a reducer.

    Returns ``(big_ring, basis_monomials, reduce)`` or None when the quotient
    is not free with constant leading coefficients in x.
    """
    src = components[0].ring
    big = Ring(src.names + target.names)
    n = src.nvars
    gens = [big.var(w) - c.to_ring(big) for w, c in zip(target.names, components)]
    order = MonomialOrder.block((n, DEGREVLEX), (target.nvars, DEGREVLEX))
    I = IdealHandle(big, gens)
    basis = I.standard_basis(order)
    leads = []
    for g in basis:
        lm = g.lm(order)
        if not any(lm[:n]):
            return None
        if any(lm[n:]):
            return None
        leads.append(lm[:n])
    bounds = []
    for k in range(n):
        pure = [e[k] for e in leads if e[k] and sum(e) == e[k]]
        if not pure:
            return None
        bounds.append(min(pure))
    mons = [
        m
        for m in itertools.product(*(range(b) for b in bounds))
        if not any(all(a <= b for a, b in zip(e, m)) for e in leads)
    ]

    from .ideals import reduce_modulo

    def reduce(p: Poly) -> Poly:
        return reduce_modulo(p.to_ring(big), I, order)

    return big, mons, reduce


def multiplication_matrix(big: Ring, mons, reduce, factor: Poly, target: Ring) -> List[List[Poly]]:
    """Matrix over ``C[w]`` of multiplication by ``factor`` on the free basis ``mons``."""
    n = factor.ring.nvars
    index = {m: k for k, m in enumerate(mons)}
    M = [[target.zero() for _ in mons] for _ in mons]
    fac = factor.to_ring(big)
    for col, m in enumerate(mons):
        prod = reduce(fac * big.monomial(tuple(m) + (0,) * target.nvars))
        buckets: Dict[int, Dict] = {}
        for e, c in prod.terms.items():
            xm = e[:n]
            if xm not in index:
                raise ValueError("reduction left the free basis")
            buckets.setdefault(index[xm], {})[e[n:]] = c
        for row, terms in buckets.items():
            M[row][col] = Poly(target, terms)
    return M


def compute_g(sm: SplitMap, m: Optional[int] = None) -> List[Poly]:
    """``g`` with ``S0 = g(R0)``: fiber average of S0 by traces, with a linear-algebra fallback."""
    xr = sm.x_ring
    xi_ring = _xi_ring(sm)
    if all(s.is_zero() for s in sm.S0):
        return [xi_ring.zero() for _ in sm.S0]
    R0 = MapGerm(xr, xi_ring, tuple(sm.R0))
    mult = local_quotient_dim(R0.ideal())
    if mult is INFINITE:
        raise HypothesisFailure("finite", "R0 is not finite")
    if m is not None and mult != m:
        raise HypothesisFailure("jaccond", f"R0 has multiplicity {mult}, expected {m}")
    IR0 = R0.ideal()
    for s in sm.S0:
        if local_membership(s, IR0) is None:
            raise HypothesisFailure("S0_in_R0", f"{s} is not in I(R0)")
    g = _g_by_trace(sm, xi_ring, mult)
    if g is None or any(poly_compose(gl, sm.R0) != s for gl, s in zip(g, sm.S0)):
        g = _g_by_linear_algebra(sm, xi_ring)
    if g is None:
        raise HypothesisFailure("g_polynomial", "no polynomial g with S0 = g(R0) up to deg S0")
    return g


def _g_by_trace(sm: SplitMap, xi_ring: Ring, mult: int) -> Optional[List[Poly]]:
    fa = fiber_algebra(sm.R0, xi_ring)
    if fa is None:
        return None
    big, mons, reduce = fa
    if len(mons) != mult:
        return None
    out = []
    for s in sm.S0:
        M = multiplication_matrix(big, mons, reduce, s, xi_ring)
        tr = sum((M[k][k] for k in range(len(mons))), xi_ring.zero())
        out.append(tr * Scalar(1) / len(mons))
    return out


def _g_by_linear_algebra(sm: SplitMap, xi_ring: Ring) -> Optional[List[Poly]]:
    out = []
    p = xi_ring.nvars
    for s in sm.S0:
        found = None
        for d in range(1, max(s.degree(), 1) + 1):
            mons = [e for deg in range(1, d + 1) for e in _exponents(p, deg)]
            images = [poly_compose(xi_ring.monomial(e), sm.R0) for e in mons]
            keys = sorted({t for im in images for t in im.terms} | set(s.terms))
            rows = [[im.coefficient(t) for im in images] for t in keys]
            rhs = [s.coefficient(t) for t in keys]
            sol = linalg.solve(rows, rhs) if rows else None
            if sol is not None:
                found = Poly.from_terms(xi_ring, [(e, c) for e, c in zip(mons, sol) if c])
                break
        if found is None:
            return None
        out.append(found)
    return out


def _exponents(n: int, d: int):
    if n == 1:
        yield (d,)
        return
    for a in range(d, -1, -1):
        for rest in _exponents(n - 1, d - a):
            yield (a,) + rest


# ---------------------------------------------------------------------------
# the normal-form pipeline


@dataclass
class NormalFormResult:
    straightening: Straightening
    split: SplitMap
    g: List[Poly]
    target_change: List[Poly]
    final_map: MapGerm
    image_ideal: IdealHandle
    multiplicity: int
    certificate: object = None


def normal_form_along_X(f: MapGerm, X: IdealHandle) -> NormalFormResult:
    """Constructive normal form of ``f`` along a smooth X.

    Raises :class:`HypothesisFailure` naming the first hypothesis that breaks.
    """
    st = straighten(X)
    fs = f.compose_after(st.substitution)
    Xs = IdealHandle(st.ring, [st.ring.var(v) for v in st.y])
    if not is_finite(fs):
        raise HypothesisFailure("finite", f"{f} is not finite")
    m = multiplicity(fs)
    if not jaccond_check(fs, Xs):
        raise HypothesisFailure("jaccond", "det df vanishes identically on X")
    verdict = preimage_closure_equals(fs, Xs)
    if verdict.status is not GermStatus.Equal:
        raise HypothesisFailure("preimage", f"f^-1(f(X)) is {verdict.status} than X")
    cm = coordinate_membership(fs, st.y)
    if cm is None:
        raise HypothesisFailure("membership", "some y_l is not in I(f)")
    sm = cm.split
    g = compute_g(sm, m)
    # target change: w -> T w, then eta' = eta - g(xi)
    tr = f.target
    Tw = [sum((tr.var(w) * sm.transform[i][j] for j, w in enumerate(tr.names)), tr.zero()) for i in range(f.k)]
    p = len(sm.x)
    xi_block = Tw[:p]
    g_of_xi = [poly_compose(gl.to_ring(Ring(sm.xi)), xi_block) for gl in g]
    change = xi_block + [e - gx for e, gx in zip(Tw[p:], g_of_xi)]
    new_names = [n + "'" for n in tr.names]
    new_target = Ring(new_names)
    final = MapGerm(fs.source, new_target, tuple(poly_compose(c, list(fs.components)) for c in change))
    ys_idx = [fs.source.index(v) for v in st.y]
    for l, comp in enumerate(final.components[p:]):
        for e in comp.terms:
            if not any(e[k] for k in ys_idx):
                raise AssertionError(f"eta'-component {comp} not in <y>")
        lin = comp.linear_part()
        for j, k in enumerate(ys_idx):
            if lin[k] != (1 if j == l else 0):
                raise AssertionError("eta'-block is not y + O(2)y")
    img = IdealHandle(new_target, [new_target.var(n) for n in new_names[p:]])
    check = image_ideal(final, Xs)
    if not germ_set_equal(check, img):
        raise AssertionError("computed image differs from <eta'>")
    return NormalFormResult(st, sm, g, change, final, img, m, is_smooth_germ(img))


def transversal_at(f: MapGerm, W) -> bool:
    """``T_0 W + df(0)(C^k) = C^k`` for a smooth complex germ W (or a real submanifold)."""
    if not isinstance(W, IdealHandle):
        from .crgeom import real_transversal

        return real_transversal(f, W)
    cert = is_smooth_germ(W)
    if not isinstance(cert, Smooth):
        raise ValueError(f"W is not certified smooth ({cert})")
    rows = [g.linear_part() for g in W.generators if g]
    ech, _ = linalg.row_echelon(rows)
    prod = linalg.matmul(ech, f.jacobian_at_origin())
    return linalg.rank(prod) == cert.codim


def restricted_multiplicity(f: MapGerm, y: Sequence[str]) -> object:
    """``dim C{x}/I(f(x,0))`` for X = {y = 0}."""
    xs = [n for n in f.source.names if n not in set(y)]
    xr = Ring(xs)
    zero = {v: f.source.zero() for v in y}
    comps = [c.subs(zero).to_ring(xr) for c in f.components]
    return local_quotient_dim(IdealHandle(xr, comps))
