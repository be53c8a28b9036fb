"""Real-analytic submanifolds with polynomial defining functions, and their images.

A manifold lives in a paired ring ``(Z, Zbar)``; treating ``Zbar`` as
independent variables ``zeta`` gives the complexification for free.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

from . import linalg
from .germmap import (
    InfiniteMultiplicity,
    MapGerm,
    determinant,
    image_ideal,
    is_finite,
    jaccond_check,
    multiplicity,
    preimage_closure_equals,
)
from .ideals import (
    GermStatus,
    GermVerdict,
    IdealHandle,
    Inconclusive,
    Smooth,
    contains,
    eliminate,
    germ_set_equal,
    is_smooth_germ,
    radical_membership,
)
from .ring import I as IMAG
from .ring import ONE, ZERO, Poly, Ring, Scalar, poly_compose

HALF = Scalar(1, 0) / 2


def real_part(p: Poly) -> Poly:
    return (p + p.conj_swap()) * HALF


def imag_part(p: Poly) -> Poly:
    return (p - p.conj_swap()) * (IMAG * 2).inverse()


@dataclass(frozen=True)
class RealSubmanifold:
    """``{rho_1 = ... = rho_d = 0}`` through 0 in C^N, with real-valued ``rho``."""

    ring: Ring
    rho: Tuple[Poly, ...]

    def __post_init__(self):
        if not self.ring.pairs:
            raise ValueError("a real submanifold needs a paired ring (Z, Zbar)")
        rho = tuple(r.to_ring(self.ring) for r in self.rho)
        object.__setattr__(self, "rho", rho)
        for r in rho:
            if r.constant_term():
                raise ValueError(f"{r} does not vanish at 0")
            if r.conj_swap() != r:
                raise ValueError(f"{r} is not real-valued")
        full = [r.linear_part() for r in rho]
        if linalg.rank(full) != len(rho):
            raise ValueError("defining functions have dependent differentials at 0")

    @classmethod
    def from_complex_equations(cls, ring: Ring, eqs: Sequence[Poly]) -> "RealSubmanifold":
        """Real and imaginary parts of each equation ``p = 0``, dropping dependent ones."""
        cand = []
        for p in eqs:
            cand += [real_part(p), imag_part(p)]
        return cls(ring, tuple(_independent(cand, ring)))

    @property
    def N(self) -> int:
        return len(self.ring.pairs)

    @property
    def d(self) -> int:
        return len(self.rho)

    @property
    def Z(self) -> Tuple[str, ...]:
        return self.ring.holomorphic

    @property
    def Zbar(self) -> Tuple[str, ...]:
        return self.ring.antiholomorphic

    def dZ(self) -> List[List[Poly]]:
        return [[r.diff(v) for v in self.Z] for r in self.rho]

    def dZbar(self) -> List[List[Poly]]:
        return [[r.diff(v) for v in self.Zbar] for r in self.rho]

    def __str__(self):
        return "{" + ", ".join(map(str, self.rho)) + "}"


def _independent(polys: Sequence[Poly], ring: Ring) -> List[Poly]:
    chosen: List[Poly] = []
    rows: List[List[Scalar]] = []
    for p in polys:
        p = p.to_ring(ring)
        if not p:
            continue
        trial = rows + [p.linear_part()]
        if linalg.rank(trial) == len(trial):
            rows = trial
            chosen.append(p)
    return chosen


def _at_origin(p: Poly) -> Scalar:
    return p.constant_term()


def _eval0(mat: Sequence[Sequence[Poly]]) -> List[List[Scalar]]:
    return [[_at_origin(e) for e in row] for row in mat]


# ---------------------------------------------------------------------------
# complexification


@dataclass(frozen=True)
class ComplexifiedManifold:
    ideal: IdealHandle
    manifold: RealSubmanifold


def complexify_manifold(M: RealSubmanifold) -> ComplexifiedManifold:
    I = IdealHandle(M.ring, list(M.rho))
    for r in M.rho:
        if not contains(I, r.conj_swap()):
            raise AssertionError("complexified ideal is not reality-symmetric")
    return ComplexifiedManifold(I, M)


def conjugate_map_components(H: MapGerm, ring: Ring) -> List[Poly]:
    """``Hbar(zeta)``: coefficients conjugated, ``Z`` replaced by the partner of each variable."""
    pairs = ring.pairs
    zetas = [ring.var(pairs[n]) for n in H.source.names]
    return [poly_compose(c.conjugate_coefficients(), zetas) for c in H.components]


def complexify_map(H: MapGerm, ring: Optional[Ring] = None) -> MapGerm:
    """``(Z, zeta) -> (H(Z), Hbar(zeta))`` from ``ring`` to the paired target ring."""
    ring = ring or Ring.paired(H.source.names)
    if tuple(ring.holomorphic) != tuple(H.source.names):
        raise ValueError("map source variables must be the holomorphic variables of the ring")
    target = Ring.paired(H.target.names)
    hol = [c.to_ring(ring) for c in H.components]
    return MapGerm(ring, target, tuple(hol + conjugate_map_components(H, ring)))


def maps_into(M: RealSubmanifold, H: MapGerm, Mt: RealSubmanifold) -> bool:
    """Every defining function of ``Mt`` pulled back by the complexified map lies in the ideal of M."""
    cH = complexify_map(H, M.ring)
    if cH.target.names != Mt.ring.names:
        rho = [r.to_ring(cH.target) for r in Mt.rho]
    else:
        rho = list(Mt.rho)
    I = complexify_manifold(M).ideal
    return all(contains(I, poly_compose(r, list(cH.components))) for r in rho)


# ---------------------------------------------------------------------------
# genericity and CR dimension


def is_generic(M: RealSubmanifold) -> bool:
    return linalg.rank(_eval0(M.dZ())) == M.d


def _minors(mat: List[List[Poly]], r: int, ring: Ring):
    rows = range(len(mat))
    cols = range(len(mat[0]) if mat else 0)
    for R in itertools.combinations(rows, r):
        for C in itertools.combinations(cols, r):
            yield determinant([[mat[i][j] for j in C] for i in R], ring)


def _vanishes_on(p: Poly, I: IdealHandle, prime: bool) -> bool:
    if prime:
        return contains(I, p, local=True)
    return radical_membership(p, I, local=True)


def generic_rank(mat: List[List[Poly]], I: IdealHandle) -> int:
    """Largest size of a minor not vanishing identically on the germ of ``V(I)``."""
    prime = isinstance(is_smooth_germ(I), Smooth)
    top = min(len(mat), len(mat[0]) if mat else 0)
    for r in range(top, 0, -1):
        if any(not _vanishes_on(m, I, prime) for m in _minors(mat, r, I.ring)):
            return r
    return 0


@dataclass(frozen=True)
class CRProfile:
    cr_dim_at_0: int
    generic_cr_dim: int
    is_cr_at_0: bool


def cr_profile(M: RealSubmanifold) -> CRProfile:
    A = M.dZbar()
    at0 = M.N - linalg.rank(_eval0(A))
    gen = M.N - generic_rank(A, complexify_manifold(M).ideal)
    return CRProfile(at0, gen, at0 == gen)


# ---------------------------------------------------------------------------
# CR vector fields


@dataclass(frozen=True)
class CRVectorField:
    """Field ``sum a_k d/dv_k`` over all ring variables, tangent to M identically."""

    ring: Ring
    coefficients: Tuple[Poly, ...]

    def apply(self, p: Poly) -> Poly:
        out = self.ring.zero()
        for name, a in zip(self.ring.names, self.coefficients):
            if a:
                out = out + a * p.diff(name)
        return out

    def bracket(self, other: "CRVectorField") -> "CRVectorField":
        return CRVectorField(
            self.ring,
            tuple(self.apply(b) - other.apply(a) for a, b in zip(self.coefficients, other.coefficients)),
        )

    def conj_swap(self) -> "CRVectorField":
        ring = self.ring
        idx = {n: k for k, n in enumerate(ring.names)}
        partner = dict(ring.pairs)
        partner.update({b: a for a, b in ring.pairs.items()})
        coeffs = [None] * ring.nvars
        for k, n in enumerate(ring.names):
            coeffs[idx[partner[n]]] = self.coefficients[k].conj_swap()
        return CRVectorField(ring, tuple(coeffs))

    def at_origin(self) -> List[Scalar]:
        return [a.constant_term() for a in self.coefficients]

    def antiholomorphic_part(self) -> List[Poly]:
        return [self.coefficients[self.ring.index(n)] for n in self.ring.antiholomorphic]


def cr_vector_fields(M: RealSubmanifold) -> List[CRVectorField]:
    """Polynomial (0,1) fields ``L_1..L_n`` spanning ``T^{0,1}M`` near 0 (M generic)."""
    if not is_generic(M):
        raise ValueError("CR vector fields are built for generic manifolds only")
    A = M.dZbar()
    A0 = _eval0(A)
    d, N = M.d, M.N
    S = None
    for C in itertools.combinations(range(N), d):
        if linalg.rank([[A0[i][j] for j in C] for i in range(d)]) == d:
            S = C
            break
    assert S is not None
    ring = M.ring
    AS = [[A[i][j] for j in S] for i in range(d)]
    delta = determinant(AS, ring)
    # adjugate: adj[k][i] = (-1)^(i+k) det(AS without row i, column k)
    adj = [[ring.zero()] * d for _ in range(d)]
    for i in range(d):
        for k in range(d):
            minor = [[AS[r][c] for c in range(d) if c != k] for r in range(d) if r != i]
            val = determinant(minor, ring) if minor else ring.one()
            adj[k][i] = val if (i + k) % 2 == 0 else -val
    fields = []
    zb = M.Zbar
    for j in range(N):
        if j in S:
            continue
        coeffs = {zb[j]: delta}
        for a, k in enumerate(S):
            acc = ring.zero()
            for i in range(d):
                acc = acc + adj[a][i] * A[i][j]
            coeffs[zb[k]] = -acc
        vec = tuple(coeffs.get(n, ring.zero()) for n in ring.names)
        L = CRVectorField(ring, vec)
        for r in M.rho:
            if L.apply(r):
                raise AssertionError("constructed field is not tangent")
        fields.append(L)
    return fields


@dataclass(frozen=True)
class FiniteTypeAtOrder:
    order: int

    def __str__(self):
        return f"FiniteTypeAtOrder({self.order})"


@dataclass(frozen=True)
class NondegenerateAtOrder:
    order: int

    def __str__(self):
        return f"NondegenerateAtOrder({self.order})"


@dataclass(frozen=True)
class UndeterminedUpTo:
    K: int

    def __str__(self):
        return f"UndeterminedUpTo({self.K})"


def finite_type_check(M: RealSubmanifold, K: int = 6) -> Union[FiniteTypeAtOrder, UndeterminedUpTo]:
    """Span at 0 of brackets of length <= K of the (0,1) and (1,0) fields."""
    L = cr_vector_fields(M)
    base = L + [f.conj_swap() for f in L]
    target = 2 * M.N - M.d
    rows: List[List[Scalar]] = []
    level = base
    for k in range(1, K + 1):
        if k > 1:
            level = [a.bracket(b) for a in base for b in level]
            level = [f for f in level if any(c for c in f.coefficients)]
        rows += [f.at_origin() for f in level]
        if rows and linalg.rank(rows) >= target:
            return FiniteTypeAtOrder(k)
        if not level:
            break
    return UndeterminedUpTo(K)


def finitely_nondegenerate_check(M: RealSubmanifold, K: int = 6) -> Union[NondegenerateAtOrder, UndeterminedUpTo]:
    """Span at 0 of ``L^alpha`` applied to the rows of ``d rho / dZ``, ``|alpha| <= K``."""
    L = cr_vector_fields(M)
    level = M.dZ()
    rows = [[_at_origin(e) for e in row] for row in level]
    if linalg.rank(rows) == M.N:
        return NondegenerateAtOrder(0)
    for k in range(1, K + 1):
        level = [[f.apply(e) for e in row] for f in L for row in level]
        level = [row for row in level if any(row)]
        rows += [[_at_origin(e) for e in row] for row in level]
        if rows and linalg.rank(rows) == M.N:
            return NondegenerateAtOrder(k)
        if not level:
            break
    return UndeterminedUpTo(K)


# ---------------------------------------------------------------------------
# transversality


def _target_manifold(H: MapGerm, Mt: RealSubmanifold) -> List[List[Scalar]]:
    if tuple(Mt.Z) != tuple(H.target.names):
        raise ValueError("target manifold variables must match the map's target names")
    return _eval0(Mt.dZ())


def real_transversal(H: MapGerm, Mt: RealSubmanifold) -> bool:
    """``T_0 Mt + dH(R^2N) = R^2N``: ``v -> Re(P H'(0) v)`` must be onto ``R^d``."""
    P = _target_manifold(H, Mt)
    A = linalg.matmul(P, H.jacobian_at_origin())
    real = [[a.re for a in row] + [-a.im for a in row] for row in A]
    return linalg.rank(real) == Mt.d


def cr_transversal_check(H: MapGerm, Mt: RealSubmanifold) -> bool:
    """``T^{1,0}_0 Mt + dH(T^{1,0}_0 C^N) = T^{1,0}_0 C^N``."""
    if not cr_profile(Mt).is_cr_at_0:
        raise ValueError("target manifold is not CR at 0")
    P = _target_manifold(H, Mt)
    return linalg.rank(linalg.matmul(P, H.jacobian_at_origin())) == linalg.rank(P)


# ---------------------------------------------------------------------------
# condition (ii) and the report


def condition_ii_check(M: RealSubmanifold, H: MapGerm) -> GermVerdict:
    cH = complexify_map(H, M.ring)
    finite_H, finite_cH = is_finite(H), is_finite(cH)
    if finite_H != finite_cH:
        raise AssertionError("H and its complexification disagree on finiteness")
    if not finite_H:
        raise InfiniteMultiplicity(f"{H} is not finite")
    return preimage_closure_equals(cH, complexify_manifold(M).ideal)


def extract_real_image(img: IdealHandle, d: int) -> Optional[RealSubmanifold]:
    """Real defining functions for a smooth reality-symmetric complexified image of codimension d."""
    cert = is_smooth_germ(img)
    if not isinstance(cert, Smooth) or cert.codim != d:
        return None
    for g in img.generators:
        if g and not contains(img, g.conj_swap()):
            return None
    cand = []
    for g in sorted(img.generators, key=lambda p: (p.degree(), len(p))):
        if g:
            cand += [real_part(g), imag_part(g)]
    rho = _independent(cand, img.ring)
    if len(rho) != d:
        return None
    # d independent elements of a smooth codimension-d germ ideal cut out the same germ
    return RealSubmanifold(img.ring, tuple(rho))


def holomorphic_relations(M: RealSubmanifold) -> List[Poly]:
    """Holomorphic polynomials vanishing on M, found by eliminating ``Zbar``."""
    I = complexify_manifold(M).ideal
    out = eliminate(I, M.Zbar)
    return [g for g in out.generators if g]


@dataclass
class Thm11Report:
    H_finite: bool
    multiplicity: Optional[int]
    condition_ii: Optional[GermVerdict]
    image_ideal: Optional[IdealHandle]
    image_smooth: object
    image: Optional[RealSubmanifold]
    M_generic: bool
    M_finite_type: object
    M_holomorphic_relations: List[Poly]
    image_generic: Optional[bool]
    image_cr: Optional[CRProfile]
    image_finite_type: object
    real_transversal: Optional[bool]
    cr_transversal: Optional[bool]
    jacobian_rank: int
    corollary_bound: bool
    jaccond: Optional[bool]
    complex_transversal: Optional[bool]
    checks: Dict[str, str] = field(default_factory=dict)
    violations: List[str] = field(default_factory=list)

    @property
    def M_in_subvariety(self) -> bool:
        return bool(self.M_holomorphic_relations)

    @property
    def consistent(self) -> bool:
        return not self.violations


def theorem11_report(M: RealSubmanifold, H: MapGerm, K: int = 6) -> Thm11Report:
    d = M.d
    jr = linalg.rank(H.jacobian_at_origin())
    M_gen = is_generic(M)
    M_ft = finite_type_check(M, K) if M_gen else None
    rels = holomorphic_relations(M)
    rep = Thm11Report(
        H_finite=False, multiplicity=None, condition_ii=None, image_ideal=None, image_smooth=None,
        image=None, M_generic=M_gen, M_finite_type=M_ft, M_holomorphic_relations=rels,
        image_generic=None, image_cr=None, image_finite_type=None, real_transversal=None,
        cr_transversal=None, jacobian_rank=jr, corollary_bound=jr >= d, jaccond=None,
        complex_transversal=None,
    )
    cH = complexify_map(H, M.ring)
    rep.H_finite = is_finite(H)
    if rep.H_finite != is_finite(cH):
        rep.violations.append("H finite iff complexified H finite")
    if not rep.H_finite:
        return rep
    rep.multiplicity = multiplicity(H)
    X = complexify_manifold(M).ideal
    rep.condition_ii = preimage_closure_equals(cH, X)
    rep.image_ideal = image_ideal(cH, X)
    rep.image_smooth = is_smooth_germ(rep.image_ideal)
    rep.jaccond = jaccond_check(cH, X)
    if isinstance(rep.image_smooth, Smooth):
        from .germmap import transversal_at

        rep.complex_transversal = transversal_at(cH, rep.image_ideal)
    Mt = extract_real_image(rep.image_ideal, d)
    rep.image = Mt
    if Mt is not None:
        rep.image_generic = is_generic(Mt)
        rep.image_cr = cr_profile(Mt)
        rep.real_transversal = real_transversal(H, Mt)
        if rep.image_cr.is_cr_at_0:
            rep.cr_transversal = cr_transversal_check(H, Mt)
        if rep.image_generic:
            rep.image_finite_type = finite_type_check(Mt, K)
    _cross_validate(rep)
    return rep


def _cross_validate(rep: Thm11Report) -> None:
    eq = rep.condition_ii is not None and rep.condition_ii.status is GermStatus.Equal
    smooth = isinstance(rep.image_smooth, Smooth)
    c = rep.checks
    v = rep.violations

    def check(name: str, applicable: bool, holds: bool):
        if not applicable:
            c[name] = "n/a"
        elif holds:
            c[name] = "ok"
        else:
            c[name] = "violated"
            v.append(name)

    check("jaccond and (ii) => image smooth and transversal", bool(rep.jaccond and eq),
          smooth and bool(rep.complex_transversal))
    check("jaccond and image smooth and transversal => (ii)",
          bool(rep.jaccond and smooth and rep.complex_transversal), eq)
    check("(ii) <= transversal to image", rep.real_transversal is True, eq)
    check("(ii) => image submanifold and transversal (M in no subvariety)",
          eq and not rep.M_in_subvariety, rep.image is not None and rep.real_transversal is True)
    ft = isinstance(rep.M_finite_type, FiniteTypeAtOrder)
    generic_ft = rep.M_generic and ft
    img_generic = rep.image is not None and bool(rep.image_generic)
    check("(ii) <=> image submanifold and generic (M generic, finite type)", generic_ft,
          eq == img_generic)
    check("(ii) => image finite type and CR transversal (M generic, finite type)", generic_ft and eq,
          isinstance(rep.image_finite_type, FiniteTypeAtOrder) and rep.cr_transversal is True)
    check("corollary rank bound", generic_ft and eq, rep.corollary_bound)
    check("image generic => image CR at 0", rep.image_generic is True,
          rep.image_cr is not None and rep.image_cr.is_cr_at_0)
    check("real image smooth => complexified image smooth", rep.image is not None, smooth)
