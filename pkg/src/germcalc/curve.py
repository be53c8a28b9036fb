"""Images of smooth curves under finite germs, and the symmetric-function toolkit.

A curve X = {w = 0} is restricted to a parametrised germ t -> f(t, 0),
normalised so its first component is exactly t^m; the gcd of m with the
supports of the other components decides whether f(X) is smooth.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Dict, List, Optional, Sequence, Tuple

from gmpy2 import mpq

from .germmap import (
    HypothesisFailure,
    MapGerm,
    fiber_algebra,
    multiplicity,
    multiplication_matrix,
    image_ideal,
    preimage_closure_equals,
)
from .ideals import GermStatus, GermVerdict, IdealHandle, Smooth, is_smooth_germ
from .ring import ONE, ZERO, LEX, Poly, Ring, Scalar, TruncatedSeries, exact_divide, poly_compose, series_root


class TruncationError(ValueError):
    """The truncation degree is too small to determine an invariant; ``needed`` is a sufficient D."""

    def __init__(self, msg: str, needed: Optional[int] = None):
        super().__init__(msg)
        self.needed = needed


@dataclass
class CurveGerm:
    """Normalised restriction ``t -> (t^m, gamma_2(t), ...)`` through degree D.

    ``permutation[k]`` is the original index of component k; ``scale`` is the
    factor applied to the first component; ``reparam`` gives the old curve
    parameter as a series in t; ``exact`` is True when no truncation happened.
    """

    components: Tuple[TruncatedSeries, ...]
    D: int
    m: int
    permutation: Tuple[int, ...]
    scale: Scalar
    reparam: TruncatedSeries
    exact: bool

    def is_normalized(self) -> bool:
        return self.components[0] == TruncatedSeries.monomial(self.m, 1, self.D)


def _curve_variable(f: MapGerm, y: Sequence[str]) -> str:
    rest = [n for n in f.source.names if n not in set(y)]
    if len(rest) != 1:
        raise ValueError("X must be a curve {y = 0} with exactly one free coordinate")
    return rest[0]


def restrict(f: MapGerm, y: Sequence[str]) -> List[Poly]:
    z = _curve_variable(f, y)
    ring = Ring([z])
    zero = {v: f.source.zero() for v in y}
    return [c.subs(zero).to_ring(ring) for c in f.components]


def restrict_and_normalize(f: MapGerm, y: Sequence[str], D: int = TruncatedSeries.DEFAULT_D) -> CurveGerm:
    polys = restrict(f, y)
    if all(p.is_zero() for p in polys):
        raise ValueError("f vanishes identically on X")
    series = [TruncatedSeries.from_poly(p, D, "t") for p in polys]
    orders = [s.order() for s in series]
    if all(o is None for o in orders):
        raise TruncationError(f"all components vanish through degree {D}")
    m = min(o for o in orders if o is not None)
    lead = orders.index(m)
    perm = (lead,) + tuple(k for k in range(len(series)) if k != lead)
    series = [series[k] for k in perm]
    polys = [polys[k] for k in perm]
    a = series[0][m]
    scale = a.inverse()
    first = series[0] * scale
    wide = TruncatedSeries.from_poly(polys[0], D + m, "t") * scale
    v = TruncatedSeries(wide.shift_down(m).coeffs[: D + 1], D, "t")
    exact_input = all(p.degree() <= D for p in polys)
    if v == TruncatedSeries.monomial(0, 1, D):
        reparam = TruncatedSeries.monomial(1, 1, D)
        comps = [first] + series[1:]
        exact = exact_input
    else:
        u = series_root(v, m)
        s_of_z = TruncatedSeries.monomial(1, 1, D) * u
        reparam = s_of_z.reversion()
        comps = [TruncatedSeries.monomial(m, 1, D)] + [s.compose(reparam) for s in series[1:]]
        exact = False
    return CurveGerm(tuple(comps), D, m, perm, scale, reparam, exact)


@dataclass(frozen=True)
class GcdResult:
    q: int
    stabilized_at: int

    def __int__(self):
        return self.q


def support_gcd_q(gamma: CurveGerm, p: Optional[int] = None) -> GcdResult:
    """gcd of m with every exponent carrying a nonzero coefficient, up to D."""
    if not gamma.is_normalized():
        raise ValueError("curve germ is not normalised (first component must be t^m)")
    q = gamma.m
    at = gamma.m
    for d in range(gamma.m + 1, gamma.D + 1):
        if any(s[d] for s in gamma.components[1:]):
            nq = math.gcd(q, d)
            if nq != q:
                q, at = nq, d
    if not gamma.exact and q != 1 and p is not None and gamma.D < gamma.m + q * (p + 1):
        raise TruncationError(
            f"gcd {q} could still drop: need D >= {gamma.m + q * (p + 1)}, have {gamma.D}",
            gamma.m + q * (p + 1),
        )
    return GcdResult(q, at)


def factor_through_power(gamma: CurveGerm, q: int) -> List[TruncatedSeries]:
    """``h_j`` with ``gamma_j(t) = h_j(t^q)`` (through degree D // q)."""
    out = []
    for s in gamma.components:
        if any(s[d] for d in range(gamma.D + 1) if d % q):
            raise ValueError(f"component is not a series in t^{q}")
        out.append(TruncatedSeries([s[q * k] for k in range(gamma.D // q + 1)], gamma.D // q, s.var))
    return out


class CurveVerdict(enum.Enum):
    SmoothImage = "SmoothImage"
    PreimageStrictlyLarger = "PreimageStrictlyLarger"

    def __str__(self):
        return self.value


@dataclass
class CurveDecision:
    verdict: CurveVerdict
    m: int
    q: int
    gamma: CurveGerm
    preimage: Optional[GermVerdict] = None
    image: Optional[IdealHandle] = None
    image_certificate: object = None


def curve_image_decision(f: MapGerm, y: Sequence[str], D: int = TruncatedSeries.DEFAULT_D, cross_check: bool = True) -> CurveDecision:
    p = multiplicity(f)
    gamma = restrict_and_normalize(f, y, D)
    q = support_gcd_q(gamma, p).q
    verdict = CurveVerdict.SmoothImage if q == gamma.m else CurveVerdict.PreimageStrictlyLarger
    dec = CurveDecision(verdict, gamma.m, q, gamma)
    if cross_check:
        X = IdealHandle(f.source, [f.source.var(v) for v in y])
        dec.image = image_ideal(f, X)
        dec.preimage = preimage_closure_equals(f, X)
        dec.image_certificate = is_smooth_germ(dec.image)
        if q < gamma.m and dec.preimage.status is GermStatus.Equal:
            raise AssertionError("q < m but the preimage equals X: impossible by the gcd criterion")
        if dec.preimage.status is GermStatus.Equal and not isinstance(dec.image_certificate, Smooth):
            raise AssertionError("preimage equals X but the image is not certified smooth")
    return dec


# ---------------------------------------------------------------------------
# symmetric functions of fibers


@dataclass
class SymmetricFiberData:
    """Characteristic polynomials of the source coordinates over the fiber algebra.

    ``char_polys[i]`` lives in ``target + (x,)``; ``F[j-1][i]`` is the
    coefficient of ``x^(p-j)`` in ``char_polys[i]``.
    """

    p: int
    char_polys: List[Poly]
    F: List[List[Poly]]
    ring: Ring


def charpoly(M: List[List[Poly]], ring: Ring, var: str = "x") -> Poly:
    """``det(x I - M)`` via traces of powers and Newton's identities."""
    n = len(M)
    big = Ring(ring.names + (var,))
    Mb = [[e.to_ring(big) for e in row] for row in M]
    power = Mb
    traces = []
    for k in range(1, n + 1):
        traces.append(sum((power[i][i] for i in range(n)), big.zero()))
        if k < n:
            power = [[sum((power[i][l] * Mb[l][j] for l in range(n)), big.zero()) for j in range(n)] for i in range(n)]
    e = [big.one()]
    for k in range(1, n + 1):
        acc = big.zero()
        for i in range(1, k + 1):
            term = e[k - i] * traces[i - 1]
            acc = acc + term if i % 2 == 1 else acc - term
        e.append(acc * Scalar(mpq(1, k)))
    x = big.var(var)
    out = big.zero()
    for k in range(n + 1):
        term = e[k] * x ** (n - k)
        out = out + term if k % 2 == 0 else out - term
    return out


def symmetric_fiber_maps(f: MapGerm, var: str = "x") -> SymmetricFiberData:
    p = multiplicity(f)
    fa = fiber_algebra(list(f.components), f.target)
    if fa is None:
        raise HypothesisFailure("free", "fiber algebra is not free with polynomial multiplication matrices")
    big, mons, reduce_ = fa
    if len(mons) != p:
        raise HypothesisFailure(
            "free", f"global fiber degree {len(mons)} differs from the local multiplicity {p}"
        )
    if var in f.target:
        raise ValueError(f"auxiliary variable {var!r} clashes with target names")
    chars = []
    for v in f.source.names:
        M = multiplication_matrix(big, mons, reduce_, f.source.var(v), f.target)
        chars.append(charpoly(M, f.target, var))
    ring = chars[0].ring
    k = ring.index(var)
    F = []
    for j in range(1, p + 1):
        row = []
        for cp in chars:
            coeff = Poly(ring, {e[:k] + (0,) + e[k + 1:]: c for e, c in cp.terms.items() if e[k] == p - j})
            row.append(coeff.to_ring(f.target))
        F.append(row)
    for row in F:
        for c in row:
            if c.constant_term():
                raise AssertionError("symmetric fiber function does not vanish at 0")
    return SymmetricFiberData(p, chars, F, ring)


@dataclass
class WeierstrassData:
    R: Poly
    coefficients: List[Scalar]
    homogeneous: bool
    zero_is_root: bool


def weierstrass_along_curve(
    f: MapGerm, y: Sequence[str], data: Optional[SymmetricFiberData] = None, t: str = "t", x: str = "x"
) -> WeierstrassData:
    """``R(t, x) = P(f(t, 0), x)`` for the characteristic polynomial of the curve coordinate."""
    data = data or symmetric_fiber_maps(f, x)
    z = _curve_variable(f, y)
    idx = f.source.index(z)
    P = data.char_polys[idx]
    tr = Ring([t, x])
    curve = restrict(f, y)
    images = [c.to_ring(Ring([z])) for c in curve]
    images = [poly_compose(c, [tr.var(t)]) for c in images] + [tr.var(x)]
    R = poly_compose(P, images)
    p = data.p
    coeffs = []
    homog = True
    for j in range(1, p + 1):
        coeffs.append(R.coefficient((j, p - j)))
    for (a, b), c in R.terms.items():
        if a + b != p:
            homog = False
    zero_root = not any(b == 0 for (_, b) in R.terms)
    return WeierstrassData(R, coeffs, homog, zero_root)


@dataclass
class SeparatingFunction:
    j: int
    c: Scalar
    F: List[Poly]


def find_separating_function(f: MapGerm, y: Sequence[str], D: int = TruncatedSeries.DEFAULT_D) -> SeparatingFunction:
    """Least ``j <= q`` with ``F^j(f(t,0)) = (c t^j, 0, ...)`` and ``c != 0``."""
    X = IdealHandle(f.source, [f.source.var(v) for v in y])
    verdict = preimage_closure_equals(f, X)
    if verdict.status is not GermStatus.Equal:
        raise HypothesisFailure("preimage", f"f^-1(f(X)) is {verdict.status} than X")
    gamma = restrict_and_normalize(f, y, D)
    if gamma.permutation[0] != 0 or gamma.scale != 1 or not gamma.exact or gamma.reparam != TruncatedSeries.monomial(1, 1, D):
        raise ValueError("f(z, 0) must already be (z^m, ...) in the given coordinates")
    q = support_gcd_q(gamma).q
    data = symmetric_fiber_maps(f)
    z = _curve_variable(f, y)
    tr = Ring(["t"])
    curve = [poly_compose(c, [tr.var("t")]) for c in restrict(f, y)]
    zi = f.source.index(z)
    for j in range(1, q + 1):
        vals = [poly_compose(F, curve) for F in data.F[j - 1]]
        if any(v for k, v in enumerate(vals) if k != zi):
            raise HypothesisFailure("preimage", "fiber functions leave X along the curve")
        v = vals[zi]
        if v.is_zero():
            continue
        if len(v) != 1 or next(iter(v.terms)) != (j,):
            raise HypothesisFailure("preimage", f"F^{j} along the curve is {v}, not c t^{j}")
        return SeparatingFunction(j, v.coefficient((j,)), data.F[j - 1])
    raise HypothesisFailure("preimage", f"no j <= {q} with c_j != 0")


# ---------------------------------------------------------------------------
# symmetric polynomials


def coefficient_ring(p: int, name: str = "c") -> Ring:
    return Ring([f"{name}{k}" for k in range(1, p + 1)])


def elementary(ring: Ring, j: int) -> Poly:
    """``e_j`` of all variables of ``ring``."""
    n = ring.nvars
    out = ring.zero()
    for S in itertools.combinations(range(n), j):
        e = [0] * n
        for k in S:
            e[k] = 1
        out = out + ring.monomial(e)
    return out


def signed_coefficients(ring: Ring) -> List[Poly]:
    """``c_j(w) = (-1)^j e_j(w)``, the coefficients of ``prod (y - w_l)``."""
    return [elementary(ring, j) * ((-1) ** j) for j in range(1, ring.nvars + 1)]


def power_sum(ring: Ring, k: int) -> Poly:
    return sum((v ** k for v in ring.gens()), ring.zero())


def is_symmetric(d: Poly) -> bool:
    n = d.ring.nvars
    if n < 2:
        return True
    swap = list(d.ring.gens())
    swap[0], swap[1] = swap[1], swap[0]
    cyc = list(d.ring.gens())[1:] + [d.ring.gens()[0]]
    return poly_compose(d, swap) == d and poly_compose(d, cyc) == d


def sym_express(d: Poly, name: str = "c") -> Poly:
    """``a`` with ``d(w) = a(c_1(w), ..., c_p(w))``; raises if ``d`` is not symmetric."""
    if not is_symmetric(d):
        raise ValueError(f"{d} is not symmetric")
    ring = d.ring
    p = ring.nvars
    cring = coefficient_ring(p, name)
    es = [elementary(ring, j) for j in range(1, p + 1)]
    out = cring.zero()
    rem = d
    while rem:
        lm, lc = rem.lead(LEX)
        if any(lm[k] < lm[k + 1] for k in range(p - 1)):
            raise AssertionError("leading monomial of a symmetric polynomial is not a partition")
        powers = [lm[k] - lm[k + 1] for k in range(p - 1)] + [lm[p - 1]]
        term = d.ring.const(lc)
        for e, a in zip(es, powers):
            if a:
                term = term * e ** a
        rem = rem - term
        # e_j = (-1)^j c_j
        sign = (-1) ** sum((j + 1) * a for j, a in enumerate(powers))
        out = out + cring.monomial(powers, lc * sign)
    return out


def newton_power_sums(p: int, upto: int, name: str = "c") -> List[Poly]:
    """Power sums ``p_1 .. p_upto`` in the signed coefficients, by Newton's identities.

    With ``c_j`` the coefficients of ``prod (y - w_l)``:
    ``p_k + c_1 p_{k-1} + ... + c_{k-1} p_1 + k c_k = 0`` (``c_j = 0`` for j > p).
    """
    cring = coefficient_ring(p, name)
    cs = cring.gens()
    out: List[Poly] = []
    for k in range(1, upto + 1):
        acc = cring.zero()
        for j in range(1, k):
            if j <= p:
                acc = acc + cs[j - 1] * out[k - j - 1]
        if k <= p:
            acc = acc + cs[k - 1] * k
        out.append(-acc)
    return out


# ---------------------------------------------------------------------------
# roots of unity


def cyclotomic(n: int) -> List[int]:
    """Integer coefficients (constant first) of the n-th cyclotomic polynomial."""
    num = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            num = _int_poly_div(num, cyclotomic(d))
    return num


def _int_poly_div(a: List[int], b: List[int]) -> List[int]:
    a = list(a)
    out = [0] * (len(a) - len(b) + 1)
    for k in range(len(out) - 1, -1, -1):
        c = a[k + len(b) - 1] // b[-1]
        out[k] = c
        for j, bj in enumerate(b):
            a[k + j] -= c * bj
    if any(a[: len(b) - 1]):
        raise ArithmeticError("inexact integer polynomial division")
    return out


class Cyclotomic:
    """Element of Q(zeta_q) as a rational vector modulo the q-th cyclotomic polynomial."""

    __slots__ = ("q", "c")

    _phi: Dict[int, List[int]] = {}

    def __init__(self, q: int, coeffs):
        self.q = q
        phi = self.phi(q)
        deg = len(phi) - 1
        c = [mpq(x) for x in coeffs]
        while len(c) > deg:
            top = c.pop()
            if top:
                shift = len(c) - deg
                for j in range(deg):
                    c[shift + j] -= top * phi[j]
        c += [mpq(0)] * (deg - len(c))
        self.c = tuple(c)

    @classmethod
    def phi(cls, q: int) -> List[int]:
        if q not in cls._phi:
            cls._phi[q] = cyclotomic(q)
        return cls._phi[q]

    @classmethod
    def root(cls, q: int, k: int) -> "Cyclotomic":
        k %= q
        return cls(q, [0] * k + [1])

    @classmethod
    def rational(cls, q: int, r) -> "Cyclotomic":
        return cls(q, [r])

    def __add__(self, other):
        if not isinstance(other, Cyclotomic):
            other = Cyclotomic.rational(self.q, _rational(other))
        return Cyclotomic(self.q, [a + b for a, b in zip(self.c, other.c)])

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.q, [-a for a in self.c])

    def __sub__(self, other):
        return self + (-other if isinstance(other, Cyclotomic) else Cyclotomic.rational(self.q, -_rational(other)))

    def __mul__(self, other):
        if not isinstance(other, Cyclotomic):
            r = _rational(other)
            return Cyclotomic(self.q, [a * r for a in self.c])
        out = [mpq(0)] * (len(self.c) + len(other.c))
        for i, a in enumerate(self.c):
            if a:
                for j, b in enumerate(other.c):
                    if b:
                        out[i + j] += a * b
        return Cyclotomic(self.q, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = Cyclotomic.rational(self.q, 1)
        for _ in range(n):
            out = out * self
        return out

    def __bool__(self):
        return any(self.c)

    def __eq__(self, other):
        if isinstance(other, Cyclotomic):
            return self.q == other.q and self.c == other.c
        return self == Cyclotomic.rational(self.q, _rational(other))

    def __hash__(self):
        return hash((self.q, self.c))

    def __repr__(self):
        return f"Cyclotomic({self.q}, {[str(x) for x in self.c]})"


def _rational(x):
    if isinstance(x, Scalar):
        if x.im:
            raise ValueError("imaginary scalar outside Q(zeta_q) embedding")
        return x.re
    return mpq(x)


def root_multiset_coefficients(q: int, exponents: Sequence[int]) -> List[Cyclotomic]:
    """Coefficients ``e_1 .. e_p`` of ``prod (y - zeta_q^k)`` over the exponent multiset."""
    coeffs = [Cyclotomic.rational(q, 1)]
    for k in exponents:
        r = Cyclotomic.root(q, k)
        nxt = coeffs + [Cyclotomic.rational(q, 0)]
        for j in range(1, len(nxt)):
            nxt[j] = nxt[j] - r * coeffs[j - 1]
        coeffs = nxt
    return coeffs[1:]


def _evaluate(a: Poly, values: Sequence[Cyclotomic]) -> Cyclotomic:
    q = values[0].q
    out = Cyclotomic.rational(q, 0)
    for e, c in a.terms.items():
        t = Cyclotomic.rational(q, _rational(c))
        for v, k in zip(values, e):
            if k:
                t = t * v ** k
        out = out + t
    return out


@dataclass
class RootsOfUnityResult:
    j: int
    coefficient: object
    certificate: object


def roots_of_unity_coeff(Q, q: int) -> RootsOfUnityResult:
    """Least ``j <= q`` whose coefficient of ``y^(p-j)`` is nonzero.

    ``Q`` is either a list of exponents ``k`` (roots ``zeta_q^k``) or a monic
    univariate :class:`Poly` whose roots must all be q-th roots of unity.
    """
    if isinstance(Q, Poly):
        exact, p = _poly_root_check(Q, q)
    else:
        exps = list(Q)
        p = len(exps)
        exact = root_multiset_coefficients(q, exps)
    if q > p:
        raise ValueError(f"need q <= p (q={q}, p={p})")
    a_q = sym_express(power_sum(Ring([f"w{k}" for k in range(1, p + 1)]), q))
    if isinstance(Q, Poly):
        cert = _evaluate_scalar(a_q, exact)
    else:
        cert = _evaluate(a_q, exact)
    if cert != p:
        raise AssertionError(f"power-sum certificate gave {cert}, expected {p}")
    for j in range(1, q + 1):
        if exact[j - 1]:
            return RootsOfUnityResult(j, exact[j - 1], cert)
    raise AssertionError("no nonzero coefficient among e_1..e_q")


def _poly_root_check(Q: Poly, q: int):
    if Q.ring.nvars != 1:
        raise ValueError("Q must be univariate")
    p = Q.degree()
    if Q.coefficient((p,)) != 1:
        raise ValueError("Q must be monic")
    y = Q.ring.gens()[0]
    target = (y ** q - 1) ** p
    try:
        exact_divide(target, Q)
    except ValueError:
        raise ValueError(f"roots of {Q} are not all {q}-th roots of unity") from None
    return [Q.coefficient((p - j,)) for j in range(1, p + 1)], p


def _evaluate_scalar(a: Poly, values: Sequence[Scalar]) -> Scalar:
    point = {n: v for n, v in zip(a.ring.names, values)}
    return a.evaluate(point)
