import random

import pytest
import sympy as sp
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from germcalc import curve
from germcalc.curve import (
    CurveVerdict,
    TruncationError,
    curve_image_decision,
    find_separating_function,
    restrict_and_normalize,
    roots_of_unity_coeff,
    support_gcd_q,
    sym_express,
    symmetric_fiber_maps,
    weierstrass_along_curve,
)
from germcalc.germmap import HypothesisFailure, MapGerm
from germcalc.ideals import GermStatus, IdealHandle, germ_set_equal
from germcalc.ring import Ring, Scalar, TruncatedSeries, poly_compose

from conftest import to_sympy

S = Ring(["z", "w"])
z, w = S.gens()


def test_restrict_already_normalized():
    g = restrict_and_normalize(MapGerm.build(S, [z ** 2, z ** 3 + w]), ["w"], D=8)
    assert g.m == 2 and g.is_normalized() and g.exact
    assert g.components[1] == TruncatedSeries.monomial(3, 1, 8)


def test_restrict_reparametrizes():
    D = 9
    g = restrict_and_normalize(MapGerm.build(S, [z ** 2 + z ** 3, w]), ["w"], D)
    assert g.m == 2 and g.is_normalized() and not g.exact
    # the reparametrization t -> s(t) must satisfy s^2 + s^3 = t^2
    s = g.reparam
    assert s * s + s * s * s == TruncatedSeries.monomial(2, 1, D)
    # oracle: s(t) inverts u -> u*sqrt(1 + u)
    t, u = sp.symbols("t u")
    fwd = sp.series(u * sp.sqrt(1 + u), u, 0, D + 1).removeO()
    back = sum(sp.Rational(int(s[k].re.numerator), int(s[k].re.denominator)) * t ** k for k in range(D + 1))
    assert sp.expand(sp.series(fwd.subs(u, back), t, 0, D + 1).removeO()) == t


def test_restrict_permutes_and_scales():
    g = restrict_and_normalize(MapGerm.build(S, [z ** 3, 2 * z ** 2 + w]), ["w"], D=8)
    assert g.m == 2 and g.permutation == (1, 0)
    assert g.scale == Scalar(mpq(1, 2))


def test_restrict_rejects():
    with pytest.raises(ValueError):
        restrict_and_normalize(MapGerm.build(S, [w, z * w + w ** 2]), ["w"])


def test_support_gcd():
    for comps, q in (([z ** 2, w], 2), ([z ** 2, z ** 3 + w], 1), ([z ** 4, z ** 6 + w], 2), ([z ** 3, z ** 6 + w], 3)):
        g = restrict_and_normalize(MapGerm.build(S, comps), ["w"], D=12)
        assert support_gcd_q(g).q == q


def test_support_gcd_truncation():
    # inexact curve with q still able to drop beyond D
    g = restrict_and_normalize(MapGerm.build(S, [z ** 2 + z ** 4, z ** 2 * w + w]), ["w"], D=3)
    with pytest.raises(TruncationError) as e:
        support_gcd_q(g, p=4)
    assert e.value.needed and e.value.needed > 3


def test_factor_through_power():
    g = restrict_and_normalize(MapGerm.build(S, [z ** 4, z ** 6 + w]), ["w"], D=12)
    h = curve.factor_through_power(g, 2)
    assert h[0] == TruncatedSeries.monomial(2, 1, 6)
    assert h[1] == TruncatedSeries.monomial(3, 1, 6)


def test_curve_decisions():
    a = curve_image_decision(MapGerm.build(S, [z ** 2, w]), ["w"])
    assert (a.m, a.q, a.verdict) == (2, 2, CurveVerdict.SmoothImage)
    assert a.preimage.status is GermStatus.Equal
    b = curve_image_decision(MapGerm.build(S, [z ** 2, z ** 3 + w]), ["w"])
    assert (b.m, b.q, b.verdict) == (2, 1, CurveVerdict.PreimageStrictlyLarger)
    comp = IdealHandle(S, b.preimage.component)
    assert germ_set_equal(comp, IdealHandle(S, [w + 2 * z ** 3])).status is GermStatus.Equal
    f = curve_image_decision(MapGerm.build(S, [z ** 2 + w ** 2, z * w]), ["w"])
    assert (f.m, f.q, f.verdict) == (2, 2, CurveVerdict.SmoothImage)
    assert f.preimage.status is GermStatus.StrictlyLarger


def test_curve_verdict_matches_preimage_for_graphs():
    # f = (z^m, z^k + w): the image of {w=0} is smooth exactly when m divides k
    for m in (2, 3):
        for k in range(m + 1, m + 5):
            d = curve_image_decision(MapGerm.build(S, [z ** m, z ** k + w]), ["w"])
            smooth = k % m == 0
            assert (d.verdict is CurveVerdict.SmoothImage) == smooth
            assert (d.preimage.status is GermStatus.Equal) == smooth


def _sympy_charpoly(comps, point, var):
    # oracle: eliminate the source to get the polynomial satisfied by var on the fiber
    zs, ws, x = sp.symbols("z w x")
    a, b = point
    G = sp.groebner([comps[0] - a, comps[1] - b, x - var], zs, ws, x, order="lex")
    return sp.Poly(G.exprs[-1], x).monic()


def test_symmetric_fiber_maps_simple():
    data = symmetric_fiber_maps(MapGerm.build(S, [z ** 2, w]))
    T = Ring(["z_t", "w_t"])
    a, b = T.gens()
    assert data.p == 2
    assert data.F[0] == [T.zero(), -2 * b]
    assert data.F[1] == [-a, b ** 2]


def test_fold_charpoly_against_sympy():
    data = symmetric_fiber_maps(MapGerm.build(S, [z ** 2 + w ** 2, z * w], ["xi", "eta"]))
    zs, ws, xs = sp.symbols("z w x")
    X = Ring(["x"])
    got = poly_compose(data.char_polys[0], [X.const(5), X.const(2), X.var("x")])
    oracle = _sympy_charpoly([zs ** 2 + ws ** 2, zs * ws], (5, 2), zs)
    assert to_sympy(got) == oracle.as_expr()
    assert got.render() == "x^4 - 5*x^2 + 4"


def test_weierstrass():
    ident = MapGerm.build(S, [z, w])
    wd = weierstrass_along_curve(ident, ["w"])
    t, x = wd.R.ring.gens()
    assert wd.R == x - t and wd.homogeneous and not wd.zero_is_root
    wd = weierstrass_along_curve(MapGerm.build(S, [z ** 2 + w ** 2, z * w]), ["w"])
    t, x = wd.R.ring.gens()
    assert wd.R == x ** 4 - t ** 2 * x ** 2
    assert wd.zero_is_root and wd.homogeneous


def test_separating_function():
    sep = find_separating_function(MapGerm.build(S, [z, w]), ["w"])
    assert (sep.j, sep.c) == (1, Scalar(-1))
    sep = find_separating_function(MapGerm.build(S, [z ** 3, z ** 6 + w]), ["w"])
    assert (sep.j, sep.c) == (3, Scalar(-1))
    with pytest.raises(HypothesisFailure):
        find_separating_function(MapGerm.build(S, [z ** 2, z ** 3 + w]), ["w"])
    with pytest.raises(ValueError):
        find_separating_function(MapGerm.build(S, [2 * z ** 2, w]), ["w"])


def test_roots_of_unity_polys():
    Y = Ring(["y"])
    (yv,) = Y.gens()
    for Q, q, j in (((yv - 1) ** 3, 1, 1), (yv ** 2 - 1, 2, 2), ((yv - 1) ** 2 * (yv + 1), 2, 1), (yv ** 4 - 1, 4, 4)):
        assert roots_of_unity_coeff(Q, q).j == j
    with pytest.raises(ValueError):
        roots_of_unity_coeff(yv ** 2 - 2, 2)


def test_roots_of_unity_exponents_against_sympy():
    rng = random.Random(5)
    ys = sp.symbols("y")
    for _ in range(40):
        p = rng.randint(1, 5)
        q = rng.randint(1, p)
        exps = [rng.randrange(q) for _ in range(p)]
        Q = sp.expand(sp.prod([ys - sp.exp(2 * sp.pi * sp.I * k / q) for k in exps]))
        Q = sp.Poly(Q, ys)
        coeffs = [sp.nsimplify(sp.simplify(c)) for c in Q.all_coeffs()[1:]]
        expect = next(j for j in range(1, p + 1) if sp.simplify(coeffs[j - 1]) != 0)
        assert roots_of_unity_coeff(exps, q).j == expect


def test_cyclotomic_field():
    C = curve.Cyclotomic
    z5 = C.root(5, 1)
    assert z5 ** 5 == C.rational(5, 1)
    s = C.rational(5, 0)
    for k in range(5):
        s = s + C.root(5, k)
    assert not s
    assert curve.cyclotomic(6) == [1, -1, 1]


def test_newton_sums():
    sums = curve.newton_power_sums(4, 4)
    W = Ring(["w1", "w2", "w3", "w4"])
    for k in range(1, 5):
        assert poly_compose(sums[k - 1], curve.signed_coefficients(W)) == curve.power_sum(W, k)


def test_sym_express_rejects_non_symmetric():
    W = Ring(["w1", "w2"])
    a, b = W.gens()
    assert curve.is_symmetric(a * b + a + b)
    assert not curve.is_symmetric(a ** 2 + b)
    with pytest.raises(ValueError):
        sym_express(a ** 2 + b)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(-3, 3)), min_size=1, max_size=4))
def test_sym_express_round_trip(terms):
    W = Ring(["w1", "w2", "w3"])
    d = W.zero()
    for a, b, c in terms:
        for perm in ((a, b, 0), (b, a, 0), (a, 0, b), (b, 0, a), (0, a, b), (0, b, a)):
            d = d + W.monomial(perm, c)
    if d.is_zero():
        return
    assert poly_compose(sym_express(d), curve.signed_coefficients(W)) == d


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6).flatmap(lambda p: st.tuples(st.just(p), st.integers(1, p))).flatmap(
    lambda pq: st.tuples(st.just(pq[1]), st.lists(st.integers(0, pq[1] - 1), min_size=pq[0], max_size=pq[0]))
))
def test_roots_of_unity_certificate(qe):
    q, exps = qe
    r = roots_of_unity_coeff(exps, q)
    assert 1 <= r.j <= q and r.coefficient
    assert r.certificate == len(exps)
