"""Acceptance criteria 1-13, each checked against an independent oracle.

The package's own criterion functions run too, so ``germcalc selftest`` and
this file cannot drift apart.
"""
import itertools
import random

import pytest
import sympy as sp

from germcalc import crgeom, cli, curve, germmap, ideals, selftest
from germcalc.crgeom import imag_part
from germcalc.germmap import MapGerm
from germcalc.ideals import GermStatus, IdealHandle, Smooth
from germcalc.ring import DEGREVLEX, Ring, Scalar, poly_compose

from conftest import from_sympy, to_sympy

pytestmark = pytest.mark.acceptance


def own(check):
    res = check()
    bad = [k for k, v in res.items() if not v]
    assert not bad, bad


def lex_free(gens, elim, keep):
    """Generators of the elimination ideal, by a sympy lex basis."""
    G = sp.groebner(gens, *elim, *keep, order="lex")
    return [g for g in G.exprs if not any(g.has(v) for v in elim)]


def quotient_dim(gens, syms):
    """Global dim C[syms]/I by counting standard monomials of a sympy grevlex basis."""
    G = sp.groebner(gens, *syms, order="grevlex")
    leads = [sp.Poly(g, *syms).monoms(order="grevlex")[0] for g in G.exprs]
    bound = max(max(l) for l in leads) + 1
    count = 0
    for e in itertools.product(range(bound * 2), repeat=len(syms)):
        if not any(all(a >= b for a, b in zip(e, l)) for l in leads):
            count += 1
    return count


def test_criterion_01_fold():
    own(selftest.fold)
    z, w, xi, eta = sp.symbols("z w xi eta")
    # image of {w = 0}: eliminate z, w from the graph
    img = lex_free([xi - z ** 2 - w ** 2, eta - z * w, w], [z, w], [xi, eta])
    assert img == [eta]
    # pull the image back: {zw = 0}, whose branches are {w = 0} = X and {z = 0}
    pulled = [sp.expand(g.subs({xi: z ** 2 + w ** 2, eta: z * w})) for g in img]
    branches = {str(fac) for fac, _ in sp.factor_list(pulled[0])[1]}
    assert branches == {"z", "w"}
    S = Ring(["z", "w"])
    sz, sw = S.gens()
    f = MapGerm.build(S, [sz ** 2 + sw ** 2, sz * sw], ["xi", "eta"])
    image = germmap.image_ideal(f, IdealHandle(S, [sw]))
    assert ideals.ideals_equal(image, IdealHandle(image.ring, [from_sympy(eta, image.ring)]))
    v = germmap.preimage_closure_equals(f, IdealHandle(S, [sw]))
    assert v.status is GermStatus.StrictlyLarger
    assert v.witness == sw
    comp = IdealHandle(S, v.component)
    assert ideals.germ_set_equal(comp, IdealHandle(S, [sz])).status is GermStatus.Equal


def test_criterion_02_complex_line():
    own(selftest.complex_line)
    z1, z2, c1, c2, u1, u2, v1, v2 = sp.symbols("z1 z2 zeta1 zeta2 u1 u2 v1 v2")
    graph = [u1 - z1, u2 - z2 ** 2, v1 - c1, v2 - c2 ** 2, z2, c2]
    assert sorted(map(str, lex_free(graph, [z1, z2, c1, c2], [u1, u2, v1, v2]))) == ["u2", "v2"]
    # pulling the image back gives z2^2 = zeta2^2 = 0, whose radical is the complexified M
    J = sp.groebner([z2 ** 2, c2 ** 2], z1, z2, c1, c2, order="grevlex")
    assert J.contains(z2 ** 2) and not J.contains(z2)
    # det of the complexified Jacobian is 4 z2 zeta2, zero on M
    jac = sp.Matrix([z1, z2 ** 2, c1, c2 ** 2]).jacobian([z1, z2, c1, c2])
    assert sp.expand(jac.det()) == 4 * z2 * c2
    M, H, Mt = selftest._complex_line()
    rep = crgeom.theorem11_report(M, H)
    assert rep.M_in_subvariety and not rep.M_generic and rep.consistent
    assert rep.condition_ii.status is GermStatus.Equal


def test_criterion_03_non_cr_image():
    own(selftest.non_cr_target)
    M, H, Mt = selftest._non_cr_target()
    # independent reduction: pull Mt back by the complexified map, reduce by sympy
    cH = crgeom.complexify_map(H, M.ring)
    syms = sp.symbols(M.ring.names)
    basis = sp.groebner([to_sympy(r) for r in M.rho], *syms, order="grevlex")
    for r in Mt.rho:
        pulled = to_sympy(poly_compose(r, list(cH.components)))
        assert basis.reduce(pulled)[1] == 0
    assert crgeom.is_generic(M)
    ft = crgeom.finite_type_check(M, 4)
    assert isinstance(ft, crgeom.FiniteTypeAtOrder) and ft.order <= 4
    assert crgeom.cr_profile(Mt).is_cr_at_0 is False
    assert crgeom.condition_ii_check(M, H).status is GermStatus.StrictlyLarger


def test_criterion_04_totally_real():
    own(selftest.totally_real)
    M, H, image = selftest._totally_real()
    # (w1 + i w2, (w1 - i w2)^2) is (u, v^2) after the linear change u = w1 + i w2, v = w1 - i w2
    u, v = sp.symbols("u v")
    assert quotient_dim([u, v ** 2], [u, v]) == 2
    assert germmap.multiplicity(H) == 2
    assert crgeom.condition_ii_check(M, H).status is GermStatus.StrictlyLarger
    assert crgeom.cr_profile(image).is_cr_at_0 is False


def test_criterion_05_hyperplane():
    own(selftest.hyperplane)
    z, w, c, d, a, b, p, q = sp.symbols("z w zeta tau zt wt zt_bar wt_bar")
    # complexified M = {w = tau}; complexified H = (z^2, w, zeta^2, tau)
    img = lex_free([a - z ** 2, b - w, p - c ** 2, q - d, w - d], [z, w, c, d], [a, b, p, q])
    assert [sp.expand(g) for g in img] == [b - q]
    M, H, Mt = selftest._hyperplane()
    rep = crgeom.theorem11_report(M, H)
    assert rep.condition_ii.status is GermStatus.Equal
    assert rep.image_smooth == Smooth(1) and rep.image_generic
    assert crgeom.real_transversal(H, Mt) and crgeom.cr_transversal_check(H, Mt)
    assert rep.multiplicity == 2 and rep.jacobian_rank == 1 and M.d == 1
    assert rep.consistent


def test_criterion_06_multiplicities():
    own(selftest.multiplicities)
    z, w = sp.symbols("z w")
    assert quotient_dim([z ** 2, w ** 3], [z, w]) == 6
    assert quotient_dim([z ** 2 + w ** 2, z * w], [z, w]) == 4
    # z - z^2 has roots 0 and 1; only the simple root at 0 counts locally
    x = sp.symbols("x")
    assert sp.roots(x - x ** 2, x)[0] == 1
    X1 = Ring(["x"])
    assert germmap.multiplicity(MapGerm.build(X1, [X1.var("x") - X1.var("x") ** 2])) == 1


def test_criterion_07_normal_form():
    own(selftest.normal_form)
    x, y, xi = sp.symbols("x y xi")
    # R0(x) = x, S0(x) = x^2, so g(xi) = xi^2 exactly
    R0, S0 = x, (y + x ** 2).subs(y, 0)
    g = xi ** 2
    assert sp.expand(g.subs(xi, R0) - S0) == 0
    P = Ring(["x", "y"])
    px, py = P.gens()
    f = MapGerm.build(P, [px, py + px ** 2])
    nf = germmap.normal_form_along_X(f, IdealHandle(P, [py]))
    assert to_sympy(nf.g[0]).subs(sp.Symbol("x_t"), xi) == g
    assert list(nf.final_map.components) == [px, py]
    assert [poly_compose(c, list(f.components)) for c in nf.target_change] == list(nf.final_map.components)


def test_criterion_08_curves():
    own(selftest.curves)
    z, w, a, b = sp.symbols("z w a b")
    # image of {w = 0} under (z^2, z^3 + w) is the cusp
    assert lex_free([a - z ** 2, b - z ** 3 - w, w], [z, w], [a, b]) == [a ** 3 - b ** 2]
    # its preimage: (z^3 + w)^2 = z^6, i.e. w (w + 2 z^3) = 0
    extra = sp.factor(sp.expand((z ** 3 + w) ** 2 - z ** 6))
    assert extra == w * (w + 2 * z ** 3)
    S = Ring(["z", "w"])
    sz, sw = S.gens()
    d = curve.curve_image_decision(MapGerm.build(S, [sz ** 2, sz ** 3 + sw]), ["w"])
    assert (d.m, d.q, d.verdict) == (2, 1, curve.CurveVerdict.PreimageStrictlyLarger)
    oracle = IdealHandle(S, [from_sympy(w + 2 * z ** 3, S)])
    assert ideals.germ_set_equal(IdealHandle(S, d.preimage.component), oracle).status is GermStatus.Equal
    img = lex_free([a - z ** 2, b - z ** 3 - w, w], [z, w], [a, b])
    T = d.image.ring
    mine = IdealHandle(T, [from_sympy(g.subs({a: sp.Symbol("z_t"), b: sp.Symbol("w_t")}), T) for g in img])
    assert ideals.ideals_equal(d.image, mine)


def test_criterion_09_weierstrass():
    own(selftest.weierstrass)
    t, x = sp.symbols("t x")
    S = Ring(["z", "w"])
    sz, sw = S.gens()
    # R(t, x) is the product of (x - z) over the fiber above f(t, 0), with multiplicity
    for comps, fiber in (
        ([sz ** 2, sw], [t, -t]),
        # (t^2, 0) under the fold: (+-t, 0) and (0, +-i t)
        ([sz ** 2 + sw ** 2, sz * sw], [t, -t, 0, 0]),
    ):
        wd = curve.weierstrass_along_curve(MapGerm.build(S, comps), ["w"])
        assert to_sympy(wd.R) == sp.expand(sp.prod([x - r for r in fiber]))
    assert wd.zero_is_root
    sep = curve.find_separating_function(MapGerm.build(S, [sz ** 2, sw]), ["w"])
    assert (sep.j, sep.c) == (2, Scalar(-1))


def test_criterion_10_roots_of_unity():
    own(lambda: selftest.roots_of_unity(200, 43))
    rng = random.Random(43)
    y = sp.symbols("y")
    for _ in range(200):
        p = rng.randint(1, 6)
        q = rng.randint(1, p)
        exps = [rng.randrange(q) for _ in range(p)]
        r = curve.roots_of_unity_coeff(exps, q)
        assert 1 <= r.j <= q and r.certificate == p
        if q <= 4:
            # q-th roots of unity with q <= 4 lie in Q(i); check against sympy exactly
            roots = [sp.exp(2 * sp.pi * sp.I * k / q).expand(complex=True) for k in exps]
            coeffs = sp.Poly(sp.expand(sp.prod([y - s for s in roots])), y).all_coeffs()[1:]
            assert r.j == next(j for j in range(1, p + 1) if sp.simplify(coeffs[j - 1]) != 0)


def test_criterion_11_symmetric():
    own(selftest.symmetric)
    w1, w2, w3 = ws = sp.symbols("w1 w2 w3")
    e1, e2, e3 = w1 + w2 + w3, w1 * w2 + w1 * w3 + w2 * w3, w1 * w2 * w3
    c = {"c1": -e1, "c2": e2, "c3": -e3}
    sums = curve.newton_power_sums(3, 3)
    for k, s in enumerate(sums, 1):
        val = to_sympy(s).subs({sp.Symbol(n): v for n, v in c.items()}, simultaneous=True)
        assert sp.expand(val - sum(v ** k for v in ws)) == 0


def test_criterion_12_engine():
    own(lambda: selftest.engine(100, 7))
    # independent oracle: sympy reduced bases for 20 further random ideals
    rng = random.Random(12)
    R = Ring(["x", "y", "z"])
    syms = sp.symbols("x y z")
    for _ in range(20):
        gens = selftest.random_ideal(rng, R)
        J = IdealHandle(R, gens)
        mine = sorted(b.monic(DEGREVLEX).render() for b in J.standard_basis(DEGREVLEX))
        G = sp.groebner([to_sympy(g) for g in gens], *syms, order="grevlex")
        theirs = sorted(from_sympy(g, R).monic(DEGREVLEX).render() for g in G.exprs)
        assert mine == theirs


def test_criterion_13_watchdog():
    own(selftest.watchdog)
    for seed in (4, 5):
        r = cli.explore_question(seed, 10, 3)
        assert len(r["instances"]) == 10
