import pytest
import sympy as sp

from germcalc.germmap import (
    HypothesisFailure,
    InfiniteMultiplicity,
    MapGerm,
    compute_g,
    coordinate_membership,
    identity_map,
    image_ideal,
    is_finite,
    jaccond_check,
    multiplicity,
    normal_form_along_X,
    preimage_closure_equals,
    preimage_ideal,
    restricted_multiplicity,
    split_target,
    transversal_at,
)
from germcalc.ideals import GermStatus, IdealHandle, Smooth, germ_set_equal, ideals_equal
from germcalc.ring import I, Ring, poly_compose

from conftest import from_sympy

S = Ring(["z", "w"])
z, w = S.gens()
P = Ring(["x", "y"])
x, y = P.gens()


def fold():
    return MapGerm.build(S, [z ** 2 + w ** 2, z * w], ["xi", "eta"])


def line_map():
    return MapGerm.build(Ring(["z1", "z2"]), [Ring(["z1", "z2"]).var("z1"), Ring(["z1", "z2"]).var("z2") ** 2])


def same(I1, I2):
    return germ_set_equal(I1, I2).status is GermStatus.Equal


def test_map_germ_validation():
    with pytest.raises(ValueError):
        MapGerm.build(S, [z + 1, w])
    with pytest.raises(ValueError):
        MapGerm.build(S, [z])


def test_finiteness():
    assert is_finite(identity_map(S))
    assert is_finite(line_map())
    assert not is_finite(MapGerm.build(S, [z, z * w]))
    with pytest.raises(InfiniteMultiplicity):
        multiplicity(MapGerm.build(S, [z, z * w]))


def test_multiplicity():
    assert multiplicity(line_map()) == 2
    assert multiplicity(fold()) == 4
    assert multiplicity(identity_map(S)) == 1
    assert multiplicity(MapGerm.build(S, [z ** 2, w ** 3])) == 6


def test_jaccond():
    L = line_map()
    assert not jaccond_check(L, IdealHandle(L.source, [L.source.var("z2")]))
    assert jaccond_check(fold(), IdealHandle(S, [w]))
    assert fold().jacobian_determinant() == 2 * z ** 2 - 2 * w ** 2
    assert jaccond_check(identity_map(S), IdealHandle(S, [w]))


def test_image_ideal():
    f = fold()
    img = image_ideal(f, IdealHandle(S, [w]))
    assert same(img, IdealHandle(f.target, [f.target.var("eta")]))
    assert img.certificate == Smooth(1)
    L = line_map()
    img = image_ideal(L, IdealHandle(L.source, [L.source.var("z2")]))
    assert same(img, IdealHandle(L.target, [L.target.var("z2_t")]))
    ident = identity_map(S)
    img = image_ideal(ident, IdealHandle(S, [w]))
    assert same(img, IdealHandle(ident.target, [ident.target.var("w_t")]))


def test_image_against_sympy_elimination():
    f = MapGerm.build(S, [z ** 2, z ** 3 + w])
    img = image_ideal(f, IdealHandle(S, [w]))
    zz, ww, a, b = sp.symbols("z w z_t w_t")
    G = sp.groebner([ww, a - zz ** 2, b - zz ** 3 - ww], zz, ww, a, b, order="lex")
    free = [g for g in G.exprs if not g.has(zz) and not g.has(ww)]
    assert ideals_equal(img, IdealHandle(img.ring, [from_sympy(g, img.ring) for g in free]))


def test_preimage_closure():
    v = preimage_closure_equals(fold(), IdealHandle(S, [w]))
    assert v.status is GermStatus.StrictlyLarger
    assert v.witness == w
    assert same(IdealHandle(S, v.component), IdealHandle(S, [z]))
    lin = MapGerm.build(S, [z + 2 * w, I * w - z])
    assert preimage_closure_equals(lin, IdealHandle(S, [w - z ** 2])).status is GermStatus.Equal
    assert preimage_closure_equals(MapGerm.build(S, [z ** 2, w]), IdealHandle(S, [w])).status is GermStatus.Equal


def test_preimage_agrees_with_pullback_definition():
    # for these maps the global pullback has no far components, so both routes agree
    for comps, X in (([z ** 2 + w ** 2, z * w], [w]), ([z ** 2, w], [w]), ([z ** 2, z ** 3 + w], [w])):
        f = MapGerm.build(S, comps)
        XI = IdealHandle(S, X)
        direct = germ_set_equal(preimage_ideal(f, image_ideal(f, XI)), XI).status
        assert preimage_closure_equals(f, XI).status is direct


def test_complexified_line_equal():
    C = Ring(["z1", "z2", "zeta1", "zeta2"])
    a, b, c, d = C.gens()
    H = MapGerm.build(C, [a, b ** 2, c, d ** 2])
    assert preimage_closure_equals(H, IdealHandle(C, [b, d])).status is GermStatus.Equal


def test_coordinate_membership():
    f = MapGerm.build(P, [x, y + x ** 2])
    cm = coordinate_membership(f, ["y"])
    assert cm is not None
    lhs = cm.units[0] * y
    rhs = sum((a * r for a, r in zip(cm.A[0], cm.split.R)), P.zero()) + sum(
        (b * s for b, s in zip(cm.B[0], cm.split.S)), P.zero()
    )
    assert lhs == rhs
    assert cm.A[0][0] * cm.units[0].constant_term().inverse() == -x or cm.A[0] == [-x]
    assert coordinate_membership(fold(), ["w"]) is None
    ident = coordinate_membership(identity_map(P), ["y"])
    assert ident is not None and ident.B0_at_origin() == [[1]]


def test_split_target():
    sm = split_target(MapGerm.build(P, [x, y + x ** 2]), ["y"])
    X1 = sm.x_ring
    (sx,) = X1.gens()
    assert sm.R0 == [sx] and sm.S0 == [sx ** 2]
    assert all(e.is_zero() for row in sm.R1 + sm.S1 for e in row)
    sm = split_target(MapGerm.build(P, [x + x * y, y]), ["y"])
    assert sm.R0 == [sx] and sm.R1 == [[x]] and sm.S0 == [X1.zero()]
    sm = split_target(identity_map(P), ["y"])
    assert sm.R0 == [sx] and sm.S0 == [X1.zero()]


def test_compute_g():
    for comps, expect in (([x ** 2, y + x ** 4], "x_t^2"), ([x ** 3, y + x ** 3 + x ** 6], "x_t^2 + x_t")):
        sm = split_target(MapGerm.build(P, comps), ["y"])
        g = compute_g(sm)
        assert g[0].render() == expect
        assert poly_compose(g[0], sm.R0) == sm.S0[0]
    sm = split_target(identity_map(P), ["y"])
    assert all(gl.is_zero() for gl in compute_g(sm))


def test_normal_form_along_X():
    f = MapGerm.build(P, [x, y + x ** 2])
    nf = normal_form_along_X(f, IdealHandle(P, [y]))
    assert nf.g[0].render() == "x_t^2"
    assert list(nf.final_map.components) == [x, y]
    assert nf.certificate == Smooth(1)
    assert [poly_compose(c, list(f.components)) for c in nf.target_change] == list(nf.final_map.components)
    ident = normal_form_along_X(identity_map(P), IdealHandle(P, [y]))
    assert all(gl.is_zero() for gl in ident.g)
    assert list(ident.final_map.components) == [x, y]


def test_normal_form_curved_X():
    f = MapGerm.build(P, [x ** 2, y])
    nf = normal_form_along_X(f, IdealHandle(P, [y - x ** 2]))
    assert nf.multiplicity == 2
    # y^2 = x^4 has two branches, so the preimage hypothesis breaks
    with pytest.raises(HypothesisFailure) as e:
        normal_form_along_X(MapGerm.build(P, [x, y ** 2]), IdealHandle(P, [y - x ** 2]))
    assert e.value.hypothesis == "preimage"


def test_normal_form_refuses():
    C = Ring(["z1", "z2", "zeta1", "zeta2"])
    a, b, c, d = C.gens()
    H = MapGerm.build(C, [a, b ** 2, c, d ** 2])
    with pytest.raises(HypothesisFailure) as e:
        normal_form_along_X(H, IdealHandle(C, [b, d]))
    assert e.value.hypothesis == "jaccond"
    with pytest.raises(HypothesisFailure) as e:
        normal_form_along_X(fold(), IdealHandle(S, [w]))
    assert e.value.hypothesis == "preimage"
    with pytest.raises(HypothesisFailure) as e:
        normal_form_along_X(MapGerm.build(S, [z, z * w]), IdealHandle(S, [w]))
    assert e.value.hypothesis == "finite"


def test_restricted_multiplicity_equals_multiplicity():
    for comps in ([x, y + x ** 2], [x ** 2, y], [x ** 3, y + x ** 3 + x ** 6]):
        f = MapGerm.build(P, comps)
        normal_form_along_X(f, IdealHandle(P, [y]))
        assert restricted_multiplicity(f, ["y"]) == multiplicity(f)


def test_transversal_complex():
    L = line_map()
    tgt = L.target
    assert not transversal_at(L, IdealHandle(tgt, [tgt.var("z2_t")]))
    ident = identity_map(S)
    assert transversal_at(ident, IdealHandle(ident.target, [ident.target.var("w_t")]))
    f = MapGerm.build(S, [z ** 2, w])
    assert transversal_at(f, IdealHandle(f.target, [f.target.var("w_t")]))
    with pytest.raises(ValueError):
        transversal_at(f, IdealHandle(f.target, [f.target.var("w_t") ** 2 - f.target.var("z_t") ** 3]))
