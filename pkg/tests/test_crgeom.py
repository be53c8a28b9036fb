import random

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from germcalc import crgeom, selftest
from germcalc.crgeom import (
    FiniteTypeAtOrder,
    NondegenerateAtOrder,
    RealSubmanifold,
    UndeterminedUpTo,
    complexify_manifold,
    complexify_map,
    condition_ii_check,
    cr_profile,
    cr_transversal_check,
    cr_vector_fields,
    finite_type_check,
    finitely_nondegenerate_check,
    imag_part,
    is_generic,
    maps_into,
    real_part,
    real_transversal,
    theorem11_report,
)
from germcalc.germmap import MapGerm
from germcalc.ideals import BudgetExceeded, GermStatus, Smooth, contains, work_budget
from germcalc.ring import I, Ring

P = Ring.paired(["z", "w"])
z, w, zb, wb = P.gens()


def lewy():
    return RealSubmanifold(P, (imag_part(w) - z * zb,))


def flat():
    return RealSubmanifold(P, (imag_part(w),))


def quartic():
    return RealSubmanifold(P, (imag_part(w) - (z * zb) ** 2,))


def test_real_and_imag_parts():
    assert real_part(z) == (z + zb) * crgeom.HALF
    assert imag_part(I * z) == real_part(z)
    p = z ** 2 - I * w
    assert real_part(p) + I * imag_part(p) == p


def test_submanifold_validation():
    with pytest.raises(ValueError):
        RealSubmanifold(P, (w,))
    with pytest.raises(ValueError):
        RealSubmanifold(P, (imag_part(w) + 1,))
    with pytest.raises(ValueError):
        RealSubmanifold(P, (imag_part(w), imag_part(w) + z * zb))
    with pytest.raises(ValueError):
        RealSubmanifold(Ring(["z"]), ())


def test_from_complex_equations():
    M = RealSubmanifold.from_complex_equations(P, [w - zb ** 2])
    assert M.d == 2
    M = RealSubmanifold.from_complex_equations(P, [w])
    assert M.d == 2 and not contains(complexify_manifold(M).ideal, z)


def test_complexify_map_conjugates_coefficients():
    S = Ring(["z"])
    H = MapGerm.build(S, [I * S.var("z")])
    cH = complexify_map(H)
    a, b = cH.source.gens()
    assert list(cH.components) == [I * a, -I * b]


def test_reality_symmetry():
    for M in (lewy(), flat(), quartic()):
        J = complexify_manifold(M).ideal
        assert all(contains(J, g.conj_swap()) for g in J.generators)


def test_generic():
    assert is_generic(lewy()) and is_generic(flat())
    assert not is_generic(RealSubmanifold.from_complex_equations(P, [w]))
    # real points R^N inside C^N are generic
    R2 = Ring.paired(["x1", "x2"])
    assert is_generic(RealSubmanifold(R2, (imag_part(R2.var("x1")), imag_part(R2.var("x2")))))


def test_cr_profile():
    prof = cr_profile(lewy())
    assert (prof.cr_dim_at_0, prof.generic_cr_dim, prof.is_cr_at_0) == (1, 1, True)
    # {w = conj(z)^2} in C^2: the conj(z) derivative drops rank at the origin
    bad = cr_profile(RealSubmanifold.from_complex_equations(P, [w - zb ** 2]))
    assert bad.is_cr_at_0 is False and bad.cr_dim_at_0 > bad.generic_cr_dim


def test_cr_vector_fields_are_tangent():
    for M in (lewy(), quartic()):
        (L,) = cr_vector_fields(M)
        assert all(L.apply(r).is_zero() for r in M.rho)
        assert all(a.is_zero() for n, a in zip(P.names, L.coefficients) if n in M.Z)
        Lb = L.conj_swap()
        assert all(Lb.apply(r).is_zero() for r in M.rho)


def test_finite_type():
    assert finite_type_check(lewy()) == FiniteTypeAtOrder(2)
    assert finite_type_check(quartic(), 4) == FiniteTypeAtOrder(4)
    assert finite_type_check(quartic(), 3) == UndeterminedUpTo(3)
    assert finite_type_check(flat(), 3) == UndeterminedUpTo(3)


def test_finitely_nondegenerate():
    assert finitely_nondegenerate_check(lewy()) == NondegenerateAtOrder(1)
    assert finitely_nondegenerate_check(flat(), 3) == UndeterminedUpTo(3)
    # |z|^4 is Levi-degenerate at 0 and the derivatives of rho_z never recover rank
    assert finitely_nondegenerate_check(quartic(), 4) == UndeterminedUpTo(4)
    R2 = Ring.paired(["x1", "x2"])
    real = RealSubmanifold(R2, (imag_part(R2.var("x1")), imag_part(R2.var("x2"))))
    assert finitely_nondegenerate_check(real) == NondegenerateAtOrder(0)


def test_transversality():
    M, H, Mt = selftest._hyperplane()
    assert real_transversal(H, Mt) and cr_transversal_check(H, Mt)
    M, H, Mt = selftest._complex_line()
    assert not real_transversal(H, Mt) and not cr_transversal_check(H, Mt)
    S = Ring(["z", "w"])
    tz, tw = S.gens()
    T = Ring.paired(["zt", "wt"])
    along = RealSubmanifold(T, (imag_part(T.var("wt")),))
    # dH(0) of (w, z^2) only reaches the zt direction, so Im(wt) is never hit
    assert real_transversal(MapGerm.build(S, [tw, tz ** 2], ["zt", "wt"]), along) is False
    assert real_transversal(MapGerm.build(S, [tz ** 2, tw], ["zt", "wt"]), along) is True
    with pytest.raises(ValueError):
        cr_transversal_check(H, RealSubmanifold.from_complex_equations(Mt.ring, [Mt.ring.var("u2") - Mt.ring.var("u1_bar") ** 2]))


def test_maps_into():
    M, H, Mt = selftest._non_cr_target()
    assert maps_into(M, H, Mt)
    M, H, Mt = selftest._hyperplane()
    assert maps_into(M, H, Mt)
    T = Mt.ring
    off = RealSubmanifold(T, (imag_part(T.var("wt")) - real_part(T.var("zt")),))
    assert not maps_into(M, H, off)


def test_condition_ii():
    for build, status in (
        (selftest._hyperplane, GermStatus.Equal),
        (selftest._complex_line, GermStatus.Equal),
        (selftest._totally_real, GermStatus.StrictlyLarger),
        (selftest._non_cr_target, GermStatus.StrictlyLarger),
    ):
        M, H, _ = build()
        assert condition_ii_check(M, H).status is status


def test_report_hyperplane():
    M, H, Mt = selftest._hyperplane()
    rep = theorem11_report(M, H)
    assert rep.consistent and rep.H_finite and rep.multiplicity == 2
    assert rep.image_smooth == Smooth(1) and rep.image_generic
    assert rep.image_finite_type is not None
    assert rep.real_transversal and rep.cr_transversal and rep.corollary_bound
    assert not rep.M_in_subvariety


def test_report_complex_line():
    M, H, _ = selftest._complex_line()
    rep = theorem11_report(M, H)
    assert rep.consistent and rep.M_in_subvariety
    assert rep.condition_ii.status is GermStatus.Equal
    assert rep.jaccond is False and rep.real_transversal is False
    assert not rep.M_generic


def test_report_totally_real():
    M, H, _ = selftest._totally_real()
    rep = theorem11_report(M, H)
    assert rep.consistent
    assert rep.condition_ii.status is GermStatus.StrictlyLarger
    assert rep.image is not None and rep.image_cr.is_cr_at_0 is False


def test_report_non_cr_target():
    M, H, _ = selftest._non_cr_target()
    rep = theorem11_report(M, H, K=4)
    assert rep.consistent and rep.M_generic
    assert isinstance(rep.M_finite_type, FiniteTypeAtOrder)
    assert rep.condition_ii.status is GermStatus.StrictlyLarger


def _random_hypersurface(rng, rigid=False):
    # Im(w) = real polynomial in z, conj(z), Re(w) without constant or linear terms
    rho = imag_part(w)
    for _ in range(rng.randint(1, 3)):
        a, b, c = rng.randint(0, 2), rng.randint(0, 2), 0 if rigid else rng.randint(0, 1)
        if a + b + c < 2:
            a += 1
            b += 1
        mono = z ** a * zb ** b * real_part(w) ** c
        coeff = rng.randint(-2, 2) + I * rng.randint(-2, 2)
        term = coeff * mono
        rho = rho - real_part(term)
    return RealSubmanifold(P, (rho,))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_generic_hypersurfaces_are_cr_and_symmetric(seed):
    M = _random_hypersurface(random.Random(seed))
    assert is_generic(M)
    assert cr_profile(M).is_cr_at_0
    J = complexify_manifold(M).ideal
    assert all(contains(J, g.conj_swap()) for g in J.generators)
    for L in cr_vector_fields(M):
        assert all(L.apply(r).is_zero() for r in M.rho)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_report_self_consistent(seed):
    rng = random.Random(seed)
    M = _random_hypersurface(rng, rigid=True)
    S = Ring(["z", "w"])
    sz, sw = S.gens()
    k = rng.randint(1, 3)
    H = MapGerm.build(S, [sz ** k, sw], ["zt", "wt"])
    try:
        with work_budget(1_000_000):
            rep = theorem11_report(M, H, K=3)
    except BudgetExceeded:
        assume(False)
    assert rep.consistent, rep.violations
    assert rep.multiplicity == k
