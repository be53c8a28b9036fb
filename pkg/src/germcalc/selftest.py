"""Acceptance criteria as executable checks, shared by ``germcalc selftest`` and the test suite.

Every criterion returns a mapping from a short label to a boolean; a
criterion passes when all its labels are true.  Values are exact.
"""

from __future__ import annotations

import random
from typing import Callable, Dict, List, Tuple

from . import cli, crgeom, curve, germmap, ideals
from .ideals import GermStatus, IdealHandle, Smooth
from .ring import DEGREVLEX, I, Poly, Ring, Scalar, poly_compose

Checks = Dict[str, bool]


def _ring(*names) -> Ring:
    return Ring(list(names))


def same_germ(I1: IdealHandle, I2: IdealHandle) -> bool:
    return ideals.germ_set_equal(I1, I2).status is GermStatus.Equal


def fold() -> Checks:
    R = _ring("z", "w")
    z, w = R.gens()
    f = germmap.MapGerm.build(R, [z ** 2 + w ** 2, z * w], ["xi", "eta"])
    X = IdealHandle(R, [w])
    img = germmap.image_ideal(f, X)
    eta = f.target.var("eta")
    v = germmap.preimage_closure_equals(f, X)
    comp = IdealHandle(R, v.component)
    return {
        "image is <eta>": same_germ(img, IdealHandle(f.target, [eta])),
        "preimage strictly larger": v.status is GermStatus.StrictlyLarger,
        "witness w fails radical membership": v.witness == w,
        "witness component is {z = 0}": same_germ(comp, IdealHandle(R, [z])),
    }


def _complex_line():
    Z = Ring.paired(["z1", "z2"])
    M = crgeom.RealSubmanifold.from_complex_equations(Z, [Z.var("z2")])
    S = _ring("z1", "z2")
    H = germmap.MapGerm.build(S, [S.var("z1"), S.var("z2") ** 2], ["u1", "u2"])
    T = Ring.paired(["u1", "u2"])
    Mt = crgeom.RealSubmanifold.from_complex_equations(T, [T.var("u2")])
    return M, H, Mt


def complex_line() -> Checks:
    M, H, Mt = _complex_line()
    cH, cM = crgeom.complexify_map(H), crgeom.complexify_manifold(M)
    img = germmap.image_ideal(cH, cM.ideal)
    rep = crgeom.theorem11_report(M, H)
    return {
        "(ii) Equal": crgeom.condition_ii_check(M, H).status is GermStatus.Equal,
        "complexified image Smooth(2)": ideals.is_smooth_germ(img) == Smooth(2),
        "not transversal": germmap.transversal_at(H, Mt) is False,
        "jaccond false": germmap.jaccond_check(cH, cM.ideal) is False,
        "report: M in {z2 = 0}": rep.M_in_subvariety and rep.real_transversal is False and rep.consistent,
    }


def _non_cr_target():
    R = Ring.paired(["z", "w1", "w2"])
    z, w1, w2, zb, w1b, w2b = R.gens()
    M = crgeom.RealSubmanifold(
        R, (crgeom.imag_part(w1) - z * zb / 2, crgeom.imag_part(w2) - (z * zb) ** 2 / 2)
    )
    S = _ring("z", "w1", "w2")
    a, b, c = S.gens()
    H = germmap.MapGerm.build(S, [a, b + I * c, (b - I * c) ** 2], ["zt1", "zt2", "wt"])
    T = Ring.paired(["zt1", "zt2", "wt"])
    x1, x2, y, x1b, x2b, yb = T.gens()
    Mt = crgeom.RealSubmanifold.from_complex_equations(T, [y - (x2b + I * x1 * x1b + (x1 * x1b) ** 2) ** 2])
    return M, H, Mt


def non_cr_target() -> Checks:
    M, H, Mt = _non_cr_target()
    ft = crgeom.finite_type_check(M, 4)
    return {
        "M generic": crgeom.is_generic(M),
        "M finite type at order <= 4": isinstance(ft, crgeom.FiniteTypeAtOrder) and ft.order <= 4,
        "H(M) inside Mt": crgeom.maps_into(M, H, Mt),
        "Mt not CR at 0": crgeom.cr_profile(Mt).is_cr_at_0 is False,
        "(ii) StrictlyLarger": crgeom.condition_ii_check(M, H).status is GermStatus.StrictlyLarger,
    }


def _totally_real():
    R = Ring.paired(["w1", "w2"])
    M = crgeom.RealSubmanifold(R, (crgeom.imag_part(R.var("w1")), crgeom.imag_part(R.var("w2"))))
    S = _ring("w1", "w2")
    a, b = S.gens()
    H = germmap.MapGerm.build(S, [a + I * b, (a - I * b) ** 2], ["z", "w"])
    T = Ring.paired(["z", "w"])
    image = crgeom.RealSubmanifold.from_complex_equations(T, [T.var("w") - T.var("z_bar") ** 2])
    return M, H, image


def totally_real() -> Checks:
    M, H, image = _totally_real()
    rep = crgeom.theorem11_report(M, H)
    return {
        "multiplicity 2": germmap.multiplicity(H) == 2,
        "(ii) StrictlyLarger": crgeom.condition_ii_check(M, H).status is GermStatus.StrictlyLarger,
        "image {w = conj(z)^2} not CR at 0": crgeom.cr_profile(image).is_cr_at_0 is False,
        "extracted image agrees": rep.image is not None and crgeom.cr_profile(rep.image).is_cr_at_0 is False,
    }


def _hyperplane():
    R = Ring.paired(["z", "w"])
    M = crgeom.RealSubmanifold(R, (crgeom.imag_part(R.var("w")),))
    S = _ring("z", "w")
    H = germmap.MapGerm.build(S, [S.var("z") ** 2, S.var("w")], ["zt", "wt"])
    T = Ring.paired(["zt", "wt"])
    Mt = crgeom.RealSubmanifold(T, (crgeom.imag_part(T.var("wt")),))
    return M, H, Mt


def hyperplane() -> Checks:
    M, H, Mt = _hyperplane()
    rep = crgeom.theorem11_report(M, H)
    return {
        "(ii) Equal": rep.condition_ii.status is GermStatus.Equal,
        "image smooth": isinstance(rep.image_smooth, Smooth) and rep.image is not None,
        "image generic": rep.image_generic is True,
        "real transversal": crgeom.real_transversal(H, Mt),
        "CR transversal": crgeom.cr_transversal_check(H, Mt),
        "multiplicity 2": rep.multiplicity == 2,
        "rank 1 >= codim 1": rep.jacobian_rank == 1 and M.d == 1 and rep.corollary_bound,
        "consistent": rep.consistent,
    }


def multiplicities() -> Checks:
    R = _ring("z", "w")
    z, w = R.gens()
    X1 = _ring("x")
    x = X1.gens()[0]
    out = {
        "(z^2, w^3) -> 6": germmap.multiplicity(germmap.MapGerm.build(R, [z ** 2, w ** 3])) == 6,
        "(z^2 + w^2, zw) -> 4": germmap.multiplicity(germmap.MapGerm.build(R, [z ** 2 + w ** 2, z * w])) == 4,
        "z - z^2 -> 1": germmap.multiplicity(germmap.MapGerm.build(X1, [x - x ** 2])) == 1,
    }
    for name, (f, X) in corpus_pairs().items():
        try:
            nf = germmap.normal_form_along_X(f, X)
        except germmap.HypothesisFailure:
            continue
        y = nf.straightening.y
        fs = f.compose_after(nf.straightening.substitution)
        out[f"restricted multiplicity {name}"] = germmap.restricted_multiplicity(fs, y) == germmap.multiplicity(f)
    return out


def corpus_pairs() -> Dict[str, Tuple[germmap.MapGerm, IdealHandle]]:
    """Every (map, variety) pair named together in a corpus check."""
    pairs = {}
    for sf in sorted(cli.corpus_dir().glob("*.germ")):
        s = cli.load_session(sf)
        for c in s.checks:
            if len(c.args) >= 2 and c.args[0] in s.maps and c.args[1] in s.varieties:
                f = s.get_map(c.args[0])
                pairs[f"{sf.stem}:{c.args[0]}:{c.args[1]}"] = (f, s.get_variety(c.args[1], f.source))
    return pairs


def normal_form() -> Checks:
    R = _ring("x", "y")
    x, y = R.gens()
    f = germmap.MapGerm.build(R, [x, y + x ** 2])
    sm = germmap.split_target(f, ["y"])
    g = germmap.compute_g(sm)
    xi = g[0].ring.gens()[0]
    nf = germmap.normal_form_along_X(f, IdealHandle(R, [y]))
    rebuilt = [poly_compose(c, list(f.components)) for c in nf.target_change]
    return {
        "g = xi^2": len(g) == 1 and g[0] == xi ** 2,
        "S0 = g(R0)": poly_compose(g[0], sm.R0) == sm.S0[0],
        "final map (x, y)": list(nf.final_map.components) == [x, y],
        "reconstruction": rebuilt == list(nf.final_map.components),
    }


def curves() -> Checks:
    R = _ring("z", "w")
    z, w = R.gens()
    a = curve.curve_image_decision(germmap.MapGerm.build(R, [z ** 2, w]), ["w"])
    b = curve.curve_image_decision(germmap.MapGerm.build(R, [z ** 2, z ** 3 + w]), ["w"])
    c = curve.curve_image_decision(germmap.MapGerm.build(R, [z ** 3, z ** 6 + w]), ["w"])
    extra = IdealHandle(R, b.preimage.component)
    return {
        "(t^2, 0): q = m = 2, smooth": (a.q, a.m, a.verdict) == (2, 2, curve.CurveVerdict.SmoothImage),
        "(t^2, t^3): q = 1 < 2, larger": (b.q, b.m, b.verdict) == (1, 2, curve.CurveVerdict.PreimageStrictlyLarger),
        "(t^2, t^3): extra {w = -2z^3}": same_germ(extra, IdealHandle(R, [w + 2 * z ** 3])),
        "(t^3, t^6): q = m = 3, smooth": (c.q, c.m, c.verdict) == (3, 3, curve.CurveVerdict.SmoothImage),
    }


def weierstrass() -> Checks:
    R = _ring("z", "w")
    z, w = R.gens()
    f = germmap.MapGerm.build(R, [z ** 2, w])
    wa = curve.weierstrass_along_curve(f, ["w"])
    t, xv = wa.R.ring.gens()
    sep = curve.find_separating_function(f, ["w"])
    g = germmap.MapGerm.build(R, [z ** 2 + w ** 2, z * w])
    wb = curve.weierstrass_along_curve(g, ["w"])
    t2, x2 = wb.R.ring.gens()
    return {
        "R = x^2 - t^2": wa.R == xv ** 2 - t ** 2,
        "(j, c) = (2, -1)": (sep.j, sep.c) == (2, Scalar(-1)),
        "R = x^4 - t^2 x^2": wb.R == x2 ** 4 - t2 ** 2 * x2 ** 2,
        "0 is a root": wb.zero_is_root,
    }


def roots_of_unity(trials: int = 200, seed: int = 43) -> Checks:
    rng = random.Random(seed)
    ok_j = ok_cert = True
    for _ in range(trials):
        p = rng.randint(1, 6)
        q = rng.randint(1, p)
        exps = [rng.randrange(q) for _ in range(p)]
        r = curve.roots_of_unity_coeff(exps, q)
        ok_j &= 1 <= r.j <= q and bool(r.coefficient)
        ok_cert &= r.certificate == p
    return {"j <= q": ok_j, "power-sum certificate = p": ok_cert}


def symmetric(trials: int = 50, seed: int = 11) -> Checks:
    sums = curve.newton_power_sums(3, 3)
    c1, c2, c3 = sums[0].ring.gens()
    rng = random.Random(seed)
    round_trip = True
    for _ in range(trials):
        p = rng.randint(1, 5)
        W = Ring([f"w{k}" for k in range(1, p + 1)])
        es = [curve.elementary(W, j) for j in range(1, p + 1)]
        d = W.zero()
        for _ in range(rng.randint(1, 3)):
            # monomial in e_1..e_p of total w-degree <= 5
            term = W.const(rng.choice([-3, -1, 1, 2]))
            budget = rng.randint(0, 5)
            while budget > 0:
                j = rng.randint(1, min(p, budget))
                term = term * es[j - 1]
                budget -= j
            d = d + term
        a = curve.sym_express(d)
        round_trip &= poly_compose(a, curve.signed_coefficients(W)) == d
    return {
        "p1 = -c1": sums[0] == -c1,
        "p2 = c1^2 - 2 c2": sums[1] == c1 ** 2 - 2 * c2,
        "p3 = -c1^3 + 3 c1 c2 - 3 c3": sums[2] == -(c1 ** 3) + 3 * c1 * c2 - 3 * c3,
        "sym_express round trip": round_trip,
    }


def random_ideal(rng: random.Random, ring: Ring, max_deg: int = 4, max_gens: int = 3) -> List[Poly]:
    gens = []
    for _ in range(rng.randint(1, max_gens)):
        p = ring.zero()
        for _ in range(rng.randint(1, 3)):
            e = [0] * ring.nvars
            for _ in range(rng.randint(0, max_deg)):
                e[rng.randrange(ring.nvars)] += 1
            p = p + ring.monomial(e, rng.randint(-3, 3) or 1)
        if p:
            gens.append(p)
    return gens or [ring.var(ring.names[0])]


def engine(trials: int = 100, seed: int = 7) -> Checks:
    from .ring import normal_form as reduce_by

    rng = random.Random(seed)
    R = _ring("x", "y", "z")
    spolys = shuffle = elim = True
    for _ in range(trials):
        gens = random_ideal(rng, R)
        J = IdealHandle(R, gens)
        basis = J.standard_basis(DEGREVLEX)
        for a in range(len(basis)):
            for b in range(a + 1, len(basis)):
                s = ideals.s_polynomial(basis[a], basis[b], DEGREVLEX)
                spolys &= reduce_by(s, basis, DEGREVLEX)[0].is_zero()
        probe = random_ideal(rng, R, 3, 1)[0] * gens[0] + gens[-1]
        mixed = list(gens)
        rng.shuffle(mixed)
        K = IdealHandle(R, mixed)
        for p in (probe, probe + R.one(), R.var("x") * gens[0]):
            shuffle &= ideals.contains(J, p) == ideals.contains(K, p)
        E = ideals.eliminate(J, ["x"])
        for g in E.generators:
            elim &= g.degree_in("x") == 0 if "x" in g.ring else True
            elim &= ideals.contains(J, g.to_ring(R))
    return {"S-polynomials reduce to 0": spolys, "membership shuffle-invariant": shuffle, "elimination sound": elim}


def watchdog(seeds=(1, 2, 3)) -> Checks:
    out = {}
    for sf in sorted(cli.corpus_dir().glob("*.germ")):
        s = cli.load_session(sf)
        for c in s.checks:
            if c.directive == "thm11":
                rep = crgeom.theorem11_report(s.get_manifold(c.args[0]), s.get_map(c.args[1]), c.params.get("K", 6))
                out[f"{sf.stem}: {c.render()}"] = rep.consistent
    for seed in seeds:
        try:
            cli.explore_question(seed, 10, 3)
            out[f"explore seed {seed}"] = True
        except cli.WatchdogViolation:
            out[f"explore seed {seed}"] = False
    return out


CRITERIA: List[Tuple[str, Callable[[], Checks]]] = [
    ("1 fold of the plane", fold),
    ("2 manifold in a complex line", complex_line),
    ("3 image not CR", non_cr_target),
    ("4 totally real plane", totally_real),
    ("5 hyperplane case", hyperplane),
    ("6 multiplicities", multiplicities),
    ("7 normal form", normal_form),
    ("8 curves", curves),
    ("9 Weierstrass polynomials", weierstrass),
    ("10 roots of unity", roots_of_unity),
    ("11 symmetric functions", symmetric),
    ("12 engine", engine),
    ("13 watchdog", watchdog),
]


def run_criteria():
    for name, fn in CRITERIA:
        checks = fn()
        bad = [k for k, v in checks.items() if not v]
        yield f"criterion {name}", not bad, ", ".join(bad)
