import sympy as sp
from gmpy2 import mpq
from hypothesis import strategies as st

from germcalc.ring import Poly, Ring, Scalar


def to_sympy(p: Poly):
    syms = sp.symbols(p.ring.names)
    if not isinstance(syms, (list, tuple)):
        syms = (syms,)
    out = sp.Integer(0)
    for e, c in p.terms.items():
        coeff = sp.Rational(int(c.re.numerator), int(c.re.denominator)) + sp.I * sp.Rational(
            int(c.im.numerator), int(c.im.denominator)
        )
        mono = sp.Integer(1)
        for s, a in zip(syms, e):
            mono *= s ** a
        out += coeff * mono
    return sp.expand(out)


def from_sympy(expr, ring: Ring) -> Poly:
    syms = sp.symbols(ring.names)
    if not isinstance(syms, (list, tuple)):
        syms = (syms,)
    P = sp.Poly(sp.expand(expr), *syms)
    terms = []
    for e, c in P.terms():
        re, im = sp.re(c), sp.im(c)
        terms.append((e, Scalar(mpq(int(re.p), int(re.q)), mpq(int(im.p), int(im.q)))))
    return Poly.from_terms(ring, terms)


small_ints = st.integers(min_value=-4, max_value=4)


@st.composite
def scalars(draw):
    return Scalar(mpq(draw(small_ints), draw(st.integers(1, 3))), mpq(draw(small_ints), draw(st.integers(1, 3))))


@st.composite
def polys(draw, ring: Ring, max_terms: int = 4, max_deg: int = 3, real: bool = False):
    terms = []
    for _ in range(draw(st.integers(0, max_terms))):
        e = tuple(draw(st.integers(0, max_deg)) for _ in ring.names)
        c = Scalar(draw(small_ints)) if real else draw(scalars())
        terms.append((e, c))
    return Poly.from_terms(ring, terms)


_criteria = {}


def pytest_runtest_logreport(report):
    name = report.nodeid.rsplit("::", 1)[-1]
    if name.startswith("test_criterion_") and (report.when == "call" or report.outcome != "passed"):
        _criteria[name] = _criteria.get(name, "PASS") if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_criteria):
        num, label = name[len("test_criterion_"):].split("_", 1)
        terminalreporter.write_line(f"criterion {int(num):2d} {label.replace('_', ' '):<18} {_criteria[name]}")
