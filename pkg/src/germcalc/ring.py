"""Exact Gaussian-rational polynomials, monomial orders and truncated series.

Everything in this module is immutable once built.  Coefficients live in
Q(i) and are stored as pairs of ``gmpy2.mpq``; a polynomial is a mapping
from exponent tuples to nonzero :class:`Scalar` coefficients over a
:class:`Ring` of named variables.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from gmpy2 import mpq

__all__ = [
    "Scalar",
    "Ring",
    "Poly",
    "MonomialOrder",
    "LEX",
    "DEGREVLEX",
    "NEGDEGREVLEX",
    "TruncatedSeries",
    "poly_compose",
    "normal_form",
    "series_root",
    "I",
]

Exponent = Tuple[int, ...]


class Scalar:
    """Exact Gaussian rational ``re + im*i``."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if type(re) is type(_MPQ0) else _to_mpq(re)
        self.im = im if type(im) is type(_MPQ0) else _to_mpq(im)

    @classmethod
    def coerce(cls, x) -> "Scalar":
        if isinstance(x, Scalar):
            return x
        if isinstance(x, complex):
            raise TypeError("floating complex values are not exact; use Scalar(re, im)")
        return cls(x, 0)

    def __add__(self, other):
        if not isinstance(other, Scalar):
            if isinstance(other, Poly):
                return NotImplemented
            other = Scalar.coerce(other)
        return Scalar(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, Scalar):
            if isinstance(other, Poly):
                return NotImplemented
            other = Scalar.coerce(other)
        return Scalar(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return Scalar.coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Scalar):
            if isinstance(other, Poly):
                return NotImplemented
            other = Scalar.coerce(other)
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b and not d:
            return Scalar(a * c, _MPQ0)
        return Scalar(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        a, b = self.re, self.im
        if not b:
            if not a:
                raise ZeroDivisionError("inverse of zero scalar")
            return Scalar(1 / a, _MPQ0)
        n = a * a + b * b
        return Scalar(a / n, -b / n)

    def __truediv__(self, other):
        return self * Scalar.coerce(other).inverse()

    def __rtruediv__(self, other):
        return Scalar.coerce(other) * self.inverse()

    def __neg__(self):
        return Scalar(-self.re, -self.im)

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conjugate(self) -> "Scalar":
        return Scalar(self.re, -self.im)

    def is_real(self) -> bool:
        return not self.im

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)) or type(other) is type(_MPQ0):
            return not self.im and self.re == other
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(Fraction(int(self.re.numerator), int(self.re.denominator)))
        return hash((str(self.re), str(self.im)))

    def __repr__(self):
        return f"Scalar({self})"

    def __str__(self):
        if not self.im:
            return _fmt_q(self.re)
        if not self.re:
            return _fmt_imag(self.im)
        sign = "-" if self.im < 0 else "+"
        return f"({_fmt_q(self.re)} {sign} {_fmt_imag(abs(self.im))})"


_MPQ0 = mpq(0)


def _to_mpq(x):
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, float):
        raise TypeError("floats are not exact scalars")
    return mpq(x)


def _fmt_q(q) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _fmt_imag(q) -> str:
    if q == 1:
        return "i"
    if q == -1:
        return "-i"
    return f"{_fmt_q(q)}*i"


ZERO = Scalar(0)
ONE = Scalar(1)
I = Scalar(0, 1)


class Ring:
    """An ordered list of variable names, optionally with conjugate pairs.

    ``pairs`` maps holomorphic variable names to their conjugate partners;
    both must be among ``names``.
    """

    __slots__ = ("names", "pairs", "_index", "_swap")

    def __init__(self, names: Iterable[str], pairs: Optional[Dict[str, str]] = None):
        self.names = tuple(names)
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate variable names in {self.names}")
        self._index = {n: k for k, n in enumerate(self.names)}
        self.pairs = dict(pairs or {})
        for a, b in self.pairs.items():
            if a not in self._index or b not in self._index:
                raise ValueError(f"pair ({a}, {b}) not in ring")
        if self.pairs:
            if 2 * len(self.pairs) != len(self.names):
                raise ValueError("a paired ring must pair every variable")
            swap = list(range(len(self.names)))
            for a, b in self.pairs.items():
                swap[self._index[a]] = self._index[b]
                swap[self._index[b]] = self._index[a]
            self._swap = tuple(swap)
        else:
            self._swap = None

    @classmethod
    def paired(cls, names: Sequence[str], suffix: str = "_bar") -> "Ring":
        """Ring ``(Z, Zbar)`` with each ``z`` paired to ``z + suffix``."""
        conj = [n + suffix for n in names]
        return cls(list(names) + conj, dict(zip(names, conj)))

    @property
    def nvars(self) -> int:
        return len(self.names)

    @property
    def holomorphic(self) -> Tuple[str, ...]:
        return tuple(self.pairs)

    @property
    def antiholomorphic(self) -> Tuple[str, ...]:
        return tuple(self.pairs.values())

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown variable {name!r} in ring {self.names}") from None

    def __contains__(self, name) -> bool:
        return name in self._index

    def __len__(self):
        return len(self.names)

    def __eq__(self, other):
        return isinstance(other, Ring) and self.names == other.names and self.pairs == other.pairs

    def __hash__(self):
        return hash(self.names)

    def __repr__(self):
        return f"Ring({list(self.names)})"

    def zero(self) -> "Poly":
        return Poly(self, {})

    def one(self) -> "Poly":
        return self.const(1)

    def const(self, c) -> "Poly":
        c = Scalar.coerce(c)
        return Poly(self, {(0,) * self.nvars: c} if c else {})

    def var(self, name: str) -> "Poly":
        e = [0] * self.nvars
        e[self.index(name)] = 1
        return Poly(self, {tuple(e): ONE})

    def gens(self) -> List["Poly"]:
        return [self.var(n) for n in self.names]

    def monomial(self, exp: Sequence[int], coeff=1) -> "Poly":
        c = Scalar.coerce(coeff)
        return Poly(self, {tuple(exp): c} if c else {})

    def extend(self, names: Iterable[str], front: bool = False) -> "Ring":
        extra = [n for n in names]
        new = extra + list(self.names) if front else list(self.names) + extra
        return Ring(new)

    def unpaired(self) -> "Ring":
        return Ring(self.names)


class Poly:
    """Multivariate polynomial over Q(i) in a fixed :class:`Ring`."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: Ring, terms: Dict[Exponent, Scalar]):
        self.ring = ring
        self.terms = terms

    @classmethod
    def from_terms(cls, ring: Ring, items: Iterable[Tuple[Sequence[int], object]]) -> "Poly":
        acc: Dict[Exponent, Scalar] = {}
        for e, c in items:
            e = tuple(e)
            c = Scalar.coerce(c)
            acc[e] = acc[e] + c if e in acc else c
        return cls(ring, {e: c for e, c in acc.items() if c})

    # basic queries -----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def constant_term(self) -> Scalar:
        return self.terms.get((0,) * self.ring.nvars, ZERO)

    def is_constant(self) -> bool:
        z = (0,) * self.ring.nvars
        return all(e == z for e in self.terms)

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def min_degree(self) -> int:
        return min((sum(e) for e in self.terms), default=-1)

    def degree_in(self, name: str) -> int:
        k = self.ring.index(name)
        return max((e[k] for e in self.terms), default=-1)

    def variables(self) -> List[str]:
        used = [False] * self.ring.nvars
        for e in self.terms:
            for k, a in enumerate(e):
                if a:
                    used[k] = True
        return [n for n, u in zip(self.ring.names, used) if u]

    def coefficient(self, exp: Sequence[int]) -> Scalar:
        return self.terms.get(tuple(exp), ZERO)

    def homogeneous_part(self, d: int) -> "Poly":
        return Poly(self.ring, {e: c for e, c in self.terms.items() if sum(e) == d})

    def truncate(self, d: int) -> "Poly":
        """Drop every term of total degree above ``d``."""
        return Poly(self.ring, {e: c for e, c in self.terms.items() if sum(e) <= d})

    def is_real(self) -> bool:
        return all(c.is_real() for c in self.terms.values())

    # arithmetic --------------------------------------------------------

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.ring is not self.ring and other.ring != self.ring:
                raise ValueError(f"ring mismatch: {self.ring} vs {other.ring}")
            return other
        return self.ring.const(other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            if e in out:
                s = out[e] + c
                if s:
                    out[e] = s
                else:
                    del out[e]
            else:
                out[e] = c
        return Poly(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            c = Scalar.coerce(other)
            if not c:
                return self.ring.zero()
            return Poly(self.ring, {e: v * c for e, v in self.terms.items()})
        other = self._coerce(other)
        if len(self.terms) > len(other.terms):
            a, b = other.terms, self.terms
        else:
            a, b = self.terms, other.terms
        out: Dict[Exponent, Scalar] = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = tuple([x + y for x, y in zip(ea, eb)])
                v = ca * cb
                if e in out:
                    out[e] = out[e] + v
                else:
                    out[e] = v
        return Poly(self.ring, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Poly):
            raise TypeError("polynomial division: use normal_form or exact_divide")
        return self * Scalar.coerce(other).inverse()

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        out = self.ring.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def mul_term(self, exp: Exponent, coeff: Scalar) -> "Poly":
        return Poly(
            self.ring,
            {tuple([x + y for x, y in zip(e, exp)]): c * coeff for e, c in self.terms.items()},
        )

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int, Fraction, Scalar)):
            return self.terms == self.ring.const(other).terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # calculus and substitutions ---------------------------------------

    def diff(self, name: str) -> "Poly":
        k = self.ring.index(name)
        out = {}
        for e, c in self.terms.items():
            if e[k]:
                ne = list(e)
                ne[k] -= 1
                out[tuple(ne)] = c * e[k]
        return Poly(self.ring, out)

    def conjugate_coefficients(self) -> "Poly":
        return Poly(self.ring, {e: c.conjugate() for e, c in self.terms.items()})

    def conj_swap(self) -> "Poly":
        """Swap each variable with its conjugate partner and conjugate coefficients."""
        swap = self.ring._swap
        if swap is None:
            raise ValueError("conj_swap needs a paired ring")
        return Poly(
            self.ring,
            {tuple(e[swap[k]] for k in range(len(e))): c.conjugate() for e, c in self.terms.items()},
        )

    def to_ring(self, ring: Ring) -> "Poly":
        """Re-express in ``ring`` (which must contain every variable used)."""
        if ring == self.ring:
            return Poly(ring, self.terms)
        pos = []
        for k, n in enumerate(self.ring.names):
            pos.append(ring.index(n) if n in ring else None)
        out = {}
        for e, c in self.terms.items():
            ne = [0] * ring.nvars
            for k, a in enumerate(e):
                if a:
                    if pos[k] is None:
                        raise ValueError(f"variable {self.ring.names[k]} missing from {ring}")
                    ne[pos[k]] = a
            out[tuple(ne)] = c
        return Poly(ring, out)

    def subs(self, mapping: Dict[str, "Poly"]) -> "Poly":
        """Substitute some variables by polynomials of the same ring."""
        images = [mapping.get(n, self.ring.var(n)) for n in self.ring.names]
        return poly_compose(self, images)

    def evaluate(self, point: Dict[str, object]) -> Scalar:
        out = ZERO
        vals = [Scalar.coerce(point[n]) for n in self.ring.names]
        for e, c in self.terms.items():
            t = c
            for v, a in zip(vals, e):
                if a:
                    t = t * v ** a
            out = out + t
        return out

    def linear_part(self) -> List[Scalar]:
        n = self.ring.nvars
        row = []
        for k in range(n):
            e = [0] * n
            e[k] = 1
            row.append(self.terms.get(tuple(e), ZERO))
        return row

    # orders ------------------------------------------------------------

    def lead(self, order: "MonomialOrder") -> Tuple[Exponent, Scalar]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        key = order.key
        e = max(self.terms, key=key)
        return e, self.terms[e]

    def lm(self, order: "MonomialOrder") -> Exponent:
        return self.lead(order)[0]

    def lc(self, order: "MonomialOrder") -> Scalar:
        return self.lead(order)[1]

    def monic(self, order: "MonomialOrder") -> "Poly":
        return self * self.lc(order).inverse()

    def sorted_terms(self, order: "MonomialOrder") -> List[Tuple[Exponent, Scalar]]:
        key = order.key
        return sorted(self.terms.items(), key=lambda t: key(t[0]), reverse=True)

    # rendering ---------------------------------------------------------

    def __repr__(self):
        return f"Poly({self})"

    def __str__(self):
        return self.render()

    def render(self, names: Optional[Sequence[str]] = None) -> str:
        """Canonical text: degrevlex-descending terms, lowest-terms rationals."""
        if not self.terms:
            return "0"
        names = names or self.ring.names
        out = []
        for e, c in self.sorted_terms(DEGREVLEX):
            mono = "*".join((n if a == 1 else f"{n}^{a}") for n, a in zip(names, e) if a)
            neg = (not c.im and c.re < 0) or (not c.re and c.im < 0)
            mag = -c if neg else c
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            if not out:
                out.append("-" + body if neg else body)
            else:
                out.append((" - " if neg else " + ") + body)
        return "".join(out)


def _degrevlex_key(e):
    return (sum(e), tuple([-a for a in reversed(e)]))


def _negdegrevlex_key(e):
    return (-sum(e), tuple([-a for a in reversed(e)]))


def _lex_key(e):
    return e


class MonomialOrder:
    """A monomial order given by a sort key (larger key = larger monomial).

    ``kind`` is one of ``lex``, ``degrevlex``, ``negdegrevlex`` or ``block``.
    Block orders compare the first block with its own order, then the next.
    """

    __slots__ = ("kind", "blocks", "key", "is_global", "_name")

    def __init__(self, kind: str, blocks: Optional[Sequence[Tuple[int, "MonomialOrder"]]] = None):
        self.kind = kind
        self.blocks = tuple(blocks or ())
        if kind == "lex":
            self.key = _lex_key
            self.is_global = True
            self._name = "lex"
        elif kind == "degrevlex":
            self.key = _degrevlex_key
            self.is_global = True
            self._name = "degrevlex"
        elif kind == "negdegrevlex":
            self.key = _negdegrevlex_key
            self.is_global = False
            self._name = "negdegrevlex"
        elif kind == "block":
            if not self.blocks:
                raise ValueError("block order needs blocks")
            cuts = []
            start = 0
            for size, sub in self.blocks:
                cuts.append((start, start + size, sub.key))
                start += size
            total = start

            def key(e, cuts=cuts, total=total):
                return tuple(k(e[a:b]) for a, b, k in cuts)

            self.key = key
            self.is_global = all(sub.is_global for _, sub in self.blocks)
            self._name = "block(" + ", ".join(f"{s}:{o._name}" for s, o in self.blocks) + ")"
        else:
            raise ValueError(f"unknown monomial order kind {kind!r}")

    @classmethod
    def block(cls, *blocks: Tuple[int, "MonomialOrder"]) -> "MonomialOrder":
        return cls("block", blocks)

    @classmethod
    def elimination(cls, n_drop: int, n_keep: int, inner: Optional["MonomialOrder"] = None) -> "MonomialOrder":
        inner = inner or DEGREVLEX
        return cls.block((n_drop, inner), (n_keep, inner))

    @property
    def is_local(self) -> bool:
        if self.kind == "negdegrevlex":
            return True
        if self.kind == "block":
            return all(sub.is_local for _, sub in self.blocks)
        return False

    def __eq__(self, other):
        return isinstance(other, MonomialOrder) and self._name == other._name

    def __hash__(self):
        return hash(self._name)

    def __repr__(self):
        return f"MonomialOrder({self._name})"


LEX = MonomialOrder("lex")
DEGREVLEX = MonomialOrder("degrevlex")
NEGDEGREVLEX = MonomialOrder("negdegrevlex")


def poly_compose(p: Poly, images: Sequence[Poly]) -> Poly:
    """Replace the k-th variable of ``p`` by ``images[k]``."""
    if len(images) != p.ring.nvars:
        raise ValueError(f"need {p.ring.nvars} images, got {len(images)}")
    if not images:
        return p
    target = images[0].ring
    for q in images:
        if q.ring != target:
            raise ValueError("images must share one ring")
    if not p.terms:
        return target.zero()
    # cache powers per variable
    powers: List[Dict[int, Poly]] = [dict() for _ in images]

    def power(k: int, a: int) -> Poly:
        cache = powers[k]
        if a not in cache:
            cache[a] = images[k] ** a
        return cache[a]

    out: Dict[Exponent, Scalar] = {}
    for e, c in p.terms.items():
        t = target.const(c)
        for k, a in enumerate(e):
            if a:
                t = t * power(k, a)
        for te, tc in t.terms.items():
            if te in out:
                out[te] = out[te] + tc
            else:
                out[te] = tc
    return Poly(target, {e: c for e, c in out.items() if c})


def _divides(a: Exponent, b: Exponent) -> bool:
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


def normal_form(p: Poly, basis: Sequence[Poly], order: MonomialOrder) -> Tuple[Poly, List[Poly]]:
    """Full multivariate division of ``p`` by ``basis`` under a global order.

    Returns ``(remainder, cofactors)`` with ``p == sum(c*b) + remainder`` and
    no term of the remainder divisible by a leading monomial of the basis.
    Divisors are tried in list order, so the result is deterministic.
    """
    if not order.is_global:
        raise ValueError("normal_form needs a global order; use ideals.mora_normal_form for local ones")
    if not basis:
        raise ValueError("empty basis")
    ring = p.ring
    for b in basis:
        if b.ring != ring:
            raise ValueError("basis and polynomial live in different rings")
    leads = []
    for b in basis:
        if b.is_zero():
            leads.append(None)
        else:
            e, c = b.lead(order)
            leads.append((e, c.inverse()))
    cof: List[Dict[Exponent, Scalar]] = [dict() for _ in basis]
    rem: Dict[Exponent, Scalar] = {}
    h = dict(p.terms)
    key = order.key
    while h:
        e = max(h, key=key)
        c = h[e]
        for k, ld in enumerate(leads):
            if ld is not None and _divides(ld[0], e):
                shift = tuple([x - y for x, y in zip(e, ld[0])])
                q = c * ld[1]
                cof[k][shift] = cof[k].get(shift, ZERO) + q
                for be, bc in basis[k].terms.items():
                    te = tuple([x + y for x, y in zip(be, shift)])
                    v = h.get(te, ZERO) - q * bc
                    if v:
                        h[te] = v
                    else:
                        h.pop(te, None)
                break
        else:
            rem[e] = c
            del h[e]
    cofactors = [Poly(ring, {e: c for e, c in d.items() if c}) for d in cof]
    return Poly(ring, rem), cofactors


def exact_divide(p: Poly, q: Poly) -> Poly:
    """Quotient of an exact polynomial division; raises if ``q`` does not divide ``p``."""
    r, (c,) = normal_form(p, [q], DEGREVLEX)
    if r:
        raise ValueError(f"{q} does not divide {p}")
    return c


class TruncatedSeries:
    """Power series in one variable, kept through degree ``D`` inclusive."""

    __slots__ = ("var", "coeffs", "D")

    DEFAULT_D = 16

    def __init__(self, coeffs: Sequence, D: int = DEFAULT_D, var: str = "t"):
        cs = [Scalar.coerce(c) for c in list(coeffs)[: D + 1]]
        cs += [ZERO] * (D + 1 - len(cs))
        self.coeffs = tuple(cs)
        self.D = D
        self.var = var

    @classmethod
    def from_poly(cls, p: Poly, D: int = DEFAULT_D, var: Optional[str] = None) -> "TruncatedSeries":
        used = p.variables()
        if len(used) > 1:
            raise ValueError("series from a polynomial in more than one variable")
        name = var or (used[0] if used else "t")
        cs = [ZERO] * (D + 1)
        for e, c in p.terms.items():
            d = sum(e)
            if d <= D:
                cs[d] = c
        return cls(cs, D, name)

    @classmethod
    def monomial(cls, n: int, coeff=1, D: int = DEFAULT_D, var: str = "t") -> "TruncatedSeries":
        cs = [ZERO] * (D + 1)
        if n <= D:
            cs[n] = Scalar.coerce(coeff)
        return cls(cs, D, var)

    def _check(self, other: "TruncatedSeries"):
        if not isinstance(other, TruncatedSeries):
            return TruncatedSeries.monomial(0, other, self.D, self.var)
        if other.D != self.D:
            raise ValueError("truncation degrees differ")
        return other

    def __getitem__(self, k):
        return self.coeffs[k]

    def __add__(self, other):
        other = self._check(other)
        return TruncatedSeries([a + b for a, b in zip(self.coeffs, other.coeffs)], self.D, self.var)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries([-a for a in self.coeffs], self.D, self.var)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            c = Scalar.coerce(other)
            return TruncatedSeries([a * c for a in self.coeffs], self.D, self.var)
        other = self._check(other)
        D = self.D
        out = [ZERO] * (D + 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j in range(D + 1 - i):
                b = other.coeffs[j]
                if b:
                    out[i + j] = out[i + j] + a * b
        return TruncatedSeries(out, D, self.var)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = TruncatedSeries.monomial(0, 1, self.D, self.var)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        return isinstance(other, TruncatedSeries) and self.D == other.D and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.coeffs, self.D))

    def order(self) -> Optional[int]:
        """Index of the first nonzero coefficient, or None for the zero series."""
        for k, c in enumerate(self.coeffs):
            if c:
                return k
        return None

    def is_zero(self) -> bool:
        return self.order() is None

    def support(self) -> List[int]:
        return [k for k, c in enumerate(self.coeffs) if c]

    def inverse(self) -> "TruncatedSeries":
        a0 = self.coeffs[0]
        if not a0:
            raise ZeroDivisionError("series with zero constant term is not invertible")
        inv0 = a0.inverse()
        out = [inv0]
        for n in range(1, self.D + 1):
            s = ZERO
            for k in range(1, n + 1):
                if self.coeffs[k]:
                    s = s + self.coeffs[k] * out[n - k]
            out.append(-s * inv0)
        return TruncatedSeries(out, self.D, self.var)

    def shift_down(self, k: int) -> "TruncatedSeries":
        """Divide by ``t**k``; the top ``k`` coefficients become unknown and are zeroed."""
        if any(self.coeffs[:k]):
            raise ValueError(f"series is not divisible by {self.var}^{k}")
        return TruncatedSeries(self.coeffs[k:], self.D, self.var)

    def compose(self, inner: "TruncatedSeries") -> "TruncatedSeries":
        """``self(inner(t))`` for ``inner`` without constant term."""
        inner = self._check(inner)
        if inner.coeffs[0]:
            raise ValueError("inner series must vanish at 0")
        out = TruncatedSeries.monomial(0, self.coeffs[0], self.D, self.var)
        pw = TruncatedSeries.monomial(0, 1, self.D, self.var)
        for k in range(1, self.D + 1):
            pw = pw * inner
            if self.coeffs[k]:
                out = out + pw * self.coeffs[k]
        return out

    def reversion(self) -> "TruncatedSeries":
        """Compositional inverse of a series ``a1*t + ...`` with ``a1 != 0``."""
        if self.coeffs[0] or not self.coeffs[1]:
            raise ValueError("reversion needs order exactly 1")
        # solve t = self(r(t)) by fixed point r = (t - (self - a1 t)(r)) / a1
        a1inv = self.coeffs[1].inverse()
        rest = TruncatedSeries([ZERO, ZERO] + list(self.coeffs[2:]), self.D, self.var)
        t = TruncatedSeries.monomial(1, 1, self.D, self.var)
        r = t * a1inv
        for _ in range(self.D):
            r = (t - rest.compose(r)) * a1inv
        return r

    def to_poly(self, ring: Ring, name: Optional[str] = None) -> Poly:
        k = ring.index(name or self.var)
        items = []
        for d, c in enumerate(self.coeffs):
            if c:
                e = [0] * ring.nvars
                e[k] = d
                items.append((e, c))
        return Poly.from_terms(ring, items)

    def __repr__(self):
        body = " + ".join(f"{c}*{self.var}^{k}" for k, c in enumerate(self.coeffs) if c) or "0"
        return f"TruncatedSeries({body}, D={self.D})"


def series_root(s: TruncatedSeries, m: int) -> TruncatedSeries:
    """The m-th root ``u`` of ``s`` with ``u(0) = 1``, through degree ``s.D``.

    Uses the power recurrence ``n*u_n = sum_k ((a+1)k - n) s_k u_{n-k}`` with
    ``a = 1/m``, valid because ``s_0 = 1``.
    """
    if m < 1:
        raise ValueError("root index must be at least 1")
    if s.coeffs[0] != 1:
        raise ValueError("series_root needs constant term 1")
    if m == 1:
        return s
    alpha = Scalar(mpq(1, m))
    out = [ONE]
    for n in range(1, s.D + 1):
        acc = ZERO
        for k in range(1, n + 1):
            sk = s.coeffs[k]
            if sk:
                acc = acc + ((alpha + 1) * k - n) * sk * out[n - k]
        out.append(acc / n)
    return TruncatedSeries(out, s.D, s.var)
