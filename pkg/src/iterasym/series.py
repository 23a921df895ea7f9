"""Exact algebra over truncated asymptotic scales.

A series here is a finite sum of terms

    Q(C) * ln(k)^m * k^(-alpha)

with alpha rational, m a nonnegative integer, and Q a polynomial in the
formal symbol C with exact rational coefficients.  Everything in this module
is exact: no floating point enters, so coefficient identities can be asserted
as rational equalities.

A series carries a truncation order: terms with alpha beyond it are unknown,
not zero.  Arithmetic tracks truncation so that no inexact term is ever kept;
multiplying by a series of positive leading order *extends* the reliable
range, which the product rule accounts for.
"""
from __future__ import annotations

import math
from fractions import Fraction

__all__ = [
    "CoeffPoly",
    "TermKey",
    "AsymptoticSeries",
    "C",
    "monomial",
    "compose_analytic",
    "binomial",
]

INF = Fraction(10 ** 9)  # effective "exact" truncation order


def _as_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"expected exact rational, got {type(x).__name__}: {x!r}")


# ---------------------------------------------------------------------------
# polynomials in C
# ---------------------------------------------------------------------------

def _pnorm(cs):
    cs = list(cs)
    while cs and cs[-1] == 0:
        cs.pop()
    return tuple(cs)


def _padd(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] += c
    return _pnorm(out)


def _pmul(a, b):
    if not a or not b:
        return ()
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return _pnorm(out)


def _pscale(a, s):
    if s == 0:
        return ()
    return tuple(c * s for c in a)


class CoeffPoly:
    """Polynomial in the symbol C, exact rational coefficients, normalized."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        if isinstance(coeffs, CoeffPoly):
            self.coeffs = coeffs.coeffs
            return
        if isinstance(coeffs, (int, Fraction, str)):
            coeffs = (_as_fraction(coeffs),)
        self.coeffs = _pnorm(_as_fraction(c) for c in coeffs)

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    def is_rational(self):
        return len(self.coeffs) <= 1

    def as_rational(self):
        if not self.coeffs:
            return Fraction(0)
        if len(self.coeffs) == 1:
            return self.coeffs[0]
        raise ValueError(f"{self} is not a constant")

    def __add__(self, other):
        return CoeffPoly(_padd(self.coeffs, CoeffPoly(other).coeffs))

    __radd__ = __add__

    def __neg__(self):
        return CoeffPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-CoeffPoly(other))

    def __rsub__(self, other):
        return CoeffPoly(other) + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CoeffPoly(_pscale(self.coeffs, _as_fraction(other)))
        return CoeffPoly(_pmul(self.coeffs, CoeffPoly(other).coeffs))

    __rmul__ = __mul__

    def __truediv__(self, s):
        return CoeffPoly(_pscale(self.coeffs, 1 / _as_fraction(s)))

    def __eq__(self, other):
        return self.coeffs == CoeffPoly(other).coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __bool__(self):
        return bool(self.coeffs)

    def derivative(self):
        return CoeffPoly(tuple(i * c for i, c in enumerate(self.coeffs) if i))

    def eval_at(self, value):
        """Horner evaluation; value may be any ring element (mpfr, Fraction)."""
        out = None
        for c in reversed(self.coeffs):
            out = c if out is None else out * value + c
        return out if out is not None else 0 * value

    def __str__(self):
        if not self.coeffs:
            return "0"
        bits = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            if i == 0:
                bits.append(str(c))
            else:
                mono = "C" if i == 1 else f"C^{i}"
                if c == 1:
                    bits.append(mono)
                elif c == -1:
                    bits.append(f"-{mono}")
                else:
                    bits.append(f"{c}*{mono}")
        out = " + ".join(bits)
        return out.replace("+ -", "- ")

    def __repr__(self):
        return f"CoeffPoly({self})"


C = CoeffPoly((0, 1))


def binomial(e, j):
    """binom(e, j) for rational e, integer j >= 0."""
    e = _as_fraction(e)
    out = Fraction(1)
    for i in range(j):
        out = out * (e - i) / (i + 1)
    return out


# ---------------------------------------------------------------------------
# term keys
# ---------------------------------------------------------------------------

class TermKey(tuple):
    """(alpha, ln_power): exponent of 1/k and power of ln(k)."""

    __slots__ = ()

    def __new__(cls, alpha, ln_power=0):
        ln_power = int(ln_power)
        if ln_power < 0:
            raise ValueError("ln_power must be nonnegative")
        return super().__new__(cls, (_as_fraction(alpha), ln_power))

    @property
    def alpha(self):
        return self[0]

    @property
    def ln_power(self):
        return self[1]

    def sort_key(self):
        # alpha ascending, ln power descending
        return (self[0], -self[1])

    def __repr__(self):
        return f"TermKey({self[0]}, {self[1]})"


# ---------------------------------------------------------------------------
# series
# ---------------------------------------------------------------------------

class AsymptoticSeries:
    """Truncated sum of CoeffPoly * ln(k)^m * k^(-alpha) terms.

    ``truncation_order`` is the largest alpha whose coefficient is reliable;
    deeper terms are unknown.  Construction drops zero coefficients and any
    term beyond the truncation order.
    """

    __slots__ = ("terms", "truncation_order")

    def __init__(self, terms=None, truncation_order=INF):
        truncation_order = _as_fraction(truncation_order)
        data = {}
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            for key, poly in items:
                if not isinstance(key, TermKey):
                    key = TermKey(*key)
                poly = CoeffPoly(poly)
                if poly.is_zero() or key.alpha > truncation_order:
                    continue
                data[key] = (data[key] + poly) if key in data else poly
        self.terms = {k: v for k, v in data.items() if not v.is_zero()}
        self.truncation_order = truncation_order

    # -- inspection ---------------------------------------------------------

    def sorted_keys(self):
        return sorted(self.terms, key=TermKey.sort_key)

    def leading_key(self):
        ks = self.sorted_keys()
        return ks[0] if ks else None

    def min_alpha(self):
        return min((k.alpha for k in self.terms), default=None)

    def coefficient(self, alpha, ln_power=0):
        return self.terms.get(TermKey(alpha, ln_power), CoeffPoly())

    def is_zero(self):
        return not self.terms

    def __iter__(self):
        for k in self.sorted_keys():
            yield k, self.terms[k]

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        return (isinstance(other, AsymptoticSeries) and self.terms == other.terms)

    # -- ring operations ----------------------------------------------------

    def _common_order(self, other):
        return min(self.truncation_order, other.truncation_order)

    def __add__(self, other):
        if isinstance(other, (int, Fraction, CoeffPoly)):
            other = AsymptoticSeries({TermKey(0, 0): CoeffPoly(other)})
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out[k] + v if k in out else v
        return AsymptoticSeries(out, self._common_order(other))

    __radd__ = __add__

    def __neg__(self):
        return AsymptoticSeries({k: -v for k, v in self.terms.items()},
                                self.truncation_order)

    def __sub__(self, other):
        return self + (-other if isinstance(other, AsymptoticSeries)
                       else AsymptoticSeries({TermKey(0, 0): -CoeffPoly(other)}))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, CoeffPoly)):
            return self.scale(other)
        # unknown tail of one factor meets leading term of the other
        cap = self.truncation_order
        ocap = other.truncation_order
        a0 = self.min_alpha()
        b0 = other.min_alpha()
        if a0 is None or b0 is None:
            cap = min(cap, ocap)
        else:
            cap = min(cap + b0, ocap + a0)
        out = {}
        for ka, va in self.terms.items():
            for kb, vb in other.terms.items():
                alpha = ka.alpha + kb.alpha
                if alpha > cap:
                    continue
                key = TermKey(alpha, ka.ln_power + kb.ln_power)
                prod = va * vb
                out[key] = out[key] + prod if key in out else prod
        return AsymptoticSeries(out, cap)

    __rmul__ = __mul__

    def scale(self, factor):
        factor = CoeffPoly(factor)
        return AsymptoticSeries({k: v * factor for k, v in self.terms.items()},
                                self.truncation_order)

    def truncate(self, order):
        order = _as_fraction(order)
        return AsymptoticSeries(
            {k: v for k, v in self.terms.items() if k.alpha <= order},
            min(order, self.truncation_order))

    # -- shift of argument: k -> k + direction ------------------------------

    def shift_k(self, direction=1, order=None):
        """Series for a(k+1) (or a(k-1)) re-expanded in 1/k and ln k.

        Each term re-expands through ``order`` (defaults to the truncation
        order); for an exact series an explicit order is required.
        """
        if direction not in (1, -1):
            raise ValueError("direction must be +1 or -1")
        if order is None:
            order = self.truncation_order
        order = _as_fraction(order)
        if order >= INF:
            raise ValueError("shift of an exact series needs an explicit order")
        d = direction
        out = {}
        for key, poly in self.terms.items():
            al, m = key.alpha, key.ln_power
            if al > order:
                continue
            rel = order - al
            depth = int(math.floor(rel)) + 1
            # (1 + d/k)^(-al)
            pow_part = {TermKey(i, 0): CoeffPoly(binomial(-al, i) * d ** i)
                        for i in range(depth + 1)}
            pow_ser = AsymptoticSeries(pow_part, rel)
            if m:
                # (L + ln(1 + d/k))^m
                log_ser = AsymptoticSeries(
                    {TermKey(i, 0): CoeffPoly(Fraction(-((-d) ** i), i))
                     for i in range(1, depth + 1)}, rel)
                ln_part = AsymptoticSeries({TermKey(0, m): CoeffPoly(1)}, rel)
                bpow = AsymptoticSeries({TermKey(0, 0): CoeffPoly(1)}, rel)
                for t in range(1, m + 1):
                    bpow = bpow * log_ser
                    contrib = AsymptoticSeries(
                        {TermKey(k2.alpha, k2.ln_power + m - t):
                         v * binomial(m, t)
                         for k2, v in bpow.terms.items()}, rel)
                    ln_part = ln_part + contrib
                pow_ser = pow_ser * ln_part
            for k2, v in pow_ser.terms.items():
                alpha = al + k2.alpha
                if alpha > order:
                    continue
                nk = TermKey(alpha, k2.ln_power)
                prod = v * poly
                out[nk] = out[nk] + prod if nk in out else prod
        cap = min(order, self.truncation_order)
        return AsymptoticSeries(out, cap)

    # -- powers with rational exponent --------------------------------------

    def pow(self, exponent, order=None):
        """self**e for rational e, by factoring out the leading monomial.

        The leading term must be ln-free with a rational coefficient whose
        e-th power is again rational (callers arrange their series, e.g. by
        rescaling, so that this holds).
        """
        e = _as_fraction(exponent)
        lead = self.leading_key()
        if lead is None:
            raise ValueError("cannot raise the zero series to a power")
        if lead.ln_power != 0:
            raise ValueError("leading term carries a ln factor")
        cpoly = self.terms[lead]
        if not cpoly.is_rational():
            raise ValueError("leading coefficient depends on C")
        c = cpoly.as_rational()
        ce = _rational_pow(c, e)
        a0 = lead.alpha
        if order is None:
            order = self.truncation_order + a0 * (e - 1)
        order = _as_fraction(order)
        rel = order - a0 * e
        u_terms = {TermKey(k.alpha - a0, k.ln_power): v / c
                   for k, v in self.terms.items() if k != lead}
        u = AsymptoticSeries(u_terms, min(self.truncation_order - a0, rel))
        acc = AsymptoticSeries({TermKey(0, 0): CoeffPoly(1)}, u.truncation_order)
        if not u.is_zero():
            mu = u.min_alpha()
            if mu <= 0:
                raise ValueError("series has a constant or growing remainder")
            jmax = int(math.floor(rel / mu)) + 1
            upow = AsymptoticSeries({TermKey(0, 0): CoeffPoly(1)}, INF)
            for j in range(1, jmax + 1):
                upow = (upow * u).truncate(rel)
                if upow.is_zero():
                    break
                acc = acc + upow.scale(binomial(e, j))
        shifted = {TermKey(k.alpha + a0 * e, k.ln_power): v * ce
                   for k, v in acc.terms.items()}
        return AsymptoticSeries(shifted, min(order, acc.truncation_order + a0 * e))

    def __pow__(self, exponent):
        return self.pow(exponent)

    # -- numeric evaluation ---------------------------------------------------

    def as_c_polynomial(self):
        """Regroup as {C-power: list of (alpha, ln_power, Fraction)}."""
        out = {}
        for key, poly in self.terms.items():
            for i, c in enumerate(poly.coeffs):
                if c:
                    out.setdefault(i, []).append((key.alpha, key.ln_power, c))
        return out

    # -- rendering ----------------------------------------------------------

    def render_text(self):
        if not self.terms:
            return "0"
        bits = []
        for key in self.sorted_keys():
            poly = self.terms[key]
            ps = str(poly)
            if ("+" in ps or "-" in ps[1:]) or (poly.degree >= 1 and len(poly.coeffs) > 1):
                ps = f"({ps})"
            factors = [ps] if ps != "1" else []
            if key.ln_power == 1:
                factors.append("ln(k)")
            elif key.ln_power > 1:
                factors.append(f"ln(k)^{key.ln_power}")
            if key.alpha:
                factors.append(f"k^({-key.alpha})" if key.alpha < 0
                               else (f"k^-{key.alpha}"))
            bits.append(" * ".join(factors) if factors else "1")
        return "  +  ".join(bits)

    def render_json(self):
        return [
            {
                "alpha": str(key.alpha),
                "ln_power": key.ln_power,
                "coeff": [str(c) for c in self.terms[key].coeffs],
            }
            for key in self.sorted_keys()
        ]

    def render_latex(self):
        if not self.terms:
            return "0"
        bits = []
        for key in self.sorted_keys():
            poly = self.terms[key]
            ps = _poly_latex(poly)
            ln = ""
            if key.ln_power == 1:
                ln = r"\ln(k)"
            elif key.ln_power > 1:
                ln = r"\ln(k)^{%d}" % key.ln_power
            al = key.alpha
            if al == 0:
                kpart = ""
            else:
                expo = f"{al}" if al.denominator == 1 else r"%d/%d" % (al.numerator, al.denominator)
                kpart = r"k^{-%s}" % expo if al > 0 else r"k^{%s}" % expo.lstrip("-")
            body = " ".join(x for x in (ps, ln, kpart) if x)
            bits.append(body)
        return " + ".join(bits)

    @classmethod
    def from_json(cls, items, truncation_order=INF):
        terms = {}
        for it in items:
            key = TermKey(Fraction(it["alpha"]), it["ln_power"])
            terms[key] = CoeffPoly([Fraction(c) for c in it["coeff"]])
        return cls(terms, truncation_order)

    def __str__(self):
        return self.render_text()

    def __repr__(self):
        return (f"AsymptoticSeries({len(self.terms)} terms, "
                f"order<={self.truncation_order})")


def _poly_latex(poly):
    if poly.is_zero():
        return "0"
    bits = []
    for i, c in enumerate(poly.coeffs):
        if not c:
            continue
        cs = str(c) if c.denominator == 1 else r"\tfrac{%d}{%d}" % (c.numerator, c.denominator)
        mono = "" if i == 0 else ("C" if i == 1 else "C^{%d}" % i)
        bits.append((cs + mono) if not (mono and abs(c) == 1)
                    else (("-" if c < 0 else "") + mono))
    out = " + ".join(bits).replace("+ -", "- ")
    if len(bits) > 1:
        out = r"\left(%s\right)" % out
    return out


def monomial(alpha, ln_power=0, coeff=1, truncation_order=INF):
    return AsymptoticSeries({TermKey(alpha, ln_power): CoeffPoly(coeff)},
                            truncation_order)


def _integer_nth_root(x, n):
    if x < 0:
        return None
    if x < 2:
        return x
    lo, hi = 1, 1 << (x.bit_length() // n + 2)
    while lo < hi:
        mid = (lo + hi) // 2
        if mid ** n < x:
            lo = mid + 1
        else:
            hi = mid
    return lo if lo ** n == x else None


def _rational_pow(c, e):
    """c**e as an exact Fraction, or raise."""
    c = _as_fraction(c)
    e = _as_fraction(e)
    if c <= 0:
        raise ValueError(f"rational power of nonpositive base {c}")
    base = c ** e.numerator
    if e.denominator == 1:
        return base
    rn = _integer_nth_root(base.numerator, e.denominator)
    rd = _integer_nth_root(base.denominator, e.denominator)
    if rn is None or rd is None:
        raise ValueError(f"{c}^{e} is irrational; rescale the series first")
    return Fraction(rn, rd)


def compose_analytic(taylor_coeffs, inner, order=None):
    """sum_j taylor_coeffs[j] * inner^j for inner of positive minimal order.

    ``taylor_coeffs`` must reach far enough that the first omitted power of
    ``inner`` falls beyond ``order``; otherwise the requested order is
    unattainable and this raises.
    """
    inner_cap = inner.truncation_order
    if order is None:
        order = inner_cap
    order = _as_fraction(order)
    coeffs = [_as_fraction(c) if not isinstance(c, CoeffPoly) else c
              for c in taylor_coeffs]
    out = AsymptoticSeries({}, min(order, inner_cap))
    if coeffs and coeffs[0]:
        out = out + AsymptoticSeries({TermKey(0, 0): CoeffPoly(coeffs[0])},
                                     out.truncation_order)
    if inner.is_zero():
        return out
    mu = inner.min_alpha()
    if mu <= 0:
        raise ValueError("inner series must tend to zero (min order > 0)")
    if len(coeffs) * mu <= order:
        needed = int(math.floor(order / mu))
        raise ValueError(f"need Taylor coefficients through degree {needed}, "
                         f"got {len(coeffs) - 1}")
    upow = AsymptoticSeries({TermKey(0, 0): CoeffPoly(1)}, INF)
    for j in range(1, len(coeffs)):
        if j * mu > order:
            break
        upow = (upow * inner).truncate(order)
        if upow.is_zero():
            break
        if coeffs[j]:
            out = out + upow.scale(coeffs[j])
    return out
