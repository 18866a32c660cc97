"""Exact scalar arithmetic: Gaussian rationals and Laurent polynomials in x.

Everything algebraic in this package runs over the field Q[i], represented by
:class:`GaussianRational`, and over sparse Laurent polynomials in a single
variable x with Q[i] coefficients, represented by :class:`LaurentPoly`.
Laurent polynomials with nonnegative support ("Taylor" polynomials) stand in
for coefficients analytic on a disk; general ones for coefficients analytic
on an annulus.  Exactness is not a luxury here: deciding whether a weighted
exponent sum is an integer is what separates resonant monomials from
removable ones, and that question has no floating-point answer.

Values are immutable after construction and safe to share between threads.
The containers are coefficient-agnostic: a :class:`LaurentPoly` may also hold
Python ``complex`` values (the numeric holonomy path uses this), but exact and
floating scalars never mix silently -- combining a :class:`GaussianRational`
with a float raises ``TypeError``.
"""

from __future__ import annotations

import re as _re
from fractions import Fraction

__all__ = [
    "GaussianRational",
    "LaurentPoly",
    "CoefficientSyntaxError",
    "as_scalar",
]


class CoefficientSyntaxError(ValueError):
    """Raised when a textual coefficient does not match the Q[i] grammar."""


def _as_fraction(v):
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    raise TypeError(f"expected an exact rational, got {type(v).__name__}")


class GaussianRational:
    """An element of Q[i]: exact rational real and imaginary parts.

    The canonical form is unique (``Fraction`` keeps denominators positive
    and in lowest terms), so equality is structural.

    >>> (GaussianRational(1, 1) / GaussianRational(1, -1)) == GaussianRational(0, 1)
    True
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _as_fraction(re))
        object.__setattr__(self, "im", _as_fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_string(cls, text: str) -> "GaussianRational":
        """Parse ``a``, ``a/b``, ``a/b*i`` or ``a/b+c/d*i`` (signs optional).

        The unit imaginary may be written bare (``i``, ``-i``); ``parse`` and
        ``str`` round-trip exactly.
        """
        s = text.replace(" ", "")
        if not s:
            raise CoefficientSyntaxError("empty coefficient")
        parts = _re.findall(r"[+-]?[^+-]+", s)
        if not parts or "".join(parts) != s:
            raise CoefficientSyntaxError(f"bad coefficient syntax: {text!r}")
        re_part = None
        im_part = None
        for part in parts:
            sign = -1 if part.startswith("-") else 1
            body = part.lstrip("+-")
            if body.endswith("i"):
                body = body[:-1]
                if body.endswith("*"):
                    body = body[:-1]
                mag = Fraction(1) if body == "" else _parse_rational(body, text)
                if im_part is not None:
                    raise CoefficientSyntaxError(f"two imaginary parts in {text!r}")
                im_part = sign * mag
            else:
                if re_part is not None:
                    raise CoefficientSyntaxError(f"two real parts in {text!r}")
                re_part = sign * _parse_rational(body, text)
        if re_part is None:
            re_part = Fraction(0)
        if im_part is None:
            im_part = Fraction(0)
        return cls(re_part, im_part)

    # -- predicates --------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.re and not self.im

    def is_real(self) -> bool:
        return not self.im

    def is_integer(self) -> bool:
        return not self.im and self.re.denominator == 1

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, (int, Fraction)):
            return _gq_raw(Fraction(other), _F0)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return _gq_raw(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return _gq_raw(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return _gq_raw(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        # real factors are the overwhelmingly common case; skip the full
        # complex product (4 multiplications) for them
        if not self.im:
            if not self.re:
                return GaussianRational.ZERO
            return _gq_raw(self.re * o.re, self.re * o.im)
        if not o.im:
            if not o.re:
                return GaussianRational.ZERO
            return _gq_raw(self.re * o.re, self.im * o.re)
        return _gq_raw(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not o.im:
            if not o.re:
                raise ZeroDivisionError("division by zero in Q[i]")
            return _gq_raw(self.re / o.re, self.im / o.re)
        d = o.re * o.re + o.im * o.im
        if not d:
            raise ZeroDivisionError("division by zero in Q[i]")
        return _gq_raw(
            (self.re * o.re + self.im * o.im) / d,
            (self.im * o.re - self.re * o.im) / d,
        )

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __neg__(self):
        return _gq_raw(-self.re, -self.im)

    def __pos__(self):
        return self

    def conjugate(self) -> "GaussianRational":
        return _gq_raw(self.re, -self.im)

    # -- conversions -------------------------------------------------------

    def as_complex(self) -> complex:
        return complex(self.re) + 1j * float(self.im)

    def abs_bound(self) -> Fraction:
        """max(|re|, |im|), an exact proxy for the magnitude."""
        return max(abs(self.re), abs(self.im))

    # -- protocol ----------------------------------------------------------

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return not self.is_zero()

    def __str__(self):
        if self.is_zero():
            return "0"
        if not self.im:
            return str(self.re)
        mag = abs(self.im)
        imag = "i" if mag == 1 else f"{mag}*i"
        if not self.re:
            return imag if self.im > 0 else "-" + imag
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{imag}"

    def __repr__(self):
        return f"GaussianRational({self.re!r}, {self.im!r})"


_F0 = Fraction(0)


def _gq_raw(re: Fraction, im: Fraction) -> GaussianRational:
    """Internal constructor for values already known to be Fractions."""
    v = GaussianRational.__new__(GaussianRational)
    object.__setattr__(v, "re", re)
    object.__setattr__(v, "im", im)
    return v


def _parse_rational(body: str, original: str) -> Fraction:
    m = _re.fullmatch(r"(\d+)(?:/(\d+))?", body)
    if not m:
        raise CoefficientSyntaxError(f"bad coefficient syntax: {original!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) else 1
    if den == 0:
        raise CoefficientSyntaxError(f"zero denominator in {original!r}")
    return Fraction(num, den)


GaussianRational.ZERO = GaussianRational(0)
GaussianRational.ONE = GaussianRational(1)
GaussianRational.I = GaussianRational(0, 1)


def as_scalar(v):
    """Coerce to a scalar the containers accept: Q[i] exact, or complex."""
    if isinstance(v, GaussianRational):
        return v
    if isinstance(v, (int, Fraction)):
        return GaussianRational(v)
    if isinstance(v, (complex, float)):
        return complex(v)
    raise TypeError(f"unsupported scalar type {type(v).__name__}")


class LaurentPoly:
    """Sparse Laurent polynomial in x: a map {exponent: nonzero coefficient}.

    Exponents may be negative; a polynomial whose support is >= 0 is "Taylor"
    and models a disk-analytic coefficient, otherwise only annulus-analytic.
    The zero polynomial has empty support.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        data = {}
        if terms:
            for e, c in terms.items():
                if not isinstance(e, int):
                    raise TypeError("exponents must be ints")
                c = as_scalar(c)
                if c == 0:
                    continue
                data[e] = c
        object.__setattr__(self, "_terms", data)

    def __setattr__(self, name, value):
        raise AttributeError("LaurentPoly is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def one(cls):
        return cls({0: GaussianRational.ONE})

    @classmethod
    def x(cls, exponent: int = 1, coeff=1):
        return cls({exponent: coeff})

    @classmethod
    def constant(cls, c):
        return cls({0: c})

    # -- inspection --------------------------------------------------------

    def is_zero(self) -> bool:
        return not self._terms

    def is_taylor(self) -> bool:
        """True iff every stored exponent is >= 0 (zero counts as Taylor)."""
        return all(e >= 0 for e in self._terms)

    def min_exp(self):
        return min(self._terms) if self._terms else None

    def max_exp(self):
        return max(self._terms) if self._terms else None

    def support(self):
        return sorted(self._terms)

    def terms(self):
        """Terms as (exponent, coefficient), ascending exponent."""
        return [(e, self._terms[e]) for e in sorted(self._terms)]

    def coefficient(self, e: int):
        return self._terms.get(e, GaussianRational.ZERO)

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def is_exact(self) -> bool:
        return all(isinstance(c, GaussianRational) for c in self._terms.values())

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        data = dict(self._terms)
        for e, c in other._terms.items():
            s = data.get(e)
            s = c if s is None else s + c
            if s == 0:
                data.pop(e, None)
            else:
                data[e] = s
        return _lp_raw(data)

    def __sub__(self, other):
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        return _lp_raw({e: -c for e, c in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, LaurentPoly):
            data = {}
            for e1, c1 in self._terms.items():
                for e2, c2 in other._terms.items():
                    e = e1 + e2
                    c = c1 * c2
                    s = data.get(e)
                    s = c if s is None else s + c
                    if s == 0:
                        data.pop(e, None)
                    else:
                        data[e] = s
            return _lp_raw(data)
        if isinstance(other, (int, Fraction, GaussianRational, complex, float)):
            return self.scale(other)
        return NotImplemented

    __rmul__ = __mul__

    def scale(self, c):
        # Plain ints and Fractions are type-neutral rational constants: they
        # multiply exact and complex coefficients alike without mixing them.
        if not isinstance(c, (int, Fraction)):
            c = as_scalar(c)
        if c == 0:
            return LaurentPoly()
        data = {}
        for e, v in self._terms.items():
            s = v * c
            if s != 0:
                data[e] = s
        return _lp_raw(data)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only nonnegative integer powers")
        out = LaurentPoly.one()
        for _ in range(k):
            out = out * self
        return out

    def truncate_x(self, max_deg: int) -> "LaurentPoly":
        """Drop terms of x-degree above max_deg (quotient by x^{max_deg+1}).

        Benign for Taylor data: products only push degrees up, so truncating
        between ring operations computes exactly in the quotient ring.
        """
        return _lp_raw({e: c for e, c in self._terms.items() if e <= max_deg})

    def derivative(self) -> "LaurentPoly":
        """d/dx, exact (works on negative exponents too)."""
        data = {}
        for e, c in self._terms.items():
            if e == 0:
                continue
            data[e - 1] = c * e
        return _lp_raw({e: c for e, c in data.items() if c != 0})

    def euler_apply(self, s) -> "LaurentPoly":
        """Apply the shifted Euler operator (x*d/dx + s)."""
        s = as_scalar(s)
        data = {}
        for e, c in self._terms.items():
            v = c * (s + e)
            if v != 0:
                data[e] = v
        return _lp_raw(data)

    def euler_solve(self, s):
        """Split g = self into (f, residual) with (x*d/dx + s) f = g - residual.

        The residual collects exactly the terms a_e * x^e with e + s = 0; those
        are unsolvable for f (the homological obstruction) and stay behind.  f
        carries no term at exponent -s.
        """
        s = as_scalar(s)
        f = {}
        r = {}
        for e, c in self._terms.items():
            k = s + e
            if k == 0:
                r[e] = c
            else:
                f[e] = c / k
        return _lp_raw(f), _lp_raw(r)

    # -- conversions -------------------------------------------------------

    def evaluate(self, x: complex) -> complex:
        """Numeric evaluation at a nonzero complex point."""
        out = 0j
        for e, c in self._terms.items():
            cv = c.as_complex() if isinstance(c, GaussianRational) else complex(c)
            out += cv * x**e
        return out

    def as_complex(self) -> "LaurentPoly":
        return _lp_raw(
            {
                e: (c.as_complex() if isinstance(c, GaussianRational) else complex(c))
                for e, c in self._terms.items()
            }
        )

    def abs_bound(self):
        """Largest coefficient magnitude: exact Fraction bound, or float."""
        best = Fraction(0)
        fbest = 0.0
        exact = True
        for c in self._terms.values():
            if isinstance(c, GaussianRational):
                best = max(best, c.abs_bound())
            else:
                exact = False
                fbest = max(fbest, abs(c))
        if exact:
            return best
        return max(float(best), fbest)

    # -- protocol ----------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __bool__(self):
        return bool(self._terms)

    def __str__(self):
        if not self._terms:
            return "0"
        pieces = []
        for e, c in self.terms():
            pieces.append(format_term(c, x_power_text(e)))
        return join_terms(pieces)

    def __repr__(self):
        return f"LaurentPoly({{{', '.join(f'{e}: {c}' for e, c in self.terms())}}})"


def _lp_raw(data) -> LaurentPoly:
    p = LaurentPoly.__new__(LaurentPoly)
    object.__setattr__(p, "_terms", data)
    return p


# -- canonical term rendering, shared by polynomials, series and fields -----


def x_power_text(e: int) -> str:
    if e == 0:
        return ""
    if e == 1:
        return "x"
    return f"x^{e}"


def format_term(coeff, var_text: str):
    """Render one monomial term as (negative_sign, body_text).

    Pure-real and pure-imaginary coefficients pull their sign out so the
    printer can join with " + " / " - "; mixed coefficients stay inside
    parentheses, which is also the only form the grammar accepts for them.
    """
    if isinstance(coeff, GaussianRational):
        if not coeff.im:
            neg = coeff.re < 0
            mag = abs(coeff.re)
            if mag == 1 and var_text:
                return neg, var_text
            body = str(mag)
        elif not coeff.re:
            neg = coeff.im < 0
            mag = abs(coeff.im)
            body = "i" if mag == 1 else f"{mag}*i"
        else:
            body = f"({coeff})"
            neg = False
    else:
        body = f"({coeff})"
        neg = False
    if var_text:
        body = f"{body}*{var_text}"
    return neg, body


def join_terms(pieces) -> str:
    out = []
    for idx, (neg, body) in enumerate(pieces):
        if idx == 0:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)
