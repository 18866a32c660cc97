"""Derivations and automorphisms of the truncated series ring.

A :class:`VectorField` is a derivation a(x,z) d/dx + sum_i b_i(x,z) d/dz_i
acting on truncated transverse series; an :class:`Automorphism` is a ring
substitution map given by the images of x and of each z_i.  Both act through
the same truncation cap, where nilpotent derivations have honest finite
exponentials and tangent-to-identity automorphisms honest logarithms, and the
two constructions invert each other degree by degree.

Conventions.  Automorphisms act on functions by substitution, Phi(f) =
f(img_x, img_z), and the pushforward is operator conjugation
Phi* X = Phi o X o Phi^{-1}.  Composition is operator composition:
(Phi o Psi)(f) = Phi(Psi(f)).
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations_with_replacement

from .coeff import GaussianRational, LaurentPoly
from .series import DimensionMismatchError, MonomialIndex, TransverseSeries

__all__ = [
    "VectorField",
    "Automorphism",
    "NotNilpotentError",
    "NotTangentToIdentityError",
    "SingularLinearPartError",
    "bracket",
    "exp",
    "log",
    "exp_ad",
    "pushforward",
    "exp_decomposition",
]

# Iteration guard for series that are finite for structural reasons; hitting
# it means a precondition check was wrong, not that the input is large.
_GUARD = 10_000


class NotNilpotentError(ValueError):
    """exp() requires a nilpotent derivation."""


class NotTangentToIdentityError(ValueError):
    """log() requires an automorphism tangent to the identity."""


class SingularLinearPartError(ValueError):
    """Inversion requires an invertible (constant) z-linear part."""


class VectorField:
    """Derivation with one d/dx component and n d/dz components."""

    __slots__ = ("n", "cap", "a", "b")

    def __init__(self, a: TransverseSeries, b):
        b = tuple(b)
        n, cap = a.n, a.cap
        if len(b) != n:
            raise DimensionMismatchError(
                f"expected {n} z-components, got {len(b)}"
            )
        for comp in b:
            if comp.n != n or comp.cap != cap:
                raise DimensionMismatchError("component shapes differ")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "cap", cap)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def __setattr__(self, name, value):
        raise AttributeError("VectorField is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, n, cap):
        z = TransverseSeries.zero(n, cap)
        return cls(z, [z] * n)

    @classmethod
    def euler(cls, n, cap):
        """The radial field x d/dx."""
        return cls(TransverseSeries.x_series(n, cap), [TransverseSeries.zero(n, cap)] * n)

    @classmethod
    def diagonal(cls, mu, cap):
        """L(mu) = sum_i mu_i z_i d/dz_i."""
        n = len(mu)
        b = [TransverseSeries.variable(n, cap, i + 1).scale(mu[i]) for i in range(n)]
        return cls(TransverseSeries.zero(n, cap), b)

    @classmethod
    def semisimple(cls, mu, cap):
        """x d/dx + L(mu), the reference linear field."""
        n = len(mu)
        return cls.euler(n, cap) + cls.diagonal(mu, cap)

    @classmethod
    def monomial(cls, n, cap, index: MonomialIndex, coeff) -> "VectorField":
        """coeff(x) * z^K * (z_j d/dz_j) as a field, K + e_j the z-exponent."""
        if not isinstance(coeff, LaurentPoly):
            coeff = LaurentPoly.constant(coeff)
        z = TransverseSeries.zero(n, cap)
        b = [z] * n
        b[index.j - 1] = TransverseSeries.monomial(n, cap, index.z_exponent(), coeff)
        return cls(z, b)

    # -- derivation action -------------------------------------------------

    def apply(self, f: TransverseSeries) -> TransverseSeries:
        """X(f) = a df/dx + sum_i b_i df/dz_i, truncated."""
        if f.n != self.n or f.cap != self.cap:
            raise DimensionMismatchError("field and series shapes differ")
        out = self.a * f.diff_x()
        for i in range(self.n):
            if not self.b[i].is_zero():
                out = out + self.b[i] * f.diff_z(i + 1)
        return out

    def bracket(self, other: "VectorField") -> "VectorField":
        """[X, Y] = X o Y - Y o X, componentwise X(Y_c) - Y(X_c)."""
        self._compat(other)
        a = self.apply(other.a) - other.apply(self.a)
        b = [self.apply(other.b[i]) - other.apply(self.b[i]) for i in range(self.n)]
        return VectorField(a, b)

    def _compat(self, other):
        if self.n != other.n or self.cap != other.cap:
            raise DimensionMismatchError("field shapes differ")

    # -- linear structure --------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        self._compat(other)
        return VectorField(
            self.a + other.a, [x + y for x, y in zip(self.b, other.b)]
        )

    def __sub__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        self._compat(other)
        return VectorField(
            self.a - other.a, [x - y for x, y in zip(self.b, other.b)]
        )

    def __neg__(self):
        return VectorField(-self.a, [-c for c in self.b])

    def scale(self, c) -> "VectorField":
        return VectorField(self.a.scale(c), [comp.scale(c) for comp in self.b])

    def scale_series(self, f: TransverseSeries) -> "VectorField":
        """f * X, multiplication by a ring element."""
        return VectorField(self.a * f, [comp * f for comp in self.b])

    # -- inspection --------------------------------------------------------

    def is_zero(self) -> bool:
        return self.a.is_zero() and all(c.is_zero() for c in self.b)

    def is_k_flat(self, k: int) -> bool:
        """a in m^k and every b_i in m^{k+1}."""
        if k < 1:
            raise ValueError("flatness order must be >= 1")
        if self.a.madic_order() < k:
            return False
        return all(c.madic_order() >= k + 1 for c in self.b)

    def z_linear_matrix(self):
        """Matrix C with C[i][j] = coefficient of z_{j+1} in b_{i+1} (LaurentPoly)."""
        return [comp.linear_part() for comp in self.b]

    def constant_linear_matrix(self):
        """z-linear matrix as Q[i] scalars; None if x-dependent or numeric."""
        out = []
        for row in self.z_linear_matrix():
            r = []
            for p in row:
                if p.is_zero():
                    r.append(GaussianRational.ZERO)
                elif p.support() == [0] and p.is_exact():
                    r.append(p.coefficient(0))
                else:
                    return None
            out.append(r)
        return out

    def is_x_normalized(self) -> bool:
        """x d/dx + constant linear z-part + z-components in m (nonlinear in m^2)."""
        if self.a != TransverseSeries.x_series(self.n, self.cap):
            return False
        if any(c.madic_order() < 1 for c in self.b if not c.is_zero()):
            return False
        return self.constant_linear_matrix() is not None

    def is_nilpotent(self) -> bool:
        """Decide nilpotency at the truncation cap.

        Requires the d/dx coefficient and every z-component to lie in m (so
        the action preserves the filtration and the degree-0 graded action
        vanishes), then checks that the z-linear part acts nilpotently on
        each graded piece of degree <= cap.
        """
        if not self._filtration_ok():
            return False
        C = self.z_linear_matrix()
        if all(p.is_zero() for row in C for p in row):
            return True
        if _is_strictly_triangular(C):
            return True
        for deg in range(1, self.cap + 1):
            if not _graded_action_nilpotent(C, deg, self.n):
                return False
        return True

    def _filtration_ok(self) -> bool:
        if not self.a.is_zero() and self.a.madic_order() < 1:
            return False
        return all(c.is_zero() or c.madic_order() >= 1 for c in self.b)

    def is_nilpotent_mod_x(self) -> bool:
        """Nilpotency in the x-truncated ring (any positive x-degree window).

        A matrix over Q[i][x]/(x^{m+1}) is nilpotent iff its constant part
        is, so the window size does not matter; the x-dependent remainder of
        the linear part must vanish at x = 0 to sit in the nilpotent ideal,
        which holds automatically for Taylor coefficients.
        """
        if not self._filtration_ok():
            return False
        C = self.z_linear_matrix()
        if not all(p.is_taylor() for row in C for p in row):
            return False
        C0 = [[LaurentPoly.constant(p.coefficient(0)) for p in row] for row in C]
        if all(p.is_zero() for row in C0 for p in row):
            return True
        if _is_strictly_triangular(C0):
            return True
        for deg in range(1, self.cap + 1):
            if not _graded_action_nilpotent(C0, deg, self.n):
                return False
        return True

    def truncate_x(self, max_deg: int) -> "VectorField":
        return VectorField(
            self.a.truncate_x(max_deg), [c.truncate_x(max_deg) for c in self.b]
        )

    # -- decomposition over monomial indices --------------------------------

    def l_terms(self):
        """Decompose the z-part into ((K, j), coefficient) monomial terms.

        Every monomial z^M d/dz_j is z^K L(e_j) with K = M - e_j, so the
        decomposition is total.  Yields in ascending graded-lex pair order.
        """
        items = []
        for j in range(1, self.n + 1):
            for M, poly in self.b[j - 1].terms():
                K = tuple(m - (1 if p == j - 1 else 0) for p, m in enumerate(M))
                items.append((MonomialIndex(K, j), poly))
        items.sort(key=lambda t: t[0].pair_key())
        return items

    def coefficient_at(self, index: MonomialIndex) -> LaurentPoly:
        return self.b[index.j - 1].coefficient(index.z_exponent())

    # -- conversions -------------------------------------------------------

    def as_complex(self) -> "VectorField":
        return VectorField(self.a.as_complex(), [c.as_complex() for c in self.b])

    def abs_bound(self):
        bounds = [self.a.abs_bound()] + [c.abs_bound() for c in self.b]
        if any(isinstance(v, float) for v in bounds):
            return max(float(v) for v in bounds)
        return max(bounds)

    # -- protocol ----------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        return self.n == other.n and self.cap == other.cap and self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.n, self.cap, self.a, self.b))

    def __str__(self):
        from .coeff import format_term, join_terms, x_power_text
        from .series import z_power_text

        pieces = []
        comps = [("dx", self.a)] + [
            (f"dz{i+1}", self.b[i]) for i in range(self.n)
        ]
        for dvar, comp in comps:
            for K, poly in comp.terms():
                zt = z_power_text(K)
                for e, c in poly.terms():
                    var = "*".join(t for t in (x_power_text(e), zt) if t) or ""
                    var = f"{var}*{dvar}" if var else dvar
                    pieces.append(format_term(c, var))
        if not pieces:
            return "0"
        return join_terms(pieces)

    def __repr__(self):
        return f"VectorField(n={self.n}, cap={self.cap}, {self.__str__()!r})"


def _is_strictly_triangular(C) -> bool:
    n = len(C)
    lower = all(C[i][j].is_zero() for i in range(n) for j in range(i, n))
    upper = all(C[i][j].is_zero() for i in range(n) for j in range(i + 1))
    return lower or upper


def _graded_action_nilpotent(C, deg: int, n: int) -> bool:
    """Is the z-linear action on degree-`deg` monomials nilpotent?

    The matrix acts as a derivation: z^K -> sum_i k_i C[i][l] z^{K - e_i + e_l},
    a square matrix over the Laurent ring; over an integral domain it is
    nilpotent iff its dim-th power vanishes.
    """
    monos = [
        tuple(sum(1 for c in combo if c == v) for v in range(n))
        for combo in combinations_with_replacement(range(n), deg)
    ]
    index = {K: p for p, K in enumerate(monos)}
    dim = len(monos)
    M = [[LaurentPoly.zero() for _ in range(dim)] for _ in range(dim)]
    for K, col in index.items():
        for i in range(n):
            k = K[i]
            if k == 0:
                continue
            for l in range(n):
                c = C[i][l]
                if c.is_zero():
                    continue
                K2 = list(K)
                K2[i] -= 1
                K2[l] += 1
                M[index[tuple(K2)]][col] = M[index[tuple(K2)]][col] + c * k
        # column built
    power = M
    steps = max(1, dim.bit_length())
    for _ in range(steps):
        if all(p.is_zero() for row in power for p in row):
            return True
        power = _mat_mul(power, power)
    return all(p.is_zero() for row in power for p in row)


def _mat_mul(A, B):
    dim = len(A)
    out = [[LaurentPoly.zero() for _ in range(dim)] for _ in range(dim)]
    for i in range(dim):
        for k in range(dim):
            a = A[i][k]
            if a.is_zero():
                continue
            for j in range(dim):
                b = B[k][j]
                if b.is_zero():
                    continue
                out[i][j] = out[i][j] + a * b
    return out


def bracket(X: VectorField, Y: VectorField) -> VectorField:
    return X.bracket(Y)


class Automorphism:
    """Ring substitution map, given by the images of x and of each z_i.

    Substitution is well defined on truncations whenever img_x - x lies in m
    and every img_z_i lies in m; both are enforced on application.  Instances
    cache an inverse when it is known by construction (exp produces exp(-X)),
    and monomial powers of the images, both of which only ever hold values
    derived from immutable inputs.
    """

    __slots__ = ("n", "cap", "img_x", "img_z", "_inv", "_pows")

    def __init__(self, img_x: TransverseSeries, img_z):
        img_z = tuple(img_z)
        n, cap = img_x.n, img_x.cap
        if len(img_z) != n:
            raise DimensionMismatchError(f"expected {n} z-images, got {len(img_z)}")
        for comp in img_z:
            if comp.n != n or comp.cap != cap:
                raise DimensionMismatchError("image shapes differ")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "cap", cap)
        object.__setattr__(self, "img_x", img_x)
        object.__setattr__(self, "img_z", img_z)
        object.__setattr__(self, "_inv", None)
        object.__setattr__(self, "_pows", {})

    def __setattr__(self, name, value):
        raise AttributeError("Automorphism is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def identity(cls, n, cap):
        phi = cls(
            TransverseSeries.x_series(n, cap),
            [TransverseSeries.variable(n, cap, i + 1) for i in range(n)],
        )
        object.__setattr__(phi, "_inv", phi)
        return phi

    @classmethod
    def linear(cls, matrix, cap):
        """x -> x, z_i -> sum_j matrix[i][j] z_j with constant entries."""
        n = len(matrix)
        img_z = []
        for i in range(n):
            s = TransverseSeries.zero(n, cap)
            for j in range(n):
                c = matrix[i][j]
                if isinstance(c, (int, Fraction)):
                    c = GaussianRational(c)
                if not (isinstance(c, GaussianRational) and c.is_zero()):
                    s = s + TransverseSeries.variable(n, cap, j + 1).scale(c)
            img_z.append(s)
        return cls(TransverseSeries.x_series(n, cap), img_z)

    # -- substitution ------------------------------------------------------

    def _one(self) -> TransverseSeries:
        one = TransverseSeries.constant(self.n, self.cap, LaurentPoly.one())
        return one if self._is_exact() else one.as_complex()

    def _zpow(self, i: int, k: int) -> TransverseSeries:
        key = (i, k)
        hit = self._pows.get(key)
        if hit is not None:
            return hit
        if k == 0:
            out = self._one()
        else:
            out = self._zpow(i, k - 1) * self.img_z[i]
        self._pows[key] = out
        return out

    def _is_exact(self) -> bool:
        return self.img_x.is_exact() and all(c.is_exact() for c in self.img_z)

    def _single_shift(self):
        """(j, g) when the map is z_j -> z_j + g with every other coordinate
        fixed (x included); None otherwise.  Cached: instances are immutable.
        """
        hit = self._pows.get("shift", False)
        if hit is not False:
            return hit
        shift = None
        if self.img_x == self._coordinate(0):
            for i, comp in enumerate(self.img_z):
                d = comp - self._coordinate(i + 1)
                if d.is_zero():
                    continue
                if shift is not None:
                    shift = None
                    break
                shift = (i + 1, d)
        self._pows["shift"] = shift
        return shift

    def _shift_pow(self, g: TransverseSeries, m: int) -> TransverseSeries:
        key = ("shiftpow", m)
        hit = self._pows.get(key)
        if hit is None:
            hit = self._one() if m == 0 else self._shift_pow(g, m - 1) * g
            self._pows[key] = hit
        return hit

    def _coordinate(self, i: int) -> TransverseSeries:
        """Reference coordinate (i = 0 for x) in the images' scalar domain."""
        if i == 0:
            ref = TransverseSeries.x_series(self.n, self.cap)
        else:
            ref = TransverseSeries.variable(self.n, self.cap, i)
        return ref if self._is_exact() else ref.as_complex()

    def apply(self, f: TransverseSeries) -> TransverseSeries:
        """Substitute the images into f, truncated.

        The x-image may differ from x by an element u of m; Laurent
        coefficients are then shifted by the finite Taylor sum
        f_K(x + u) = sum_m f_K^(m)(x)/m! u^m, which stops at the cap.
        """
        if f.n != self.n or f.cap != self.cap:
            raise DimensionMismatchError("series and automorphism shapes differ")
        u = self.img_x - self._coordinate(0)
        if not u.is_zero() and u.madic_order() < 1:
            raise ValueError("x-image must differ from x by an element of m")
        for comp in self.img_z:
            if not comp.is_zero() and comp.madic_order() < 1:
                raise ValueError("z-images must lie in m")
        shift = self._single_shift()
        if shift is not None:
            # substitution in one slot only: f(.., z_j + g, ..) expands as
            # the finite Taylor sum over d/dz_j, much cheaper than rebuilding
            # every monomial (this is the shape of every elimination step)
            j, g = shift
            acc = {}
            deriv = f
            fact = 1
            for m in range(self.cap + 1):
                if m:
                    deriv = deriv.diff_z(j)
                    fact *= m
                    if deriv.is_zero():
                        break
                _accumulate(acc, deriv.scale(Fraction(1, fact)) * self._shift_pow(g, m))
            return TransverseSeries(self.n, self.cap, acc)
        acc = {}
        for K, poly in f.terms():
            zpart = self._one()
            for i, k in enumerate(K):
                if k:
                    zpart = zpart * self._zpow(i, k)
            if u.is_zero():
                _accumulate(acc, zpart.scale(poly))
                continue
            upow = self._one()
            deriv = poly
            fact = 1
            for m in range(self.cap + 1):
                if m:
                    upow = upow * u
                    fact *= m
                    deriv = deriv.derivative()
                    if upow.is_zero() or deriv.is_zero():
                        break
                _accumulate(acc, upow.scale(deriv.scale(Fraction(1, fact))) * zpart)
        return TransverseSeries(self.n, self.cap, acc)

    # -- group structure ----------------------------------------------------

    def _compose_images(self, other: "Automorphism") -> "Automorphism":
        return Automorphism(
            self.apply(other.img_x), [self.apply(c) for c in other.img_z]
        )

    def compose(self, other: "Automorphism") -> "Automorphism":
        """(self o other)(f) = self(other(f))."""
        if self.n != other.n or self.cap != other.cap:
            raise DimensionMismatchError("automorphism shapes differ")
        out = self._compose_images(other)
        if self._inv is not None and other._inv is not None:
            inv = other._inv._compose_images(self._inv)
            object.__setattr__(out, "_inv", inv)
            object.__setattr__(inv, "_inv", out)
        return out

    def z_linear_matrix(self):
        return [comp.linear_part() for comp in self.img_z]

    def constant_z_matrix(self):
        out = []
        for row in self.z_linear_matrix():
            r = []
            for p in row:
                if p.is_zero():
                    r.append(GaussianRational.ZERO)
                elif p.support() == [0] and p.is_exact():
                    r.append(p.coefficient(0))
                else:
                    return None
            out.append(r)
        return out

    def is_x_normalized(self) -> bool:
        if self.img_x != TransverseSeries.x_series(self.n, self.cap):
            return False
        if any(c.madic_order() < 1 for c in self.img_z if not c.is_zero()):
            return False
        A = self.constant_z_matrix()
        if A is None:
            return False
        try:
            _invert_matrix(A)
        except SingularLinearPartError:
            return False
        return True

    def tangent_to_identity(self) -> bool:
        """Identity through first order in the graded sense.

        The x-image may differ by an element of m and each z-image by an
        element of m^2 (x carries weight 0, the z_i weight 1); this is
        exactly the class where Phi - id raises the m-adic order, so the
        logarithm series terminates at the cap.
        """
        if (self.img_x - self._coordinate(0)).madic_order() < 1:
            return False
        for i, comp in enumerate(self.img_z):
            if (comp - self._coordinate(i + 1)).madic_order() < 2:
                return False
        return True

    def invert(self) -> "Automorphism":
        """Compositional inverse at the cap.

        Uses a cached inverse when one is known by construction; otherwise
        requires img_x = x and a constant invertible z-linear matrix, and
        builds the inverse degree by degree.
        """
        if self._inv is not None:
            return self._inv
        if self.img_x != TransverseSeries.x_series(self.n, self.cap):
            raise SingularLinearPartError(
                "generic inversion needs img_x = x (no cached inverse available)"
            )
        A = self.constant_z_matrix()
        if A is None:
            raise SingularLinearPartError("z-linear part must be constant in x")
        Ainv = _invert_matrix(A)
        n, cap = self.n, self.cap
        lin = [
            sum(
                (TransverseSeries.variable(n, cap, j + 1).scale(Ainv[i][j]) for j in range(n)),
                TransverseSeries.zero(n, cap),
            )
            for i in range(n)
        ]
        high = [
            self.img_z[i]
            - sum(
                (TransverseSeries.variable(n, cap, j + 1).scale(A[i][j]) for j in range(n)),
                TransverseSeries.zero(n, cap),
            )
            for i in range(n)
        ]
        sigma = list(lin)
        for _ in range(max(cap - 1, 0)):
            sub = Automorphism(TransverseSeries.x_series(n, cap), sigma)
            corr = [sub.apply(h) for h in high]
            sigma = [
                sum(
                    (
                        (TransverseSeries.variable(n, cap, j + 1) - corr[j]).scale(Ainv[i][j])
                        for j in range(n)
                    ),
                    TransverseSeries.zero(n, cap),
                )
                for i in range(n)
            ]
        inv = Automorphism(TransverseSeries.x_series(n, cap), sigma)
        check = self.compose(inv)
        if not _is_identity(check):
            raise SingularLinearPartError("inversion failed to converge at the cap")
        object.__setattr__(inv, "_inv", self)
        object.__setattr__(self, "_inv", inv)
        return inv

    def pushforward(self, X: VectorField) -> "VectorField":
        """Phi* X = Phi o X o Phi^{-1} as a derivation at the cap."""
        if X.n != self.n or X.cap != self.cap:
            raise DimensionMismatchError("field and automorphism shapes differ")
        inv = self.invert()
        a = self.apply(X.apply(inv.img_x))
        b = [self.apply(X.apply(inv.img_z[i])) for i in range(self.n)]
        return VectorField(a, b)

    # -- conversions -------------------------------------------------------

    def as_complex(self) -> "Automorphism":
        return Automorphism(self.img_x.as_complex(), [c.as_complex() for c in self.img_z])

    def truncate_x(self, max_deg: int) -> "Automorphism":
        out = Automorphism(
            self.img_x.truncate_x(max_deg),
            [c.truncate_x(max_deg) for c in self.img_z],
        )
        if self._inv is not None and self._inv is not self:
            inv = Automorphism(
                self._inv.img_x.truncate_x(max_deg),
                [c.truncate_x(max_deg) for c in self._inv.img_z],
            )
            object.__setattr__(out, "_inv", inv)
            object.__setattr__(inv, "_inv", out)
        elif self._inv is self:
            object.__setattr__(out, "_inv", out)
        return out

    # -- protocol ----------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, Automorphism):
            return NotImplemented
        return (
            self.n == other.n
            and self.cap == other.cap
            and self.img_x == other.img_x
            and self.img_z == other.img_z
        )

    def __hash__(self):
        return hash((self.n, self.cap, self.img_x, self.img_z))

    def __str__(self):
        imgs = [f"x -> {self.img_x}"] + [
            f"z{i+1} -> {self.img_z[i]}" for i in range(self.n)
        ]
        return "; ".join(imgs)

    def __repr__(self):
        return f"Automorphism({self.__str__()!r})"


def _accumulate(acc: dict, s: TransverseSeries) -> None:
    for K, poly in s._terms.items():
        held = acc.get(K)
        acc[K] = poly if held is None else held + poly


def _is_identity(phi: Automorphism) -> bool:
    if phi.img_x != TransverseSeries.x_series(phi.n, phi.cap):
        return False
    return all(
        phi.img_z[i] == TransverseSeries.variable(phi.n, phi.cap, i + 1)
        for i in range(phi.n)
    )


def _invert_matrix(A):
    """Exact inverse of a square Q[i] matrix by Gauss-Jordan elimination."""
    n = len(A)
    aug = [
        [A[i][j] for j in range(n)]
        + [GaussianRational.ONE if i == j else GaussianRational.ZERO for j in range(n)]
        for i in range(n)
    ]
    for col in range(n):
        pivot = next(
            (r for r in range(col, n) if not aug[r][col].is_zero()), None
        )
        if pivot is None:
            raise SingularLinearPartError("singular z-linear part")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        pv = aug[col][col]
        aug[col] = [v / pv for v in aug[col]]
        for r in range(n):
            if r == col:
                continue
            factor = aug[r][col]
            if factor.is_zero():
                continue
            aug[r] = [v - factor * w for v, w in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


# --- exponential, logarithm, adjoint ---------------------------------------


def _scalar_time(t):
    """Normalize t to a GaussianRational (exact path) or complex (numeric)."""
    if isinstance(t, (int, Fraction)):
        return GaussianRational(t)
    if isinstance(t, (GaussianRational, complex, float)):
        return complex(t) if isinstance(t, float) else t
    raise TypeError(f"unsupported time type {type(t).__name__}")


def _field_is_exact(X: VectorField) -> bool:
    return X.a.is_exact() and all(c.is_exact() for c in X.b)


def exp(X: VectorField, t=1, x_window: int | None = None) -> Automorphism:
    """Time-t exponential of a nilpotent derivation, as an automorphism.

    The coordinate images sum_k t^k/k! X^k(coordinate) are finite at the cap.
    Exact t keeps the exact coefficient path; complex t converts the field to
    complex coefficients first (the result's type follows the inputs').

    With ``x_window`` the computation runs in the ring truncated at x-degree
    x_window as well; fields like f(x) z_j d/dz_j with f(0) = 0, whose
    exponential scales z_j by the transcendental e^{f}, are nilpotent there
    and get their (polynomial) truncated exponential.
    """
    tval = _scalar_time(t)
    if x_window is None:
        if not X.is_nilpotent():
            raise NotNilpotentError("exp requires a nilpotent field at the cap")
    else:
        if not X.is_nilpotent_mod_x():
            raise NotNilpotentError(
                "exp requires a field nilpotent in the x-truncated ring"
            )
    numeric = isinstance(tval, complex) or not _field_is_exact(X)
    if numeric and not isinstance(tval, complex):
        tval = tval.as_complex()
    Xw = X.as_complex() if (numeric and _field_is_exact(X)) else X
    phi = Automorphism(*_exp_images(Xw, tval, numeric, x_window))
    inv = Automorphism(*_exp_images(Xw, -tval, numeric, x_window))
    object.__setattr__(phi, "_inv", inv)
    object.__setattr__(inv, "_inv", phi)
    return phi


def _exp_images(Xw: VectorField, tval, numeric, x_window):
    n, cap = Xw.n, Xw.cap
    coords = [TransverseSeries.x_series(n, cap)] + [
        TransverseSeries.variable(n, cap, i + 1) for i in range(n)
    ]
    if numeric:
        coords = [c.as_complex() for c in coords]
    images = []
    for coord in coords:
        acc = coord
        term = coord
        k = 0
        while True:
            k += 1
            if k > _GUARD:
                raise AssertionError("exp failed to terminate; nilpotency is violated")
            term = Xw.apply(term).scale(tval).scale(Fraction(1, k))
            if x_window is not None:
                term = term.truncate_x(x_window)
            if term.is_zero():
                break
            acc = acc + term
        images.append(acc)
    return images[0], images[1:]


def log(phi: Automorphism, x_window: int | None = None) -> VectorField:
    """Logarithm of an automorphism tangent to the identity.

    Evaluates sum_m (-1)^{m+1}/m (Phi - id)^m on the coordinates; each
    application of Phi - id raises the m-adic order, so the sum is finite at
    the cap and the result is a 1-flat (hence nilpotent) field with
    exp(log Phi) = Phi.  ``x_window`` runs the series in the x-truncated
    ring, where tangency and termination are only required modulo
    x^{x_window+1}.
    """
    if not _tangent_to_identity(phi, x_window):
        raise NotTangentToIdentityError(
            "log requires images equal to the coordinates through order 1"
        )
    n, cap = phi.n, phi.cap
    numeric = not (
        phi.img_x.is_exact() and all(c.is_exact() for c in phi.img_z)
    )
    coords = [TransverseSeries.x_series(n, cap)] + [
        TransverseSeries.variable(n, cap, i + 1) for i in range(n)
    ]
    if numeric:
        coords = [c.as_complex() for c in coords]
    comps = []
    for coord in coords:
        acc = TransverseSeries.zero(n, cap)
        u = phi.apply(coord) - coord
        if x_window is not None:
            u = u.truncate_x(x_window)
        m = 1
        while not u.is_zero():
            if m > _GUARD:
                raise AssertionError("log failed to terminate")
            acc = acc + u.scale(Fraction(1, m) if m % 2 == 1 else Fraction(-1, m))
            u = phi.apply(u) - u
            if x_window is not None:
                u = u.truncate_x(x_window)
            m += 1
        comps.append(acc)
    return VectorField(comps[0], comps[1:])


def _tangent_to_identity(phi: Automorphism, x_window) -> bool:
    if x_window is None:
        return phi.tangent_to_identity()
    d = (phi.img_x - phi._coordinate(0)).truncate_x(x_window)
    if not d.is_zero() and d.madic_order() < 1:
        return False
    for i, comp in enumerate(phi.img_z):
        d = (comp - phi._coordinate(i + 1)).truncate_x(x_window)
        if not d.is_zero() and d.madic_order() < 2:
            return False
    return True


def exp_ad(W: VectorField, X: VectorField, x_window: int | None = None) -> VectorField:
    """exp(ad_W)(X) = sum_k ad_W^k(X)/k!, finite at the cap for nilpotent W.

    Equals pushforward(exp(W), X); the two routes are kept independent so one
    can certify the other.  ``x_window`` truncates in x as in :func:`exp`.
    """
    W._compat(X)
    acc = X if x_window is None else X.truncate_x(x_window)
    term = acc
    k = 0
    while True:
        k += 1
        if k > _GUARD:
            raise AssertionError("adjoint series failed to terminate")
        term = W.bracket(term).scale(Fraction(1, k))
        if x_window is not None:
            term = term.truncate_x(x_window)
        if term.is_zero():
            break
        acc = acc + term
    return acc


def pushforward(phi: Automorphism, X: VectorField) -> VectorField:
    return phi.pushforward(X)


def exp_decomposition(phi: Automorphism):
    """Split an x-normalized automorphism as A after exp(Z) (point maps).

    A is the purely linear map carrying phi's constant z-linear matrix and Z
    is the 1-flat logarithm of the tangent-to-identity remainder.  Point maps
    factor as phi = A o exp(Z); these substitution operators compose in the
    opposite order, so the recomposition identity reads
    ``exp(Z).compose(A) == phi``.
    """
    if not phi.is_x_normalized():
        raise ValueError("exponential decomposition needs an x-normalized automorphism")
    A = Automorphism.linear(phi.constant_z_matrix(), phi.cap)
    rest = phi.compose(A.invert())
    Z = log(rest)
    return A, Z
