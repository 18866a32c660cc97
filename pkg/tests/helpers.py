"""Deterministic random generators shared by the test modules."""

from fractions import Fraction

from crossfield import (
    Automorphism,
    GaussianRational,
    LaurentPoly,
    MonomialIndex,
    TransverseSeries,
    VectorField,
    exp,
)
from crossfield.series import iter_exponents


def rand_fraction(rng, span=3, den=3):
    return Fraction(rng.randint(-span, span), rng.randint(1, den))


def rand_gq(rng, span=3, den=3, imag_prob=0.5):
    im = rand_fraction(rng, span, den) if rng.random() < imag_prob else Fraction(0)
    return GaussianRational(rand_fraction(rng, span, den), im)


def rand_gq_nonzero(rng, span=3, den=3, imag_prob=0.5):
    while True:
        v = rand_gq(rng, span, den, imag_prob)
        if not v.is_zero():
            return v


def rand_laurent(rng, min_exp=-2, max_exp=2, terms=2, span=3, den=3):
    data = {}
    for _ in range(terms):
        data[rng.randint(min_exp, max_exp)] = rand_gq(rng, span, den)
    return LaurentPoly(data)


def rand_series(rng, n, cap, terms=3, min_deg=0, min_exp=0, max_exp=2):
    monos = [K for K in iter_exponents(n, min_deg, cap)]
    data = {}
    for _ in range(terms):
        K = rng.choice(monos)
        data[K] = rand_laurent(rng, min_exp, max_exp, terms=1)
    return TransverseSeries(n, cap, data)


def rand_field(rng, n, cap, terms=2, min_deg=0, min_exp=0, max_exp=2):
    """Random m-preserving derivation: z-components in m, d/dx free.

    Degree-lowering derivations (constant d/dz terms) do not descend to the
    truncated quotient, so every identity test stays inside this class.
    """
    a = rand_series(rng, n, cap, terms, min_deg, min_exp, max_exp)
    b = [
        rand_series(rng, n, cap, terms, max(min_deg, 1), min_exp, max_exp)
        for _ in range(n)
    ]
    return VectorField(a, b)


def rand_one_flat(rng, n, cap, terms=2, min_exp=0, max_exp=2):
    """a in m, b_i in m^2: 1-flat, hence nilpotent at the cap."""
    a = rand_series(rng, n, cap, terms, min_deg=1, min_exp=min_exp, max_exp=max_exp)
    b = [
        rand_series(rng, n, cap, terms, min_deg=2, min_exp=min_exp, max_exp=max_exp)
        for _ in range(n)
    ]
    return VectorField(a, b)


def rand_z_one_flat(rng, n, cap, terms=2, min_exp=0, max_exp=2):
    """Like rand_one_flat but with no d/dx component (x-normalized exp input)."""
    z = TransverseSeries.zero(n, cap)
    b = [
        rand_series(rng, n, cap, terms, min_deg=2, min_exp=min_exp, max_exp=max_exp)
        for _ in range(n)
    ]
    return VectorField(z, b)


def rand_commuting_pair(rng, cap, terms=2):
    """Commuting nilpotent fields on n = 2: f(z2) d/dz1 brackets vanish."""
    n = 2
    z = TransverseSeries.zero(n, cap)

    def comp():
        data = {}
        for _ in range(terms):
            k = rng.randint(2, cap)
            data[(0, k)] = rand_laurent(rng, 0, 2, terms=1)
        return TransverseSeries(n, cap, data)

    X = VectorField(z, [comp(), z])
    Y = VectorField(z, [comp(), z])
    return X, Y


def rand_mu(rng, n, span=3, den=2, imag_prob=0.4):
    return tuple(rand_gq(rng, span, den, imag_prob) for _ in range(n))


def rand_invertible_matrix(rng, n, span=2):
    while True:
        M = [
            [GaussianRational(rand_fraction(rng, span, 2)) for _ in range(n)]
            for _ in range(n)
        ]
        if n == 1:
            if not M[0][0].is_zero():
                return M
        else:
            det = M[0][0] * M[1][1] - M[0][1] * M[1][0]
            if n == 2 and not det.is_zero():
                return M
            if n > 2:
                raise NotImplementedError


def rand_x_normalized(rng, mu, cap, terms=3, max_exp=2):
    """x d/dx + diag(mu) + higher-order Taylor z-terms (m^2)."""
    n = len(mu)
    X = VectorField.semisimple(mu, cap)
    extra = [
        rand_series(rng, n, cap, terms, min_deg=2, min_exp=0, max_exp=max_exp)
        for _ in range(n)
    ]
    return X + VectorField(TransverseSeries.zero(n, cap), extra)


def rand_x_normalized_automorphism(rng, n, cap, terms=2, max_exp=1):
    """linear(invertible constant) o exp(m^2 z-field): x-normalized."""
    A = Automorphism.linear(rand_invertible_matrix(rng, n), cap)
    Z = rand_z_one_flat(rng, n, cap, terms, max_exp=max_exp)
    return A.compose(exp(Z))


def fields_equal_window(X, Y, window):
    return X.truncate_x(window) == Y.truncate_x(window)
