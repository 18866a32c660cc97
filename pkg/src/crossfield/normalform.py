"""Normal forms by homological elimination, with certified conjugations.

normalize() sweeps the monomial slots (K, j) of a field x d/dx + (triangular
linear z-part with diagonal mu) + higher terms in ascending graded-lex pair
order.  At each slot it splits the coefficient g through the shifted Euler
operator (x d/dx + <mu,K>) f = g - residual and conjugates by
exp(f(x) z^K (z_j d/dz_j)); the residual -- supported exactly on x^{-<mu,K>}
when <mu,K> is an integer -- is what survives.  Brackets of the eliminating
monomials with everything already in the field land strictly later in the
pair order (this is why the linear part must sit in the triangular cone
z_a d/dz_b, a <= b), so a single ascending sweep terminates with the
resonant monomials x^{-<mu,K>} z^K L(e_j), <mu,K> in Z_{<=0}, plus the
linear reference part, and composes the normalizing automorphism on the way.

x-dependent diagonal linear terms exponentiate to transcendental scalings
(z -> e^{f(x)} z), so fields carrying them are processed in the x-truncated
ring through degree x_cap, where the whole story is polynomial again and the
retained window is exact; fields without them run fully exact, Laurent
coefficients included.

Every run is certified through the substitution route, independent of the
adjoint series the sweep uses: normalize() checks the intertwining relation
Phi o X = X_normal o Phi on the coordinates, and verify_conjugation()
exposes the full pushforward difference pushforward(Phi, X) - Y for callers
who want the residual object itself.
"""

from __future__ import annotations

from dataclasses import dataclass

from .coeff import GaussianRational, LaurentPoly
from .lie import Automorphism, VectorField, exp, exp_ad
from .resonance import NtnrResult, as_eigenvalues, decide_ntnr, pairing
from .series import MonomialIndex, TransverseSeries, iter_l_indices

__all__ = [
    "NormalFormResult",
    "ResonantTerm",
    "CentralizerElement",
    "CentralizerResult",
    "CentralizerCheck",
    "LinearPartError",
    "normalize",
    "verify_conjugation",
    "centralizer_solve",
    "centralizer_check",
]


class LinearPartError(ValueError):
    """The input's linear part does not match the declared eigenvalues."""


@dataclass(frozen=True)
class ResonantTerm:
    K: tuple
    j: int
    x_exp: int
    coeff: GaussianRational

    def to_json(self):
        return {
            "K": list(self.K),
            "j": self.j,
            "x_exp": self.x_exp,
            "coeff": str(self.coeff),
        }


@dataclass(frozen=True)
class NormalFormResult:
    normal_field: VectorField
    normalizer: Automorphism
    resonant: tuple
    eps: tuple
    mu: tuple
    steps: tuple
    x_window: int | None
    certified: bool

    def resonant_json(self):
        return [t.to_json() for t in self.resonant]


def _linear_matrix_or_error(X: VectorField, mu):
    """Validate the pre-normal shape and return the linear coefficient matrix.

    Requirements: the d/dx component is exactly x; every z-component lies in
    m; linear monomials sit in the triangular cone z_a d/dz_b with a <= b;
    the constant part of the matrix is diag(mu) plus 0/1 entries on the
    adjacent slots z_{i-1} d/dz_i where mu_{i-1} = mu_i (strict Jordan input).
    """
    n, cap = X.n, X.cap
    if X.a != TransverseSeries.x_series(n, cap):
        raise LinearPartError("the d/dx component must be exactly x")
    for i, comp in enumerate(X.b, start=1):
        if not comp.is_zero() and comp.madic_order() < 1:
            raise LinearPartError(f"z-component {i} has a constant term")
    C = X.z_linear_matrix()
    eps = []
    for i in range(n):
        for j in range(n):
            entry = C[i][j]
            const = entry.coefficient(0)
            if j > i and not entry.is_zero():
                raise LinearPartError(
                    f"linear part leaves the triangular cone: z{j+1} feeds dz{i+1}"
                )
            if i == j:
                if const != mu[i]:
                    raise LinearPartError(
                        f"diagonal entry {i+1} is {const}, declared mu is {mu[i]}"
                    )
            elif const != 0:
                if j != i - 1:
                    raise LinearPartError(
                        "constant linear entries are allowed only on adjacent "
                        f"slots; found z{j+1} feeding dz{i+1}"
                    )
                if mu[i] != mu[i - 1]:
                    raise LinearPartError(
                        "adjacent nilpotent entry requires equal eigenvalues "
                        f"mu_{i} = mu_{i+1}"
                    )
                if const != GaussianRational.ONE:
                    raise LinearPartError(
                        f"adjacent nilpotent entry must be 0 or 1, found {const}"
                    )
    for i in range(1, n):
        eps.append(1 if C[i][i - 1].coefficient(0) == GaussianRational.ONE else 0)
    return C, tuple(eps)


def _needs_x_window(C) -> bool:
    """Truncated mode iff some diagonal linear entry is x-dependent."""
    for i, row in enumerate(C):
        diag = row[i]
        if any(e != 0 for e in diag.support()):
            return True
    return False


def normalize(
    X: VectorField,
    mu,
    x_cap: int | None = None,
    certify: bool = True,
) -> NormalFormResult:
    """Eliminate every nonresonant monomial of X and certify the conjugation.

    mu must match the constant diagonal of X's linear part.  x_cap bounds the
    x-support of the input (validated when given) and is mandatory when the
    diagonal has x-dependent linear terms, in which case all arithmetic runs
    in the ring truncated at x-degree x_cap and all statements hold there.
    """
    mu = as_eigenvalues(mu)
    n, cap = X.n, X.cap
    if len(mu) != n:
        raise LinearPartError(f"expected {n} eigenvalues, got {len(mu)}")
    C, eps = _linear_matrix_or_error(X, mu)
    window = None
    if _needs_x_window(C):
        if x_cap is None:
            raise LinearPartError(
                "x-dependent diagonal linear terms require an x_cap window"
            )
        if not all(comp.is_taylor() for comp in X.b) or not X.a.is_taylor():
            raise LinearPartError(
                "the x-truncated mode requires Taylor coefficients"
            )
        window = x_cap
    if x_cap is not None:
        _check_support(X, x_cap)

    field = X if window is None else X.truncate_x(window)
    normalizer = Automorphism.identity(n, cap)
    steps = []
    for idx in iter_l_indices(n, 0, cap - 1):
        g = field.coefficient_at(idx)
        if g.is_zero():
            continue
        s = pairing(mu, idx.K)
        f, residual = g.euler_solve(s)
        if f.is_zero():
            continue
        W = VectorField.monomial(n, cap, idx, f)
        field = exp_ad(W, field, x_window=window)
        step_phi = exp(W, 1, x_window=window)
        normalizer = step_phi.compose(normalizer)
        if window is not None:
            normalizer = normalizer.truncate_x(window)
        steps.append(idx)
        if field.coefficient_at(idx) != residual:
            raise AssertionError(
                f"elimination at {idx} left an unexpected coefficient"
            )

    if field.a != TransverseSeries.x_series(n, cap):
        raise AssertionError("the sweep disturbed the d/dx component")

    resonant = []
    for idx, poly in field.l_terms():
        K, j = idx.K, idx.j
        if K == (0,) * n:
            if poly != LaurentPoly.constant(mu[j - 1]):
                raise AssertionError("diagonal slot deviates from mu")
            continue
        s = pairing(mu, K)
        if not s.is_integer():
            raise AssertionError(f"nonresonant coefficient survived at {idx}")
        s_int = int(s.re)
        if not (poly.is_monomial() and poly.support() == [-s_int]):
            raise AssertionError(f"resonant slot {idx} is not a pure x^{-s_int} term")
        coeff = poly.coefficient(-s_int)
        if (
            s_int == 0
            and sum(K) == 0
            and j >= 2
            and K == tuple(1 if p == j - 2 else (-1 if p == j - 1 else 0) for p in range(n))
        ):
            continue  # adjacent Jordan entry, reported through eps
        resonant.append(ResonantTerm(K, j, -s_int, coeff))

    certified = False
    if certify:
        certified = _intertwines(normalizer, X, field, window)
        if not certified:
            raise AssertionError("conjugation certificate failed")
    return NormalFormResult(
        normal_field=field,
        normalizer=normalizer,
        resonant=tuple(resonant),
        eps=eps,
        mu=mu,
        steps=tuple(steps),
        x_window=window,
        certified=certified,
    )


def _check_support(X: VectorField, x_cap: int):
    polys = [X.a] + list(X.b)
    for comp in polys:
        for _, poly in comp.terms():
            lo, hi = poly.min_exp(), poly.max_exp()
            if lo is not None and (lo < -x_cap or hi > x_cap):
                raise LinearPartError(
                    f"coefficient support [{lo}, {hi}] exceeds the x_cap window"
                )


def _intertwines(phi: Automorphism, X: VectorField, Y: VectorField, window) -> bool:
    """Check phi o X = Y o phi on the coordinates, by pure substitution.

    Equivalent to pushforward(phi, X) = Y because phi is invertible (it is a
    composition of exponentials), but needs no inversion, so it is the cheap
    certificate normalize() runs on every call; like the sweep's adjoint
    series it never touches exp(ad), making the two routes independent.
    """
    pieces = [(X.a, phi.img_x)] + [(X.b[i], phi.img_z[i]) for i in range(X.n)]
    for comp, img in pieces:
        defect = phi.apply(comp) - Y.apply(img)
        if window is not None:
            defect = defect.truncate_x(window)
        if not defect.is_zero():
            return False
    return True


def verify_conjugation(
    phi: Automorphism, X: VectorField, Y: VectorField, x_window: int | None = None
) -> VectorField:
    """pushforward(phi, X) - Y along the substitution route; zero certifies.

    Independent of the adjoint-series route normalize() uses internally.  In
    the x-truncated mode the difference is taken on the retained window.
    """
    pushed = phi.pushforward(X)
    diff = pushed - Y
    if x_window is not None:
        diff = diff.truncate_x(x_window)
    return diff


# --- centralizer of the semisimple part -------------------------------------


@dataclass(frozen=True)
class CentralizerElement:
    kind: str  # "euler" or "monomial"
    index: MonomialIndex | None
    x_exp: int
    field: VectorField

    def text(self) -> str:
        return str(self.field)

    def to_json(self):
        return {
            "kind": self.kind,
            "K": list(self.index.K) if self.index else None,
            "j": self.index.j if self.index else None,
            "x_exp": self.x_exp,
            "field": self.text(),
        }


@dataclass(frozen=True)
class CentralizerResult:
    mu: tuple
    x_window: tuple
    degree: int
    elements: tuple

    @property
    def negative(self):
        return tuple(e for e in self.elements if e.x_exp < 0)

    @property
    def has_negative_x(self) -> bool:
        return bool(self.negative)


def centralizer_solve(source, x_window, degree: int) -> CentralizerResult:
    """Monomial basis of x-normalized fields commuting with x d/dx + L(mu).

    source is a NormalFormResult or an eigenvalue sequence.  A monomial
    x^l z^K L(e_j) commutes with the semisimple part iff l + <mu,K> = 0, so
    the basis is x d/dx together with every index K of z-degree |K|+1 <=
    degree whose pairing is an integer -l inside the requested x-window;
    negative l witnesses a field that is not Taylor in x.
    """
    mu = source.mu if isinstance(source, NormalFormResult) else as_eigenvalues(source)
    lo, hi = int(x_window[0]), int(x_window[1])
    if lo > hi:
        raise ValueError("empty x-window")
    if degree < 1:
        raise ValueError("degree must be >= 1")
    n = len(mu)
    cap = degree
    elements = [
        CentralizerElement("euler", None, 0, VectorField.euler(n, cap))
    ]
    for idx in iter_l_indices(n, 0, degree - 1):
        s = pairing(mu, idx.K)
        if not s.is_integer():
            continue
        l = -int(s.re)
        if not lo <= l <= hi:
            continue
        fieldv = VectorField.monomial(n, cap, idx, LaurentPoly.x(l))
        elements.append(CentralizerElement("monomial", idx, l, fieldv))
    return CentralizerResult(mu, (lo, hi), degree, tuple(elements))


@dataclass(frozen=True)
class CentralizerCheck:
    ok: bool
    ntnr: NtnrResult
    offenders: tuple
    result: CentralizerResult


def centralizer_check(mu, x_window, degree: int) -> CentralizerCheck:
    """No-negative-resonance implies a Taylor centralizer, at this truncation.

    When decide_ntnr holds, every centralizer monomial in the window must
    have x-exponent >= 0 (ok=False with the offending monomials otherwise,
    which would falsify the statement); when it fails, the check is vacuous
    and the offenders are reported for audit.
    """
    mu = as_eigenvalues(mu)
    ntnr = decide_ntnr(mu)
    result = centralizer_solve(mu, x_window, degree)
    offenders = result.negative
    ok = (not ntnr.holds) or not offenders
    return CentralizerCheck(ok=ok, ntnr=ntnr, offenders=offenders, result=result)
