"""Exact resonance arithmetic and the low-dimension classification tables.

An eigenvalue tuple mu = (mu_1, ..., mu_n) in Q[i]^n (the transverse
eigenvalues; the eigenvalue along the invariant curve is normalized to 1)
determines which monomial fields survive normalization: the index K is
resonant when the pairing <mu, K> is an integer <= 0, and the configuration
has a *transverse negative resonance* when some <mu, K> over the degree->= 0
index set is an integer >= 1, equivalently when some cone element
sum p_i mu_i (p in N^n, |p| >= 1) equals mu_j + q with q >= 1.

Everything here is exact.  For n <= 3 the negative-resonance question is
decided outright: per direction j, the imaginary-part constraint cuts N^n
down to finitely many minimal solutions plus a Hilbert basis (box
enumeration), and on the real part the reachable values form alpha + M for a
finitely generated monoid M of rationals, where hitting Z_{>=1} reduces to a
single congruence when M has a positive or mixed-sign generator and to a
bounded knapsack when all generators are negative.  For larger n the verdict
falls back to bounded enumeration with the bound recorded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from itertools import product as _cartesian

from .coeff import GaussianRational
from .series import iter_l_indices

__all__ = [
    "ResonantIndex",
    "NegativeWitness",
    "ResonanceReport",
    "NtnrResult",
    "Classification3",
    "enumerate_resonances",
    "decide_ntnr",
    "classify_dim2",
    "classify_dim3",
    "origin_in_hull",
    "LINEARIZABLE",
    "CLASSIFIED_BY_HOLONOMY",
    "POINCARE",
    "SIEGEL_NONREAL",
    "SIEGEL_REAL_CLASSIFIED",
    "SIEGEL_REAL_3A",
    "SIEGEL_REAL_3B",
]

LINEARIZABLE = "Linearizable"
CLASSIFIED_BY_HOLONOMY = "ClassifiedByHolonomy"
POINCARE = "Poincare"
SIEGEL_NONREAL = "SiegelNonreal"
SIEGEL_REAL_CLASSIFIED = "SiegelRealClassified"
SIEGEL_REAL_3A = "SiegelReal3a"
SIEGEL_REAL_3B = "SiegelReal3b"


def as_eigenvalues(mu):
    """Coerce to a tuple of exact Q[i] eigenvalues (n >= 1)."""
    out = []
    for m in mu:
        if isinstance(m, GaussianRational):
            out.append(m)
        elif isinstance(m, (int, Fraction)):
            out.append(GaussianRational(m))
        else:
            raise TypeError("eigenvalues must be exact Q[i] scalars")
    if not out:
        raise ValueError("need at least one transverse eigenvalue")
    return tuple(out)


def pairing(mu, K) -> GaussianRational:
    """The weighted exponent sum <mu, K> = sum_i mu_i k_i."""
    s = GaussianRational.ZERO
    for m, k in zip(mu, K):
        s = s + m * k
    return s





@dataclass(frozen=True)
class ResonantIndex:
    """K with <mu,K> = s an integer <= 0; the surviving coefficient is x^{-s}."""

    K: tuple
    s: int

    @property
    def x_exp(self) -> int:
        return -self.s

    def to_json(self):
        return {"K": list(self.K), "s": self.s, "x_exp": self.x_exp}


@dataclass(frozen=True)
class NegativeWitness:
    """K in the degree->=0 index set with q = <mu,K> an integer >= 1.

    In cone form: p = K + e_j satisfies sum p_i mu_i = mu_j + q with |p| >= 1;
    j is forced when K has a -1 entry and taken to be 1 otherwise.
    """

    K: tuple
    q: int

    @property
    def j(self) -> int:
        return self.K.index(-1) + 1 if -1 in self.K else 1

    @property
    def p(self) -> tuple:
        j = self.j
        return tuple(k + (1 if pos == j - 1 else 0) for pos, k in enumerate(self.K))

    @property
    def degree_zero(self) -> bool:
        return sum(self.K) == 0

    def to_json(self):
        return {
            "K": list(self.K),
            "q": self.q,
            "p": list(self.p),
            "j": self.j,
            "degree_zero": self.degree_zero,
        }


@dataclass(frozen=True)
class ResonanceReport:
    mu: tuple
    degree_bound: int
    resonant: tuple
    negative: tuple

    @property
    def negative_resonance_found(self) -> bool:
        return bool(self.negative)

    def witness(self):
        return self.negative[0] if self.negative else None

    def to_json(self):
        w = self.witness()
        return {
            "mu": [str(m) for m in self.mu],
            "bound": self.degree_bound,
            "resonant": [r.to_json() for r in self.resonant],
            "negative_found": self.negative_resonance_found,
            "witness": w.to_json() if w else None,
        }


def enumerate_resonances(mu, d: int) -> ResonanceReport:
    """List resonant indices with |K| <= d and bounded negative-resonance hits.

    Resonant indices need |K| >= 1; negative hits are scanned over |K| >= 0
    (the degree-0 hits, differences mu_i - mu_j in Z_{>=1}, are flagged so
    both readings of the cone stay auditable).
    """
    mu = as_eigenvalues(mu)
    if d < 1:
        raise ValueError("degree bound must be >= 1")
    n = len(mu)
    resonant = []
    negative = []
    for K in iter_l_indices(n, 0, d, with_direction=False):
        s = pairing(mu, K)
        if not s.is_integer():
            continue
        val = s.re
        if sum(K) >= 1 and val <= 0:
            resonant.append(ResonantIndex(K, int(val)))
        if val >= 1:
            negative.append(NegativeWitness(K, int(val)))
    return ResonanceReport(mu, d, tuple(resonant), tuple(negative))


@dataclass(frozen=True)
class NtnrResult:
    holds: bool
    exact: bool
    bound: int | None
    witness: NegativeWitness | None

    def __bool__(self):
        return self.holds

    def to_json(self):
        return {
            "ntnr": self.holds,
            "exact": self.exact,
            "bound": self.bound,
            "witness": self.witness.to_json() if self.witness else None,
        }


def decide_ntnr(mu, fallback_bound: int = 8) -> NtnrResult:
    """Decide "no transverse negative resonance" with a certificate.

    Exact and unbounded for n <= 3; for larger n, returns the bounded-degree
    verdict of :func:`enumerate_resonances` with the bound recorded.
    """
    mu = as_eigenvalues(mu)
    n = len(mu)
    if n > 3:
        report = enumerate_resonances(mu, fallback_bound)
        return NtnrResult(
            holds=not report.negative_resonance_found,
            exact=False,
            bound=fallback_bound,
            witness=report.witness(),
        )
    if _negative_resonance_exists(mu):
        return NtnrResult(False, True, None, _find_witness(mu))
    return NtnrResult(True, True, None, None)


def _negative_resonance_exists(mu) -> bool:
    n = len(mu)
    den = 1
    for m in mu:
        den = den * m.im.denominator // math.gcd(den, m.im.denominator)
    S = [int(m.im * den) for m in mu]
    rs = [m.re for m in mu]
    for j in range(n):
        T = S[j]
        if all(s == 0 for s in S):
            if T != 0:
                continue
            bases = [tuple(0 for _ in range(n))]
            hilbert = [
                tuple(1 if p == i else 0 for p in range(n)) for i in range(n)
            ]
        else:
            hilbert = _hilbert_basis_single(S)
            bases = _minimal_inhomogeneous(S, T)
            if not bases:
                continue
        gens = [sum((r * h for r, h in zip(rs, hv)), Fraction(0)) for hv in hilbert]
        for b in bases:
            alpha = sum((r * p for r, p in zip(rs, b)), Fraction(0)) - rs[j]
            if any(b):
                if _monoid_hits_positive_integer(alpha, gens):
                    return True
            else:
                # p = 0 is excluded (|p| >= 1), so force at least one
                # Hilbert-basis step before testing reachability.
                for g in gens:
                    if _monoid_hits_positive_integer(alpha + g, gens):
                        return True
    return False


def _hilbert_basis_single(S):
    """Minimal nonzero solutions in N^n of <S, c> = 0 for integer S.

    Components of minimal solutions are bounded by max |S_i| (Huet's bound
    for a single homogeneous equation); the box enumeration below is checked
    against brute force in the tests.
    """
    n = len(S)
    bound = max(1, max(abs(s) for s in S))
    sols = []
    for c in _cartesian(range(bound + 1), repeat=n):
        if any(c) and sum(s * v for s, v in zip(S, c)) == 0:
            sols.append(c)
    return _minimal_elements(sols)


def _minimal_inhomogeneous(S, T):
    """Minimal solutions in N^n of <S, p> = T (box bound max|S| + |T| + 1)."""
    n = len(S)
    bound = max(1, max(abs(s) for s in S)) + abs(T) + 1
    sols = []
    for p in _cartesian(range(bound + 1), repeat=n):
        if sum(s * v for s, v in zip(S, p)) == T:
            sols.append(p)
    return _minimal_elements(sols)


def _minimal_elements(sols):
    out = []
    for c in sorted(sols, key=sum):
        if not any(all(o[i] <= c[i] for i in range(len(c))) for o in out):
            out.append(c)
    return out


def _monoid_hits_positive_integer(alpha: Fraction, gens) -> bool:
    """Does alpha + (N-combination of gens) land in Z_{>=1}?"""
    gens = [g for g in gens if g != 0]
    if not gens:
        return alpha.denominator == 1 and alpha >= 1
    if any(g > 0 for g in gens):
        # Mixed signs generate the full group e*Z; all-positive generators
        # reach every sufficiently large multiple of e.  Either way targets
        # q - alpha with q ranging over large integers leave only a
        # congruence: q*m = alpha*m + k*(e*m) solvable over Z.
        e = _fraction_gcd(gens)
        m = _lcm(alpha.denominator, e.denominator)
        A = int(alpha * m)
        E = int(e * m)
        return A % math.gcd(E, m) == 0
    # All generators negative: q <= alpha, finitely many targets, knapsack.
    if alpha < 1:
        return False
    scale = alpha.denominator
    for g in gens:
        scale = _lcm(scale, g.denominator)
    weights = [int(-g * scale) for g in gens]
    for q in range(1, math.floor(alpha) + 1):
        target = int((alpha - q) * scale)
        if _reachable(target, weights):
            return True
    return False


def _reachable(target: int, weights) -> bool:
    if target == 0:
        return True
    dp = [False] * (target + 1)
    dp[0] = True
    for w in weights:
        if w <= 0 or w > target:
            continue
        for v in range(w, target + 1):
            if dp[v - w]:
                dp[v] = True
    return dp[target]


def _fraction_gcd(vals) -> Fraction:
    den = 1
    for v in vals:
        den = _lcm(den, v.denominator)
    g = 0
    for v in vals:
        g = math.gcd(g, abs(int(v * den)))
    return Fraction(g, den)


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def _find_witness(mu) -> NegativeWitness:
    bound = 2
    while bound <= 256:
        report = enumerate_resonances(mu, bound)
        if report.negative:
            return report.witness()
        bound *= 2
    raise AssertionError(
        "negative resonance decided feasible but no witness below degree 256"
    )


# --- dimension-2 and dimension-3 classification -----------------------------


def classify_dim2(lam) -> str:
    """Eigenvalue pair (1, lam): linearizable unless lam is real <= 0."""
    lam = as_eigenvalues([lam])[0]
    if lam.im != 0 or lam.re > 0:
        return LINEARIZABLE
    return CLASSIFIED_BY_HOLONOMY


@dataclass(frozen=True)
class Classification3:
    case: str
    siegel: bool
    witness: dict | None = None

    def to_json(self):
        return {"case": self.case, "siegel": self.siegel, "witness": self.witness}


def classify_dim3(lam, mu) -> Classification3:
    """Classify the eigenvalue triple (1, lam, mu) over exact Q[i] data.

    Poincare when the convex hull of {1, lam, mu} misses the origin (boundary
    counts as Siegel); Siegel with a nonreal transverse eigenvalue is
    holonomy-classified; Siegel all-real splits into the holonomy-classified
    case and the two resonance-witnessed subcases, up to swapping lam and mu.
    """
    lam = as_eigenvalues([lam])[0]
    mu = as_eigenvalues([mu])[0]
    siegel = origin_in_hull([GaussianRational.ONE, lam, mu])
    if not siegel:
        return Classification3(POINCARE, False)
    if lam.im != 0 or mu.im != 0:
        return Classification3(SIEGEL_NONREAL, True)
    a, b = lam.re, mu.re
    lo, hi = min(a, b), max(a, b)
    if hi > 0:
        # lo <= 0 < hi after permutation; Siegel rules out both positive.
        w = _eq5_witness(hi, lo)
        if w is None:
            w = {"u": str(hi), "v": "0"}
        return Classification3(SIEGEL_REAL_3B, True, w)
    if lo < hi:
        w = _eq5_witness(hi, lo)
        if w is not None:
            return Classification3(SIEGEL_REAL_3A, True, w)
    return Classification3(SIEGEL_REAL_CLASSIFIED, True)


def _eq5_witness(x: Fraction, y: Fraction):
    """Smallest p >= 1 with p*x = y + q for some integer q >= 1, if any."""
    if x == 0:
        if y.denominator == 1 and -y >= 1:
            return {"p": 1, "q": int(-y)}
        return None
    # p*x - y integral: a linear congruence for p.
    m = _lcm(x.denominator, y.denominator)
    A = int(x * m)
    C = int(y * m) % m
    g = math.gcd(A, m)
    if C % g != 0:
        return None
    period = m // g
    # One residue solving p*A = C (mod m).
    p0 = next((p for p in range(1, period + 1) if (p * A - C) % m == 0), None)
    if p0 is None:
        return None
    if x > 0:
        p = p0
        while x * p - y < 1:
            p += period
        return {"p": p, "q": int(x * p - y)}
    # x < 0: q decreases with p; only finitely many candidates.
    p = p0
    while x * p - y >= 1:
        q = x * p - y
        if q.denominator == 1:
            return {"p": p, "q": int(q)}
        p += period
    return None


def origin_in_hull(points) -> bool:
    """Exact membership of 0 in the convex hull of Q[i] points.

    Feasibility of sum w_i p_i = 0, sum w_i = 1, w >= 0 over the rationals;
    a nonempty solution polytope has a vertex supported on linearly
    independent columns, so checking every support of size 1..len(points)
    via exact square solves is complete.
    """
    pts = as_eigenvalues(points)
    n = len(pts)
    for size in range(1, n + 1):
        for support in combinations(range(n), size):
            w = _solve_support([pts[i] for i in support])
            if w is not None and all(v >= 0 for v in w):
                return True
    return False


def _solve_support(pts):
    """Solve sum w_i p_i = 0 (complex), sum w_i = 1 on the given support.

    Returns the unique rational solution, or None when the (possibly
    rectangular) system is inconsistent or underdetermined; underdetermined
    supports are redundant because some smaller support then carries a
    vertex.
    """
    k = len(pts)
    rows = [
        [p.re for p in pts] + [Fraction(0)],
        [p.im for p in pts] + [Fraction(0)],
        [Fraction(1)] * k + [Fraction(1)],
    ]
    # Gaussian elimination on a 3 x (k+1) system.
    pivots = []
    r = 0
    for col in range(k):
        piv = next((i for i in range(r, 3) if rows[i][col] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        rows[r] = [v / rows[r][col] for v in rows[r]]
        for i in range(3):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [v - f * w for v, w in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
    for i in range(r, 3):
        if rows[i][k] != 0:
            return None
    if len(pivots) < k:
        return None
    w = [Fraction(0)] * k
    for i, col in enumerate(pivots):
        w[col] = rows[i][k]
    return w
