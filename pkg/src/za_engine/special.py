"""Infinite q-Pochhammer products, theta functions and the elliptic r-matrix.

Bivariate objects are series in ``q`` whose coefficients are series in an
argument variable (``x`` by default).  Every inner series carries an explicit
truncation order so that fractional powers and inverses stay well defined.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exact import OffsetSeries, SeriesError, series_pow
from .rational import Rational, sign, to_rational

Q = "q"
X = "x"


@dataclass(frozen=True)
class Monomial:
    """``coeff * q**q_exp * x**x_exp``."""

    coeff: Rational = Rational(1)
    q_exp: int = 0
    x_exp: int = 0

    def __post_init__(self):
        object.__setattr__(self, "coeff", to_rational(self.coeff))

    def reciprocal_times(self, q_exp: int) -> Monomial:
        """``q**q_exp / self``."""
        return Monomial(1 / self.coeff, q_exp - self.q_exp, -self.x_exp)


def _inner(terms: dict, x_prec, var: str = X):
    """An argument-variable coefficient; a plain rational when no argument is in play."""
    if x_prec is None:
        if any(e != 0 for e in terms):
            raise SeriesError("argument powers present but no argument truncation given")
        return to_rational(terms.get(0, 0))
    return OffsetSeries.from_terms(var, terms, prec_exponent=x_prec, offset=0)


def q_series(terms: dict, q_prec: int, x_prec=None, offset=0) -> OffsetSeries:
    """Build ``sum c * q^a * x^b`` from ``{(a, b): c}`` with explicit truncations."""
    grouped: dict = {}
    for (a, b), c in terms.items():
        grouped.setdefault(to_rational(a), {})
        grouped[to_rational(a)][b] = grouped[to_rational(a)].get(b, 0) + c
    coeffs = {a: _inner(t, x_prec) for a, t in grouped.items() if a < q_prec}
    return OffsetSeries.from_terms(Q, coeffs, prec_exponent=q_prec, offset=offset)


def one(q_prec: int, x_prec=None) -> OffsetSeries:
    return q_series({(0, 0): 1}, q_prec, x_prec)


def pochhammer(z: Monomial, p: int, q_prec: int, x_prec=None) -> OffsetSeries:
    """``(z; q^p)_inf = prod_{n>=0} (1 - q^{p n} z)`` through ``O(q^q_prec)``.

    Only factors whose q-order lies inside the window contribute.
    """
    if p < 1:
        raise SeriesError("the nome must be a positive power of q")
    if z.q_exp < 0:
        raise SeriesError("argument must carry a non-negative power of q")
    result = one(q_prec, x_prec)
    if z.coeff == 0:
        return result
    n = 0
    while z.q_exp + p * n < q_prec:
        factor = q_series({(0, 0): 1, (z.q_exp + p * n, z.x_exp): -z.coeff}, q_prec, x_prec)
        result = result * factor
        n += 1
    return result


def theta(p: int, w: Monomial, q_prec: int, x_prec=None) -> OffsetSeries:
    """``Theta_{q^p}(w) = (q^p; q^p)(w; q^p)(q^p/w; q^p)`` expanded in ``|q^p| < |w| < 1``."""
    nome = Monomial(1, p, 0)
    return (pochhammer(nome, p, q_prec, x_prec) * pochhammer(w, p, q_prec, x_prec)
            * pochhammer(w.reciprocal_times(p), p, q_prec, x_prec))


def qpow(series: OffsetSeries, r) -> OffsetSeries:
    return series_pow(series, r)


# -- the elliptic r-matrix -----------------------------------------------------

# Actions on V = span(u+, u-), columns are images of u+ and u-.
E_PLUS_F = ((-1, 0), (0, 1))
E_MINUS_F = ((0, -1), (1, 0))
H_MAT = ((0, -1), (-1, 0))
BASIS = ((1, 1), (1, -1), (-1, 1), (-1, -1))


def _matmul(a, b):
    return tuple(tuple(sum(a[i][t] * b[t][j] for t in range(len(b))) for j in range(len(b[0])))
                 for i in range(len(a)))


def _kron(a, b):
    n, m = len(a), len(b)
    return tuple(tuple(Rational(a[i // m][j // m]) * b[i % m][j % m] for j in range(n * m))
                 for i in range(n * m))


def sl2_relations_hold() -> bool:
    """``[h, e] = 2e``, ``[h, f] = -2f``, ``[e, f] = h`` for the matrices above."""
    half = Rational(1, 2)
    e = tuple(tuple((E_PLUS_F[i][j] + E_MINUS_F[i][j]) * half for j in range(2)) for i in range(2))
    f = tuple(tuple((E_PLUS_F[i][j] - E_MINUS_F[i][j]) * half for j in range(2)) for i in range(2))
    h = H_MAT

    def br(a, b):
        ab, ba = _matmul(a, b), _matmul(b, a)
        return tuple(tuple(ab[i][j] - ba[i][j] for j in range(2)) for i in range(2))

    def sc(c, a):
        return tuple(tuple(c * a[i][j] for j in range(2)) for i in range(2))

    return br(h, e) == sc(2, e) and br(h, f) == sc(-2, f) and br(e, f) == h


def structural_matrices():
    """``(e+f)(x)(e+f)``, ``(e-f)(x)(e-f)`` and ``h(x)h / 2`` on ``V (x) V``."""
    half = Rational(1, 2)
    hh = _kron(H_MAT, H_MAT)
    return (_kron(E_PLUS_F, E_PLUS_F), _kron(E_MINUS_F, E_MINUS_F),
            tuple(tuple(c * half for c in row) for row in hh))


def flip_symmetric() -> bool:
    """Each structural matrix commutes with swapping ``u+ <-> u-`` in both factors."""
    P = _kron(((0, 1), (1, 0)), ((0, 1), (1, 0)))
    return all(_matmul(P, M) == _matmul(M, P) for M in structural_matrices())


def _r_terms(q_prec: int, x_prec: int, weight_sign: bool) -> dict:
    terms: dict = {}

    def add(a, b, c):
        if a < q_prec and b < x_prec:
            terms[(a, b)] = terms.get((a, b), 0) + c

    for s in range((x_prec + 1) // 2 + 1):
        add(0, 2 * s + 1, 1)
    for l in range(1, q_prec):
        w = sign(l) if weight_sign else 1
        for s in range(q_prec):
            if l * (2 * s + 1) >= q_prec:
                break
            add(l * (2 * s + 1), -(2 * s + 1), -w)
            add(l * (2 * s + 1), 2 * s + 1, w)
    return terms


def eisenstein_bracket(l: int, q_prec: int, x_prec: int) -> OffsetSeries:
    """``(-1)^l [term(l) + term(-l)]`` of the h(x)h coefficient, ``l >= 1``."""
    terms: dict = {}
    for s in range(1, q_prec):
        if 2 * l * s >= q_prec:
            break
        terms[(2 * l * s, 2 * s)] = 2 * sign(l)
        terms[(2 * l * s, -2 * s)] = -2 * sign(l)
    return q_series(terms, q_prec, x_prec)


@dataclass(frozen=True)
class RMatrixSeries:
    """Coefficients of ``r(z) = a (e+f)(x)(e+f) - b (e-f)(x)(e-f) + c h(x)h/2`` with ``x = 1/z``."""

    q_prec: int
    x_prec: int
    a: OffsetSeries
    b: OffsetSeries
    c: OffsetSeries

    def matrix(self):
        A, B, C = structural_matrices()
        out = []
        for i in range(4):
            row = []
            for j in range(4):
                row.append(self.a * A[i][j] - self.b * B[i][j] + self.c * C[i][j])
            out.append(row)
        return out

    def to_json(self):
        return [[str(e) for e in row] for row in self.matrix()]


def r_matrix(q_prec: int, x_prec: int, c_shift=0) -> RMatrixSeries:
    """The elliptic r-matrix expanded in ``|q| < |x| < 1`` (``x = z^-1``).

    The alternating sum in the h(x)h coefficient is summed by pairing ``l``
    with ``-l``.  ``c_shift`` adds a constant to that coefficient, which is
    how any other summation of the divergent constant parts would differ.
    """
    a = q_series(_r_terms(q_prec, x_prec, False), q_prec, x_prec)
    b = q_series(_r_terms(q_prec, x_prec, True), q_prec, x_prec)
    c0 = {(0, 0): 1 + to_rational(c_shift)}
    for s in range(1, x_prec // 2 + 1):
        if 2 * s < x_prec:
            c0[(0, 2 * s)] = 2
    c = q_series(c0, q_prec, x_prec)
    for l in range(1, q_prec):
        if 2 * l >= q_prec:
            break
        c = c + eisenstein_bracket(l, q_prec, x_prec)
    return RMatrixSeries(q_prec, x_prec, a, b, c)
