import pytest
from hypothesis import given, settings, strategies as st

from za_engine.exact import SeriesError, TruncationError
from za_engine.rational import Rational
from za_engine.special import (
    Monomial,
    eisenstein_bracket,
    flip_symmetric,
    pochhammer,
    q_series,
    r_matrix,
    sl2_relations_hold,
    structural_matrices,
    theta,
)


def _known(series, q_exp, x_exp):
    """Coefficient at q^q_exp x^x_exp, or None where truncated."""
    try:
        inner = series[q_exp]
    except TruncationError:
        return None
    if not hasattr(inner, "coeffs"):
        return inner if x_exp == 0 else Rational(0)
    try:
        return inner[x_exp]
    except TruncationError:
        return None


def test_euler_function_pentagonal():
    s = pochhammer(Monomial(1, 1, 0), 1, 16)
    pent = {0: 1}
    for n in range(1, 5):
        pent[n * (3 * n - 1) // 2] = (-1) ** n
        pent[n * (3 * n + 1) // 2] = (-1) ** n
    assert [s[e] for e in range(16)] == [pent.get(e, 0) for e in range(16)]


def test_pochhammer_with_argument():
    s = pochhammer(Monomial(1, 0, 1), 2, 5, x_prec=4)
    # (x; q^2): (1 - x)(1 - q^2 x)(1 - q^4 x)
    assert _known(s, 0, 0) == 1 and _known(s, 0, 1) == -1
    assert _known(s, 2, 1) == -1 and _known(s, 2, 2) == 1
    assert _known(s, 1, 0) == 0


def test_pochhammer_rejects_bad_input():
    with pytest.raises(SeriesError):
        pochhammer(Monomial(1, 1, 0), 0, 5)
    with pytest.raises(SeriesError):
        pochhammer(Monomial(1, -1, 0), 1, 5)


def test_theta_triple_product():
    t = theta(1, Monomial(1, 0, 1), 10, 5)
    oracle = {}
    for n in range(-6, 7):
        oracle[(n * (n - 1) // 2, n)] = (-1) ** (n % 2)
    seen = 0
    for a in range(10):
        for b in range(-6, 6):
            got = _known(t, a, b)
            if got is not None:
                assert got == oracle.get((a, b), 0), (a, b)
                seen += 1
    assert seen > 40


def test_q_series_builder():
    s = q_series({(0, 0): 1, (2, 1): Rational(1, 2)}, 4, 3)
    assert _known(s, 2, 1) == Rational(1, 2)
    assert _known(s, 4, 0) is None


def test_structural_matrices():
    assert sl2_relations_hold()
    assert flip_symmetric()
    A, B, C = structural_matrices()
    assert A[0][0] == 1 and B[0][3] == 1 and C[0][3] == Rational(1, 2)


def test_r_matrix_q0_is_rational_limit():
    r = r_matrix(4, 8)
    # x/(1 - x^2) and (1 + x^2)/(1 - x^2)
    for b in range(8):
        odd = 1 if b % 2 else 0
        assert _known(r.a, 0, b) == odd and _known(r.b, 0, b) == odd
        assert _known(r.c, 0, b) == (0 if b % 2 else (1 if b == 0 else 2))
    shifted = r_matrix(4, 8, c_shift=Rational(1, 2))
    assert _known(shifted.c, 0, 0) == Rational(3, 2)
    assert len(r.to_json()) == 4 and len(r.to_json()[0]) == 4


@pytest.mark.parametrize("l", [1, 2, 3])
def test_eisenstein_bracket_starts_at_2l(l):
    s = eisenstein_bracket(l, 12, 6)
    for a in range(2 * l):
        for b in range(-6, 6):
            assert _known(s, a, b) in (0, None)
    assert _known(s, 2 * l, -2) == -2 * (-1) ** l


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 3), st.integers(0, 4), st.fractions(min_value=-3, max_value=3, max_denominator=3))
def test_pochhammer_splits_by_parity(p, q_exp, c):
    z = Monomial(Rational(c.numerator, c.denominator), q_exp, 0)
    whole = pochhammer(z, p, 12)
    split = pochhammer(z, 2 * p, 12) * pochhammer(Monomial(z.coeff, q_exp + p, 0), 2 * p, 12)
    assert whole.agrees_with(split)
