from fractions import Fraction

import pytest

from za_engine.fock import ModuleLabel
from za_engine.rational import Rational
from za_engine.report import PreconditionError
from za_engine.trace import (
    ONE_POINT_LABEL,
    Insertion,
    TraceRequest,
    character,
    check_character,
    check_trace_onepoint,
    check_trace_twopoint,
    graded_trace,
    kz_check,
    kz_residual,
    one_point_trace,
    two_point_trace,
)


def binomial_series(r, n_terms):
    out, c = [], Fraction(1)
    for s in range(n_terms):
        out.append(c * (-1) ** s)
        c = c * (r - s) / (s + 1)
    return out


def test_character_counts():
    label = ModuleLabel(Rational(1, 2), -3)
    ch = character(label, 6)
    h = Rational(5, 8)
    assert [ch[h + d] for d in range(5)] == [1, 2, 4, 8, 14]
    assert check_character(label, 10).verdict == "pass"


def test_empty_insertions_give_character():
    label = ModuleLabel(1, 2)
    assert graded_trace(TraceRequest(label, (), 5)).q_series().agrees_with(character(label, 5))


def test_nonclosing_charge():
    req = TraceRequest(ONE_POINT_LABEL, (Insertion("Phi+", var="z1"),), 3)
    with pytest.raises(PreconditionError):
        graded_trace(req)
    assert graded_trace(req, strict=False).terms == {}


def test_insertion_validation():
    with pytest.raises(ValueError):
        Insertion("x")
    with pytest.raises(ValueError):
        Insertion("x", var="z", nu=0)
    with pytest.raises(PreconditionError):
        graded_trace(TraceRequest(ModuleLabel(Rational(1, 2), 1), (Insertion("Phi+", nu=0),), 2))


def test_one_point_leading_terms():
    s = one_point_trace(1, 4)
    coeffs = {}
    for (qe, zs), c in s.terms.items():
        assert all(e == 0 for _, e in zs)
        coeffs[qe] = coeffs.get(qe, 0) + c
    h = Rational(5, 8)
    # (1 - q^2)^{-3/2} times higher factors: 1 + 3/2 q^2 + ...
    assert coeffs[h] == 1 and coeffs.get(h + 1, 0) == 0 and coeffs[h + 2] == Rational(3, 2)


def test_one_point_check_small():
    assert check_trace_onepoint(4).verdict == "pass"


def test_two_point_lowest_order():
    s = two_point_trace(1, -1, 2, 6).ratio_series()
    lowest = s[Rational(1, 4)]
    oracle = binomial_series(Fraction(-1, 4), 4)
    # x^{1/4} (1 - x^2)^{-1/4}
    for t in range(4):
        assert lowest[Rational(1, 4) + 2 * t] == oracle[t]
    for t in range(3):
        assert lowest[Rational(1, 4) + 2 * t + 1] == 0


def test_two_point_depends_on_sign_product():
    a = two_point_trace(1, -1, 2, 6).ratio_series()
    b = two_point_trace(-1, 1, 2, 6).ratio_series()
    c = two_point_trace(1, 1, 2, 6).ratio_series()
    assert a.agrees_with(b)
    assert not a.agrees_with(c)


def test_two_point_stable_under_larger_window():
    small = two_point_trace(1, 1, 2, 6).ratio_series()
    large = two_point_trace(1, 1, 4, 8).ratio_series()
    assert small.agrees_with(large)


def test_two_point_check_small():
    rep = check_trace_twopoint(2, 6, 2)
    assert rep.verdict == "pass" and rep.details["normalization"] == ["1"]


def test_kz_small():
    rep = kz_check(2, 6, 2)
    assert rep.verdict == "pass"
    assert rep.details["regularization_sensitive"] is True


def test_kz_residual_is_exactly_zero():
    _, res = kz_residual(2, 6)
    for s in res:
        for e, c in s.items():
            if e <= Rational(1, 4) + 2:
                assert all(cx == 0 for _, cx in c.items())


def test_trace_json_rows():
    doc = one_point_trace(-1, 2).to_json()
    assert doc["stable_orders"]["q"] == "29/8"
    assert all("value_rational" in row for row in doc["series"])
