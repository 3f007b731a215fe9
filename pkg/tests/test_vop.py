import pytest
from hypothesis import given, settings, strategies as st

from za_engine.fock import VACUUM_KEY, FockVector, ModuleLabel, enumerate_basis, key_degree
from za_engine.rational import Rational
from za_engine.report import PreconditionError, UnsupportedParameter
from za_engine.vop import (
    CATALOG,
    ModeMatrix,
    ModeProvider,
    WindowError,
    build_operator,
    check_eta,
    check_grading_covariance,
    check_intertwining,
    check_screening,
    check_sl2_relations,
    check_zalgebra,
    mode_matrix,
)
from za_engine.vop.checks import first_difference, screening_levels, zalgebra_exponent

HALF = Rational(1, 2)


def _mode(name, label, nu, N):
    return mode_matrix(build_operator(name, label), nu, enumerate_basis(label, N))


def test_beta_creates_phi0():
    label = ModuleLabel(HALF, 1)
    out = _mode("beta", label, -1, 3).apply(FockVector.vacuum(label))
    assert out.terms == {((1,), (), ()): HALF}


def test_x0_on_vacuum_is_j():
    for j, k in ((HALF, 1), (1, -4), (Rational(1, 3), Rational(2, 5))):
        label = ModuleLabel(j, k)
        out = _mode("x", label, 0, 2).apply(FockVector.vacuum(label))
        assert out.terms == {VACUUM_KEY: label.j}


def test_eta_zero_mode_on_vacuum():
    label = ModuleLabel(HALF, -3)
    spec = build_operator("eta", label)
    assert spec.exponent_offset(label) == 0
    assert spec.target_label(label) == ModuleLabel(-HALF, -3)
    out = _mode("eta", label, 0, 2).apply(FockVector.vacuum(label))
    assert out.terms == {VACUUM_KEY: 1}


def test_off_lattice_mode_rejected():
    label = ModuleLabel(HALF, 1)
    with pytest.raises(ValueError):
        _mode("Phi+", label, 0, 2)


def test_window_error_on_composition():
    label = ModuleLabel(HALF, 1)
    low = _mode("beta", label, 1, 2)
    lift = _mode("beta", label, -1, 2)
    with pytest.raises(WindowError):
        low @ lift


def test_level_mismatch_rejected():
    spec = build_operator("x", ModuleLabel(1, 2))
    with pytest.raises(ValueError):
        spec.exponent_offset(ModuleLabel(1, 1))
    with pytest.raises(KeyError):
        build_operator("nope", ModuleLabel(1, 2))


def test_mode_matrix_json_roundtrip():
    label = ModuleLabel(Rational(1, 3), Rational(2, 5))
    m = _mode("x", label, 1, 4)
    again = ModeMatrix.from_json(m.to_json())
    assert again.same_entries(m) and again.to_json() == m.to_json()


def test_first_difference_reports_entry():
    label = ModuleLabel(HALF, 1)
    m = _mode("x", label, 0, 2)
    assert first_difference(m, m) is None
    t, s, a, b = first_difference(m, m * 2)
    assert b == 2 * a and a != 0


def test_small_sl2():
    rep = check_sl2_relations(ModuleLabel(HALF, 1), 3, 2)
    assert rep.verdict == "pass" and rep.checked > 0


def test_zalgebra_small_windows():
    for k in (2, 1):
        assert check_zalgebra(ModuleLabel(HALF, k), 3, 2).verdict == "pass"


def test_zalgebra_restricted_levels():
    assert zalgebra_exponent(Rational(2, 5)) == 5
    with pytest.raises(UnsupportedParameter):
        zalgebra_exponent(Rational(3))


def test_screening_small():
    assert check_screening(ModuleLabel(1, -4), 3, 2).verdict == "pass"


def test_screening_needs_lattice_residue():
    with pytest.raises(PreconditionError):
        screening_levels(ModuleLabel(HALF, 1), 1)
    assert screening_levels(ModuleLabel(1, -4), 2) == [ModuleLabel(1, -4), ModuleLabel(-1, -4)]


def test_intertwining_small():
    assert check_intertwining(ModuleLabel(HALF, 1), 3, 2).verdict == "pass"


def test_eta_small():
    for label in (ModuleLabel(HALF, -3), ModuleLabel(1, -4)):
        assert check_eta(label, 3, 2).verdict == "pass"


def test_grading_covariance_small():
    assert check_grading_covariance(ModuleLabel(Rational(1, 3), Rational(2, 5)), 3, 2).verdict == "pass"


def test_provider_memoizes():
    P = ModeProvider()
    label = ModuleLabel(HALF, 1)
    assert P.get("x", label, 1, 3) is P.get("x", label, 1, 3)
    br = P.bracket(("beta", 1), ("beta", -1), label, 3)
    assert br.same_entries(ModeMatrix.identity(label, 3) * label.k)


labels = st.sampled_from([ModuleLabel(HALF, 1), ModuleLabel(Rational(1, 3), Rational(2, 5)),
                          ModuleLabel(1, -4), ModuleLabel(HALF, -3), ModuleLabel(1, 2)])


@settings(max_examples=40, deadline=None)
@given(labels, st.sampled_from(CATALOG), st.integers(-3, 3))
def test_modes_shift_degree_by_offset(label, name, t):
    spec = build_operator(name, label)
    nu = -spec.exponent_offset(label) + t
    m = mode_matrix(spec, nu, enumerate_basis(label, 3))
    for tk, sk, _ in m.nonzero_entries():
        assert key_degree(tk) == key_degree(sk) - nu - spec.exponent_offset(label)
