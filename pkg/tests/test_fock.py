import json

import pytest
from hypothesis import given, settings, strategies as st

from za_engine.fock import (
    FockState,
    FockVector,
    GradedBasis,
    ModuleLabel,
    VACUUM_KEY,
    apply_mode,
    charge_shift,
    enumerate_basis,
    grading_eigenvalue,
    kappa,
    keys_of_degree,
    vacuum_weight,
)
from za_engine.rational import Rational


def colored_part_counts(n_max):
    """Multisets of odd parts in two colours and even parts in one, by direct polynomial products."""
    c = [1] + [0] * n_max
    for n in range(1, n_max + 1):
        copies = 2 if n % 2 else 1
        for _ in range(copies):
            for i in range(n, n_max + 1):
                c[i] += c[i - n]
    return c


def test_counts_match_colored_partitions():
    label = ModuleLabel(Rational(1, 2), 1)
    counts = enumerate_basis(label, 12).counts()
    assert counts == colored_part_counts(12)
    assert counts[:5] == [1, 2, 4, 8, 14]


def test_basis_is_duplicate_free_and_graded():
    for d in range(9):
        keys = keys_of_degree(d)
        assert len(set(keys)) == len(keys)
        assert all(FockState.from_key(ModuleLabel(1, 2), k).degree == d for k in keys)


def test_basis_order_is_deterministic():
    assert keys_of_degree(4) == keys_of_degree(4)
    keys = keys_of_degree(4)
    assert list(keys) == sorted(keys, key=lambda k: (k[1], k[0], k[2]))


def test_zero_mode_and_kappas():
    label = ModuleLabel(Rational(1, 3), Rational(2, 5))
    vac = FockVector.vacuum(label)
    assert apply_mode(1, 0, vac)[VACUUM_KEY] == Rational(2, 3)
    k = label.k
    assert kappa(1, k) == 4 * (k + 2)
    assert kappa(0, k) == 4 * k
    assert kappa(2, k) == -4 * k


def test_annihilation_after_creation():
    label = ModuleLabel(1, -4)
    vac = FockVector.vacuum(label)
    for i, n in ((0, 1), (1, 2), (2, 3)):
        out = apply_mode(i, n, apply_mode(i, -n, vac))
        assert out[VACUUM_KEY] == kappa(i, label.k) * n
    assert not apply_mode(0, 1, vac)


def test_mode_parity_rejected():
    vac = FockVector.vacuum(ModuleLabel(1, 2))
    with pytest.raises(ValueError):
        apply_mode(0, 2, vac)
    with pytest.raises(ValueError):
        apply_mode(1, 1, vac)
    with pytest.raises(ValueError):
        FockState(ModuleLabel(1, 2), lam1=(3,))


def test_label_rejects_critical_and_zero_level():
    with pytest.raises(ValueError):
        ModuleLabel(1, -2)
    with pytest.raises(ValueError):
        ModuleLabel(1, 0)
    with pytest.raises(TypeError):
        ModuleLabel(0.5, 1)


def test_charge_shift():
    label = ModuleLabel(Rational(1, 2), -3)
    assert charge_shift(Rational(1, 2), label) == ModuleLabel(Rational(-1, 2), -3)
    assert charge_shift(1, ModuleLabel(1, 2)) == ModuleLabel(9, 2)


def test_grading():
    assert vacuum_weight(ModuleLabel(Rational(1, 2), -3)) == Rational(5, 8)
    assert vacuum_weight(ModuleLabel(1, -4)) == Rational(1, 4)
    assert grading_eigenvalue(FockState(ModuleLabel(1, -4), lam1=(2,))) == Rational(9, 4)


def test_basis_json_roundtrip():
    b = enumerate_basis(ModuleLabel(Rational(1, 3), Rational(2, 5)), 6)
    text = b.to_json()
    again = GradedBasis.from_json(text)
    assert again == b and again.to_json() == text
    doc = json.loads(text)
    doc["version"] = 99
    with pytest.raises(ValueError):
        GradedBasis.from_json(json.dumps(doc))


def _allowed(i):
    if i == 1:
        return st.integers(-3, 3).map(lambda t: 2 * t).filter(lambda n: n != 0)
    return st.integers(-3, 2).map(lambda t: 2 * t + 1)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([0, 1, 2]), st.sampled_from([0, 1, 2]), st.data(),
       st.sampled_from(list(keys_of_degree(3)) + list(keys_of_degree(4))))
def test_heisenberg_commutator(i, j, data, key):
    m = data.draw(_allowed(i))
    n = data.draw(_allowed(j))
    label = ModuleLabel(Rational(1, 2), Rational(2, 5))
    v = FockVector(label, {key: Rational(1)})
    comm = apply_mode(i, m, apply_mode(j, n, v)) - apply_mode(j, n, apply_mode(i, m, v))
    expected = v * (kappa(i, label.k) * m) if (i == j and m + n == 0) else FockVector(label)
    assert comm == expected
