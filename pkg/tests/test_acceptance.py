"""One test per acceptance criterion; each prints a PASS/FAIL line.

Everything here is exact: a criterion passes only when every residual is the
rational zero on its stated window.
"""

import time

import pytest

from conftest import ACCEPTANCE_LINES
from za_engine.cache import ModeCache
from za_engine.cli import SuiteConfig, run_suite, strip_times
from za_engine.dva import check_dva_limit
from za_engine.fock import ModuleLabel, enumerate_basis
from za_engine.rational import Rational
from za_engine.trace import (
    character,
    check_character,
    check_trace_onepoint,
    check_trace_twopoint,
    kz_check,
    one_point_trace,
    two_point_trace,
    wp_spot_check,
)
from za_engine.trace import _collapse_field, _restrict
from za_engine.vop import (
    ModeProvider,
    build_operator,
    check_eta,
    check_intertwining,
    check_screening,
    check_sl2_relations,
    check_zalgebra,
    mode_matrix,
)

pytestmark = pytest.mark.slow

L = ModuleLabel
HALF = Rational(1, 2)


def report_line(number, title, reports, budget, extra_ok=True, note=""):
    ok = extra_ok and all(r.passed for r in reports)
    elapsed = sum(r.wall_time for r in reports)
    checked = sum(r.checked for r in reports)
    failures = [f for r in reports for f in r.failures][:1]
    line = (f"{'PASS' if ok else 'FAIL'} criterion {number:2d}: {title} "
            f"[{checked} identities, {elapsed:.1f}s, budget {budget}s]")
    if note:
        line += f" {note}"
    if failures:
        line += f" first failure: {failures[0]}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    return ok


def partitions(n, parity, largest=None):
    """Independent recursive count of partitions of n into parts of the given parity."""
    if n == 0:
        return 1
    largest = n if largest is None else largest
    return sum(partitions(n - p, parity, p) for p in range(1, min(n, largest) + 1) if p % 2 == parity)


def triple_count(d):
    return sum(partitions(d1, 0) * partitions(d0, 1) * partitions(d - d1 - d0, 1)
               for d1 in range(0, d + 1) for d0 in range(0, d - d1 + 1))


def test_criterion_01_sl2_relations():
    reps = []
    for j, k in ((HALF, 1), (Rational(1, 3), Rational(2, 5)), (1, -4)):
        reps.append(check_sl2_relations(L(j, k), 6, 4))
    assert report_line(1, "sl2 mode relations, |m|,|n| <= 4, degree <= 6", reps, 60 * 3)


def test_criterion_02_character():
    reps = [check_character(L(j, k), 20) for j, k in ((HALF, 1), (Rational(1, 3), Rational(2, 5)),
                                                       (1, -4), (HALF, -3))]
    brute = [triple_count(d) for d in range(5)]
    counts = enumerate_basis(L(HALF, 1), 4).counts()
    ok = brute == counts == [1, 2, 4, 8, 14]
    assert report_line(2, "character through degree 20, counts 1 2 4 8 14", reps, 10, extra_ok=ok)


def test_criterion_03_zalgebra():
    reps = [check_zalgebra(L(1, 2), 4, 3), check_zalgebra(L(HALF, 1), 4, 3)]
    # 7 x 7 exchange coefficients plus 7 factorization modes per level
    has_fact = all(r.checked == 7 * 7 + 7 for r in reps)
    assert report_line(3, "Z-algebra exchange and factorization, k = 2, 1", reps, 120,
                       extra_ok=has_fact)


def test_criterion_04_dva_limit():
    reps = [check_dva_limit(k, 12, 4, 12) for k in (2, 1, 3, HALF)]
    factors_ok = all(r.details["zalgebra_contact_factor"] == str(r.params["k"]) for r in reps)
    assert report_line(4, "deformed relation reduces to the Z-algebra relation", reps, 10,
                       extra_ok=factors_ok)


def test_criterion_05_screening():
    reps = [check_screening(L(j, k), 4, 3, provider=ModeProvider(), require_residue=False)
            for j, k in ((HALF, 1), (Rational(1, 3), Rational(2, 5)))]
    at_lattice = check_screening(L(1, -4), 4, 3, m_count=1, provider=ModeProvider())
    reps.append(at_lattice)
    charge_checked = "residue_levels" in at_lattice.details
    assert report_line(5, "screening current and [x_m, Q] = 0 at (1,-4)", reps, 60,
                       extra_ok=charge_checked)


def test_criterion_06_intertwining():
    reps = [check_intertwining(L(j, k), 4, 3) for j, k in ((HALF, 1), (1, -4))]
    assert report_line(6, "intertwiner commutation relations, both signs", reps, 60 * 2)


def test_criterion_07_eta():
    reps = [check_eta(L(HALF, -3), 5, 3), check_eta(L(1, -4), 5, 3)]
    assert report_line(7, "eta relations at (1/2,-3) and (1,-4)", reps, 60 * 2)


def test_criterion_08_one_point_trace():
    rep = check_trace_onepoint(12)
    stable = Rational(rep.details["stable_q"])
    assert report_line(8, "one-point trace closed form", [rep], 60,
                       extra_ok=stable >= Rational(5, 8) + 8, note=f"(stable below q^{stable})")


def test_criterion_09_two_point_trace():
    rep = check_trace_twopoint(6, 12, 6)
    norm = rep.details["normalization"]
    assert report_line(9, "two-point trace theta form, four sign pairs", [rep], 600,
                       note=f"(normalization {norm})")


def test_criterion_10_kz():
    rep = kz_check(6, 12, 6)
    assert report_line(10, "elliptic KZ residual vanishes, n = 1 and n = 2", [rep], 600)


def test_criterion_11_determinism(tmp_path):
    t0 = time.perf_counter()
    checks = []
    # larger windows reproduce earlier stable coefficients
    small, large = character(L(HALF, -3), 10), character(L(HALF, -3), 20)
    checks.append(all(small[Rational(5, 8) + d] == large[Rational(5, 8) + d] for d in range(11)))
    a, _ = _collapse_field(one_point_trace(1, 8))
    b, _ = _collapse_field(one_point_trace(1, 12))
    checks.append(a.agrees_with(b))
    lo = two_point_trace(1, -1, 4, 10).ratio_series()
    hi = two_point_trace(1, -1, 6, 12).ratio_series()
    q_order, x_lim = Rational(1, 4) + 4, Rational(17, 4)
    checks.append(_restrict(lo, q_order, x_lim).agrees_with(_restrict(hi, q_order, x_lim)))
    label = L(Rational(1, 3), Rational(2, 5))
    spec = build_operator("Phi+", label)
    nu = -spec.exponent_offset(label) + 1
    m4 = mode_matrix(spec, nu, enumerate_basis(label, 4))
    m6 = mode_matrix(spec, nu, enumerate_basis(label, 6))
    checks.append(all(m6.columns[s] == c for s, c in m4.columns.items()))
    # cache on/off and reruns change nothing but wall time
    cfg_plain = SuiteConfig("intertwining", j="1/2", k="1", degree=4, modes=3)
    cfg_cache = SuiteConfig("intertwining", j="1/2", k="1", degree=4, modes=3, cache=str(tmp_path))
    plain = strip_times(run_suite(cfg_plain))
    cold = strip_times(run_suite(cfg_cache))
    warm = strip_times(run_suite(cfg_cache))
    for r in (plain, cold, warm):
        r.pop("config")
    checks.append(plain == cold == warm and plain["verdict"] == "pass")
    checks.append(ModeCache(tmp_path).verify(sample=20) == [])
    line_ok = all(checks)
    line = (f"{'PASS' if line_ok else 'FAIL'} criterion 11: reruns with larger windows and with the cache "
            f"reproduce stable output [{len(checks)} comparisons, {time.perf_counter() - t0:.1f}s] {checks}")
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert line_ok


def test_criterion_12_wp_spot_check():
    rep = wp_spot_check()
    worst = max(s["relative"] for s in rep.details["samples"])
    ok = report_line(12, "(optional) Weierstrass form agrees numerically", [rep], 60,
                     note=f"(worst relative difference {worst:.1e})")
    if not ok:
        pytest.xfail("non-gating numerical check")
