"""Exact verification of the operator identities of the free-field realization.

Every routine compares two sides as :class:`ModeMatrix` objects on a
degree window and records each (mode, mode) pair in a :class:`CheckReport`.
Windows for intermediate spaces are sized by :meth:`ModeProvider.product`.
"""

from __future__ import annotations

from math import comb

from ..fock import VACUUM_KEY, ModuleLabel, key_degree, vacuum_weight
from ..rational import Rational, sign
from ..report import CheckReport, PreconditionError, UnsupportedParameter
from .modes import ModeMatrix, ModeProvider
from .operators import CATALOG, build_operator, phi_sign


def _params(label: ModuleLabel, **extra) -> dict:
    out = {"j": str(label.j), "k": str(label.k)}
    out.update({k: v for k, v in extra.items()})
    return out


def first_difference(lhs: ModeMatrix, rhs: ModeMatrix):
    """``(target, source, lhs_entry, rhs_entry)`` for the first differing entry, or None."""
    for t, s, w in (lhs - rhs).nonzero_entries():
        return t, s, lhs.entry(t, s), rhs.entry(t, s)
    return None


def _compare(report: CheckReport, lhs: ModeMatrix, rhs: ModeMatrix, **where) -> bool:
    diff = first_difference(lhs, rhs)
    if diff is None:
        return report.record(True)
    t, s, a, b = diff
    return report.record(False, **where, target=str(t), source=str(s), lhs=str(a), rhs=str(b))


def _mode_range(offset: Rational, M: int):
    """Modes ``-offset + t`` for ``|t| <= M``."""
    base = -offset
    return [base + t for t in range(-M, M + 1)]


# -- the sl2 relations --------------------------------------------------------

def check_sl2_relations(label: ModuleLabel, N: int, M: int, provider: ModeProvider | None = None) -> CheckReport:
    """Mode form of the beta-beta, beta-x and x-x brackets plus highest-weight facts.

    ``[b_m, b_n] = k m delta`` (m odd), ``[b_m, x_n] = (1 - (-1)^m) x_{m+n}``,
    ``[x_m, x_n] = -2 (-1)^m b_{m+n} + k m (-1)^m delta`` with ``b_even = 0``.
    """
    P = provider or ModeProvider()
    k = label.k
    rep = CheckReport("sl2-relations", _params(label), windows={"degree": N, "modes": M})
    with rep.timed():
        ident = ModeMatrix.identity(label, N)
        odd = [m for m in range(-M, M + 1) if m % 2]
        for m in odd:
            for n in odd:
                lhs = P.bracket(("beta", m), ("beta", n), label, N)
                rhs = ident * (k * m) if m + n == 0 else ModeMatrix.zero(label, label, m + n, N)
                _compare(rep, lhs, rhs, relation="beta-beta", m=m, n=n)
        for m in odd:
            for n in range(-M, M + 1):
                lhs = P.bracket(("beta", m), ("x", n), label, N)
                _compare(rep, lhs, P.get("x", label, m + n, N) * 2, relation="beta-x", m=m, n=n)
        for m in range(-M, M + 1):
            for n in range(-M, M + 1):
                lhs = P.bracket(("x", m), ("x", n), label, N)
                s = sign(m)
                if (m + n) % 2:
                    rhs = P.get("beta", label, m + n, N) * (-2 * s)
                else:
                    rhs = ModeMatrix.zero(label, label, m + n, N)
                if m + n == 0:
                    rhs = rhs + ident * (k * m * s)
                _compare(rep, lhs, rhs, relation="x-x", m=m, n=n)
        for n in range(1, M + 1):
            for name in ("beta", "x"):
                col = P.get(name, label, n, 0).columns[VACUUM_KEY]
                rep.record(not col, relation="highest-weight", operator=name, n=n)
        col = P.get("x", label, 0, 0).columns[VACUUM_KEY]
        rep.record(col == {VACUUM_KEY: label.j}, relation="x0-eigenvalue", image=str(col))
        # locality: brackets of beta at non-opposite modes vanish, covered above
    rep.windows["intermediate"] = P.max_window
    return rep


# -- Z-algebra ----------------------------------------------------------------

def zalgebra_exponent(k: Rational) -> int:
    M = 2 / Rational(k)
    if M.denominator != 1 or M <= 0:
        raise UnsupportedParameter("2/k must be a positive integer")
    return int(M)


def check_zalgebra(label: ModuleLabel, N: int, M: int, provider: ModeProvider | None = None) -> CheckReport:
    """Polynomial-cleared exchange relation of ``z`` plus the factorization ``x = z :exp(phi0/k):``.

    With ``P = 2/k``, the coefficient of ``z1^{-m-P} z2^{-n}`` (after expanding
    ``(z1 - z2)^P`` and ``(z2 - z1)^P``) of both sides gives
    ``sum_i C(P,i)(-1)^i (z_{m+P-i} z_{n+i} - z_{n+P-i} z_{m+i})``
    ``= [m+n = -P] k sum_i C(P,i)(-n-i)(-1)^{n+i}``.
    """
    P_exp = zalgebra_exponent(label.k)
    Pv = provider or ModeProvider()
    k = label.k
    rep = CheckReport("zalgebra", _params(label, exponent=P_exp), windows={"degree": N, "modes": M})
    with rep.timed():
        ident = ModeMatrix.identity(label, N)
        for m in range(-M, M + 1):
            for n in range(-M, M + 1):
                total = m + n + P_exp
                lhs = ModeMatrix.zero(label, label, total, N)
                for i in range(P_exp + 1):
                    c = comb(P_exp, i) * sign(i)
                    lhs = lhs + Pv.product([("z", m + P_exp - i), ("z", n + i)], label, N) * c
                    lhs = lhs - Pv.product([("z", n + P_exp - i), ("z", m + i)], label, N) * c
                rhs = ModeMatrix.zero(label, label, total, N)
                if total == 0:
                    scal = sum(comb(P_exp, i) * (-n - i) * sign(n + i) for i in range(P_exp + 1))
                    rhs = ident * (k * scal)
                _compare(rep, lhs, rhs, relation="exchange", m=m, n=n)
        for n in range(-M, M + 1):
            lhs = Pv.get("x", label, n, N)
            rhs = ModeMatrix.zero(label, label, n, N)
            # intermediate states keep the source's phi1/phi2 part and the target's phi0 part
            for b in range(-max(N - n, 0), N + 1):
                rhs = rhs + Pv.product([("z", n - b), ("E0", b)], label, N)
            _compare(rep, lhs, rhs, relation="factorization", n=n)
    rep.windows["intermediate"] = Pv.max_window
    return rep


# -- screening ----------------------------------------------------------------

def screening_offset(label: ModuleLabel) -> Rational:
    return build_operator("S", label).exponent_offset(label)


def screening_levels(label: ModuleLabel, count: int) -> list[ModuleLabel]:
    """Labels on which the successive residues of ``Q^count`` act; refuses non-lattice residues."""
    levels = []
    lab = label
    for step in range(count):
        off = screening_offset(lab)
        if off.denominator != 1:
            raise PreconditionError(
                f"residue {step + 1} of Q^{count} undefined: S has mode offset {off} on F{lab}")
        levels.append(lab)
        lab = build_operator("S", lab).target_label(lab)
    return levels


def screening_charge(label: ModuleLabel, N: int, count: int = 1, provider: ModeProvider | None = None) -> ModeMatrix:
    """``Q^count`` as a composition of ``S_0`` residues on ``F_j, F_{j-2}, ...``."""
    P = provider or ModeProvider()
    screening_levels(label, count)
    return P.product([("S", 0)] * count, label, N)


def check_screening(label: ModuleLabel, N: int, M: int, m_count: int = 1,
                    provider: ModeProvider | None = None, require_residue: bool = True) -> CheckReport:
    """``[b_m, S_mu] = 0``, the total-difference form of ``[x_m, S_mu]`` and ``[., Q^m] = 0``.

    ``[x_m, S_mu] = (k+2)/2 mu (S+_{m+mu} - (-1)^m S-_{m+mu})`` where ``S+`` and
    ``S-`` are the two exponentials ``:exp(-phi1/(k+2) +- (phi2 + phi0)/k):``.
    """
    P = provider or ModeProvider()
    k = label.k
    off = screening_offset(label)
    rep = CheckReport("screening", _params(label, m_count=m_count), windows={"degree": N, "modes": M})
    if require_residue and off.denominator != 1:
        raise PreconditionError(f"S has non-integral mode offset {off} on F{label}; residue undefined")
    target = build_operator("S", label).target_label(label)
    with rep.timed():
        for mu in _mode_range(off, M):
            for m in range(-M, M + 1):
                if m % 2:
                    lhs = P.bracket(("beta", m), ("S", mu), label, N)
                    _compare(rep, lhs, ModeMatrix.zero(label, target, m + mu, N),
                             relation="beta-S", m=m, mu=str(mu))
                lhs = P.bracket(("x", m), ("S", mu), label, N)
                rhs = (P.get("S+aux", label, m + mu, N) - P.get("S-aux", label, m + mu, N) * sign(m))
                rhs = rhs * ((k + 2) / 2 * mu)
                _compare(rep, lhs, rhs, relation="x-S", m=m, mu=str(mu))
        if off.denominator == 1:
            try:
                levels = screening_levels(label, m_count)
            except PreconditionError as exc:
                rep.notes.append(str(exc))
                levels = screening_levels(label, 1) if m_count > 1 else []
            rep.details["residue_levels"] = [str(l) for l in levels]
            for count in range(1, len(levels) + 1):
                charge = [("S", 0)] * count
                for m in range(-M, M + 1):
                    names = ["x"] + (["beta"] if m % 2 else [])
                    for name in names:
                        lhs = (P.product([(name, m)] + charge, label, N)
                               - P.product(charge + [(name, m)], label, N))
                        tgt = lhs.target
                        _compare(rep, lhs, ModeMatrix.zero(label, tgt, lhs.nu, N),
                                 relation=f"{name}-Q{count}", m=m)
        else:
            rep.notes.append(f"Q^1 skipped: mode offset {off} is not integral")
    rep.windows["intermediate"] = P.max_window
    return rep


# -- intertwining vertex operators ---------------------------------------------

def check_intertwining(label: ModuleLabel, N: int, M: int, provider: ModeProvider | None = None) -> CheckReport:
    """Commutators of ``b_n`` and ``x_n`` with the modes of ``Phi_+`` and ``Phi_-``.

    ``[b_n, Phi_e] = e Phi_e`` (n odd), ``[x_n, Phi_e] = Phi_{-e}`` (n even),
    ``[x_n, Phi_e] = -e Phi_{-e}`` (n odd), all with the mode shifted by ``n``.
    """
    P = provider or ModeProvider()
    rep = CheckReport("intertwining", _params(label), windows={"degree": N, "modes": M})
    with rep.timed():
        for eps in (1, -1):
            name, other = phi_sign(eps), phi_sign(-eps)
            spec = build_operator(name, label)
            off = spec.exponent_offset(label)
            for mu in _mode_range(off, M):
                for n in range(-M, M + 1):
                    if n % 2:
                        lhs = P.bracket(("beta", n), (name, mu), label, N)
                        _compare(rep, lhs, P.get(name, label, mu + n, N) * eps,
                                 relation="beta-Phi", eps=eps, n=n, mu=str(mu))
                    lhs = P.bracket(("x", n), (name, mu), label, N)
                    c = -eps if n % 2 else 1
                    _compare(rep, lhs, P.get(other, label, mu + n, N) * c,
                             relation="x-Phi", eps=eps, n=n, mu=str(mu))
            col = P.get(name, label, -off, 0).columns[VACUUM_KEY]
            rep.record(col == {VACUUM_KEY: 1}, relation="vacuum-expectation", eps=eps, image=str(col))
    rep.windows["intermediate"] = P.max_window
    return rep


# -- eta and the B operator ----------------------------------------------------

def eta_offset(label: ModuleLabel) -> Rational:
    return build_operator("eta", label).exponent_offset(label)


def check_eta(label: ModuleLabel, N: int, M: int, provider: ModeProvider | None = None) -> CheckReport:
    """``[b_m, eta_mu] = 0``, ``{x_m, eta_mu} = -2 mu eta'_{m+mu}`` and the eta_0 (anti)commutation.

    ``eta'`` is ``:exp(phi1/2 + (k+2) phi2/(2k) + phi0/k):`` times the same
    power of zeta as eta.
    """
    off = eta_offset(label)
    if off.denominator != 1:
        raise PreconditionError(f"eta_0 undefined on F{label}: mode offset {off} is not integral")
    P = provider or ModeProvider()
    rep = CheckReport("eta", _params(label), windows={"degree": N, "modes": M})
    target = build_operator("eta", label).target_label(label)
    with rep.timed():
        for mu in _mode_range(off, M):
            for m in range(-M, M + 1):
                if m % 2:
                    lhs = P.bracket(("beta", m), ("eta", mu), label, N)
                    _compare(rep, lhs, ModeMatrix.zero(label, target, m + mu, N),
                             relation="beta-eta", m=m, mu=str(mu))
                lhs = P.bracket(("x", m), ("eta", mu), label, N, anti=True)
                _compare(rep, lhs, P.get("eta_aux", label, m + mu, N) * (-2 * mu),
                         relation="x-eta", m=m, mu=str(mu))
        for m in range(-M, M + 1):
            if m % 2:
                lhs = P.bracket(("beta", m), ("eta", 0), label, N)
                _compare(rep, lhs, ModeMatrix.zero(label, target, m, N), relation="eta0-beta", m=m)
            lhs = P.bracket(("x", m), ("eta", 0), label, N, anti=True)
            _compare(rep, lhs, ModeMatrix.zero(label, target, m, N), relation="eta0-x", m=m)
    rep.windows["intermediate"] = P.max_window
    return rep


# -- grading covariance --------------------------------------------------------

def check_grading_covariance(label: ModuleLabel, N: int, M: int, provider: ModeProvider | None = None) -> CheckReport:
    """Every mode ``O_nu`` lowers the d-eigenvalue by exactly ``nu``."""
    P = provider or ModeProvider()
    rep = CheckReport("grading", _params(label), windows={"degree": N, "modes": M})
    with rep.timed():
        for name in CATALOG:
            spec = build_operator(name, label)
            tgt = spec.target_label(label)
            shift = vacuum_weight(tgt) - vacuum_weight(label)
            rep.record(shift == spec.exponent_offset(label), relation="offset", operator=name)
            for nu in _mode_range(spec.exponent_offset(label), M):
                mat = P.get(name, label, nu, N)
                for t, s, _ in mat.nonzero_entries():
                    drop = vacuum_weight(label) + key_degree(s) - vacuum_weight(tgt) - key_degree(t)
                    if drop != nu:
                        rep.record(False, operator=name, nu=str(nu), source=str(s), target=str(t))
                        break
                else:
                    rep.record(True)
    return rep
