"""Normal-ordered vertex operators of the three principal bosons.

Every operator handled here has the shape

    scalar * zeta**r * :P(Dphi) exp(c0*phi0 + c1*phi1 + c2*phi2):

with ``P`` of degree at most one in the derivative fields.  The zero-mode
part is ordered as ``exp(c1*Q) * zeta**(c1*phi_{1,0})``; a ``phi_{1,0}``
coming from ``P`` sits to the right of ``exp(c1*Q)`` and so reads the source
charge.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from ..rational import Rational
from functools import lru_cache
from itertools import product
from math import comb, factorial

from ..fock import (
    Key,
    ModuleLabel,
    charge_shift,
    kappa,
    key_degree,
    keys_of_degree,
    merge_keys,
    mode_allowed,
)

F = Rational


@dataclass(frozen=True)
class VertexOperatorSpec:
    name: str
    k: Rational
    scalar: Rational
    zeta_power: Rational
    exponents: tuple[Rational, Rational, Rational]
    # (constant, Dphi0, Dphi1, Dphi2)
    prefactor: tuple[Rational, Rational, Rational, Rational]
    charge: Rational

    def __post_init__(self):
        if self.charge != self.exponents[1]:
            raise ValueError("charge must equal the phi1 exponent coefficient")

    def target_label(self, label: ModuleLabel) -> ModuleLabel:
        self._check_level(label)
        return charge_shift(self.charge, label)

    def exponent_offset(self, label: ModuleLabel) -> Rational:
        """zeta-exponent carried by the zero modes on ``label``; degree changes add integers."""
        self._check_level(label)
        return self.zeta_power + 2 * label.j * self.charge

    def mode_offset(self, label: ModuleLabel) -> Rational:
        """Fractional part of the mode lattice ``nu in -exponent_offset + Z``."""
        return (-self.exponent_offset(label)) % 1

    def is_integral_on(self, label: ModuleLabel) -> bool:
        return self.mode_offset(label) == 0

    def target_degree(self, label: ModuleLabel, nu, source_degree: int) -> int:
        d = source_degree - F(nu) - self.exponent_offset(label)
        if d.denominator != 1:
            raise ValueError(f"mode {nu} of {self.name} is off its lattice on F{label}")
        return int(d)

    def mode_index(self, label: ModuleLabel, source_degree: int, target_degree: int) -> Rational:
        return source_degree - target_degree - self.exponent_offset(label)

    def _check_level(self, label: ModuleLabel):
        if label.k != self.k:
            raise ValueError(f"{self.name} was built for k={self.k}, not {label.k}")


def _spec(name, k, scalar=1, zeta_power=0, exponents=(0, 0, 0), prefactor=(1, 0, 0, 0)):
    exps = tuple(F(c) for c in exponents)
    return VertexOperatorSpec(name, F(k), F(scalar), F(zeta_power), exps,
                              tuple(F(p) for p in prefactor), exps[1])


def _catalog(k: Rational) -> dict[str, VertexOperatorSpec]:
    h = F(1, 2)
    return {
        "beta": _spec("beta", k, prefactor=(0, h, 0, 0)),
        "x": _spec("x", k, exponents=(1 / k, 0, 1 / k), prefactor=(0, 0, h, h)),
        "z": _spec("z", k, exponents=(0, 0, 1 / k), prefactor=(0, 0, h, h)),
        "E0": _spec("E0", k, exponents=(1 / k, 0, 0)),
        "S": _spec("S", k, scalar=h, zeta_power=2 / (k + 2),
                   exponents=(0, -1 / (k + 2), 0), prefactor=(0, 0, 0, 1)),
        "S+aux": _spec("S+aux", k, zeta_power=2 / (k + 2), exponents=(1 / k, -1 / (k + 2), 1 / k)),
        "S-aux": _spec("S-aux", k, zeta_power=2 / (k + 2), exponents=(-1 / k, -1 / (k + 2), -1 / k)),
        "Phi+": _spec("Phi+", k, zeta_power=1 / (2 * (k + 2)),
                      exponents=(1 / (2 * k), 1 / (2 * (k + 2)), 1 / (2 * k))),
        "Phi-": _spec("Phi-", k, zeta_power=1 / (2 * (k + 2)),
                      exponents=(-1 / (2 * k), 1 / (2 * (k + 2)), -1 / (2 * k))),
        "eta": _spec("eta", k, zeta_power=(k + 2) / 2, exponents=(0, h, h)),
        "eta_aux": _spec("eta_aux", k, zeta_power=(k + 2) / 2,
                         exponents=(1 / k, h, (k + 2) / (2 * k))),
    }


CATALOG = ("beta", "x", "z", "E0", "S", "S+aux", "S-aux", "Phi+", "Phi-", "eta", "eta_aux")


def build_operator(name: str, label: ModuleLabel) -> VertexOperatorSpec:
    """Catalog entry ``name`` at the level of ``label``.

    ``beta``, ``x``, ``z``, ``S``, ``Phi+``, ``Phi-`` and ``eta`` are the
    currents of the construction; ``E0``, ``S+aux``, ``S-aux`` and ``eta_aux``
    are the exponentials appearing on the right of their relations.
    """
    cat = _catalog(label.k)
    if name not in cat:
        raise KeyError(f"unknown operator {name!r}; catalog is {', '.join(CATALOG)}")
    return cat[name]


def phi_sign(eps: int) -> str:
    return "Phi+" if eps > 0 else "Phi-"


# -- action on basis monomials -----------------------------------------------

@lru_cache(maxsize=None)
def _creation_terms(c: tuple, degree: int) -> tuple[tuple[Key, Rational], ...]:
    """Degree-``degree`` part of ``exp(sum_i c_i sum_n phi_{i,-n} zeta^n / n)``."""
    out = []
    for key in keys_of_degree(degree):
        coeff = F(1)
        for i in range(3):
            if not key[i]:
                continue
            if c[i] == 0:
                coeff = None
                break
            for n, b in Counter(key[i]).items():
                coeff *= (c[i] / n) ** b / factorial(b)
        if coeff is not None:
            out.append((key, coeff))
    return tuple(out)


@lru_cache(maxsize=None)
def _annihilation_terms(key: Key, c: tuple, k: Rational) -> tuple[tuple[Key, Rational], ...]:
    """``exp(-sum_i c_i sum_n phi_{i,n} zeta^-n / n)`` on a monomial.

    ``phi_{i,n}`` acts as ``kappa_i * n * d/dy_{i,n}`` so the exponential is
    the shift ``y_{i,n} -> y_{i,n} - c_i*kappa_i``.
    """
    choices = []
    for i in range(3):
        shift = -c[i] * kappa(i, k)
        for n, a in sorted(Counter(key[i]).items()):
            if shift == 0:
                choices.append([(i, n, a, F(1))])
            else:
                choices.append([(i, n, a - b, comb(a, b) * shift ** b) for b in range(a + 1)])
    out: dict[Key, Rational] = {}
    for pick in product(*choices):
        parts: list[list[int]] = [[], [], []]
        coeff = F(1)
        for i, n, keep, w in pick:
            parts[i].extend([n] * keep)
            coeff *= w
        k2 = tuple(tuple(sorted(p, reverse=True)) for p in parts)
        out[k2] = out.get(k2, 0) + coeff
    return tuple(out.items())


@lru_cache(maxsize=None)
def act(spec: VertexOperatorSpec, label: ModuleLabel, key: Key, target_degree: int) -> tuple[tuple[Key, Rational], ...]:
    """Component of ``spec(zeta)|key>`` in the degree-``target_degree`` part of the target space.

    The zeta-exponent of this component is
    ``spec.exponent_offset(label) + target_degree - degree(key)``.
    """
    k = label.k
    c = spec.exponents
    pref = spec.prefactor
    pieces: list[tuple[Key, Rational, int | None]] = []
    if pref[0]:
        pieces.append((key, pref[0], None))
    for i in range(3):
        p = pref[i + 1]
        if not p:
            continue
        for n, mult in Counter(key[i]).items():
            lam = list(key[i])
            lam.remove(n)
            k1 = tuple(tuple(lam) if t == i else key[t] for t in range(3))
            pieces.append((k1, p * mult * kappa(i, k) * n, None))
        if i == 1:
            pieces.append((key, p * 2 * label.j, None))
        pieces.append((key, p, i))
    out: dict[Key, Rational] = {}
    for k1, w1, pending in pieces:
        if not w1:
            continue
        for k2, w2 in _annihilation_terms(k1, c, k):
            room = target_degree - key_degree(k2)
            if room < 0:
                continue
            w12 = w1 * w2
            if pending is None:
                for m, wm in _creation_terms(c, room):
                    tk = merge_keys(k2, m)
                    out[tk] = out.get(tk, 0) + w12 * wm
            else:
                for n in range(1, room + 1):
                    if not mode_allowed(pending, n):
                        continue
                    k3 = tuple(tuple(sorted(k2[t] + (n,), reverse=True)) if t == pending else k2[t]
                               for t in range(3))
                    for m, wm in _creation_terms(c, room - n):
                        tk = merge_keys(k3, m)
                        out[tk] = out.get(tk, 0) + w12 * wm
    s = spec.scalar
    return tuple((tk, w * s) for tk, w in out.items() if w)
