"""Fock spaces of the three principal bosons.

A basis vector of ``F_{j,k}`` is a monomial in the creation modes
``phi_{0,-n}``, ``phi_{2,-n}`` (n odd) and ``phi_{1,-n}`` (n even, n > 0)
applied to the vacuum ``|j,k>``.  It is stored as a triple of partitions
``(lam0, lam1, lam2)``, each a non-increasing tuple of parts; no factorial
normalization is applied.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from .rational import Rational, to_rational
from functools import lru_cache
from typing import Iterable, Iterator

Key = tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]

VACUUM_KEY: Key = ((), (), ())
BASIS_FORMAT_VERSION = 1


@dataclass(frozen=True)
class ModuleLabel:
    """The pair (j, k) labelling ``F_{j,k}``.

    The vacuum has highest weight ``(k/2)(L1 + L0) + j(L1 - L0)`` for the
    fundamental weights ``L0``, ``L1`` of affine sl2.
    """

    j: Rational
    k: Rational

    def __post_init__(self):
        object.__setattr__(self, "j", to_rational(self.j))
        object.__setattr__(self, "k", to_rational(self.k))
        if self.k == 0 or self.k == -2:
            raise ValueError(f"level k must avoid 0 and -2, got {self.k}")

    def __str__(self):
        return f"({self.j},{self.k})"

    def shifted(self, dj) -> ModuleLabel:
        return ModuleLabel(self.j + dj, self.k)


def kappa(i: int, k: Rational) -> Rational:
    """Heisenberg normalization: ``[phi_{i,m}, phi_{i,-m}] = kappa(i)*m``."""
    if i == 1:
        return 4 * (k + 2)
    if i == 0:
        return 4 * k
    if i == 2:
        return -4 * k
    raise ValueError(f"no boson phi_{i}")


def mode_allowed(i: int, n: int) -> bool:
    if i == 1:
        return n % 2 == 0
    if i in (0, 2):
        return n % 2 == 1
    return False


def key_degree(key: Key) -> int:
    return sum(key[0]) + sum(key[1]) + sum(key[2])


def merge_parts(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    if not b:
        return a
    if not a:
        return b
    return tuple(sorted(a + b, reverse=True))


def merge_keys(a: Key, b: Key) -> Key:
    return (merge_parts(a[0], b[0]), merge_parts(a[1], b[1]), merge_parts(a[2], b[2]))


@dataclass(frozen=True)
class FockState:
    label: ModuleLabel
    lam0: tuple[int, ...] = ()
    lam1: tuple[int, ...] = ()
    lam2: tuple[int, ...] = ()

    def __post_init__(self):
        for i, lam in enumerate((self.lam0, self.lam1, self.lam2)):
            object.__setattr__(self, f"lam{i}", tuple(sorted(lam, reverse=True)))
            for p in lam:
                if p <= 0 or not mode_allowed(i, p):
                    raise ValueError(f"part {p} not allowed for phi_{i}")

    @classmethod
    def from_key(cls, label: ModuleLabel, key: Key) -> FockState:
        return cls(label, *key)

    @property
    def key(self) -> Key:
        return (self.lam0, self.lam1, self.lam2)

    @property
    def degree(self) -> int:
        return key_degree(self.key)


class FockVector:
    """Finite rational combination of basis monomials in one Fock space."""

    __slots__ = ("label", "terms")

    def __init__(self, label: ModuleLabel, terms: dict | None = None):
        self.label = label
        self.terms = {k: v for k, v in (terms or {}).items() if v != 0}

    @classmethod
    def basis(cls, state: FockState) -> FockVector:
        return cls(state.label, {state.key: Rational(1)})

    @classmethod
    def vacuum(cls, label: ModuleLabel) -> FockVector:
        return cls(label, {VACUUM_KEY: Rational(1)})

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other: FockVector) -> FockVector:
        if not other.terms:
            return self
        if not self.terms:
            return other
        if other.label != self.label:
            raise ValueError(f"cannot add vectors of {self.label} and {other.label}")
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return FockVector(self.label, out)

    def __neg__(self):
        return FockVector(self.label, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        return FockVector(self.label, {k: v * c for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, FockVector):
            return NotImplemented
        if not self.terms and not other.terms:
            return True
        return self.label == other.label and self.terms == other.terms

    def __getitem__(self, key: Key) -> Rational:
        return self.terms.get(key, Rational(0))

    def __repr__(self):
        body = " + ".join(f"{v}*{k}" for k, v in sorted(self.terms.items()))
        return f"FockVector{self.label}[{body or '0'}]"


# -- basis enumeration --------------------------------------------------------

@lru_cache(maxsize=None)
def restricted_partitions(n: int, parity: int, max_part: int | None = None) -> tuple[tuple[int, ...], ...]:
    """Partitions of ``n`` into parts ``p`` with ``p % 2 == parity``, parts <= max_part,
    in reverse-lexicographic order."""
    if n == 0:
        return ((),)
    if max_part is None:
        max_part = n
    out = []
    top = min(n, max_part)
    if top % 2 != parity:
        top -= 1
    for p in range(top, 0, -2):
        for rest in restricted_partitions(n - p, parity, p):
            out.append((p,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def keys_of_degree(d: int) -> tuple[Key, ...]:
    """All basis keys of principal degree ``d``, ordered lexicographically on (lam1, lam0, lam2)."""
    out = []
    for d1 in range(0, d + 1, 2):
        for d0 in range(0, d - d1 + 1):
            d2 = d - d1 - d0
            for l1 in restricted_partitions(d1, 0):
                for l0 in restricted_partitions(d0, 1):
                    for l2 in restricted_partitions(d2, 1):
                        out.append((l0, l1, l2))
    out.sort(key=lambda k: (k[1], k[0], k[2]))
    return tuple(out)


@dataclass(frozen=True)
class GradedBasis:
    label: ModuleLabel
    max_degree: int
    by_degree: tuple[tuple[Key, ...], ...]

    def __iter__(self) -> Iterator[FockState]:
        for keys in self.by_degree:
            for key in keys:
                yield FockState.from_key(self.label, key)

    def __len__(self):
        return sum(len(ks) for ks in self.by_degree)

    def keys(self, degree: int | None = None) -> Iterable[Key]:
        if degree is not None:
            return self.by_degree[degree] if 0 <= degree <= self.max_degree else ()
        return (key for ks in self.by_degree for key in ks)

    def counts(self) -> list[int]:
        return [len(ks) for ks in self.by_degree]

    def to_json(self) -> str:
        doc = {
            "format": "za-engine/graded-basis",
            "version": BASIS_FORMAT_VERSION,
            "label": {"j": str(self.label.j), "k": str(self.label.k)},
            "max_degree": self.max_degree,
            "states": [[list(p) for p in key] for key in self.keys()],
        }
        return json.dumps(doc, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> GradedBasis:
        doc = json.loads(text)
        if doc.get("version") != BASIS_FORMAT_VERSION:
            raise ValueError(f"unsupported basis format version {doc.get('version')}")
        label = ModuleLabel(Rational(doc["label"]["j"]), Rational(doc["label"]["k"]))
        n = doc["max_degree"]
        groups: list[list[Key]] = [[] for _ in range(n + 1)]
        for raw in doc["states"]:
            key = tuple(tuple(p) for p in raw)
            groups[key_degree(key)].append(key)
        return cls(label, n, tuple(tuple(g) for g in groups))


def enumerate_basis(label: ModuleLabel, N: int) -> GradedBasis:
    if N < 0:
        raise ValueError("max degree must be non-negative")
    if not isinstance(label, ModuleLabel):
        raise TypeError("label must be a ModuleLabel")
    return GradedBasis(label, N, tuple(keys_of_degree(d) for d in range(N + 1)))


# -- elementary actions -------------------------------------------------------

def _add_part(key: Key, i: int, n: int) -> Key:
    parts = list(key)
    parts[i] = merge_parts(key[i], (n,))
    return tuple(parts)


def _remove_part(key: Key, i: int, n: int) -> Key:
    parts = list(key)
    lam = list(key[i])
    lam.remove(n)
    parts[i] = tuple(lam)
    return tuple(parts)


def apply_mode(i: int, n: int, v: FockVector) -> FockVector:
    """Apply the oscillator ``phi_{i,n}`` to ``v``."""
    if not mode_allowed(i, n) and not (i == 1 and n == 0):
        raise ValueError(f"phi_{i},{n} violates the mode parity of phi_{i}")
    label = v.label
    if n == 0:
        return v * (2 * label.j)
    if n < 0:
        return FockVector(label, {_add_part(key, i, -n): c for key, c in v.terms.items()})
    factor = kappa(i, label.k) * n
    out: dict = {}
    for key, c in v.terms.items():
        mult = key[i].count(n)
        if mult:
            k2 = _remove_part(key, i, n)
            out[k2] = out.get(k2, 0) + c * mult * factor
    return FockVector(label, out)


def charge_shift(alpha, label: ModuleLabel) -> ModuleLabel:
    """Target of ``exp(alpha*Q)``: ``j -> j + 2(k+2)*alpha``."""
    return label.shifted(2 * (label.k + 2) * to_rational(alpha))


def vacuum_weight(label: ModuleLabel) -> Rational:
    return (2 * label.j ** 2 + label.k) / (4 * (label.k + 2))


def grading_eigenvalue(s: FockState) -> Rational:
    return vacuum_weight(s.label) + s.degree
