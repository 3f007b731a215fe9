"""Exact Fourier modes of catalog operators as sparse rational matrices."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from ..rational import Rational

from ..fock import FockVector, GradedBasis, Key, ModuleLabel, enumerate_basis, key_degree
from .operators import VertexOperatorSpec, act, build_operator

MODE_MATRIX_VERSION = 1


class WindowError(ValueError):
    """A composition needs basis states outside the window a matrix was built on."""


@dataclass
class ModeMatrix:
    """Mode ``nu`` of an operator: ``O(zeta) = sum_nu O_nu zeta**(-nu)``.

    ``nu`` is the drop of the d-eigenvalue.  ``columns`` maps every source key
    of degree <= ``max_degree`` to its (sparse) image.
    """

    name: str
    source: ModuleLabel
    target: ModuleLabel
    nu: Rational
    max_degree: int
    columns: dict[Key, dict[Key, Rational]] = field(repr=False)

    def apply(self, v: FockVector) -> FockVector:
        if v.label != self.source and v.terms:
            raise ValueError(f"{self.name} acts on F{self.source}, got F{v.label}")
        out: dict = {}
        for key, c in v.terms.items():
            col = self._column(key)
            for t, w in col.items():
                out[t] = out.get(t, 0) + c * w
        return FockVector(self.target, out)

    def _column(self, key: Key) -> dict:
        try:
            return self.columns[key]
        except KeyError:
            raise WindowError(
                f"{self.name} built to degree {self.max_degree}; state of degree {key_degree(key)} requested"
            ) from None

    def entry(self, target_key: Key, source_key: Key) -> Rational:
        return self._column(source_key).get(target_key, Rational(0))

    def target_max_degree(self) -> int:
        degs = [key_degree(t) for col in self.columns.values() for t in col]
        return max(degs) if degs else -1

    def __matmul__(self, other: ModeMatrix) -> ModeMatrix:
        if other.target != self.source:
            raise ValueError(f"cannot compose {self.name} on F{self.source} after map into F{other.target}")
        cols = {}
        mine = self.columns
        for s, col in other.columns.items():
            out: dict = {}
            get = out.get
            for t, w in col.items():
                inner = mine.get(t)
                if inner is None:
                    inner = self._column(t)
                for u, w2 in inner.items():
                    out[u] = get(u, 0) + w * w2
            cols[s] = {u: w for u, w in out.items() if w}
        return ModeMatrix(f"{self.name}*{other.name}", other.source, self.target,
                          self.nu + other.nu, other.max_degree, cols)

    def _compatible(self, other: ModeMatrix):
        if (self.source, self.target, self.max_degree) != (other.source, other.target, other.max_degree):
            raise ValueError(f"incompatible mode matrices {self.name} and {other.name}")
        if self.nu != other.nu:
            raise ValueError(f"mode indices differ: {self.nu} vs {other.nu}")

    def __add__(self, other: ModeMatrix) -> ModeMatrix:
        self._compatible(other)
        cols = {}
        for s in self.columns:
            out = dict(self.columns[s])
            for t, w in other.columns[s].items():
                out[t] = out.get(t, 0) + w
            cols[s] = {t: w for t, w in out.items() if w}
        return ModeMatrix(f"({self.name}+{other.name})", self.source, self.target, self.nu,
                          self.max_degree, cols)

    def __mul__(self, c) -> ModeMatrix:
        c = Rational(c)
        cols = {s: {t: w * c for t, w in col.items() if w * c} for s, col in self.columns.items()}
        return ModeMatrix(f"{c}*{self.name}", self.source, self.target, self.nu, self.max_degree, cols)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def __sub__(self, other: ModeMatrix) -> ModeMatrix:
        return self + (-other)

    def is_zero(self) -> bool:
        return not any(self.columns.values())

    def nonzero_entries(self):
        for s in sorted(self.columns):
            for t, w in sorted(self.columns[s].items()):
                yield t, s, w

    def same_entries(self, other: ModeMatrix) -> bool:
        return (self - other).is_zero()

    @classmethod
    def identity(cls, label: ModuleLabel, max_degree: int) -> ModeMatrix:
        basis = enumerate_basis(label, max_degree)
        return cls("1", label, label, Rational(0), max_degree,
                   {key: {key: Rational(1)} for key in basis.keys()})

    @classmethod
    def zero(cls, source: ModuleLabel, target: ModuleLabel, nu, max_degree: int) -> ModeMatrix:
        basis = enumerate_basis(source, max_degree)
        return cls("0", source, target, Rational(nu), max_degree, {key: {} for key in basis.keys()})

    # -- serialization ----------------------------------------------------

    def to_json(self) -> str:
        doc = {
            "format": "za-engine/mode-matrix",
            "version": MODE_MATRIX_VERSION,
            "name": self.name,
            "source": [str(self.source.j), str(self.source.k)],
            "target": [str(self.target.j), str(self.target.k)],
            "nu": str(self.nu),
            "max_degree": self.max_degree,
            "columns": [
                [_enc_key(s), [[_enc_key(t), str(w)] for t, w in sorted(self.columns[s].items())]]
                for s in sorted(self.columns, key=lambda s: (key_degree(s), s[1], s[0], s[2]))
            ],
        }
        return json.dumps(doc, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> ModeMatrix:
        doc = json.loads(text)
        if doc.get("format") != "za-engine/mode-matrix" or doc.get("version") != MODE_MATRIX_VERSION:
            raise ValueError("mode matrix version mismatch")
        cols = {_dec_key(s): {_dec_key(t): Rational(w) for t, w in col} for s, col in doc["columns"]}
        return cls(doc["name"], ModuleLabel(*map(Rational, doc["source"])),
                   ModuleLabel(*map(Rational, doc["target"])), Rational(doc["nu"]),
                   doc["max_degree"], cols)


def _enc_key(key: Key):
    return [list(p) for p in key]


def _dec_key(raw) -> Key:
    return tuple(tuple(p) for p in raw)


def mode_matrix(O: VertexOperatorSpec, nu, source: GradedBasis) -> ModeMatrix:
    """Exact matrix of ``O_nu`` on the degree <= ``source.max_degree`` window."""
    nu = Rational(nu)
    label = source.label
    if not (nu + O.exponent_offset(label)).denominator == 1:
        raise ValueError(
            f"mode {nu} of {O.name} is off its lattice {O.mode_offset(label)} + Z on F{label}")
    cols = {}
    for d, keys in enumerate(source.by_degree):
        td = O.target_degree(label, nu, d)
        for key in keys:
            cols[key] = dict(act(O, label, key, td)) if td >= 0 else {}
    return ModeMatrix(f"{O.name}[{nu}]", label, O.target_label(label), nu, source.max_degree, cols)


class ModeProvider:
    """Memoizing source of mode matrices, optionally backed by an on-disk cache."""

    def __init__(self, cache=None):
        self.cache = cache
        self._memo: dict = {}
        self._products: dict = {}
        self.max_window = 0

    def get(self, name: str, label: ModuleLabel, nu, max_degree: int) -> ModeMatrix:
        nu = Rational(nu)
        max_degree = max(max_degree, 0)
        key = (name, label, nu, max_degree)
        m = self._memo.get(key)
        if m is not None:
            return m
        self.max_window = max(self.max_window, max_degree)
        if self.cache is not None:
            m = self.cache.load(name, label, nu, max_degree)
        if m is None:
            spec = build_operator(name, label)
            m = mode_matrix(spec, nu, enumerate_basis(label, max_degree))
            if self.cache is not None:
                self.cache.store(name, label, nu, max_degree, m)
        self._memo[key] = m
        return m

    def product(self, factors, label: ModuleLabel, max_degree: int) -> ModeMatrix:
        """``A1_{n1} A2_{n2} ... Ar_{nr}`` on the source window ``max_degree``.

        ``factors`` is a left-to-right list of ``(name, nu)``; each inner
        window is sized to the exact image of the one before it.
        """
        memo_key = (tuple(factors), label, max_degree)
        if memo_key in self._products:
            return self._products[memo_key]
        result = None
        lab, window = label, max_degree
        for name, nu in reversed(factors):
            spec = build_operator(name, lab)
            m = self.get(name, lab, nu, window)
            window = max(window - int(Rational(nu) + spec.exponent_offset(lab)), 0)
            lab = spec.target_label(lab)
            result = m if result is None else m @ result
        self._products[memo_key] = result
        return result

    def bracket(self, a, b, label: ModuleLabel, max_degree: int, anti: bool = False) -> ModeMatrix:
        """``[A, B]`` (or ``A B + B A`` when ``anti``) for ``a=(name, nu)``, ``b=(name, nu)``."""
        ab = self.product([a, b], label, max_degree)
        ba = self.product([b, a], label, max_degree)
        return ab + ba if anti else ab - ba
