"""Exact truncated Laurent series with a rational exponent offset.

An :class:`OffsetSeries` holds finitely many coefficients on the exponent
lattice ``offset + step*i`` together with a truncation index: every lattice
index at or above ``prec`` is *unknown*, never silently zero.  ``prec=None``
marks an exact (finite) series.  Coefficients are ``Rational`` values or,
for bivariate work, :class:`OffsetSeries` in a second variable.
"""

from __future__ import annotations

import math
from .rational import Rational, to_rational
from typing import Callable, Iterator


class SeriesError(ValueError):
    """Invalid series operation (incompatible lattices, bad leading term, ...)."""


class TruncationError(SeriesError):
    """A coefficient beyond the known truncation order was requested."""


def _is_zero(c) -> bool:
    if isinstance(c, OffsetSeries):
        return c.is_exact_zero()
    return c == 0


def _min_prec(*precs):
    known = [p for p in precs if p is not None]
    return min(known) if known else None


class OffsetSeries:
    """Immutable formal series ``sum_i c_i * var**(offset + step*i) + O(var**T)``."""

    __slots__ = ("var", "offset", "step", "coeffs", "prec")

    def __init__(self, var: str, coeffs=None, offset=0, step: int = 1, prec: int | None = None):
        if step < 1:
            raise SeriesError("step must be a positive integer")
        offset = to_rational(offset)
        shift = int(math.floor(offset / step))
        offset -= shift * step
        data = {}
        for i, c in (coeffs or {}).items():
            if prec is not None and i >= prec:
                continue
            if not _is_zero(c):
                data[i + shift] = c
        object.__setattr__(self, "var", var)
        object.__setattr__(self, "offset", offset)
        object.__setattr__(self, "step", step)
        object.__setattr__(self, "coeffs", data)
        object.__setattr__(self, "prec", None if prec is None else prec + shift)

    def __setattr__(self, name, value):
        raise AttributeError("OffsetSeries is immutable")

    # -- constructors -----------------------------------------------------

    @classmethod
    def monomial(cls, var: str, exponent=0, coeff=1, step: int = 1) -> OffsetSeries:
        return cls(var, {0: coeff}, offset=exponent, step=step)

    @classmethod
    def zero(cls, var: str, prec_exponent=None, offset=0, step: int = 1) -> OffsetSeries:
        if prec_exponent is None:
            return cls(var, {}, offset=offset, step=step)
        idx = (to_rational(prec_exponent) - to_rational(offset)) / step
        if idx.denominator != 1:
            raise SeriesError("truncation exponent off the lattice")
        return cls(var, {}, offset=offset, step=step, prec=int(idx))

    @classmethod
    def from_terms(cls, var: str, terms, prec_exponent=None, step: int = 1, offset=None) -> OffsetSeries:
        """Build from ``{exponent: coeff}``; all exponents must share one coset."""
        terms = {to_rational(e): c for e, c in dict(terms).items()}
        if offset is None:
            if terms:
                offset = min(terms)
            elif prec_exponent is not None:
                offset = to_rational(prec_exponent)
            else:
                offset = Rational(0)
        offset = to_rational(offset)
        coeffs = {}
        for e, c in terms.items():
            idx = (e - offset) / step
            if idx.denominator != 1:
                raise SeriesError(f"exponent {e} not on lattice {offset} + {step}Z")
            coeffs[int(idx)] = c
        prec = None
        if prec_exponent is not None:
            p = (to_rational(prec_exponent) - offset) / step
            if p.denominator != 1:
                raise SeriesError("truncation exponent off the lattice")
            prec = int(p)
        return cls(var, coeffs, offset=offset, step=step, prec=prec)

    # -- inspection -------------------------------------------------------

    def exponent(self, index: int) -> Rational:
        return self.offset + self.step * index

    @property
    def prec_exponent(self) -> Rational | None:
        return None if self.prec is None else self.exponent(self.prec)

    def is_exact(self) -> bool:
        return self.prec is None

    def is_exact_zero(self) -> bool:
        return not self.coeffs and self.prec is None

    def valuation(self) -> int | None:
        """Lowest index carrying a nonzero coefficient, or None."""
        return min(self.coeffs) if self.coeffs else None

    def valuation_exponent(self) -> Rational | None:
        v = self.valuation()
        return None if v is None else self.exponent(v)

    def items(self) -> Iterator[tuple[Rational, object]]:
        for i in sorted(self.coeffs):
            yield self.exponent(i), self.coeffs[i]

    def __getitem__(self, exponent) -> object:
        e = to_rational(exponent)
        if self.prec is not None and e >= self.prec_exponent:
            raise TruncationError(f"{self.var}^{e} is beyond O({self.var}^{self.prec_exponent})")
        idx = (e - self.offset) / self.step
        if idx.denominator != 1:
            return 0
        return self.coeffs.get(int(idx), 0)

    coefficient = __getitem__

    def known_zero(self) -> bool:
        """True when every known coefficient vanishes (recursively)."""
        for c in self.coeffs.values():
            if isinstance(c, OffsetSeries):
                if not c.known_zero():
                    return False
            elif c != 0:
                return False
        return True

    def agrees_with(self, other: OffsetSeries) -> bool:
        """Coefficientwise equality below the common truncation order."""
        return (self - other).known_zero()

    def __eq__(self, other):
        if not isinstance(other, OffsetSeries):
            return NotImplemented
        return (self.var, self.offset, self.step, self.prec, self.coeffs) == (
            other.var, other.offset, other.step, other.prec, other.coeffs)

    __hash__ = None

    # -- lattice plumbing -------------------------------------------------

    def _relattice(self, base: Rational, g: int) -> tuple[dict, int | None]:
        d = (self.offset - base) / g
        if d.denominator != 1:
            raise SeriesError(f"offset {self.offset} incompatible with lattice {base} + {g}Z")
        d = int(d)
        r = self.step // g
        coeffs = {d + r * i: c for i, c in self.coeffs.items()}
        prec = None if self.prec is None else d + r * self.prec
        return coeffs, prec

    def refine(self, step: int) -> OffsetSeries:
        """Re-express on the finer lattice ``offset + step*Z`` (step must divide self.step)."""
        if self.step % step:
            raise SeriesError("refinement step must divide the current step")
        coeffs, prec = self._relattice(self.offset, step)
        return OffsetSeries(self.var, coeffs, self.offset, step, prec)

    def _check_var(self, other: OffsetSeries):
        if other.var != self.var:
            raise SeriesError(f"incompatible variables {self.var!r} and {other.var!r}")

    # -- ring operations --------------------------------------------------

    def _is_coefficient(self, other) -> bool:
        return not (isinstance(other, OffsetSeries) and other.var == self.var)

    def __add__(self, other):
        if self._is_coefficient(other):
            return self + OffsetSeries.monomial(self.var, 0, other)
        self._check_var(other)
        if other.is_exact_zero():
            return self
        if self.is_exact_zero():
            return other
        g = math.gcd(self.step, other.step)
        base = self.offset
        a, pa = self._relattice(base, g)
        b, pb = other._relattice(base, g)
        prec = _min_prec(pa, pb)
        out = dict(a)
        for i, c in b.items():
            out[i] = out[i] + c if i in out else c
        return OffsetSeries(self.var, out, base, g, prec)

    __radd__ = __add__

    def __neg__(self):
        return OffsetSeries(self.var, {i: -c for i, c in self.coeffs.items()},
                            self.offset, self.step, self.prec)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if self._is_coefficient(other):
            if _is_zero(other) and not isinstance(other, OffsetSeries):
                return OffsetSeries(self.var, {}, self.offset, self.step, self.prec)
            return OffsetSeries(self.var, {i: c * other for i, c in self.coeffs.items()},
                                self.offset, self.step, self.prec)
        self._check_var(other)
        g = math.gcd(self.step, other.step)
        a, pa = self._relattice(self.offset, g)
        b, pb = other._relattice(other.offset, g)
        va = min(a) if a else pa
        vb = min(b) if b else pb
        if (not a and pa is None) or (not b and pb is None):
            return OffsetSeries(self.var, {}, self.offset + other.offset, g)
        cands = []
        if pa is not None:
            cands.append(pa + vb)
        if pb is not None:
            cands.append(pb + va)
        prec = min(cands) if cands else None
        out: dict = {}
        for i, ca in a.items():
            for jdx, cb in b.items():
                n = i + jdx
                if prec is not None and n >= prec:
                    continue
                t = ca * cb
                out[n] = out[n] + t if n in out else t
        return OffsetSeries(self.var, out, self.offset + other.offset, g, prec)

    def __rmul__(self, other):
        return self * other

    def __truediv__(self, other):
        if self._is_coefficient(other):
            if isinstance(other, OffsetSeries):
                return self * other.inverse()
            return self * (Rational(1) / to_rational(other))
        return series_div(self, other)

    def __rtruediv__(self, other):
        return OffsetSeries.monomial(self.var, 0, other) / self

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return series_pow(self, n)
        result = OffsetSeries.monomial(self.var, 0, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self, prec: int | None = None) -> OffsetSeries:
        """Multiplicative inverse; ``prec`` (relative index count) is required for exact input."""
        v = self.valuation()
        if v is None:
            raise SeriesError("division by a series with no nonzero coefficient within truncation")
        rel = self.prec - v if self.prec is not None else prec
        if rel is None:
            raise SeriesError("inverse of an exact series needs an explicit precision")
        lc = self.coeffs[v]
        inv_lc = lc.inverse() if isinstance(lc, OffsetSeries) else Rational(1) / to_rational(lc)
        c = [inv_lc]
        for n in range(1, rel):
            acc = None
            for i in range(1, n + 1):
                ai = self.coeffs.get(v + i)
                if ai is None or c[n - i] is None:
                    continue
                t = ai * c[n - i]
                acc = t if acc is None else acc + t
            c.append(None if acc is None else -(acc * inv_lc))
        coeffs = {n: cn for n, cn in enumerate(c) if cn is not None}
        return OffsetSeries(self.var, coeffs, -self.exponent(v), self.step, rel)

    # -- unary transforms -------------------------------------------------

    def map_coeffs(self, fn: Callable) -> OffsetSeries:
        return OffsetSeries(self.var, {i: fn(c) for i, c in self.coeffs.items()},
                            self.offset, self.step, self.prec)

    def map_exponents(self, fn: Callable) -> OffsetSeries:
        """Apply ``fn(exponent, coeff) -> coeff``."""
        return OffsetSeries(self.var, {i: fn(self.exponent(i), c) for i, c in self.coeffs.items()},
                            self.offset, self.step, self.prec)

    def truncate(self, prec_exponent) -> OffsetSeries:
        p = (to_rational(prec_exponent) - self.offset) / self.step
        p = math.ceil(p)
        if self.prec is not None:
            p = min(p, self.prec)
        return OffsetSeries(self.var, self.coeffs, self.offset, self.step, p)

    def shift(self, exponent) -> OffsetSeries:
        """Multiply by ``var**exponent``."""
        return OffsetSeries(self.var, self.coeffs, self.offset + to_rational(exponent), self.step, self.prec)

    # -- rendering --------------------------------------------------------

    def __str__(self):
        parts = []
        for e, c in self.items():
            cs = f"({c})" if isinstance(c, OffsetSeries) else str(c)
            parts.append(f"{cs} * {self.var}^{e}")
        if self.prec is not None:
            parts.append(f"O({self.var}^{self.prec_exponent})")
        return " + ".join(parts) if parts else "0"

    def __repr__(self):
        return f"OffsetSeries({self})"

    def to_json(self):
        def enc(c):
            return c.to_json() if isinstance(c, OffsetSeries) else str(c)
        return {
            "var": self.var,
            "terms": [[str(e), enc(c)] for e, c in self.items()],
            "prec": None if self.prec is None else str(self.prec_exponent),
        }


# -- functional interface ---------------------------------------------------

def series_div(a: OffsetSeries, b: OffsetSeries, prec: int | None = None) -> OffsetSeries:
    a._check_var(b)
    if prec is None and b.prec is None:
        if a.prec is None:
            raise SeriesError("division of exact series needs an explicit precision")
        va = a.valuation()
        prec = a.prec - (va if va is not None else a.prec) + 1
    return a * b.inverse(prec)


def series_arith(a: OffsetSeries, b: OffsetSeries, op: str) -> OffsetSeries:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return series_div(a, b)
    raise SeriesError(f"unknown op {op!r}")


def _integer_lattice(a: OffsetSeries, what: str) -> tuple[dict, int | None]:
    if a.offset.denominator != 1:
        raise SeriesError(f"{what} requires integer exponents, got offset {a.offset}")
    return a._relattice(Rational(0), 1)


def series_exp(a: OffsetSeries, prec: int | None = None) -> OffsetSeries:
    coeffs, p = _integer_lattice(a, "exp")
    if any(i <= 0 for i in coeffs):
        raise SeriesError("exp requires strictly positive valuation (nonzero constant term)")
    rel = p if p is not None else prec
    if rel is None:
        raise SeriesError("exp of an exact series needs an explicit precision")
    b = [Rational(1)]
    for n in range(1, rel):
        acc = None
        for i in range(1, n + 1):
            ai = coeffs.get(i)
            if ai is None or b[n - i] is None:
                continue
            t = ai * b[n - i] * i
            acc = t if acc is None else acc + t
        b.append(None if acc is None else acc * Rational(1, n))
    return OffsetSeries(a.var, {n: c for n, c in enumerate(b) if c is not None}, 0, 1, rel)


def series_log(a: OffsetSeries, prec: int | None = None) -> OffsetSeries:
    coeffs, p = _integer_lattice(a, "log")
    if any(i < 0 for i in coeffs) or 0 not in coeffs:
        raise SeriesError("log requires a unit constant term")
    a0 = coeffs[0]
    if isinstance(a0, OffsetSeries):
        l0, inv0 = series_log(a0), a0.inverse()
    else:
        if a0 != 1:
            raise SeriesError("nonunit leading coefficient for log")
        l0, inv0 = Rational(0), Rational(1)
    rel = p if p is not None else prec
    if rel is None:
        raise SeriesError("log of an exact series needs an explicit precision")
    L = [l0]
    for n in range(1, rel):
        acc = coeffs.get(n)
        acc = None if acc is None else acc * n
        for i in range(1, n):
            ai = coeffs.get(n - i)
            if ai is None or _is_zero(L[i]):
                continue
            t = -(L[i] * ai * i)
            acc = t if acc is None else acc + t
        L.append(Rational(0) if acc is None else acc * inv0 * Rational(1, n))
    return OffsetSeries(a.var, dict(enumerate(L)), 0, 1, rel)


def series_pow(a: OffsetSeries, r, prec: int | None = None) -> OffsetSeries:
    """``a**r`` for rational ``r``: the leading monomial ``var**e`` becomes ``var**(r*e)``."""
    r = to_rational(r)
    if r.denominator == 1 and r >= 0 and a.prec is None:
        return a ** int(r)
    v = a.valuation()
    if v is None:
        raise SeriesError("pow of a series with no nonzero coefficient within truncation")
    rel = a.prec - v if a.prec is not None else prec
    if rel is None:
        raise SeriesError("pow of an exact series needs an explicit precision")
    lc = a.coeffs[v]
    if isinstance(lc, OffsetSeries):
        b0, inv_lc = series_pow(lc, r), lc.inverse()
    else:
        lc = to_rational(lc)
        if r.denominator != 1 and lc != 1:
            raise SeriesError(f"nonunit leading coefficient {lc} for fractional power {r}")
        b0, inv_lc = lc ** int(r) if r.denominator == 1 else Rational(1), 1 / lc
    b = [b0]
    for n in range(1, rel):
        acc = None
        for i in range(1, n + 1):
            ai = a.coeffs.get(v + i)
            if ai is None or b[n - i] is None:
                continue
            w = (r + 1) * i - n
            if w == 0:
                continue
            t = ai * b[n - i] * w
            acc = t if acc is None else acc + t
        b.append(None if acc is None else acc * inv_lc * Rational(1, n))
    coeffs = {n: c for n, c in enumerate(b) if c is not None}
    return OffsetSeries(a.var, coeffs, r * a.exponent(v), a.step, rel)


def series_transcend(a: OffsetSeries, op: str, r=None, prec: int | None = None) -> OffsetSeries:
    if op == "exp":
        return series_exp(a, prec)
    if op == "log":
        return series_log(a, prec)
    if op == "pow":
        return series_pow(a, r, prec)
    raise SeriesError(f"unknown op {op!r}")


def series_D(a: OffsetSeries) -> OffsetSeries:
    """The Euler derivation ``var * d/dvar``."""
    return a.map_exponents(lambda e, c: c * e)


def negate_variable(a: OffsetSeries) -> OffsetSeries:
    if a.offset.denominator != 1:
        raise SeriesError("negate_variable needs integer exponents; (-x)^(p/q) has no canonical value")
    return a.map_exponents(lambda e, c: -c if int(e) % 2 else c)


def scale_variable(a: OffsetSeries, c) -> OffsetSeries:
    """Substitute ``var -> c*var``; ``c`` a rational or a monomial in another variable."""
    if isinstance(c, OffsetSeries):
        if len(c.coeffs) != 1 or c.prec is not None:
            raise SeriesError("scale factor must be an exact monomial")
        (e0, g), = c.items()

        def f(e, coeff):
            if e.denominator != 1 and g != 1:
                raise SeriesError("fractional power of a non-unit scale coefficient")
            gamma = g ** int(e) if e.denominator == 1 else Rational(1)
            return coeff * OffsetSeries.monomial(c.var, e0 * e, gamma, step=c.step)
        return a.map_exponents(f)
    c = to_rational(c)
    if a.offset.denominator != 1 and c != 1:
        raise SeriesError("scaling by a rational needs integer exponents")
    return a.map_exponents(lambda e, coeff: coeff * c ** int(e))


def power_substitute(a: OffsetSeries, m: int) -> OffsetSeries:
    """Substitute ``var -> var**m`` for a positive integer ``m``."""
    if m < 1:
        raise SeriesError("power_substitute needs a positive integer")
    return OffsetSeries(a.var, a.coeffs, a.offset * m, a.step * m, a.prec)


def series_substitute(a: OffsetSeries, action: str, arg=None) -> OffsetSeries:
    if action == "negate_variable":
        return negate_variable(a)
    if action == "scale":
        return scale_variable(a, arg)
    if action == "power_substitute":
        return power_substitute(a, arg)
    raise SeriesError(f"unknown substitution {action!r}")


def geometric(var: str, ratio_exponent=1, prec: int = 10) -> OffsetSeries:
    """``1/(1 - var**ratio_exponent)`` to ``prec`` lattice terms."""
    return OffsetSeries(var, {i: Rational(1) for i in range(prec)}, 0, ratio_exponent, prec)
