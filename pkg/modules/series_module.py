# Series Module
# Exact Gaussian-rational coefficients and weighted-truncated formal power series

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple, Union

from utilities.logger import emit_log

Monomial = Tuple[int, ...]


class SignatureMismatch(ValueError):
    pass


class NotAUnitError(ValueError):
    pass


class CompositionError(ValueError):
    pass


class SeriesParseError(ValueError):
    pass


# ---------------- Coefficients ----------------

class GaussianRational:
    """Exact element re + i*im of Q(i)."""

    __slots__ = ("_re", "_im")

    def __init__(self, re=0, im=0):
        self._re = Fraction(re)
        self._im = Fraction(im)

    @property
    def re(self) -> Fraction:
        return self._re

    @property
    def im(self) -> Fraction:
        return self._im

    @classmethod
    def coerce(cls, value) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, (int, Fraction)):
            return cls(value, 0)
        if isinstance(value, str):
            return cls.parse(value)
        raise TypeError(f"cannot use {type(value).__name__} as a Gaussian rational")

    @classmethod
    def from_pair(cls, pair: Sequence[str]) -> "GaussianRational":
        if len(pair) != 2:
            raise ValueError(f"expected [re, im], got {pair!r}")
        return cls(Fraction(str(pair[0])), Fraction(str(pair[1])))

    def to_pair(self) -> list:
        return [_fraction_text(self._re), _fraction_text(self._im)]

    @classmethod
    def parse(cls, text: str) -> "GaussianRational":
        value = parse_expression(text, VariableSignature((), ()), 0)
        return value.constant_term()

    def conj(self) -> "GaussianRational":
        return GaussianRational(self._re, -self._im)

    def is_real(self) -> bool:
        return self._im == 0

    def to_complex(self) -> complex:
        return complex(float(self._re), float(self._im))

    def __bool__(self):
        return bool(self._re) or bool(self._im)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self._im == 0 and self._re == other
        if isinstance(other, GaussianRational):
            return self._re == other._re and self._im == other._im
        return NotImplemented

    def __hash__(self):
        if self._im == 0:
            return hash(self._re)
        return hash((self._re, self._im))

    def __neg__(self):
        return GaussianRational(-self._re, -self._im)

    def __add__(self, other):
        try:
            other = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self._re + other._re, self._im + other._im)

    __radd__ = __add__

    def __sub__(self, other):
        try:
            other = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self._re - other._re, self._im - other._im)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            other = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        a, b, c, d = self._re, self._im, other._re, other._im
        return GaussianRational(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def inverse(self) -> "GaussianRational":
        norm = self._re * self._re + self._im * self._im
        if norm == 0:
            raise ZeroDivisionError("Gaussian rational division by zero")
        return GaussianRational(self._re / norm, -self._im / norm)

    def __truediv__(self, other):
        try:
            other = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = GaussianRational(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __repr__(self):
        return f"GaussianRational({self._re!r}, {self._im!r})"

    def __str__(self):
        if self._im == 0:
            return str(self._re)
        if self._im == 1:
            imag = "i"
        elif self._im == -1:
            imag = "-i"
        else:
            imag = f"{self._im}i"
        if self._re == 0:
            return imag
        sign = "-" if self._im < 0 else "+"
        return f"{self._re}{sign}{imag.lstrip('-')}"


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I = GaussianRational(0, 1)


def _fraction_text(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


# ---------------- Signatures ----------------

@dataclass(frozen=True)
class VariableSignature:
    """Ordered variable names with positive integer weights.

    `barred` marks the antiholomorphic variables; it drives weighted_component
    and the involution.
    """

    names: Tuple[str, ...]
    weights: Tuple[int, ...]
    barred: Optional[Tuple[bool, ...]] = None

    def __post_init__(self):
        names = tuple(self.names)
        weights = tuple(int(w) for w in self.weights)
        barred = tuple(bool(b) for b in self.barred) if self.barred is not None else (False,) * len(names)
        if len(names) != len(weights) or len(names) != len(barred):
            raise ValueError("names, weights and barred flags must have equal length")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        if any(w <= 0 for w in weights):
            raise ValueError(f"weights must be positive integers, got {weights}")
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "barred", barred)

    @classmethod
    def canonical(cls, z_weight: int = 1, w_weight: int = 2) -> "VariableSignature":
        return cls(("z", "w", "zbar", "wbar"), (z_weight, w_weight, z_weight, w_weight),
                   (False, False, True, True))

    @classmethod
    def holomorphic(cls, z_weight: int = 1, w_weight: int = 2) -> "VariableSignature":
        return cls(("z", "w"), (z_weight, w_weight))

    @classmethod
    def fiber(cls, z_weight: int = 1, w_weight: int = 2) -> "VariableSignature":
        return cls(("z", "w", "zeta"), (z_weight, w_weight, z_weight), (False, False, True))

    def __len__(self):
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise SignatureMismatch(f"variable {name!r} not in signature {self.names}") from None

    def weight(self, name: str) -> int:
        return self.weights[self.index(name)]

    def degree(self, exps: Monomial) -> int:
        return sum(e * w for e, w in zip(exps, self.weights))

    def bidegree(self, exps: Monomial) -> Tuple[int, int]:
        hol = anti = 0
        for e, w, b in zip(exps, self.weights, self.barred):
            if b:
                anti += e * w
            else:
                hol += e * w
        return hol, anti

    def sort_key(self, exps: Monomial):
        return (self.degree(exps), exps)

    def unit(self) -> Monomial:
        return (0,) * len(self.names)

    def extend(self, names, weights, barred=None) -> "VariableSignature":
        barred = tuple(barred) if barred is not None else (False,) * len(names)
        return VariableSignature(self.names + tuple(names), self.weights + tuple(weights),
                                 self.barred + barred)

    def header(self) -> str:
        return " ".join(f"{n}:{w}" for n, w in zip(self.names, self.weights))


# ---------------- Series ----------------

Scalar = Union[GaussianRational, int, Fraction]


class TruncatedSeries:
    """Sparse formal power series known up to weighted degree `order` (inclusive).

    Terms of weighted degree above the order and zero coefficients are never stored.
    Ring operations truncate to the smaller operand order.
    """

    __slots__ = ("_signature", "_order", "_terms")

    def __init__(self, signature: VariableSignature, order: int, terms: Optional[Mapping] = None):
        if order < 0:
            raise ValueError(f"truncation order must be non-negative, got {order}")
        clean: Dict[Monomial, GaussianRational] = {}
        for exps, coeff in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != len(signature) or any(e < 0 for e in exps):
                raise ValueError(f"exponent vector {exps} does not fit {signature.names}")
            coeff = GaussianRational.coerce(coeff)
            if coeff and signature.degree(exps) <= order:
                clean[exps] = clean.get(exps, ZERO) + coeff
        self._signature = signature
        self._order = int(order)
        self._terms = MappingProxyType({m: c for m, c in clean.items() if c})

    @classmethod
    def _raw(cls, signature, order, terms):
        obj = cls.__new__(cls)
        obj._signature = signature
        obj._order = order
        obj._terms = MappingProxyType(terms)
        return obj

    # ---- constructors ----

    @classmethod
    def zero(cls, signature, order):
        return cls._raw(signature, order, {})

    @classmethod
    def constant(cls, signature, order, value: Scalar = 1):
        return cls(signature, order, {signature.unit(): value})

    @classmethod
    def monomial(cls, signature, order, powers: Mapping[str, int], coeff: Scalar = 1):
        exps = [0] * len(signature)
        for name, e in powers.items():
            exps[signature.index(name)] += e
        return cls(signature, order, {tuple(exps): coeff})

    @classmethod
    def variable(cls, signature, order, name):
        return cls.monomial(signature, order, {name: 1})

    # ---- accessors ----

    @property
    def signature(self) -> VariableSignature:
        return self._signature

    @property
    def order(self) -> int:
        return self._order

    @property
    def terms(self) -> Mapping[Monomial, GaussianRational]:
        return self._terms

    def sorted_terms(self):
        return sorted(self._terms.items(), key=lambda t: self._signature.sort_key(t[0]))

    def coefficient(self, exps) -> GaussianRational:
        if isinstance(exps, Mapping):
            vec = [0] * len(self._signature)
            for name, e in exps.items():
                vec[self._signature.index(name)] = e
            exps = tuple(vec)
        return self._terms.get(tuple(exps), ZERO)

    def constant_term(self) -> GaussianRational:
        return self._terms.get(self._signature.unit(), ZERO)

    def is_zero(self) -> bool:
        return not self._terms

    def valuation(self) -> Optional[int]:
        if not self._terms:
            return None
        return min(self._signature.degree(m) for m in self._terms)

    def variables_used(self) -> set:
        used = set()
        for exps in self._terms:
            for name, e in zip(self._signature.names, exps):
                if e:
                    used.add(name)
        return used

    def truncate(self, order: int) -> "TruncatedSeries":
        order = min(order, self._order)
        sig = self._signature
        return TruncatedSeries._raw(sig, order, {m: c for m, c in self._terms.items()
                                                 if sig.degree(m) <= order})

    # ---- arithmetic ----

    def _check(self, other: "TruncatedSeries"):
        if other._signature != self._signature:
            raise SignatureMismatch(
                f"signature mismatch: {self._signature.header()} vs {other._signature.header()}")

    def _lift(self, other) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            self._check(other)
            return other
        return TruncatedSeries.constant(self._signature, self._order, GaussianRational.coerce(other))

    def __add__(self, other):
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        order = min(self._order, other._order)
        sig = self._signature
        out = {m: c for m, c in self._terms.items() if sig.degree(m) <= order}
        for m, c in other._terms.items():
            if sig.degree(m) > order:
                continue
            total = out.get(m, ZERO) + c
            if total:
                out[m] = total
            else:
                out.pop(m, None)
        return TruncatedSeries._raw(sig, order, out)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries._raw(self._signature, self._order, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, value: Scalar) -> "TruncatedSeries":
        value = GaussianRational.coerce(value)
        if not value:
            return TruncatedSeries.zero(self._signature, self._order)
        return TruncatedSeries._raw(self._signature, self._order,
                                    {m: c * value for m, c in self._terms.items()})

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            try:
                return self.scale(other)
            except TypeError:
                return NotImplemented
        self._check(other)
        sig = self._signature
        order = min(self._order, other._order)
        left = [(m, c, sig.degree(m)) for m, c in self._terms.items()]
        right = [(m, c, sig.degree(m)) for m, c in other._terms.items()]
        out: Dict[Monomial, GaussianRational] = {}
        for m1, c1, d1 in left:
            if d1 > order:
                continue
            for m2, c2, d2 in right:
                if d1 + d2 > order:
                    continue
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, ZERO) + c1 * c2
        return TruncatedSeries._raw(sig, order, {m: c for m, c in out.items() if c})

    def __rmul__(self, other):
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, TruncatedSeries):
            return self * invert_unit(other)
        try:
            return self.scale(GaussianRational.coerce(other).inverse())
        except TypeError:
            return NotImplemented

    def __pow__(self, n: int):
        if n < 0:
            return invert_unit(self) ** (-n)
        result = TruncatedSeries.constant(self._signature, self._order, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return (self._signature == other._signature and self._order == other._order
                and dict(self._terms) == dict(other._terms))

    def __hash__(self):
        return hash((self._signature, self._order, frozenset(self._terms.items())))

    def __repr__(self):
        return f"TruncatedSeries({format_series(self)!r}, order={self._order})"

    def __str__(self):
        return format_series(self)

    def evaluate(self, point: Mapping[str, complex]) -> complex:
        values = [complex(point.get(name, 0)) for name in self._signature.names]
        total = 0j
        for exps, c in self._terms.items():
            term = c.to_complex()
            for v, e in zip(values, exps):
                if e:
                    term *= v ** e
            total += term
        return total


# ---------------- Operations ----------------

def add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    return a + b


def mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    return a * b


def invert_unit(a: TruncatedSeries) -> TruncatedSeries:
    """Inverse of a series with nonzero constant term, by the Neumann series."""
    c0 = a.constant_term()
    if not c0:
        raise NotAUnitError("cannot invert a series with zero constant term")
    one = TruncatedSeries.constant(a.signature, a.order, 1)
    h = one - a.scale(c0.inverse())
    result = one
    # h has valuation >= 1, so order + 1 Horner steps reach every kept degree
    for _ in range(a.order + 1):
        result = one + h * result
    return result.scale(c0.inverse())


def embed(f: TruncatedSeries, signature: VariableSignature,
          rename: Optional[Mapping[str, str]] = None, order: Optional[int] = None) -> TruncatedSeries:
    """Move f into another signature, matching variables by (renamed) name."""
    rename = rename or {}
    target_index = []
    for i, name in enumerate(f.signature.names):
        mapped = rename.get(name, name)
        target_index.append(signature.names.index(mapped) if mapped in signature.names else None)
    out: Dict[Monomial, GaussianRational] = {}
    for exps, c in f.terms.items():
        vec = [0] * len(signature)
        for i, e in enumerate(exps):
            if not e:
                continue
            j = target_index[i]
            if j is None:
                raise SignatureMismatch(
                    f"variable {f.signature.names[i]!r} has no counterpart in {signature.names}")
            vec[j] += e
        m = tuple(vec)
        out[m] = out.get(m, ZERO) + c
    return TruncatedSeries(signature, f.order if order is None else order, out)


def collect(f: TruncatedSeries, names: Sequence[str],
            signature: VariableSignature) -> Dict[Monomial, TruncatedSeries]:
    """Split f as a polynomial in `names` with coefficients in `signature`."""
    idx = [f.signature.index(n) for n in names]
    rest = [i for i in range(len(f.signature)) if i not in idx]
    rest_sig = VariableSignature(tuple(f.signature.names[i] for i in rest),
                                 tuple(f.signature.weights[i] for i in rest),
                                 tuple(f.signature.barred[i] for i in rest))
    groups: Dict[Monomial, Dict[Monomial, GaussianRational]] = {}
    for exps, c in f.terms.items():
        key = tuple(exps[i] for i in idx)
        groups.setdefault(key, {})[tuple(exps[i] for i in rest)] = c
    return {key: embed(TruncatedSeries._raw(rest_sig, f.order, terms), signature)
            for key, terms in groups.items()}


def substitute(f: TruncatedSeries, var: str, g: TruncatedSeries) -> TruncatedSeries:
    """Formal composition f(var <- g); the result lives in g's signature.

    Terms of f beyond its order carry var^e with e * weight(var) > f.order.
    When g has valuation below weight(var) those terms land at degree
    ceil((f.order + 1) / weight(var)) * valuation(g) and up, so the result
    order is capped just below that.
    """
    if g.constant_term():
        raise CompositionError(f"substituting {var!r} needs a series without constant term")
    target = g.signature
    order = min(f.order, g.order)
    idx = f.signature.index(var)
    var_weight, g_valuation = f.signature.weight(var), g.valuation()
    if g_valuation is not None and g_valuation < var_weight:
        order = min(order, math.ceil((f.order + 1) / var_weight) * g_valuation - 1)
    groups: Dict[int, Dict[Monomial, GaussianRational]] = {}
    for exps, c in f.terms.items():
        rest = exps[:idx] + (0,) + exps[idx + 1:]
        groups.setdefault(exps[idx], {})[rest] = c
    result = TruncatedSeries.zero(target, order)
    power = TruncatedSeries.constant(target, order, 1)
    top = max(groups) if groups else 0
    for e in range(top + 1):
        if e in groups:
            part = embed(TruncatedSeries._raw(f.signature, f.order, groups[e]), target, order=order)
            result = result + part * power
        if e < top:
            power = power * g
    return result


_CONJUGATE_PAIRS = (("z", "zbar"), ("w", "wbar"))


def involution(f: TruncatedSeries) -> TruncatedSeries:
    """Conjugate every coefficient and swap z<->zbar, w<->wbar."""
    sig = f.signature
    perm = list(range(len(sig)))
    for a, b in _CONJUGATE_PAIRS:
        ia, ib = sig.index(a), sig.index(b)
        if sig.weights[ia] != sig.weights[ib]:
            raise SignatureMismatch(f"{a} and {b} carry different weights")
        perm[ia], perm[ib] = ib, ia
    out = {tuple(exps[perm[i]] for i in range(len(sig))): c.conj() for exps, c in f.terms.items()}
    return TruncatedSeries._raw(sig, f.order, out)


def weighted_component(f: TruncatedSeries, a: int, b: int) -> TruncatedSeries:
    sig = f.signature
    return TruncatedSeries._raw(sig, f.order, {m: c for m, c in f.terms.items()
                                               if sig.bidegree(m) == (a, b)})


def truncate(f: TruncatedSeries, order: int) -> TruncatedSeries:
    return f.truncate(order)


# ---------------- Text form ----------------

def _monomial_text(sig: VariableSignature, exps: Monomial) -> str:
    parts = []
    for name, e in zip(sig.names, exps):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def format_series(f: TruncatedSeries) -> str:
    pieces = []
    for exps, c in f.sorted_terms():
        mono = _monomial_text(f.signature, exps)
        if not mono:
            text = str(c)
        elif c == 1:
            text = mono
        elif c == -1:
            text = "-" + mono
        elif c.re and c.im:
            text = f"({c}) {mono}"
        else:
            text = f"{c} {mono}"
        pieces.append(text)
    if not pieces:
        return "0"
    out = pieces[0]
    for text in pieces[1:]:
        out += " - " + text[1:] if text.startswith("-") else " + " + text
    return out


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*^()]))")


class _ExpressionParser:
    """Recursive-descent parser for the polynomial shorthand."""

    def __init__(self, text, signature, order):
        self.text = text
        self.signature = signature
        self.order = order
        self.tokens = self._tokenize(text)
        self.pos = 0

    def _tokenize(self, text):
        tokens, pos = [], 0
        text = text.rstrip()
        while pos < len(text):
            match = _TOKEN.match(text, pos)
            if not match or match.end() == pos:
                raise SeriesParseError(f"unexpected character at {pos} in {text!r}")
            kind = match.lastgroup
            tokens.append((kind, match.group(kind)))
            pos = match.end()
        return tokens

    def _peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def _take(self):
        tok = self._peek()
        self.pos += 1
        return tok

    def parse(self) -> TruncatedSeries:
        if not self.tokens:
            raise SeriesParseError("empty expression")
        value = self._expr()
        if self.pos != len(self.tokens):
            raise SeriesParseError(f"trailing input in {self.text!r}")
        return value

    def _expr(self):
        sign = 1
        while self._peek() in (("op", "+"), ("op", "-")):
            if self._take()[1] == "-":
                sign = -sign
        value = self._term().scale(sign)
        while self._peek() in (("op", "+"), ("op", "-")):
            op = self._take()[1]
            sign = 1 if op == "+" else -1
            while self._peek() in (("op", "+"), ("op", "-")):
                if self._take()[1] == "-":
                    sign = -sign
            value = value + self._term().scale(sign)
        return value

    def _term(self):
        value = self._power()
        while True:
            kind, tok = self._peek()
            if kind == "op" and tok == "*":
                self._take()
                value = value * self._power()
            elif kind in ("num", "name") or (kind == "op" and tok == "("):
                value = value * self._power()
            else:
                return value

    def _power(self):
        base = self._atom()
        if self._peek() == ("op", "^"):
            self._take()
            kind, tok = self._take()
            if kind != "num" or "/" in tok:
                raise SeriesParseError(f"exponent must be a non-negative integer in {self.text!r}")
            base = base ** int(tok)
        return base

    def _atom(self):
        kind, tok = self._take()
        sig, order = self.signature, self.order
        if kind == "num":
            return TruncatedSeries.constant(sig, order, Fraction(tok))
        if kind == "name":
            if tok in sig.names:
                return TruncatedSeries.variable(sig, order, tok)
            if tok == "i":
                return TruncatedSeries.constant(sig, order, I)
            raise SeriesParseError(f"unknown variable {tok!r}; expected one of {sig.names}")
        if kind == "op" and tok == "(":
            inner = self._expr()
            if self._take() != ("op", ")"):
                raise SeriesParseError(f"unbalanced parenthesis in {self.text!r}")
            return inner
        raise SeriesParseError(f"unexpected token {tok!r} in {self.text!r}")


def parse_expression(text: str, signature: VariableSignature, order: int) -> TruncatedSeries:
    return _ExpressionParser(text, signature, order).parse()


# ---------------- Serialization ----------------

def dumps_series(f: TruncatedSeries) -> str:
    sig = f.signature
    lines = [
        "# variables " + " ".join(sig.names),
        "# weights " + " ".join(str(w) for w in sig.weights),
        "# barred " + " ".join("1" if b else "0" for b in sig.barred),
        f"# order {f.order}",
    ]
    for exps, c in f.sorted_terms():
        lines.append(",".join(str(e) for e in exps) + "\t" + _fraction_text(c.re) + "\t" + _fraction_text(c.im))
    return "\n".join(lines) + "\n"


def loads_series(text: str, signature: Optional[VariableSignature] = None,
                 order: Optional[int] = None) -> TruncatedSeries:
    header: Dict[str, list] = {}
    records = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if parts:
                header[parts[0]] = parts[1:]
            continue
        fields = raw.strip().split("\t")
        if len(fields) != 3:
            raise SeriesParseError(f"line {lineno}: expected 'exponents<TAB>re<TAB>im', got {raw!r}")
        try:
            exps = tuple(int(e) for e in fields[0].split(","))
            coeff = GaussianRational(Fraction(fields[1]), Fraction(fields[2]))
        except (ValueError, ZeroDivisionError) as e:
            raise SeriesParseError(f"line {lineno}: {e}") from None
        records.append((exps, coeff))

    if "variables" in header:
        try:
            names = tuple(header["variables"])
            weights = tuple(int(w) for w in header.get("weights", []))
            barred = tuple(b == "1" for b in header.get("barred", ["0"] * len(names)))
            signature = VariableSignature(names, weights, barred)
        except ValueError as e:
            raise SeriesParseError(f"bad series header: {e}") from None
    if "order" in header:
        order = int(header["order"][0])
    if signature is None or order is None:
        raise SeriesParseError("series text lacks a signature/order header and no default was given")

    terms: Dict[Monomial, GaussianRational] = {}
    for exps, coeff in records:
        if len(exps) != len(signature):
            raise SeriesParseError(f"exponent vector {exps} does not fit {signature.names}")
        terms[exps] = terms.get(exps, ZERO) + coeff
    series = TruncatedSeries(signature, order, terms)
    emit_log(f"[SERIES] Loaded {len(series.terms)} terms at order {order}", level="debug")
    return series
