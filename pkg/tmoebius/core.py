"""
Exact Arithmetic Core

Half-integers, partitions, divisor sums, q-analogs, Laurent polynomials in
q^{1/2} and truncated power series in y, together with the Eisenstein-type
generators G2, H, H0 and H1. Everything here is immutable and exact.
"""
from __future__ import annotations

import functools
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Dict, Iterable, Iterator, List, Mapping, Optional, Tuple, Union

import sympy

Number = Union[int, Fraction]


def _require_positive(n: int, what: str) -> None:
    if isinstance(n, bool) or not isinstance(n, int) or n <= 0:
        raise ValueError(f"{what} needs a positive integer, got {n!r}")


def exact(value: Number) -> Number:
    """Collapse integral fractions to int"""
    if isinstance(value, Fraction) and value.denominator == 1:
        return int(value)
    return value


def format_number(value: Number) -> str:
    """Render an exact number as "p" or "p/q\""""
    return str(exact(Fraction(value)))


@dataclass(frozen=True, order=True)
class HalfInt:
    """An element of ½ℤ stored as twice its value"""
    doubled: int

    @classmethod
    def parse(cls, value: Any) -> HalfInt:
        """Parse "3/2", "3", 3 or Fraction(3, 2). Decimal notation is rejected."""
        if isinstance(value, HalfInt):
            return value
        if isinstance(value, bool):
            raise ValueError(f"not a half-integer: {value!r}")
        if isinstance(value, int):
            return cls(2 * value)
        if isinstance(value, Fraction):
            fraction = value
        else:
            text = str(value).strip()
            if not text or any(ch in text for ch in ".eE"):
                raise ValueError(f"half-integers are written as fractions like 3/2, got {value!r}")
            try:
                fraction = Fraction(text)
            except ValueError as e:
                raise ValueError(f"not a half-integer: {value!r}") from e
        doubled = fraction * 2
        if doubled.denominator != 1:
            raise ValueError(f"not a half-integer: {value!r}")
        return cls(int(doubled))

    def is_integer(self) -> bool:
        return self.doubled % 2 == 0

    def as_fraction(self) -> Fraction:
        return Fraction(self.doubled, 2)

    def __add__(self, other: HalfInt) -> HalfInt:
        return HalfInt(self.doubled + other.doubled)

    def __sub__(self, other: HalfInt) -> HalfInt:
        return HalfInt(self.doubled - other.doubled)

    def __neg__(self) -> HalfInt:
        return HalfInt(-self.doubled)

    def __str__(self) -> str:
        if self.is_integer():
            return str(self.doubled // 2)
        return f"{self.doubled}/2"


@dataclass(frozen=True)
class Partition:
    """A tangency profile: weakly decreasing positive parts"""
    parts: Tuple[int, ...] = ()

    def __post_init__(self):
        parts = tuple(self.parts)
        for part in parts:
            if isinstance(part, bool) or not isinstance(part, int) or part <= 0:
                raise ValueError(f"partition parts must be positive integers, got {part!r}")
        object.__setattr__(self, "parts", tuple(sorted(parts, reverse=True)))

    @classmethod
    def parse(cls, value: Any) -> Partition:
        """Parse a comma list such as "1,1,2"; None or "" is the empty partition."""
        if value is None:
            return cls()
        if isinstance(value, Partition):
            return value
        if isinstance(value, str):
            text = value.strip()
            if not text:
                return cls()
            try:
                return cls(tuple(int(item) for item in text.split(",")))
            except ValueError as e:
                raise ValueError(f"partitions are comma lists of positive integers, got {value!r}") from e
        return cls(tuple(value))

    def norm(self) -> int:
        """‖μ‖ = Σ parts"""
        return sum(self.parts)

    def length(self) -> int:
        """|μ| = number of parts"""
        return len(self.parts)

    def multiplicities(self) -> Dict[int, int]:
        return dict(sorted(Counter(self.parts).items()))

    def symmetry_order(self) -> int:
        """∏ μ_i!"""
        return math.prod(math.factorial(m) for m in Counter(self.parts).values())

    def __add__(self, other: Partition) -> Partition:
        return Partition(self.parts + other.parts)

    def __iter__(self) -> Iterator[int]:
        return iter(self.parts)

    def __str__(self) -> str:
        if not self.parts:
            return "empty"
        return " ".join(f"{part}^{count}" for part, count in self.multiplicities().items())


@functools.lru_cache(maxsize=None)
def sigma1(n: int) -> int:
    """Sum of the divisors of n"""
    _require_positive(n, "sigma1")
    return int(sympy.divisor_sigma(n, 1))


@functools.lru_cache(maxsize=None)
def sigma1_tilde(n: int) -> int:
    """Σ n/k over the odd divisors k of n"""
    _require_positive(n, "sigma1_tilde")
    return sum(n // int(k) for k in sympy.divisors(n) if k % 2)


class LaurentPolynomial:
    """
    Polynomial in s = q^{1/2} with negative powers allowed.

    Exponents are stored doubled, so the key 3 means q^{3/2}. Coefficients are
    ints or Fractions; zero coefficients are never stored.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Optional[Mapping[int, Number]] = None):
        cleaned: Dict[int, Number] = {}
        for exponent, coefficient in (terms or {}).items():
            if coefficient:
                cleaned[int(exponent)] = exact(coefficient)
        self._terms = cleaned

    @classmethod
    def constant(cls, value: Number) -> LaurentPolynomial:
        return cls({0: value})

    @classmethod
    def monomial(cls, doubled_exponent: int, coefficient: Number = 1) -> LaurentPolynomial:
        return cls({doubled_exponent: coefficient})

    @property
    def terms(self) -> Dict[int, Number]:
        return dict(sorted(self._terms.items()))

    def coefficient(self, doubled_exponent: int) -> Number:
        return self._terms.get(doubled_exponent, 0)

    def is_zero(self) -> bool:
        return not self._terms

    @staticmethod
    def _coerce(other: Any) -> LaurentPolynomial:
        if isinstance(other, LaurentPolynomial):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return LaurentPolynomial.constant(other)
        return NotImplemented

    def __add__(self, other: Any) -> LaurentPolynomial:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        merged = dict(self._terms)
        for exponent, coefficient in other._terms.items():
            merged[exponent] = merged.get(exponent, 0) + coefficient
        return LaurentPolynomial(merged)

    __radd__ = __add__

    def __neg__(self) -> LaurentPolynomial:
        return LaurentPolynomial({e: -c for e, c in self._terms.items()})

    def __sub__(self, other: Any) -> LaurentPolynomial:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: Any) -> LaurentPolynomial:
        return (-self) + other

    def __mul__(self, other: Any) -> LaurentPolynomial:
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return LaurentPolynomial({e: c * other for e, c in self._terms.items()})
        if not isinstance(other, LaurentPolynomial):
            return NotImplemented
        product: Dict[int, Number] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                product[e1 + e2] = product.get(e1 + e2, 0) + c1 * c2
        return LaurentPolynomial(product)

    __rmul__ = __mul__

    def __truediv__(self, scalar: Number) -> LaurentPolynomial:
        return LaurentPolynomial({e: Fraction(c) / scalar for e, c in self._terms.items()})

    def __eq__(self, other: Any) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def at_one(self) -> Number:
        """Value at q = 1"""
        return exact(sum((Fraction(c) for c in self._terms.values()), Fraction(0)))

    def mirrored(self) -> LaurentPolynomial:
        """Image under q ↔ q^{-1}"""
        return LaurentPolynomial({-e: c for e, c in self._terms.items()})

    def is_palindromic(self) -> bool:
        return self == self.mirrored()

    def to_json(self) -> List[Dict[str, Any]]:
        return [
            {"exp": str(HalfInt(e)), "coef": _json_coefficient(c)}
            for e, c in sorted(self._terms.items(), reverse=True)
        ]

    def __repr__(self) -> str:
        return f"LaurentPolynomial({self.terms})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        pieces = []
        for exponent, coefficient in sorted(self._terms.items(), reverse=True):
            if exponent == 0:
                pieces.append(format_number(coefficient))
                continue
            power = "q" if exponent == 2 else f"q^({HalfInt(exponent)})"
            prefix = "" if coefficient == 1 else "-" if coefficient == -1 else format_number(coefficient)
            pieces.append(f"{prefix}{power}")
        return " + ".join(pieces).replace("+ -", "- ")


def _json_coefficient(value: Number) -> Union[int, str]:
    value = exact(value)
    return value if isinstance(value, int) else str(value)


def q_analog(m: int) -> LaurentPolynomial:
    """[m]_q = q^{(m-1)/2} + q^{(m-3)/2} + ... + q^{-(m-1)/2}"""
    _require_positive(m, "q_analog")
    return LaurentPolynomial({m - 1 - 2 * j: 1 for j in range(m)})


@dataclass(frozen=True)
class TruncatedSeries:
    """Power series in y known exactly up to y^order"""
    coefficients: Tuple[Fraction, ...]

    def __post_init__(self):
        if not self.coefficients:
            raise ValueError("a truncated series needs at least the constant term")
        object.__setattr__(self, "coefficients", tuple(Fraction(c) for c in self.coefficients))

    @classmethod
    def zero(cls, order: int) -> TruncatedSeries:
        return cls((Fraction(0),) * (order + 1))

    @classmethod
    def from_function(cls, order: int, coefficient: Callable[[int], Number]) -> TruncatedSeries:
        if order < 0:
            raise ValueError(f"truncation order must be nonnegative, got {order}")
        return cls(tuple(Fraction(coefficient(n)) for n in range(order + 1)))

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    def coefficient(self, n: int) -> Fraction:
        if n < 0:
            return Fraction(0)
        if n > self.order:
            raise IndexError(f"y^{n} lies beyond the truncation order {self.order}")
        return self.coefficients[n]

    def truncate(self, order: int) -> TruncatedSeries:
        if order > self.order:
            raise ValueError(f"cannot extend a series of order {self.order} to {order}")
        return TruncatedSeries(self.coefficients[: order + 1])

    def __add__(self, other: TruncatedSeries) -> TruncatedSeries:
        n = min(self.order, other.order)
        return TruncatedSeries(tuple(self.coefficients[i] + other.coefficients[i] for i in range(n + 1)))

    def __neg__(self) -> TruncatedSeries:
        return TruncatedSeries(tuple(-c for c in self.coefficients))

    def __sub__(self, other: TruncatedSeries) -> TruncatedSeries:
        return self + (-other)

    def __mul__(self, other: Any) -> TruncatedSeries:
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return TruncatedSeries(tuple(c * other for c in self.coefficients))
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        n = min(self.order, other.order)
        a, b = self.coefficients, other.coefficients
        return TruncatedSeries(tuple(
            sum((a[i] * b[k - i] for i in range(k + 1) if a[i] and b[k - i]), Fraction(0))
            for k in range(n + 1)
        ))

    __rmul__ = __mul__

    def substitute_power(self, k: int) -> TruncatedSeries:
        """y → y^k; known coefficients reach y^{k(order+1)-1}"""
        _require_positive(k, "substitute_power")
        n = k * (self.order + 1) - 1
        return TruncatedSeries(tuple(
            self.coefficients[i // k] if i % k == 0 else Fraction(0) for i in range(n + 1)
        ))

    def negate_variable(self) -> TruncatedSeries:
        """y → -y"""
        return TruncatedSeries(tuple(c if i % 2 == 0 else -c for i, c in enumerate(self.coefficients)))

    def derive(self, times: int = 1) -> TruncatedSeries:
        """D^times with D = y·d/dy"""
        return TruncatedSeries(tuple(c * i ** times for i, c in enumerate(self.coefficients)))

    def even_part(self) -> TruncatedSeries:
        return TruncatedSeries(tuple(c if i % 2 == 0 else Fraction(0) for i, c in enumerate(self.coefficients)))

    def odd_part(self) -> TruncatedSeries:
        return TruncatedSeries(tuple(c if i % 2 else Fraction(0) for i, c in enumerate(self.coefficients)))

    def first_difference(self, other: TruncatedSeries) -> Optional[int]:
        """Smallest exponent where the two series differ within the common order"""
        for i in range(min(self.order, other.order) + 1):
            if self.coefficients[i] != other.coefficients[i]:
                return i
        return None

    def agrees_with(self, other: TruncatedSeries) -> bool:
        return self.first_difference(other) is None

    def to_json(self) -> Dict[str, Any]:
        return {"order": self.order, "coefficients": [format_number(c) for c in self.coefficients]}

    def __str__(self) -> str:
        terms = [f"{format_number(c)}*y^{i}" for i, c in enumerate(self.coefficients) if c]
        return (" + ".join(terms) or "0") + f" + O(y^{self.order + 1})"


def eisenstein_G2(order: int) -> TruncatedSeries:
    """G2(y) = Σ σ1(n) y^n"""
    return TruncatedSeries.from_function(order, lambda n: sigma1(n) if n else 0)


def series_H(order: int) -> TruncatedSeries:
    """H(y) = Σ σ̃1(n) y^n"""
    return TruncatedSeries.from_function(order, lambda n: sigma1_tilde(n) if n else 0)


def series_H0(order: int) -> TruncatedSeries:
    return TruncatedSeries.from_function(order, lambda n: sigma1_tilde(n) if n and n % 2 == 0 else 0)


def series_H1(order: int) -> TruncatedSeries:
    return TruncatedSeries.from_function(order, lambda n: sigma1_tilde(n) if n % 2 else 0)


def series_sum(series: Iterable[TruncatedSeries], order: int) -> TruncatedSeries:
    total = TruncatedSeries.zero(order)
    for item in series:
        total = total + item
    return total
