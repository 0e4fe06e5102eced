"""
Fixed-precision arithmetic in Z_p.

A PadicInt is a p-adic integer known modulo p^K. It is stored as the integer
representative 0 <= value < p^K; the digit expansion (alpha_0, ..., alpha_{K-1})
is derived from it little-endian, alpha_0 first. All operations are pure and
exact modulo p^K.

Text form used by the CSV/JSON exports and the CLI: "p:K:a0,a1,...,a_{K-1}".
"""
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Tuple, Union

from sympy import isprime

from .errors import (IncompatibleOperands, InvalidModulus, InvalidPrecision,
                     PrecisionExceeded)

DEFAULT_PRECISION = 16


@lru_cache(maxsize=None)
def check_modulus(p: int) -> int:
    """Return p when it is a prime, raise InvalidModulus otherwise."""
    if not isinstance(p, int) or not isprime(p):
        raise InvalidModulus(f"p must be a prime, got {p!r}")
    return p


def check_precision(K: int) -> int:
    if not isinstance(K, int) or K < 1:
        raise InvalidPrecision(f"precision K must be an integer >= 1, got {K!r}")
    return K


def integer_valuation(n: int, p: int) -> int:
    """o_p(n) for a nonzero integer n."""
    if n == 0:
        raise ValueError("o_p(0) is infinite")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True, order=True)
class Valuation:
    """o_p(x) observed at precision K.

    ``v == precision`` is the marker ">=K": the value is indistinguishable
    from 0 at the working precision.
    """
    v: int
    precision: int = field(compare=False)

    @property
    def at_floor(self) -> bool:
        return self.v >= self.precision

    def __str__(self) -> str:
        return f">={self.precision}" if self.at_floor else str(self.v)


@dataclass(frozen=True)
class PadicInt:
    p: int
    K: int
    value: int

    def __post_init__(self):
        check_modulus(self.p)
        check_precision(self.K)
        if not 0 <= self.value < self.p ** self.K:
            raise ValueError(f"value {self.value} is not reduced mod {self.p}^{self.K}")

    @property
    def modulus(self) -> int:
        return self.p ** self.K

    @property
    def digits(self) -> Tuple[int, ...]:
        digits = []
        n = self.value
        for _ in range(self.K):
            n, d = divmod(n, self.p)
            digits.append(d)
        return tuple(digits)

    @property
    def residue(self) -> int:
        """alpha_0, the image of x in Z/p."""
        return self.value % self.p

    def is_unit(self) -> bool:
        return self.residue != 0

    def to_text(self) -> str:
        return f"{self.p}:{self.K}:" + ",".join(str(d) for d in self.digits)

    def __str__(self) -> str:
        return self.to_text()

    def __add__(self, other: "PadicInt") -> "PadicInt":
        return add(self, other)

    def __sub__(self, other: "PadicInt") -> "PadicInt":
        return sub(self, other)

    def __neg__(self) -> "PadicInt":
        return neg(self)

    def __mul__(self, other: "PadicInt") -> "PadicInt":
        return mul(self, other)

    def __pow__(self, e: int) -> "PadicInt":
        return power(self, e)


def from_integer(n: int, p: int, K: int = DEFAULT_PRECISION) -> PadicInt:
    """Canonical embedding Z -> Z_p truncated to K digits; negative n wraps mod p^K."""
    check_modulus(p)
    check_precision(K)
    return PadicInt(p, K, n % p ** K)


def from_digits(digits, p: int) -> PadicInt:
    """Build a PadicInt from little-endian digits; K is the number of digits."""
    check_modulus(p)
    digits = list(digits)
    check_precision(len(digits))
    value = 0
    for d in reversed(digits):
        if not 0 <= d < p:
            raise ValueError(f"digit {d} out of range for p={p}")
        value = value * p + d
    return PadicInt(p, len(digits), value)


def parse(text: str) -> PadicInt:
    """Inverse of PadicInt.to_text: "p:K:a0,a1,...". """
    try:
        p_str, k_str, digit_str = text.strip().split(":")
        p, K = int(p_str), int(k_str)
        digits = [int(d) for d in digit_str.split(",")] if digit_str else []
    except ValueError as e:
        raise ValueError(f"malformed p-adic integer text {text!r}: expected 'p:K:a0,a1,...'") from e
    if len(digits) != K:
        raise ValueError(f"{text!r} declares K={K} but carries {len(digits)} digits")
    return from_digits(digits, p)


def _check_compatible(x: PadicInt, y: PadicInt) -> None:
    if (x.p, x.K) != (y.p, y.K):
        raise IncompatibleOperands(f"cannot combine Z_{x.p} mod p^{x.K} with Z_{y.p} mod p^{y.K}")


def add(x: PadicInt, y: PadicInt) -> PadicInt:
    _check_compatible(x, y)
    return PadicInt(x.p, x.K, (x.value + y.value) % x.modulus)


def neg(x: PadicInt) -> PadicInt:
    """The p^K-complement of x."""
    return PadicInt(x.p, x.K, (-x.value) % x.modulus)


def sub(x: PadicInt, y: PadicInt) -> PadicInt:
    return add(x, neg(y))


def mul(x: PadicInt, y: PadicInt) -> PadicInt:
    _check_compatible(x, y)
    return PadicInt(x.p, x.K, (x.value * y.value) % x.modulus)


def power(x: PadicInt, e: int) -> PadicInt:
    """x^e mod p^K by square-and-multiply; e may be arbitrarily large."""
    if e < 0:
        raise ValueError("negative exponents need p-adic division, which is not supported")
    return PadicInt(x.p, x.K, pow(x.value, e, x.modulus))


def valuation(x: PadicInt) -> Valuation:
    if x.value == 0:
        return Valuation(x.K, x.K)
    return Valuation(integer_valuation(x.value, x.p), x.K)


def norm(x: PadicInt) -> Fraction:
    """|x|_p = p^{-v}; a value at the precision floor has norm 0."""
    v = valuation(x)
    if v.at_floor:
        return Fraction(0)
    return Fraction(1, x.p ** v.v)


def dist(x: PadicInt, y: PadicInt) -> Fraction:
    return norm(sub(x, y))


def measure_g(u: PadicInt) -> Fraction:
    """g(u) = sum_j alpha_j p^{-(j+1)}, exact; resolution p^{-K}."""
    numerator = 0
    for d in u.digits:
        # reversing the digits puts alpha_0 at the most significant place
        numerator = numerator * u.p + d
    return Fraction(numerator, u.modulus)


def binomial_valuation_check(gamma: PadicInt, u: PadicInt, n: int) -> bool:
    """Check |(gamma + u)^n - gamma^n|_p = |n|_p |u|_p at precision K.

    Requires gamma on the unit sphere, |u|_p <= 1/p (|u|_2 <= 1/4 when p = 2,
    where the identity needs the stronger bound) and o_p(n) + o_p(u) < K so
    the identity is observable before the precision floor.
    """
    _check_compatible(gamma, u)
    if n < 1:
        raise PrecisionExceeded(f"n must be a positive integer, got {n}")
    v_gamma = valuation(gamma)
    v_u = valuation(u)
    min_u = 2 if gamma.p == 2 else 1
    if v_gamma.v != 0:
        raise PrecisionExceeded(f"gamma must lie on the unit sphere, got valuation {v_gamma}")
    if v_u.at_floor or v_u.v < min_u:
        raise PrecisionExceeded(f"u must satisfy {min_u} <= o_p(u) < K, got valuation {v_u}")
    expected = integer_valuation(n, gamma.p) + v_u.v
    if expected >= gamma.K:
        raise PrecisionExceeded(f"o_p(n) + o_p(u) = {expected} is not below K = {gamma.K}")
    observed = valuation(sub(power(add(gamma, u), n), power(gamma, n)))
    return not observed.at_floor and observed.v == expected


PadicLike = Union[PadicInt, int, str]


def coerce(x: PadicLike, p: int, K: int) -> PadicInt:
    """Accept a PadicInt, an integer or the text form, checking (p, K)."""
    if isinstance(x, PadicInt):
        value = x
    elif isinstance(x, int):
        value = from_integer(x, p, K)
    elif isinstance(x, str):
        value = parse(x) if ":" in x else from_integer(int(x), p, K)
    else:
        raise TypeError(f"cannot interpret {x!r} as a p-adic integer")
    if (value.p, value.K) != (p, K):
        raise IncompatibleOperands(f"{value} does not match p={p}, K={K}")
    return value
