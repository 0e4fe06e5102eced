"""
Roots of unity in Z_p.

Gamma_p, the (p-1)-th roots of unity, is cyclic of order p-1. Every element is
addressed by its exponent a in Z/(p-1) relative to a fixed primitive root xi,
the smallest primitive root modulo p, so reports are reproducible. The
Teichmueller lift of a unit residue is the unique root of unity congruent to it.
"""
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from math import gcd
from typing import Dict, FrozenSet, Optional, Tuple

from sympy import primitive_root as _sympy_primitive_root

from . import rds_logging as logging
from .errors import IncompatibleOperands, NotAUnit, NotOnSphere
from .padic import (PadicInt, check_modulus, check_precision, from_integer,
                    mul, power, sub, valuation)

logger = logging.getLogger(__name__)

# above this many roots the table computes lifts on demand
EAGER_LIFT_LIMIT = 10 ** 5


@dataclass(frozen=True, order=True)
class RootIndex:
    """The root xi^a of Gamma_p, stored as a in Z/(p-1)."""
    a: int
    p: int

    def __post_init__(self):
        if not 0 <= self.a < max(self.p - 1, 1):
            raise ValueError(f"root index {self.a} out of range for p={self.p}")

    @classmethod
    def of(cls, a: int, p: int) -> "RootIndex":
        return cls(a % max(p - 1, 1), p)

    def __mul__(self, s: int) -> "RootIndex":
        """Index of (xi^a)^s."""
        return RootIndex.of(self.a * s, self.p)

    def __add__(self, other: "RootIndex") -> "RootIndex":
        """Index of the product of two roots."""
        return RootIndex.of(self.a + other.a, self.p)

    def __int__(self) -> int:
        return self.a

    def __str__(self) -> str:
        return f"xi^{self.a}"


class FixedPointKind(str, Enum):
    ATTRACTING = "Attracting"
    SIEGEL_CENTER = "SiegelCenter"


@lru_cache(maxsize=None)
def primitive_root(p: int) -> int:
    """Smallest generator of (Z/p)^*; 1 for the trivial group at p = 2."""
    check_modulus(p)
    if p == 2:
        return 1
    return int(_sympy_primitive_root(p))


def teichmuller_lift(a0: int, p: int, K: int) -> PadicInt:
    """The root of unity congruent to a0 mod p, at precision K.

    Iterates x <- x^p; the iterate agrees with the lift on one more digit per
    step, so K iterations always reach the fixed point.
    """
    check_modulus(p)
    check_precision(K)
    if a0 % p == 0:
        raise NotAUnit(f"{a0} is divisible by {p}, it has no Teichmueller lift")
    x = from_integer(a0 % p, p, K)
    for step in range(K + 1):
        nxt = power(x, p)
        if nxt == x:
            logger.debug(f"lift of {a0} mod {p} stabilized after {step} steps")
            return x
        x = nxt
    raise AssertionError(f"Teichmueller iteration for {a0} mod {p}^{K} did not stabilize")


def _index_set(p: int, step: int) -> FrozenSet[RootIndex]:
    order = max(p - 1, 1)
    return frozenset(RootIndex(a, p) for a in range(0, order, step))


def gamma_k(p: int, k: int) -> FrozenSet[RootIndex]:
    """Fixed points of x -> x^k on the sphere: the solutions of x^{k-1} = 1.

    These are the multiples of m = (p-1)/gcd(p-1, k-1); there are gcd(p-1, k-1).
    """
    check_modulus(p)
    if k < 2:
        raise ValueError(f"exponent k must be >= 2, got {k}")
    order = max(p - 1, 1)
    return _index_set(p, order // gcd(order, k - 1))


@dataclass(frozen=True)
class GammaImage:
    """f_l[Gamma_k] computed directly, next to the closed form Gamma_u."""
    k: int
    l: int
    image: FrozenSet[RootIndex]
    u: int
    gamma_u: FrozenSet[RootIndex]

    @property
    def formula_holds(self) -> bool:
        return self.image == self.gamma_u


def image_of_gamma_k(p: int, k: int, l: int) -> GammaImage:
    """Image of Gamma_k under x -> x^l, compared with Gamma_u, u = (k-1)/(k-1, l) + 1."""
    if l < 2:
        raise ValueError(f"exponent l must be >= 2, got {l}")
    image = frozenset(r * l for r in gamma_k(p, k))
    u = (k - 1) // gcd(k - 1, l) + 1
    # u == 1 would mean the trivial equation x^0 = 1; Gamma_u is then {1}
    gamma_u = gamma_k(p, u) if u >= 2 else frozenset({RootIndex(0, p)})
    result = GammaImage(k, l, image, u, gamma_u)
    if not result.formula_holds:
        logger.warning(f"f_{l}[Gamma_{k}] != Gamma_{u} for p={p}: image has {len(image)} roots, "
                       f"Gamma_{u} has {len(gamma_u)}")
    return result


def classify_fixed_points(p: int, k: int) -> FixedPointKind:
    """Points of Gamma_k attract iff |f_k'(x)|_p = |k|_p < 1, i.e. iff p | k."""
    check_modulus(p)
    if k < 2:
        raise ValueError(f"exponent k must be >= 2, got {k}")
    return FixedPointKind.ATTRACTING if k % p == 0 else FixedPointKind.SIEGEL_CENTER


class UnityTable:
    """All p-1 Teichmueller lifts at precision K, addressed by RootIndex.

    Lifts are precomputed for p <= EAGER_LIFT_LIMIT and computed on demand
    above it. Immutable after construction.
    """

    def __init__(self, p: int, K: int):
        check_modulus(p)
        check_precision(K)
        self.p = p
        self.K = K
        self.order = max(p - 1, 1)
        self.primitive_root = primitive_root(p)
        self.xi = teichmuller_lift(self.primitive_root, p, K)
        self._residue_index: Dict[int, int] = {}
        self._lifts: Optional[Tuple[PadicInt, ...]] = None
        residue = 1
        for a in range(self.order):
            self._residue_index[residue] = a
            residue = residue * self.primitive_root % p
        if p <= EAGER_LIFT_LIMIT:
            lifts = []
            x = from_integer(1, p, K)
            for _ in range(self.order):
                lifts.append(x)
                x = mul(x, self.xi)
            self._lifts = tuple(lifts)
        logger.debug(f"UnityTable p={p} K={K} xi={self.primitive_root} eager={self._lifts is not None}")

    def lift(self, index) -> PadicInt:
        a = int(index) % self.order
        if self._lifts is not None:
            return self._lifts[a]
        return power(self.xi, a)

    @property
    def lifts(self) -> Dict[RootIndex, PadicInt]:
        return {RootIndex(a, self.p): self.lift(a) for a in range(self.order)}

    def discrete_log(self, residue: int) -> RootIndex:
        """Index a with xi^a = residue mod p."""
        residue %= self.p
        if residue == 0:
            raise NotAUnit(f"0 mod {self.p} is not a root of unity")
        return RootIndex(self._residue_index[residue], self.p)

    def index_of(self, x: PadicInt) -> RootIndex:
        """Index of the root of unity nearest to the sphere point x."""
        self._check(x)
        if not x.is_unit():
            raise NotOnSphere(f"{x} has positive valuation")
        return self.discrete_log(x.residue)

    def describe(self, index) -> str:
        """Report form "xi^a (p:K:digits)"."""
        return f"xi^{int(index)} ({self.lift(index).to_text()})"

    def _check(self, x: PadicInt) -> None:
        if (x.p, x.K) != (self.p, self.K):
            raise IncompatibleOperands(f"{x} does not belong to the table for p={self.p}, K={self.K}")


@lru_cache(maxsize=64)
def unity_table(p: int, K: int) -> UnityTable:
    """Shared, cached UnityTable for (p, K)."""
    return UnityTable(p, K)


def nearest_root_decomposition(x: PadicInt, table: UnityTable) -> Tuple[RootIndex, PadicInt]:
    """Split a sphere point as x = gamma + u with gamma in Gamma_p and |u|_p <= 1/p."""
    if valuation(x).v > 0:
        raise NotOnSphere(f"{x} has positive valuation, it is not on the unit sphere")
    index = table.index_of(x)
    return index, sub(x, table.lift(index))
