from fractions import Fraction

import numpy as np
import pytest

from padic_rds.errors import (IncompatibleOperands, InvalidModulus,
                              InvalidPrecision, PrecisionExceeded)
from padic_rds.padic import (PadicInt, add, binomial_valuation_check, coerce,
                             dist, from_digits, from_integer,
                             integer_valuation, measure_g, mul, norm, parse,
                             power, sub, valuation)
from padic_rds.unity import teichmuller_lift


def random_padic(rng, p, K):
    return from_digits([int(d) for d in rng.integers(0, p, size=K)], p)


def test_from_integer_digits():
    assert from_integer(0, 7, 4).digits == (0, 0, 0, 0)
    assert from_integer(-1, 5, 3).digits == (4, 4, 4)
    assert from_integer(61, 29, 3).digits == (3, 2, 0)


def test_from_integer_rejects_bad_modulus_and_precision():
    with pytest.raises(InvalidModulus):
        from_integer(1, 4, 3)
    with pytest.raises(InvalidModulus):
        from_integer(1, 1, 3)
    with pytest.raises(InvalidPrecision):
        from_integer(1, 5, 0)


def test_ring_operations():
    assert mul(from_integer(3, 5, 3), from_integer(2, 5, 3)).digits == (1, 1, 0)
    assert add(from_integer(4, 5, 2), from_integer(1, 5, 2)).digits == (0, 1)
    assert sub(from_integer(0, 5, 2), from_integer(1, 5, 2)) == from_integer(-1, 5, 2)
    assert from_integer(3, 5, 3) * from_integer(2, 5, 3) == from_integer(6, 5, 3)


def test_power():
    rng = np.random.default_rng(1)
    for _ in range(20):
        x = random_padic(rng, 7, 5)
        assert power(x, 1) == x
    # Fermat: 2^28 = 1 mod 29
    assert power(from_integer(2, 29, 2), 28).residue == 1
    x = from_integer(3, 5, 6)
    big = 2 ** 70 + 3
    assert power(x, big).value == pow(3, big, 5 ** 6)
    assert x ** 4 == from_integer(81, 5, 6)
    with pytest.raises(ValueError):
        power(x, -1)


def test_incompatible_operands():
    with pytest.raises(IncompatibleOperands):
        add(from_integer(1, 5, 3), from_integer(1, 5, 4))
    with pytest.raises(IncompatibleOperands):
        mul(from_integer(1, 5, 3), from_integer(1, 7, 3))


def test_valuation_norm_dist():
    zero = from_integer(0, 7, 4)
    assert valuation(zero).at_floor
    assert str(valuation(zero)) == ">=4"
    assert norm(zero) == 0
    assert norm(from_integer(29, 29, 3)) == Fraction(1, 29)
    assert valuation(from_integer(50, 5, 4)).v == 2
    assert str(valuation(from_integer(50, 5, 4))) == "2"
    x = from_integer(123, 7, 4)
    assert dist(x, x) == 0


def test_valuation_is_monotone_in_norm():
    values = [from_integer(5 ** k, 5, 6) for k in range(6)]
    norms = [norm(x) for x in values]
    assert norms == sorted(norms, reverse=True)


def test_ultrametric_inequality():
    rng = np.random.default_rng(2)
    for p in (2, 3, 29):
        for _ in range(300):
            # share a random number of leading digits to get interesting distances
            x = random_padic(rng, p, 6)
            y = add(x, from_integer(int(rng.integers(0, p ** 6)) * p ** int(rng.integers(0, 4)), p, 6))
            z = random_padic(rng, p, 6)
            dxy, dyz, dxz = dist(x, y), dist(y, z), dist(x, z)
            assert dxz <= max(dxy, dyz)
            if dxy != dyz:
                assert dxz == max(dxy, dyz)


def test_norm_multiplicativity():
    rng = np.random.default_rng(3)
    p, K = 5, 10
    for _ in range(300):
        x, y = random_padic(rng, p, K), random_padic(rng, p, K)
        vx, vy = valuation(x), valuation(y)
        if vx.at_floor or vy.at_floor or vx.v + vy.v >= K:
            continue
        assert valuation(mul(x, y)).v == vx.v + vy.v


def test_measure_g_values():
    assert measure_g(from_integer(0, 11, 5)) == 0
    assert measure_g(from_integer(-1, 5, 3)) == Fraction(124, 125)
    assert float(measure_g(from_integer(-1, 5, 3))) == pytest.approx(0.992)
    assert measure_g(from_integer(1, 29, 4)) == Fraction(1, 29)


def test_measure_g_lipschitz():
    rng = np.random.default_rng(4)
    for p in (2, 5, 41):
        for _ in range(2500):
            u, v = random_padic(rng, p, 6), random_padic(rng, p, 6)
            if rng.random() < 0.5:
                # force a common prefix
                v = add(u, from_integer(int(rng.integers(0, p ** 3)) * p ** 3, p, 6))
            assert abs(measure_g(u) - measure_g(v)) <= dist(u, v)


def test_measure_g_is_injective():
    p, K = 3, 4
    values = {measure_g(from_integer(n, p, K)) for n in range(p ** K)}
    assert len(values) == p ** K


def test_text_form():
    x = from_integer(-1, 5, 3)
    assert x.to_text() == "5:3:4,4,4"
    assert parse("5:3:4,4,4") == x
    assert parse("29:3:3,2,0") == from_integer(61, 29, 3)
    with pytest.raises(ValueError):
        parse("5:3:4,4")
    with pytest.raises(ValueError):
        parse("five")
    with pytest.raises(ValueError):
        parse("5:2:4,7")


def test_coerce():
    assert coerce(61, 29, 3) == from_integer(61, 29, 3)
    assert coerce("61", 29, 3) == from_integer(61, 29, 3)
    assert coerce("29:3:3,2,0", 29, 3) == from_integer(61, 29, 3)
    with pytest.raises(IncompatibleOperands):
        coerce("29:3:3,2,0", 29, 4)
    with pytest.raises(TypeError):
        coerce(1.5, 29, 3)


def test_padic_int_validates_value():
    with pytest.raises(ValueError):
        PadicInt(5, 2, 25)


def test_binomial_valuation_examples():
    # (7^5 - 2^5) = 16775 = 5^2 * 671
    assert binomial_valuation_check(from_integer(2, 5, 6), from_integer(5, 5, 6), 5)
    assert binomial_valuation_check(from_integer(3, 7, 5), from_integer(49, 7, 5), 1)
    gamma = teichmuller_lift(3, 29, 5)
    for t in (1, 2, 17, 28, 30):
        assert binomial_valuation_check(gamma, from_integer(29 * t, 29, 5), 2)


def test_binomial_valuation_preconditions():
    with pytest.raises(PrecisionExceeded):
        binomial_valuation_check(from_integer(5, 5, 6), from_integer(5, 5, 6), 2)
    with pytest.raises(PrecisionExceeded):
        binomial_valuation_check(from_integer(2, 5, 6), from_integer(1, 5, 6), 2)
    with pytest.raises(PrecisionExceeded):
        binomial_valuation_check(from_integer(2, 5, 6), from_integer(0, 5, 6), 2)
    with pytest.raises(PrecisionExceeded):
        binomial_valuation_check(from_integer(2, 5, 3), from_integer(25, 5, 3), 5)
    with pytest.raises(PrecisionExceeded):
        binomial_valuation_check(from_integer(2, 5, 6), from_integer(5, 5, 6), 0)
    # at p = 2 the identity needs |u|_2 <= 1/4
    with pytest.raises(PrecisionExceeded):
        binomial_valuation_check(from_integer(1, 2, 8), from_integer(2, 2, 8), 2)


def test_binomial_valuation_property_suite():
    rng = np.random.default_rng(2024)
    K = 12
    cases = 0
    for p in (2, 3, 5, 29, 41, 47):
        min_u = 2 if p == 2 else 1
        for _ in range(1700):
            gamma = from_integer(int(rng.integers(0, p ** 6)) * p + int(rng.integers(1, p)), p, K)
            v_u = int(rng.integers(min_u, K))
            t = int(rng.integers(1, 10 ** 6))
            while t % p == 0:
                t += 1
            u = from_integer(p ** v_u * t, p, K)
            e = int(rng.integers(0, K - v_u))
            m = int(rng.integers(1, 10 ** 4))
            while m % p == 0:
                m += 1
            n = p ** e * m
            assert integer_valuation(n, p) + v_u < K
            assert binomial_valuation_check(gamma, u, n), (p, gamma, u, n)
            cases += 1
    assert cases >= 10 ** 4
