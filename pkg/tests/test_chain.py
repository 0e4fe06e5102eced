import time
from fractions import Fraction

import numpy as np
import pytest

from padic_rds.analysis import analyze, invariant_decomposition
from padic_rds.chain import (CROSS_CHECK_STATES, MAX_EXACT_STATES,
                             absorption_analysis,
                             ergodic_measures, full_transition_matrix,
                             stationary_distributions, transition_matrix)
from padic_rds.errors import NotInvariant, SizeLimitExceeded
from padic_rds.unity import RootIndex


def test_worked_chain_p29(spec29):
    matrix = transition_matrix(spec29)
    q1, q2, q3 = spec29.probabilities
    assert [r.a for r in matrix.states] == [0, 4, 8, 12, 16, 20, 24]
    assert matrix.entry(0, 0) == 1
    for a in range(4, 28, 4):
        assert matrix.entry(a, a) == q1
        assert matrix.entry(a, 2 * a % 28) == q2
        assert matrix.entry(a, 3 * a % 28) == q3
        assert sum(matrix.row(a).values()) == 1
    assert matrix.is_doubly_stochastic()


def test_single_exponent_chain_is_a_permutation(make_spec):
    identity = transition_matrix(make_spec(5, (5,)))
    assert identity.size == 4
    for a in range(4):
        assert identity.row(a) == {RootIndex(a, 5): Fraction(1)}
    doubling = transition_matrix(make_spec(29, (2,)))
    for a in doubling.states:
        assert doubling.row(a) == {a * 2: Fraction(1)}


def test_full_matrix_rows(spec29):
    full = full_transition_matrix(spec29)
    assert full.size == 28
    assert full.is_stochastic()
    assert full.row(7) == {RootIndex(7, 29): Fraction(1, 5), RootIndex(14, 29): Fraction(2, 5),
                           RootIndex(21, 29): Fraction(2, 5)}
    # squaring is not injective off the attractor
    assert not full.is_doubly_stochastic()


@pytest.mark.parametrize("probabilities", [None, "1/2,1/4,1/4", "0.1,0.1,0.8"])
def test_stationary_distributions_are_uniform(make_spec, probabilities):
    spec = make_spec(29, (29, 2, 3), probabilities)
    matrix = transition_matrix(spec)
    components = invariant_decomposition(29, (29, 2, 3))
    stationary = stationary_distributions(matrix, components)
    assert stationary[0] == {RootIndex(0, 29): Fraction(1)}
    assert set(stationary[1].values()) == {Fraction(1, 6)}


def test_stationary_p61(make_spec):
    spec = make_spec(61, (61, 2, 3))
    stationary = stationary_distributions(transition_matrix(spec), invariant_decomposition(61, (61, 2, 3)))
    assert [sorted(r.a for r in d) for d in stationary] == [[0], [12, 24, 36, 48]]
    assert set(stationary[1].values()) == {Fraction(1, 4)}


def test_stationary_rejects_open_components(spec29):
    matrix = transition_matrix(spec29)
    with pytest.raises(NotInvariant):
        stationary_distributions(matrix, [(RootIndex(4, 29), RootIndex(8, 29))])


def test_absorption_rows_sum_to_one(spec29):
    absorption = absorption_analysis(spec29)
    assert len(absorption) == 28
    for probs in absorption.values():
        assert sum(probs) == 1
    assert absorption[RootIndex(0, 29)] == (1, 0)
    assert absorption[RootIndex(8, 29)] == (0, 1)
    # multiples of 7 never leave 7Z/28 and end at xi^0
    assert absorption[RootIndex(7, 29)] == (1, 0)
    assert absorption[RootIndex(21, 29)] == (1, 0)


def test_absorption_deterministic_chain(make_spec):
    spec = make_spec(29, (2,))
    components = invariant_decomposition(29, (2,))
    absorption = absorption_analysis(spec)
    for a in range(28):
        b = a
        for _ in range(28):
            b = 2 * b % 28
        expected = next(i for i, c in enumerate(components) if RootIndex(b, 29) in c)
        assert absorption[RootIndex(a, 29)] == tuple(Fraction(int(i == expected)) for i in range(len(components)))


@pytest.mark.parametrize("p,exponents", [(29, (29, 2, 3)), (61, (61, 2, 3)), (47, (47, 14)), (37, (2, 5))])
def test_absorption_agrees_with_random_paths(make_spec, p, exponents):
    spec = make_spec(p, exponents)
    components = invariant_decomposition(p, exponents)
    absorption = absorption_analysis(spec)
    rng = np.random.default_rng(99)
    n = p - 1
    for a in range(n):
        probs = absorption[RootIndex(a, p)]
        for _ in range(20):
            # enough draws of every exponent to strip the factors q excludes
            path = list(exponents) * n
            rng.shuffle(path)
            b = a
            for s in path:
                b = b * s % n
            reached = next(i for i, c in enumerate(components) if RootIndex(b, p) in c)
            assert probs[reached] > 0


def test_size_limit(make_spec):
    # 4099 is prime and p - 1 = 4098 > MAX_EXACT_STATES
    assert MAX_EXACT_STATES == 4096
    spec = make_spec(4099, (4099,))
    with pytest.raises(SizeLimitExceeded):
        transition_matrix(spec)
    with pytest.raises(SizeLimitExceeded):
        full_transition_matrix(spec)
    with pytest.raises(SizeLimitExceeded):
        absorption_analysis(spec)


def test_ergodic_measures(spec29):
    measures = ergodic_measures(analyze(spec29))
    assert [m.label for m in measures] == ["dirac at xi^0", "uniform on 6 roots"]


def test_graph_carries_probabilities(spec29):
    graph = transition_matrix(spec29).graph()
    assert graph[4][8]["probability"] == Fraction(2, 5)
    assert graph[4][4]["probability"] == Fraction(1, 5)
    assert graph.number_of_nodes() == 7


def test_absorption_without_linear_solve_p1009(make_spec):
    # 1008 = 2^4 * 3^2 * 7, q = 63: 945 transient indices
    spec = make_spec(1009, (1009, 2))
    components = invariant_decomposition(1009, (1009, 2))
    start = time.perf_counter()
    absorption = absorption_analysis(spec)
    assert time.perf_counter() - start < 10
    assert len(absorption) == 1008
    component = {r.a: i for i, c in enumerate(components) for r in c}
    for a in range(1008):
        # 1009 = 1 mod 1008, so only the doubling moves the index; 2^10 clears the 2^4
        expected = component[a * 2 ** 10 % 1008]
        assert absorption[RootIndex(a, 1009)] == tuple(Fraction(int(i == expected)) for i in range(len(components)))
    assert absorption[RootIndex(1, 1009)][component[64]] == 1
    assert absorption[RootIndex(63, 1009)][component[0]] == 1


def test_analyze_near_the_size_limit(make_spec):
    start = time.perf_counter()
    report = analyze(make_spec(1009, (1009, 2)))
    assert time.perf_counter() - start < 30
    assert report.q == 63
    assert len(report.transient_absorption) == 1008 - 63


def test_large_component_is_uniform_without_a_solve(make_spec):
    # 1018 = 2 * 509 and 2 has order 508 mod 509: one component of 508 roots
    spec = make_spec(1019, (1019, 2))
    components = invariant_decomposition(1019, (1019, 2))
    assert sorted(len(c) for c in components) == [1, 508]
    assert 508 > CROSS_CHECK_STATES
    start = time.perf_counter()
    stationary = stationary_distributions(transition_matrix(spec), components)
    assert time.perf_counter() - start < 30
    big = next(d for d in stationary if len(d) == 508)
    assert set(big.values()) == {Fraction(1, 508)}
