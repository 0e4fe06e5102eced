import numpy as np
import pytest

from padic_rds.noise import BLOCK_SIZE, NoiseProcess, Stream, make_generator


def test_reads_do_not_depend_on_how_they_are_split():
    noise = NoiseProcess([0.2, 0.4, 0.4], seed=3)
    whole = noise.forward(0, 3 * BLOCK_SIZE)
    parts = np.concatenate([noise.forward(0, 1000), noise.forward(1000, 2 * BLOCK_SIZE),
                            noise.forward(1000 + 2 * BLOCK_SIZE, BLOCK_SIZE - 1000)])
    assert np.array_equal(whole, parts)
    fresh = NoiseProcess([0.2, 0.4, 0.4], seed=3)
    assert np.array_equal(fresh.forward(2500, 10), whole[2500:2510])


def test_same_seed_same_draws():
    a = NoiseProcess([0.5, 0.5], seed=11)
    b = NoiseProcess([0.5, 0.5], seed=11)
    assert np.array_equal(a.forward(0, 500), b.forward(0, 500))
    assert np.array_equal(a.backward(500), b.backward(500))
    assert np.array_equal(a.uniform(0, 500), b.uniform(0, 500))


def test_seeds_trials_and_streams_are_independent():
    base = NoiseProcess([0.5, 0.5], seed=11).forward(0, 200)
    assert not np.array_equal(base, NoiseProcess([0.5, 0.5], seed=12).forward(0, 200))
    assert not np.array_equal(base, NoiseProcess([0.5, 0.5], seed=11, trial=1).forward(0, 200))
    assert not np.array_equal(base, NoiseProcess([0.5, 0.5], seed=11).backward(200))


def test_bit_generator_is_configurable():
    pcg = NoiseProcess([0.5, 0.5], seed=1).forward(0, 200)
    philox = NoiseProcess([0.5, 0.5], seed=1, bit_generator="Philox").forward(0, 200)
    assert not np.array_equal(pcg, philox)
    rng = make_generator(1, (0, int(Stream.Y), 0), "SFC64")
    assert isinstance(rng.bit_generator, np.random.SFC64)


def test_draw_frequencies():
    probs = [0.2, 0.4, 0.4]
    n = 100_000
    draws = NoiseProcess(probs, seed=0).forward(0, n)
    counts = np.bincount(draws, minlength=3)
    for q, count in zip(probs, counts):
        assert abs(count - n * q) < 4 * np.sqrt(n * q * (1 - q))


def test_probabilities_are_normalized():
    noise = NoiseProcess([1, 1, 2], seed=0)
    assert noise.probabilities.tolist() == [0.25, 0.25, 0.5]
    assert noise.m == 3


@pytest.mark.parametrize("probabilities", [[], [0.5, 0.0, 0.5], [-1, 2]])
def test_invalid_probabilities(probabilities):
    with pytest.raises(ValueError):
        NoiseProcess(probabilities, seed=0)


def test_empty_and_negative_reads():
    noise = NoiseProcess([0.5, 0.5], seed=0)
    assert noise.forward(0, 0).size == 0
    assert noise.backward(0).size == 0
    with pytest.raises(ValueError):
        noise.forward(-1, 5)


def test_uniform_range():
    ys = NoiseProcess([1.0], seed=0).uniform(0, 5000, -2.0, 3.0)
    assert ys.min() >= -2.0
    assert ys.max() < 3.0


def test_sphere_digits():
    digits = NoiseProcess([1.0], seed=0).sphere_digits(300, 7, 5)
    assert digits.shape == (300, 5)
    assert digits[:, 0].min() >= 1
    assert digits.max() <= 6
