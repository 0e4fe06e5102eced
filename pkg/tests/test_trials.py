from functools import partial

import pytest

from padic_rds.trials import check_picklable, run_trials


def test_inline_trials_keep_order():
    assert run_trials(partial(pow, 2), range(6)) == [1, 2, 4, 8, 16, 32]
    assert run_trials(partial(pow, 2), []) == []


def test_pooled_trials_keep_order():
    indices = [5, 3, 9, 0, 7]
    assert run_trials(partial(pow, 3), indices, workers=3) == [3 ** i for i in indices]


def test_unpicklable_trial_function_is_rejected():
    with pytest.raises(TypeError):
        run_trials(lambda i: i, range(4), workers=2)
    # inline execution does not need pickling
    assert run_trials(lambda i: i + 1, range(3), workers=1) == [1, 2, 3]


def test_check_picklable_inspects_closures():
    unpicklable = (x for x in range(3))

    def uses_generator(i):
        return next(unpicklable) + i

    with pytest.raises(TypeError):
        check_picklable(uses_generator)
    check_picklable(partial(pow, 2))


def test_invalid_worker_count():
    with pytest.raises(ValueError):
        run_trials(partial(pow, 2), range(3), workers=0)
