"""
Monte Carlo simulation of the monomial RDS in PadicInt space.

The cocycle is phi(n, omega) x = x^{S_n(omega)}, S_n the product of the first
n drawn exponents. Orbits are simulated step by step with exact arithmetic mod
p^K; every step records the valuation of the distance to the attractor lifts
(or to 0 while the state is off the sphere) and the cumulative valuation
v_n = o_p(S_n).
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import partial
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import rds_logging as logging
from .analysis import attractor_order, attractor_set
from .chain import transition_matrix
from .config import RdsSpec, default_burn_in
from .errors import InternalInconsistency
from .noise import NoiseProcess
from .padic import (PadicInt, PadicLike, Valuation, coerce, from_digits,
                    from_integer, integer_valuation, power, sub, valuation)
from .trials import run_trials
from .unity import RootIndex, UnityTable, unity_table
from .utils.otel_wrapper import trace_function

logger = logging.getLogger(__name__)


def valuation_distance(v: Valuation, p: int) -> Fraction:
    """p^{-v}, or 0 at the precision floor."""
    return Fraction(0) if v.at_floor else Fraction(1, p ** v.v)


@dataclass(frozen=True)
class TraceStep:
    step: int
    drawn_j: Optional[int]  # 1-based, None at step 0
    exponent: Optional[int]
    state: PadicInt
    dist_valuation: Valuation
    cumulative_valuation: int
    root_index: Optional[RootIndex]  # None off the sphere

    @property
    def on_sphere(self) -> bool:
        return self.root_index is not None


@dataclass(frozen=True)
class OrbitTrace:
    spec: RdsSpec
    u0: PadicInt
    start: int
    steps: Tuple[TraceStep, ...]

    @property
    def n_steps(self) -> int:
        return len(self.steps) - 1

    @property
    def states(self) -> List[PadicInt]:
        return [step.state for step in self.steps]

    @property
    def final_state(self) -> PadicInt:
        return self.steps[-1].state

    @property
    def drawn(self) -> List[int]:
        """0-based map indices, one per step after the first."""
        return [step.drawn_j - 1 for step in self.steps[1:]]

    @property
    def index_trajectory(self) -> List[Optional[RootIndex]]:
        return [step.root_index for step in self.steps]

    @property
    def final_distance(self) -> Fraction:
        return valuation_distance(self.steps[-1].dist_valuation, self.spec.p)


def distance_to_attractor(x: PadicInt, table: UnityTable, attractor: frozenset) -> Tuple[Valuation, Optional[RootIndex]]:
    """Valuation of the distance from x to the attractor lifts, and the root index of x.

    Off the sphere the distance is measured to 0, the attractor of pZ_p.
    """
    if not x.is_unit():
        return valuation(x), None
    index = table.index_of(x)
    if index.a not in attractor:
        return Valuation(0, x.K), index
    return valuation(sub(x, table.lift(index))), index


def simulate_orbit(spec: RdsSpec, u0: PadicLike, n_steps: int,
                   noise: Optional[NoiseProcess] = None, start: int = 0) -> OrbitTrace:
    """n_steps iterations from u0 using the forward draws at times start, start+1, ...

    Starting at ``start = m`` continues an orbit simulated for m steps: the
    cocycle identity makes the two agree state for state.
    """
    if n_steps < 0:
        raise ValueError(f"n_steps must be >= 0, got {n_steps}")
    noise = noise or NoiseProcess.from_spec(spec)
    p, K = spec.p, spec.precision
    state = coerce(u0, p, K)
    table = unity_table(p, K)
    attractor = frozenset(r.a for r in attractor_set(p, spec.exponents))

    dist, index = distance_to_attractor(state, table, attractor)
    steps = [TraceStep(0, None, None, state, dist, 0, index)]
    cumulative = 0
    floor_seen = dist.at_floor
    for n, j in enumerate(noise.forward(start, n_steps), start=1):
        s = spec.exponents[int(j)]
        state = power(state, s)
        cumulative += integer_valuation(s, p)
        dist, index = distance_to_attractor(state, table, attractor)
        if dist.at_floor and not floor_seen:
            floor_seen = True
            logger.debug(f"orbit from {steps[0].state} reached the precision floor at step {n}")
        steps.append(TraceStep(n, int(j) + 1, s, state, dist, cumulative, index))
    return OrbitTrace(spec, steps[0].state, start, tuple(steps))


def _trial_orbit(spec: RdsSpec, u0: PadicInt, n_steps: int, trial: int) -> OrbitTrace:
    return simulate_orbit(spec, u0, n_steps, NoiseProcess.from_spec(spec, trial))


@trace_function
def simulate_trials(spec: RdsSpec, u0: PadicLike, n_steps: int, trials: int = 1,
                    workers: int = 1) -> List[OrbitTrace]:
    """Independent orbits, one noise substream per trial, ordered by trial index."""
    u0 = coerce(u0, spec.p, spec.precision)
    return run_trials(partial(_trial_orbit, spec, u0, n_steps), range(trials), workers)


def closed_form_valuation(p: int, K: int, v: int) -> Valuation:
    """Valuation of the worst-case pullback distance when o_p(S) = v.

    Odd p: v + 1. For p = 2 the sup is 1/2 while S is odd, then 2^{-(v+2)}.
    """
    if p == 2:
        d = 1 if v == 0 else v + 2
    else:
        d = v + 1
    return Valuation(min(d, K), K)


@dataclass(frozen=True)
class PullbackResult:
    """dist(phi(n, theta^{-n} omega) S_1(0), Gamma_p) by closed form and by sampling."""
    p: int
    n: int
    drawn: Tuple[int, ...]  # 1-based, for times -1, ..., -n
    exponent_valuation: int
    closed_form_valuation: Valuation
    sampled_valuation: Valuation
    samples: int
    roots_absorbed: bool

    @property
    def closed_form(self) -> Fraction:
        return valuation_distance(self.closed_form_valuation, self.p)

    @property
    def sampled(self) -> Fraction:
        return valuation_distance(self.sampled_valuation, self.p)

    @property
    def at_floor(self) -> bool:
        return self.closed_form_valuation.at_floor

    @property
    def attractor_distance(self) -> Fraction:
        """Hausdorff distance to the attractor lifts: 1 until every root is carried into I_s."""
        return self.closed_form if self.roots_absorbed else Fraction(1)


def pullback_distance(spec: RdsSpec, n: int, noise: Optional[NoiseProcess] = None,
                      samples: int = 1000) -> PullbackResult:
    """Pullback distance after n backward draws.

    The sampled supremum runs over the witness 1 + p and ``samples`` random
    sphere points; each is compared with the power of its own Teichmueller
    lift. Exponents are reduced mod phi(p^K), which is exact for units.

    Raises:
        InternalInconsistency: when the sampled sup differs from the closed form
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    noise = noise or NoiseProcess.from_spec(spec)
    p, K = spec.p, spec.precision
    table = unity_table(p, K)
    drawn = tuple(int(j) + 1 for j in noise.backward(n))
    S = 1
    for j in drawn:
        S *= spec.exponents[j - 1]
    v = integer_valuation(S, p)
    closed = closed_form_valuation(p, K, v)

    e = S % (p ** (K - 1) * (p - 1))
    points = [from_integer(1 + p, p, K)]
    points += [from_digits([int(d) for d in row], p) for row in noise.sphere_digits(samples, p, K)]
    sampled = min(valuation(sub(power(x, e), power(table.lift(table.index_of(x)), e))) for x in points)
    if sampled.v != closed.v:
        raise InternalInconsistency(f"pullback after {n} draws: sampled valuation {sampled} "
                                    f"differs from closed form {closed}")
    roots_absorbed = S % attractor_order(p, spec.exponents).zeta_index == 0
    return PullbackResult(p, n, drawn, v, closed, sampled, len(points), roots_absorbed)


@dataclass(frozen=True)
class FloorStatistics:
    n_max: int
    seeds: Tuple[int, ...]
    first_floor_step: Tuple[Optional[int], ...]

    @property
    def fraction_reached(self) -> float:
        if not self.seeds:
            return 0.0
        return sum(step is not None for step in self.first_floor_step) / len(self.seeds)


def _first_floor_step(spec: RdsSpec, n_max: int, samples: int, seed: int) -> Optional[int]:
    seeded = spec.with_seed(seed)
    noise = NoiseProcess.from_spec(seeded)
    v = 0
    for n, j in enumerate(noise.backward(n_max), start=1):
        v += integer_valuation(spec.exponents[int(j)], spec.p)
        if closed_form_valuation(spec.p, spec.precision, v).at_floor:
            # confirm the closed form by sampling at the step it claims the floor
            pullback_distance(seeded, n, noise, samples)
            return n
    return None


@trace_function
def pullback_floor_statistics(spec: RdsSpec, n_max: int, seeds: Sequence[int],
                              workers: int = 1, samples: int = 16) -> FloorStatistics:
    """First step at which the pullback distance reaches the precision floor, per seed."""
    seeds = tuple(seeds)
    steps = run_trials(partial(_first_floor_step, spec, n_max, samples), seeds, workers)
    stats = FloorStatistics(n_max, seeds, tuple(steps))
    logger.info(f"{stats.fraction_reached:.4f} of {len(seeds)} seeds reach the floor within {n_max} steps")
    return stats


@dataclass(frozen=True)
class CocycleProduct:
    """k_{j,n}: how often each map was drawn in the first n steps."""
    n: int
    counts: Tuple[int, ...]

    @property
    def frequencies(self) -> Tuple[float, ...]:
        return tuple(c / self.n if self.n else 0.0 for c in self.counts)


def recurrence_counters(spec: RdsSpec, n: int, noise: Optional[NoiseProcess] = None) -> CocycleProduct:
    noise = noise or NoiseProcess.from_spec(spec)
    counts = np.bincount(noise.forward(0, n), minlength=spec.m)
    product = CocycleProduct(n, tuple(int(c) for c in counts))
    if sum(product.counts) != n:
        raise InternalInconsistency(f"counters sum to {sum(product.counts)}, expected {n}")
    return product


@dataclass(frozen=True)
class EntryComparison:
    a: RootIndex
    b: RootIndex
    exact: Fraction
    estimate: float
    sigma: float

    @property
    def deviation(self) -> float:
        return abs(self.estimate - float(self.exact))

    @property
    def passed(self) -> bool:
        if self.exact in (0, 1):
            return self.estimate == float(self.exact)
        return self.deviation <= 3 * self.sigma


@dataclass(frozen=True)
class EmpiricalChainReport:
    start: RootIndex
    n_steps: int
    burn_in: int
    states: Tuple[RootIndex, ...]
    counts: Tuple[Tuple[int, ...], ...]
    visits: Tuple[int, ...]
    comparisons: Tuple[EntryComparison, ...]

    @property
    def max_abs_deviation(self) -> float:
        return max((c.deviation for c in self.comparisons), default=0.0)

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.comparisons)

    @property
    def occupancy(self) -> Dict[RootIndex, float]:
        return {r: v / self.n_steps for r, v in zip(self.states, self.visits)}

    def estimate(self, a, b) -> float:
        i = [r.a for r in self.states].index(int(a))
        k = [r.a for r in self.states].index(int(b))
        return self.counts[i][k] / self.visits[i] if self.visits[i] else float("nan")


@trace_function
def empirical_transition_matrix(spec: RdsSpec, n_steps: int, burn_in: Optional[int] = None,
                                noise: Optional[NoiseProcess] = None) -> EmpiricalChainReport:
    """Estimate P(a, b) from one long orbit started on an attractor lift.

    The orbit starts at the smallest nonzero attractor index (index 0 when the
    attractor is {1}). Rows never visited after burn-in are not compared.

    Raises:
        InternalInconsistency: when the state leaves the set of attractor lifts
    """
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    burn_in = default_burn_in(spec.p) if burn_in is None else burn_in
    noise = noise or NoiseProcess.from_spec(spec)
    exact = transition_matrix(spec)
    table = unity_table(spec.p, spec.precision)
    position = {r.a: i for i, r in enumerate(exact.states)}
    start = next((r for r in exact.states if r.a != 0), exact.states[0])

    size = exact.size
    counts = np.zeros((size, size), dtype=np.int64)
    state = table.lift(start)
    a = start.a
    for t, j in enumerate(noise.forward(0, burn_in + n_steps)):
        state = power(state, spec.exponents[int(j)])
        index = table.index_of(state)
        if index.a not in position or state != table.lift(index):
            raise InternalInconsistency(f"orbit from {start} left the attractor lifts at step {t + 1}: {state}")
        if t >= burn_in:
            counts[position[a], position[index.a]] += 1
        a = index.a

    visits = counts.sum(axis=1)
    comparisons = []
    for i, ra in enumerate(exact.states):
        if visits[i] == 0:
            continue
        for k, rb in enumerate(exact.states):
            x = exact.entries[i][k]
            estimate = counts[i, k] / visits[i]
            sigma = float(np.sqrt(float(x) * (1 - float(x)) / visits[i]))
            comparisons.append(EntryComparison(ra, rb, x, float(estimate), sigma))
    report = EmpiricalChainReport(start, n_steps, burn_in, exact.states,
                                  tuple(tuple(int(c) for c in row) for row in counts),
                                  tuple(int(v) for v in visits), tuple(comparisons))
    logger.info(f"empirical chain over {n_steps} steps: max deviation {report.max_abs_deviation:.3g}, "
                f"all within 3 sigma: {report.all_passed}")
    return report
