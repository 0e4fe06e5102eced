"""
Interference patterns of the RDS.

A pattern is one orbit of information states u_n seen through the measurement
function g, paired with y-coordinates that are pure uniform noise on [a, b].
After burn-in the orbit lives in one invariant component of the attractor and
the x-samples cluster in vertical strips around g(lift(a)) for the indices a of
that component. Strip centers come from the exact lifts, never from the samples.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import partial
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import chisquare

from . import rds_logging as logging
from .analysis import Component, invariant_decomposition
from .config import PatternConfig, RdsSpec
from .engine import simulate_orbit
from .errors import ModelViolation
from .noise import NoiseProcess
from .padic import measure_g
from .trials import run_trials
from .unity import RootIndex, unity_table
from .utils.otel_wrapper import trace_function
from .utils.timing import timed

logger = logging.getLogger(__name__)

# y-marginal uniformity is rejected below this chi-square p-value
Y_UNIFORMITY_LEVEL = 0.01


@dataclass(frozen=True)
class StripCenter:
    index: Optional[RootIndex]  # None for the strip of the fixed point 0
    exact: Fraction

    @property
    def x(self) -> float:
        return float(self.exact)


def strip_centers(spec: RdsSpec, component: Sequence) -> Tuple[StripCenter, ...]:
    """g(lift(a)) for every index of the component, ascending."""
    table = unity_table(spec.p, spec.precision)
    centers = [StripCenter(RootIndex.of(int(a), spec.p), measure_g(table.lift(a))) for a in component]
    return tuple(sorted(centers, key=lambda c: c.exact))


@dataclass
class PatternResult:
    config: PatternConfig
    reached_component: Optional[int]  # position in invariant_decomposition; None when attracted to 0
    component: Component
    strip_centers: Tuple[StripCenter, ...]
    xs: np.ndarray
    ys: np.ndarray
    histogram: np.ndarray  # x_bins x y_bins counts
    occupancy: Dict[Optional[RootIndex], int]
    min_center_valuation: int  # smallest number of digits a sample shares with its strip center
    outside_tolerance: int
    y_pvalue: float

    @property
    def n_samples(self) -> int:
        return int(self.xs.size)

    @property
    def y_uniform(self) -> bool:
        return self.y_pvalue > Y_UNIFORMITY_LEVEL

    @property
    def center_set(self) -> frozenset:
        return frozenset(c.exact for c in self.strip_centers)


def _agreeing_digits(x_digits: Tuple[int, ...], y_digits: Tuple[int, ...]) -> int:
    n = 0
    for a, b in zip(x_digits, y_digits):
        if a != b:
            break
        n += 1
    return n


@timed
@trace_function
def generate_pattern(config: PatternConfig) -> PatternResult:
    """Simulate one orbit and turn it into (x, y) samples, strips and a 2-D histogram.

    Raises:
        ModelViolation: when the orbit is still outside the attractor after
            burn-in, or wanders between components
    """
    spec = config.spec
    burn_in = config.effective_burn_in
    noise = NoiseProcess.from_spec(spec)
    trace = simulate_orbit(spec, config.u0, config.n_particles - 1, noise)
    kept = trace.steps[burn_in:]

    first = kept[0]
    components = invariant_decomposition(spec.p, spec.exponents)
    table = unity_table(spec.p, spec.precision)
    if first.root_index is None:
        reached, component = None, ()
        centers = (StripCenter(None, Fraction(0)),)
    else:
        reached = next((i for i, c in enumerate(components) if first.root_index in c), None)
        if reached is None:
            raise ModelViolation(f"orbit from {config.u0} has not reached the attractor after {burn_in} steps "
                                 f"(index {first.root_index}); increase burn_in")
        component = components[reached]
        centers = strip_centers(spec, component)

    occupancy: Dict[Optional[RootIndex], int] = {c.index: 0 for c in centers}
    xs = np.empty(len(kept))
    min_digits = spec.precision
    outside = 0
    for k, step in enumerate(kept):
        if step.root_index not in occupancy:
            raise ModelViolation(f"orbit left its component at step {step.step}: index {step.root_index}")
        occupancy[step.root_index] += 1
        xs[k] = float(measure_g(step.state))
        center_digits = table.lift(step.root_index).digits if step.root_index is not None else (0,) * spec.precision
        agree = _agreeing_digits(step.state.digits, center_digits)
        min_digits = min(min_digits, agree)
        if agree < config.effective_tolerance_digits:
            outside += 1

    a, b = config.y_range
    ys = noise.uniform(0, len(kept), a, b)
    histogram, _, _ = np.histogram2d(xs, ys, bins=[config.x_bins, config.y_bins], range=[[0.0, 1.0], [a, b]])
    y_counts, _ = np.histogram(ys, bins=config.y_bins, range=(a, b))
    y_pvalue = float(chisquare(y_counts).pvalue) if config.y_bins > 1 else 1.0

    if outside:
        logger.warning(f"{outside} of {len(kept)} samples lie farther than p^-{config.effective_tolerance_digits} "
                       "from their strip center")
    logger.info(f"pattern p={spec.p} s={spec.exponents} seed={spec.seed}: {len(centers)} strips, "
                f"{len(kept)} samples")
    return PatternResult(config=config, reached_component=reached, component=component,
                         strip_centers=centers, xs=xs, ys=ys, histogram=histogram.astype(np.int64),
                         occupancy=occupancy, min_center_valuation=min_digits,
                         outside_tolerance=outside, y_pvalue=y_pvalue)


@dataclass(frozen=True)
class SeedIndependenceReport:
    seeds: Tuple[int, ...]
    strip_centers: Tuple[StripCenter, ...]
    occupancies: Tuple[Dict[Optional[RootIndex], int], ...]
    n_samples: int

    @property
    def expected(self) -> float:
        return self.n_samples / len(self.strip_centers)

    @property
    def sigma(self) -> float:
        share = 1 / len(self.strip_centers)
        return float(np.sqrt(self.n_samples * share * (1 - share)))

    def within_3_sigma_fraction(self) -> float:
        """Share of (seed, strip) occupancies within 3 sigma of the uniform expectation."""
        counts = [c for occupancy in self.occupancies for c in occupancy.values()]
        if len(self.strip_centers) == 1:
            return 1.0
        return sum(abs(c - self.expected) <= 3 * self.sigma for c in counts) / len(counts)

    @property
    def occupancies_differ(self) -> bool:
        return len({tuple(sorted((str(k), v) for k, v in o.items())) for o in self.occupancies}) > 1


def _pattern_for_seed(config: PatternConfig, seed: int) -> PatternResult:
    return generate_pattern(config.model_copy(update={"spec": config.spec.with_seed(seed)}))


@trace_function
def seed_independence_check(config: PatternConfig, seeds: Sequence[int], workers: int = 1) -> SeedIndependenceReport:
    """Run the pattern for every seed; the strip centers must be identical.

    Raises:
        ModelViolation: when two seeds produce different strip-center sets
    """
    seeds = tuple(seeds)
    if not seeds:
        raise ValueError("at least one seed is required")
    results: List[PatternResult] = run_trials(partial(_pattern_for_seed, config), seeds, workers)
    reference = results[0].center_set
    for seed, result in zip(seeds, results):
        if result.center_set != reference:
            raise ModelViolation(f"seed {seed} produced {len(result.center_set)} strips, "
                                 f"seed {seeds[0]} produced {len(reference)}")
    return SeedIndependenceReport(seeds, results[0].strip_centers,
                                  tuple(r.occupancy for r in results), results[0].n_samples)
