"""
Exact Markov chain of the RDS on root indices.

Under Bernoulli noise the index a moves to a*s_j mod (p-1) with probability
q_j. On the attractor every map is a permutation, so the restricted chain is
doubly stochastic and each invariant component carries the uniform stationary
distribution. Off the attractor the chain is transient and each index is
absorbed into the one component that matches it modulo q.

All entries are fractions.Fraction. The closed forms are cross-checked on
small blocks by exact linear solves through sympy.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import TYPE_CHECKING, Dict, List, Sequence, Tuple

import networkx as nx
import sympy

from . import rds_logging as logging
from .analysis import (Component, attractor_order, attractor_set,
                       invariant_decomposition)
from .errors import InternalInconsistency, NotInvariant, SizeLimitExceeded
from .unity import RootIndex

if TYPE_CHECKING:
    from .analysis import AttractorReport
    from .config import RdsSpec

logger = logging.getLogger(__name__)

# exact solves beyond this many states are out of the supported regime
MAX_EXACT_STATES = 2 ** 12
# linear solves double-check the closed forms up to this many unknowns
CROSS_CHECK_STATES = 64


def _to_rational(x: Fraction) -> sympy.Rational:
    return sympy.Rational(x.numerator, x.denominator)


def _to_fraction(x) -> Fraction:
    r = sympy.Rational(x)
    return Fraction(int(r.p), int(r.q))


def _check_size(n: int, what: str) -> None:
    if n > MAX_EXACT_STATES:
        raise SizeLimitExceeded(f"{what} has {n} states, exact analysis supports at most {MAX_EXACT_STATES}")


@dataclass(frozen=True)
class TransitionMatrix:
    """P(a, b) = sum of q_j over the maps with a*s_j = b, on an ordered state list."""
    states: Tuple[RootIndex, ...]
    entries: Tuple[Tuple[Fraction, ...], ...]

    @cached_property
    def _positions(self) -> Dict[int, int]:
        return {r.a: i for i, r in enumerate(self.states)}

    def position(self, state) -> int:
        a = int(state)
        try:
            return self._positions[a]
        except KeyError:
            raise KeyError(f"{a} is not a state of this chain") from None

    def entry(self, a, b) -> Fraction:
        return self.entries[self.position(a)][self.position(b)]

    def row(self, a) -> Dict[RootIndex, Fraction]:
        """Nonzero entries of the row of a."""
        return {self.states[k]: x for k, x in enumerate(self.entries[self.position(a)]) if x}

    @property
    def size(self) -> int:
        return len(self.states)

    def row_sums(self) -> List[Fraction]:
        return [sum(row, Fraction(0)) for row in self.entries]

    def column_sums(self) -> List[Fraction]:
        return [sum((row[k] for row in self.entries), Fraction(0)) for k in range(self.size)]

    def is_stochastic(self) -> bool:
        return all(x == 1 for x in self.row_sums())

    def is_doubly_stochastic(self) -> bool:
        return self.is_stochastic() and all(x == 1 for x in self.column_sums())

    def graph(self) -> nx.DiGraph:
        """Positive-probability transitions, edge attribute ``probability``."""
        g = nx.DiGraph()
        g.add_nodes_from(r.a for r in self.states)
        for i, row in enumerate(self.entries):
            for k, x in enumerate(row):
                if x:
                    g.add_edge(self.states[i].a, self.states[k].a, probability=x)
        return g

    def restricted(self, component: Sequence[RootIndex]) -> "TransitionMatrix":
        positions = [self.position(r) for r in component]
        return TransitionMatrix(tuple(self.states[i] for i in positions),
                                tuple(tuple(self.entries[i][k] for k in positions) for i in positions))

    def to_sympy(self) -> sympy.Matrix:
        return sympy.Matrix([[_to_rational(x) for x in row] for row in self.entries])


def _build(spec: "RdsSpec", states: Sequence[int]) -> TransitionMatrix:
    n = max(spec.p - 1, 1)
    position = {a: i for i, a in enumerate(states)}
    rows = [[Fraction(0)] * len(states) for _ in states]
    for a in states:
        for s, q in zip(spec.exponents, spec.probabilities):
            b = a * s % n
            if b not in position:
                raise NotInvariant(f"index {a} leaves the state set under s={s}")
            rows[position[a]][position[b]] += q
    return TransitionMatrix(tuple(RootIndex(a, spec.p) for a in states),
                            tuple(tuple(row) for row in rows))


def transition_matrix(spec: "RdsSpec") -> TransitionMatrix:
    """Exact chain on the attractor states in ascending index order.

    Raises:
        InternalInconsistency: when a row or column does not sum to 1
        SizeLimitExceeded: above MAX_EXACT_STATES attractor states
    """
    states = sorted(r.a for r in attractor_set(spec.p, spec.exponents))
    _check_size(len(states), "the attractor")
    matrix = _build(spec, states)
    if not matrix.is_doubly_stochastic():
        raise InternalInconsistency(f"chain on the attractor of {spec.exponents} mod {spec.p} "
                                    "is not doubly stochastic")
    return matrix


def full_transition_matrix(spec: "RdsSpec") -> TransitionMatrix:
    """Exact chain on all of Z/(p-1); maps may be non-injective here."""
    n = max(spec.p - 1, 1)
    _check_size(n, "Z/(p-1)")
    matrix = _build(spec, list(range(n)))
    if not matrix.is_stochastic():
        raise InternalInconsistency(f"full chain of {spec.exponents} mod {spec.p} has a row not summing to 1")
    return matrix


def _solve_stationary(block: TransitionMatrix) -> Dict[RootIndex, Fraction]:
    """pi P = pi with sum(pi) = 1, by exact Gauss-Jordan elimination."""
    n = block.size
    P = block.to_sympy()
    A = (P.T - sympy.eye(n)).col_join(sympy.ones(1, n))
    b = sympy.zeros(n, 1).col_join(sympy.ones(1, 1))
    try:
        solution, params = A.gauss_jordan_solve(b)
    except ValueError as e:
        raise InternalInconsistency(f"stationary system on {[str(r) for r in block.states]} is inconsistent") from e
    if params.shape[0] != 0:
        raise InternalInconsistency(f"stationary distribution on {[str(r) for r in block.states]} is not unique")
    return {r: _to_fraction(solution[k]) for k, r in enumerate(block.states)}


def stationary_distributions(matrix: TransitionMatrix,
                             components: Sequence[Component]) -> Tuple[Dict[RootIndex, Fraction], ...]:
    """Exact stationary distribution of the chain restricted to each component.

    An irreducible doubly stochastic block has the uniform distribution as its
    only stationary distribution. Blocks up to CROSS_CHECK_STATES states are
    also solved directly.

    Raises:
        NotInvariant: a component is not closed under the chain
        InternalInconsistency: a component is not irreducible, or its
            stationary distribution is not uniform
    """
    result = []
    for component in components:
        block = matrix.restricted(component)
        if not block.is_stochastic():
            raise NotInvariant(f"component {[str(r) for r in component]} is not closed under the chain")
        if not nx.is_strongly_connected(block.graph()):
            raise InternalInconsistency(f"component {[str(r) for r in component]} is not irreducible")
        uniform = Fraction(1, len(component))
        if not block.is_doubly_stochastic():
            raise InternalInconsistency(f"stationary distribution on {[str(r) for r in component]} "
                                        f"is not uniform: column sums {[str(x) for x in block.column_sums()]}")
        distribution = {r: uniform for r in block.states}
        if block.size <= CROSS_CHECK_STATES:
            solved = _solve_stationary(block)
            if solved != distribution:
                raise InternalInconsistency(f"stationary distribution on {[str(r) for r in component]} "
                                            f"is not uniform: {[str(x) for x in solved.values()]}")
        result.append(distribution)
    return tuple(result)


def _solve_absorption(spec: "RdsSpec", transient: Sequence[int],
                      component_of: Dict[int, int], n_comp: int) -> Dict[int, Tuple[Fraction, ...]]:
    """First-step analysis B = (I - Q)^{-1} R, with R summed per component."""
    full = full_transition_matrix(spec)
    t_pos = {a: i for i, a in enumerate(transient)}
    Q = sympy.zeros(len(transient), len(transient))
    R = sympy.zeros(len(transient), n_comp)
    for a in transient:
        for r, x in full.row(a).items():
            if r.a in t_pos:
                Q[t_pos[a], t_pos[r.a]] += _to_rational(x)
            else:
                R[t_pos[a], component_of[r.a]] += _to_rational(x)
    B = (sympy.eye(len(transient)) - Q).LUsolve(R)
    return {a: tuple(_to_fraction(B[t_pos[a], c]) for c in range(n_comp)) for a in transient}


def absorption_analysis(spec: "RdsSpec") -> Dict[RootIndex, Tuple[Fraction, ...]]:
    """Probability of being absorbed into each component, from every index of Z/(p-1).

    Z/(p-1) splits as Z/((p-1)/q) x Z/q. Every s_j permutes the Z/q part and
    the other part reaches 0 with probability 1, so an index a is absorbed into
    the component holding the attractor index congruent to a mod q. These 0/1
    rows are checked against the first-step linear system when there are at
    most CROSS_CHECK_STATES transient indices.

    Raises:
        InternalInconsistency: the linear system disagrees with the 0/1 rows
        SizeLimitExceeded: p - 1 above MAX_EXACT_STATES
    """
    n = max(spec.p - 1, 1)
    _check_size(n, "Z/(p-1)")
    q = attractor_order(spec.p, spec.exponents).q
    components = invariant_decomposition(spec.p, spec.exponents)
    component_of = {r.a: c for c, component in enumerate(components) for r in component}
    by_residue = {a % q: c for a, c in component_of.items()}
    n_comp = len(components)

    rows = {a: tuple(Fraction(int(k == by_residue[a % q])) for k in range(n_comp)) for a in range(n)}
    transient = [a for a in range(n) if a not in component_of]
    if transient and len(transient) <= CROSS_CHECK_STATES:
        solved = _solve_absorption(spec, transient, component_of, n_comp)
        wrong = [a for a in transient if solved[a] != rows[a]]
        if wrong:
            a = wrong[0]
            raise InternalInconsistency(f"absorption from {a}: linear system gives {[str(x) for x in solved[a]]}, "
                                        f"residue mod {q} gives {[str(x) for x in rows[a]]}")
    logger.debug(f"absorption from {len(transient)} transient indices into {n_comp} components")
    return {RootIndex(a, spec.p): row for a, row in rows.items()}


@dataclass(frozen=True)
class ErgodicMeasure:
    component: Component
    distribution: Dict[RootIndex, Fraction]

    @property
    def label(self) -> str:
        if len(self.component) == 1:
            return f"dirac at {self.component[0]}"
        return f"uniform on {len(self.component)} roots"


def ergodic_measures(report: "AttractorReport") -> List[ErgodicMeasure]:
    """The ergodic invariant measures on the attractor, one per component.

    Every invariant measure of the chain is a convex combination of these.
    """
    return [ErgodicMeasure(c, d) for c, d in zip(report.components, report.stationary)]
