"""
Exact analysis of the monomial RDS in index space.

On the unit sphere every state is a root of unity xi^a up to a small error,
and x -> x^s acts on indices as a -> a*s mod (p-1). All computations here are
on plain integers in Z/(p-1); the lift homomorphism of the unity module ties
the results back to PadicInt dynamics (see verify_index_dynamics).
"""
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import (TYPE_CHECKING, Dict, FrozenSet, Iterable, List, Optional,
                    Sequence, Tuple)

import networkx as nx
from sympy import factorint, n_order, totient

from . import rds_logging as logging
from .errors import InternalInconsistency, NotAUnitModQ, NotInvariant
from .padic import check_modulus, power
from .unity import (FixedPointKind, RootIndex, UnityTable,
                    classify_fixed_points, primitive_root, unity_table)
from .utils.otel_wrapper import trace_function

if TYPE_CHECKING:
    from .config import RdsSpec

logger = logging.getLogger(__name__)

Component = Tuple[RootIndex, ...]

ISOMETRIC_LABEL = "sphere dynamics are isometric; no attraction claim"
ATTRACTING_LABEL = "attracting: every orbit on the sphere converges to the attractor"


def _order(p: int) -> int:
    return max(p - 1, 1)


def _check_exponents(exponents: Sequence[int]) -> Tuple[int, ...]:
    exponents = tuple(int(s) for s in exponents)
    if not exponents:
        raise ValueError("at least one exponent is required")
    if any(s < 2 for s in exponents):
        raise ValueError(f"exponents must be >= 2, got {list(exponents)}")
    return exponents


@dataclass(frozen=True)
class AttractorOrder:
    """q with the factorization of p-1 it was derived from."""
    p: int
    exponents: Tuple[int, ...]
    q: int
    factorization: Dict[int, int]
    stripped: Tuple[int, ...]

    @property
    def zeta_index(self) -> int:
        """(p-1)/q, the index of the generator zeta of the attractor."""
        return _order(self.p) // self.q

    def trace(self) -> str:
        parts = " * ".join(f"{r}^{e}" if e > 1 else str(r) for r, e in sorted(self.factorization.items())) or "1"
        stripped = ",".join(str(r) for r in self.stripped) or "none"
        return f"p-1 = {_order(self.p)} = {parts}; strip {stripped}; q = {self.q}"


def attractor_order(p: int, exponents: Sequence[int]) -> AttractorOrder:
    """Greatest divisor q of p-1 coprime to every exponent.

    Every prime factor of p-1 that divides some s_j is removed with its full
    multiplicity.
    """
    check_modulus(p)
    exponents = _check_exponents(exponents)
    factorization = {int(r): int(e) for r, e in factorint(_order(p)).items()}
    stripped = tuple(sorted(r for r in factorization if any(s % r == 0 for s in exponents)))
    q = 1
    for r, e in factorization.items():
        if r not in stripped:
            q *= r ** e
    result = AttractorOrder(p, exponents, q, factorization, stripped)
    logger.debug(result.trace())
    return result


def _composed_power_image(p: int, exponents: Tuple[int, ...]) -> FrozenSet[int]:
    """Image of Gamma_p under f_{s_1}^{p-1} o ... o f_{s_m}^{p-1}, by brute force."""
    n = _order(p)
    image = set(range(n))
    for s in reversed(exponents):
        multiplier = pow(s, p - 1, n) if n > 1 else 0
        image = {a * multiplier % n for a in image}
    return frozenset(image)


def attractor_set(p: int, exponents: Sequence[int]) -> FrozenSet[RootIndex]:
    """I_s as root indices: the multiples of (p-1)/q.

    Raises:
        InternalInconsistency: when the literal composed-power image disagrees
    """
    order = attractor_order(p, exponents)
    step = order.zeta_index
    attractor = frozenset(RootIndex(a, p) for a in range(0, _order(p), step))
    literal = _composed_power_image(p, order.exponents)
    if {r.a for r in attractor} != literal:
        raise InternalInconsistency(f"attractor of {order.exponents} mod {p}: multiples of {step} "
                                    f"disagree with the composed-power image {sorted(literal)}")
    return attractor


def index_graph(p: int, exponents: Sequence[int], nodes: Optional[Iterable[int]] = None) -> nx.DiGraph:
    """Directed graph of a -> a*s_j mod (p-1); edges carry the exponent positions that realize them."""
    n = _order(p)
    exponents = _check_exponents(exponents)
    graph = nx.DiGraph()
    nodes = range(n) if nodes is None else list(nodes)
    graph.add_nodes_from(nodes)
    for a in nodes:
        for j, s in enumerate(exponents):
            b = a * s % n
            if graph.has_edge(a, b):
                graph[a][b]["maps"].append(j)
            else:
                graph.add_edge(a, b, maps=[j])
    return graph


def _sorted_components(groups: Iterable[Iterable[int]], p: int) -> Tuple[Component, ...]:
    components = [tuple(RootIndex(a, p) for a in sorted(group)) for group in groups]
    return tuple(sorted(components, key=lambda c: c[0].a))


def invariant_decomposition(p: int, exponents: Sequence[int]) -> Tuple[Component, ...]:
    """Partition of the attractor into s-invariant subsets, ordered by smallest index.

    The components are the strongly connected classes of the transition graph
    restricted to the attractor; each map acts there as a permutation.
    """
    attractor = attractor_set(p, exponents)
    graph = index_graph(p, exponents, nodes=sorted(r.a for r in attractor))
    components = _sorted_components(nx.strongly_connected_components(graph), p)
    logger.debug(f"{len(components)} invariant components for p={p}, s={tuple(exponents)}")
    return components


@dataclass(frozen=True)
class SingleMapOrbits:
    exponent: int
    q: int
    order_mod_q: int
    cycles: Tuple[Component, ...]


def single_map_orbits(p: int, exponents: Sequence[int], j: int) -> SingleMapOrbits:
    """Cycle decomposition of f_{s_j} on the attractor; j is 1-based.

    Cycles are listed in traversal order from their smallest index.
    """
    exponents = _check_exponents(exponents)
    if not 1 <= j <= len(exponents):
        raise ValueError(f"j must lie in [1, {len(exponents)}], got {j}")
    s = exponents[j - 1]
    q = attractor_order(p, exponents).q
    n = _order(p)
    seen = set()
    cycles = []
    for root in sorted(attractor_set(p, exponents)):
        if root.a in seen:
            continue
        cycle = []
        a = root.a
        while a not in seen:
            seen.add(a)
            cycle.append(RootIndex(a, p))
            a = a * s % n
        cycles.append(tuple(cycle))
    order_mod_q = 1 if q == 1 else int(n_order(s % q, q))
    return SingleMapOrbits(s, q, order_mod_q, tuple(cycles))


@dataclass(frozen=True)
class OrbitLengthCertificate:
    """d_a, the orbit length of a under b -> b*s mod q, divides q_a = phi(q/(a,q))."""
    q: int
    a: int
    s: int
    d_a: int
    modulus: int
    q_a: int

    @property
    def holds(self) -> bool:
        return self.q_a % self.d_a == 0


def orbit_length_bound(q: int, a: int, s: int) -> OrbitLengthCertificate:
    if q < 1:
        raise ValueError(f"q must be >= 1, got {q}")
    if gcd(s, q) != 1:
        raise NotAUnitModQ(f"s={s} is not invertible modulo q={q}")
    start = a % q
    d_a = 1
    b = start * s % q
    while b != start:
        b = b * s % q
        d_a += 1
    modulus = q // gcd(start, q)
    certificate = OrbitLengthCertificate(q, a, s, d_a, modulus, int(totient(modulus)))
    if not certificate.holds:
        raise InternalInconsistency(f"orbit length {d_a} of {a} under *{s} mod {q} "
                                    f"does not divide phi({modulus}) = {certificate.q_a}")
    return certificate


def reachable_from(p: int, exponents: Sequence[int], a: int) -> FrozenSet[RootIndex]:
    """Forward set O_s(xi^a) = {a * s_1^{k_1} ... s_m^{k_m}}, a included."""
    graph = index_graph(p, exponents)
    a = int(a) % _order(p)
    return frozenset(RootIndex(b, p) for b in nx.descendants(graph, a) | {a})


def reaching(p: int, exponents: Sequence[int], a: int) -> FrozenSet[RootIndex]:
    """Backward set O_s^-(xi^a): every index whose forward set contains a."""
    graph = index_graph(p, exponents)
    a = int(a) % _order(p)
    return frozenset(RootIndex(b, p) for b in nx.ancestors(graph, a) | {a})


def is_invariant(p: int, exponents: Sequence[int], target: Iterable) -> bool:
    """f_{s_j}(A) = A for every exponent (the finite-case definition)."""
    n = _order(p)
    indices = {int(t) % n for t in target}
    return all({a * s % n for a in indices} == indices for s in _check_exponents(exponents))


def basin(p: int, exponents: Sequence[int], target: Iterable) -> FrozenSet[RootIndex]:
    """All indices from which the target is reached with positive probability.

    Raises:
        NotInvariant: when the target is not s-invariant
    """
    target = [int(t) % _order(p) for t in target]
    if not target or not is_invariant(p, exponents, target):
        raise NotInvariant(f"{sorted(target)} is not invariant under every map of {tuple(exponents)} mod {p}")
    graph = index_graph(p, exponents)
    result = set(target)
    for a in target:
        result |= nx.ancestors(graph, a)
    return frozenset(RootIndex(b, p) for b in result)


@dataclass(frozen=True)
class GrowthStep:
    exponents: Tuple[int, ...]
    q: int
    component_sizes: Tuple[int, ...]

    @property
    def n_components(self) -> int:
        return len(self.component_sizes)


def growth_profile(p: int, exponents: Sequence[int]) -> List[GrowthStep]:
    """q and the component sizes for every prefix s_1..s_k of the exponent list.

    Each added exponent can only shrink the attractor and merge components.
    """
    exponents = _check_exponents(exponents)
    profile = []
    for k in range(1, len(exponents) + 1):
        prefix = exponents[:k]
        components = invariant_decomposition(p, prefix)
        profile.append(GrowthStep(prefix, attractor_order(p, prefix).q, tuple(len(c) for c in components)))
    return profile


def verify_index_dynamics(spec: "RdsSpec", table: Optional[UnityTable] = None,
                          indices: Optional[Iterable] = None) -> int:
    """Check pow(lift(a), s_j) == lift(a * s_j) for every given index and exponent.

    Defaults to the attractor indices. Returns the number of checks made.

    Raises:
        InternalInconsistency: on the first mismatch
    """
    table = table or unity_table(spec.p, spec.precision)
    if indices is None:
        indices = attractor_set(spec.p, spec.exponents)
    checks = 0
    for a in indices:
        root = RootIndex.of(int(a), spec.p)
        for s in spec.exponents:
            if power(table.lift(root), s) != table.lift(root * s):
                raise InternalInconsistency(f"lift({root})^{s} != lift({root * s}) at p={spec.p}, K={spec.precision}")
            checks += 1
    return checks


def _fraction_text(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


@dataclass
class AttractorReport:
    """Everything the exact analysis knows about one RdsSpec."""
    spec: "RdsSpec"
    order: AttractorOrder
    primitive_root: int
    xi_text: str
    attractor: Tuple[RootIndex, ...]
    components: Tuple[Component, ...]
    stationary: Tuple[Dict[RootIndex, Fraction], ...]
    transient_absorption: Dict[RootIndex, Tuple[Fraction, ...]]
    classification: Dict[int, FixedPointKind]
    attraction: str
    growth: List[GrowthStep] = field(default_factory=list)

    @property
    def q(self) -> int:
        return self.order.q

    @property
    def zeta_index(self) -> int:
        return self.order.zeta_index

    def component_of(self, index) -> int:
        """Position of the component containing the index."""
        a = int(index)
        for i, component in enumerate(self.components):
            if any(r.a == a for r in component):
                return i
        raise ValueError(f"index {a} is not in the attractor")

    def to_json_dict(self) -> Dict:
        spec = self.spec
        return {
            "p": spec.p,
            "exponents": list(spec.exponents),
            "probabilities": [_fraction_text(q) for q in spec.probabilities],
            "precision": spec.precision,
            "primitive_root": self.primitive_root,
            "xi": self.xi_text,
            "q": self.q,
            "zeta_index": self.zeta_index,
            "factorization": self.order.trace(),
            "attraction": self.attraction,
            "classification": {str(s): kind.value for s, kind in self.classification.items()},
            "attractor": [r.a for r in self.attractor],
            "components": [[r.a for r in c] for c in self.components],
            "stationary": [[_fraction_text(dist[r]) for r in c]
                           for c, dist in zip(self.components, self.stationary)],
            "transient_absorption": {str(r.a): [_fraction_text(x) for x in probs]
                                     for r, probs in sorted(self.transient_absorption.items())},
            "growth_profile": [{"exponents": list(g.exponents), "q": g.q,
                                "component_sizes": list(g.component_sizes)} for g in self.growth],
        }


@trace_function
def analyze(spec: "RdsSpec") -> AttractorReport:
    """Run the full exact analysis of a spec."""
    from .chain import absorption_analysis, stationary_distributions, transition_matrix

    p, exponents = spec.p, spec.exponents
    order = attractor_order(p, exponents)
    attractor = tuple(sorted(attractor_set(p, exponents)))
    components = invariant_decomposition(p, exponents)
    matrix = transition_matrix(spec)
    stationary = stationary_distributions(matrix, components)
    absorption = absorption_analysis(spec)
    transient = {r: probs for r, probs in absorption.items() if r not in set(attractor)}
    classification = {s: classify_fixed_points(p, s) for s in exponents}
    attraction = ATTRACTING_LABEL if spec.has_attracting_exponent else ISOMETRIC_LABEL
    table = unity_table(p, spec.precision)
    report = AttractorReport(spec=spec, order=order, primitive_root=primitive_root(p),
                             xi_text=table.xi.to_text(), attractor=attractor, components=components,
                             stationary=stationary, transient_absorption=transient,
                             classification=classification, attraction=attraction,
                             growth=growth_profile(p, exponents))
    logger.info(f"p={p} s={exponents}: q={order.q}, {len(components)} components, "
                f"{len(transient)} transient indices")
    return report
