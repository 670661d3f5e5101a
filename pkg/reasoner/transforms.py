"""
Model transformations used to harden countermodels.

Forward unravelling turns a finite model into a forest of element
sequences, loosening folds that forest back into a finite model without
short anonymous cycles, and duplication adds copies of elements until
cardinality constraints hold again.
"""

import logging
import math
from collections import Counter, deque
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

from models.errors import ResourceExceeded
from models.interpretation import Interpretation
from models.knowledge_base import Erc

logger = logging.getLogger(__name__)

Path = Tuple[int, ...]

DEFAULT_ELEMENT_CAP = 20000


def _blocker(u: Path, k: int) -> Optional[Path]:
    """Longest proper prefix of u blocking it: same length-k suffix, more than k elements shorter."""
    for j in range(len(u) - k - 1, k - 1, -1):
        if u[j - k:j] == u[-k:]:
            return u[:j]
    return None


def _unfold(interp: Interpretation, depth: Optional[int], k: Optional[int], cap: int) -> Interpretation:
    named = interp.named
    roles = sorted(interp.roles)
    successors: Dict[int, List[int]] = {
        d: sorted({e for r in roles for e in interp.successors(d, r)}) for d in interp.domain
    }
    index: Dict[Path, int] = {}
    order: List[Path] = []

    def add(u: Path) -> int:
        if len(index) >= cap:
            raise ResourceExceeded(f"unravelling exceeds {cap} elements", cap="max_model_size")
        index[u] = len(order)
        order.append(u)
        return index[u]

    queue = deque()
    for d in sorted(interp.domain):
        add((d,))
        queue.append((d,))

    edges: Dict[str, List[Tuple[int, int]]] = {r: [] for r in roles}
    for r in roles:
        for a, b in sorted(interp.role(r)):
            if a in named and b in named:
                edges[r].append((index[(a,)], index[(b,)]))

    while queue:
        w = queue.popleft()
        if depth is not None and len(w) >= depth:
            continue
        last = w[-1]
        for d in successors[last]:
            if len(w) == 1 and last in named and d in named:
                continue
            child = w + (d,)
            blocker = _blocker(child, k) if k is not None else None
            if blocker is None:
                add(child)
                queue.append(child)
                target = index[child]
            else:
                target = index[blocker]
            for r in roles:
                if d in interp.successors(last, r):
                    edges[r].append((index[w], target))

    concepts = {
        name: [i for i, u in enumerate(order) if u[-1] in ext] for name, ext in interp.concepts.items()
    }
    labels = {i: ".".join(interp.label(d) for d in u) for i, u in enumerate(order)}
    return Interpretation.build(
        domain=range(len(order)),
        concepts=concepts,
        roles=edges,
        individuals={a: index[(d,)] for a, d in interp.individuals.items()},
        labels=labels,
        origin={i: u[-1] for i, u in enumerate(order)},
    )


def unravel(interp: Interpretation, depth: int, cap: int = DEFAULT_ELEMENT_CAP) -> Interpretation:
    """
    Forward unravelling cut at sequences of the given length.

    origin maps every sequence to its last element. Sequences shorter than
    depth keep all successors of their last element; sequences of length
    depth have none.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    return _unfold(interp, depth, None, cap)


def k_loosening(interp: Interpretation, k: int, cap: int = DEFAULT_ELEMENT_CAP) -> Interpretation:
    """
    Finite unravelling in which a blocked sequence is identified with its blocker.

    Sequences are expanded breadth first; an edge into a blocked sequence is
    redirected to the prefix blocking it and the sequence is dropped.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    loose = _unfold(interp, None, k, cap)
    logger.debug(f"{k}-loosening of {interp.size} elements has {loose.size}")
    return loose


def s_duplicate(interp: Interpretation, copies: Iterable[Tuple[int, int]]) -> Interpretation:
    """Add copies of elements with the same concept names and the same outgoing edges."""
    copies = list(copies)
    members = set(interp.domain)
    for element, count in copies:
        if element not in members:
            raise ValueError(f"element {element} is not in the domain")
        if count < 1:
            raise ValueError(f"copy count must be positive, got {count}")

    domain = list(interp.domain)
    labels = {d: interp.label(d) for d in interp.domain}
    origin = {d: interp.origin.get(d, d) for d in interp.domain}
    concepts = {name: set(ext) for name, ext in interp.concepts.items()}
    roles = {name: set(pairs) for name, pairs in interp.roles.items()}
    next_id = max(domain, default=-1) + 1
    for element, count in copies:
        for i in range(1, count + 1):
            fresh = next_id
            next_id += 1
            domain.append(fresh)
            labels[fresh] = f"{interp.label(element)}~{i}"
            origin[fresh] = origin[element]
            for ext in concepts.values():
                if element in ext:
                    ext.add(fresh)
            for name, pairs in roles.items():
                pairs.update((fresh, target) for target in interp.successors(element, name))
    return Interpretation.build(
        domain=domain,
        concepts=concepts,
        roles=roles,
        individuals=interp.individuals,
        labels=labels,
        origin=origin,
    )


def type_counts(interp: Interpretation, names: Optional[Sequence[str]] = None) -> Dict[FrozenSet[str], int]:
    """Number of elements per set of concept names."""
    names = sorted(interp.concepts) if names is None else sorted(names)
    return dict(Counter(_type_of(interp, d, names) for d in interp.domain))


def _type_of(interp: Interpretation, element: int, names: Sequence[str]) -> FrozenSet[str]:
    return frozenset(n for n in names if element in interp.extension(n))


def repair_ercbox(
    loose: Interpretation,
    erc: Optional[Erc],
    base_counts: Dict[FrozenSet[str], int],
) -> List[Tuple[int, int]]:
    """
    Copies to add to a loosened model so that it has the type counts of the
    original model scaled by one plus its size.

    Scaling preserves every semi-restricted constraint, so the duplicated
    model satisfies whatever ERCBox the original did.
    """
    if erc is None:
        return []
    names = sorted({n for t in base_counts for n in t} | set(loose.concepts))
    factor = 1 + loose.size
    current = type_counts(loose, names)
    plan: List[Tuple[int, int]] = []
    for t in sorted(base_counts, key=sorted):
        wanted = factor * base_counts[t]
        if wanted == 0:
            continue
        holders = [d for d in loose.domain if _type_of(loose, d, names) == t]
        if not holders:
            raise ValueError(f"type {sorted(t)} is not realized in the loosened model")
        anonymous = [d for d in holders if d not in loose.named]
        representative = (anonymous or holders)[0]
        missing = wanted - current.get(t, 0)
        if missing > 0:
            plan.append((representative, missing))
    return plan


def role_graph(interp: Interpretation) -> nx.DiGraph:
    graph = nx.DiGraph()
    graph.add_nodes_from(interp.domain)
    for pairs in interp.roles.values():
        graph.add_edges_from(pairs)
    return graph


def girth(interp: Interpretation) -> float:
    """Length of the shortest directed cycle through an unnamed element; inf when none."""
    graph = role_graph(interp)
    best = math.inf
    for node in interp.domain:
        if node in interp.named:
            continue
        if graph.has_edge(node, node):
            return 1
        distances = nx.single_source_shortest_path_length(graph, node)
        for predecessor in graph.predecessors(node):
            if predecessor in distances:
                best = min(best, distances[predecessor] + 1)
    return best


def _neighbour_signature(interp: Interpretation, element: int, names: Sequence[str]) -> Counter:
    roles = sorted(interp.roles)
    signature: Counter = Counter()
    neighbours = {e for r in roles for e in interp.successors(element, r)}
    for e in neighbours:
        linked = frozenset(r for r in roles if e in interp.successors(element, r))
        signature[(_type_of(interp, e, names), linked)] += 1
    return signature


def fb_bisimilar(first: Interpretation, d: int, second: Interpretation, e: int) -> bool:
    """
    Whether d and e agree on concept names and their successors can be
    matched one to one, preserving concept names and the roles linking them.
    """
    names = sorted(set(first.concepts) | set(second.concepts))
    if _type_of(first, d, names) != _type_of(second, e, names):
        return False
    return _neighbour_signature(first, d, names) == _neighbour_signature(second, e, names)
