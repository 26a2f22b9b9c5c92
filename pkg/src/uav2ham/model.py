"""Value types and pure predicates for 2HAM semantics.

Tiles are non-rotating unit squares with a glue label (or None) on each
edge.  A configuration is a finite placement of tile types on the integer
grid; an assembly is its translation class, represented by the origin
configuration (bounding-box corner at (0, 0)).  Stability at temperature
tau means the weighted bond graph is connected and every edge cut weighs
at least tau.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Optional

import networkx as nx

Cell = tuple[int, int]
Offset = tuple[int, int]

NORTH: Offset = (0, 1)
EAST: Offset = (1, 0)
SOUTH: Offset = (0, -1)
WEST: Offset = (-1, 0)

#: Scan order used everywhere a deterministic direction order is needed.
DIRECTIONS: tuple[Offset, ...] = (NORTH, EAST, SOUTH, WEST)

_OPPOSITE = {NORTH: SOUTH, SOUTH: NORTH, EAST: WEST, WEST: EAST}
_SIDE_NAME = {NORTH: "north", EAST: "east", SOUTH: "south", WEST: "west"}


def opposite(direction: Offset) -> Offset:
    return _OPPOSITE[direction]


class InputError(ValueError):
    """Malformed or contract-violating input (CLI exit code 3)."""


class InternalConsistencyError(RuntimeError):
    """A soundness invariant failed inside an algorithm (CLI exit code 4)."""


class InconclusiveError(RuntimeError):
    """A capped search ran out of budget before reaching a verdict."""


class GlueTable:
    """Symmetric strength function over glue labels.

    The null glue is represented by ``None`` and has strength 0 against
    everything.  In diagonal mode (the default for generated systems) only
    identical labels bind; arbitrary symmetric pairs are accepted because
    the model defines strength over pairs.
    """

    def __init__(self, strengths: Mapping[tuple[str, str], int],
                 labels: Optional[Iterable[str]] = None) -> None:
        self._strength: dict[tuple[str, str], int] = {}
        label_set = set(labels) if labels is not None else set()
        for (g1, g2), s in strengths.items():
            if s < 0:
                raise InputError(f"negative strength for glue pair ({g1!r}, {g2!r})")
            label_set.add(g1)
            label_set.add(g2)
            if s > 0:
                key = (g1, g2) if g1 <= g2 else (g2, g1)
                prev = self._strength.get(key)
                if prev is not None and prev != s:
                    raise InputError(f"conflicting strengths for glue pair {key}")
                self._strength[key] = s
        self.labels: frozenset[str] = frozenset(label_set)

    @classmethod
    def diagonal(cls, strengths: Mapping[str, int]) -> "GlueTable":
        """Table where each label binds only to itself."""
        return cls({(g, g): s for g, s in strengths.items()}, labels=strengths)

    def strength(self, g1: Optional[str], g2: Optional[str]) -> int:
        """Symmetric strength; 0 for the null glue or unlisted pairs."""
        if g1 is None or g2 is None:
            return 0
        if g1 not in self.labels:
            raise InputError(f"unknown glue label {g1!r}")
        if g2 not in self.labels:
            raise InputError(f"unknown glue label {g2!r}")
        key = (g1, g2) if g1 <= g2 else (g2, g1)
        return self._strength.get(key, 0)

    def positive_pairs(self) -> Iterator[tuple[str, str, int]]:
        for (g1, g2), s in sorted(self._strength.items()):
            yield g1, g2, s

    def is_diagonal(self) -> bool:
        return all(g1 == g2 for (g1, g2) in self._strength)


@dataclass(frozen=True)
class TileType:
    """Non-rotating unit square with a glue label per edge (None = null)."""

    name: str
    north: Optional[str] = None
    east: Optional[str] = None
    south: Optional[str] = None
    west: Optional[str] = None

    def glue(self, direction: Offset) -> Optional[str]:
        return getattr(self, _SIDE_NAME[direction])

    def sides(self) -> Iterator[tuple[Offset, Optional[str]]]:
        for d in DIRECTIONS:
            yield d, self.glue(d)


Configuration = dict[Cell, TileType]


@dataclass(frozen=True)
class TileSystem:
    """A 2HAM system: glue table, tile type set, temperature."""

    glues: GlueTable
    tiles: tuple[TileType, ...]
    temperature: int

    def __post_init__(self) -> None:
        if self.temperature < 1:
            raise InputError("temperature must be a positive integer")
        if not self.tiles:
            raise InputError("tile set must be non-empty")
        seen: set[str] = set()
        for t in self.tiles:
            if t.name in seen:
                raise InputError(f"duplicate tile name {t.name!r}")
            seen.add(t.name)
            for _, g in t.sides():
                if g is not None and g not in self.glues.labels:
                    raise InputError(f"tile {t.name!r} references unknown glue {g!r}")

    def tile(self, name: str) -> TileType:
        for t in self.tiles:
            if t.name == name:
                return t
        raise InputError(f"unknown tile name {name!r}")


class Assembly:
    """Translation class of a configuration, anchored at the origin.

    Equality and hashing use the canonical key: the sorted (x, y, tile
    name) triples of the origin configuration.
    """

    __slots__ = ("cells", "key", "_hash", "_open_sides")

    def __init__(self, cells: Configuration, _canonical: bool = False) -> None:
        if not cells:
            raise InputError("assembly must contain at least one tile")
        if not _canonical:
            minx = min(x for x, _ in cells)
            miny = min(y for _, y in cells)
            if minx or miny:
                cells = {(x - minx, y - miny): t for (x, y), t in cells.items()}
        self.cells: Configuration = cells
        self.key: tuple[tuple[int, int, str], ...] = tuple(
            sorted((x, y, t.name) for (x, y), t in cells.items()))
        self._hash = hash(self.key)
        self._open_sides: Optional[tuple[tuple[Cell, Offset, str], ...]] = None

    @property
    def size(self) -> int:
        return len(self.cells)

    @property
    def width(self) -> int:
        return 1 + max(x for x, _ in self.cells)

    @property
    def height(self) -> int:
        return 1 + max(y for _, y in self.cells)

    def tile_names(self) -> set[str]:
        return {t.name for t in self.cells.values()}

    def open_sides(self) -> tuple[tuple[Cell, Offset, str], ...]:
        """Non-null glue sides whose facing cell is empty, in scan order."""
        if self._open_sides is None:
            out = []
            for cell in sorted(self.cells):
                tile = self.cells[cell]
                for d in DIRECTIONS:
                    g = tile.glue(d)
                    if g is None:
                        continue
                    nbr = (cell[0] + d[0], cell[1] + d[1])
                    if nbr not in self.cells:
                        out.append((cell, d, g))
            self._open_sides = tuple(out)
        return self._open_sides

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Assembly) and self.key == other.key

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: "Assembly") -> bool:
        return self.key < other.key

    def __repr__(self) -> str:
        return f"Assembly({self.size} tiles, key={self.key[:3]}...)"


def canonicalize(config: Configuration) -> Assembly:
    """Translate so the bounding-box corner sits at the origin."""
    if not config:
        raise InputError("cannot canonicalize an empty configuration")
    return Assembly(dict(config))


@dataclass(frozen=True)
class BondGraph:
    """Weighted grid graph over the occupied cells of a configuration."""

    nodes: tuple[Cell, ...]
    edges: tuple[tuple[Cell, Cell, int], ...]

    def adjacency(self) -> dict[Cell, list[tuple[Cell, int]]]:
        adj: dict[Cell, list[tuple[Cell, int]]] = {c: [] for c in self.nodes}
        for a, b, w in self.edges:
            adj[a].append((b, w))
            adj[b].append((a, w))
        return adj


def bond_graph(config: Configuration, glues: GlueTable) -> BondGraph:
    """One vertex per occupied cell; edges where facing glues bind."""
    nodes = tuple(sorted(config))
    edges = []
    for cell in nodes:
        tile = config[cell]
        for d in (NORTH, EAST):  # each unordered adjacent pair once
            nbr = (cell[0] + d[0], cell[1] + d[1])
            other = config.get(nbr)
            if other is None:
                continue
            w = glues.strength(tile.glue(d), other.glue(opposite(d)))
            if w > 0:
                edges.append((cell, nbr, w))
    return BondGraph(nodes, tuple(edges))


def _connected(nodes: tuple[Cell, ...], adj: dict[Cell, list[tuple[Cell, int]]]) -> bool:
    if not nodes:
        return False
    seen = {nodes[0]}
    stack = [nodes[0]]
    while stack:
        for nbr, _ in adj[stack.pop()]:
            if nbr not in seen:
                seen.add(nbr)
                stack.append(nbr)
    return len(seen) == len(nodes)


def _has_weak_bridge(graph: BondGraph, tau: int) -> bool:
    """True iff some single edge of weight < tau disconnects the graph."""
    adj = graph.adjacency()
    index = {c: i for i, c in enumerate(graph.nodes)}
    low = [0] * len(graph.nodes)
    disc = [-1] * len(graph.nodes)
    timer = 0
    # Iterative Tarjan bridge finding; parallel grid edges cannot occur.
    for root in range(len(graph.nodes)):
        if disc[root] != -1:
            continue
        stack: list[tuple[int, int, Iterator]] = [
            (root, -1, iter(adj[graph.nodes[root]]))]
        disc[root] = low[root] = timer
        timer += 1
        while stack:
            u, parent, it = stack[-1]
            advanced = False
            for nbr, w in it:
                v = index[nbr]
                if disc[v] == -1:
                    disc[v] = low[v] = timer
                    timer += 1
                    stack.append((v, u, iter(adj[nbr])))
                    advanced = True
                    break
                elif v != parent:
                    low[u] = min(low[u], disc[v])
            if not advanced:
                stack.pop()
                if parent != -1:
                    low[parent] = min(low[parent], low[u])
                    if low[u] > disc[parent]:
                        # (parent, u) is a bridge; find its weight
                        pu = graph.nodes[parent]
                        uu = graph.nodes[u]
                        for nbr, w in adj[pu]:
                            if nbr == uu and w < tau:
                                return True
    return False


def min_cut_weight(graph: BondGraph) -> Optional[int]:
    """Exact global minimum edge-cut weight; None for single-vertex graphs."""
    if len(graph.nodes) < 2:
        return None
    g = nx.Graph()
    g.add_nodes_from(graph.nodes)
    for a, b, w in graph.edges:
        g.add_edge(a, b, weight=w)
    if not nx.is_connected(g):
        return 0
    value, _ = nx.stoer_wagner(g, weight="weight")
    return value


def is_tau_stable(config: Configuration, glues: GlueTable, tau: int) -> bool:
    """Connected bond graph with every edge cut weighing at least tau.

    Singletons are stable.  tau = 1 reduces to connectivity and tau = 2 to
    a weight-1-bridge check; larger temperatures run an exact global
    min-cut.
    """
    if not config:
        raise InputError("stability is undefined for empty configurations")
    if len(config) == 1:
        return True
    graph = bond_graph(config, glues)
    if not _connected(graph.nodes, graph.adjacency()):
        return False
    if tau == 1:
        return True
    if tau == 2:
        return not _has_weak_bridge(graph, tau)
    # Cheap upper bound: the cut isolating one tile.
    incident: dict[Cell, int] = {c: 0 for c in graph.nodes}
    for a, b, w in graph.edges:
        incident[a] += w
        incident[b] += w
    if min(incident.values()) < tau:
        return False
    cut = min_cut_weight(graph)
    return cut is None or cut >= tau


def interface_strength(a_cells: Configuration, b_cells: Configuration,
                       glues: GlueTable) -> int:
    """Total bond strength across facing cell pairs of two configurations."""
    total = 0
    for cell, tile in a_cells.items():
        for d in DIRECTIONS:
            nbr = (cell[0] + d[0], cell[1] + d[1])
            other = b_cells.get(nbr)
            if other is not None:
                total += glues.strength(tile.glue(d), other.glue(opposite(d)))
    return total


def combine(a: Assembly, b: Assembly, offset: Offset, glues: GlueTable,
            tau: int) -> Optional[Assembly]:
    """Attach b at `offset` relative to a's origin configuration.

    Both inputs must be tau-stable (the producibles this is called on
    always are); under that precondition the union is tau-stable iff the
    interface strength reaches tau.  Returns None on overlap or
    insufficient strength.
    """
    dx, dy = offset
    shifted = {(x + dx, y + dy): t for (x, y), t in b.cells.items()}
    for cell in shifted:
        if cell in a.cells:
            return None  # geometric blocking
    if interface_strength(a.cells, shifted, glues) < tau:
        return None
    union = dict(a.cells)
    union.update(shifted)
    return Assembly(union)


def is_subassembly(a: Assembly, b: Assembly) -> bool:
    """True iff some translate of a is contained cell-by-cell in b."""
    if a.size > b.size:
        return False
    acells = a.key
    ax, ay, aname = acells[0]
    for (bx, by, bname) in b.key:
        if bname != aname:
            continue
        dx, dy = bx - ax, by - ay
        if all(b.cells.get((x + dx, y + dy)) is not None
               and b.cells[(x + dx, y + dy)].name == name
               for x, y, name in acells):
            return True
    return False


def is_tree_bonded(a: Assembly, glues: GlueTable) -> bool:
    """Connected and acyclic bond graph (edge count = tile count - 1)."""
    graph = bond_graph(a.cells, glues)
    if not _connected(graph.nodes, graph.adjacency()):
        return False
    return len(graph.edges) == len(graph.nodes) - 1


def singleton(tile: TileType) -> Assembly:
    return Assembly({(0, 0): tile})
