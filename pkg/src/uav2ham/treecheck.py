"""Polynomial UAV algorithms for tree-bonded targets.

Three layers: a noncooperative gate (filter sub-threshold glues, decide
the resulting temperature-1 system), a temperature-2 check that scans
pairs of binding sites between the target and a translate of itself for
a non-self-intersecting loop, and a variable-temperature generalization
that maximizes total binding strength over nested loop decompositions
with a memo table.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

from .model import (Assembly, Cell, DIRECTIONS, GlueTable, InputError,
                    InternalConsistencyError, Offset, TileSystem, bond_graph,
                    combine, is_subassembly, is_tree_bonded, opposite,
                    singleton)
from .oracle import (Decision, RogueWitness, Verdict, uav_oracle)

#: Targets above this size fall back to witness-free NotUnique decisions
#: when the noncooperative gate rejects for unproducibility; below it the
#: closure oracle supplies a concrete witness.
_WITNESS_SIZE_LIMIT = 64


def noncoop_transform(system: TileSystem) -> TileSystem:
    """Temperature-1 system keeping only strength->=tau pairs, at strength 1."""
    tau = system.temperature
    kept = {}
    for g1, g2, s in system.glues.positive_pairs():
        if s >= tau:
            kept[(g1, g2)] = 1
    glues = GlueTable(kept, labels=system.glues.labels)
    return TileSystem(glues=glues, tiles=system.tiles, temperature=1)


def _temp1_uav(system: TileSystem, target: Assembly,
               count_cap: int = 1_000_000) -> Decision:
    """Decide temperature-1 UAV exactly.

    When every tile type occurs exactly once in the target the decision is
    local: growth from any tile pins a unique placement, so uniqueness
    holds iff the target's bond graph is connected and every bondable
    (tile, side, tile) triple lands exactly on the target's actual
    neighbor.  Otherwise fall back to the closure oracle.
    """
    glues = system.glues
    target_names = [t.name for t in target.cells.values()]
    present = set(target_names)
    for tile in sorted(system.tiles, key=lambda t: t.name):
        if tile.name not in present:
            return Decision(Verdict.NOT_UNIQUE,
                            RogueWitness("rogue", singleton(tile)))

    graph = bond_graph(target.cells, glues)
    adj: dict[Cell, int] = {c: 0 for c in graph.nodes}
    seen = {graph.nodes[0]}
    adjacency = graph.adjacency()
    stack = [graph.nodes[0]]
    while stack:
        for nbr, _ in adjacency[stack.pop()]:
            if nbr not in seen:
                seen.add(nbr)
                stack.append(nbr)
    if len(seen) != len(graph.nodes):
        # Target unproducible noncooperatively; fetch a witness at desk
        # scale, otherwise report without one.
        if target.size <= _WITNESS_SIZE_LIMIT:
            return uav_oracle(system, target, count_cap=count_cap)
        return Decision(Verdict.NOT_UNIQUE, None,
                        {"note": "target bond graph disconnected"})

    if len(present) == target.size:
        by_name = {t.name: t for t in system.tiles}
        for cell in sorted(target.cells):
            tile = target.cells[cell]
            for d in DIRECTIONS:
                g = tile.glue(d)
                if g is None:
                    continue
                nbr = (cell[0] + d[0], cell[1] + d[1])
                neighbor = target.cells.get(nbr)
                for other in sorted(by_name):
                    cand = by_name[other]
                    if glues.strength(g, cand.glue(opposite(d))) < 1:
                        continue
                    if neighbor is None or neighbor.name != cand.name:
                        rogue = Assembly({(0, 0): tile,
                                          (d[0], d[1]): cand})
                        return Decision(
                            Verdict.NOT_UNIQUE,
                            RogueWitness("rogue", rogue, singleton(tile),
                                         singleton(cand), d))
        return Decision(Verdict.UNIQUE)

    return uav_oracle(system, target, count_cap=count_cap)


def noncoop_uav(system: TileSystem, target: Assembly) -> bool:
    """Unique assembly restricted to strength->=tau glues.

    Raises InconclusiveError if the fallback closure hits its cap (only
    possible for targets with heavily repeated tile types).
    """
    decision = _noncoop_decision(system, target)
    if decision.verdict is Verdict.INCONCLUSIVE:
        from .model import InconclusiveError
        raise InconclusiveError("noncooperative closure exceeded its cap")
    return decision.unique


def _noncoop_decision(system: TileSystem, target: Assembly) -> Decision:
    return _temp1_uav(noncoop_transform(system), target)


@dataclass(frozen=True)
class BindingSite:
    """Adjacent cross-copy cell pair with positive facing glue strength.

    p lies in the base copy, q = p + direction in the translated copy.
    """

    p: Cell
    q: Cell
    direction: Offset
    strength: int
    index: int = field(compare=False, default=-1)


class OverlapContext:
    """One translation offset of the target against itself.

    Holds the shifted copy, the ordered binding sites, the intersection
    cells, and the tree-path machinery the loop analysis needs.
    """

    def __init__(self, base: Assembly, offset: Offset, glues: GlueTable) -> None:
        self.base = base
        self.offset = offset
        self.glues = glues
        dx, dy = offset
        self.shifted: dict[Cell, object] = {
            (x + dx, y + dy): t for (x, y), t in base.cells.items()}
        self.width = base.width
        self.height = base.height
        sites = []
        for p in sorted(base.cells):
            tile = base.cells[p]
            for d in DIRECTIONS:
                q = (p[0] + d[0], p[1] + d[1])
                other = self.shifted.get(q)
                if other is None:
                    continue
                s = glues.strength(tile.glue(d), other.glue(opposite(d)))
                if s > 0:
                    sites.append(BindingSite(p, q, d, s, index=len(sites)))
        self.sites: tuple[BindingSite, ...] = tuple(sites)
        self.intersections: frozenset[Cell] = frozenset(
            set(base.cells) & set(self.shifted))
        self._adjacency: Optional[dict[Cell, list[Cell]]] = None
        self._paths: dict[tuple[Cell, Cell], tuple[Cell, ...]] = {}

    def _tree_adjacency(self) -> dict[Cell, list[Cell]]:
        if self._adjacency is None:
            graph = bond_graph(self.base.cells, self.glues)
            adj: dict[Cell, list[Cell]] = {c: [] for c in graph.nodes}
            for a, b, _ in graph.edges:
                adj[a].append(b)
                adj[b].append(a)
            self._adjacency = adj
        return self._adjacency

    def tree_path(self, a: Cell, b: Cell) -> tuple[Cell, ...]:
        """Unique bond-graph path between two cells of the base copy."""
        key = (a, b)
        cached = self._paths.get(key)
        if cached is not None:
            return cached
        adj = self._tree_adjacency()
        parent: dict[Cell, Optional[Cell]] = {a: None}
        queue = [a]
        while queue:
            nxt = []
            for u in queue:
                if u == b:
                    queue = []
                    nxt = []
                    break
                for v in adj[u]:
                    if v not in parent:
                        parent[v] = u
                        nxt.append(v)
            queue = nxt
        if b not in parent:
            raise InternalConsistencyError("tree path lookup on disconnected cells")
        path = [b]
        while path[-1] != a:
            path.append(parent[path[-1]])  # type: ignore[arg-type]
        path.reverse()
        result = tuple(path)
        self._paths[key] = result
        self._paths[(b, a)] = tuple(reversed(path))
        return result


def binding_sites(base: Assembly, offset: Offset, glues: GlueTable) -> OverlapContext:
    """Enumerate the binding sites of the target against its translate."""
    return OverlapContext(base, offset, glues)


@dataclass(frozen=True)
class Loop:
    """The closed curve through two binding sites' tree paths."""

    a: BindingSite
    b: BindingSite
    path1: tuple[Cell, ...]  # in the base copy, a.p .. b.p
    path2: tuple[Cell, ...]  # in the shifted copy (absolute), a.q .. b.q
    self_intersecting: bool


def loop_of(ctx: OverlapContext, a: BindingSite, b: BindingSite) -> Loop:
    """Tree paths between the two sites in each copy, and whether they share
    a cell (both copies in absolute coordinates)."""
    if a == b:
        raise InputError("a loop needs two distinct binding sites")
    dx, dy = ctx.offset
    path1 = ctx.tree_path(a.p, b.p)
    base_path2 = ctx.tree_path((a.q[0] - dx, a.q[1] - dy),
                               (b.q[0] - dx, b.q[1] - dy))
    path2 = tuple((x + dx, y + dy) for x, y in base_path2)
    self_intersecting = bool(set(path1) & set(path2))
    return Loop(a, b, path1, path2, self_intersecting)


def _loop_polygon_edges(loop: Loop) -> set[frozenset[Cell]]:
    """Unit edges of the closed polygon through the loop's cell centers."""
    cycle = list(loop.path1) + list(reversed(loop.path2))
    edges: set[frozenset[Cell]] = set()
    for i in range(len(cycle)):
        u = cycle[i]
        v = cycle[(i + 1) % len(cycle)]
        edges.add(frozenset((u, v)))
    return edges


def inner_sites(ctx: OverlapContext, a: BindingSite,
                b: BindingSite) -> list[BindingSite]:
    """Binding sites whose midpoint lies strictly inside the loop polygon.

    Midpoints sit at half-integer coordinates, so an axis-aligned ray from
    one never passes through a polygon vertex; crossing counts are exact
    in integer arithmetic.  Midpoints on the boundary are excluded.
    """
    loop = loop_of(ctx, a, b)
    if loop.self_intersecting:
        raise InputError("inner sites are undefined for a self-intersecting loop")
    edges = _loop_polygon_edges(loop)
    vertical_edges = []   # ((x, ylow) for edge (x, ylow)-(x, ylow+1))
    horizontal_edges = []
    for e in edges:
        (x1, y1), (x2, y2) = sorted(e)
        if x1 == x2:
            vertical_edges.append((x1, min(y1, y2)))
        else:
            horizontal_edges.append((min(x1, x2), y1))
    inner = []
    for c in ctx.sites:
        if c.index in (a.index, b.index):
            continue
        if frozenset((c.p, c.q)) in edges:
            continue  # midpoint on the boundary
        if c.direction[0] == 0:  # vertical pair: midpoint (x, ylow + 1/2)
            x = c.p[0]
            ylow = min(c.p[1], c.q[1])
            crossings = sum(1 for (ex, ey) in vertical_edges
                            if ey == ylow and ex > x)
        else:  # horizontal pair: midpoint (xlow + 1/2, y)
            y = c.p[1]
            xlow = min(c.p[0], c.q[0])
            crossings = sum(1 for (ex, ey) in horizontal_edges
                            if ex == xlow and ey > y)
        if crossings % 2 == 1:
            inner.append(c)
    return inner


_IN_PROGRESS = object()


class MaxStrTable:
    """Memo for the loop-decomposition recursion, keyed by unordered site
    pairs.  -1 marks self-intersecting loops; an in-progress marker guards
    against re-entrant probes."""

    def __init__(self) -> None:
        self._memo: dict[tuple[int, int], object] = {}

    @staticmethod
    def _key(b1: BindingSite, b2: BindingSite) -> tuple[int, int]:
        return (b1.index, b2.index) if b1.index <= b2.index else (b2.index, b1.index)

    def lookup(self, b1: BindingSite, b2: BindingSite) -> object:
        return self._memo.get(self._key(b1, b2))

    def store(self, b1: BindingSite, b2: BindingSite, value: object) -> None:
        self._memo[self._key(b1, b2)] = value

    def __len__(self) -> int:
        return sum(1 for v in self._memo.values() if v is not _IN_PROGRESS)


def max_str(ctx: OverlapContext, table: MaxStrTable, b1: BindingSite,
            b2: BindingSite, strict_paper: bool = False) -> int:
    """Maximum bond strength using b1, b2 as the outer loop; -1 if unusable.

    A self-intersecting loop is unusable.  A simple loop is worth the two
    sites' strengths.  Otherwise decompose along each inner site and keep
    the best total, counting the shared chord once.  The plain two-site
    loop stays a valid floor when chords exist (the strict_paper flag
    reproduces the published initialization of 0 instead).
    """
    if b1 == b2:
        raise InputError("max_str needs two distinct binding sites")
    cached = table.lookup(b1, b2)
    if cached is _IN_PROGRESS:
        return -1  # re-entrant probe; do not finalize
    if cached is not None:
        return cached  # type: ignore[return-value]
    loop = loop_of(ctx, b1, b2)
    if loop.self_intersecting:
        table.store(b1, b2, -1)
        return -1
    chords = inner_sites(ctx, b1, b2)
    base = b1.strength + b2.strength
    if not chords:
        table.store(b1, b2, base)
        return base
    table.store(b1, b2, _IN_PROGRESS)
    best = 0 if strict_paper else base
    for c in chords:
        left = max_str(ctx, table, b1, c, strict_paper)
        if left == -1:
            continue
        right = max_str(ctx, table, c, b2, strict_paper)
        if right == -1:
            continue
        value = left + right - c.strength
        if value > best:
            best = value
    table.store(b1, b2, best)
    return best


def _argmax_chain(ctx: OverlapContext, table: MaxStrTable, b1: BindingSite,
                  b2: BindingSite, strict_paper: bool) -> list[BindingSite]:
    """Reconstruct the chord chain realizing max_str(b1, b2)."""
    value = max_str(ctx, table, b1, b2, strict_paper)
    if value == -1:
        raise InternalConsistencyError("no chain exists for an unusable loop")
    chords = inner_sites(ctx, b1, b2)
    if not chords or value == b1.strength + b2.strength:
        return [b1, b2]
    for c in chords:
        left = max_str(ctx, table, b1, c, strict_paper)
        right = max_str(ctx, table, c, b2, strict_paper)
        if left != -1 and right != -1 and left + right - c.strength == value:
            return (_argmax_chain(ctx, table, b1, c, strict_paper)[:-1]
                    + _argmax_chain(ctx, table, c, b2, strict_paper))
    if not strict_paper:
        raise InternalConsistencyError("memoized optimum has no realizing chord")
    return [b1, b2]


def extract_rogue(ctx: OverlapContext, chord_chain: Sequence[BindingSite],
                  tau: int = 1) -> tuple[Assembly, Assembly, Assembly, Offset]:
    """Union of the tree paths along a chord chain, as a rogue witness.

    Returns (part_in_base, part_in_copy, rogue, part_offset).  Raises
    InternalConsistencyError when the realized union collides across
    copies or binds below tau; that indicates a DP soundness bug and must
    never be swallowed.
    """
    if len(chord_chain) < 2:
        raise InputError("a chord chain needs at least two sites")
    dx, dy = ctx.offset
    cells1: set[Cell] = set()
    cells2: set[Cell] = set()
    for s1, s2 in zip(chord_chain, chord_chain[1:]):
        cells1.update(ctx.tree_path(s1.p, s2.p))
        base2 = ctx.tree_path((s1.q[0] - dx, s1.q[1] - dy),
                              (s2.q[0] - dx, s2.q[1] - dy))
        cells2.update((x + dx, y + dy) for x, y in base2)
    if cells1 & cells2:
        raise InternalConsistencyError(
            "chord chain paths collide across copies")
    config1 = {c: ctx.base.cells[c] for c in cells1}
    config2 = {c: ctx.shifted[c] for c in cells2}
    strength = 0
    for site in ctx.sites:
        if site.p in cells1 and site.q in cells2:
            strength += site.strength
    if strength < tau:
        raise InternalConsistencyError(
            f"realized union binds at {strength}, below temperature {tau}")
    part1 = Assembly(dict(config1))
    part2 = Assembly(dict(config2))
    m1 = (min(x for x, _ in cells1), min(y for _, y in cells1))
    m2 = (min(x for x, _ in cells2), min(y for _, y in cells2))
    union = dict(config1)
    union.update(config2)
    rogue = Assembly(union)
    return part1, part2, rogue, (m2[0] - m1[0], m2[1] - m1[1])


def _candidate_overlap_offsets(target: Assembly, glues: GlueTable
                               ) -> list[Offset]:
    """Offsets within the scan window that can carry at least one binding
    site, found by matching glue labels between the two copies."""
    w, h = target.width, target.height
    offsets: set[Offset] = set()
    sides: dict[tuple[Offset, str], list[Cell]] = {}
    for cell in target.cells:
        tile = target.cells[cell]
        for d in DIRECTIONS:
            g = tile.glue(d)
            if g is not None:
                sides.setdefault((d, g), []).append(cell)
    for (d, g), cells_a in sides.items():
        for (d2, g2), cells_b in sides.items():
            if d2 != opposite(d) or glues.strength(g, g2) < 1:
                continue
            for (ax, ay) in cells_a:
                for (bx, by) in cells_b:
                    off = (ax + d[0] - bx, ay + d[1] - by)
                    if -w <= off[0] <= w and -h <= off[1] <= h:
                        offsets.add(off)
    return sorted(offsets)


def _validate_tree_input(system: TileSystem, target: Assembly) -> Optional[Decision]:
    if not is_tree_bonded(target, system.glues):
        raise InputError("target is not tree-bonded")
    if len(system.tiles) > target.size:
        # Some tile type cannot occur in the target: singleton rogue.
        present = target.tile_names()
        for tile in sorted(system.tiles, key=lambda t: t.name):
            if tile.name not in present:
                return Decision(Verdict.NOT_UNIQUE,
                                RogueWitness("rogue", singleton(tile)),
                                {"gate": "tile-count"})
        raise InternalConsistencyError("tile count exceeds target but all occur")
    return None


def _scan_offsets(system: TileSystem, target: Assembly, reject_pair,
                  diag: dict) -> Optional[Decision]:
    """Shared offset/pair scan; reject_pair returns a Decision or None."""
    glues = system.glues
    for off in _candidate_overlap_offsets(target, glues):
        ctx = OverlapContext(target, off, glues)
        diag["offsets_scanned"] += 1
        if len(ctx.sites) < 2:
            continue
        diag["contexts_with_pairs"] += 1
        table = MaxStrTable()
        for i in range(len(ctx.sites)):
            for j in range(i + 1, len(ctx.sites)):
                verdict = reject_pair(ctx, table, ctx.sites[i], ctx.sites[j])
                if verdict is not None:
                    return verdict
        diag["dp_cells"] += len(table)
    return None


def temp2_tree_uav(system: TileSystem, target: Assembly) -> Decision:
    """Temperature-2 tree UAV: reject iff the noncooperative gate rejects
    or some overlap has a pair of binding sites forming a loop that does
    not intersect itself."""
    if system.temperature != 2:
        raise InputError("temp2_tree_uav requires temperature 2")
    gate = _validate_tree_input(system, target)
    if gate is not None:
        return gate
    noncoop = _noncoop_decision(system, target)
    if not noncoop.unique:
        return Decision(noncoop.verdict, noncoop.witness,
                        {"gate": "noncoop", **noncoop.diagnostics})
    diag = {"offsets_scanned": 0, "contexts_with_pairs": 0, "dp_cells": 0}

    def reject_pair(ctx, table, a, b):
        loop = loop_of(ctx, a, b)
        if loop.self_intersecting:
            return None
        part1, part2, rogue, part_off = extract_rogue(ctx, [a, b], system.temperature)
        return Decision(Verdict.NOT_UNIQUE,
                        RogueWitness("rogue", rogue, part1, part2, part_off),
                        {**diag, "offset": ctx.offset})

    found = _scan_offsets(system, target, reject_pair, diag)
    return found if found is not None else Decision(Verdict.UNIQUE, None, diag)


def tree_uav(system: TileSystem, target: Assembly,
             strict_paper: bool = False) -> Decision:
    """Tree UAV at arbitrary temperature via the loop-decomposition DP."""
    gate = _validate_tree_input(system, target)
    if gate is not None:
        return gate
    noncoop = _noncoop_decision(system, target)
    if not noncoop.unique:
        return Decision(noncoop.verdict, noncoop.witness,
                        {"gate": "noncoop", **noncoop.diagnostics})
    tau = system.temperature
    diag = {"offsets_scanned": 0, "contexts_with_pairs": 0, "dp_cells": 0}

    def reject_pair(ctx, table, a, b):
        value = max_str(ctx, table, a, b, strict_paper)
        if value < tau:
            return None
        chain = _argmax_chain(ctx, table, a, b, strict_paper)
        part1, part2, rogue, part_off = extract_rogue(ctx, chain, tau)
        return Decision(Verdict.NOT_UNIQUE,
                        RogueWitness("rogue", rogue, part1, part2, part_off),
                        {**diag, "offset": ctx.offset, "strength": value})

    found = _scan_offsets(system, target, reject_pair, diag)
    return found if found is not None else Decision(Verdict.UNIQUE, None, diag)
