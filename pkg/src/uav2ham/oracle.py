"""Ground-truth machinery: exhaustive producible-set closure, a UAV
decision oracle, recursive producibility search, and rogue-pair search.

The oracle closure only ever needs to expand assemblies that are
subassemblies of the target: if unique assembly fails and every singleton
fits the target, some rogue arises as the combination of two target
subassemblies (walk the rogue's assembly tree to its first offending
node; every node of an assembly tree is a subassembly of its root).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .model import (Assembly, GlueTable, InputError,
                    InternalConsistencyError, Offset, TileSystem, combine,
                    is_subassembly, is_tau_stable, opposite, singleton)

DEFAULT_COUNT_CAP = 1_000_000


def candidate_offsets(a: Assembly, b: Assembly, glues: GlueTable) -> list[Offset]:
    """Offsets at which b could bind a: every placement with a positive
    facing glue pair aligns some open side of a with one of b."""
    offsets: set[Offset] = set()
    b_by_dir: dict[Offset, list[tuple[tuple[int, int], str]]] = {}
    for cell, d, g in b.open_sides():
        b_by_dir.setdefault(d, []).append((cell, g))
    for (ax, ay), d, ga in a.open_sides():
        for (bx, by), gb in b_by_dir.get(opposite(d), ()):
            if glues.strength(ga, gb) > 0:
                offsets.add((ax + d[0] - bx, ay + d[1] - by))
    return sorted(offsets)


@dataclass(frozen=True)
class ProducibleSet:
    """Deduplicated closure of producible assemblies up to the caps."""

    assemblies: frozenset[Assembly]
    truncated: bool

    def __contains__(self, a: Assembly) -> bool:
        return a in self.assemblies

    def __len__(self) -> int:
        return len(self.assemblies)

    def sorted(self) -> list[Assembly]:
        return sorted(self.assemblies)


@dataclass(frozen=True)
class AssemblyTree:
    """Binary witness that an assembly is producible.

    Leaves are singleton tiles; each internal node's children are
    tau-combinable into it at the recorded offset of the right child
    relative to the left child's origin configuration.
    """

    root: Assembly
    left: Optional["AssemblyTree"] = None
    right: Optional["AssemblyTree"] = None
    offset: Optional[Offset] = None

    def is_leaf(self) -> bool:
        return self.left is None

    def validate(self, system: TileSystem) -> bool:
        """Re-check every combination step against the model predicates."""
        if self.is_leaf():
            return self.root.size == 1 and any(
                t.name == next(iter(self.root.cells.values())).name
                for t in system.tiles)
        assert self.left and self.right and self.offset is not None
        got = combine(self.left.root, self.right.root, self.offset,
                      system.glues, system.temperature)
        if got != self.root:
            return False
        return self.left.validate(system) and self.right.validate(system)


class Verdict(enum.Enum):
    UNIQUE = "unique"
    NOT_UNIQUE = "not-unique"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class RogueWitness:
    """Evidence that unique assembly fails.

    kind "rogue": `rogue` is producible and not a subassembly of the
    target, formed by combining `left` and `right` at `offset` (offsets
    are right-relative-to-left origin configurations).  kind "terminal":
    `rogue` is a terminal producible different from the target.
    """

    kind: str
    rogue: Assembly
    left: Optional[Assembly] = None
    right: Optional[Assembly] = None
    offset: Optional[Offset] = None


@dataclass(frozen=True)
class Decision:
    verdict: Verdict
    witness: Optional[RogueWitness] = None
    diagnostics: dict = field(default_factory=dict, compare=False)

    @property
    def unique(self) -> bool:
        return self.verdict is Verdict.UNIQUE


def enumerate_producibles(system: TileSystem, size_cap: int,
                          count_cap: int = DEFAULT_COUNT_CAP) -> ProducibleSet:
    """Fixed-point closure of pairwise combination starting from singletons.

    Assemblies larger than size_cap are dropped (and the result flagged
    truncated); exceeding count_cap stops the closure with the flag set.
    """
    if size_cap < 1 or count_cap < 1:
        raise InputError("caps must be at least 1")
    glues, tau = system.glues, system.temperature
    known: dict[Assembly, None] = {}
    truncated = False
    frontier: list[Assembly] = []
    for tile in sorted(system.tiles, key=lambda t: t.name):
        s = singleton(tile)
        if s not in known:
            known[s] = None
            frontier.append(s)
    while frontier:
        if len(known) > count_cap:
            truncated = True
            break
        new_items = sorted(frontier)
        frontier = []
        universe = sorted(known)
        for a in new_items:
            for b in universe:
                for first, second in ((a, b), (b, a)) if a != b else ((a, b),):
                    for off in candidate_offsets(first, second, glues):
                        c = combine(first, second, off, glues, tau)
                        if c is None:
                            continue
                        if c.size > size_cap:
                            truncated = True
                            continue
                        if c not in known:
                            known[c] = None
                            frontier.append(c)
                            if len(known) > count_cap:
                                truncated = True
        if truncated and len(known) > count_cap:
            break
    return ProducibleSet(frozenset(known), truncated)


def uav_oracle(system: TileSystem, target: Assembly,
               size_cap: Optional[int] = None,
               count_cap: int = DEFAULT_COUNT_CAP) -> Decision:
    """Decide unique assembly by closure over target subassemblies.

    Every producible subassembly of the target is generated; any pair
    combination escaping the target is a rogue (sound and complete once
    the closure reaches a fixed point).  The first rogue in lexicographic
    (left key, right key, offset) order within each expansion round is
    the reported witness, so verdicts are reproducible.
    """
    if target.size < 1:
        raise InputError("target must be non-empty")
    del size_cap  # results never exceed 2*|target|; kept for API symmetry
    glues, tau = system.glues, system.temperature
    diag = {"assemblies_explored": 0, "offsets_scanned": 0,
            "combinations_attempted": 0}

    target_names = target.tile_names()
    for tile in sorted(system.tiles, key=lambda t: t.name):
        s = singleton(tile)
        if tile.name not in target_names or not is_subassembly(s, target):
            return Decision(Verdict.NOT_UNIQUE,
                            RogueWitness("rogue", s), diag)

    members: dict[Assembly, None] = {}
    combined: dict[Assembly, bool] = {}
    frontier: list[Assembly] = []
    for tile in sorted(system.tiles, key=lambda t: t.name):
        s = singleton(tile)
        if s not in members:
            members[s] = None
            combined[s] = False
            frontier.append(s)

    while frontier:
        new_items = sorted(frontier)
        frontier = []
        universe = sorted(members)
        pairs: list[tuple[Assembly, Assembly]] = []
        for a in new_items:
            for b in universe:
                pairs.append((a, b) if a.key <= b.key else (b, a))
        pairs.sort(key=lambda p: (p[0].key, p[1].key))
        seen_pairs: set[tuple] = set()
        for a, b in pairs:
            pk = (a.key, b.key)
            if pk in seen_pairs:
                continue
            seen_pairs.add(pk)
            for first, second in ((a, b), (b, a)) if a != b else ((a, b),):
                for off in candidate_offsets(first, second, glues):
                    diag["offsets_scanned"] += 1
                    c = combine(first, second, off, glues, tau)
                    diag["combinations_attempted"] += 1
                    if c is None:
                        continue
                    combined[first] = True
                    combined[second] = True
                    if not is_subassembly(c, target):
                        diag["assemblies_explored"] = len(members)
                        return Decision(Verdict.NOT_UNIQUE,
                                        RogueWitness("rogue", c, first,
                                                     second, off), diag)
                    if c not in members:
                        members[c] = None
                        combined.setdefault(c, False)
                        frontier.append(c)
                        if len(members) > count_cap:
                            diag["assemblies_explored"] = len(members)
                            return Decision(Verdict.INCONCLUSIVE, None, diag)

    diag["assemblies_explored"] = len(members)
    # Fixed point, no rogue: all producibles are subassemblies of the
    # target, so stuck members are genuinely terminal.
    terminals = [m for m in sorted(members) if not combined[m] and m != target]
    if target not in members:
        witness = RogueWitness("terminal", terminals[0]) if terminals else None
        if witness is None:
            raise InternalConsistencyError(
                "target unproducible but no terminal member found")
        return Decision(Verdict.NOT_UNIQUE, witness, diag)
    if terminals:
        return Decision(Verdict.NOT_UNIQUE,
                        RogueWitness("terminal", terminals[0]), diag)
    return Decision(Verdict.UNIQUE, None, diag)


def _connected_cells(cells: set[tuple[int, int]],
                     adjacency: dict) -> bool:
    if not cells:
        return False
    start = next(iter(cells))
    seen = {start}
    stack = [start]
    while stack:
        for nbr in adjacency[stack.pop()]:
            if nbr in cells and nbr not in seen:
                seen.add(nbr)
                stack.append(nbr)
    return len(seen) == len(cells)


def is_producible(system: TileSystem, b: Assembly,
                  want_tree: bool = False,
                  assembly_tree: Optional[AssemblyTree] = None
                  ) -> bool | tuple[bool, Optional[AssemblyTree]]:
    """Membership in the producible set, by recursive bipartition search.

    A stable non-singleton assembly is producible iff its cells split into
    two connected, stable, recursively producible parts (any such cut has
    interface strength >= tau because the whole is tau-stable).  Failures
    are memoized on canonical form.  Passing a pre-built `assembly_tree`
    validates it instead of searching, which is how constructively built
    witnesses (e.g. from the reduction) are checked at sizes where blind
    search is hopeless.
    """
    if assembly_tree is not None:
        ok = assembly_tree.root == b and assembly_tree.validate(system)
        return (ok, assembly_tree if ok else None) if want_tree else ok

    glues, tau = system.glues, system.temperature
    tile_names = {t.name for t in system.tiles}
    memo: dict[tuple, Optional[AssemblyTree]] = {}

    def search(asm: Assembly) -> Optional[AssemblyTree]:
        if asm.key in memo or asm.key in failed:
            return memo.get(asm.key)
        if asm.size == 1:
            tile = next(iter(asm.cells.values()))
            if tile.name in tile_names:
                tree = AssemblyTree(asm)
                memo[asm.key] = tree
                return tree
            failed.add(asm.key)
            return None
        if not is_tau_stable(asm.cells, glues, tau):
            failed.add(asm.key)
            return None
        cells = asm.cells
        order = sorted(cells)
        anchor = order[0]
        adjacency = {c: [n for d in ((0, 1), (1, 0), (0, -1), (-1, 0))
                         for n in [(c[0] + d[0], c[1] + d[1])] if n in cells]
                     for c in cells}
        rest = [c for c in order if c != anchor]

        def grow(side: set, pool_index: int) -> Optional[AssemblyTree]:
            if 0 < len(side) < len(cells):
                other = set(cells) - side
                if _connected_cells(other, adjacency):
                    part1 = Assembly({c: cells[c] for c in side})
                    part2 = Assembly({c: cells[c] for c in other})
                    t1 = search(part1)
                    if t1 is not None:
                        t2 = search(part2)
                        if t2 is not None:
                            m1x = min(x for x, _ in side)
                            m1y = min(y for _, y in side)
                            m2x = min(x for x, _ in other)
                            m2y = min(y for _, y in other)
                            off = (m2x - m1x, m2y - m1y)
                            whole = combine(part1, part2, off, glues, tau)
                            if whole == asm:
                                return AssemblyTree(asm, t1, t2, off)
            for i in range(pool_index, len(rest)):
                cand = rest[i]
                if any(n in side for n in adjacency[cand]):
                    side.add(cand)
                    found = grow(side, i + 1)
                    if found is not None:
                        return found
                    side.remove(cand)
            return None

        tree = grow({anchor}, 0)
        if tree is None:
            failed.add(asm.key)
        else:
            memo[asm.key] = tree
        return tree

    failed: set[tuple] = set()
    result = search(b)
    ok = result is not None
    return (ok, result) if want_tree else ok


def find_rogue_pair(system: TileSystem, target: Assembly,
                    subassembly_pool: set[Assembly] | list[Assembly]
                    ) -> Optional[tuple[Assembly, Assembly, Offset, Assembly]]:
    """First pool pair (lexicographic order, copies included) whose
    combination escapes the target."""
    glues, tau = system.glues, system.temperature
    pool = sorted(set(subassembly_pool))
    for i, a in enumerate(pool):
        for b in pool[i:]:
            for first, second in ((a, b), (b, a)) if a != b else ((a, b),):
                for off in candidate_offsets(first, second, glues):
                    c = combine(first, second, off, glues, tau)
                    if c is not None and not is_subassembly(c, target):
                        return first, second, off, c
    return None
