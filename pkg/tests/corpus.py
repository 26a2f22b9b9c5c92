"""Seeded random instance generators shared by the test suite.

Everything here is deterministic given the seed; the library itself never
draws randomness.
"""

from __future__ import annotations

import random
from typing import Optional

from uav2ham import (Assembly, GlueTable, TileSystem, TileType,
                     enumerate_producibles, is_tree_bonded)

Cell = tuple[int, int]


def random_system(rng: random.Random, max_tiles: int = 6,
                  tau: Optional[int] = None, pool: int = 5) -> TileSystem:
    """Random diagonal-glue system with strengths in [1, tau]."""
    if tau is None:
        tau = rng.choice((1, 2, 3))
    labels = [f"g{i}" for i in range(pool)]
    strengths = {lab: rng.randint(1, tau) for lab in labels}
    glues = GlueTable.diagonal(strengths)
    n = rng.randint(2, max_tiles)
    tiles = []
    for i in range(n):
        sides = {}
        for side in ("north", "east", "south", "west"):
            sides[side] = rng.choice(labels) if rng.random() < 0.55 else None
        tiles.append(TileType(f"t{i}", **sides))
    return TileSystem(glues=glues, tiles=tuple(tiles), temperature=tau)


def tree_bonded_instance(rng: random.Random, max_size: int = 12,
                         max_tiles: int = 6
                         ) -> Optional[tuple[TileSystem, Assembly]]:
    """Random system plus a tree-bonded producible target, or None.

    The target grows by single-tile attachments (each step a verified
    combine), so it is producible by construction; growth stops when the
    drawn size is reached or no attachment keeps the bond graph a tree.
    """
    from uav2ham import combine, singleton
    system = random_system(rng, max_tiles=max_tiles)
    glues, tau = system.glues, system.temperature
    goal = rng.randint(2, max_size)
    current = singleton(rng.choice(system.tiles))
    stuck = 0
    while current.size < goal and stuck < 12:
        tile = rng.choice(system.tiles)
        s = singleton(tile)
        offs = [(x + d[0], y + d[1])
                for (x, y) in current.cells
                for d in ((0, 1), (1, 0), (0, -1), (-1, 0))
                if (x + d[0], y + d[1]) not in current.cells]
        rng.shuffle(offs)
        grown = None
        for off in offs:
            c = combine(current, s, off, glues, tau)
            if c is not None and is_tree_bonded(c, glues):
                grown = c
                break
        if grown is None:
            stuck += 1
        else:
            current = grown
            stuck = 0
    if current.size < 2:
        return None
    if rng.random() < 0.6:
        # Restrict to tiles the target uses, so verdicts hinge on
        # geometry rather than spare singleton rogues.
        used = current.tile_names()
        kept = tuple(t for t in system.tiles if t.name in used)
        system = TileSystem(glues=system.glues, tiles=kept,
                            temperature=system.temperature)
    return system, current


def random_tree_assembly(rng: random.Random, size: int) -> dict[Cell, str]:
    """Random lattice tree shape as a cell -> placeholder-name map."""
    cells = {(0, 0)}
    frontier = [(0, 0)]
    while len(cells) < size and frontier:
        base = rng.choice(frontier)
        nbrs = [(base[0] + d[0], base[1] + d[1])
                for d in ((0, 1), (1, 0), (0, -1), (-1, 0))]
        nbrs = [n for n in nbrs if n not in cells]
        if not nbrs:
            frontier.remove(base)
            continue
        new = rng.choice(nbrs)
        cells.add(new)
        frontier.append(new)
    return {c: f"n{i}" for i, c in enumerate(sorted(cells))}


def weak_bond_tree_instance(rng: random.Random, size: int = 8,
                            tau: int = 2) -> tuple[TileSystem, Assembly]:
    """Tree-bonded target with at least one bond weaker than tau.

    Spanning-tree edges get unique glue labels; at least one is assigned a
    sub-threshold strength, so the noncooperative gate must reject.
    """
    shape = random_tree_assembly(rng, size)
    cells = sorted(shape)
    # Build a spanning tree over the cells explicitly.
    edges = []
    seen = {cells[0]}
    frontier = [cells[0]]
    cellset = set(cells)
    while frontier:
        nxt = []
        for c in frontier:
            for d in ((0, 1), (1, 0), (0, -1), (-1, 0)):
                n = (c[0] + d[0], c[1] + d[1])
                if n in cellset and n not in seen:
                    seen.add(n)
                    edges.append((c, n))
                    nxt.append(n)
        frontier = nxt
    strengths = {}
    side_glues: dict[Cell, dict[str, str]] = {c: {} for c in cells}
    weak_index = rng.randrange(len(edges))
    for i, (u, v) in enumerate(edges):
        lab = f"e{i}"
        strengths[lab] = rng.randint(1, tau - 1) if i == weak_index \
            else rng.randint(1, tau)
        d = (v[0] - u[0], v[1] - u[1])
        names = {(0, 1): ("north", "south"), (1, 0): ("east", "west"),
                 (0, -1): ("south", "north"), (-1, 0): ("west", "east")}
        su, sv = names[d]
        side_glues[u][su] = lab
        side_glues[v][sv] = lab
    glues = GlueTable.diagonal(strengths)
    tiles = []
    placements = {}
    for i, c in enumerate(cells):
        t = TileType(f"n{i}", **side_glues[c])
        tiles.append(t)
        placements[c] = t
    system = TileSystem(glues=glues, tiles=tuple(tiles), temperature=tau)
    return system, Assembly(placements)


def caterpillar_instance(size: int, seed: int, tau: int = 2 ** 30,
                         leaf_pool: int = 0
                         ) -> tuple[TileSystem, Assembly]:
    """Path or caterpillar target with strength-tau bonds, unique tiles.

    leaf_pool > 0 reuses that many glue labels across leaf bonds, which
    creates overlap contexts with real binding sites for the DP to chew
    on; 0 keeps every label unique.
    """
    rng = random.Random(seed)
    spine = max(2, size - size // 4)
    leaves = size - spine
    cells = [(x, 0) for x in range(spine)]
    leaf_cells = []
    free = list(range(spine))
    rng.shuffle(free)
    for x in free[:leaves]:
        leaf_cells.append((x, 1))
    strengths: dict[str, int] = {}
    side_glues: dict[Cell, dict[str, str]] = {
        c: {} for c in cells + leaf_cells}
    for x in range(spine - 1):
        lab = f"s{x}"
        strengths[lab] = tau
        side_glues[(x, 0)]["east"] = lab
        side_glues[(x + 1, 0)]["west"] = lab
    for i, (x, _) in enumerate(sorted(leaf_cells)):
        lab = f"l{i % leaf_pool}" if leaf_pool else f"l{i}"
        strengths[lab] = tau
        side_glues[(x, 0)]["north"] = lab
        side_glues[(x, 1)]["south"] = lab
    glues = GlueTable.diagonal(strengths)
    tiles = []
    placements = {}
    for i, c in enumerate(sorted(side_glues)):
        t = TileType(f"c{i}", **side_glues[c])
        tiles.append(t)
        placements[c] = t
    system = TileSystem(glues=glues, tiles=tuple(tiles), temperature=tau)
    return system, Assembly(placements)
