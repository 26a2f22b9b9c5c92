"""Verification toolkit for the two-handed tile self-assembly model."""

from .model import (Assembly, BondGraph, Configuration, GlueTable,
                    InconclusiveError, InputError, InternalConsistencyError,
                    TileSystem, TileType, bond_graph, canonicalize, combine,
                    is_subassembly, is_tau_stable, is_tree_bonded,
                    min_cut_weight, singleton)
from .oracle import (AssemblyTree, Decision, ProducibleSet, RogueWitness,
                     Verdict, enumerate_producibles, find_rogue_pair,
                     is_producible, uav_oracle)
from .treecheck import (BindingSite, Loop, MaxStrTable, OverlapContext,
                        binding_sites, extract_rogue, inner_sites, loop_of,
                        max_str, noncoop_transform, noncoop_uav,
                        temp2_tree_uav, tree_uav)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
