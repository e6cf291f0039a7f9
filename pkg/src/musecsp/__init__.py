"""Constraint satisfaction over families of partially shared instances.

A single DAG compactly represents many CSPs that share variables; the
propagation engines prune labels (arc consistency) and relation entries
(path consistency) that no represented instance can use, and solutions are
extracted per segment with support-set guidance.  A constraint dependency
grammar layer compiles word graphs into such instances for lattice parsing.
"""

from .core import CspInstance, ac4, enforce_node_consistency, oracle_arc_fixpoint, run_ac4
from .graph import MuseInstance, build_muse, chain_muse, enumerate_segments
from .arc import SupportState, initialize, muse_ac1, oracle_muse_arc_fixpoint, propagate_from
from .path import (
    PathSupportState,
    muse_ac_pc_fixpoint,
    muse_pc1,
    oracle_muse_path_fixpoint,
)
from .search import Assignment, extract_all, extract_one, verify_solution
from .combine import MergeCompatibility, NamedCsp, assemble_muse, check_mergeable, create_dag, order_sigma
from .cdg import (
    Grammar,
    WordGraph,
    build_network,
    builtin_grammar,
    from_sentence,
    full_lattice,
    interval_compare,
    parse,
    parse_grammar,
)
from .generators import TopologySpec, gen_random, random_muse
from .experiments import ProfileConfig, run_profile, run_timing

__all__ = [name for name in dir() if not name.startswith("_")]
