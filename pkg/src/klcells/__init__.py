"""Kazhdan-Lusztig cells, W-graphs and edge transport maps for finite Coxeter groups."""

from .catalog import D4Config, catalog_lookup, realize, realize_all, standard_config
from .cells import CellPartition, WGraph, build_wgraph, cells, leq_cell, preorder_edges, to_dot
from .coxeter import (
    LEFT,
    RIGHT,
    CoxeterError,
    CoxeterSystem,
    EnumerationLimitError,
    bruhat_leq,
    build_system,
    parabolic_decompose,
    parse_word,
)
from .gentau import GenTauPartition, gentau_equal, gentau_refine
from .kl import (
    CacheError,
    KLPolynomial,
    KLTable,
    ScopeError,
    build_full_table,
    build_interval_table,
    kl_poly,
    load_cache,
    mu,
    mu_tilde,
    save_cache,
)
from .maps import B2Map, D4Map, DerivedMap, KnuthMap, PreconditionError, b2_maps, d4_maps, knuth_maps
from .verifier import VerificationReport, Violation, run_verification

__version__ = "0.1.0"
