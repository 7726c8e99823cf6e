"""Fast-failover routing on edge-disjoint paths extended into trees.

The package computes maximum sets of edge-disjoint s-d paths, extends them
into tree routing structures (a single tree grown from the longest path, or
one tree per path), compiles static local forwarding rules, and simulates
depth-first failover routing under random and destination-clustered link
failures, with an experiment harness producing CSV reports.
"""

from ._core import BACKEND, available_backends
from .graph import (FormatError, GenerationError, Graph, GraphError,
                    dump_edge_list, edge_connectivity, gen_erdos_renyi,
                    gen_erdos_renyi_lcc, gen_random_regular,
                    largest_component, load_edge_list, load_graphml,
                    load_graphml_file, write_graphml)
from .structures import (MODE_EDP, MODE_MULTIPLE_TREES, MODE_ONE_TREE, MODES,
                         EdpSet, PathUnit, RoutingStructures, Tree,
                         build_structures, compute_edps, extend_multiple_trees,
                         extend_one_tree, rank_branches, structure_stats,
                         structures_to_json, truncate_tree)
from .routing import (ORIGIN, Action, ForwardingTable, PacketTrace,
                      PortContext, compile_rules, format_trace, lookup,
                      simulate)
from .failures import (DECAY_MULTIPLICATIVE, DECAY_SUBTRACTIVE,
                       MODEL_CLUSTERED, MODEL_RANDOM, FailureScenario,
                       clustered_failures, random_failures, round_half_up)
from .experiments import (ExperimentConfig, ExperimentResult, GraphFamily,
                          MetricsTable, RunRecord, TimingRecord,
                          aggregate_records, bin_timings, config_from_json,
                          config_to_json, emit_csv, records_from_csv,
                          records_to_csv, run_experiment, runtime_grid,
                          time_precompute, validate_config)
from .bench import bench_backends, bench_table

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
