"""Payment channel network simulation toolkit."""

from .graph import (Channel, ChannelPolicy, FeeGraph, NetworkGraph,
                    build_fee_graph, degree, fee)
from .metrics import MetricRecord, batch_stats, central_point_dominance, diameter, gini
from .routing import PaymentOutcome, Route, execute_payment, find_route, record_intermediaries
from .simulate import ExperimentSpec, run_baseline, run_growth, run_join_eval, synth_graph
from .snapshot import largest_component, parse_snapshot, to_network
from .strategies import AttachmentRequest, CandidateSet, STRATEGIES, run_strategy

__all__ = [
    "AttachmentRequest", "CandidateSet", "Channel", "ChannelPolicy",
    "ExperimentSpec", "FeeGraph", "MetricRecord", "NetworkGraph",
    "PaymentOutcome", "Route", "STRATEGIES", "batch_stats",
    "build_fee_graph", "central_point_dominance", "degree", "diameter",
    "execute_payment", "fee", "find_route", "gini", "largest_component",
    "parse_snapshot", "record_intermediaries", "run_baseline", "run_growth",
    "run_join_eval", "run_strategy", "synth_graph", "to_network",
]
