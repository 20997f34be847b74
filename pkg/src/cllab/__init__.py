"""Simulation laboratory for complementary-label learning.

Builds biased transition matrices, runs constrained-labeling data
collection protocols on synthetic data, trains classifiers with
transition-aware corrected losses, and computes the information-theoretic
diagnostics (conditional entropy, mutual information, Fano-style error
floor) that explain when biased complementary labels help.
"""

from .transition import (
    TransitionMatrix,
    PairCounts,
    make_uniform,
    make_biased_three_level,
    make_sparse_from_dense,
    make_bicl_analysis,
    estimate_from_pairs,
    invert,
)
from .infotheory import (
    ClassPrior,
    InfoReport,
    conditional_entropy,
    mutual_information,
    fano_lower_bound,
    entropy_ordering_simulation,
)
from .protocol import (
    LabeledDataset,
    ComplementaryDataset,
    CandidateAssignment,
    ClusterModel,
    gen_blobs,
    kmeans,
    assign_candidates,
    annotate_rule_based,
    sample_from_q,
)
from .learner import ClassifierParams, LossSpec, TrainConfig, TrainReport, train, evaluate
from .metrics import noise_rate, imbalance_ratio, empirical_transition, dataset_report

__all__ = [
    "TransitionMatrix", "PairCounts", "make_uniform", "make_biased_three_level",
    "make_sparse_from_dense", "make_bicl_analysis", "estimate_from_pairs", "invert",
    "ClassPrior", "InfoReport", "conditional_entropy", "mutual_information",
    "fano_lower_bound", "entropy_ordering_simulation",
    "LabeledDataset", "ComplementaryDataset", "CandidateAssignment", "ClusterModel",
    "gen_blobs", "kmeans", "assign_candidates", "annotate_rule_based", "sample_from_q",
    "ClassifierParams", "LossSpec", "TrainConfig", "TrainReport", "train", "evaluate",
    "noise_rate", "imbalance_ratio", "empirical_transition", "dataset_report",
]

__version__ = "0.1.0"
