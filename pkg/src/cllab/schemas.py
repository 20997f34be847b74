"""JSON schemas for every document the package reads or writes."""

TRANSITION_MATRIX = {
    "type": "object",
    "required": ["c", "rows"],
    "properties": {
        "c": {"type": "integer", "minimum": 2},
        "rows": {
            "type": "array",
            "items": {
                "type": "array",
                "items": {"type": "number", "minimum": 0, "maximum": 1},
            },
        },
    },
}

INFO_REPORT = {
    "type": "object",
    "required": ["h_cond_bits", "i_yybar_bits", "fano_bound", "c"],
    "properties": {
        "h_cond_bits": {"type": "number", "minimum": 0},
        "i_yybar_bits": {"type": "number"},
        "fano_bound": {"type": "number"},
        "c": {"type": "integer", "minimum": 2},
    },
}

DATASET_REPORT = {
    "type": "object",
    "required": [
        "noise_rate", "imbalance_ratio", "zero_count_classes",
        "h_cond_bits_uniform", "h_cond_bits_empirical",
        "i_bits_uniform", "i_bits_empirical", "counts",
    ],
    "properties": {
        "noise_rate": {"type": "number", "minimum": 0, "maximum": 1},
        "imbalance_ratio": {"type": "number", "minimum": 1},
        "zero_count_classes": {"type": "array", "items": {"type": "integer"}},
        "h_cond_bits_uniform": {"type": "number", "minimum": 0},
        "h_cond_bits_empirical": {"type": "number", "minimum": 0},
        "i_bits_uniform": {"type": "number"},
        "i_bits_empirical": {"type": "number"},
        "counts": {"type": "array", "items": {"type": "integer", "minimum": 0}},
    },
}

TRAIN_RESULT = {
    "type": "object",
    "required": ["train_loss", "test_acc", "final_accuracy", "per_class_accuracy"],
    "properties": {
        "train_loss": {"type": "array", "items": {"type": "number"}},
        "test_acc": {"type": "array", "items": {"type": "number"}},
        "final_accuracy": {"type": "number", "minimum": 0, "maximum": 1},
        "per_class_accuracy": {"type": "array", "items": {"type": "number"}},
    },
}

SIMULATION_RESULT = {
    "type": "object",
    "required": ["c", "k", "trials", "seed", "fraction"],
    "properties": {
        "c": {"type": "integer", "minimum": 2},
        "k": {"type": "integer", "minimum": 1},
        "trials": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer"},
        "fraction": {"type": "number", "minimum": 0, "maximum": 1},
    },
}

COMPARE_SUMMARY = {
    "type": "object",
    "required": ["baseline", "cells"],
    "properties": {
        "baseline": {"type": "string"},
        "cells": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["design", "loss", "status"],
                "properties": {
                    "design": {"type": "string"},
                    "loss": {"type": "string"},
                    "status": {"type": "string"},
                    "mean": {"type": ["number", "null"]},
                    "std": {"type": ["number", "null"]},
                    "delta": {"type": ["number", "null"]},
                },
            },
        },
    },
}
