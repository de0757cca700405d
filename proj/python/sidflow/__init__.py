"""Subspace identification with a workflow-structured distributed SVD."""

from ._core import (
    SidError,
    ball_beam,
    build_block_hankel,
    deserialize_matrix,
    emit_workflow,
    flops_model,
    gen_excitation,
    identify,
    markov_parameters,
    oblique_project,
    orth_project,
    parallel_svd_by_cols,
    pinv,
    run_workflow,
    serialize_matrix,
    simulate,
    speedup,
    svd_dense,
    validate_workflow,
)

__all__ = [
    "SidError",
    "ball_beam",
    "build_block_hankel",
    "deserialize_matrix",
    "emit_workflow",
    "flops_model",
    "gen_excitation",
    "identify",
    "markov_parameters",
    "oblique_project",
    "orth_project",
    "parallel_svd_by_cols",
    "pinv",
    "run_workflow",
    "serialize_matrix",
    "simulate",
    "speedup",
    "svd_dense",
    "validate_workflow",
]
