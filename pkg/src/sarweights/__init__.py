"""Bayesian MCMC estimation of spatial adjacency matrices in SAR panel models."""

from .model import (
    AdjacencyMatrix,
    ModelSpec,
    PanelData,
    ParameterState,
    WeightMatrix,
    build_design,
    log_likelihood,
    row_standardize,
)
from .priors import OmegaPrior, ParamPriors, PriorSpec, anchor_sparsity
from .sampler import ChainOutput, SamplerConfig, identification_check, run_chain

__all__ = [
    "AdjacencyMatrix",
    "ChainOutput",
    "ModelSpec",
    "OmegaPrior",
    "PanelData",
    "ParamPriors",
    "ParameterState",
    "PriorSpec",
    "SamplerConfig",
    "WeightMatrix",
    "anchor_sparsity",
    "build_design",
    "identification_check",
    "log_likelihood",
    "row_standardize",
    "run_chain",
]

__version__ = "0.1.0"
