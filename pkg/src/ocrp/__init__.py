"""Ordered Chinese restaurant up-down chains and the diffusion limit of their
leftmost column, checked exactly at finite n and by seeded simulation."""

from .chains import (
    ChainParams,
    leftmost_kernel_Q,
    leftmost_law_alpha_zero,
    leftmost_stationary_q,
    stationary_alpha_alpha,
    stationary_alpha_zero,
    updown_kernel,
)
from .core import Composition, KernelMatrix, StateIndex, enumerate_compositions, rank, unrank
from .kernels import BACKEND
from .montecarlo import KsReport, RngStream, ks_distance, simulate_leftmost
from .report import SimReport
from .semigroup import DiscreteEigenSystem, SpectralSemigroup, U_t
from .spectral import K_apply, K_inverse, Polynomial, jacobi_h

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "ChainParams", "Composition", "DiscreteEigenSystem", "K_apply", "K_inverse",
    "KernelMatrix", "KsReport", "Polynomial", "RngStream", "SimReport", "SpectralSemigroup",
    "StateIndex", "U_t", "enumerate_compositions", "jacobi_h", "ks_distance",
    "leftmost_kernel_Q", "leftmost_law_alpha_zero", "leftmost_stationary_q", "rank",
    "simulate_leftmost", "stationary_alpha_alpha", "stationary_alpha_zero", "unrank",
    "updown_kernel",
]
