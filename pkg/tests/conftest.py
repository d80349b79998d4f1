"""Shared parameter grids and cached stationary distributions."""

from __future__ import annotations

from functools import lru_cache

from erlangdiff.ctmc import stationary_pmf
from erlangdiff.diffusion import build_density
from erlangdiff.model import ModelParams

STANDARD_NS = (1, 2, 5, 50, 500)
STANDARD_RHOS = (0.3, 0.7, 0.9, 0.99, 0.999)
ALPHA_RATIOS = (0.0, 0.1, 1.0, 10.0)
OVERLOAD_RHOS = (1.0, 1.5, 2.4)

METRICS_NS = (2, 5, 50, 500)
METRICS_RHOS = (0.5, 0.9, 0.99, 0.999)

# oracle spot-check sets: three Erlang-C, critical and overloaded Erlang-A
SPOT_SETS = (
    (3.0, 1.0, 5, 0.0),
    (4.9, 1.0, 5, 0.0),
    (1.0, 1.0, 2, 0.0),
    (5.0, 1.0, 5, 1.0),
    (12.0, 1.0, 5, 2.0),
)


def standard_grid() -> list[ModelParams]:
    """The moment/gradient-bound grid, with overloaded extensions for A."""
    out = []
    for n in STANDARD_NS:
        for rho in STANDARD_RHOS:
            for ratio in ALPHA_RATIOS:
                out.append(ModelParams(lam=rho * n, mu=1.0, n=n, alpha=ratio))
        for rho in OVERLOAD_RHOS:
            for ratio in ALPHA_RATIOS[1:]:
                out.append(ModelParams(lam=rho * n, mu=1.0, n=n, alpha=ratio))
    return out


def erlang_c_grid() -> list[ModelParams]:
    """The universal-bound grid (criteria 4, 5, 11)."""
    return [
        ModelParams(lam=rho * n, mu=1.0, n=n, alpha=0.0)
        for n in METRICS_NS
        for rho in METRICS_RHOS
    ]


@lru_cache(maxsize=512)
def cached_pmf(lam: float, mu: float, n: int, alpha: float, tail_tol: float = 1e-12, moment_order: int = 0):
    return stationary_pmf(
        ModelParams(lam=lam, mu=mu, n=n, alpha=alpha), tail_tol, moment_order=moment_order
    )


@lru_cache(maxsize=512)
def cached_density(lam: float, mu: float, n: int, alpha: float):
    return build_density(
        cached_pmf(lam, mu, n, alpha).derived
    )


def pmf_for(params: ModelParams, tail_tol: float = 1e-12, moment_order: int = 0):
    return cached_pmf(
        params.lam, params.mu, params.n, params.alpha, tail_tol, moment_order
    )


def density_for(params: ModelParams):
    return cached_density(params.lam, params.mu, params.n, params.alpha)
