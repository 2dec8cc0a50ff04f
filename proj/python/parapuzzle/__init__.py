"""Real quadratic family z^2 + c: principal nests, parameter tiles and moduli."""

import json as _json

from ._parapuzzle import (
    Error,
    RayTrace,
    RealNest,
    RealNestLevel,
    Classification,
    Scaling,
    Modulus,
    Winding,
    annulus_modulus,
    classify,
    fixed_points,
    iterate,
    misiurewicz_d,
    real_nest,
    renormalization_window,
    scaling_factors,
    solve_misiurewicz,
    trace_equipotential,
    trace_ray,
    uniform_at,
    winding_number,
    _density_experiment_json,
)


def density_experiment(lo, hi, n_samples, max_level=8, seed=42, threads=0):
    """Seeded Monte Carlo densities over [lo, hi] as the measure report dict."""
    return _json.loads(_density_experiment_json(lo, hi, n_samples, max_level, seed, threads))


__all__ = [
    "Error",
    "RayTrace",
    "RealNest",
    "RealNestLevel",
    "Classification",
    "Scaling",
    "Modulus",
    "Winding",
    "annulus_modulus",
    "classify",
    "density_experiment",
    "fixed_points",
    "iterate",
    "misiurewicz_d",
    "real_nest",
    "renormalization_window",
    "scaling_factors",
    "solve_misiurewicz",
    "trace_equipotential",
    "trace_ray",
    "uniform_at",
    "winding_number",
]
