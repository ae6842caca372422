"""Coupled KdV-KdV solver: simulation, radius of analyticity and the supporting estimates."""

import json
from pathlib import Path

from ._core import (
    Coefficients,
    ConfigError,
    Error,
    InvalidParameter,
    acl_defect_scan,
    classify,
    commutator_inequality_scan,
    commutator_scaling_fit,
    commutator_terms,
    estimate_radius,
    evolve,
    gevrey_norm,
    grid_points,
    inequality_ratio,
    initial_profile,
    invariant_weight,
    is_divergence_form,
    lifespan,
    nonlinear_rhs,
    picard_contraction_study,
    predicted_lower_bound_curve,
    read_tsv,
    resolve_config,
    run,
)


def read_jsonl(path):
    """Records of a run's record.jsonl, in order."""
    with open(path) as f:
        return [json.loads(line) for line in f if line.strip()]


def run_file(path, overrides=None):
    """Run a config file; relative spectrum paths resolve against its directory."""
    path = Path(path)
    return run(path.read_text(), overrides or {}, path.parent)

__all__ = [name for name in dir() if not name.startswith("_") and name not in ("json", "Path")]
