"""Vlasov fields, kinematic domains and moments on the conic bundle.

Thin layer over the compiled ``_core`` module. Scenario runs return the same
summary dictionary the CLI writes to ``summary.json``.
"""

import json
import os
from pathlib import Path

from ._core import (
    Bivector,
    ChartDomainError,
    ConfigError,
    Field,
    Indicator,
    Model,
    QuadratureDomainError,
    ScenarioError,
    SprayKitError,
    apply_field,
    bivector_from_field,
    bivectors_equal,
    compatibility_defect,
    current_from_E,
    field_from_bivector,
    geodesic_field,
    indicator,
    integrate,
    lorentz_field,
    minkowski,
    minkowski2_labtime,
    minkowski_electric,
    minkowski_nonmetric,
    model,
    scenario_names,
    scenario_text,
    schwarzschild,
    transform_to_domain,
)
from . import _core

__all__ = [name for name in dir(_core) if not name.startswith("_")] + ["run_scenario", "run_config"]


def run_scenario(name, *, seed=None, steps=None, tol=None, out=None):
    """Run a bundled scenario by name and return its summary dict."""
    return json.loads(_core._run(scenario_text(name), name, seed, steps, tol, _out(out)))


def run_config(path, *, seed=None, steps=None, tol=None, out=None):
    """Run a scenario JSON file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError(f"{path}: cannot read config: {e}") from e
    return json.loads(_core._run(text, str(path), seed, steps, tol, _out(out)))


def _out(out):
    if out is None:
        return None
    return str(out)


def default_output_root():
    return Path(os.environ.get("SPRAYKIT_OUT", "spraykit-out"))
