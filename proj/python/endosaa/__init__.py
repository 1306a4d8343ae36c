"""Python interface to the network-protection stochastic programming library.

The compiled module exchanges structured data as JSON text; these wrappers
accept and return plain dicts so callers never handle serialized strings.
Option keyword arguments mirror the CLI flags: ``replications``,
``train_scenarios``, ``eval_scenarios``, ``alpha``, ``seed``, ``epsilon``,
``exact_eval``, ``time_limit_sec``, ``mip_rel_gap``, ``threads``.
"""

import json
from typing import Union

from . import _endosaa

__all__ = [
    "solver_backend",
    "generate",
    "solve_saa",
    "solve_dep",
    "solve_ev",
    "evaluate",
    "vss",
    "aggregate",
]

JsonLike = Union[dict, str]


def _as_text(value: JsonLike, what: str) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, dict):
        return json.dumps(value)
    raise TypeError(f"{what} must be a dict or a JSON string, got {type(value).__name__}")


def solver_backend() -> str:
    """Name and version of the MILP solver the library was built against."""
    return _endosaa.solver_backend()


def generate(csv_path: str, **config) -> dict:
    """Build an instance from a city CSV.

    Config keywords include ``variant`` ("selection", "binomial", "discrete",
    "normal"), ``facility_count``, ``W``, ``P``, ``L``, ``seed``,
    ``population_threshold``, ``budget_fraction``, ``states`` and
    ``facility_nodes``.
    """
    return json.loads(_endosaa.generate(csv_path, json.dumps(config)))


def solve_saa(instance: JsonLike, **options) -> dict:
    """Sample-average solve with lower/upper statistical estimators."""
    return json.loads(
        _endosaa.solve_saa(_as_text(instance, "instance"), json.dumps(options))
    )


def solve_dep(instance: JsonLike, **options) -> dict:
    """Exact extensive solve over the enumerated scenario space."""
    return json.loads(
        _endosaa.solve_dep(_as_text(instance, "instance"), json.dumps(options))
    )


def solve_ev(instance: JsonLike, **options) -> dict:
    """Mean-value solve: every random capacity replaced by its expectation."""
    return json.loads(
        _endosaa.solve_ev(_as_text(instance, "instance"), json.dumps(options))
    )


def evaluate(instance: JsonLike, solution: JsonLike, **options) -> dict:
    """Expected cost of a first-stage solution (exact when enumerable)."""
    return json.loads(
        _endosaa.evaluate(
            _as_text(instance, "instance"),
            _as_text(solution, "solution"),
            json.dumps(options),
        )
    )


def vss(instance: JsonLike, solution: JsonLike, **options) -> dict:
    """Value of the stochastic solution against the mean-value alternative."""
    return json.loads(
        _endosaa.vss(
            _as_text(instance, "instance"),
            _as_text(solution, "solution"),
            json.dumps(options),
        )
    )


def aggregate(record_paths) -> str:
    """Aggregate run-record JSON files into a CSV summary table."""
    return _endosaa.aggregate(list(record_paths))
