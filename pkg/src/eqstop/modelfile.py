"""JSON model and sequence files.

Numbers may be written as floats or as exact fraction strings "p/q";
fractions are preserved through parse/serialize round trips and only
converted to floats when the solver model is materialized.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .discount import DiscountFunction
from .errors import ModelValidationError
from .model import MarkovModel, NumericPolicy
from .stability import ModelSequence

SCHEMA_VERSION = 1


def _parse_number(value, where):
    if isinstance(value, bool) or value is None:
        raise ModelValidationError(f"{where}: expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return value
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ModelValidationError(f"{where}: bad fraction {value!r}") from exc
    raise ModelValidationError(f"{where}: expected a number, got {type(value).__name__}")


def _emit_number(value):
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    return value


def _as_float(value):
    return float(value)


@dataclass(frozen=True)
class ModelFile:
    """Parsed model file; raw numbers keep their exact representation."""

    states: tuple
    kernel: tuple  # rows of raw numbers (Fraction or float)
    reward: tuple
    discount_family: str
    discount_params: dict
    policy: NumericPolicy = field(default_factory=NumericPolicy)

    def to_model(self) -> MarkovModel:
        return MarkovModel(
            labels=self.states,
            kernel=[[_as_float(v) for v in row] for row in self.kernel],
            reward=[_as_float(v) for v in self.reward],
            discount=DiscountFunction(self.discount_family, dict(self.discount_params)),
            policy=self.policy,
        )

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "states": list(self.states),
            "kernel": [[_emit_number(v) for v in row] for row in self.kernel],
            "reward": [_emit_number(v) for v in self.reward],
            "discount": {
                "family": self.discount_family,
                "params": dict(self.discount_params),
            },
            "policy": {
                "tol": self.policy.tol,
                "t_max": self.policy.t_max,
                "eq_tol": self.policy.eq_tol,
                "enum_cap": self.policy.enum_cap,
            },
        }

    def to_json(self, indent=2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)


def _parse_policy(raw) -> NumericPolicy:
    if raw is None:
        return NumericPolicy()
    if not isinstance(raw, dict):
        raise ModelValidationError("policy: expected an object")
    known = {"tol", "t_max", "eq_tol", "enum_cap", "mass_tol"}
    unknown = set(raw) - known
    if unknown:
        raise ModelValidationError(f"policy: unknown fields {sorted(unknown)}")
    return NumericPolicy(**{k: raw[k] for k in raw})


def _parse_discount(raw):
    if not isinstance(raw, dict) or "family" not in raw:
        raise ModelValidationError("discount: expected {'family': ..., 'params': ...}")
    params = dict(raw.get("params", {}))
    if raw["family"] == "table":
        params["values"] = [float(_parse_number(v, "discount.values")) for v in params.get("values", [])]
    # constructing validates parameters
    DiscountFunction(raw["family"], params)
    return raw["family"], params


def parse_model(data) -> ModelFile:
    """Parse a model dict (already JSON-decoded) with field diagnostics."""
    if not isinstance(data, dict):
        raise ModelValidationError("model file: expected a JSON object")
    for key in ("states", "kernel", "reward", "discount"):
        if key not in data:
            raise ModelValidationError(f"model file: missing field {key!r}")
    states = tuple(str(s) for s in data["states"])
    n = len(states)
    kernel_raw = data["kernel"]
    if len(kernel_raw) != n:
        raise ModelValidationError(
            f"kernel: expected {n} rows, got {len(kernel_raw)}"
        )
    kernel = []
    for i, row in enumerate(kernel_raw):
        if len(row) != n:
            raise ModelValidationError(
                f"kernel row {states[i]!r}: expected {n} entries, got {len(row)}"
            )
        kernel.append(
            tuple(_parse_number(v, f"kernel[{states[i]}][{states[j]}]")
                  for j, v in enumerate(row))
        )
    reward_raw = data["reward"]
    if len(reward_raw) != n:
        raise ModelValidationError("reward: one value per state required")
    reward = tuple(
        _parse_number(v, f"reward[{states[j]}]") for j, v in enumerate(reward_raw)
    )
    family, params = _parse_discount(data["discount"])
    mf = ModelFile(
        states=states,
        kernel=tuple(kernel),
        reward=reward,
        discount_family=family,
        discount_params=params,
        policy=_parse_policy(data.get("policy")),
    )
    mf.to_model()  # fail fast on semantic problems (row sums, negatives)
    return mf


def load_model(path) -> ModelFile:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelValidationError(f"{path}: invalid JSON ({exc})") from exc
    return parse_model(data)


def parse_sequence(data) -> ModelSequence:
    """Parse a sequence file: shared states/discount, per-index members."""
    if not isinstance(data, dict):
        raise ModelValidationError("sequence file: expected a JSON object")
    for key in ("states", "discount", "members"):
        if key not in data:
            raise ModelValidationError(f"sequence file: missing field {key!r}")
    states = tuple(str(s) for s in data["states"])
    family, params = _parse_discount(data["discount"])
    policy = _parse_policy(data.get("policy"))
    members = {}
    for key, body in data["members"].items():
        idx = math.inf if key in ("inf", "infinity") else int(key)
        mf = parse_model(
            {
                "states": states,
                "kernel": body["kernel"],
                "reward": body["reward"],
                "discount": {"family": family, "params": params},
            }
        )
        members[idx] = mf.to_model().with_policy(policy)
    if math.inf not in members:
        raise ModelValidationError("sequence file: missing limit member 'inf'")
    return ModelSequence(
        name=str(data.get("name", "sequence")),
        members=members,
        metadata=dict(data.get("metadata", {})),
    )


def load_sequence(path) -> ModelSequence:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelValidationError(f"{path}: invalid JSON ({exc})") from exc
    return parse_sequence(data)
