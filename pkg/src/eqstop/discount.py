"""Discount-function families and validation of their standing assumptions.

Every family maps an integer delay t >= 0 to a weight in [0, 1] with
weight(0) = 1, weight(1) < 1, nonincreasing, vanishing at infinity, and
log-subadditive: delta(t+s) >= delta(t)*delta(s).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ModelValidationError

FAMILIES = (
    "exponential",
    "hyperbolic",
    "generalized-hyperbolic",
    "pseudo-exponential",
    "table",
)

# float slack for the validation scans; families are validated analytically
# at construction, the scan guards table inputs and parameter typos
_SCAN_SLACK = 1e-12


@dataclass(frozen=True)
class DiscountFunction:
    """One member of a built-in discount family.

    Parameters are family specific:

    - ``exponential``: ``beta`` in (0, 1); weight ``beta**t``
    - ``hyperbolic``: ``beta`` > 0; weight ``1 / (1 + beta*t)``
    - ``generalized-hyperbolic``: ``beta, gamma`` > 0; weight ``(1 + beta*t)**-gamma``
    - ``pseudo-exponential``: ``w`` in [0, 1], ``beta1, beta2`` in (0, 1);
      weight ``w*beta1**t + (1-w)*beta2**t``
    - ``table``: explicit leading values plus a geometric ``tail`` factor in (0, 1)
    """

    family: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ModelValidationError(f"unknown discount family {self.family!r}")
        p = self.params
        try:
            if self.family == "exponential":
                if not 0.0 < p["beta"] < 1.0:
                    raise ModelValidationError("exponential needs 0 < beta < 1")
            elif self.family == "hyperbolic":
                if not p["beta"] > 0.0:
                    raise ModelValidationError("hyperbolic needs beta > 0")
            elif self.family == "generalized-hyperbolic":
                if not (p["beta"] > 0.0 and p["gamma"] > 0.0):
                    raise ModelValidationError(
                        "generalized-hyperbolic needs beta > 0 and gamma > 0"
                    )
            elif self.family == "pseudo-exponential":
                if not (
                    0.0 <= p["w"] <= 1.0
                    and 0.0 < p["beta1"] < 1.0
                    and 0.0 < p["beta2"] < 1.0
                ):
                    raise ModelValidationError(
                        "pseudo-exponential needs w in [0,1] and beta1, beta2 in (0,1)"
                    )
            elif self.family == "table":
                values = list(p["values"])
                tail = p["tail"]
                if not values or values[0] != 1.0:
                    raise ModelValidationError("table must start at weight 1")
                if any(b > a + _SCAN_SLACK for a, b in zip(values, values[1:])):
                    raise ModelValidationError("table values must be nonincreasing")
                if len(values) > 1 and not values[1] < 1.0:
                    raise ModelValidationError("table needs weight(1) < 1")
                if any(v < 0.0 or v > 1.0 for v in values):
                    raise ModelValidationError("table values must lie in [0,1]")
                if not 0.0 < tail < 1.0:
                    raise ModelValidationError("table tail factor must be in (0,1)")
        except KeyError as exc:
            raise ModelValidationError(
                f"missing parameter {exc} for family {self.family!r}"
            ) from exc

    def __call__(self, t) -> float:
        return evaluate(self, t)

    def weights(self, horizon: int) -> np.ndarray:
        """Vector of weights for t = 0..horizon inclusive."""
        t = np.arange(horizon + 1, dtype=np.float64)
        p = self.params
        if self.family == "exponential":
            return p["beta"] ** t
        if self.family == "hyperbolic":
            return 1.0 / (1.0 + p["beta"] * t)
        if self.family == "generalized-hyperbolic":
            return (1.0 + p["beta"] * t) ** (-p["gamma"])
        if self.family == "pseudo-exponential":
            w = p["w"]
            return w * p["beta1"] ** t + (1.0 - w) * p["beta2"] ** t
        values = np.asarray(p["values"], dtype=np.float64)
        out = np.empty(horizon + 1)
        k = min(len(values), horizon + 1)
        out[:k] = values[:k]
        if horizon + 1 > k:
            steps = np.arange(1, horizon + 2 - k, dtype=np.float64)
            out[k:] = values[-1] * p["tail"] ** steps
        return out


def evaluate(delta: DiscountFunction, t) -> float:
    """Discount weight at integer delay t; infinity maps to 0."""
    if t == math.inf:
        return 0.0
    t = int(t)
    if t < 0:
        raise ModelValidationError("delay must be >= 0 or infinity")
    return float(delta.weights(t)[t])


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    horizon: int
    failures: tuple = ()

    @property
    def first_violation(self):
        return self.failures[0] if self.failures else None


def validate_assumption(delta: DiscountFunction, T: int) -> ValidationReport:
    """Exhaustively scan normalization, monotonicity and log-subadditivity.

    Checks weight(0)=1, weight(1)<1, nonincreasing on [0, T], and
    delta(t+s) >= delta(t)*delta(s) for all s, t >= 0 with s+t <= T.
    Violations are collected with witnesses, not raised.
    """
    if T < 2:
        raise ModelValidationError("validation horizon must be >= 2")
    w = delta.weights(T)
    failures = []
    if abs(w[0] - 1.0) > _SCAN_SLACK:
        failures.append(("normalization", 0, w[0]))
    if not w[1] < 1.0:
        failures.append(("strict-first-step", 1, w[1]))
    drops = np.nonzero(w[1:] > w[:-1] + _SCAN_SLACK)[0]
    for i in drops:
        failures.append(("monotonicity", (int(i), int(i) + 1), (w[i], w[i + 1])))
    # outer-product scan: prod[s,t] = w[s]*w[t] must not exceed w[s+t]
    for s in range(T + 1):
        limit = T - s
        bad = np.nonzero(w[s] * w[: limit + 1] > w[s : s + limit + 1] + _SCAN_SLACK)[0]
        if bad.size:
            t = int(bad[0])
            failures.append(("log-subadditivity", (s, t), (w[s + t], w[s] * w[t])))
    return ValidationReport(ok=not failures, horizon=T, failures=tuple(failures))
