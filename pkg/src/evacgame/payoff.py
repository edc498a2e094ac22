"""Pairwise interaction payoffs for the evacuate/stay game.

Two constructions are available: ``formula`` matrices built from the cost
model parameters, and the ``paper`` matrix with literal published
coefficients. The two agree on every entry except the stay-versus-evacuator
coefficient, where the published value (0.47) differs from what the formula
yields with the published parameters (0.314); see ``FORMULA_A_SE`` and
``PAPER_A_SE``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import IntEnum

import numpy as np

__all__ = [
    "Decision",
    "PayoffParams",
    "PayoffMatrix",
    "TABLE_PARAMS",
    "FORMULA_A_SE",
    "PAPER_A_SE",
    "baseline_matrix",
    "incentive_matrix",
    "paper_coefficient_matrix",
    "pair_payoff",
]


class Decision(IntEnum):
    STAY = 0
    EVACUATE = 1

    @property
    def symbol(self) -> str:
        return "E" if self is Decision.EVACUATE else "S"

    @classmethod
    def from_symbol(cls, s: str) -> "Decision":
        if s == "E":
            return cls.EVACUATE
        if s == "S":
            return cls.STAY
        raise ValueError(f"unknown decision symbol {s!r}")


@dataclass(frozen=True)
class PayoffParams:
    """Cost-model parameters; defaults are the published calibration."""

    p: float = 0.5          # expected probability of property damage
    alpha: float = 0.4      # evacuating cost fraction
    beta: float = 0.2       # staying cost fraction
    r_E: float = 0.5        # evacuation cost reduction in mixed interactions
    r_S: float = 0.07       # staying cost reduction in mixed interactions
    r_T: float = 0.5        # transport-coordination cost reduction
    r_D: float = 0.4        # stay-stay cost from diverted resources
    theta: float = 0.0      # recovery incentive fraction of property value
    property_value: float = 1.0

    def __post_init__(self):
        for name in ("p", "r_E", "r_S", "r_T", "r_D"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v}")
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("alpha and beta must be non-negative")
        if not -1.0 <= self.theta <= 1.0:
            raise ValueError(f"theta must be in [-1, 1], got {self.theta}")
        if self.property_value <= 0:
            raise ValueError("property_value must be positive")


@dataclass(frozen=True)
class PayoffMatrix:
    """Eight dimensionless coefficients; payoff = coefficient x property value.

    Subscripts read (own decision, neighbor decision): ``a_es`` is the payoff
    coefficient of an evacuator meeting a stayer. Role symmetry (a_ee = b_ee,
    a_es = b_se, a_se = b_es, a_ss = b_ss) is enforced.
    """

    a_ee: float
    a_es: float
    a_se: float
    a_ss: float
    property_value: float = 1.0

    def __post_init__(self):
        if self.property_value <= 0:
            raise ValueError("property_value must be positive")

    # b-side coefficients, determined by role symmetry
    @property
    def b_ee(self) -> float:
        return self.a_ee

    @property
    def b_es(self) -> float:
        return self.a_se

    @property
    def b_se(self) -> float:
        return self.a_es

    @property
    def b_ss(self) -> float:
        return self.a_ss

    def coefficient(self, own: Decision, other: Decision) -> float:
        return self.coefficient_array()[own, other]

    def coefficient_array(self) -> np.ndarray:
        """2x2 array indexed [own, other] with Decision values as indices."""
        return np.array(
            [[self.a_ss, self.a_se], [self.a_es, self.a_ee]], dtype=np.float64
        )

    def with_property_value(self, value: float) -> "PayoffMatrix":
        return replace(self, property_value=value)


TABLE_PARAMS = PayoffParams()

# Stay-versus-evacuator coefficient: formula value with the published
# parameters vs the published coefficient table. The discrepancy is real and
# asserted in the test suite, not hidden.
FORMULA_A_SE = (1 - TABLE_PARAMS.p) - (1 - TABLE_PARAMS.r_S) * TABLE_PARAMS.beta  # 0.314
PAPER_A_SE = 0.47


def baseline_matrix(params: PayoffParams) -> PayoffMatrix:
    """No-incentive payoffs: theta, r_T, r_D unused."""
    keep = 1 - params.p
    return PayoffMatrix(
        a_ee=keep,
        a_es=keep - (1 - params.r_E) * params.alpha,
        a_se=keep - (1 - params.r_S) * params.beta,
        a_ss=keep,
        property_value=params.property_value,
    )


def incentive_matrix(params: PayoffParams) -> PayoffMatrix:
    """Payoffs with the government incentive terms applied to the baseline."""
    base = baseline_matrix(params)
    return PayoffMatrix(
        a_ee=base.a_ee + params.theta - (1 - params.r_T) * params.alpha,
        a_es=base.a_es + params.theta + params.r_T * (1 - params.r_E) * params.alpha,
        a_se=base.a_se,
        a_ss=base.a_ss - params.r_D * params.beta,
        property_value=params.property_value,
    )


def paper_coefficient_matrix(theta: float, property_value: float = 1.0) -> PayoffMatrix:
    """Literal published coefficient values as a function of the incentive."""
    if not -1.0 <= theta <= 1.0:
        raise ValueError(f"theta must be in [-1, 1], got {theta}")
    return PayoffMatrix(
        a_ee=0.3 + theta,
        a_es=0.4 + theta,
        a_se=PAPER_A_SE,
        a_ss=0.42,
        property_value=property_value,
    )


def pair_payoff(
    matrix: PayoffMatrix, d_a: Decision, d_b: Decision
) -> tuple[float, float]:
    """Payoff values (a-side, b-side) for one interaction."""
    p = matrix.property_value
    return (
        matrix.coefficient(d_a, d_b) * p,
        matrix.coefficient(d_b, d_a) * p,
    )
