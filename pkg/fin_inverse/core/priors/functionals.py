"""
Misfit and prior functionals, and the combined acceptance probability.

Each prior branch (smoothness lambda, slope mu, flatness W) is optional; a
branch whose weight is None takes no part in the max over branches. With no
branch enabled the rule is plain Metropolis on the misfit.
"""

from __future__ import annotations
import math
from dataclasses import dataclass

import numpy as np

from ..errors import FieldError
from ..grid.fields import BoundaryTrace, ConductivityField

LOG_FLOOR = -745.0


@dataclass(frozen=True)
class PriorWeights:
    lambda_: float | None = None
    mu: float | None = None
    w: float | None = None
    sigma: float = 0.1
    epsilon0: float = 5e-5

    def __post_init__(self) -> None:
        for name, value in (("lambda", self.lambda_), ("mu", self.mu), ("w", self.w)):
            if value is not None and not (math.isfinite(value) and value >= 0):
                raise FieldError(f"{name} must be >= 0 and finite, got {value}")
        if not self.sigma > 0:
            raise FieldError(f"sigma must be > 0, got {self.sigma}")
        if not self.epsilon0 > 0:
            raise FieldError(f"epsilon0 must be > 0, got {self.epsilon0}")

    @property
    def uses_slope(self) -> bool:
        return self.mu is not None


@dataclass(frozen=True)
class SlopeTerms:
    px: float
    py: float
    degenerate: int = 0

    @property
    def total(self) -> float:
        return self.px + self.py


@dataclass(frozen=True)
class PriorEvaluation:
    f: float
    t: float
    px: float = 0.0
    py: float = 0.0


def data_misfit(d: BoundaryTrace, d_sim: BoundaryTrace, sigma: float) -> float:
    if len(d) != len(d_sim):
        raise FieldError(f"trace length mismatch: {len(d)} vs {len(d_sim)}")
    if not sigma > 0:
        raise FieldError(f"sigma must be > 0, got {sigma}")
    r = (d.values - d_sim.values) / sigma
    return 0.5 * float(np.dot(r, r))


def smoothness_term(K: ConductivityField) -> float:
    v = K.values
    gx = np.diff(v, axis=1)
    gy = np.diff(v, axis=0)
    return float(np.sum(gx * gx) + np.sum(gy * gy))


def _ratio_sums(slopes: np.ndarray, eps: float) -> tuple[float, int]:
    """Sum of |r(k) - r(k+1)| along axis 1, r(k) = (S(k) + eps) / (S(k+1) + eps)."""
    a, b, c = slopes[:, :-2], slopes[:, 1:-1], slopes[:, 2:]
    bad = (b + eps == 0.0) | (c + eps == 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.abs((a + eps) / (b + eps) - (b + eps) / (c + eps))
        if bad.any():
            e2 = 2.0 * eps
            doubled = np.abs((a + e2) / (b + e2) - (b + e2) / (c + e2))
            terms = np.where(bad, doubled, terms)
    return float(terms.sum()), int(bad.sum())


def slope_terms(K: ConductivityField, epsilon0: float) -> SlopeTerms:
    """Slope-ratio prior terms (Px, Py).

    A summand whose denominator is exactly zero is re-evaluated with epsilon0
    doubled; those summands are counted in `degenerate`.
    """
    if not epsilon0 > 0:
        raise FieldError(f"epsilon0 must be > 0, got {epsilon0}")
    v = K.values
    px, dx = _ratio_sums(np.diff(v, axis=1), epsilon0)
    py, dy = _ratio_sums(np.diff(v, axis=0).T, epsilon0)
    return SlopeTerms(px=px, py=py, degenerate=dx + dy)


def log_acceptance(
    f_n: float,
    f_c: float,
    t_n: float,
    t_c: float,
    px_c: float,
    py_c: float,
    weights: PriorWeights,
) -> float:
    """log of the acceptance probability, clamped to [LOG_FLOOR, 0]."""
    base = f_n - f_c
    exponents = []
    if weights.lambda_ is not None:
        exponents.append(base - weights.lambda_ * (t_c - t_n))
    if weights.mu is not None:
        exponents.append(base - weights.mu * (px_c + py_c))
    if weights.w is not None:
        exponents.append(base - weights.w * t_c)
    best = max(exponents) if exponents else base
    if math.isnan(best):
        return LOG_FLOOR
    return min(0.0, max(LOG_FLOOR, best))


def acceptance_probability(
    f_n: float,
    f_c: float,
    t_n: float,
    t_c: float,
    px_c: float,
    py_c: float,
    weights: PriorWeights,
) -> float:
    """max over the enabled branches of min{1, exp(exponent)}."""
    return math.exp(log_acceptance(f_n, f_c, t_n, t_c, px_c, py_c, weights))
