"""Payoff bimatrices and strategy parameterization for 3-strategy games.

Strategies are labelled 1 (Rock), 2 (Scissors), 3 (Paper). Arrays are
0-based internally, so label ``k`` lives at index ``k - 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .errors import InvalidParameterError, InvalidStrategyError

ROCK, SCISSORS, PAPER = 1, 2, 3
STRATEGY_LABELS = (ROCK, SCISSORS, PAPER)

SIMPLEX_TOL = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PayoffBimatrix:
    """3x3 grid of payoff pairs; ``alpha[i, j]`` goes to Alice, ``beta[i, j]`` to Bob.

    Row index is Alice's basis outcome, column index Bob's.
    """

    alpha: np.ndarray
    beta: np.ndarray
    epsilon: float | None = field(default=None)

    def __post_init__(self):
        alpha = _frozen(self.alpha)
        beta = _frozen(self.beta)
        if alpha.shape != (3, 3) or beta.shape != (3, 3):
            raise InvalidParameterError(
                f"payoff arrays must be 3x3, got {alpha.shape} and {beta.shape}"
            )
        if not (np.all(np.isfinite(alpha)) and np.all(np.isfinite(beta))):
            raise InvalidParameterError("payoff entries must be finite reals")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)

    @classmethod
    def from_pairs(cls, entries: Sequence[Sequence[Sequence[float]]]) -> "PayoffBimatrix":
        """Build from a 3x3 nested list of ``[alpha_ij, beta_ij]`` pairs."""
        arr = np.asarray(entries, dtype=float)
        if arr.shape != (3, 3, 2):
            raise InvalidParameterError(
                f"bimatrix must be 3x3 of [alpha, beta] pairs, got shape {arr.shape}"
            )
        return cls(arr[..., 0], arr[..., 1])

    def to_pairs(self) -> list[list[list[float]]]:
        return np.stack([self.alpha, self.beta], axis=-1).tolist()

    @property
    def upsilon_alpha(self) -> np.ndarray:
        """Alice's payoffs flattened in (11, 12, 13, 21, ..., 33) order."""
        return self.alpha.ravel()

    @property
    def upsilon_beta(self) -> np.ndarray:
        return self.beta.ravel()

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, PayoffBimatrix):
            return NotImplemented
        return bool(
            np.array_equal(self.alpha, other.alpha)
            and np.array_equal(self.beta, other.beta)
        )

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True)
class MixedQuantumStrategy:
    """Probabilities ``p`` of applying C and ``p1`` of applying D; identity gets the rest."""

    p: float
    p1: float

    @property
    def p_identity(self) -> float:
        return 1.0 - self.p - self.p1

    @property
    def weights(self) -> np.ndarray:
        """Operator weights in (I, C, D) order."""
        return np.array([self.p_identity, self.p, self.p1])

    def as_tuple(self) -> tuple[float, float]:
        return (self.p, self.p1)


def make_rsp_matrix(epsilon: float) -> PayoffBimatrix:
    """Rock-Scissors-Paper with draw premium: diagonal ``-epsilon``, wins 1, losses -1.

    The game is symmetric, so Bob's payoffs are the transpose of Alice's.
    """
    try:
        epsilon = float(epsilon)
    except (TypeError, ValueError) as exc:
        raise InvalidParameterError(f"epsilon must be a real number, got {epsilon!r}") from exc
    if not math.isfinite(epsilon):
        raise InvalidParameterError(f"epsilon must be finite, got {epsilon!r}")
    alpha = np.array(
        [
            [-epsilon, 1.0, -1.0],
            [-1.0, -epsilon, 1.0],
            [1.0, -1.0, -epsilon],
        ]
    )
    return PayoffBimatrix(alpha, alpha.T, epsilon=epsilon)


def is_symmetric(m: PayoffBimatrix) -> bool:
    """True iff ``alpha[i, j] == beta[j, i]`` exactly for every cell."""
    return bool(np.array_equal(m.alpha, m.beta.T))


def validate_strategy(p: float, p1: float) -> MixedQuantumStrategy:
    """Check ``(p, p1)`` lies in the probability simplex.

    Values within ``SIMPLEX_TOL`` outside the boundary are clamped onto it;
    anything further out raises :class:`InvalidStrategyError`.
    """
    if isinstance(p, MixedQuantumStrategy):
        raise TypeError("validate_strategy takes two numbers, not a strategy")
    p = float(p)
    p1 = float(p1)
    if not (math.isfinite(p) and math.isfinite(p1)):
        raise InvalidStrategyError(f"strategy entries must be finite, got ({p!r}, {p1!r})")
    if p < -SIMPLEX_TOL or p1 < -SIMPLEX_TOL or p + p1 > 1.0 + SIMPLEX_TOL:
        raise InvalidStrategyError(
            f"({p!r}, {p1!r}) is outside the simplex p >= 0, p1 >= 0, p + p1 <= 1"
        )
    p = max(p, 0.0)
    p1 = max(p1, 0.0)
    excess = p + p1 - 1.0
    if excess > 0.0:
        # split the overshoot proportionally so both stay nonnegative
        total = p + p1
        p, p1 = p / total, p1 / total
        if p + p1 > 1.0:
            p1 = 1.0 - p
    return MixedQuantumStrategy(p, p1)


def as_strategy(s: MixedQuantumStrategy | Sequence[float]) -> MixedQuantumStrategy:
    if isinstance(s, MixedQuantumStrategy):
        return s
    p, p1 = s
    return validate_strategy(p, p1)
